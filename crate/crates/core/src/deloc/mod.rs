//! Eigenvector delocalization: localization functionals, the reduction to
//! invertibility, deterministic audits of the invertibility argument, and
//! Monte Carlo drivers.

mod audits;
mod experiments;
mod levelset;
mod localization;
mod net;

pub use audits::{
    column_distances, decomposition_bound_audit, neg_second_moment_audit, reduction_audit,
    row_deletion_audit, sample_plus_gain, split_spectral_subspaces, AuditStatus, DecompositionAudit,
    ReductionAudit, RowDeletionAudit, SecondMomentAudit, SplitResult,
};
pub use experiments::{
    audits_experiment, deloc_experiment, distance_experiment, kernel_lcd, kernel_lcd_experiment,
    min_localization, planted_kernel_matrix, smin_experiment, KernelLcdParams,
};
pub use levelset::{
    compressible_net_bound, gamma_d0, integer_net_check, integer_point_net, levelset_net_bound,
    IntegerNetCheck, LevelSetBound, LevelSetCase, LevelSetParams, MAX_INTEGER_NET_DIM,
    MAX_INTEGER_NET_RADIUS,
};
pub use localization::{
    ceil_count, deloc_profile, loc_event, localization_norm, smallest_coordinates, DelocReport,
};
pub use net::{disc_net, DiscNet};

#[cfg(test)]
mod tests;

//! Arithmetic structure of vectors and subspaces: least common
//! denominators, small coordinates, real–imaginary correlation and
//! compressibility.

mod coords;
mod lcd;

pub use coords::{
    binomial, cauchy_binet_audit, compress_class, floor_count, gram_det, rc_correlation, sm_set,
    CauchyBinetAudit, CompressClass, CorrelationMethod, CorrelationResult, EXACT_SUBSET_BUDGET,
};
pub use lcd::{
    default_matrix2_search, default_vector_search, lattice_dist, lcd_condition, lcd_lower_bound,
    lcd_lower_bound_vector, lcd_matrix2, lcd_matrix2_default, lcd_subspace_upper,
    lcd_subspace_upper_with, lcd_vector, lcd_vector_default, log_slack, LcdEstimate, LcdKind,
    SubspaceSearch,
};

#[cfg(test)]
mod tests;

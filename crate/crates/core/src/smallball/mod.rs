//! Concentration functions `L(Z, t) = sup_u P(‖Z − u‖₂ ≤ t)` and the
//! LCD-based upper bounds for them.

mod bounds;
mod concentration;

pub use bounds::{
    bound_domination_audit, bound_domination_audit_with, min_admissible_l, sbp_bound,
    sbp_bound_formula, tensorization_audit, BoundParams, DominationAudit, Geometry, C_GRID_STEP,
};
pub use concentration::{
    concentration_mc, exact_concentration_curve, exact_concentration_enum,
    exact_concentration_points, sign_atoms, sum_distribution, ConcentrationEstimate,
    ConcentrationMethod, Sampler, MAX_OUTCOMES,
};

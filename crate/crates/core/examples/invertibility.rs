//! Invertibility on a coordinate block, distances to random subspaces and
//! the decomposition bound.

use num_complex::Complex64;
use nogaps::deloc::{decomposition_bound_audit, distance_experiment, smin_experiment};
use nogaps::ensembles::{sample_matrix, EnsembleSpec, EntryDist};
use nogaps::harness::{metric_median, summarize_joint};

fn main() -> nogaps::Result<()> {
    let n = 48;
    let spec = EnsembleSpec::square(n, EntryDist::SymmetricSign);
    let lambda0 = Complex64::new(0.5, 0.5) * (n as f64).sqrt();
    let records = smin_experiment(&spec, 0.125, lambda0, 40, 2024)?;
    println!("median s_min((A - l0)_(I^c)) / sqrt(n) = {:.4}", metric_median(&records, "smin_scaled")?);
    let s = summarize_joint(&records, "smin_scaled", "boundedness_held", &[1e-3, 1e-2, 0.05, 0.1])?;
    for (i, t) in s.threshold_grid.iter().enumerate() {
        println!(
            "  P(s_min <= {t} sqrt(n) and bounded) = {:.3} [{:.3}, {:.3}]",
            s.empirical_prob[i], s.wilson_lo[i], s.wilson_hi[i]
        );
    }

    let h_spec = EnsembleSpec::iid(40, 1, EntryDist::standard_gaussian());
    let records = distance_experiment(&h_spec, &EntryDist::standard_gaussian(), 0.2, 100, 9)?;
    let s = summarize_joint(&records, "dist_scaled", "boundedness_held", &[0.1, 0.5, 1.0, 1.5])?;
    println!("dist(Z, Im H) / sqrt(eps N) tail: {:.3?}", s.empirical_prob);

    let a = sample_matrix(&EnsembleSpec::iid(20, 16, EntryDist::standard_gaussian()), 4)?;
    let audit = decomposition_bound_audit(&a, 12, None)?;
    println!(
        "decomposition: s_A = {:.4} >= s_B s_G / (4|A|) = {:.4} ({} dims below threshold {:.3})",
        audit.s_a, audit.bound, audit.minus_dim, audit.threshold
    );
    Ok(())
}

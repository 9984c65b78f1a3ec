//! Small coordinates, real-imaginary correlation, compressibility and the
//! Cauchy-Binet inequality behind the correlation bound.

use num_complex::Complex64;
use nogaps::structure::{
    cauchy_binet_audit, compress_class, rc_correlation, sm_set, CorrelationMethod,
};

fn main() -> nogaps::Result<()> {
    let raw = [(0.9, 0.1), (0.3, -0.2), (0.1, 0.25), (-0.2, 0.05), (0.05, -0.3), (0.15, 0.1), (-0.1, -0.1), (0.2, 0.2)];
    let norm = raw.iter().map(|(a, b): &(f64, f64)| a * a + b * b).sum::<f64>().sqrt();
    let z: Vec<Complex64> = raw.iter().map(|&(a, b)| Complex64::new(a / norm, b / norm)).collect();

    println!("sm(z) at delta = 0.25: {:?}", sm_set(&z, 0.25)?);
    let exact = rc_correlation(&z, 0.25, CorrelationMethod::Exact)?;
    let greedy = rc_correlation(&z, 0.25, CorrelationMethod::Greedy)?;
    println!(
        "d(z): exact {:.6} on {:?}, greedy {:.6} on {:?}",
        exact.d_value, exact.witness_subset, greedy.d_value, greedy.witness_subset
    );
    let cb = cauchy_binet_audit(&z, 0.25)?;
    println!("Cauchy-Binet: lhs {:.3e} >= rhs {:.3e}: {}", cb.lhs, cb.rhs, cb.holds);

    for (c0, c1) in [(0.25, 0.1), (0.25, 0.5), (0.5, 0.5)] {
        let (class, dist) = compress_class(&z, c0, c1)?;
        println!("c0 = {c0}, c1 = {c1}: {class:?} (distance to sparse {dist:.4})");
    }
    Ok(())
}

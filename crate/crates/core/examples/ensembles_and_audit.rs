//! Sample matrices from a few ensembles, audit the entry laws and calibrate
//! the norm bound `‖A‖ ≤ M√n`.

use nogaps::ensembles::{
    audit_distribution, boundedness_holds, calibrate_boundedness, sample_matrix, Dependency,
    EnsembleSpec, EntryDist,
};
use nogaps::densela::operator_norm;

fn main() -> nogaps::Result<()> {
    let laws = [
        ("symmetric sign", EntryDist::SymmetricSign),
        ("gaussian", EntryDist::standard_gaussian()),
        ("uniform[-2,2]", EntryDist::Uniform { a: -2.0, b: 2.0 }),
        (
            "lazy sign",
            EntryDist::Discrete {
                table: vec![(-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)],
            },
        ),
    ];
    println!("entry law audits at K = 3, p = 0.3:");
    for (name, law) in &laws {
        let audit = audit_distribution(law, 3.0, 0.3, 20_000, 1)?;
        println!(
            "  {name:<15} sup_u P(|x-u|<1) = {:.3}  P(|x|>K) = {:.4}  passes = {}",
            audit.sup_shift_prob, audit.tail_prob, audit.passes
        );
    }

    let n = 64;
    for dep in [Dependency::Independent, Dependency::Symmetric, Dependency::Skew] {
        let spec = EnsembleSpec::square(n, EntryDist::SymmetricSign).with_dependency(dep);
        let a = sample_matrix(&spec, 7)?;
        let m = calibrate_boundedness(&spec, 0.95, 40, 11)?;
        println!(
            "{dep:?}: ||A||/sqrt(n) = {:.3}, calibrated M = {m:.2}, bound holds at M: {}",
            operator_norm(&a)? / (n as f64).sqrt(),
            boundedness_holds(&a, m)?
        );
    }

    let imag: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| if i == j { 0.5 } else { 0.0 }).collect()).collect();
    let spec = EnsembleSpec::square(4, EntryDist::standard_gaussian()).with_fixed_imag(imag);
    let a = sample_matrix(&spec, 3)?;
    println!("gaussian + fixed imaginary diagonal, first row: {:?}", a.row(0));
    Ok(())
}

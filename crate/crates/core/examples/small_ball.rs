//! Concentration functions: exact enumeration, Monte Carlo, the LCD bounds
//! and a fitted-constant domination audit.

use nogaps::ensembles::EntryDist;
use nogaps::smallball::{
    bound_domination_audit, concentration_mc, exact_concentration_curve, min_admissible_l,
    sbp_bound, sign_atoms, BoundParams, Geometry, Sampler,
};
use nogaps::structure::lcd_vector_default;

fn main() -> nogaps::Result<()> {
    let n = 10;
    let flat = vec![1.0 / (n as f64).sqrt(); n];
    let spread: Vec<f64> = (1..=n).map(|k| k as f64).collect();
    let ns = spread.iter().map(|x| x * x).sum::<f64>().sqrt();
    let spread: Vec<f64> = spread.iter().map(|x| x / ns).collect();
    let t_grid = [0.0, 0.01, 0.05, 0.1, 0.3];

    for (name, a) in [("flat", &flat), ("spread", &spread)] {
        let atoms = vec![sign_atoms(); n];
        let curve = exact_concentration_curve(&atoms, a, &t_grid)?;
        let vals: Vec<f64> = curve.iter().map(|e| e.value).collect();
        println!("{name:<7} exact L(S, t) on {t_grid:?}: {vals:.4?}");
        let mc = concentration_mc(
            &Sampler::WeightedSum {
                weights: a.clone(),
                dist: EntryDist::SymmetricSign,
            },
            0.05,
            100_000,
            1,
        )?;
        println!("        Monte Carlo at t = 0.05: {:.4} +- {:.4}", mc.value, mc.stderr);
    }

    let p = 0.3;
    let l = min_admissible_l(1, p);
    let params = BoundParams::new(l, 1.0, p, 3.0);
    let d = lcd_vector_default(&spread, l)?.value;
    let b = sbp_bound(&params, &Geometry::Sum { a: spread.clone(), d }, 0.05)?;
    println!("bound for sums at L = {l:.3}, D = {d:.3}, t = 0.05, C = 1: {b:.4}");

    let audit = bound_domination_audit(&[flat, spread], &params, &t_grid)?;
    println!(
        "domination audit: fitted C = {:.2} over {} points, violations at C = 1: {}",
        audit.fitted_c, audit.points, audit.violations
    );
    Ok(())
}

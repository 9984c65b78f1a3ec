//! Least common denominators of vectors, 2-row matrices and subspaces.

use nogaps::densela::RealMatrix;
use nogaps::structure::{
    lcd_lower_bound_vector, lcd_matrix2_default, lcd_subspace_upper, lcd_vector_default,
};

fn main() -> nogaps::Result<()> {
    let s = 2f64.sqrt();
    let cases: Vec<(&str, Vec<f64>, f64)> = vec![
        ("(1,1)/sqrt2", vec![1.0 / s, 1.0 / s], 0.5),
        ("e1", vec![1.0, 0.0, 0.0], 1.0),
        ("ones/sqrt24", vec![1.0 / 24f64.sqrt(); 24], 6f64.sqrt()),
        ("(1,2,2)/3", vec![1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0], 0.5),
        ("(1,sqrt2)/sqrt3", vec![1.0 / 3f64.sqrt(), s / 3f64.sqrt()], 0.5),
    ];
    for (name, v, l) in cases {
        let est = lcd_vector_default(&v, l)?;
        println!(
            "D({name}, L={l:.3}) = {:.6}  (residual {:.4}, censored {}, lower bound 1/(2|v|inf) = {:.4})",
            est.value,
            est.witness_residual,
            est.censored,
            lcd_lower_bound_vector(&v)?
        );
    }

    let m = RealMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]])?;
    let est = lcd_matrix2_default(&m, 0.9)?;
    println!("D(I_2, L=0.9) = {:.5} at theta = {:.4?}", est.value, est.witness);

    let n = 6;
    let ones: Vec<f64> = vec![1.0 / (n as f64).sqrt(); n];
    let mut other = vec![0.0; n];
    other[0] = 1.0 / s;
    other[1] = -1.0 / s;
    let est = lcd_subspace_upper(&[ones, other], 1.0, 8, 42)?;
    println!(
        "subspace LCD upper estimate: {:.4} along direction {:.3?}",
        est.value,
        est.direction.unwrap_or_default()
    );
    Ok(())
}

use num_complex::Complex64;

use super::matrix::{inner, norm2, real_dot, real_norm2, ComplexDenseMatrix, ComplexVector};
use super::svd::svd;
use crate::error::{Error, Result};

/// Default relative rank tolerance, `64 ε max(rows, cols)`.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    64.0 * f64::EPSILON * rows.max(cols) as f64
}

/// Orthonormal basis of `span(vectors)` by modified Gram–Schmidt with one
/// reorthogonalization pass. Vectors whose remainder falls below
/// `rel_tol · ‖original‖` are dropped.
pub fn orthonormalize(vectors: &[ComplexVector], rel_tol: f64) -> Vec<ComplexVector> {
    let mut basis: Vec<ComplexVector> = Vec::new();
    for v in vectors {
        let original = norm2(v);
        if original == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let proj = inner(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= bi * proj;
                }
            }
        }
        let nw = norm2(&w);
        if nw > rel_tol * original {
            basis.push(w.into_iter().map(|z| z / nw).collect());
        }
    }
    basis
}

/// Orthogonal projection of `z` onto the span of an orthonormal basis.
pub fn project(z: &[Complex64], basis: &[ComplexVector]) -> ComplexVector {
    let mut out = vec![Complex64::new(0.0, 0.0); z.len()];
    for b in basis {
        let c = inner(b, z);
        for (o, bi) in out.iter_mut().zip(b) {
            *o += bi * c;
        }
    }
    out
}

pub fn project_real(x: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for b in basis {
        let c = real_dot(b, x);
        for (o, bi) in out.iter_mut().zip(b) {
            *o += bi * c;
        }
    }
    out
}

/// Euclidean distance from `z` to the column span of `h`.
pub fn dist_to_colspan(z: &[Complex64], h: &ComplexDenseMatrix) -> Result<f64> {
    if z.len() != h.rows() {
        return Err(Error::Shape(format!(
            "vector of length {} against {} rows",
            z.len(),
            h.rows()
        )));
    }
    let basis = orthonormalize(&h.columns(), 1e-12);
    let p = project(z, &basis);
    Ok(z.iter().zip(&p).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
}

/// Orthonormal basis of the numerical kernel: right singular vectors with
/// singular value at most `rank_tol · s₁`.
pub fn kernel_basis(b: &ComplexDenseMatrix, rank_tol: f64) -> Result<Vec<ComplexVector>> {
    if !(rank_tol > 0.0) {
        return Err(Error::parameter("rank_tol", "must be positive"));
    }
    let dec = svd(b)?;
    let cut = rank_tol * dec.largest();
    Ok(dec
        .right_values()
        .iter()
        .zip(&dec.right_basis)
        .filter(|(&s, _)| s <= cut)
        .map(|(_, v)| v.clone())
        .collect())
}

/// Largest deviation of `⟨bᵢ, bⱼ⟩` from `δᵢⱼ` over a real basis.
pub fn real_orthonormality_defect(basis: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0_f64;
    for (i, a) in basis.iter().enumerate() {
        worst = worst.max((real_norm2(a) - 1.0).abs());
        for b in &basis[i + 1..] {
            worst = worst.max(real_dot(a, b).abs());
        }
    }
    worst
}

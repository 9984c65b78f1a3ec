use num_complex::Complex64;

use super::matrix::{inner, norm2, ComplexDenseMatrix, ComplexVector};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Singular value decomposition `A = U Σ V*`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// Descending, length `min(rows, cols)`.
    pub singular_values: Vec<f64>,
    /// `min(rows, cols)` orthonormal vectors of length `rows`.
    pub left_basis: Vec<ComplexVector>,
    /// A complete orthonormal basis of `C^cols`; vector `i` pairs with
    /// [`right_values`](Self::right_values)`[i]`.
    pub right_basis: Vec<ComplexVector>,
    /// Largest `‖A vᵢ − sᵢ uᵢ‖₂` over the retained triples.
    pub backend_residual: f64,
    right_values: Vec<f64>,
}

impl SvdResult {
    /// Gains `‖A vᵢ‖₂` for every vector of the full right basis, descending.
    /// Has length `cols`; entries past `min(rows, cols)` are zero.
    pub fn right_values(&self) -> &[f64] {
        &self.right_values
    }

    pub fn largest(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    /// Reconstructs `U Σ V*` from the retained triples.
    pub fn reconstruct(&self, rows: usize, cols: usize) -> ComplexDenseMatrix {
        let mut out = ComplexDenseMatrix::zeros(rows, cols);
        for (k, &s) in self.singular_values.iter().enumerate() {
            if s == 0.0 {
                continue;
            }
            let u = &self.left_basis[k];
            let v = &self.right_basis[k];
            for i in 0..rows {
                let us = u[i] * s;
                for j in 0..cols {
                    out[(i, j)] += us * v[j].conj();
                }
            }
        }
        out
    }
}

/// Full SVD by one-sided (Hestenes) Jacobi rotations on the columns of `a`.
///
/// Deterministic for a fixed input. The right basis is always complete, so
/// for wide matrices it contains the null space as well.
pub fn svd(a: &ComplexDenseMatrix) -> Result<SvdResult> {
    if !a.is_finite() {
        return Err(Error::validation("matrix", "entries must be finite"));
    }
    let (m, n) = a.shape();
    let mut cols = a.columns();
    let mut v: Vec<ComplexVector> = (0..n).map(|j| unit(n, j)).collect();
    let mut norms: Vec<f64> = cols.iter().map(|c| inner(c, c).re).collect();

    let tol = (m.max(1) as f64) * f64::EPSILON;
    // Columns at rounding level are treated as zero; in a wide matrix they
    // cannot all be made mutually orthogonal.
    let negligible = (f64::EPSILON * a.frobenius_norm()).powi(2) * (m.max(n) as f64);
    let mut converged = n < 2;
    let mut worst = 0.0;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        worst = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha <= negligible || beta <= negligible || alpha.min(beta) <= f64::MIN_POSITIVE {
                    continue;
                }
                let gamma = inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                let cosine = g / (alpha * beta).sqrt();
                worst = worst.max(cosine);
                if cosine <= tol {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
                norms[p] = alpha - t * g;
                norms[q] = beta + t * g;
            }
        }
        // Refresh cached norms to stop drift.
        for (nrm, c) in norms.iter_mut().zip(&cols) {
            *nrm = inner(c, c).re;
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numeric {
            message: format!("Jacobi SVD did not converge in {MAX_SWEEPS} sweeps"),
            residual: worst,
        });
    }

    let gains: Vec<f64> = cols.iter().map(|c| norm2(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| gains[j].total_cmp(&gains[i]).then(i.cmp(&j)));

    let k = m.min(n);
    let smax = order.first().map_or(0.0, |&i| gains[i]);
    let zero_cut = smax * f64::EPSILON * (m.max(n) as f64);

    let mut right_values = Vec::with_capacity(n);
    let mut right_basis = Vec::with_capacity(n);
    for (rank, &j) in order.iter().enumerate() {
        // Past min(m, n) the columns are numerically zero; report exact zeros.
        right_values.push(if rank < k { gains[j] } else { 0.0 });
        right_basis.push(v[j].clone());
    }

    let mut left_basis: Vec<ComplexVector> = Vec::with_capacity(k);
    let mut singular_values = Vec::with_capacity(k);
    for &j in order.iter().take(k) {
        let s = gains[j];
        singular_values.push(s);
        if s > zero_cut && s > 0.0 {
            left_basis.push(cols[j].iter().map(|z| z / s).collect());
        } else {
            left_basis.push(Vec::new());
        }
    }
    fill_missing_basis(&mut left_basis, m);

    let mut backend_residual = 0.0_f64;
    for i in 0..k {
        let av = a.matvec(&right_basis[i])?;
        let r: f64 = av
            .iter()
            .zip(&left_basis[i])
            .map(|(x, u)| (x - u * singular_values[i]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        backend_residual = backend_residual.max(r);
    }

    Ok(SvdResult {
        singular_values,
        left_basis,
        right_basis,
        backend_residual,
        right_values,
    })
}

/// Smallest singular value, `min ‖Ax‖₂` over unit `x`. Requires a tall or
/// square matrix.
pub fn s_min(a: &ComplexDenseMatrix) -> Result<f64> {
    if a.rows() < a.cols() {
        return Err(Error::Shape(format!(
            "s_min needs rows >= cols, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(svd(a)?.smallest())
}

/// `inf ‖Ax‖₂` over unit `x`, for any shape (zero for wide matrices).
pub fn min_gain(a: &ComplexDenseMatrix) -> Result<f64> {
    if a.cols() == 0 {
        return Ok(f64::INFINITY);
    }
    Ok(*svd(a)?.right_values().last().unwrap())
}

pub fn operator_norm(a: &ComplexDenseMatrix) -> Result<f64> {
    Ok(svd(a)?.largest())
}

fn rotate(vecs: &mut [ComplexVector], p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    let (left, right) = vecs.split_at_mut(q);
    let vp = &mut left[p];
    let vq = &mut right[0];
    for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
        let yp = phase * *y;
        let nx = *x * c - yp * s;
        let ny = *x * s + yp * c;
        *x = nx;
        *y = ny;
    }
}

fn unit(n: usize, j: usize) -> ComplexVector {
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    e[j] = Complex64::new(1.0, 0.0);
    e
}

/// Replaces empty entries of `basis` with unit vectors orthogonal to all
/// others. Each fill takes the standard basis vector with the largest
/// component outside the current span.
pub(crate) fn fill_missing_basis(basis: &mut [ComplexVector], dim: usize) {
    for idx in 0..basis.len() {
        if !basis[idx].is_empty() {
            continue;
        }
        let mut best: Option<(f64, ComplexVector)> = None;
        for candidate in 0..dim {
            let mut w = unit(dim, candidate);
            for _ in 0..2 {
                for b in basis.iter().filter(|b| !b.is_empty()) {
                    let proj = inner(b, &w);
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= bi * proj;
                    }
                }
            }
            let nw = norm2(&w);
            if best.as_ref().is_none_or(|(bn, _)| nw > *bn) {
                best = Some((nw, w));
            }
        }
        if let Some((nw, w)) = best {
            basis[idx] = w.into_iter().map(|z| z / nw).collect();
        }
    }
}

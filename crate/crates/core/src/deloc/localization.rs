use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::densela::{eigenpairs, norm2, ComplexDenseMatrix, ComplexVector};
use crate::error::{Error, Result};

/// `⌈εn⌉`, with a small guard so that `0.3 · 10` counts as 3.
pub fn ceil_count(eps: f64, n: usize) -> Result<usize> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::parameter("epsilon", "must be positive"));
    }
    let k = (eps * n as f64 - 1e-9).ceil().max(0.0) as usize;
    if k < 1 || k > n {
        return Err(Error::parameter(
            "epsilon",
            format!("ceil(epsilon * n) = {k} must lie in [1, {n}]"),
        ));
    }
    Ok(k)
}

fn check_unit(v: &[Complex64]) -> Result<()> {
    let nv = norm2(v);
    if (nv - 1.0).abs() > 1e-10 {
        return Err(Error::Normalization(nv));
    }
    Ok(())
}

/// Indices of the `k` smallest-modulus coordinates, ties to the lower index.
pub fn smallest_coordinates(v: &[Complex64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].norm().total_cmp(&v[j].norm()).then(i.cmp(&j)));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// `min ‖v_I‖₂` over `|I| ≥ ⌈εn⌉`: the mass of the `⌈εn⌉` smallest
/// coordinates.
pub fn localization_norm(v: &[Complex64], eps: f64) -> Result<f64> {
    check_unit(v)?;
    let k = ceil_count(eps, v.len())?;
    let mut sq: Vec<f64> = v.iter().map(Complex64::norm_sqr).collect();
    sq.sort_by(f64::total_cmp);
    Ok(sq[..k].iter().sum::<f64>().sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelocReport {
    pub eigen_index: usize,
    pub eigenvalue: Complex64,
    /// `(ε, min_mass)` pairs in the order of the requested grid.
    pub localization_curve: Vec<(f64, f64)>,
    pub sup_norm: f64,
    pub residual: f64,
    pub defective: bool,
    pub vector: ComplexVector,
}

impl DelocReport {
    /// Builds a report for a given unit vector.
    pub fn from_vector(
        eigen_index: usize,
        eigenvalue: Complex64,
        vector: ComplexVector,
        residual: f64,
        eps_grid: &[f64],
    ) -> Result<Self> {
        check_unit(&vector)?;
        let n = vector.len();
        let mut sq: Vec<f64> = vector.iter().map(Complex64::norm_sqr).collect();
        sq.sort_by(f64::total_cmp);
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(0.0);
        for s in &sq {
            prefix.push(prefix.last().unwrap() + s);
        }
        let localization_curve = eps_grid
            .iter()
            .map(|&eps| Ok((eps, prefix[ceil_count(eps, n)?].sqrt().min(1.0))))
            .collect::<Result<Vec<_>>>()?;
        let sup_norm = vector.iter().map(|z| z.norm()).fold(0.0, f64::max).min(1.0);
        Ok(Self {
            eigen_index,
            eigenvalue,
            localization_curve,
            sup_norm,
            residual,
            defective: false,
            vector,
        })
    }
}

/// Localization profile of every eigenvector of a square matrix.
///
/// `tol` is the relative cluster width handed to the eigensolver.
pub fn deloc_profile(a: &ComplexDenseMatrix, eps_grid: &[f64], tol: f64) -> Result<Vec<DelocReport>> {
    let eig = eigenpairs(a, tol)?;
    eig.pairs
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut r = DelocReport::from_vector(i, p.value, p.vector, p.residual, eps_grid)?;
            r.defective = p.defective;
            Ok(r)
        })
        .collect()
}

/// `Loc(A, ε, δ)`: some eigenvector has `localization_norm(v, ε) < δ`.
pub fn loc_event(reports: &[DelocReport], eps: f64, delta: f64) -> Result<bool> {
    if reports.is_empty() {
        return Err(Error::parameter("reports", "empty report list"));
    }
    for r in reports {
        if localization_norm(&r.vector, eps)? < delta {
            return Ok(true);
        }
    }
    Ok(false)
}

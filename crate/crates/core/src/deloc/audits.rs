//! Deterministic audits of the invertibility pipeline.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::localization::{ceil_count, deloc_profile, localization_norm, smallest_coordinates};
use super::net::disc_net;
use crate::densela::{
    dist_to_colspan, min_gain, norm2, operator_norm, s_min, svd, ComplexDenseMatrix, ComplexVector,
};
use crate::ensembles::shift_matrix;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditStatus {
    Certified,
    /// No eigenvector is localized at `(ε, δ)`.
    NotApplicable,
    /// `‖A‖ > M√n`.
    SkippedUnbounded,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionAudit {
    pub status: AuditStatus,
    pub op_norm: f64,
    /// Smallest `localization_norm(v, ε)` over the eigenvectors.
    pub min_localization: f64,
    pub eigen_index: Option<usize>,
    pub eigenvalue: Option<Complex64>,
    pub lambda0: Option<Complex64>,
    /// The coordinate set `I`, 0-based.
    pub subset: Vec<usize>,
    pub smin: Option<f64>,
    /// `8Mδ√n`.
    pub bound: f64,
}

impl ReductionAudit {
    /// False only on a violation.
    pub fn passed(&self) -> bool {
        self.status != AuditStatus::Violated
    }
}

/// If some eigenvector `v` of `A` has `‖v_I‖₂ < δ` on `|I| = ⌈εn⌉`, exhibits
/// `I` and a net point `λ₀` with `s_min((A − λ₀)_{I^c}) ≤ 8Mδ√n`.
///
/// Needs `δ ≤ 1/2`. The bound is checked with slack for the eigenpair
/// residual.
pub fn reduction_audit(a: &ComplexDenseMatrix, eps: f64, delta: f64, m: f64) -> Result<ReductionAudit> {
    if !a.is_square() {
        return Err(Error::Shape("reduction audit needs a square matrix".into()));
    }
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::parameter("delta", "must lie in (0, 1/2]"));
    }
    let n = a.rows();
    let k = ceil_count(eps, n)?;
    let sqrt_n = (n as f64).sqrt();
    let bound = 8.0 * m * delta * sqrt_n;
    let op_norm = operator_norm(a)?;
    let mut out = ReductionAudit {
        status: AuditStatus::SkippedUnbounded,
        op_norm,
        min_localization: f64::NAN,
        eigen_index: None,
        eigenvalue: None,
        lambda0: None,
        subset: Vec::new(),
        smin: None,
        bound,
    };
    if op_norm > m * sqrt_n {
        return Ok(out);
    }
    let reports = deloc_profile(a, &[], 1e-8)?;
    let mut best: Option<(f64, usize)> = None;
    for (i, r) in reports.iter().enumerate() {
        let mass = localization_norm(&r.vector, eps)?;
        if best.is_none_or(|(b, _)| mass < b) {
            best = Some((mass, i));
        }
    }
    let (mass, idx) = best.ok_or_else(|| Error::parameter("A", "empty matrix"))?;
    out.min_localization = mass;
    if !(mass < delta) {
        out.status = AuditStatus::NotApplicable;
        return Ok(out);
    }
    let r = &reports[idx];
    let net = disc_net(m, n, delta)?;
    let lambda0 = net.nearest(r.eigenvalue);
    let subset = smallest_coordinates(&r.vector, k);
    let complement: Vec<usize> = (0..n).filter(|j| !subset.contains(j)).collect();
    let smin = if complement.is_empty() {
        0.0
    } else {
        s_min(&shift_matrix(a, lambda0)?.select_columns(&complement))?
    };
    let slack = 2.0 * r.residual + 1e-12 * op_norm.max(1.0);
    out.status = if smin <= bound + slack {
        AuditStatus::Certified
    } else {
        AuditStatus::Violated
    };
    out.eigen_index = Some(idx);
    out.eigenvalue = Some(r.eigenvalue);
    out.lambda0 = Some(lambda0);
    out.subset = subset;
    out.smin = Some(smin);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondMomentAudit {
    /// `Σ s_j(B)⁻²`.
    pub lhs: f64,
    /// `Σ dist(B_j, H_j)⁻²`, `H_j` the span of the other columns.
    pub rhs: f64,
    /// `|lhs − rhs| / lhs`.
    pub gap: f64,
}

/// Both sides of the negative second moment identity for a tall matrix
/// of full column rank.
pub fn neg_second_moment_audit(b: &ComplexDenseMatrix) -> Result<SecondMomentAudit> {
    let (rows, cols) = b.shape();
    if rows < cols || cols == 0 {
        return Err(Error::Shape(format!(
            "need a tall matrix with at least one column, got {rows}x{cols}"
        )));
    }
    let dec = svd(b)?;
    let cut = 64.0 * f64::EPSILON * rows as f64 * dec.largest();
    if !(dec.smallest() > cut) {
        return Err(Error::Singular(format!(
            "smallest singular value {:e} at or below {cut:e}",
            dec.smallest()
        )));
    }
    let lhs: f64 = dec.singular_values.iter().map(|s| s.powi(-2)).sum();
    let rhs: f64 = column_distances(b)?.iter().map(|d| d.powi(-2)).sum();
    Ok(SecondMomentAudit {
        lhs,
        rhs,
        gap: (lhs - rhs).abs() / lhs,
    })
}

/// `dist(B_j, span{B_k : k ≠ j})` for each column `j`.
pub fn column_distances(b: &ComplexDenseMatrix) -> Result<Vec<f64>> {
    let cols = b.cols();
    (0..cols)
        .map(|j| {
            let others: Vec<usize> = (0..cols).filter(|&k| k != j).collect();
            dist_to_colspan(&b.column(j), &b.select_columns(&others))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowDeletionAudit {
    pub row: usize,
    pub before: Vec<f64>,
    pub after: Vec<f64>,
    /// Every column distance is at least its value after the deletion.
    pub holds: bool,
}

/// Column-to-span distances before and after deleting one row. Removing a
/// coordinate can only shrink each distance.
pub fn row_deletion_audit(b: &ComplexDenseMatrix, row: usize) -> Result<RowDeletionAudit> {
    if row >= b.rows() || b.rows() < 2 {
        return Err(Error::parameter("row", format!("must index one of {} rows (>= 2)", b.rows())));
    }
    let before = column_distances(b)?;
    let after = column_distances(&b.without_row(row))?;
    let scale = b.frobenius_norm().max(1.0);
    let holds = before.iter().zip(&after).all(|(x, y)| *x >= y - 1e-12 * scale);
    Ok(RowDeletionAudit {
        row,
        before,
        after,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitResult {
    /// Right singular vectors with gain at most `threshold`.
    pub minus_basis: Vec<ComplexVector>,
    pub plus_basis: Vec<ComplexVector>,
    pub threshold: f64,
    pub minus_dim: usize,
    /// Gains `‖B w‖₂` of the plus vectors, descending.
    pub plus_values: Vec<f64>,
}

impl SplitResult {
    pub fn plus_dim(&self) -> usize {
        self.plus_basis.len()
    }
}

/// Splits `C^cols` into the spans `E⁻`, `E⁺` of right singular vectors of
/// `B` with singular value at most / above `threshold`.
pub fn split_spectral_subspaces(b: &ComplexDenseMatrix, threshold: f64) -> Result<SplitResult> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::parameter("threshold", "must be positive"));
    }
    let dec = svd(b)?;
    let mut minus_basis = Vec::new();
    let mut plus_basis = Vec::new();
    let mut plus_values = Vec::new();
    for (v, &s) in dec.right_basis.iter().zip(dec.right_values()) {
        if s <= threshold {
            minus_basis.push(v.clone());
        } else {
            plus_basis.push(v.clone());
            plus_values.push(s);
        }
    }
    Ok(SplitResult {
        minus_dim: minus_basis.len(),
        minus_basis,
        plus_basis,
        threshold,
        plus_values,
    })
}

/// Smallest `‖Bx‖₂` over `samples` random unit `x ∈ E⁺` (Gaussian
/// coefficients). Infinite when `E⁺ = {0}`.
pub fn sample_plus_gain(b: &ComplexDenseMatrix, split: &SplitResult, samples: usize, seed: u64) -> Result<f64> {
    if split.plus_basis.is_empty() {
        return Ok(f64::INFINITY);
    }
    let mut rng = rng_from_seed(seed);
    let dim = b.cols();
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let mut x = vec![Complex64::new(0.0, 0.0); dim];
        for w in &split.plus_basis {
            let g = Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
            for (xi, wi) in x.iter_mut().zip(w) {
                *xi += g * wi;
            }
        }
        let nx = norm2(&x);
        if nx == 0.0 {
            continue;
        }
        worst = worst.min(norm2(&b.matvec(&x)?) / nx);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionAudit {
    pub s_a: f64,
    pub s_b_on_plus: f64,
    pub s_g_on_minus: f64,
    pub op_norm: f64,
    /// `s_B s_G / (4‖A‖)`.
    pub bound: f64,
    pub threshold: f64,
    pub minus_dim: usize,
    pub holds: bool,
}

/// Midpoint of the widest gap between consecutive values of a
/// descending list.
fn widest_gap_midpoint(values: &[f64]) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    for w in values.windows(2) {
        let gap = w[0] - w[1];
        if gap > 0.0 && best.is_none_or(|(g, _)| gap > g) {
            best = Some((gap, 0.5 * (w[0] + w[1])));
        }
    }
    best.map(|(_, mid)| mid)
}

/// Checks `s_min(A) ≥ s_min(B|E⁺) · s_min(G|E⁻) / (4‖A‖)` for `A = [B; G]`
/// split after `split_row`, with `E^±` from [`split_spectral_subspaces`]
/// on `B`.
///
/// The threshold must leave both `E⁻` and `E⁺` nonempty. By default it is
/// the midpoint of the widest gap in the singular values of `B` (padded
/// with zeros to `cols` entries).
pub fn decomposition_bound_audit(
    a: &ComplexDenseMatrix,
    split_row: usize,
    threshold: Option<f64>,
) -> Result<DecompositionAudit> {
    let (rows, cols) = a.shape();
    if rows < cols {
        return Err(Error::Shape(format!("need a tall or square matrix, got {rows}x{cols}")));
    }
    if split_row < 1 || split_row >= rows {
        return Err(Error::parameter("split_row", format!("must lie in [1, {rows})")));
    }
    let b = a.select_rows(0..split_row);
    let g = a.select_rows(split_row..rows);
    let dec = svd(&b)?;
    let values = dec.right_values();
    let threshold = match threshold {
        Some(t) => t,
        None => widest_gap_midpoint(values)
            .ok_or_else(|| Error::parameter("threshold", "singular values of B have no gap"))?,
    };
    let split = split_spectral_subspaces(&b, threshold)?;
    if split.minus_dim == 0 || split.plus_dim() == 0 {
        return Err(Error::parameter(
            "threshold",
            format!("{threshold} leaves one of the two subspaces empty"),
        ));
    }
    let s_b = *split.plus_values.last().unwrap();
    let u_minus = ComplexDenseMatrix::from_columns(cols, &split.minus_basis)?;
    let s_g = min_gain(&g.matmul(&u_minus)?)?;
    let s_a = s_min(a)?;
    let op_norm = operator_norm(a)?;
    let bound = if op_norm > 0.0 { s_b * s_g / (4.0 * op_norm) } else { 0.0 };
    Ok(DecompositionAudit {
        s_a,
        s_b_on_plus: s_b,
        s_g_on_minus: s_g,
        op_norm,
        bound,
        threshold,
        minus_dim: split.minus_dim,
        holds: s_a >= bound - 1e-12 * op_norm.max(1.0),
    })
}


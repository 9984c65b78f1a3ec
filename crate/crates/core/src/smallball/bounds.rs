use serde::{Deserialize, Serialize};

use super::concentration::{exact_concentration_curve, ConcentrationEstimate};
use crate::densela::{real_norm2, RealMatrix};
use crate::error::{Error, Result};
use crate::structure::lcd_vector_default;

/// Constants of the small-ball bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "C")]
    pub c_const: f64,
    pub p: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

impl BoundParams {
    pub fn new(l: f64, c_const: f64, p: f64, k: f64) -> Self {
        Self { l, c_const, p, k }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("L", self.l), ("C", self.c_const), ("K", self.k)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::parameter(name, "must be positive"));
            }
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::parameter("p", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Which bound to evaluate, with the data it needs. `d` is the relevant
/// LCD and may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    /// `L(Vξ, t√m) ≤ (CL/√m)^m / det(VVᵀ)^{1/2} · (t + √m/D(V))^m`.
    Matrix { v: RealMatrix, d: f64 },
    /// `L(Σ a_k ξ_k, t) ≤ CL/‖a‖₂ · (t + 1/D(a))`.
    Sum { a: Vec<f64>, d: f64 },
    /// `L(P_E ξ, t√m) ≤ (CL/√m)^m · (t + √m/D(E))^m`.
    Projection { m: usize, d: f64 },
}

impl Geometry {
    pub fn dimension(&self) -> usize {
        match self {
            Geometry::Matrix { v, .. } => v.rows(),
            Geometry::Sum { .. } => 1,
            Geometry::Projection { m, .. } => *m,
        }
    }
}

/// Smallest admissible `L`, `√(8m/p)`.
pub fn min_admissible_l(m: usize, p: f64) -> f64 {
    (8.0 * m as f64 / p).sqrt()
}

/// Evaluates the bound, enforcing `L ≥ √(8m/p)`, clamped to `[0, 1]`.
pub fn sbp_bound(params: &BoundParams, geometry: &Geometry, t: f64) -> Result<f64> {
    params.validate()?;
    let m = geometry.dimension();
    let need = min_admissible_l(m, params.p);
    if params.l < need {
        return Err(Error::parameter(
            "L",
            format!("L = {} is below sqrt(8m/p) = {need} (m = {m}, p = {})", params.l, params.p),
        ));
    }
    Ok(sbp_bound_formula(params, geometry, t)?.min(1.0))
}

/// The bound's right-hand side without the `L` threshold check or clamping.
pub fn sbp_bound_formula(params: &BoundParams, geometry: &Geometry, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::parameter("t", "must be >= 0"));
    }
    let cl = params.c_const * params.l;
    let inv = |d: f64| {
        if !(d > 0.0) {
            Err(Error::parameter("D", "must be positive"))
        } else {
            Ok(1.0 / d)
        }
    };
    match geometry {
        Geometry::Sum { a, d } => {
            let na = real_norm2(a);
            if na == 0.0 {
                return Err(Error::parameter("a", "must be nonzero"));
            }
            Ok(cl / na * (t + inv(*d)?))
        }
        Geometry::Matrix { v, d } => {
            let m = v.rows();
            if m == 0 {
                return Err(Error::parameter("V", "must have rows"));
            }
            let det = gram_determinant(v);
            if !(det > 0.0) {
                return Err(Error::Singular("V Vᵀ is singular".into()));
            }
            let sm = (m as f64).sqrt();
            Ok((cl / sm).powi(m as i32) / det.sqrt() * (t + sm * inv(*d)?).powi(m as i32))
        }
        Geometry::Projection { m, d } => {
            if *m == 0 {
                return Err(Error::parameter("m", "must be positive"));
            }
            let sm = (*m as f64).sqrt();
            Ok(((cl / sm) * (t + sm * inv(*d)?)).powi(*m as i32))
        }
    }
}

/// `det(V Vᵀ)` by Gaussian elimination on the `m × m` Gram matrix.
fn gram_determinant(v: &RealMatrix) -> f64 {
    let m = v.rows();
    let mut g: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| v.row(i).iter().zip(v.row(j)).map(|(a, b)| a * b).sum()).collect())
        .collect();
    let mut det = 1.0;
    for c in 0..m {
        let p = (c..m).max_by(|&a, &b| g[a][c].abs().total_cmp(&g[b][c].abs())).unwrap();
        if g[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            g.swap(p, c);
            det = -det;
        }
        det *= g[c][c];
        for r in (c + 1)..m {
            let f = g[r][c] / g[c][c];
            for k in c..m {
                g[r][k] -= f * g[c][k];
            }
        }
    }
    det
}

/// Grid of candidate constants for fitting.
pub const C_GRID_STEP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationAudit {
    /// Smallest `C` on the grid `0.05, 0.10, …` for which the bound for
    /// sums dominates every audited point.
    pub fitted_c: f64,
    /// Points where the bound with `params.C` falls below the exact value.
    pub violations: usize,
    /// Largest ratio `exact / (L/‖a‖ (t + 1/D))` seen.
    pub worst_ratio: f64,
    pub points: usize,
    /// `D(a, L)` per family member; censored searches report the cap.
    pub lcds: Vec<f64>,
}

/// Fits the constant in the bound for sums against exact concentration of
/// symmetric-sign sums, and counts violations at `params.C`.
pub fn bound_domination_audit(
    family: &[Vec<f64>],
    params: &BoundParams,
    t_grid: &[f64],
) -> Result<DominationAudit> {
    let atoms = super::concentration::sign_atoms();
    bound_domination_audit_with(family, params, t_grid, &atoms)
}

/// [`bound_domination_audit`] for an arbitrary finitely supported entry law.
pub fn bound_domination_audit_with(
    family: &[Vec<f64>],
    params: &BoundParams,
    t_grid: &[f64],
    atoms: &[(f64, f64)],
) -> Result<DominationAudit> {
    params.validate()?;
    let mut worst: f64 = 0.0;
    let mut ratios = Vec::new();
    let mut lcds = Vec::with_capacity(family.len());
    for a in family {
        let na = real_norm2(a);
        if na == 0.0 {
            return Err(Error::parameter("family", "weight vectors must be nonzero"));
        }
        let d = lcd_vector_default(a, params.l)?.value;
        lcds.push(d);
        if t_grid.is_empty() {
            continue;
        }
        let tables = vec![atoms.to_vec(); a.len()];
        let curve = exact_concentration_curve(&tables, a, t_grid)?;
        for est in curve {
            let shape = params.l / na * (est.t + 1.0 / d);
            let ratio = est.value / shape;
            worst = worst.max(ratio);
            ratios.push((est.value, shape));
        }
    }
    let violations = ratios
        .iter()
        .filter(|&&(exact, shape)| (params.c_const * shape).min(1.0) < exact)
        .count();
    let mut j = (worst / C_GRID_STEP).ceil().max(1.0) as usize;
    while j > 1 && (j - 1) as f64 * C_GRID_STEP >= worst {
        j -= 1;
    }
    while (j as f64 * C_GRID_STEP) < worst {
        j += 1;
    }
    Ok(DominationAudit {
        fitted_c: j as f64 * C_GRID_STEP,
        violations,
        worst_ratio: worst,
        points: ratios.len(),
        lcds,
    })
}

/// Smallest `C` with `joint ≤ [C M (t + t₀)]ⁿ`, after checking that every
/// per-coordinate curve point satisfies `L(Z_j, s) ≤ M (s + t₀)`.
///
/// `joint` is the concentration of `Z ∈ Rⁿ` (or `Cⁿ`) at radius `t√n`.
pub fn tensorization_audit(
    per_coord: &[Vec<ConcentrationEstimate>],
    joint: &ConcentrationEstimate,
    t: f64,
    t0: f64,
    m: f64,
) -> Result<f64> {
    let n = per_coord.len();
    if n == 0 {
        return Err(Error::parameter("per_coord", "need at least one coordinate"));
    }
    if !(m > 0.0 && t0 >= 0.0 && t >= 0.0 && t + t0 > 0.0) {
        return Err(Error::parameter("M", "need M > 0, t, t0 >= 0 and t + t0 > 0"));
    }
    for (j, curve) in per_coord.iter().enumerate() {
        for e in curve {
            let cap = m * (e.t + t0);
            if e.value > cap * (1.0 + 1e-12) {
                return Err(Error::Precondition(format!(
                    "coordinate {j}: L(Z_j, {}) = {} exceeds M(t + t0) = {cap}",
                    e.t, e.value
                )));
            }
        }
    }
    Ok(joint.value.powf(1.0 / n as f64) / (m * (t + t0)))
}

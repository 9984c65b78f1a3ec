//! Least common denominators.
//!
//! `D(V, L)` is the smallest `‖θ‖₂` with
//! `dist(Vᵀθ, Zᴺ) < L·sqrt(log₊(‖Vᵀθ‖₂ / L))`. Both searches are
//! branch-and-bound over `θ`: `θ ↦ dist(Vᵀθ, Zᴺ)` is `‖V‖`-Lipschitz and the
//! right-hand side is increasing in `‖Vᵀθ‖`, which gives a lower bound for
//! the gap on every cell. A returned value is always attained by an explicit
//! witness, so it never undershoots the true infimum.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densela::{real_norm2, real_orthonormality_defect, RealMatrix};
use crate::error::{Error, Result};
use crate::rng::substream;

const MAX_EVALUATIONS: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LcdKind {
    Vector,
    Matrix2,
    SubspaceUpper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LcdEstimate {
    pub value: f64,
    /// `θ` for the vector and matrix searches; the point `u ∈ E` for
    /// subspaces.
    pub witness: Vec<f64>,
    /// `dist(Vᵀθ, Zᴺ)` at the witness.
    pub witness_residual: f64,
    pub grid_step: f64,
    pub kind: LcdKind,
    /// No multiplier was found below the search cap; `value` is the cap.
    pub censored: bool,
    /// For the vector and matrix searches, a certified lower bound on the
    /// LCD. Below `value` only when some leaf cells were inconclusive at the
    /// search resolution.
    pub certified_lower: Option<f64>,
    /// For subspaces, the unit vector of `E` whose LCD is reported.
    pub direction: Option<Vec<f64>>,
}

/// Distance from `x` to the integer lattice.
pub fn lattice_dist(x: &[f64]) -> f64 {
    x.iter().map(|v| (v - v.round()).powi(2)).sum::<f64>().sqrt()
}

/// `L·sqrt(log₊(r / L))`, natural log.
pub fn log_slack(r: f64, l: f64) -> f64 {
    if r <= l {
        0.0
    } else {
        l * (r / l).ln().sqrt()
    }
}

/// Whether the point `x = Vᵀθ` satisfies the LCD condition.
pub fn lcd_condition(x: &[f64], l: f64) -> bool {
    lattice_dist(x) < log_slack(real_norm2(x), l)
}

/// `1 / (2 ‖V‖_∞)` where `‖V‖_∞` is the largest column norm.
pub fn lcd_lower_bound(v: &RealMatrix) -> Result<f64> {
    let m = v.max_column_norm();
    if m == 0.0 {
        return Err(Error::parameter("V", "must be nonzero"));
    }
    Ok(1.0 / (2.0 * m))
}

/// [`lcd_lower_bound`] for a single vector: `1 / (2‖v‖_∞)`.
pub fn lcd_lower_bound_vector(v: &[f64]) -> Result<f64> {
    let m = v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    if m == 0.0 {
        return Err(Error::parameter("v", "must be nonzero"));
    }
    Ok(1.0 / (2.0 * m))
}

/// Default search cap `16√N / ‖v‖₂` and grid step `cap / 1000`.
pub fn default_vector_search(v: &[f64]) -> (f64, f64) {
    let cap = 16.0 * (v.len() as f64).sqrt() / real_norm2(v);
    (cap, 1e-3 * cap)
}

/// Default search cap `16√N / ‖V‖` and grid step `cap / 100`.
pub fn default_matrix2_search(v: &RealMatrix) -> (f64, f64) {
    let cap = 16.0 * (v.cols() as f64).sqrt() / matrix2_norm(v);
    (cap, 1e-2 * cap)
}

fn check_search_params(l: f64, cap: f64, grid_step: f64) -> Result<()> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::parameter("L", "must be positive"));
    }
    if !(cap > 0.0 && cap.is_finite()) {
        return Err(Error::parameter("search_cap", "must be positive"));
    }
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::parameter("grid_step", "must be positive"));
    }
    Ok(())
}

/// LCD of a vector, searched over `θ ∈ (0, search_cap]`.
///
/// The interval is cut into cells of width `grid_step`, scanned left to
/// right, and each cell is bisected down to `grid_step / 1000` wherever the
/// Lipschitz bound cannot exclude a solution.
pub fn lcd_vector(v: &[f64], l: f64, search_cap: f64, grid_step: f64) -> Result<LcdEstimate> {
    check_search_params(l, search_cap, grid_step)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::validation("v", "entries must be finite"));
    }
    let nv = real_norm2(v);
    if nv == 0.0 {
        return Err(Error::parameter("v", "must be nonzero"));
    }
    let leaf = grid_step / 1000.0;
    let mut x = vec![0.0; v.len()];
    let eval = |theta: f64, x: &mut Vec<f64>| {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi = theta * vi;
        }
        lattice_dist(x)
    };
    let holds = |theta: f64, d: f64| d < log_slack(theta * nv, l);

    let mut evaluations = 0usize;
    let mut inconclusive = f64::INFINITY;
    // Below L/‖v‖ the slack vanishes and the strict condition cannot hold.
    let mut a = l / nv;
    let mut stack: Vec<(f64, f64)> = Vec::new();
    while a < search_cap {
        let b = (a + grid_step).min(search_cap);
        stack.push((a, b));
        while let Some((lo, hi)) = stack.pop() {
            evaluations += 1;
            if evaluations > MAX_EVALUATIONS {
                return Err(Error::Budget(format!(
                    "lcd_vector exceeded {MAX_EVALUATIONS} evaluations"
                )));
            }
            let mid = 0.5 * (lo + hi);
            let d = eval(mid, &mut x);
            let lower = d - nv * 0.5 * (hi - lo) - log_slack(hi * nv, l);
            if lower >= 0.0 {
                continue;
            }
            if hi - lo <= leaf {
                let mut found = None;
                for t in [lo, mid, hi] {
                    let dt = eval(t, &mut x);
                    if holds(t, dt) {
                        found = Some((t, dt));
                        break;
                    }
                }
                match found {
                    Some((t, dt)) => {
                        return Ok(LcdEstimate {
                            value: t,
                            witness: vec![t],
                            witness_residual: dt,
                            grid_step,
                            kind: LcdKind::Vector,
                            censored: false,
                            certified_lower: Some(inconclusive.min(t)),
                            direction: None,
                        });
                    }
                    None => inconclusive = inconclusive.min(lo),
                }
                continue;
            }
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
        a = b;
    }
    let d = eval(search_cap, &mut x);
    Ok(LcdEstimate {
        value: search_cap,
        witness: vec![search_cap],
        witness_residual: d,
        grid_step,
        kind: LcdKind::Vector,
        censored: true,
        certified_lower: Some(inconclusive.min(search_cap)),
        direction: None,
    })
}

/// [`lcd_vector`] with the default cap and grid.
pub fn lcd_vector_default(v: &[f64], l: f64) -> Result<LcdEstimate> {
    if real_norm2(v) == 0.0 {
        return Err(Error::parameter("v", "must be nonzero"));
    }
    let (cap, step) = default_vector_search(v);
    lcd_vector(v, l, cap, step)
}

/// Operator norm of a 2×N real matrix from its 2×2 Gram matrix.
fn matrix2_norm(v: &RealMatrix) -> f64 {
    let (r0, r1) = (v.row(0), v.row(1));
    let a: f64 = r0.iter().map(|x| x * x).sum();
    let c: f64 = r1.iter().map(|x| x * x).sum();
    let b: f64 = r0.iter().zip(r1).map(|(x, y)| x * y).sum();
    let half = 0.5 * (a + c);
    let disc = (0.25 * (a - c).powi(2) + b * b).sqrt();
    (half + disc).sqrt()
}

/// Polar cell `[r_lo, r_hi] × [φ_lo, φ_hi]`, ordered for a min-heap on
/// `r_lo`, then `φ_lo`.
#[derive(Debug, Clone, Copy)]
struct Cell {
    r_lo: f64,
    r_hi: f64,
    phi_lo: f64,
    phi_hi: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .r_lo
            .total_cmp(&self.r_lo)
            .then(other.phi_lo.total_cmp(&self.phi_lo))
    }
}

/// LCD of a 2×N matrix, searched over `‖θ‖₂ ∈ (0, search_cap]`.
///
/// Polar shells of width `grid_step` over the half plane (`θ` and `−θ` are
/// equivalent) are refined best-first by radius until cells are smaller
/// than `grid_step / 100` in both radius and arc length.
pub fn lcd_matrix2(v: &RealMatrix, l: f64, search_cap: f64, grid_step: f64) -> Result<LcdEstimate> {
    check_search_params(l, search_cap, grid_step)?;
    if v.rows() != 2 {
        return Err(Error::Shape(format!("lcd_matrix2 needs 2 rows, got {}", v.rows())));
    }
    let opn = matrix2_norm(v);
    if !opn.is_finite() {
        return Err(Error::validation("V", "entries must be finite"));
    }
    if opn == 0.0 {
        return Err(Error::parameter("V", "must be nonzero"));
    }
    let n = v.cols();
    let leaf = grid_step / 100.0;
    let (r0, r1) = (v.row(0).to_vec(), v.row(1).to_vec());
    let mut x = vec![0.0; n];
    let image = |r: f64, phi: f64, x: &mut Vec<f64>| {
        let (t0, t1) = (r * phi.cos(), r * phi.sin());
        for i in 0..n {
            x[i] = t0 * r0[i] + t1 * r1[i];
        }
        (lattice_dist(x), real_norm2(x))
    };

    let mut heap = BinaryHeap::new();
    let mut r = l / opn;
    while r < search_cap {
        let r_hi = (r + grid_step).min(search_cap);
        heap.push(Cell {
            r_lo: r,
            r_hi,
            phi_lo: 0.0,
            phi_hi: std::f64::consts::PI,
        });
        r = r_hi;
    }

    let mut best: Option<(f64, f64, f64)> = None;
    let mut inconclusive = f64::INFINITY;
    let mut evaluations = 0usize;
    while let Some(cell) = heap.pop() {
        if best.is_some_and(|(rb, _, _)| cell.r_lo >= rb) {
            break;
        }
        evaluations += 1;
        if evaluations > MAX_EVALUATIONS {
            return Err(Error::Budget(format!(
                "lcd_matrix2 exceeded {MAX_EVALUATIONS} evaluations"
            )));
        }
        let rm = 0.5 * (cell.r_lo + cell.r_hi);
        let pm = 0.5 * (cell.phi_lo + cell.phi_hi);
        let (d, nx) = image(rm, pm, &mut x);
        if d < log_slack(nx, l) && best.is_none_or(|(rb, _, _)| rm < rb) {
            best = Some((rm, pm, d));
        }
        let dr = cell.r_hi - cell.r_lo;
        let arc = cell.r_hi * (cell.phi_hi - cell.phi_lo);
        let rho = 0.5 * dr + 0.5 * arc;
        let lower = d - opn * rho - log_slack(nx + opn * rho, l);
        if lower >= 0.0 {
            continue;
        }
        if dr <= leaf && arc <= leaf {
            let mut hit = false;
            for phi in [cell.phi_lo, pm, cell.phi_hi] {
                let (dp, np) = image(cell.r_lo, phi, &mut x);
                if dp < log_slack(np, l) {
                    hit = true;
                    if best.is_none_or(|(rb, _, _)| cell.r_lo < rb) {
                        best = Some((cell.r_lo, phi, dp));
                    }
                    break;
                }
            }
            if !hit {
                inconclusive = inconclusive.min(cell.r_lo);
            }
            continue;
        }
        if dr >= arc {
            heap.push(Cell { r_hi: rm, ..cell });
            heap.push(Cell { r_lo: rm, ..cell });
        } else {
            heap.push(Cell { phi_hi: pm, ..cell });
            heap.push(Cell { phi_lo: pm, ..cell });
        }
    }

    Ok(match best {
        Some((rb, phi, d)) => LcdEstimate {
            value: rb,
            witness: vec![rb * phi.cos(), rb * phi.sin()],
            witness_residual: d,
            grid_step,
            kind: LcdKind::Matrix2,
            censored: false,
            certified_lower: Some(inconclusive.min(rb)),
            direction: None,
        },
        None => {
            let (d, _) = image(search_cap, 0.0, &mut x);
            LcdEstimate {
                value: search_cap,
                witness: vec![search_cap, 0.0],
                witness_residual: d,
                grid_step,
                kind: LcdKind::Matrix2,
                censored: true,
                certified_lower: Some(inconclusive.min(search_cap)),
                direction: None,
            }
        }
    })
}

/// [`lcd_matrix2`] with the default cap and grid.
pub fn lcd_matrix2_default(v: &RealMatrix, l: f64) -> Result<LcdEstimate> {
    if v.rows() != 2 {
        return Err(Error::Shape(format!("lcd_matrix2 needs 2 rows, got {}", v.rows())));
    }
    if matrix2_norm(v) == 0.0 {
        return Err(Error::parameter("V", "must be nonzero"));
    }
    let (cap, step) = default_matrix2_search(v);
    lcd_matrix2(v, l, cap, step)
}

/// Tuning for [`lcd_subspace_upper_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceSearch {
    pub n_starts: usize,
    pub seed: u64,
    /// Defaults to `16√N`.
    pub search_cap: Option<f64>,
    /// Defaults to `search_cap / 1000`.
    pub grid_step: Option<f64>,
    /// Objective evaluations per descent.
    pub evals_per_start: usize,
    /// Also start from the projections of `e_j` and of all-ones blocks.
    pub canonical_starts: bool,
}

impl SubspaceSearch {
    pub fn new(n_starts: usize, seed: u64) -> Self {
        Self {
            n_starts,
            seed,
            search_cap: None,
            grid_step: None,
            evals_per_start: 150,
            canonical_starts: true,
        }
    }
}

/// Upper estimate of the LCD of the subspace spanned by an orthonormal
/// real basis, with the default search settings.
pub fn lcd_subspace_upper(
    basis: &[Vec<f64>],
    l: f64,
    n_starts: usize,
    seed: u64,
) -> Result<LcdEstimate> {
    lcd_subspace_upper_with(basis, l, &SubspaceSearch::new(n_starts, seed))
}

/// Upper estimate of `D(E, L) = inf { D(w, L) : w ∈ E, ‖w‖ = 1 }`.
///
/// Each start is a unit direction of `E`, refined by coordinate descent on
/// its coefficient vector with step halving. Starts run on independent
/// substreams of `seed` and the best result wins, ties going to the smaller
/// then lexicographically smaller witness.
pub fn lcd_subspace_upper_with(
    basis: &[Vec<f64>],
    l: f64,
    search: &SubspaceSearch,
) -> Result<LcdEstimate> {
    if basis.is_empty() {
        return Err(Error::parameter("E_basis", "must be nonempty"));
    }
    let dim = basis[0].len();
    if dim == 0 || basis.iter().any(|b| b.len() != dim) {
        return Err(Error::Shape("basis vectors must share a positive length".into()));
    }
    let defect = real_orthonormality_defect(basis);
    if !(defect <= 1e-10) {
        return Err(Error::validation(
            "E_basis",
            format!("not orthonormal (defect {defect:e})"),
        ));
    }
    let cap = search.search_cap.unwrap_or(16.0 * (dim as f64).sqrt());
    let grid_step = search.grid_step.unwrap_or(1e-3 * cap);
    check_search_params(l, cap, grid_step)?;

    let objective = Objective {
        basis,
        l,
        cap,
        grid_step,
    };

    let mut canonical: Vec<Vec<f64>> = Vec::new();
    if search.canonical_starts {
        for j in 0..dim {
            canonical.push(basis.iter().map(|b| b[j]).collect());
        }
        let mut blocks = vec![0..dim];
        if dim % 2 == 0 {
            blocks.push(0..dim / 2);
            blocks.push(dim / 2..dim);
        }
        for block in blocks {
            canonical.push(basis.iter().map(|b| b[block.clone()].iter().sum()).collect());
        }
        canonical.retain(|c| real_norm2(c) > 1e-10);
    }

    let mut results: Vec<Candidate> = canonical
        .par_iter()
        .map(|c| objective.evaluate(c, cap))
        .collect::<Result<_>>()?;
    if let Some(seed_start) = results.iter().min_by(|a, b| a.cmp_key(b)).map(|c| c.coeffs.clone())
    {
        results.push(objective.descend(seed_start, search.evals_per_start)?);
    }
    let random: Vec<Candidate> = (0..search.n_starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(search.seed, i as u64);
            let c: Vec<f64> = (0..basis.len()).map(|_| rng.sample(StandardNormal)).collect();
            objective.descend(c, search.evals_per_start)
        })
        .collect::<Result<_>>()?;
    results.extend(random);

    let best = results
        .into_iter()
        .min_by(|a, b| a.cmp_key(b))
        .ok_or_else(|| Error::parameter("n_starts", "no start produced an estimate"))?;
    let est = best.estimate;
    let theta = est.value;
    Ok(LcdEstimate {
        value: theta,
        witness: best.direction.iter().map(|w| theta * w).collect(),
        witness_residual: est.witness_residual,
        grid_step,
        kind: LcdKind::SubspaceUpper,
        censored: est.censored,
        certified_lower: None,
        direction: Some(best.direction),
    })
}

struct Objective<'a> {
    basis: &'a [Vec<f64>],
    l: f64,
    cap: f64,
    grid_step: f64,
}

struct Candidate {
    coeffs: Vec<f64>,
    direction: Vec<f64>,
    estimate: LcdEstimate,
}

impl Candidate {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.estimate.value.total_cmp(&other.estimate.value).then_with(|| {
            let a: Vec<f64> = self.direction.iter().map(|w| w * self.estimate.value).collect();
            let b: Vec<f64> = other.direction.iter().map(|w| w * other.estimate.value).collect();
            real_norm2(&a)
                .total_cmp(&real_norm2(&b))
                .then_with(|| {
                    a.iter()
                        .zip(&b)
                        .map(|(x, y)| x.total_cmp(y))
                        .find(|o| o.is_ne())
                        .unwrap_or(Ordering::Equal)
                })
        })
    }
}

impl Objective<'_> {
    fn direction(&self, coeffs: &[f64]) -> Vec<f64> {
        let dim = self.basis[0].len();
        let mut w = vec![0.0; dim];
        for (c, b) in coeffs.iter().zip(self.basis) {
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi += c * bi;
            }
        }
        let n = real_norm2(&w);
        w.iter_mut().for_each(|x| *x /= n);
        w
    }

    fn evaluate(&self, coeffs: &[f64], cap: f64) -> Result<Candidate> {
        let n = real_norm2(coeffs);
        let coeffs: Vec<f64> = coeffs.iter().map(|c| c / n).collect();
        let direction = self.direction(&coeffs);
        let estimate = lcd_vector(&direction, self.l, cap.min(self.cap), self.grid_step)?;
        Ok(Candidate {
            coeffs,
            direction,
            estimate,
        })
    }

    fn descend(&self, start: Vec<f64>, budget: usize) -> Result<Candidate> {
        let mut best = self.evaluate(&start, self.cap)?;
        let mut used = 1;
        let mut step = 0.5;
        while step > 1e-3 && used < budget {
            let mut improved = false;
            for k in 0..best.coeffs.len() {
                for sign in [1.0, -1.0] {
                    if used >= budget {
                        break;
                    }
                    let mut trial = best.coeffs.clone();
                    trial[k] += sign * step;
                    if real_norm2(&trial) < 1e-12 {
                        continue;
                    }
                    let cand = self.evaluate(&trial, best.estimate.value)?;
                    used += 1;
                    if cand.estimate.value < best.estimate.value && !cand.estimate.censored {
                        best = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        Ok(best)
    }
}

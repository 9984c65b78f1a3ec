//! Monte Carlo drivers. Each trial samples on its own seed substream and
//! returns one [`TrialRecord`].

use num_complex::Complex64;
use rand::Rng;

use super::audits::{decomposition_bound_audit, neg_second_moment_audit, reduction_audit, row_deletion_audit};
use super::localization::{ceil_count, deloc_profile, localization_norm};
use crate::densela::{
    default_rank_tol, dist_to_colspan, kernel_basis, operator_norm, realify_subspace, s_min,
    ComplexDenseMatrix,
};
use crate::ensembles::{sample_with, shift_matrix, EnsembleSpec, EntryDist};
use crate::error::{Error, Result};
use crate::harness::{run_trials, TrialOutcome, TrialRecord};
use crate::rng::{rng_from_seed, substream_seed};
use crate::structure::{lcd_subspace_upper_with, LcdEstimate, SubspaceSearch};

fn require_square(spec: &EnsembleSpec) -> Result<usize> {
    spec.validate()?;
    if spec.n_rows != spec.n_cols {
        return Err(Error::validation("ensemble.n_cols", "must equal n_rows"));
    }
    Ok(spec.n_rows)
}

/// Full-spectrum localization per trial.
///
/// Metrics: `min_localization` (smallest `localization_norm(v, ε)` over all
/// eigenvectors), `max_sup_norm`, `max_residual`, `opnorm_scaled`
/// (`‖A‖/√n`). Flags: `loc` (`min_localization < δ`), `boundedness_held`,
/// `loc_and_bounded`, `residuals_certified` (every residual at most
/// `1e-8 · max(1, ‖A‖)`).
pub fn deloc_experiment(spec: &EnsembleSpec, eps: f64, delta: f64, trials: usize, seed: u64) -> Result<Vec<TrialRecord>> {
    let n = require_square(spec)?;
    ceil_count(eps, n)?;
    let sqrt_n = (n as f64).sqrt();
    let m = spec.norm_bound_m;
    Ok(run_trials(trials, seed, |_, s| {
        let a = sample_with(spec, &mut rng_from_seed(s))?;
        let norm = operator_norm(&a)?;
        let reports = deloc_profile(&a, &[eps], 1e-8)?;
        let mut min_loc = f64::INFINITY;
        let mut sup: f64 = 0.0;
        let mut res: f64 = 0.0;
        for r in &reports {
            min_loc = min_loc.min(r.localization_curve[0].1);
            sup = sup.max(r.sup_norm);
            res = res.max(r.residual);
        }
        let bounded = norm <= m * sqrt_n;
        let loc = min_loc < delta;
        Ok(TrialOutcome::new()
            .metric("min_localization", min_loc)
            .metric("max_sup_norm", sup)
            .metric("max_residual", res)
            .metric("opnorm_scaled", norm / sqrt_n)
            .flag("loc", loc)
            .flag("boundedness_held", bounded)
            .flag("loc_and_bounded", loc && bounded)
            .flag("residuals_certified", res <= 1e-8 * norm.max(1.0)))
    }))
}

/// `s_min((A − λ₀)_{I^c})` with `I` the last `⌈εn⌉` indices.
///
/// Metrics: `smin`, `smin_scaled` (`/√n`), `opnorm_scaled`. Flags:
/// `boundedness_held`.
pub fn smin_experiment(
    spec: &EnsembleSpec,
    eps: f64,
    lambda0: Complex64,
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    let n = require_square(spec)?;
    let k = ceil_count(eps, n)?;
    if k == n {
        return Err(Error::parameter("epsilon", "leaves no columns outside I"));
    }
    let keep: Vec<usize> = (0..n - k).collect();
    let sqrt_n = (n as f64).sqrt();
    let m = spec.norm_bound_m;
    Ok(run_trials(trials, seed, |_, s| {
        let a = sample_with(spec, &mut rng_from_seed(s))?;
        let norm = operator_norm(&a)?;
        let smin = s_min(&shift_matrix(&a, lambda0)?.select_columns(&keep))?;
        Ok(TrialOutcome::new()
            .metric("smin", smin)
            .metric("smin_scaled", smin / sqrt_n)
            .metric("opnorm_scaled", norm / sqrt_n)
            .flag("boundedness_held", norm <= m * sqrt_n))
    }))
}

/// `dist(Z, Im H)` for `H` of size `N × n`, `n = N − ⌈εN⌉`, and `Z` with
/// i.i.d. real coordinates drawn from `z_dist`.
///
/// `N` is `spec.n_rows`; `spec.n_cols` is replaced by `n`. Metrics: `dist`,
/// `dist_scaled` (`/√(εN)`). Flags: `boundedness_held` for `‖H‖ ≤ M√N`.
pub fn distance_experiment(
    spec: &EnsembleSpec,
    z_dist: &EntryDist,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    let big_n = spec.n_rows;
    let k = ceil_count(eps, big_n)?;
    let n = big_n - k;
    let mut h_spec = spec.clone();
    h_spec.n_cols = n.max(1);
    h_spec.validate()?;
    z_dist.validate()?;
    let scale = (eps * big_n as f64).sqrt();
    let m = spec.norm_bound_m;
    Ok(run_trials(trials, seed, |_, s| {
        let mut rng = rng_from_seed(s);
        let h = if n > 0 {
            sample_with(&h_spec, &mut rng)?
        } else {
            ComplexDenseMatrix::zeros(big_n, 0)
        };
        let z: Vec<Complex64> = (0..big_n).map(|_| Complex64::new(z_dist.sample(&mut rng), 0.0)).collect();
        let dist = dist_to_colspan(&z, &h)?;
        let bounded = n == 0 || operator_norm(&h)? <= m * (big_n as f64).sqrt();
        Ok(TrialOutcome::new()
            .metric("dist", dist)
            .metric("dist_scaled", dist / scale)
            .flag("boundedness_held", bounded))
    }))
}

/// Settings for [`kernel_lcd_experiment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelLcdParams {
    /// Constant in the threshold `min(√N e^{c/√ε}, εN)`.
    pub c: f64,
    /// Floor `c₀√N`.
    pub c0: f64,
    pub n_starts: usize,
}

impl Default for KernelLcdParams {
    fn default() -> Self {
        Self {
            c: 0.5,
            c0: 0.5,
            n_starts: 8,
        }
    }
}

/// Subspace LCD upper estimate of the realified kernel of `b` at
/// `L = √(εN)`.
pub fn kernel_lcd(b: &ComplexDenseMatrix, eps: f64, n_starts: usize, seed: u64) -> Result<(usize, LcdEstimate)> {
    let big_n = b.cols();
    let kernel = kernel_basis(b, default_rank_tol(b.rows(), big_n))?;
    if kernel.is_empty() {
        return Err(Error::Precondition("kernel is numerically trivial".into()));
    }
    let basis = realify_subspace(&kernel);
    let l = (eps * big_n as f64).sqrt();
    let est = lcd_subspace_upper_with(&basis, l, &SubspaceSearch::new(n_starts, seed))?;
    Ok((kernel.len(), est))
}

/// LCD of the kernel of `B` (`n × N`, `n = N − ⌈εN⌉`).
///
/// `N` is `spec.n_cols`; `spec.n_rows` is replaced by `n`. Metrics:
/// `lcd_upper`, `lcd_scaled` (`/√N`), `threshold`, `floor`, `kernel_dim`.
/// Flags: `exceeds_floor`, `exceeds_threshold`, `censored_lcd`,
/// `boundedness_held`.
pub fn kernel_lcd_experiment(
    spec: &EnsembleSpec,
    eps: f64,
    params: &KernelLcdParams,
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    let big_n = spec.n_cols;
    let k = ceil_count(eps, big_n)?;
    if k == big_n {
        return Err(Error::parameter("epsilon", "leaves B with no rows"));
    }
    let mut b_spec = spec.clone();
    b_spec.n_rows = big_n - k;
    b_spec.validate()?;
    let sqrt_n = (big_n as f64).sqrt();
    let threshold = (sqrt_n * (params.c / eps.sqrt()).exp()).min(eps * big_n as f64);
    let floor = params.c0 * sqrt_n;
    let m = spec.norm_bound_m;
    Ok(run_trials(trials, seed, |_, s| {
        let b = sample_with(&b_spec, &mut rng_from_seed(s))?;
        let (dim, est) = kernel_lcd(&b, eps, params.n_starts, substream_seed(s, 0))?;
        Ok(TrialOutcome::new()
            .metric("lcd_upper", est.value)
            .metric("lcd_scaled", est.value / sqrt_n)
            .metric("threshold", threshold)
            .metric("floor", floor)
            .metric("kernel_dim", dim as f64)
            .flag("exceeds_floor", est.value >= floor)
            .flag("exceeds_threshold", est.value >= threshold)
            .flag("censored_lcd", est.censored)
            .flag("boundedness_held", operator_norm(&b)? <= m * sqrt_n))
    }))
}

/// Random `n × N` sign matrix with each row centered, so that the all-ones
/// vector lies in its kernel.
pub fn planted_kernel_matrix(n: usize, big_n: usize, seed: u64) -> ComplexDenseMatrix {
    let mut rng = rng_from_seed(seed);
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..big_n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect())
        .collect();
    for row in rows.iter_mut() {
        let mean = row.iter().sum::<f64>() / big_n as f64;
        for x in row.iter_mut() {
            *x -= mean;
        }
    }
    ComplexDenseMatrix::from_fn(n, big_n, |i, j| Complex64::new(rows[i][j], 0.0))
}

/// Randomized deterministic audits on `n × n` matrices from `spec`.
///
/// Per trial: the decomposition bound at a random split row, the negative
/// second moment identity and one row deletion on the first `⌈3n/4⌉`
/// columns, and the reduction implication at `(ε, δ)`. Flags:
/// `audit_passed` plus one flag per audit; metrics: `nsm_gap`,
/// `decomposition_margin` (`s_A − bound`), `min_localization`.
pub fn audits_experiment(
    spec: &EnsembleSpec,
    eps: f64,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    let n = require_square(spec)?;
    if n < 2 {
        return Err(Error::validation("ensemble.n_rows", "must be at least 2"));
    }
    ceil_count(eps, n)?;
    let tall_cols = (3 * n).div_ceil(4).min(n - 1).max(1);
    let m = spec.norm_bound_m;
    Ok(run_trials(trials, seed, |_, s| {
        let mut rng = rng_from_seed(s);
        let a = sample_with(spec, &mut rng)?;
        let split_row = rng.random_range(1..n);
        let dec = decomposition_bound_audit(&a, split_row, None)?;
        let tall = a.select_columns(&(0..tall_cols).collect::<Vec<_>>());
        let nsm = neg_second_moment_audit(&tall)?;
        let rowdel = row_deletion_audit(&tall, rng.random_range(0..n))?;
        let red = reduction_audit(&a, eps, delta, m)?;
        let nsm_ok = nsm.gap <= 1e-8;
        let passed = dec.holds && nsm_ok && rowdel.holds && red.passed();
        let min_loc = if red.min_localization.is_finite() {
            red.min_localization
        } else {
            1.0
        };
        Ok(TrialOutcome::new()
            .metric("nsm_gap", nsm.gap)
            .metric("decomposition_margin", dec.s_a - dec.bound)
            .metric("min_localization", min_loc)
            .flag("decomposition_holds", dec.holds)
            .flag("nsm_holds", nsm_ok)
            .flag("row_deletion_holds", rowdel.holds)
            .flag("reduction_passed", red.passed())
            .flag("reduction_applicable", red.smin.is_some())
            .flag("audit_passed", passed))
    }))
}

/// Smallest localization norm over the eigenvectors of `a`.
pub fn min_localization(a: &ComplexDenseMatrix, eps: f64) -> Result<f64> {
    let reports = deloc_profile(a, &[], 1e-8)?;
    reports
        .iter()
        .map(|r| localization_norm(&r.vector, eps))
        .try_fold(f64::INFINITY, |acc, x| Ok(acc.min(x?)))
}

//! Random-matrix ensembles and empirical checks of their assumptions.
//!
//! An ensemble has i.i.d. real parts (up to an optional symmetric or skew
//! pairing of `A_ij` with `A_ji`) plus a fixed, deterministic imaginary part.
//! [`audit_distribution`] checks the two-sided spread condition
//! `sup_u P(|ξ − u| < 1) ≤ 1 − p`, `P(|ξ| > K) ≤ p/2`, and
//! [`calibrate_boundedness`] picks the constant `M` in `‖A‖ ≤ M√n`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densela::{operator_norm, ComplexDenseMatrix};
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, substream_seed};

/// Law of the real part of each entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntryDist {
    /// ±1 with probability 1/2 each.
    SymmetricSign,
    Gaussian { mean: f64, sd: f64 },
    Uniform { a: f64, b: f64 },
    /// Finite table of `(value, probability)` atoms.
    Discrete { table: Vec<(f64, f64)> },
}

impl EntryDist {
    pub fn point_mass(x: f64) -> Self {
        EntryDist::Discrete {
            table: vec![(x, 1.0)],
        }
    }

    pub fn standard_gaussian() -> Self {
        EntryDist::Gaussian { mean: 0.0, sd: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EntryDist::SymmetricSign => Ok(()),
            EntryDist::Gaussian { mean, sd } => {
                if !mean.is_finite() || !(*sd >= 0.0) || !sd.is_finite() {
                    return Err(Error::validation("entry_dist.sd", "need finite mean and sd >= 0"));
                }
                Ok(())
            }
            EntryDist::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(Error::validation("entry_dist.b", "need finite a < b"));
                }
                Ok(())
            }
            EntryDist::Discrete { table } => {
                if table.is_empty() {
                    return Err(Error::validation("entry_dist.table", "empty table"));
                }
                if table.iter().any(|&(v, q)| !v.is_finite() || !(q >= 0.0)) {
                    return Err(Error::validation(
                        "entry_dist.table",
                        "values must be finite and probabilities >= 0",
                    ));
                }
                let total: f64 = table.iter().map(|&(_, q)| q).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::validation(
                        "entry_dist.table",
                        format!("probabilities sum to {total}, not 1"),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Atom table for finitely supported laws.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            EntryDist::SymmetricSign => Some(vec![(-1.0, 0.5), (1.0, 0.5)]),
            EntryDist::Discrete { table } => Some(table.clone()),
            _ => None,
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            EntryDist::SymmetricSign => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            EntryDist::Gaussian { mean, sd } => mean + sd * rng.sample::<f64, _>(StandardNormal),
            EntryDist::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            EntryDist::Discrete { table } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(v, q) in table {
                    acc += q;
                    if u < acc {
                        return v;
                    }
                }
                table.iter().rev().find(|&&(_, q)| q > 0.0).map_or(table[0].0, |&(v, _)| v)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dependency {
    #[default]
    Independent,
    /// `A_ij = A_ji`.
    Symmetric,
    /// `A_ij = −A_ji` off the diagonal.
    Skew,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistParams {
    #[serde(rename = "K")]
    pub k: f64,
    pub p: f64,
}

impl Default for DistParams {
    fn default() -> Self {
        Self { k: 3.0, p: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n_rows: usize,
    pub n_cols: usize,
    pub entry_dist: EntryDist,
    #[serde(default)]
    pub dependency: Dependency,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_imag: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub dist_params: DistParams,
    #[serde(rename = "norm_bound_M", default = "default_norm_bound")]
    pub norm_bound_m: f64,
}

fn default_norm_bound() -> f64 {
    3.0
}

impl EnsembleSpec {
    /// Independent entries, no imaginary part, default `(K, p, M)`.
    pub fn iid(n_rows: usize, n_cols: usize, entry_dist: EntryDist) -> Self {
        Self {
            n_rows,
            n_cols,
            entry_dist,
            dependency: Dependency::Independent,
            fixed_imag: None,
            dist_params: DistParams::default(),
            norm_bound_m: default_norm_bound(),
        }
    }

    pub fn square(n: usize, entry_dist: EntryDist) -> Self {
        Self::iid(n, n, entry_dist)
    }

    pub fn with_dependency(mut self, dependency: Dependency) -> Self {
        self.dependency = dependency;
        self
    }

    pub fn with_fixed_imag(mut self, fixed_imag: Vec<Vec<f64>>) -> Self {
        self.fixed_imag = Some(fixed_imag);
        self
    }

    pub fn with_dist_params(mut self, k: f64, p: f64) -> Self {
        self.dist_params = DistParams { k, p };
        self
    }

    pub fn with_norm_bound(mut self, m: f64) -> Self {
        self.norm_bound_m = m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rows == 0 {
            return Err(Error::validation("n_rows", "must be positive"));
        }
        if self.n_cols == 0 {
            return Err(Error::validation("n_cols", "must be positive"));
        }
        self.entry_dist.validate()?;
        if self.dependency != Dependency::Independent && self.n_rows != self.n_cols {
            return Err(Error::validation(
                "dependency",
                "symmetric and skew patterns need a square matrix",
            ));
        }
        if let Some(t) = &self.fixed_imag {
            if t.len() != self.n_rows || t.iter().any(|r| r.len() != self.n_cols) {
                return Err(Error::validation(
                    "fixed_imag",
                    format!("must have shape {}x{}", self.n_rows, self.n_cols),
                ));
            }
            if t.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::validation("fixed_imag", "entries must be finite"));
            }
        }
        let DistParams { k, p } = self.dist_params;
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::validation("dist_params.K", "must be positive"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::validation("dist_params.p", "must lie in (0, 1)"));
        }
        if !(self.norm_bound_m >= 1.0 && self.norm_bound_m.is_finite()) {
            return Err(Error::validation("norm_bound_M", "must be >= 1"));
        }
        Ok(())
    }

    /// Dimension used in the scale `M√n` of the boundedness event.
    pub fn scale_dim(&self) -> usize {
        self.n_rows.max(self.n_cols)
    }
}

/// Draws one matrix. A pure function of `(spec, seed)`.
pub fn sample_matrix(spec: &EnsembleSpec, seed: u64) -> Result<ComplexDenseMatrix> {
    spec.validate()?;
    let mut rng = rng_from_seed(seed);
    sample_with(spec, &mut rng)
}

pub(crate) fn sample_with(spec: &EnsembleSpec, rng: &mut ChaCha8Rng) -> Result<ComplexDenseMatrix> {
    let (m, n) = (spec.n_rows, spec.n_cols);
    let mut re = vec![0.0; m * n];
    match spec.dependency {
        Dependency::Independent => {
            for x in re.iter_mut() {
                *x = spec.entry_dist.sample(rng);
            }
        }
        Dependency::Symmetric | Dependency::Skew => {
            let sign = if spec.dependency == Dependency::Skew { -1.0 } else { 1.0 };
            for i in 0..n {
                for j in i..n {
                    let x = spec.entry_dist.sample(rng);
                    re[i * n + j] = x;
                    if j != i {
                        re[j * n + i] = sign * x;
                    }
                }
            }
        }
    }
    let im = match &spec.fixed_imag {
        Some(t) => t.concat(),
        None => vec![0.0; m * n],
    };
    ComplexDenseMatrix::from_parts(m, n, &re, &im)
}

/// `A − λ I`.
pub fn shift_matrix(a: &ComplexDenseMatrix, lambda: Complex64) -> Result<ComplexDenseMatrix> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "shift needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let mut out = a.clone();
    for i in 0..a.rows() {
        out[(i, i)] -= lambda;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionAudit {
    /// `sup_u P(|ξ − u| < 1)`.
    pub sup_shift_prob: f64,
    /// `P(|ξ| > K)`.
    pub tail_prob: f64,
    pub passes: bool,
    /// Zero when the audit was exact.
    pub n_samples: usize,
}

/// Checks the spread and tail conditions for `entry_dist`. Exact for finitely
/// supported laws; Monte Carlo otherwise.
pub fn audit_distribution(
    entry_dist: &EntryDist,
    k: f64,
    p: f64,
    n_samples: usize,
    seed: u64,
) -> Result<DistributionAudit> {
    entry_dist.validate()?;
    if !(k > 0.0) {
        return Err(Error::parameter("K", "must be positive"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::parameter("p", "must lie in (0, 1)"));
    }
    if n_samples < 1000 {
        return Err(Error::parameter("n_samples", "must be at least 1000"));
    }
    let (sup_shift_prob, tail_prob, used) = match entry_dist.atoms() {
        Some(table) => {
            let (s, t) = exact_spread(&table, k);
            (s, t, 0)
        }
        None => {
            let mut rng = rng_from_seed(seed);
            let mut xs: Vec<f64> = (0..n_samples).map(|_| entry_dist.sample(&mut rng)).collect();
            xs.sort_by(f64::total_cmp);
            let tail = xs.iter().filter(|x| x.abs() > k).count() as f64 / n_samples as f64;
            (sampled_spread(&xs, k), tail, n_samples)
        }
    };
    Ok(DistributionAudit {
        sup_shift_prob,
        tail_prob,
        passes: sup_shift_prob <= 1.0 - p && tail_prob <= p / 2.0,
        n_samples: used,
    })
}

/// Exact `sup_u P(|ξ − u| < 1)` and `P(|ξ| > K)` for an atom table. An open
/// interval of length 2 can hold exactly the atoms in some `[s, s + 2)`.
fn exact_spread(table: &[(f64, f64)], k: f64) -> (f64, f64) {
    let mut atoms: Vec<(f64, f64)> = table.iter().copied().filter(|&(_, q)| q > 0.0).collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = 0.0_f64;
    let mut hi = 0;
    let mut mass = 0.0;
    for lo in 0..atoms.len() {
        while hi < atoms.len() && atoms[hi].0 < atoms[lo].0 + 2.0 {
            mass += atoms[hi].1;
            hi += 1;
        }
        best = best.max(mass);
        mass -= atoms[lo].1;
    }
    let tail = atoms.iter().filter(|(v, _)| v.abs() > k).fold(0.0, |acc, &(_, q)| acc + q);
    (best.min(1.0), tail)
}

/// Fraction of sorted samples in `(u − 1, u + 1)`.
fn window_count(xs: &[f64], u: f64) -> usize {
    let lo = xs.partition_point(|&x| x <= u - 1.0);
    let hi = xs.partition_point(|&x| x < u + 1.0);
    hi - lo
}

fn sampled_spread(xs: &[f64], k: f64) -> f64 {
    let (first, last) = (xs[0], xs[xs.len() - 1]);
    let span = last - first + 2.0;
    let mut step = 0.01 * k;
    // Keep the coarse pass bounded for very spread-out samples.
    if span / step > 1e6 {
        step = span / 1e6;
    }
    let scan = |start: f64, end: f64, step: f64| {
        let mut best = (0usize, start);
        let mut u = start;
        while u <= end {
            let c = window_count(xs, u);
            if c > best.0 {
                best = (c, u);
            }
            u += step;
        }
        best
    };
    let (_, u0) = scan(first - 1.0, last + 1.0, step);
    let (count, _) = scan(u0 - step, u0 + step, step / 100.0);
    count as f64 / xs.len() as f64
}

/// Smallest `M` on the grid `1, 1.05, 1.10, …` with the empirical frequency
/// of `‖A‖ ≤ M√n` at least `target_prob`, where `n = max(rows, cols)`.
pub fn calibrate_boundedness(
    spec: &EnsembleSpec,
    target_prob: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    spec.validate()?;
    if !(target_prob > 0.0 && target_prob < 1.0) {
        return Err(Error::parameter("target_prob", "must lie in (0, 1)"));
    }
    if trials < 30 {
        return Err(Error::parameter("trials", "must be at least 30"));
    }
    let scale = (spec.scale_dim() as f64).sqrt();
    let ratios: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let a = sample_matrix(spec, substream_seed(seed, i)).ok()?;
            let r = operator_norm(&a).ok()? / scale;
            r.is_finite().then_some(r)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    if ratios.is_empty() {
        return Err(Error::Numeric {
            message: "no trial produced a finite operator norm".into(),
            residual: f64::NAN,
        });
    }
    let needed = (target_prob * trials as f64 - 1e-9).ceil().max(1.0) as usize;
    if needed > ratios.len() {
        return Err(Error::Numeric {
            message: format!(
                "only {} of {trials} trials gave finite norms; target unreachable",
                ratios.len()
            ),
            residual: f64::NAN,
        });
    }
    let mut sorted = ratios;
    sorted.sort_by(f64::total_cmp);
    let r = sorted[needed - 1];
    let mut j = ((r - 1.0) / BOUNDEDNESS_GRID_STEP).ceil().max(0.0) as usize;
    while j > 0 && grid_m(j - 1) >= r {
        j -= 1;
    }
    while grid_m(j) < r {
        j += 1;
    }
    Ok(grid_m(j))
}

const BOUNDEDNESS_GRID_STEP: f64 = 0.05;

fn grid_m(j: usize) -> f64 {
    1.0 + BOUNDEDNESS_GRID_STEP * j as f64
}

/// Whether `‖A‖ ≤ M√n` with `n = max(rows, cols)`.
pub fn boundedness_holds(a: &ComplexDenseMatrix, m: f64) -> Result<bool> {
    let n = a.rows().max(a.cols()) as f64;
    Ok(operator_norm(a)? <= m * n.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn symmetric_sign_pairing() {
        let spec = EnsembleSpec::square(2, EntryDist::SymmetricSign)
            .with_dependency(Dependency::Symmetric);
        let a = sample_matrix(&spec, 7).unwrap();
        assert_eq!(a[(0, 1)], a[(1, 0)]);
        assert!(a.as_slice().iter().all(|z| z.re.abs() == 1.0 && z.im == 0.0));
    }

    #[test]
    fn gaussian_has_zero_imaginary_part() {
        let a = sample_matrix(&EnsembleSpec::square(3, EntryDist::standard_gaussian()), 1).unwrap();
        assert!(a.im().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn skew_pairing() {
        let spec = EnsembleSpec::square(4, EntryDist::standard_gaussian())
            .with_dependency(Dependency::Skew);
        let a = sample_matrix(&spec, 3).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(a[(i, j)].re + a[(j, i)].re, 0.0);
                }
            }
        }
    }

    #[test]
    fn fixed_imaginary_part_is_copied() {
        let t = vec![vec![0.5, -1.0], vec![2.0, 0.0]];
        let spec = EnsembleSpec::square(2, EntryDist::SymmetricSign).with_fixed_imag(t.clone());
        let a = sample_matrix(&spec, 0).unwrap();
        assert_eq!(a.im(), t.concat());
    }

    #[test]
    fn validation_names_fields() {
        let bad = EnsembleSpec::iid(2, 3, EntryDist::SymmetricSign)
            .with_dependency(Dependency::Symmetric);
        assert!(matches!(bad.validate(), Err(Error::Validation { field, .. }) if field == "dependency"));
        let bad = EnsembleSpec::square(2, EntryDist::Discrete { table: vec![(0.0, 0.5)] });
        assert!(matches!(bad.validate(), Err(Error::Validation { field, .. }) if field == "entry_dist.table"));
        let bad = EnsembleSpec::square(2, EntryDist::SymmetricSign).with_fixed_imag(vec![vec![0.0]]);
        assert!(matches!(bad.validate(), Err(Error::Validation { field, .. }) if field == "fixed_imag"));
    }

    #[test]
    fn audit_symmetric_sign_is_exact() {
        let a = audit_distribution(&EntryDist::SymmetricSign, 2.0, 0.4, 1000, 0).unwrap();
        assert_eq!(a.sup_shift_prob, 0.5);
        assert_eq!(a.tail_prob, 0.0);
        assert!(a.passes);
    }

    #[test]
    fn audit_point_mass_fails() {
        let a = audit_distribution(&EntryDist::point_mass(0.0), 1.0, 0.1, 1000, 0).unwrap();
        assert_eq!(a.sup_shift_prob, 1.0);
        assert!(!a.passes);
    }

    #[test]
    fn audit_gaussian_tail() {
        let a = audit_distribution(&EntryDist::standard_gaussian(), 3.0, 0.3, 200_000, 5).unwrap();
        // 2Φ(−3) = 0.0026998; binomial sd at n = 2e5 is about 1.2e-4.
        assert!((a.tail_prob - 0.0026998).abs() < 5e-4, "{}", a.tail_prob);
        // P(|N(0,1)| < 1) = 0.6827.
        assert!((a.sup_shift_prob - 0.6827).abs() < 0.01);
        assert!(a.passes);
    }

    #[test]
    fn audit_requires_samples() {
        assert!(audit_distribution(&EntryDist::SymmetricSign, 2.0, 0.4, 10, 0).is_err());
    }

    /// Brute-force sup over a dense set of centers including all atom
    /// neighbourhoods.
    fn brute_spread(table: &[(f64, f64)]) -> f64 {
        let mut centers = Vec::new();
        for &(a, _) in table {
            for &(b, _) in table {
                centers.push((a + b) / 2.0);
                centers.push(a + 1.0 - 1e-9);
                centers.push(a - 1.0 + 1e-9);
            }
        }
        centers
            .iter()
            .map(|&u| {
                table
                    .iter()
                    .filter(|(v, _)| (v - u).abs() < 1.0)
                    .map(|&(_, q)| q)
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    proptest! {
        #[test]
        fn discrete_audit_matches_enumeration(
            raw in prop::collection::vec((-40i32..40, 1u32..10), 1..7),
            k in 0.5f64..4.0,
        ) {
            let total: u32 = raw.iter().map(|r| r.1).sum();
            let table: Vec<(f64, f64)> = raw
                .iter()
                .map(|&(v, w)| (v as f64 / 8.0, w as f64 / total as f64))
                .collect();
            let sum: f64 = table.iter().map(|t| t.1).sum();
            prop_assume!((sum - 1.0).abs() <= 1e-12);
            let a = audit_distribution(&EntryDist::Discrete { table: table.clone() }, k, 0.3, 1000, 0)
                .unwrap();
            prop_assert!((a.sup_shift_prob - brute_spread(&table)).abs() < 1e-12);
            let tail: f64 = table.iter().filter(|(v, _)| v.abs() > k).map(|t| t.1).sum();
            prop_assert!((a.tail_prob - tail).abs() < 1e-12);
        }

        #[test]
        fn sampling_is_reproducible(seed: u64, n in 1usize..6) {
            let spec = EnsembleSpec::square(n, EntryDist::standard_gaussian())
                .with_dependency(Dependency::Symmetric);
            let a = sample_matrix(&spec, seed).unwrap();
            prop_assert_eq!(&a, &sample_matrix(&spec, seed).unwrap());
            prop_assert_eq!(&a, &a.transpose());
        }
    }

    #[test]
    fn shift_examples() {
        let z = shift_matrix(&ComplexDenseMatrix::identity(2), Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(z, ComplexDenseMatrix::zeros(2, 2));
        let i = Complex64::new(0.0, 1.0);
        let d = shift_matrix(&ComplexDenseMatrix::zeros(3, 3), i).unwrap();
        assert_eq!(d, ComplexDenseMatrix::from_diag(&[-i, -i, -i]));
        let a = sample_matrix(&EnsembleSpec::square(3, EntryDist::SymmetricSign), 2).unwrap();
        assert_eq!(shift_matrix(&a, Complex64::new(0.0, 0.0)).unwrap(), a);
        assert!(shift_matrix(&ComplexDenseMatrix::zeros(2, 3), i).is_err());
    }

    #[test]
    fn calibrate_zero_ensemble_gives_grid_minimum() {
        let spec = EnsembleSpec::square(5, EntryDist::point_mass(0.0));
        assert_eq!(calibrate_boundedness(&spec, 0.5, 30, 1).unwrap(), 1.0);
    }

    #[test]
    fn calibrate_is_monotone_in_target() {
        let spec = EnsembleSpec::square(16, EntryDist::SymmetricSign);
        let mut last = 0.0;
        for target in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let m = calibrate_boundedness(&spec, target, 40, 9).unwrap();
            assert!(m >= last);
            last = m;
        }
    }

    #[test]
    fn calibrate_symmetric_sign_n64() {
        let spec = EnsembleSpec::square(64, EntryDist::SymmetricSign);
        let m = calibrate_boundedness(&spec, 0.5, 30, 4).unwrap();
        assert!((1.8..=2.4).contains(&m), "{m}");
    }
}

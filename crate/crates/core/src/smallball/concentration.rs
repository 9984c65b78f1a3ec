use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densela::ComplexDenseMatrix;
use crate::ensembles::EntryDist;
use crate::error::{Error, Result};
use crate::rng::substream;

/// Largest number of joint outcomes enumerated exactly.
pub const MAX_OUTCOMES: f64 = (1u64 << 20) as f64;
const MAX_CANDIDATE_SUBSETS: f64 = 2e7;
const SHARD: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcentrationMethod {
    ExactEnum,
    MonteCarlo,
    ClosedForm,
}

/// A value of `L(Z, t) = sup_u P(‖Z − u‖₂ ≤ t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationEstimate {
    pub t: f64,
    pub value: f64,
    pub stderr: f64,
    pub method: ConcentrationMethod,
    /// The center attaining `value`.
    pub center_witness: Vec<f64>,
    /// Monte Carlo estimates only see finitely many candidate centers.
    pub lower_biased: bool,
    pub n_samples: usize,
}

impl ConcentrationEstimate {
    pub fn closed_form(t: f64, value: f64) -> Self {
        Self {
            t,
            value,
            stderr: 0.0,
            method: ConcentrationMethod::ClosedForm,
            center_witness: Vec::new(),
            lower_biased: false,
            n_samples: 0,
        }
    }
}

/// Atoms of the symmetric sign law.
pub fn sign_atoms() -> Vec<(f64, f64)> {
    vec![(-1.0, 0.5), (1.0, 0.5)]
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::parameter("t", "must be finite and >= 0"));
    }
    Ok(())
}

/// Law of `Σ a_k ξ_k` as sorted `(value, mass)` atoms, with atoms closer
/// than a relative `1e-12` merged.
pub fn sum_distribution(atoms: &[Vec<(f64, f64)>], a: &[f64]) -> Result<Vec<(f64, f64)>> {
    if atoms.len() != a.len() {
        return Err(Error::Shape(format!(
            "{} atom tables for {} weights",
            atoms.len(),
            a.len()
        )));
    }
    let outcomes: f64 = atoms
        .iter()
        .map(|t| t.iter().filter(|(_, q)| *q > 0.0).count() as f64)
        .product();
    if outcomes > MAX_OUTCOMES {
        return Err(Error::Budget(format!(
            "{outcomes} outcomes exceed the enumeration budget of {MAX_OUTCOMES}"
        )));
    }
    let scale: f64 = 1.0
        + atoms
            .iter()
            .zip(a)
            .map(|(t, w)| w.abs() * t.iter().fold(0.0_f64, |m, (v, _)| m.max(v.abs())))
            .sum::<f64>();
    let tol = 1e-12 * scale;
    let mut dist = vec![(0.0, 1.0)];
    for (table, &w) in atoms.iter().zip(a) {
        let mut next = Vec::with_capacity(dist.len() * table.len());
        for &(s, m) in &dist {
            for &(v, q) in table {
                if q > 0.0 {
                    next.push((s + w * v, m * q));
                }
            }
        }
        next.sort_by(|x, y| x.0.total_cmp(&y.0));
        dist = merge_sorted(next, tol);
    }
    Ok(dist)
}

fn merge_sorted(sorted: Vec<(f64, f64)>, tol: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for (v, m) in sorted {
        match out.last_mut() {
            Some(last) if v - last.0 <= tol => last.1 += m,
            _ => out.push((v, m)),
        }
    }
    out
}

/// Exact `L(Σ a_k ξ_k, t)` for independent finitely supported `ξ_k`.
///
/// The best closed window `[u − t, u + t]` can be slid right until its left
/// end meets an atom, so scanning windows `[s_i, s_i + 2t]` is exhaustive.
pub fn exact_concentration_enum(
    atoms: &[Vec<(f64, f64)>],
    a: &[f64],
    t: f64,
) -> Result<ConcentrationEstimate> {
    check_t(t)?;
    let dist = sum_distribution(atoms, a)?;
    Ok(window_max(&dist, t))
}

/// Exact concentration of a one-dimensional atom list at every `t` in
/// `t_grid`, sharing one convolution.
pub fn exact_concentration_curve(
    atoms: &[Vec<(f64, f64)>],
    a: &[f64],
    t_grid: &[f64],
) -> Result<Vec<ConcentrationEstimate>> {
    for &t in t_grid {
        check_t(t)?;
    }
    let dist = sum_distribution(atoms, a)?;
    Ok(t_grid.iter().map(|&t| window_max(&dist, t)).collect())
}

fn window_max(dist: &[(f64, f64)], t: f64) -> ConcentrationEstimate {
    let scale = 1.0 + dist.iter().fold(0.0_f64, |m, (v, _)| m.max(v.abs()));
    let tol = 1e-12 * scale;
    let mut best = (0.0, dist[0].0 + t);
    let mut hi = 0;
    let mut mass = 0.0;
    for lo in 0..dist.len() {
        while hi < dist.len() && dist[hi].0 <= dist[lo].0 + 2.0 * t + tol {
            mass += dist[hi].1;
            hi += 1;
        }
        if mass > best.0 {
            best = (mass, dist[lo].0 + t);
        }
        mass -= dist[lo].1;
    }
    ConcentrationEstimate {
        t,
        value: best.0.min(1.0),
        stderr: 0.0,
        method: ConcentrationMethod::ExactEnum,
        center_witness: vec![best.1],
        lower_biased: false,
        n_samples: 0,
    }
}

/// Exact `L(Z, t)` for a finitely supported `Z ∈ Rᵏ` given as weighted
/// points. The smallest ball around any covered set is the circumscribed
/// ball of at most `k + 1` of its points, so circumcenters of all such
/// subsets are the only candidate centers needed.
pub fn exact_concentration_points(points: &[(Vec<f64>, f64)], t: f64) -> Result<ConcentrationEstimate> {
    check_t(t)?;
    if points.is_empty() {
        return Err(Error::parameter("points", "must be nonempty"));
    }
    let k = points[0].0.len();
    if points.iter().any(|(p, _)| p.len() != k) {
        return Err(Error::Shape("points must share a dimension".into()));
    }
    let m = points.len();
    let max_size = (k + 1).min(m);
    let total: f64 = (1..=max_size).map(|r| crate::structure::binomial(m, r)).sum();
    if total > MAX_CANDIDATE_SUBSETS {
        return Err(Error::Budget(format!(
            "{total} candidate subsets exceed the budget of {MAX_CANDIDATE_SUBSETS}"
        )));
    }
    let scale = 1.0
        + points
            .iter()
            .flat_map(|(p, _)| p.iter())
            .fold(0.0_f64, |a, x| a.max(x.abs()));
    let tol = 1e-10 * scale;
    let mut best = (0.0, points[0].0.clone());
    let mut idx = Vec::with_capacity(max_size);
    for size in 1..=max_size {
        idx.clear();
        idx.extend(0..size);
        loop {
            if let Some(c) = circumcenter(points, &idx) {
                let r2 = sq_dist(&c, &points[idx[0]].0);
                if r2.sqrt() <= t + tol {
                    let mass: f64 = points
                        .iter()
                        .filter(|(p, _)| sq_dist(p, &c).sqrt() <= t + tol)
                        .map(|(_, q)| q)
                        .sum();
                    if mass > best.0 {
                        best = (mass, c);
                    }
                }
            }
            let mut i = size;
            while i > 0 && idx[i - 1] == m - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(ConcentrationEstimate {
        t,
        value: best.0.min(1.0),
        stderr: 0.0,
        method: ConcentrationMethod::ExactEnum,
        center_witness: best.1,
        lower_biased: false,
        n_samples: 0,
    })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Center of the sphere through the chosen points within their affine
/// hull, or `None` if they are affinely dependent.
fn circumcenter(points: &[(Vec<f64>, f64)], idx: &[usize]) -> Option<Vec<f64>> {
    let p0 = &points[idx[0]].0;
    let r = idx.len() - 1;
    if r == 0 {
        return Some(p0.clone());
    }
    let d: Vec<Vec<f64>> = idx[1..]
        .iter()
        .map(|&i| points[i].0.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let mut g = vec![vec![0.0; r + 1]; r];
    for i in 0..r {
        for j in 0..r {
            g[i][j] = d[i].iter().zip(&d[j]).map(|(a, b)| a * b).sum();
        }
        g[i][r] = 0.5 * g[i][i];
    }
    let scale = g.iter().map(|row| row[..r].iter().fold(0.0_f64, |a, x| a.max(x.abs()))).fold(0.0, f64::max);
    // Gaussian elimination with partial pivoting on the augmented system.
    for col in 0..r {
        let piv = (col..r).max_by(|&a, &b| g[a][col].abs().total_cmp(&g[b][col].abs()))?;
        if g[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        g.swap(col, piv);
        for row in (col + 1)..r {
            let f = g[row][col] / g[col][col];
            for c in col..=r {
                g[row][c] -= f * g[col][c];
            }
        }
    }
    let mut lambda = vec![0.0; r];
    for i in (0..r).rev() {
        let s: f64 = ((i + 1)..r).map(|j| g[i][j] * lambda[j]).sum();
        lambda[i] = (g[i][r] - s) / g[i][i];
    }
    let mut c = p0.clone();
    for (l, di) in lambda.iter().zip(&d) {
        for (cj, dj) in c.iter_mut().zip(di) {
            *cj += l * dj;
        }
    }
    Some(c)
}

/// A random vector to be sampled by [`concentration_mc`].
#[derive(Debug, Clone, PartialEq)]
pub enum Sampler {
    /// `Σ a_k ξ_k` with i.i.d. `ξ_k`.
    WeightedSum { weights: Vec<f64>, dist: EntryDist },
    /// `V ξ` for a real `m × N` matrix given by rows.
    Linear { rows: Vec<Vec<f64>>, dist: EntryDist },
    /// `B ξ ∈ Cᵐ` with real i.i.d. `ξ`; distances are complex Euclidean.
    ComplexLinear { matrix: ComplexDenseMatrix, dist: EntryDist },
    StandardGaussian { dim: usize },
    PointMass { point: Vec<f64> },
}

impl Sampler {
    /// Real dimension of a sample.
    pub fn dim(&self) -> usize {
        match self {
            Sampler::WeightedSum { .. } => 1,
            Sampler::Linear { rows, .. } => rows.len(),
            Sampler::ComplexLinear { matrix, .. } => 2 * matrix.rows(),
            Sampler::StandardGaussian { dim } => *dim,
            Sampler::PointMass { point } => point.len(),
        }
    }

    fn draw(&self, rng: &mut rand_chacha::ChaCha8Rng, out: &mut Vec<f64>) {
        out.clear();
        match self {
            Sampler::WeightedSum { weights, dist } => {
                out.push(weights.iter().map(|w| w * dist.sample(rng)).sum());
            }
            Sampler::Linear { rows, dist } => {
                let n = rows.first().map_or(0, Vec::len);
                let xi: Vec<f64> = (0..n).map(|_| dist.sample(rng)).collect();
                out.extend(rows.iter().map(|r| r.iter().zip(&xi).map(|(a, b)| a * b).sum::<f64>()));
            }
            Sampler::ComplexLinear { matrix, dist } => {
                let xi: Vec<Complex64> = (0..matrix.cols())
                    .map(|_| Complex64::new(dist.sample(rng), 0.0))
                    .collect();
                let y = matrix.matvec(&xi).expect("shape fixed by construction");
                out.extend(y.iter().flat_map(|z| [z.re, z.im]));
            }
            Sampler::StandardGaussian { dim } => {
                out.extend((0..*dim).map(|_| rng.sample::<f64, _>(StandardNormal)));
            }
            Sampler::PointMass { point } => out.extend_from_slice(point),
        }
    }
}

/// Monte Carlo `L(Z, t)`: every sample is tried as a center and the
/// densest closed ball is counted exactly over the sample. Reported with
/// the binomial standard error at the winning center and flagged as
/// lower-biased.
pub fn concentration_mc(
    sampler: &Sampler,
    t: f64,
    n_samples: usize,
    seed: u64,
) -> Result<ConcentrationEstimate> {
    check_t(t)?;
    if n_samples < 10_000 {
        return Err(Error::parameter("n_samples", "must be at least 10^4"));
    }
    let k = sampler.dim();
    if k == 0 || k > 8 {
        return Err(Error::parameter("sampler", "dimension must lie in 1..=8"));
    }
    let shards = n_samples.div_ceil(SHARD);
    let mut flat: Vec<f64> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = substream(seed, s as u64);
            let count = SHARD.min(n_samples - s * SHARD);
            let mut buf = Vec::with_capacity(k);
            let mut out = Vec::with_capacity(count * k);
            for _ in 0..count {
                sampler.draw(&mut rng, &mut buf);
                out.extend_from_slice(&buf);
            }
            out
        })
        .flatten()
        .collect();
    if flat.iter().any(|x| !x.is_finite()) {
        return Err(Error::validation("sampler", "produced non-finite samples"));
    }
    let (points, mult) = dedup(&mut flat, k);
    let (count, center) = densest_ball(&points, &mult, k, t);
    let p = count as f64 / n_samples as f64;
    Ok(ConcentrationEstimate {
        t,
        value: p,
        stderr: (p * (1.0 - p) / n_samples as f64).sqrt(),
        method: ConcentrationMethod::MonteCarlo,
        center_witness: center,
        lower_biased: true,
        n_samples,
    })
}

/// Sorts points lexicographically and merges exact duplicates.
fn dedup(flat: &mut [f64], k: usize) -> (Vec<f64>, Vec<usize>) {
    let mut rows: Vec<&[f64]> = flat.chunks(k).collect();
    rows.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut points = Vec::new();
    let mut mult: Vec<usize> = Vec::new();
    let mut last: Option<&[f64]> = None;
    for r in rows {
        if last == Some(r) {
            *mult.last_mut().unwrap() += 1;
        } else {
            points.extend_from_slice(r);
            mult.push(1);
            last = Some(r);
        }
    }
    (points, mult)
}

fn densest_ball(points: &[f64], mult: &[usize], k: usize, t: f64) -> (usize, Vec<f64>) {
    let m = mult.len();
    let pt = |i: usize| &points[i * k..(i + 1) * k];
    let t2 = t * t;
    let mut best = (0usize, 0usize);
    if k == 1 {
        // Points are sorted; two pointers over the window [x_i − t, x_i + t].
        let mut prefix = vec![0usize; m + 1];
        for i in 0..m {
            prefix[i + 1] = prefix[i] + mult[i];
        }
        let (mut lo, mut hi) = (0, 0);
        for i in 0..m {
            let x = points[i];
            while points[lo] < x - t {
                lo += 1;
            }
            while hi < m && points[hi] <= x + t {
                hi += 1;
            }
            let c = prefix[hi] - prefix[lo];
            if c > best.0 {
                best = (c, i);
            }
        }
    } else if t == 0.0 {
        for (i, &c) in mult.iter().enumerate() {
            if c > best.0 {
                best = (c, i);
            }
        }
    } else if k <= 4 {
        let cell = |p: &[f64]| -> Vec<i64> { p.iter().map(|x| (x / t).floor() as i64).collect() };
        let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for i in 0..m {
            grid.entry(cell(pt(i))).or_default().push(i);
        }
        let offsets: Vec<Vec<i64>> = (0..3usize.pow(k as u32))
            .map(|mut code| {
                (0..k)
                    .map(|_| {
                        let o = (code % 3) as i64 - 1;
                        code /= 3;
                        o
                    })
                    .collect()
            })
            .collect();
        let mut key = vec![0i64; k];
        for i in 0..m {
            let base = cell(pt(i));
            let mut c = 0;
            for off in &offsets {
                for d in 0..k {
                    key[d] = base[d] + off[d];
                }
                if let Some(list) = grid.get(&key) {
                    for &j in list {
                        if sq_dist(pt(i), pt(j)) <= t2 {
                            c += mult[j];
                        }
                    }
                }
            }
            if c > best.0 {
                best = (c, i);
            }
        }
    } else {
        // Slab on the first coordinate (points are sorted by it).
        let mut lo = 0;
        for i in 0..m {
            let x = points[i * k];
            while points[lo * k] < x - t {
                lo += 1;
            }
            let mut c = 0;
            let mut j = lo;
            while j < m && points[j * k] <= x + t {
                if sq_dist(pt(i), pt(j)) <= t2 {
                    c += mult[j];
                }
                j += 1;
            }
            if c > best.0 {
                best = (c, i);
            }
        }
    }
    (best.0, pt(best.1).to_vec())
}

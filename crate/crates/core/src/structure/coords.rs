use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::densela::norm2;
use crate::error::{Error, Result};

/// Largest number of subsets enumerated by exact correlation.
pub const EXACT_SUBSET_BUDGET: f64 = 1e6;

/// `⌊δN⌋`, rejecting values that round to 0 or N.
pub fn floor_count(delta: f64, n: usize) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::parameter("delta", "must lie in (0, 1)"));
    }
    let k = (delta * n as f64 + 1e-9).floor() as usize;
    if k == 0 || k >= n {
        return Err(Error::parameter(
            "delta",
            format!("floor(delta * N) = {k} must lie in [1, N - 1] for N = {n}"),
        ));
    }
    Ok(k)
}

/// Indices (0-based, ascending) of all but the `⌊δN⌋` largest-modulus
/// coordinates. Among equal moduli the lower index counts as larger.
pub fn sm_set(z: &[Complex64], delta: f64) -> Result<Vec<usize>> {
    let k = floor_count(delta, z.len())?;
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&i, &j| z[j].norm().total_cmp(&z[i].norm()).then(i.cmp(&j)));
    let mut small = order[k..].to_vec();
    small.sort_unstable();
    Ok(small)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMethod {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub d_value: f64,
    pub witness_subset: Vec<usize>,
    pub method: CorrelationMethod,
    pub small_set: Vec<usize>,
}

/// `det(V_J V_Jᵀ)` for `V = [xᵀ; yᵀ]`, clamped at zero.
pub fn gram_det(z: &[Complex64], subset: &[usize]) -> f64 {
    let (mut xx, mut yy, mut xy) = (0.0, 0.0, 0.0);
    for &j in subset {
        let (x, y) = (z[j].re, z[j].im);
        xx += x * x;
        yy += y * y;
        xy += x * y;
    }
    (xx * yy - xy * xy).max(0.0)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Real–imaginary correlation `d(z)`: the largest `det(V_J V_Jᵀ)^{1/2}`
/// over `J ⊆ sm(z)` with `|J| = ⌊δN⌋`.
pub fn rc_correlation(
    z: &[Complex64],
    delta: f64,
    method: CorrelationMethod,
) -> Result<CorrelationResult> {
    let small = sm_set(z, delta)?;
    let k = z.len() - small.len();
    if k < 2 {
        return Err(Error::parameter("delta", "floor(delta * N) must be at least 2"));
    }
    if k > small.len() {
        return Err(Error::parameter(
            "delta",
            "floor(delta * N) exceeds the number of small coordinates",
        ));
    }
    let (det, subset) = match method {
        CorrelationMethod::Exact => exact_max(z, &small, k)?,
        CorrelationMethod::Greedy => greedy_max(z, &small, k),
    };
    Ok(CorrelationResult {
        d_value: det.sqrt(),
        witness_subset: subset,
        method,
        small_set: small,
    })
}

fn exact_max(z: &[Complex64], pool: &[usize], k: usize) -> Result<(f64, Vec<usize>)> {
    let count = binomial(pool.len(), k);
    if count > EXACT_SUBSET_BUDGET {
        return Err(Error::Budget(format!(
            "{count} subsets exceed the exact budget of {EXACT_SUBSET_BUDGET}; use greedy mode"
        )));
    }
    let n = pool.len();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best = (-1.0, Vec::new());
    loop {
        let subset: Vec<usize> = idx.iter().map(|&i| pool[i]).collect();
        let d = gram_det(z, &subset);
        if d > best.0 {
            best = (d, subset);
        }
        // Next combination in lexicographic order.
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(best)
}

/// Greedy D-optimal growth: seed with the largest-modulus coordinate, then
/// repeatedly add the coordinate that maximizes the determinant.
fn greedy_max(z: &[Complex64], pool: &[usize], k: usize) -> (f64, Vec<usize>) {
    let first = *pool
        .iter()
        .min_by(|&&i, &&j| z[j].norm().total_cmp(&z[i].norm()).then(i.cmp(&j)))
        .expect("pool is nonempty");
    let mut chosen = vec![first];
    let mut sums = (z[first].re.powi(2), z[first].im.powi(2), z[first].re * z[first].im);
    while chosen.len() < k {
        let mut pick: Option<(f64, usize)> = None;
        for &j in pool {
            if chosen.contains(&j) {
                continue;
            }
            let (x, y) = (z[j].re, z[j].im);
            let (xx, yy, xy) = (sums.0 + x * x, sums.1 + y * y, sums.2 + x * y);
            let d = (xx * yy - xy * xy).max(0.0);
            if pick.is_none_or(|(bd, _)| d > bd) {
                pick = Some((d, j));
            }
        }
        let (_, j) = pick.expect("pool has at least k entries");
        let (x, y) = (z[j].re, z[j].im);
        sums = (sums.0 + x * x, sums.1 + y * y, sums.2 + x * y);
        chosen.push(j);
    }
    chosen.sort_unstable();
    (gram_det(z, &chosen), chosen)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompressClass {
    Compressible,
    Incompressible,
}

/// Distance from a unit vector to the `⌊c₀N⌋`-sparse vectors (the norm of
/// everything outside its largest `⌊c₀N⌋` coordinates), and the resulting
/// class for threshold `c₁`.
pub fn compress_class(z: &[Complex64], c0: f64, c1: f64) -> Result<(CompressClass, f64)> {
    if !(c0 > 0.0 && c0 < 1.0) {
        return Err(Error::parameter("c0", "must lie in (0, 1)"));
    }
    if !(c1 > 0.0 && c1 < 1.0) {
        return Err(Error::parameter("c1", "must lie in (0, 1)"));
    }
    let nz = norm2(z);
    if (nz - 1.0).abs() > 1e-10 {
        return Err(Error::Normalization(nz));
    }
    let s = (c0 * z.len() as f64 + 1e-9).floor() as usize;
    let mut mags: Vec<f64> = z.iter().map(|w| w.norm_sqr()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let dist = mags[s.min(mags.len())..].iter().sum::<f64>().sqrt();
    let class = if dist <= c1 {
        CompressClass::Compressible
    } else {
        CompressClass::Incompressible
    };
    Ok((class, dist))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyBinetAudit {
    /// `C(N₀, k) · d(z)²`.
    pub lhs: f64,
    /// `C(N₀ − 2, k − 2) · det(V_I V_Iᵀ)`.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `C(N₀, k) d(z)² ≥ C(N₀ − 2, k − 2) det(V_I V_Iᵀ)` with `I = sm(z)`,
/// `N₀ = |I|`, `k = ⌊δN⌋`. Each 2-subset of `I` lies in `C(N₀ − 2, k − 2)`
/// of the `k`-subsets, so the right side over `C(N₀, k)` is the mean of
/// `det(V_J V_Jᵀ)`.
pub fn cauchy_binet_audit(z: &[Complex64], delta: f64) -> Result<CauchyBinetAudit> {
    let corr = rc_correlation(z, delta, CorrelationMethod::Exact)?;
    let n0 = corr.small_set.len();
    let k = corr.witness_subset.len();
    let lhs = binomial(n0, k) * corr.d_value.powi(2);
    let rhs = binomial(n0 - 2, k - 2) * gram_det(z, &corr.small_set);
    let slack = 1e-12 * lhs.abs().max(rhs.abs());
    Ok(CauchyBinetAudit {
        lhs,
        rhs,
        holds: lhs + slack >= rhs,
    })
}

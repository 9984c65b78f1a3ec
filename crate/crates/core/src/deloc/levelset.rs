//! Cardinality bounds for nets of LCD level sets, and a small constructive
//! integer-point net.

use serde::{Deserialize, Serialize};

use crate::densela::real_norm2;
use crate::error::{Error, Result};
use crate::structure::lcd_vector_default;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelSetCase {
    /// Genuinely complex: `d ≥ d₀`.
    Complex,
    /// Essentially real: `d ≤ d₀`.
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSetParams {
    pub case: LevelSetCase,
    /// LCD level `D`.
    #[serde(rename = "D")]
    pub d_level: f64,
    /// Real–imaginary correlation level `d`.
    pub d: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub delta: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSetBound {
    pub gamma: f64,
    pub d0: f64,
    /// Natural log of the cardinality bound.
    pub log_cardinality: f64,
    /// `exp(log_cardinality)`, possibly infinite.
    pub cardinality: f64,
}

/// `γ = (L/D)√log₊(D/L)` and `d₀ = Cδ·max(γ, √N/D)`.
pub fn gamma_d0(d_level: f64, l: f64, n: usize, delta: f64, c: f64) -> (f64, f64) {
    let ratio = d_level / l;
    let gamma = if ratio > 1.0 { ratio.ln().sqrt() / ratio } else { 0.0 };
    let d0 = c * delta * gamma.max((n as f64).sqrt() / d_level);
    (gamma, d0)
}

/// Cardinality bound of the `(Cγ)`-net of the level set `S_{D,d}`.
///
/// Complex case: `δ^{−N} γ^{−2δN−1} (CD/√N)^{2N−δN} d^{N−δN−1}`.
/// Real case: `δ^{−δN} γ^{−2δN−1} (CD/√N)^{N−δN+1}`. Evaluated in log space.
pub fn levelset_net_bound(p: &LevelSetParams) -> Result<LevelSetBound> {
    if !(p.d_level > 0.0 && p.d_level.is_finite()) {
        return Err(Error::parameter("D", "must be positive"));
    }
    if !(p.l > 0.0 && p.l.is_finite()) {
        return Err(Error::parameter("L", "must be positive"));
    }
    if p.n == 0 {
        return Err(Error::parameter("N", "must be positive"));
    }
    if !(p.delta > 0.0 && p.delta < 1.0) {
        return Err(Error::parameter("delta", "must lie in (0, 1)"));
    }
    if !(p.d >= 0.0 && p.d <= 1.0) {
        return Err(Error::parameter("d", "must lie in [0, 1]"));
    }
    if !(p.c > 0.0 && p.c.is_finite()) {
        return Err(Error::parameter("C", "must be positive"));
    }
    let (gamma, d0) = gamma_d0(p.d_level, p.l, p.n, p.delta, p.c);
    if !(gamma > 0.0) {
        return Err(Error::parameter("gamma", "log+(D/L) vanishes, so gamma = 0"));
    }
    let n = p.n as f64;
    let dn = p.delta * n;
    let log_cd = (p.c * p.d_level / n.sqrt()).ln();
    let log_cardinality = match p.case {
        LevelSetCase::Complex => {
            if p.d < d0 {
                return Err(Error::parameter(
                    "d0",
                    format!("complex case needs d >= d0 = {d0}, got d = {}", p.d),
                ));
            }
            -n * p.delta.ln() - (2.0 * dn + 1.0) * gamma.ln() + (2.0 * n - dn) * log_cd
                + (n - dn - 1.0) * p.d.ln()
        }
        LevelSetCase::Real => {
            if p.d > d0 {
                return Err(Error::parameter(
                    "d0",
                    format!("real case needs d <= d0 = {d0}, got d = {}", p.d),
                ));
            }
            -dn * p.delta.ln() - (2.0 * dn + 1.0) * gamma.ln() + (n - dn + 1.0) * log_cd
        }
    };
    Ok(LevelSetBound {
        gamma,
        d0,
        log_cardinality,
        cardinality: log_cardinality.exp(),
    })
}

/// Cardinality bound `(C/(c₀c₁²))^{c₀N}` for a `2c₁`-net of the
/// compressible vectors; returns `(log, value)`.
pub fn compressible_net_bound(c: f64, c0: f64, c1: f64, n: usize) -> Result<(f64, f64)> {
    for (name, v) in [("C", c), ("c0", c0), ("c1", c1)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::parameter(name, "must be positive"));
        }
    }
    let log = c0 * n as f64 * (c / (c0 * c1 * c1)).ln();
    Ok((log, log.exp()))
}

pub const MAX_INTEGER_NET_DIM: usize = 6;
pub const MAX_INTEGER_NET_RADIUS: f64 = 10.0;

/// Directions `p/‖p‖` of the nonzero integer points with `‖p‖ ≤ radius`,
/// one per primitive direction, in lexicographic order of `p`.
pub fn integer_point_net(dim: usize, radius: f64) -> Result<Vec<Vec<f64>>> {
    if dim == 0 || dim > MAX_INTEGER_NET_DIM {
        return Err(Error::parameter("N", format!("must lie in [1, {MAX_INTEGER_NET_DIM}]")));
    }
    if !(radius >= 1.0 && radius <= MAX_INTEGER_NET_RADIUS + 1.0) {
        return Err(Error::parameter(
            "D",
            format!("radius must lie in [1, {}]", MAX_INTEGER_NET_RADIUS + 1.0),
        ));
    }
    let r = radius.floor() as i64;
    let mut out = Vec::new();
    let mut p = vec![-r; dim];
    loop {
        let sq: i64 = p.iter().map(|x| x * x).sum();
        if sq > 0 && (sq as f64) <= radius * radius && gcd_all(&p) == 1 {
            let norm = (sq as f64).sqrt();
            out.push(p.iter().map(|&x| x as f64 / norm).collect());
        }
        let mut i = dim;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if p[i] < r {
                p[i] += 1;
                break;
            }
            p[i] = -r;
        }
    }
}

fn gcd_all(p: &[i64]) -> i64 {
    p.iter().fold(0, |g, &x| gcd(g, x.abs()))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegerNetCheck {
    pub lcd: f64,
    /// `L√log₊(D/L)` at `D = lcd`.
    pub slack: f64,
    pub net_size: usize,
    pub distance: f64,
    /// `2·slack/lcd`.
    pub allowed: f64,
    pub covered: bool,
}

/// For a unit `x` with LCD `D ≤ d_max`, some `p ∈ Zᴺ` has
/// `‖Dx − p‖ < L√log₊(D/L)`, so the integer-point net of radius
/// `D + slack` contains a direction within `2·slack/D` of `x`.
///
/// Returns `None` when the LCD exceeds `d_max`.
pub fn integer_net_check(x: &[f64], l: f64, d_max: f64) -> Result<Option<IntegerNetCheck>> {
    let nx = real_norm2(x);
    if (nx - 1.0).abs() > 1e-10 {
        return Err(Error::Normalization(nx));
    }
    if d_max > MAX_INTEGER_NET_RADIUS {
        return Err(Error::parameter("D", format!("must be at most {MAX_INTEGER_NET_RADIUS}")));
    }
    let est = lcd_vector_default(x, l)?;
    if est.censored || est.value > d_max {
        return Ok(None);
    }
    let lcd = est.value;
    let slack = l * (lcd / l).ln().max(0.0).sqrt();
    let net = integer_point_net(x.len(), (lcd + slack).max(1.0))?;
    let distance = net
        .iter()
        .map(|q| q.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min);
    let allowed = 2.0 * slack / lcd;
    Ok(Some(IntegerNetCheck {
        lcd,
        slack,
        net_size: net.len(),
        distance,
        allowed,
        covered: distance <= allowed + 1e-12,
    }))
}

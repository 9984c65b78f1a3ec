use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Finite net of the disc `{|z| ≤ M√n}` used to discretize eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscNet {
    pub centers: Vec<Complex64>,
    /// Covering radius `2Mδ√n`.
    pub mesh: f64,
    pub cardinality: usize,
    #[serde(rename = "M")]
    pub m: f64,
    pub delta: f64,
    pub n: usize,
}

impl DiscNet {
    pub fn radius(&self) -> f64 {
        self.m * (self.n as f64).sqrt()
    }

    /// Center closest to `z`, ties to the lower index.
    pub fn nearest(&self, z: Complex64) -> Complex64 {
        let mut best = self.centers[0];
        let mut best_d = (best - z).norm();
        for &c in &self.centers[1..] {
            let d = (c - z).norm();
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        best
    }

    /// Number of uniform random disc points farther than `mesh` from
    /// every center.
    pub fn covering_failures(&self, probes: usize, seed: u64) -> usize {
        let mut rng = rng_from_seed(seed);
        let r = self.radius();
        let slack = 1e-12 * r.max(1.0);
        (0..probes)
            .filter(|_| {
                let rho = r * rng.random::<f64>().sqrt();
                let phi = std::f64::consts::TAU * rng.random::<f64>();
                let z = Complex64::from_polar(rho, phi);
                (self.nearest(z) - z).norm() > self.mesh + slack
            })
            .count()
    }
}

/// Hexagonal net of the disc of radius `M√n` with covering radius
/// `2Mδ√n`.
///
/// Lattice spacing is `√3` times the covering radius. Lattice points outside
/// the disc but within one mesh of it are pulled radially onto the boundary,
/// which keeps the covering property because radial projection onto a disc
/// is 1-Lipschitz and fixes disc points.
pub fn disc_net(m: f64, n: usize, delta: f64) -> Result<DiscNet> {
    if !(m >= 1.0 && m.is_finite()) {
        return Err(Error::parameter("M", "must be >= 1"));
    }
    if n == 0 {
        return Err(Error::parameter("n", "must be positive"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::parameter("delta", "must lie in (0, 1]"));
    }
    let radius = m * (n as f64).sqrt();
    let mesh = 2.0 * m * delta * (n as f64).sqrt();
    let mut centers = Vec::new();
    if mesh >= radius {
        centers.push(Complex64::new(0.0, 0.0));
    } else {
        let a = 3f64.sqrt() * mesh;
        let h = a * 3f64.sqrt() / 2.0;
        let reach = radius + mesh;
        let jmax = (reach / h).ceil() as i64;
        for j in -jmax..=jmax {
            let y = j as f64 * h;
            let shift = if j.rem_euclid(2) == 1 { a / 2.0 } else { 0.0 };
            let imax = (reach / a).ceil() as i64 + 1;
            for i in -imax..=imax {
                let z = Complex64::new(i as f64 * a + shift, y);
                let r = z.norm();
                if r <= radius {
                    centers.push(z);
                } else if r <= reach {
                    centers.push(z * (radius / r));
                }
            }
        }
    }
    Ok(DiscNet {
        cardinality: centers.len(),
        centers,
        mesh,
        m,
        delta,
        n,
    })
}

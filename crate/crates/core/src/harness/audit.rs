use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::deloc::{decomposition_bound_audit, neg_second_moment_audit, reduction_audit};
use crate::densela::{
    norm2, real_norm2, realify_matrix, realify_vector, svd, ComplexDenseMatrix, RealMatrix,
};
use crate::error::{Error, Result};
use crate::rng::substream;
use crate::structure::{
    cauchy_binet_audit, lcd_lower_bound, lcd_lower_bound_vector, lcd_matrix2_default,
    lcd_vector_default,
};

pub const AUDIT_SUITES: &[&str] = &["identities", "decomposition", "lcd_bound", "reduction", "cauchy_binet"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSuiteReport {
    pub suite: String,
    pub instances: usize,
    pub violations: usize,
    /// Suite-specific worst statistic (largest gap or smallest margin).
    pub worst: f64,
}

impl AuditSuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn gaussian_complex(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexDenseMatrix {
    ComplexDenseMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

fn gaussian_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let nv = real_norm2(&v);
    v.into_iter().map(|x| x / nv).collect()
}

/// Runs one named suite of deterministic audits on `instances` randomized
/// inputs. Instance `i` uses seed substream `i` of `seed`.
pub fn run_audit_suite(suite: &str, seed: u64, instances: usize) -> Result<AuditSuiteReport> {
    if !AUDIT_SUITES.contains(&suite) {
        return Err(Error::parameter(
            "suite",
            format!("unknown suite {suite}; expected one of {}", AUDIT_SUITES.join(", ")),
        ));
    }
    let mut violations = 0;
    let mut worst: f64 = match suite {
        "identities" | "cauchy_binet" => 0.0,
        _ => f64::INFINITY,
    };
    for i in 0..instances {
        let mut rng = substream(seed, i as u64);
        match suite {
            "identities" => {
                let (rows, cols) = if i % 2 == 0 { (7, 4) } else { (24, 16) };
                let b = gaussian_complex(rows, cols, &mut rng);
                let gap = neg_second_moment_audit(&b)?.gap;
                let z: Vec<Complex64> = (0..cols)
                    .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                    .collect();
                let lhs = realify_vector(&b.matvec(&z)?);
                let rhs = realify_matrix(&b).matvec(&realify_vector(&z))?;
                let hom = lhs.iter().zip(&rhs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                let iso = (real_norm2(&realify_vector(&z)) - norm2(&z)).abs();
                let scale = norm2(&z) * b.frobenius_norm();
                let bad = gap > 1e-8 || hom > 1e-12 * scale.max(1.0) || iso > 1e-12 * norm2(&z).max(1.0);
                violations += bad as usize;
                worst = worst.max(gap);
            }
            "decomposition" => {
                let cols = rng.random_range(1..=24);
                let rows = rng.random_range(cols.max(2)..=24.max(cols + 1));
                let a = gaussian_complex(rows, cols, &mut rng);
                let split_row = rng.random_range(1..rows);
                let values = svd(&a.select_rows(0..split_row))?.right_values().to_vec();
                let (hi, lo) = (values[0], *values.last().unwrap());
                if hi <= lo {
                    continue;
                }
                let t = lo + (hi - lo) * rng.random_range(0.001..0.999);
                let audit = decomposition_bound_audit(&a, split_row, Some(t))?;
                violations += !audit.holds as usize;
                worst = worst.min((audit.s_a - audit.bound) / audit.op_norm);
            }
            "lcd_bound" => {
                let n = rng.random_range(2..=24);
                let l = rng.random_range(0.5..3.0);
                let v = gaussian_unit(n, &mut rng);
                let est = lcd_vector_default(&v, l)?;
                let margin = est.value - (lcd_lower_bound_vector(&v)? - est.grid_step);
                violations += (margin < 0.0) as usize;
                worst = worst.min(margin);
                if i % 5 == 0 {
                    let rows: Vec<Vec<f64>> = (0..2).map(|_| gaussian_unit(n, &mut rng)).collect();
                    let m = RealMatrix::from_rows(&rows)?;
                    let est = lcd_matrix2_default(&m, l)?;
                    let margin = est.value - (lcd_lower_bound(&m)? - est.grid_step);
                    violations += (margin < 0.0) as usize;
                    worst = worst.min(margin);
                }
            }
            "reduction" => {
                let n = 16;
                let a = gaussian_complex(n, n, &mut rng).scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
                let audit = reduction_audit(&a, 0.125, 0.05, 3.0)?;
                violations += !audit.passed() as usize;
                if let Some(s) = audit.smin {
                    worst = worst.min(audit.bound - s);
                }
            }
            "cauchy_binet" => {
                let n = rng.random_range(6..=12);
                let k = rng.random_range(2..=n / 2);
                let z: Vec<Complex64> = {
                    let raw = gaussian_unit(2 * n, &mut rng);
                    (0..n).map(|j| Complex64::new(raw[j], raw[n + j])).collect()
                };
                let audit = cauchy_binet_audit(&z, (k as f64 + 0.5) / n as f64)?;
                violations += !audit.holds as usize;
                worst = worst.max(audit.rhs - audit.lhs);
            }
            _ => unreachable!(),
        }
    }
    Ok(AuditSuiteReport {
        suite: suite.to_string(),
        instances,
        violations,
        worst,
    })
}

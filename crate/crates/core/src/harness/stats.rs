use serde::{Deserialize, Serialize};

use super::record::TrialRecord;
use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub metric: String,
    /// Flag intersected with the threshold event, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_flag: Option<String>,
    pub threshold_grid: Vec<f64>,
    pub counts: Vec<u64>,
    pub empirical_prob: Vec<f64>,
    pub wilson_lo: Vec<f64>,
    pub wilson_hi: Vec<f64>,
    /// Non-failed records used.
    pub n: u64,
    pub n_failed: u64,
}

/// Wilson score interval for `count` successes out of `n` at normal
/// quantile `z`. Returns `(0, 1)` when `n = 0`.
pub fn wilson_interval(count: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = count as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    let lo = if count == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if count == n { 1.0 } else { (center + half).min(1.0) };
    (lo.min(p), hi.max(p))
}

/// Empirical `P(metric ≤ threshold)` per threshold, over non-failed
/// records, with Wilson 95% intervals.
pub fn summarize(records: &[TrialRecord], metric: &str, thresholds: &[f64]) -> Result<SummaryStats> {
    summarize_inner(records, metric, None, thresholds)
}

/// Empirical `P(metric ≤ threshold and flag)` per threshold.
pub fn summarize_joint(
    records: &[TrialRecord],
    metric: &str,
    flag: &str,
    thresholds: &[f64],
) -> Result<SummaryStats> {
    summarize_inner(records, metric, Some(flag), thresholds)
}

fn summarize_inner(
    records: &[TrialRecord],
    metric: &str,
    flag: Option<&str>,
    thresholds: &[f64],
) -> Result<SummaryStats> {
    let mut values = Vec::new();
    let mut n_failed = 0u64;
    for r in records.iter() {
        if r.failed() {
            n_failed += 1;
            continue;
        }
        let v = r.metric(metric).ok_or_else(|| Error::Key(format!("metrics.{metric}")))?;
        let f = match flag {
            Some(name) => r.flag(name).ok_or_else(|| Error::Key(format!("flags.{name}")))?,
            None => true,
        };
        values.push((v, f));
    }
    let n = values.len() as u64;
    let mut counts = Vec::with_capacity(thresholds.len());
    let mut empirical_prob = Vec::with_capacity(thresholds.len());
    let mut wilson_lo = Vec::with_capacity(thresholds.len());
    let mut wilson_hi = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        let k = values.iter().filter(|(v, f)| *f && *v <= t).count() as u64;
        let (lo, hi) = wilson_interval(k, n, Z95);
        counts.push(k);
        empirical_prob.push(if n == 0 { 0.0 } else { k as f64 / n as f64 });
        wilson_lo.push(lo);
        wilson_hi.push(hi);
    }
    Ok(SummaryStats {
        metric: metric.to_string(),
        joint_flag: flag.map(str::to_string),
        threshold_grid: thresholds.to_vec(),
        counts,
        empirical_prob,
        wilson_lo,
        wilson_hi,
        n,
        n_failed,
    })
}

/// Fraction of records with `flag` set among non-failed records, with its
/// Wilson interval: `(count, n, lo, hi)`.
pub fn flag_rate(records: &[TrialRecord], flag: &str) -> Result<(u64, u64, f64, f64)> {
    let mut count = 0;
    let mut n = 0;
    for r in records.iter().filter(|r| !r.failed()) {
        n += 1;
        if r.flag(flag).ok_or_else(|| Error::Key(format!("flags.{flag}")))? {
            count += 1;
        }
    }
    let (lo, hi) = wilson_interval(count, n, Z95);
    Ok((count, n, lo, hi))
}

/// Median of a metric over non-failed records.
pub fn metric_median(records: &[TrialRecord], metric: &str) -> Result<f64> {
    let mut v = records
        .iter()
        .filter(|r| !r.failed())
        .map(|r| r.metric(metric).ok_or_else(|| Error::Key(format!("metrics.{metric}"))))
        .collect::<Result<Vec<f64>>>()?;
    if v.is_empty() {
        return Err(Error::parameter("records", "no successful records"));
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Ok(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}

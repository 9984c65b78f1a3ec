//! Produces `calibration/smin_baseline.toml`: median `s_min/√n` of the
//! block-restricted shifted matrix for each ensemble and shift, plus the
//! calibrated norm-bound constant. The acceptance suite compares fresh runs
//! (different seed) against this file.
//!
//! Pass `--check` to print the values without writing.

use std::collections::BTreeMap;

use num_complex::Complex64;
use nogaps::deloc::smin_experiment;
use nogaps::ensembles::{calibrate_boundedness, EnsembleSpec, EntryDist};
use nogaps::harness::metric_median;
use serde::Serialize;

const N: usize = 64;
const EPS: f64 = 0.125;
const TRIALS: usize = 100;
const SEED: u64 = 0x5EED_CA1B;

#[derive(Serialize)]
struct Case {
    ensemble: String,
    lambda0_re: f64,
    lambda0_im: f64,
    median_smin_scaled: f64,
}

#[derive(Serialize)]
struct Baseline {
    n: usize,
    epsilon: f64,
    trials: usize,
    seed: u64,
    norm_bound_m: BTreeMap<String, f64>,
    case: Vec<Case>,
}

fn main() -> nogaps::Result<()> {
    let check = std::env::args().any(|a| a == "--check");
    let ensembles = [
        ("gaussian", EntryDist::standard_gaussian()),
        ("symmetric_sign", EntryDist::SymmetricSign),
    ];
    let shift = Complex64::new(0.5, 0.5) * (N as f64).sqrt();
    let mut baseline = Baseline {
        n: N,
        epsilon: EPS,
        trials: TRIALS,
        seed: SEED,
        norm_bound_m: BTreeMap::new(),
        case: Vec::new(),
    };
    for (name, dist) in &ensembles {
        for n in [64usize, 128] {
            let m = calibrate_boundedness(&EnsembleSpec::square(n, dist.clone()), 0.99, 30, SEED)?;
            baseline.norm_bound_m.insert(format!("{name}_n{n}"), m);
        }
        let spec = EnsembleSpec::square(N, dist.clone()).with_norm_bound(baseline.norm_bound_m[&format!("{name}_n{N}")]);
        for lambda0 in [Complex64::new(0.0, 0.0), shift] {
            let records = smin_experiment(&spec, EPS, lambda0, TRIALS, SEED)?;
            let median = metric_median(&records, "smin_scaled")?;
            println!("{name:<15} lambda0 = {lambda0:.3}: median s_min/sqrt(n) = {median:.5}");
            baseline.case.push(Case {
                ensemble: name.to_string(),
                lambda0_re: lambda0.re,
                lambda0_im: lambda0.im,
                median_smin_scaled: median,
            });
        }
    }
    println!("norm bounds: {:?}", baseline.norm_bound_m);
    if !check {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/calibration/smin_baseline.toml");
        let body = toml::to_string(&baseline).expect("baseline serializes");
        let text = format!("# Generated by `cargo run --example calibrate_smin_baseline`.\n{body}");
        std::fs::write(path, text).map_err(|e| nogaps::Error::Io {
            path: path.into(),
            source: e,
        })?;
        println!("wrote {path}");
    }
    Ok(())
}

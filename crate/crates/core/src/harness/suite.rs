use std::collections::BTreeMap;

use num_complex::Complex64;

use super::config::{ExperimentConfig, ExperimentKind};
use super::record::{run_trials, TrialOutcome, TrialRecord};
use super::stats::{summarize, summarize_joint, SummaryStats};
use crate::deloc::{
    audits_experiment, deloc_experiment, distance_experiment, kernel_lcd_experiment, smin_experiment,
    KernelLcdParams,
};
use crate::densela::real_norm2;
use crate::ensembles::{sample_with, EnsembleSpec};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::smallball::{bound_domination_audit, BoundParams, C_GRID_STEP};

/// Validates `config`, then runs its experiment. Pure apart from the worker
/// pool: the records depend only on the configuration.
pub fn run_suite(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::config("workers", e.to_string()))?
            .install(|| dispatch(config)),
        None => dispatch(config),
    }
}

fn dispatch(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    let spec = &cfg.ensemble;
    let (trials, seed) = (cfg.trials, cfg.base_seed);
    match cfg.experiment {
        ExperimentKind::DelocProfile => {
            deloc_experiment(spec, cfg.real("epsilon")?, cfg.real("delta")?, trials, seed)
        }
        ExperimentKind::Smin => {
            let lambda0 = Complex64::new(cfg.real_or("lambda0_re", 0.0)?, cfg.real_or("lambda0_im", 0.0)?);
            smin_experiment(spec, cfg.real("epsilon")?, lambda0, trials, seed)
        }
        ExperimentKind::Distance => {
            let z = cfg.z_dist.clone().unwrap_or_else(|| spec.entry_dist.clone());
            distance_experiment(spec, &z, cfg.real("epsilon")?, trials, seed)
        }
        ExperimentKind::KernelLcd => {
            let defaults = KernelLcdParams::default();
            let n_starts = cfg.real_or("n_starts", defaults.n_starts as f64)?;
            if !(n_starts >= 0.0 && n_starts.fract() == 0.0) {
                return Err(Error::config("parameters.n_starts", "must be a nonnegative integer"));
            }
            let params = KernelLcdParams {
                c: cfg.real_or("c", defaults.c)?,
                c0: cfg.real_or("c0", defaults.c0)?,
                n_starts: n_starts as usize,
            };
            kernel_lcd_experiment(spec, cfg.real("epsilon")?, &params, trials, seed)
        }
        ExperimentKind::Audits => {
            audits_experiment(spec, cfg.real("epsilon")?, cfg.real("delta")?, trials, seed)
        }
        ExperimentKind::SmallballSuite => smallball_suite(
            spec,
            &BoundParams::new(cfg.real("L")?, cfg.real("C")?, spec.dist_params.p, spec.dist_params.k),
            &cfg.grid("t_grid")?,
            trials,
            seed,
        ),
    }
}

/// Per trial: a unit weight vector from one row of the ensemble, exact
/// concentration of its symmetric-sign sum on `t_grid`, and the bound for
/// sums at `params.C`.
///
/// Metrics: `lcd`, `worst_ratio` (largest exact / shape ratio, i.e. the
/// smallest admissible constant). Flags: `dominated`.
pub fn smallball_suite(
    spec: &EnsembleSpec,
    params: &BoundParams,
    t_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    params.validate()?;
    let mut row_spec = spec.clone();
    row_spec.n_rows = 1;
    row_spec.dependency = Default::default();
    row_spec.fixed_imag = None;
    row_spec.validate()?;
    Ok(run_trials(trials, seed, |_, s| {
        let a = sample_with(&row_spec, &mut rng_from_seed(s))?;
        let mut w: Vec<f64> = a.row(0).iter().map(|z| z.re).collect();
        let nw = real_norm2(&w);
        if nw == 0.0 {
            return Err(Error::Precondition("sampled weight vector is zero".into()));
        }
        for x in w.iter_mut() {
            *x /= nw;
        }
        let audit = bound_domination_audit(std::slice::from_ref(&w), params, t_grid)?;
        Ok(TrialOutcome::new()
            .metric("lcd", audit.lcds[0])
            .metric("worst_ratio", audit.worst_ratio)
            .flag("dominated", audit.violations == 0))
    }))
}

/// Summaries written alongside a run: the experiment's headline metric over
/// its grid, joint with the boundedness flag where one is recorded.
pub fn default_summaries(config: &ExperimentConfig, records: &[TrialRecord]) -> Result<Vec<SummaryStats>> {
    if records.iter().all(TrialRecord::failed) {
        return Ok(Vec::new());
    }
    let tau = config.grid_or_empty("tau_grid")?;
    let grid = |fallback: &[f64]| if tau.is_empty() { fallback.to_vec() } else { tau.clone() };
    Ok(match config.experiment {
        ExperimentKind::DelocProfile => vec![summarize_joint(
            records,
            "min_localization",
            "boundedness_held",
            &grid(&[config.real("delta")?]),
        )?],
        ExperimentKind::Smin => vec![
            summarize(records, "smin_scaled", &grid(&[1e-3, 1e-2, 1e-1]))?,
            summarize_joint(records, "smin_scaled", "boundedness_held", &grid(&[1e-3, 1e-2, 1e-1]))?,
        ],
        ExperimentKind::Distance => vec![
            summarize(records, "dist_scaled", &grid(&[1e-2, 1e-1, 1.0]))?,
            summarize_joint(records, "dist_scaled", "boundedness_held", &grid(&[1e-2, 1e-1, 1.0]))?,
        ],
        ExperimentKind::KernelLcd => {
            let floor = records.iter().find_map(|r| r.metric("floor")).unwrap_or(0.0);
            vec![summarize(records, "lcd_upper", &grid(&[floor]))?]
        }
        ExperimentKind::Audits => vec![summarize(records, "nsm_gap", &grid(&[1e-8]))?],
        ExperimentKind::SmallballSuite => {
            vec![summarize(records, "worst_ratio", &grid(&[config.real("C")?]))?]
        }
    })
}

/// Constants recorded in the report sidecar: `M` always; for the small-ball
/// suite also the smallest grid constant `C` dominating every trial.
pub fn fitted_constants(config: &ExperimentConfig, records: &[TrialRecord]) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::from([("M".to_string(), config.ensemble.norm_bound_m)]);
    if config.experiment == ExperimentKind::SmallballSuite {
        let worst = records
            .iter()
            .filter_map(|r| r.metric("worst_ratio"))
            .fold(0.0, f64::max);
        out.insert("C".to_string(), (worst / C_GRID_STEP).ceil().max(1.0) * C_GRID_STEP);
    }
    out
}

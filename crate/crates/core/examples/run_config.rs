//! Run an experiment config end to end and write its reports.
//!
//! ```text
//! cargo run -p nogaps --example run_config -- configs/smin.toml [out-dir]
//! ```

use std::path::PathBuf;

use nogaps::harness::{
    default_summaries, emit_report, fitted_constants, run_suite, ExperimentConfig, ReportFormat,
    ReportMeta,
};

fn main() -> nogaps::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args.next().unwrap_or_else(|| "configs/smin.toml".into());
    let out_dir = PathBuf::from(args.next().unwrap_or_else(|| "out".into()));

    let cfg = ExperimentConfig::from_path(&config)?;
    let records = run_suite(&cfg)?;
    let summaries = default_summaries(&cfg, &records)?;
    let consts = fitted_constants(&cfg, &records);
    let meta = ReportMeta::new(&cfg, &records, consts)?;

    let stem = PathBuf::from(&cfg.output_path);
    let base = out_dir.join(stem.file_name().unwrap_or(stem.as_os_str()));
    let paths = emit_report(&records, &summaries, &[ReportFormat::Jsonl, ReportFormat::Csv], &base, &meta)?;

    println!("{} trials of {} ({} failed)", records.len(), cfg.experiment.name(), meta.n_failed);
    for s in &summaries {
        let joint = s.joint_flag.as_deref().map(|f| format!(" and {f}")).unwrap_or_default();
        for (i, tau) in s.threshold_grid.iter().enumerate() {
            println!(
                "  P({} <= {tau}{joint}) = {}/{}  [{:.4}, {:.4}]",
                s.metric, s.counts[i], s.n, s.wilson_lo[i], s.wilson_hi[i]
            );
        }
    }
    println!("wrote {}", paths.meta.display());
    Ok(())
}

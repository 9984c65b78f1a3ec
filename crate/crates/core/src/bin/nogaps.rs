use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nogaps::deloc::disc_net;
use nogaps::harness::{
    default_summaries, emit_report, fitted_constants, read_jsonl, run_audit_suite, run_suite,
    summarize, summarize_joint, ExperimentConfig, ReportFormat, ReportMeta, AUDIT_SUITES,
};
use nogaps::structure::lcd_vector_default;
use nogaps::Error;

#[derive(Parser)]
#[command(name = "nogaps", version, about = "Delocalization and invertibility experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config and write its reports.
    Run {
        config: PathBuf,
        /// Overrides `output_path` from the config.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Exit with status 3 when more than this fraction of trials fail.
        #[arg(long, default_value_t = 0.05)]
        max_failed_fraction: f64,
    },
    /// Empirical P(metric <= threshold) with Wilson 95% intervals.
    Summarize {
        records: PathBuf,
        #[arg(long)]
        metric: String,
        /// Comma-separated grid, e.g. `0.001,0.01,0.1`.
        #[arg(long, value_delimiter = ',', required = true)]
        thresholds: Vec<f64>,
        /// Intersect with this flag.
        #[arg(long)]
        flag: Option<String>,
    },
    /// Run a deterministic audit suite; `all` runs every suite.
    Audit {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        instances: usize,
    },
    /// LCD of a real vector read from a file of whitespace- or
    /// comma-separated numbers.
    Lcd {
        #[arg(long)]
        vector: PathBuf,
        #[arg(long = "L")]
        l: f64,
    },
    /// Hexagonal net of the disc of radius M√n.
    Net {
        #[arg(long = "M")]
        m: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 10_000)]
        probes: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> nogaps::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Numeric {
        message: e.to_string(),
        residual: f64::NAN,
    })?;
    println!("{text}");
    Ok(())
}

fn execute(command: Command) -> nogaps::Result<ExitCode> {
    match command {
        Command::Run {
            config,
            output,
            max_failed_fraction,
        } => {
            let cfg = ExperimentConfig::from_path(&config).map_err(|e| match e {
                Error::Io { .. } => Error::Config {
                    path: config.display().to_string(),
                    reason: e.to_string(),
                },
                other => other,
            })?;
            let records = run_suite(&cfg)?;
            let summaries = default_summaries(&cfg, &records)?;
            let meta = ReportMeta::new(&cfg, &records, fitted_constants(&cfg, &records))?;
            let base = output.unwrap_or_else(|| PathBuf::from(&cfg.output_path));
            let paths = emit_report(&records, &summaries, &[ReportFormat::Jsonl, ReportFormat::Csv], &base, &meta)?;
            let failed = meta.n_failed as f64 / records.len().max(1) as f64;
            println!(
                "{}: {} trials, {} failed; wrote {}",
                meta.experiment,
                records.len(),
                meta.n_failed,
                paths.jsonl.as_ref().unwrap().display()
            );
            for s in &summaries {
                let label = match &s.joint_flag {
                    Some(f) => format!("{} & {f}", s.metric),
                    None => s.metric.clone(),
                };
                for (i, t) in s.threshold_grid.iter().enumerate() {
                    println!(
                        "  P({label} <= {t}) = {:.4} [{:.4}, {:.4}]",
                        s.empirical_prob[i], s.wilson_lo[i], s.wilson_hi[i]
                    );
                }
            }
            if failed > max_failed_fraction {
                eprintln!("failed fraction {failed:.3} exceeds {max_failed_fraction}");
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Summarize {
            records,
            metric,
            thresholds,
            flag,
        } => {
            let recs = read_jsonl(&records)?;
            let stats = match flag {
                Some(f) => summarize_joint(&recs, &metric, &f, &thresholds)?,
                None => summarize(&recs, &metric, &thresholds)?,
            };
            print_json(&stats)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Audit { suite, seed, instances } => {
            let suites: Vec<&str> = if suite == "all" {
                AUDIT_SUITES.to_vec()
            } else {
                vec![suite.as_str()]
            };
            let mut ok = true;
            for s in suites {
                let report = run_audit_suite(s, seed, instances)?;
                println!(
                    "[{}] {}: {} instances, {} violations, worst {:e}",
                    if report.passed() { "PASS" } else { "FAIL" },
                    report.suite,
                    report.instances,
                    report.violations,
                    report.worst
                );
                ok &= report.passed();
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(3) })
        }
        Command::Lcd { vector, l } => {
            let text = std::fs::read_to_string(&vector).map_err(|e| Error::Io {
                path: vector.clone(),
                source: e,
            })?;
            let v = text
                .split(|c: char| c.is_whitespace() || c == ',' || c == '[' || c == ']')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>().map_err(|_| Error::Config {
                        path: vector.display().to_string(),
                        reason: format!("not a number: {s}"),
                    })
                })
                .collect::<nogaps::Result<Vec<f64>>>()?;
            print_json(&lcd_vector_default(&v, l)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Net { m, n, delta, probes } => {
            let net = disc_net(m, n, delta)?;
            let failures = net.covering_failures(probes, 0);
            print_json(&serde_json::json!({
                "cardinality": net.cardinality,
                "cardinality_limit": (5.0 / (delta * delta)).ceil(),
                "mesh": net.mesh,
                "radius": net.radius(),
                "probes": probes,
                "covering_failures": failures,
            }))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

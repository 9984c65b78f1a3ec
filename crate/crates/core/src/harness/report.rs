use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::record::TrialRecord;
use super::stats::SummaryStats;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Jsonl,
    Csv,
}

/// Contents of the `.meta.toml` sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    /// SHA-256 of the canonical JSON form of the configuration.
    pub config_hash: String,
    pub code_version: String,
    pub experiment: String,
    pub trials: u64,
    pub n_failed: u64,
    pub base_seed: u64,
    pub fitted_constants: BTreeMap<String, f64>,
    #[serde(default)]
    pub summaries: Vec<SummaryStats>,
}

impl ReportMeta {
    pub fn new(config: &ExperimentConfig, records: &[TrialRecord], fitted_constants: BTreeMap<String, f64>) -> Result<Self> {
        Ok(Self {
            config_hash: config_hash(config)?,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            experiment: config.experiment.name().to_string(),
            trials: records.len() as u64,
            n_failed: records.iter().filter(|r| r.failed()).count() as u64,
            base_seed: config.base_seed,
            fitted_constants,
            summaries: Vec::new(),
        })
    }
}

pub fn config_hash(config: &ExperimentConfig) -> Result<String> {
    let canonical = serde_json::to_string(config).map_err(|e| Error::config("", e.to_string()))?;
    let digest = Sha256::digest(canonical.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Files written by [`emit_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportPaths {
    pub jsonl: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub meta: PathBuf,
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes `<base>.jsonl` and/or `<base>.csv` plus the `<base>.meta.toml`
/// sidecar holding `meta` with `summaries` attached.
pub fn emit_report(
    records: &[TrialRecord],
    summaries: &[SummaryStats],
    formats: &[ReportFormat],
    base: &Path,
    meta: &ReportMeta,
) -> Result<ReportPaths> {
    if let Some(dir) = base.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut paths = ReportPaths {
        jsonl: None,
        csv: None,
        meta: with_suffix(base, ".meta.toml"),
    };
    if formats.contains(&ReportFormat::Jsonl) {
        let p = with_suffix(base, ".jsonl");
        write_jsonl(records, &p)?;
        paths.jsonl = Some(p);
    }
    if formats.contains(&ReportFormat::Csv) {
        let p = with_suffix(base, ".csv");
        write_csv(records, &p)?;
        paths.csv = Some(p);
    }
    let mut meta = meta.clone();
    meta.summaries = summaries.to_vec();
    let text = toml::to_string(&meta).map_err(|e| Error::config("meta", e.to_string()))?;
    std::fs::write(&paths.meta, text).map_err(|e| Error::io(&paths.meta, e))?;
    Ok(paths)
}

/// One JSON object per line, LF-terminated.
pub fn write_jsonl(records: &[TrialRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::config("record", e.to_string()))?;
        w.write_all(line.as_bytes())
            .and_then(|_| w.write_all(b"\n"))
            .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn records_to_jsonl(records: &[TrialRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).map_err(|e| Error::config("record", e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn read_jsonl(path: &Path) -> Result<Vec<TrialRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| Error::config(format!("line {}", i + 1), e.to_string()))?,
        );
    }
    Ok(out)
}

/// Column names: `trial_index`, `seed`, `wall_time_ms`, then the union of
/// metric keys and flag keys, each sorted.
pub fn csv_header(records: &[TrialRecord]) -> Vec<String> {
    let metrics: BTreeSet<&String> = records.iter().flat_map(|r| r.metrics.keys()).collect();
    let flags: BTreeSet<&String> = records
        .iter()
        .flat_map(|r| r.flags.keys())
        .filter(|k| !metrics.contains(k))
        .collect();
    ["trial_index", "seed", "wall_time_ms"]
        .into_iter()
        .map(String::from)
        .chain(metrics.into_iter().cloned())
        .chain(flags.into_iter().cloned())
        .collect()
}

/// RFC 4180 CSV; absent values are empty cells.
pub fn write_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    let header = csv_header(records);
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    w.write_record(&header).map_err(|e| csv_io(path, e))?;
    for r in records {
        let mut row = vec![r.trial_index.to_string(), r.seed.to_string(), r.wall_time_ms.to_string()];
        for key in &header[3..] {
            row.push(match (r.metrics.get(key), r.flags.get(key)) {
                (Some(v), _) => v.to_string(),
                (None, Some(b)) => b.to_string(),
                (None, None) => String::new(),
            });
        }
        w.write_record(&row).map_err(|e| csv_io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e.to_string()))
}

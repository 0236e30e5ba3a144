//! CSV tables and the run manifest.
//!
//! Tables are long-format CSV with fixed headers. Numbers use the shortest
//! round-trip representation, so output does not depend on locale.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::measures::MeasureScore;
use crate::noise::NoiseTarget;
use crate::relations::Relation;
use crate::suite::{CellFailure, EquitabilityReport, ExperimentConfig, ScoreRow, SnrRow};
use crate::testing::PowerEstimate;

pub const DATASET_HEADER: [&str; 7] = [
    "x",
    "y",
    "relation",
    "noise_kind",
    "target_ratio",
    "achieved_ratio",
    "seed",
];
pub const SCORES_HEADER: [&str; 5] = ["measure", "relation", "rep", "score", "achieved_ratio"];
pub const SPREAD_HEADER: [&str; 4] = ["measure", "spread_sd", "spread_range", "subset_sd"];
pub const POWER_HEADER: [&str; 7] = [
    "measure",
    "relation",
    "noise_level",
    "power",
    "ci_low",
    "ci_high",
    "reps_completed",
];
pub const SNR_HEADER: [&str; 3] = ["relation", "rep", "achieved_ratio"];
pub const MEASURE_SCORE_HEADER: [&str; 4] = ["measure", "value", "n", "params"];

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn table<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    finish(w)
}

pub fn dataset_csv(
    x: &[f64],
    y: &[f64],
    relation: Relation,
    noise: &NoiseTarget,
    achieved_ratio: f64,
    seed: u64,
) -> Result<Vec<u8>> {
    table(
        &DATASET_HEADER,
        x.iter().zip(y).map(|(a, b)| {
            [
                a.to_string(),
                b.to_string(),
                relation.id().to_string(),
                noise.kind().to_string(),
                noise.ratio().to_string(),
                achieved_ratio.to_string(),
                seed.to_string(),
            ]
        }),
    )
}

pub fn scores_csv(rows: &[ScoreRow]) -> Result<Vec<u8>> {
    table(
        &SCORES_HEADER,
        rows.iter().map(|r| {
            [
                r.measure.clone(),
                r.relation.id().to_string(),
                r.rep.to_string(),
                r.score.to_string(),
                r.achieved_ratio.to_string(),
            ]
        }),
    )
}

pub fn snr_csv(rows: &[SnrRow]) -> Result<Vec<u8>> {
    table(
        &SNR_HEADER,
        rows.iter().map(|r| {
            [
                r.relation.id().to_string(),
                r.rep.to_string(),
                r.achieved_ratio.to_string(),
            ]
        }),
    )
}

pub fn spread_csv(report: &EquitabilityReport) -> Result<Vec<u8>> {
    table(
        &SPREAD_HEADER,
        report.measures.iter().map(|m| {
            [
                m.measure.clone(),
                m.spread_sd.to_string(),
                m.spread_range.to_string(),
                m.subset_sd.to_string(),
            ]
        }),
    )
}

pub fn power_csv(estimates: &[PowerEstimate]) -> Result<Vec<u8>> {
    table(
        &POWER_HEADER,
        estimates.iter().map(|e| {
            [
                e.measure.clone(),
                e.relation.id().to_string(),
                e.noise.ratio().to_string(),
                e.power.to_string(),
                e.ci_low.to_string(),
                e.ci_high.to_string(),
                e.reps_completed.to_string(),
            ]
        }),
    )
}

pub fn measure_scores_csv(scores: &[MeasureScore]) -> Result<Vec<u8>> {
    table(
        &MEASURE_SCORE_HEADER,
        scores.iter().map(|s| {
            [
                s.measure.id().to_string(),
                s.value.to_string(),
                s.n.to_string(),
                s.measure.params_string(),
            ]
        }),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFile {
    pub name: String,
    pub sha256: String,
}

/// Provenance of one `equitability` or `power` run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    /// Hash of command, config and version; the same inputs give the same id.
    pub run_id: String,
    pub command: String,
    pub artifact_version: String,
    pub base_seed: u64,
    pub config: ExperimentConfig,
    /// Unix seconds.
    pub started_at: u64,
    pub finished_at: u64,
    pub outputs: Vec<OutputFile>,
    pub failures: Vec<CellFailure>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl RunManifest {
    pub fn new(command: &str, config: &ExperimentConfig, started_at: u64) -> Result<Self> {
        let snapshot = serde_json::to_string(config).map_err(|e| Error::Io(e.to_string()))?;
        let version = env!("CARGO_PKG_VERSION");
        let id = sha256_hex(format!("{command}\n{version}\n{snapshot}").as_bytes());
        Ok(RunManifest {
            run_id: id[..16].to_string(),
            command: command.to_string(),
            artifact_version: version.to_string(),
            base_seed: config.base_seed,
            config: config.clone(),
            started_at,
            finished_at: started_at,
            outputs: Vec::new(),
            failures: Vec::new(),
        })
    }

    pub fn add_output(&mut self, name: &str, bytes: &[u8]) {
        self.outputs.push(OutputFile {
            name: name.to_string(),
            sha256: sha256_hex(bytes),
        });
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut v = serde_json::to_vec_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        v.push(b'\n');
        Ok(v)
    }
}

/// Writes every file into `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, files: &[(&str, &[u8])]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, bytes) in files {
        let mut f = std::fs::File::create(dir.join(name))?;
        f.write_all(bytes)?;
    }
    Ok(())
}

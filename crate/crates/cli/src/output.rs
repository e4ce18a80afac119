//! Output documents: JSON result/sample documents with embedded manifests,
//! CSV sweep tables, and manifest sidecars.
//!
//! CSV floats are printed with 17 significant digits so every double
//! round-trips exactly; JSON floats use serde_json's shortest exact
//! representation, which round-trips as well.

use crate::manifest::RunManifest;
use crate::CliError;
use ratebound::sampler::SampleReport;
use ratebound::solver::SolveResult;
use ratebound::sweep::SweepRecord;
use ratebound::types::TaskSpec;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// Fixed sweep CSV header; order is load-bearing for downstream tooling.
pub const SWEEP_CSV_HEADER: &str = "beta,inv_beta,expected_utility,mutual_information_bits,h_marginal_bits,h_conditional_bits,objective,iterations,converged";

#[derive(Serialize)]
pub struct SolveDocument {
    pub schema_version: u32,
    pub kind: &'static str,
    pub actions: Vec<String>,
    pub observations: Vec<String>,
    pub beta: f64,
    pub converged: bool,
    pub iterations: usize,
    pub policy: Vec<Vec<f64>>,
    pub prior: Vec<f64>,
    pub objective: f64,
    pub expected_utility: f64,
    pub mutual_information_bits: f64,
    pub h_marginal_bits: f64,
    pub h_conditional_bits: f64,
    pub manifest: RunManifest,
}

pub fn solve_document(
    task: &TaskSpec,
    beta: f64,
    result: &SolveResult,
    manifest: RunManifest,
) -> SolveDocument {
    SolveDocument {
        schema_version: SCHEMA_VERSION,
        kind: "solve_result",
        actions: task.actions().labels().to_vec(),
        observations: task.observations().labels().to_vec(),
        beta,
        converged: result.converged,
        iterations: result.iterations,
        policy: result
            .policy
            .rows()
            .iter()
            .map(|row| row.as_slice().to_vec())
            .collect(),
        prior: result.prior.as_slice().to_vec(),
        objective: result.objective,
        expected_utility: result.expected_utility,
        mutual_information_bits: result.mutual_information_bits,
        h_marginal_bits: result.h_marginal_bits,
        h_conditional_bits: result.h_conditional_bits,
        manifest,
    }
}

#[derive(Serialize)]
pub struct SampleDocument {
    pub schema_version: u32,
    pub kind: &'static str,
    pub beta: f64,
    /// Observation label, or `prior`.
    pub distribution: String,
    pub rng_algorithm: String,
    pub seed: u64,
    pub samples: Vec<String>,
    pub counts: BTreeMap<String, u64>,
    pub probabilities: BTreeMap<String, f64>,
    pub manifest: RunManifest,
}

pub fn sample_document(
    beta: f64,
    distribution: &str,
    report: &SampleReport,
    manifest: RunManifest,
) -> SampleDocument {
    SampleDocument {
        schema_version: SCHEMA_VERSION,
        kind: "sample_report",
        beta,
        distribution: distribution.to_string(),
        rng_algorithm: report.rng_algorithm.to_string(),
        seed: report.seed,
        samples: report.samples.clone(),
        counts: report.distinct.clone(),
        probabilities: report.source_probabilities.clone(),
        manifest,
    }
}

pub fn write_json<T: Serialize>(path: &Path, document: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(document)
        .map_err(|err| CliError::input(format!("serializing document: {err}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|err| CliError::io(err, "writing document"))
}

/// 17 significant digits: enough for exact f64 round-trips.
fn fmt_float(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn write_sweep_csv(path: &Path, records: &[SweepRecord]) -> Result<(), CliError> {
    let mut text = String::with_capacity(records.len() * 160 + 128);
    text.push_str(SWEEP_CSV_HEADER);
    text.push('\n');
    for r in records {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt_float(r.beta),
            fmt_float(r.inv_beta),
            fmt_float(r.expected_utility),
            fmt_float(r.mutual_information_bits),
            fmt_float(r.h_marginal_bits),
            fmt_float(r.h_conditional_bits),
            fmt_float(r.objective),
            r.iterations,
            r.converged,
        ));
    }
    std::fs::write(path, text).map_err(|err| CliError::io(err, "writing sweep csv"))
}

pub fn write_rate_utility_csv(path: &Path, curve: &[(f64, f64)]) -> Result<(), CliError> {
    let mut text = String::with_capacity(curve.len() * 48 + 32);
    text.push_str("expected_utility,rate_bits\n");
    for (utility, rate) in curve {
        text.push_str(&format!("{},{}\n", fmt_float(*utility), fmt_float(*rate)));
    }
    std::fs::write(path, text).map_err(|err| CliError::io(err, "writing rate-utility csv"))
}

/// Writes `<out>.manifest.json` next to a non-JSON artifact.
pub fn write_manifest_sidecar(artifact: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let mut sidecar = artifact.as_os_str().to_owned();
    sidecar.push(".manifest.json");
    write_json(Path::new(&sidecar), manifest)
}

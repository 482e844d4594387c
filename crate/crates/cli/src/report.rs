//! The gate experiment report: a structured TOML document that is
//! byte-deterministic for a given config (timings stay on stdout) and
//! embeds the config it was produced from.

use serde::Serialize;

use kdvrc_core::elm::TrainedModel;
use kdvrc_core::reservoir::{CaseRun, ResponseMatrix};

use crate::config::case_label;
use crate::error::{CliError, Result};
use crate::formats::sig10;

#[derive(Debug, Serialize)]
pub struct ExperimentReport {
    pub gate: String,
    /// "ok" or "singular-response-matrix".
    pub status: String,
    /// Correct decodings over cases, e.g. "4/4".
    pub accuracy: String,
    pub cases: Vec<String>,
    pub detection_point: f64,
    pub detection_times: Vec<f64>,
    pub response: ResponseSection,
    pub training: Option<TrainingSection>,
    pub outcomes: Vec<CaseOutcome>,
    pub diagnostics: Vec<DriftRow>,
    /// Literal text of the config this report was produced from.
    pub config_echo: String,
}

#[derive(Debug, Serialize)]
pub struct ResponseSection {
    /// Rows of the response matrix (one per detection time), 10 significant digits.
    pub matrix: Vec<Vec<f64>>,
    pub determinant: Option<f64>,
    pub condition_number: f64,
}

#[derive(Debug, Serialize)]
pub struct TrainingSection {
    pub mode: String,
    pub residual: f64,
    pub tolerance: f64,
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct CaseOutcome {
    pub case: String,
    pub output: Vec<f64>,
    pub decoded: bool,
    pub expected: bool,
    pub correct: bool,
    pub confidence: f64,
}

#[derive(Debug, Serialize)]
pub struct DriftRow {
    pub case: String,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

impl ExperimentReport {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| CliError::Config(format!("cannot serialize report: {e}")))
    }
}

pub fn response_section(x: &ResponseMatrix) -> ResponseSection {
    ResponseSection {
        matrix: (0..x.n_times())
            .map(|i| (0..x.n_cases()).map(|j| sig10(x.entries[(i, j)])).collect())
            .collect(),
        determinant: x.determinant().map(sig10),
        condition_number: sig10(x.condition_number()),
    }
}

pub fn training_section(model: &TrainedModel) -> TrainingSection {
    TrainingSection {
        mode: match model.mode {
            kdvrc_core::elm::TrainingMode::Exact => "exact".into(),
            kdvrc_core::elm::TrainingMode::Pseudoinverse => "pseudoinverse".into(),
        },
        residual: sig10(model.residual),
        tolerance: model.training_tolerance,
        weights: (0..model.w_out.nrows())
            .map(|i| model.w_out.row(i).iter().map(|&v| sig10(v)).collect())
            .collect(),
        bias: model.bias.iter().map(|&v| sig10(v)).collect(),
    }
}

pub fn drift_rows(cases: &[Vec<bool>], runs: &[CaseRun]) -> Vec<DriftRow> {
    cases
        .iter()
        .zip(runs)
        .map(|(case, run)| DriftRow {
            case: case_label(case),
            i1: sig10(run.invariant_drift[0]),
            i2: sig10(run.invariant_drift[1]),
            i3: sig10(run.invariant_drift[2]),
        })
        .collect()
}

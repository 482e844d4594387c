//! File formats: trajectory and response CSV, and the trained-model
//! document. CSV numerics carry 10 significant digits; the model file
//! keeps full precision so a round trip is bit-exact.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use kdvrc_core::elm::{TrainedModel, TrainingMode, DEFAULT_TRAINING_TOLERANCE};
use kdvrc_core::reservoir::ResponseMatrix;
use kdvrc_core::solver::Trajectory;

use crate::config::case_label;
use crate::error::{CliError, Result};

/// 10-significant-digit rendering used in CSV files and reports.
pub fn fmt10(x: f64) -> String {
    format!("{:.9e}", x)
}

/// Round to 10 significant digits (for report numerics).
pub fn sig10(x: f64) -> f64 {
    if x.is_finite() {
        fmt10(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

/// Trajectory CSV: header row of grid x-coordinates, one row per snapshot
/// prefixed by its time.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::new();
    if let Some(first) = traj.snapshots().first() {
        out.push('t');
        for x in first.grid().points() {
            out.push(',');
            out.push_str(&fmt10(x));
        }
        out.push('\n');
    }
    for snap in traj.snapshots() {
        out.push_str(&fmt10(snap.time()));
        for v in snap.values() {
            out.push(',');
            out.push_str(&fmt10(*v));
        }
        out.push('\n');
    }
    out
}

/// Response-matrix CSV: one column per case (named by its bit string),
/// one row per detection time.
pub fn response_csv(x: &ResponseMatrix, times: &[f64]) -> String {
    let mut out = String::from("t");
    for case in &x.cases {
        out.push_str(",case_");
        out.push_str(&case_label(case));
    }
    out.push('\n');
    for (i, &t) in times.iter().enumerate() {
        out.push_str(&fmt10(t));
        for j in 0..x.n_cases() {
            out.push(',');
            out.push_str(&fmt10(x.entries[(i, j)]));
        }
        out.push('\n');
    }
    out
}

/// On-disk form of a trained model. Floats serialize in shortest
/// round-trip form, so load(save(m)) == m bit for bit.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub mode: String,
    pub training_tolerance: f64,
    pub condition_number: f64,
    pub residual: f64,
    pub n_outputs: usize,
    pub n_features: usize,
    /// Row-major weight rows.
    pub w_out: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl ModelFile {
    pub fn from_model(m: &TrainedModel) -> Self {
        ModelFile {
            mode: match m.mode {
                TrainingMode::Exact => "exact".into(),
                TrainingMode::Pseudoinverse => "pseudoinverse".into(),
            },
            training_tolerance: m.training_tolerance,
            condition_number: m.condition_number,
            residual: m.residual,
            n_outputs: m.w_out.nrows(),
            n_features: m.w_out.ncols(),
            w_out: (0..m.w_out.nrows())
                .map(|i| m.w_out.row(i).iter().copied().collect())
                .collect(),
            bias: m.bias.iter().copied().collect(),
        }
    }

    pub fn into_model(self) -> Result<TrainedModel> {
        let mode = match self.mode.as_str() {
            "exact" => TrainingMode::Exact,
            "pseudoinverse" => TrainingMode::Pseudoinverse,
            other => {
                return Err(CliError::Config(format!(
                    "unknown training mode '{other}' in model file"
                )))
            }
        };
        if self.w_out.len() != self.n_outputs
            || self.w_out.iter().any(|r| r.len() != self.n_features)
            || self.bias.len() != self.n_outputs
        {
            return Err(CliError::Config("model file shape fields disagree".into()));
        }
        let w_out = DMatrix::from_fn(self.n_outputs, self.n_features, |i, j| self.w_out[i][j]);
        Ok(TrainedModel {
            w_out,
            bias: DVector::from_vec(self.bias),
            training_tolerance: self.training_tolerance,
            mode,
            condition_number: self.condition_number,
            residual: self.residual,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = toml::to_string_pretty(self)
            .map_err(|e| CliError::Config(format!("cannot serialize model: {e}")))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        toml::from_str(&raw).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Build the full output text, then write it in one call so a failing
/// command never leaves a partial file behind.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

/// Default tolerance re-exported for model files assembled by hand.
pub fn default_tolerance() -> f64 {
    DEFAULT_TRAINING_TOLERANCE
}

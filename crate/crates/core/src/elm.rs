//! Training and inference of the linear readout layer.
//!
//! In the exact-learning regime (as many detection times as training
//! cases, invertible response matrix) the weights come from one direct
//! solve, W = Y X^-1. The general trainer uses the Moore-Penrose
//! pseudoinverse and supports a bias vector and arbitrary shapes.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::reservoir::ResponseMatrix;

/// Default training tolerance for the fit on the training set.
pub const DEFAULT_TRAINING_TOLERANCE: f64 = 1e-3;

/// Condition number above which exact learning proceeds with a warning.
pub const CONDITION_WARN: f64 = 1e8;

/// Condition number above which the direct solve is refused.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Relative singular-value cutoff of the pseudoinverse.
pub const PINV_CUTOFF: f64 = 1e-12;

/// Target outputs, one column per training case.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetMatrix {
    pub entries: DMatrix<f64>,
}

impl TargetMatrix {
    pub fn new(entries: DMatrix<f64>) -> Self {
        TargetMatrix { entries }
    }

    /// Boolean targets on the canonical basis of R^2: column (1, 0) means
    /// false, (0, 1) means true.
    pub fn boolean_gate(outputs: &[bool]) -> Self {
        let entries = DMatrix::from_fn(2, outputs.len(), |i, j| {
            let hot = usize::from(outputs[j]);
            if i == hot {
                1.0
            } else {
                0.0
            }
        });
        TargetMatrix { entries }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainingMode {
    Exact,
    Pseudoinverse,
}

/// Immutable trained readout: y = W_out x + b.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub w_out: DMatrix<f64>,
    pub bias: DVector<f64>,
    pub training_tolerance: f64,
    pub mode: TrainingMode,
    /// Spectral condition number of the response matrix used in training.
    pub condition_number: f64,
    /// Max-norm of W X + b 1^T - Y over the training set.
    pub residual: f64,
}

fn condition_of(m: &DMatrix<f64>) -> f64 {
    let svd = m.clone().svd(false, false);
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn training_residual(
    w: &DMatrix<f64>,
    bias: &DVector<f64>,
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
) -> f64 {
    let mut fit = w * x;
    for mut col in fit.column_iter_mut() {
        col += bias;
    }
    (fit - y).abs().max()
}

/// Exact learning: W = Y X^-1 through a pivoted LU solve, bias fixed to zero.
///
/// Requires a square response matrix; refuses condition numbers beyond
/// 1e12 and warns beyond 1e8.
pub fn train_exact(x: &ResponseMatrix, y: &TargetMatrix) -> Result<TrainedModel> {
    train_exact_with_tolerance(x, y, DEFAULT_TRAINING_TOLERANCE)
}

/// [`train_exact`] with an explicit fit tolerance on the training set.
pub fn train_exact_with_tolerance(
    x: &ResponseMatrix,
    y: &TargetMatrix,
    tolerance: f64,
) -> Result<TrainedModel> {
    if !x.is_square() {
        return Err(Error::Shape(format!(
            "exact learning needs a square response matrix, got {}x{}",
            x.n_times(),
            x.n_cases()
        )));
    }
    if y.entries.ncols() != x.n_cases() {
        return Err(Error::Shape(format!(
            "target has {} columns for {} cases",
            y.entries.ncols(),
            x.n_cases()
        )));
    }

    let cond = condition_of(&x.entries);
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(Error::Singular {
            cond,
            limit: CONDITION_LIMIT,
        });
    }
    if cond > CONDITION_WARN {
        log::warn!("response matrix condition number {cond:.3e} exceeds {CONDITION_WARN:.0e}; exact learning may be inaccurate");
    }

    // W = Y X^-1  <=>  X^T W^T = Y^T
    let w_t = x
        .entries
        .transpose()
        .lu()
        .solve(&y.entries.transpose())
        .ok_or(Error::Singular {
            cond,
            limit: CONDITION_LIMIT,
        })?;
    let w = w_t.transpose();

    let bias = DVector::zeros(y.entries.nrows());
    let residual = training_residual(&w, &bias, &x.entries, &y.entries);
    if residual > tolerance {
        return Err(Error::TrainingFailed {
            residual,
            tolerance,
        });
    }
    Ok(TrainedModel {
        w_out: w,
        bias,
        training_tolerance: tolerance,
        mode: TrainingMode::Exact,
        condition_number: cond,
        residual,
    })
}

/// General trainer: W = (Y - b 1^T) X^+ with the pseudoinverse from an
/// SVD, singular values below 1e-12 relative treated as zero.
///
/// Accepts any shapes; for overdetermined systems the result minimizes
/// the Frobenius residual, for underdetermined ones it is the
/// minimum-norm solution.
pub fn train_pinv(
    x: &ResponseMatrix,
    y: &TargetMatrix,
    bias: &DVector<f64>,
) -> Result<TrainedModel> {
    if y.entries.ncols() != x.n_cases() {
        return Err(Error::Shape(format!(
            "target has {} columns for {} cases",
            y.entries.ncols(),
            x.n_cases()
        )));
    }
    if bias.len() != y.entries.nrows() {
        return Err(Error::Shape(format!(
            "bias has {} entries for {} outputs",
            bias.len(),
            y.entries.nrows()
        )));
    }

    let cond = condition_of(&x.entries);
    let pinv = pseudoinverse(&x.entries);

    let mut shifted = y.entries.clone();
    for mut col in shifted.column_iter_mut() {
        col -= bias;
    }
    let w = &shifted * &pinv;

    let residual = training_residual(&w, bias, &x.entries, &y.entries);
    if residual > DEFAULT_TRAINING_TOLERANCE {
        log::warn!("pseudoinverse training residual {residual:.3e} exceeds tolerance {DEFAULT_TRAINING_TOLERANCE:.0e}");
    }
    Ok(TrainedModel {
        w_out: w,
        bias: bias.clone(),
        training_tolerance: DEFAULT_TRAINING_TOLERANCE,
        mode: TrainingMode::Pseudoinverse,
        condition_number: cond,
        residual,
    })
}

/// Moore-Penrose pseudoinverse with relative cutoff [`PINV_CUTOFF`].
pub fn pseudoinverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    let cutoff = PINV_CUTOFF * svd.singular_values.max();
    let sigma_inv = DMatrix::from_fn(v_t.nrows(), u.ncols(), |i, j| {
        if i == j && svd.singular_values[i] > cutoff {
            1.0 / svd.singular_values[i]
        } else {
            0.0
        }
    });
    v_t.transpose() * sigma_inv * u.transpose()
}

/// Apply the readout: y = W_out x + b.
pub fn infer(model: &TrainedModel, x: &[f64]) -> Result<DVector<f64>> {
    if x.len() != model.w_out.ncols() {
        return Err(Error::Shape(format!(
            "readout has {} samples, model expects {}",
            x.len(),
            model.w_out.ncols()
        )));
    }
    Ok(&model.w_out * DVector::from_column_slice(x) + &model.bias)
}

/// A decoded Boolean with its margin. Ties decode to false and raise the
/// zero-confidence flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decoded {
    pub value: bool,
    pub confidence: f64,
    pub tied: bool,
}

/// Read a two-component output on the canonical basis: (1, 0) is false,
/// (0, 1) is true.
pub fn decode_boolean(y: &DVector<f64>) -> Result<Decoded> {
    if y.len() != 2 {
        return Err(Error::Shape(format!(
            "boolean decoding needs 2 components, got {}",
            y.len()
        )));
    }
    let confidence = (y[1] - y[0]).abs();
    Ok(Decoded {
        value: y[1] > y[0],
        confidence,
        tied: y[1] == y[0],
    })
}

//! Subcommand implementations. Every command is deterministic given its
//! config file; outputs are assembled in memory and written in one shot.

use std::path::{Path, PathBuf};
use std::time::Instant;

use kdvrc_core::elm::{decode_boolean, infer, train_exact, TargetMatrix};
use kdvrc_core::reservoir::{encode_case, run_cases, GateConfig, ResponseMatrix};
use kdvrc_core::solver::{evolve, invariants};
use kdvrc_core::Error as CoreError;

use crate::config::{case_label, parse_case, LoadedConfig, TruthTable};
use crate::error::{CliError, Result};
use crate::formats::{response_csv, trajectory_csv, write_text, ModelFile};
use crate::report::{
    drift_rows, response_section, training_section, CaseOutcome, ExperimentReport,
};
use crate::units_report::units_report;

/// `simulate`: integrate one encoded case and export the trajectory CSV.
pub fn simulate(config: &Path, case: &str, out: &Path, record_step: f64) -> Result<()> {
    let loaded = LoadedConfig::load(config)?;
    let cfg = loaded.gate_config()?;
    let inputs = parse_case(case)?;

    if !(record_step.is_finite() && record_step > 0.0) {
        return Err(CliError::Usage(format!(
            "--record-step {record_step} must be > 0"
        )));
    }
    let t_end = *cfg
        .detection_times
        .last()
        .expect("validated config has detection times");
    let mut times = Vec::new();
    let mut i = 0usize;
    loop {
        let t = i as f64 * record_step;
        if t > t_end + 1e-9 {
            break;
        }
        times.push(t);
        i += 1;
    }

    let u0 = encode_case(&cfg, &inputs)?;
    let started = Instant::now();
    let traj = evolve(&u0, &cfg.solver, &times)?;
    let elapsed = started.elapsed();

    write_text(out, &trajectory_csv(&traj))?;

    let (a1, a2, a3) = invariants(&traj.snapshots()[0], cfg.solver.beta);
    let (b1, b2, b3) = invariants(traj.last().expect("nonempty"), cfg.solver.beta);
    let rel = |a: f64, b: f64| (b - a).abs() / a.abs().max(f64::MIN_POSITIVE);
    println!(
        "case {}: {} snapshots to t = {t_end} written to {}",
        case_label(&inputs),
        traj.len(),
        out.display()
    );
    println!(
        "invariant drift: I1 {:.3e}  I2 {:.3e}  I3 {:.3e}",
        rel(a1, b1),
        rel(a2, b2),
        rel(a3, b3)
    );
    println!("integration time: {elapsed:.2?}");
    Ok(())
}

pub struct GateOutcome {
    pub report: ExperimentReport,
    pub correct: usize,
    pub total: usize,
    pub model: Option<kdvrc_core::elm::TrainedModel>,
}

/// The full gate pipeline on an already-validated configuration.
/// Returns the report even when training fails on a singular response
/// matrix; the caller decides how to surface the failure.
pub fn gate_pipeline(
    cfg: &GateConfig,
    table: &TruthTable,
    config_echo: &str,
    threads: usize,
) -> Result<(GateOutcome, ResponseMatrix, std::time::Duration)> {
    if table.cases.len() != cfg.n_times() {
        return Err(CliError::Config(format!(
            "exact learning needs as many detection times as cases: {} times vs {} cases",
            cfg.n_times(),
            table.cases.len()
        )));
    }

    let started = Instant::now();
    let runs = run_cases(cfg, &table.cases, threads).map_err(CliError::from)?;
    let sim_time = started.elapsed();

    let readouts: Vec<_> = runs.iter().map(|r| r.readout.clone()).collect();
    let x = ResponseMatrix::from_readouts(&readouts).map_err(CliError::from)?;
    let y = TargetMatrix::boolean_gate(&table.outputs);

    let mut report = ExperimentReport {
        gate: table.name.clone(),
        status: "ok".into(),
        accuracy: String::new(),
        cases: table.cases.iter().map(|c| case_label(c)).collect(),
        detection_point: cfg.detection_point,
        detection_times: cfg.detection_times.clone(),
        response: response_section(&x),
        training: None,
        outcomes: Vec::new(),
        diagnostics: drift_rows(&table.cases, &runs),
        config_echo: config_echo.to_string(),
    };

    match train_exact(&x, &y) {
        Ok(model) => {
            report.training = Some(training_section(&model));
            let mut correct = 0;
            for (j, case) in table.cases.iter().enumerate() {
                let output =
                    infer(&model, x.entries.column(j).as_slice()).map_err(CliError::from)?;
                let decoded = decode_boolean(&output).map_err(CliError::from)?;
                let expected = table.outputs[j];
                if decoded.value == expected {
                    correct += 1;
                }
                report.outcomes.push(CaseOutcome {
                    case: case_label(case),
                    output: output.iter().map(|&v| crate::formats::sig10(v)).collect(),
                    decoded: decoded.value,
                    expected,
                    correct: decoded.value == expected,
                    confidence: crate::formats::sig10(decoded.confidence),
                });
            }
            report.accuracy = format!("{correct}/{}", table.cases.len());
            Ok((
                GateOutcome {
                    report,
                    correct,
                    total: table.cases.len(),
                    model: Some(model),
                },
                x,
                sim_time,
            ))
        }
        Err(e @ (CoreError::Singular { .. } | CoreError::TrainingFailed { .. })) => {
            report.status = format!("error: {e}");
            report.accuracy = format!("0/{}", table.cases.len());
            Ok((
                GateOutcome {
                    report,
                    correct: 0,
                    total: table.cases.len(),
                    model: None,
                },
                x,
                sim_time,
            ))
        }
        Err(other) => Err(other.into()),
    }
}

/// `gate`: run all cases, train, decode, print the truth table, and write
/// the report (plus optional model and response-matrix files).
pub fn gate(
    config: &Path,
    out: &Path,
    model_out: Option<&Path>,
    response_out: Option<&Path>,
    threads: usize,
) -> Result<()> {
    let loaded = LoadedConfig::load(config)?;
    let cfg = loaded.gate_config()?;
    let table = loaded.truth_table()?;

    let (outcome, x, sim_time) = gate_pipeline(&cfg, &table, &loaded.raw, threads)?;
    write_text(out, &outcome.report.to_toml()?)?;
    if let Some(path) = response_out {
        write_text(path, &response_csv(&x, &cfg.detection_times))?;
    }

    println!("gate {}", table.name);
    let labels: Vec<&str> = cfg.variables.iter().map(|v| v.label.as_str()).collect();
    println!(" {} | out  expected  confidence", labels.join(" "));
    for o in &outcome.report.outcomes {
        println!(
            " {} |  {}       {}     {:.4}",
            o.case
                .chars()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            u8::from(o.decoded),
            u8::from(o.expected),
            o.confidence
        );
    }
    if let Some(det) = outcome.report.response.determinant {
        println!(
            "det(X) = {det:.6}, cond(X) = {:.4e}",
            outcome.report.response.condition_number
        );
    }
    println!("accuracy: {}", outcome.report.accuracy);
    println!("simulation time: {sim_time:.2?} ({} cases)", outcome.total);
    println!("report written to {}", out.display());

    if outcome.report.status != "ok" {
        return Err(CliError::Numerical(outcome.report.status.clone()));
    }

    if let Some(path) = model_out {
        let model = outcome.model.as_ref().expect("ok status carries a model");
        ModelFile::from_model(model).save(path)?;
        println!("model written to {}", path.display());
    }
    Ok(())
}

/// `sweep`: re-run the gate across one parameter range, one CSV row per
/// value with |det X|, condition number, accuracy, and a status flag.
pub fn sweep(config: &Path, param: &str, range: &str, out: &Path, threads: usize) -> Result<()> {
    let loaded = LoadedConfig::load(config)?;
    let base = loaded.gate_config()?;
    let table = loaded.truth_table()?;
    let values = parse_range(range)?;

    let mut csv = format!("{param},abs_det,condition_number,accuracy,status\n");
    for &value in &values {
        let row = sweep_point(&base, &table, param, value, threads)?;
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            crate::formats::fmt10(value),
            crate::formats::fmt10(row.abs_det),
            crate::formats::fmt10(row.condition_number),
            crate::formats::fmt10(row.accuracy),
            row.status
        ));
        println!(
            "{param} = {value}: |det| = {:.4e}, cond = {:.3e}, accuracy = {:.2}, {}",
            row.abs_det, row.condition_number, row.accuracy, row.status
        );
    }
    write_text(out, &csv)?;
    println!("sweep written to {}", out.display());
    Ok(())
}

pub struct SweepRow {
    pub abs_det: f64,
    pub condition_number: f64,
    pub accuracy: f64,
    pub status: String,
}

/// One retrained gate at a modified parameter value. Per-point numerical
/// failures (singular training, unstable integration, invalid geometry)
/// land in the status column instead of aborting the sweep.
pub fn sweep_point(
    base: &GateConfig,
    table: &TruthTable,
    param: &str,
    value: f64,
    threads: usize,
) -> Result<SweepRow> {
    let cfg = match apply_param(base, param, value) {
        Ok(cfg) => cfg,
        Err(CliError::Usage(u)) => return Err(CliError::Usage(u)),
        Err(e) => {
            return Ok(SweepRow {
                abs_det: f64::NAN,
                condition_number: f64::NAN,
                accuracy: 0.0,
                status: format!("invalid: {e}"),
            })
        }
    };
    match gate_pipeline(&cfg, table, "", threads) {
        Ok((outcome, _, _)) => Ok(SweepRow {
            abs_det: outcome
                .report
                .response
                .determinant
                .map(f64::abs)
                .unwrap_or(f64::NAN),
            condition_number: outcome.report.response.condition_number,
            accuracy: outcome.correct as f64 / outcome.total as f64,
            status: if outcome.report.status == "ok" {
                "ok".into()
            } else {
                "singular".into()
            },
        }),
        Err(CliError::Numerical(msg)) => Ok(SweepRow {
            abs_det: f64::NAN,
            condition_number: f64::NAN,
            accuracy: 0.0,
            status: format!("unstable: {msg}"),
        }),
        Err(e) => Err(e),
    }
}

/// Clone the base config with one named parameter replaced.
pub fn apply_param(base: &GateConfig, param: &str, value: f64) -> Result<GateConfig> {
    let mut cfg = base.clone();
    match param {
        "x_D" => cfg.detection_point = value,
        "L" => {
            cfg.delay = value;
            cfg.soliton.x0 = -value;
        }
        "l" => cfg.envelope_length = value,
        "eps_true" => {
            for w in &mut cfg.variables {
                w.epsilon = value;
            }
        }
        "t_offset" => {
            for t in &mut cfg.detection_times {
                *t += value;
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown sweep parameter '{other}' (expected x_D, L, l, eps_true, or t_offset)"
            )))
        }
    }
    cfg.validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

/// Parse "start:stop:step" into an inclusive list of values.
pub fn parse_range(range: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "range '{range}' must be start:stop:step"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("cannot parse '{p}' in range")))
        })
        .collect::<Result<_>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step.is_finite() && step > 0.0) || stop < start {
        return Err(CliError::Usage(format!(
            "range '{range}' is empty (need start <= stop and step > 0)"
        )));
    }
    let mut values = Vec::new();
    let mut i = 0usize;
    loop {
        let v = start + i as f64 * step;
        if v > stop + 1e-9 * step {
            break;
        }
        values.push(v);
        i += 1;
    }
    if values.is_empty() {
        return Err(CliError::Usage(format!("range '{range}' is empty")));
    }
    Ok(values)
}

/// `convert-units`: print (and optionally write) the dimensioning table.
pub fn convert_units(config: &Path, out: Option<&Path>) -> Result<()> {
    let loaded = LoadedConfig::load(config)?;
    let cfg = loaded.gate_config()?;
    let units = loaded.unit_system()?;
    let setup = loaded.physical_setup();
    let report = units_report(&cfg, &units, &setup)?;
    let text = report.render();
    print!("{text}");
    if let Some(path) = out {
        write_text(path, &text)?;
        println!("table written to {}", path.display());
    }
    Ok(())
}

/// Resolve the thread count, defaulting to the available parallelism.
pub fn resolve_threads(requested: Option<usize>) -> usize {
    requested.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
}

/// Convenience for tests and sibling commands.
pub fn default_report_path() -> PathBuf {
    PathBuf::from("gate-report.toml")
}

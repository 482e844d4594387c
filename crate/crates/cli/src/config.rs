//! Experiment configuration file: one TOML document with sections
//! [grid], [solver], [soliton], [encoding], [detection], [gate], [units].
//! All wave parameters are adimensional; the optional [units] section
//! carries the physical reference scales.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use kdvrc_core::reservoir::GateConfig;
use kdvrc_core::solver::{Grid, SolverConfig};
use kdvrc_core::units::{PhysicalSetup, UnitSystem};
use kdvrc_core::waves::{EncodingWaveParams, SolitonParams};

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub grid: GridSection,
    pub solver: SolverSection,
    pub soliton: SolitonSection,
    pub encoding: EncodingSection,
    pub detection: DetectionSection,
    pub gate: Option<GateSection>,
    pub units: Option<UnitsSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub beta: f64,
    pub dt: f64,
    #[serde(default = "default_true")]
    pub dealias: bool,
}

fn default_true() -> bool {
    true
}

/// The soliton's lower invariants coincide (r3 = r2); its center is
/// always -delay, so only the two heights live here.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonSection {
    pub r1: f64,
    pub r2: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodingSection {
    pub delay: f64,
    pub envelope_length: f64,
    pub variables: Vec<VariableSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSection {
    pub label: String,
    pub wavenumber: f64,
    /// Amplitude encoding the Boolean value true; false is its absence.
    pub amplitude: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionSection {
    pub point: f64,
    pub times: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSection {
    pub name: String,
    pub table: Vec<GateRow>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateRow {
    pub inputs: Vec<bool>,
    pub output: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsSection {
    /// Length reference D in meters.
    pub length_ref: f64,
    /// Time reference T in seconds.
    pub time_ref: f64,
    pub height_scale: Option<f64>,
    pub bucket_side: Option<f64>,
    pub rest_height: Option<f64>,
    pub gravity: Option<f64>,
}

/// A parsed config plus its literal text (echoed into reports) and origin.
#[derive(Debug)]
pub struct LoadedConfig {
    pub file: ConfigFile,
    pub raw: String,
    pub path: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&raw, path)
    }

    pub fn parse(raw: &str, path: &Path) -> Result<Self> {
        // toml errors carry line/column spans in their Display output
        let file: ConfigFile = toml::from_str(raw)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(LoadedConfig {
            file,
            raw: raw.to_string(),
            path: path.to_path_buf(),
        })
    }

    /// Assemble and validate the core gate configuration.
    pub fn gate_config(&self) -> Result<GateConfig> {
        let f = &self.file;
        let grid = Grid::new(f.grid.x_min, f.grid.x_max, f.grid.n_points)
            .map_err(|e| CliError::Config(format!("[grid] {e}")))?;
        let solver = SolverConfig {
            beta: f.solver.beta,
            dt: f.solver.dt,
            dealias: f.solver.dealias,
        };
        let soliton =
            SolitonParams::new(f.soliton.r1, f.soliton.r2, f.solver.beta, -f.encoding.delay)
                .map_err(|e| CliError::Config(format!("[soliton] {e}")))?;
        let variables = f
            .encoding
            .variables
            .iter()
            .map(|v| {
                EncodingWaveParams::new(v.amplitude, v.wavenumber, v.label.clone())
                    .map_err(|e| CliError::Config(format!("[encoding] {} {e}", v.label)))
            })
            .collect::<Result<Vec<_>>>()?;
        let cfg = GateConfig {
            soliton,
            delay: f.encoding.delay,
            envelope_length: f.encoding.envelope_length,
            variables,
            detection_point: f.detection.point,
            detection_times: f.detection.times.clone(),
            solver,
            grid,
        };
        cfg.validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// The training cases and targets of the [gate] section, in table order.
    pub fn truth_table(&self) -> Result<TruthTable> {
        let gate = self.file.gate.as_ref().ok_or_else(|| {
            CliError::Config("missing [gate] section with the truth table".into())
        })?;
        if gate.table.is_empty() {
            return Err(CliError::Config("[gate] table has no rows".into()));
        }
        let arity = self.file.encoding.variables.len();
        for row in &gate.table {
            if row.inputs.len() != arity {
                return Err(CliError::Config(format!(
                    "[gate] row {:?} has {} inputs for {} encoding variables",
                    row.inputs,
                    row.inputs.len(),
                    arity
                )));
            }
        }
        Ok(TruthTable {
            name: gate.name.clone(),
            cases: gate.table.iter().map(|r| r.inputs.clone()).collect(),
            outputs: gate.table.iter().map(|r| r.output).collect(),
        })
    }

    /// Unit system from [units], with bench defaults when absent; the
    /// normalized dispersion is the solver's beta.
    pub fn unit_system(&self) -> Result<UnitSystem> {
        let nu = self.file.solver.beta;
        let result = match &self.file.units {
            None => UnitSystem::with_height_scale(1e-3, 1e-3, nu, 1e-2),
            Some(u) => {
                let height_scale = u.height_scale.unwrap_or(10.0 * u.time_ref);
                UnitSystem::with_height_scale(u.time_ref, u.length_ref, nu, height_scale)
            }
        };
        result.map_err(|e| CliError::Config(format!("[units] {e}")))
    }

    pub fn physical_setup(&self) -> PhysicalSetup {
        let defaults = PhysicalSetup::default();
        match &self.file.units {
            None => defaults,
            Some(u) => PhysicalSetup {
                bucket_side: u.bucket_side.unwrap_or(defaults.bucket_side),
                rest_height: u.rest_height.unwrap_or(defaults.rest_height),
                gravity: u.gravity.unwrap_or(defaults.gravity),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct TruthTable {
    pub name: String,
    pub cases: Vec<Vec<bool>>,
    pub outputs: Vec<bool>,
}

/// Parse a case given as comma-separated bits, e.g. "1,0" or "true,false".
pub fn parse_case(s: &str) -> Result<Vec<bool>> {
    s.split(',')
        .map(|tok| match tok.trim() {
            "1" | "true" => Ok(true),
            "0" | "false" => Ok(false),
            other => Err(CliError::Usage(format!(
                "cannot parse '{other}' as a Boolean (use 0/1 or true/false)"
            ))),
        })
        .collect()
}

/// Render a case as its bit string, e.g. [true, false] -> "10".
pub fn case_label(case: &[bool]) -> String {
    case.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[grid]
x_min = -64.0
x_max = 192.0
n_points = 8192

[solver]
beta = 0.3333333333333333
dt = 0.005

[soliton]
r1 = 2.0
r2 = 1.0

[encoding]
delay = 17.0
envelope_length = 20.0

[[encoding.variables]]
label = "A"
wavenumber = 0.4330127018922193
amplitude = 0.25

[[encoding.variables]]
label = "B"
wavenumber = 0.5
amplitude = 0.25

[detection]
point = 50.0
times = [40.0, 49.0, 51.0, 60.0]
"#;

    #[test]
    fn minimal_config_parses_and_validates() {
        let loaded = LoadedConfig::parse(MINIMAL, Path::new("mem")).unwrap();
        let cfg = loaded.gate_config().unwrap();
        assert_eq!(cfg.n_variables(), 2);
        assert_eq!(cfg.n_times(), 4);
        assert!((cfg.soliton.x0 + 17.0).abs() < 1e-15);
        // no [gate] section: truth table unavailable
        assert!(loaded.truth_table().is_err());
        // no [units] section: bench defaults
        let u = loaded.unit_system().unwrap();
        assert_eq!(u.length_ref, 1e-3);
        assert_eq!(u.velocity_ref(), 1.0);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let bad = MINIMAL.replace("dt = 0.005", "dt = \"fast\"");
        let err = LoadedConfig::parse(&bad, Path::new("broken.toml")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("broken.toml"), "{msg}");
        assert!(msg.contains("line"), "expected a line reference: {msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = MINIMAL.replace("dt = 0.005", "dt = 0.005\ntypo_key = 1.0");
        assert!(LoadedConfig::parse(&bad, Path::new("mem")).is_err());
    }

    #[test]
    fn case_parsing() {
        assert_eq!(parse_case("1,0").unwrap(), vec![true, false]);
        assert_eq!(parse_case("true, false").unwrap(), vec![true, false]);
        assert!(parse_case("1,2").is_err());
        assert_eq!(case_label(&[true, false]), "10");
    }
}

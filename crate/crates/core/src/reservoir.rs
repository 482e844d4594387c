//! The physical-reservoir pipeline: Boolean tuples are encoded as
//! truncated wave trains ahead of a soliton, the composite field is
//! evolved, and the water height is sampled at one detection point at a
//! fixed set of times. Stacking the per-case readout vectors column-wise
//! gives the response matrix the readout layer is trained on.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::solver::{evolve, invariants, Grid, SolverConfig, Trajectory, WaveField};
use crate::waves::{build_initial_condition, EncodingTrain, EncodingWaveParams, SolitonParams};

/// Complete description of one gate experiment.
///
/// `variables` holds one encoding wave per Boolean input, with `epsilon`
/// set to the amplitude that encodes *true*; false is encoded by the
/// absence of the wave. The soliton is launched at `x0 = -delay`.
#[derive(Debug, Clone)]
pub struct GateConfig {
    pub soliton: SolitonParams,
    pub delay: f64,
    pub envelope_length: f64,
    pub variables: Vec<EncodingWaveParams>,
    pub detection_point: f64,
    pub detection_times: Vec<f64>,
    pub solver: SolverConfig,
    pub grid: Grid,
}

impl GateConfig {
    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn n_times(&self) -> usize {
        self.detection_times.len()
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if self.delay <= 0.0 || !self.delay.is_finite() {
            return Err(Error::Config(format!("delay = {} must be > 0", self.delay)));
        }
        if (self.soliton.x0 + self.delay).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "soliton center x0 = {} must equal -delay = {}",
                self.soliton.x0, -self.delay
            )));
        }
        if self.variables.is_empty() {
            return Err(Error::Config(
                "gate needs at least one encoding wave".into(),
            ));
        }
        if self.detection_times.is_empty() {
            return Err(Error::Config(
                "gate needs at least one detection time".into(),
            ));
        }
        if !self.detection_times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(
                "detection times must be strictly increasing".into(),
            ));
        }
        self.grid.nearest_index(self.detection_point)?;

        // every encoding wave must be slower than the soliton, at the
        // amplitude that encodes true (its fastest setting)
        let v = self.soliton.speed();
        for w in &self.variables {
            let v_n = w.speed(self.soliton.r2, self.soliton.beta);
            if v_n >= v {
                return Err(Error::NoCollision { v, v_n });
            }
        }
        Ok(())
    }

    /// The encoding train for one Boolean tuple: amplitude epsilon where
    /// the input is true, zero where it is false.
    fn train_for(&self, inputs: &[bool]) -> Result<EncodingTrain> {
        if inputs.len() != self.n_variables() {
            return Err(Error::Config(format!(
                "case has {} inputs for {} encoding variables",
                inputs.len(),
                self.n_variables()
            )));
        }
        let waves = self
            .variables
            .iter()
            .zip(inputs)
            .map(|(w, &on)| EncodingWaveParams {
                epsilon: if on { w.epsilon } else { 0.0 },
                ..w.clone()
            })
            .collect();
        EncodingTrain::new(waves, self.envelope_length)
    }
}

/// Water heights sampled at the detection point, one per detection time.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutVector {
    pub values: Vec<f64>,
    pub case: Vec<bool>,
}

/// One completed case run: the readout plus the relative drift of the
/// three conserved quantities over the simulation, as a solver diagnostic.
#[derive(Debug, Clone)]
pub struct CaseRun {
    pub readout: ReadoutVector,
    pub invariant_drift: [f64; 3],
}

/// Response matrix: column j is the readout vector of case j.
#[derive(Debug, Clone)]
pub struct ResponseMatrix {
    pub entries: DMatrix<f64>,
    pub cases: Vec<Vec<bool>>,
}

impl ResponseMatrix {
    /// Assemble from per-case readouts, checking shape and distinctness.
    pub fn from_readouts(readouts: &[ReadoutVector]) -> Result<Self> {
        if readouts.is_empty() {
            return Err(Error::Config(
                "response matrix needs at least one case".into(),
            ));
        }
        let n_x = readouts[0].values.len();
        for r in readouts {
            if r.values.len() != n_x {
                return Err(Error::Shape(
                    "readout vectors have inconsistent lengths".into(),
                ));
            }
        }
        for (i, a) in readouts.iter().enumerate() {
            for b in &readouts[i + 1..] {
                if a.case == b.case {
                    return Err(Error::Config(format!(
                        "duplicate case {:?} in training set",
                        a.case
                    )));
                }
            }
        }
        let entries = DMatrix::from_fn(n_x, readouts.len(), |i, j| readouts[j].values[i]);
        Ok(ResponseMatrix {
            entries,
            cases: readouts.iter().map(|r| r.case.clone()).collect(),
        })
    }

    pub fn n_times(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_cases(&self) -> usize {
        self.entries.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.entries.is_square()
    }

    /// Determinant, defined for square matrices only.
    pub fn determinant(&self) -> Option<f64> {
        self.is_square()
            .then(|| self.entries.clone().lu().determinant())
    }

    /// Spectral condition number sigma_max / sigma_min (infinite when rank
    /// deficient).
    pub fn condition_number(&self) -> f64 {
        let svd = self.entries.clone().svd(false, false);
        let max = svd.singular_values.max();
        let min = svd.singular_values.min();
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

/// Build the initial wave field for one Boolean tuple: the encoding train
/// plus the always-present soliton.
pub fn encode_case(cfg: &GateConfig, inputs: &[bool]) -> Result<WaveField> {
    let train = cfg.train_for(inputs)?;
    build_initial_condition(&train, &cfg.soliton, &cfg.grid)
}

/// Sample a trajectory at the grid point nearest `x_d`, one value per
/// snapshot.
pub fn sample_detection(traj: &Trajectory, x_d: f64) -> Result<Vec<f64>> {
    let first = traj
        .snapshots()
        .first()
        .ok_or_else(|| Error::Diagnostic("trajectory holds no snapshots".into()))?;
    let idx = first.grid().nearest_index(x_d)?;
    Ok(traj.snapshots().iter().map(|s| s.values()[idx]).collect())
}

/// Encode, evolve to every detection time, and sample the detection point.
pub fn run_case(cfg: &GateConfig, inputs: &[bool]) -> Result<ReadoutVector> {
    Ok(run_case_full(cfg, inputs)?.readout)
}

/// As [`run_case`], also reporting conserved-quantity drift over the run.
pub fn run_case_full(cfg: &GateConfig, inputs: &[bool]) -> Result<CaseRun> {
    cfg.validate()?;
    let u0 = encode_case(cfg, inputs)?;
    let start = invariants(&u0, cfg.solver.beta);
    let traj = evolve(&u0, &cfg.solver, &cfg.detection_times)?;
    let values = sample_detection(&traj, cfg.detection_point)?;

    let end = invariants(
        traj.last()
            .ok_or_else(|| Error::Diagnostic("trajectory holds no snapshots".into()))?,
        cfg.solver.beta,
    );
    let rel = |a: f64, b: f64| (b - a).abs() / a.abs().max(f64::MIN_POSITIVE);
    Ok(CaseRun {
        readout: ReadoutVector {
            values,
            case: inputs.to_vec(),
        },
        invariant_drift: [
            rel(start.0, end.0),
            rel(start.1, end.1),
            rel(start.2, end.2),
        ],
    })
}

/// Run a batch of cases, at most `threads` in parallel. Results come back
/// in case order regardless of scheduling; on multiple failures the error
/// of the earliest case wins.
pub fn run_cases(cfg: &GateConfig, cases: &[Vec<bool>], threads: usize) -> Result<Vec<CaseRun>> {
    let outcomes: Vec<Result<CaseRun>> = if threads <= 1 || cases.len() <= 1 {
        cases.iter().map(|c| run_case_full(cfg, c)).collect()
    } else {
        let chunk = cases.len().div_ceil(threads.min(cases.len()));
        std::thread::scope(|scope| {
            let handles: Vec<_> = cases
                .chunks(chunk)
                .map(|group| {
                    scope.spawn(move || {
                        group
                            .iter()
                            .map(|c| run_case_full(cfg, c))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("case worker panicked"))
                .collect()
        })
    };
    outcomes.into_iter().collect()
}

/// Run every case and stack the readouts into the response matrix.
pub fn response_matrix(
    cfg: &GateConfig,
    cases: &[Vec<bool>],
    threads: usize,
) -> Result<ResponseMatrix> {
    let runs = run_cases(cfg, cases, threads)?;
    let readouts: Vec<ReadoutVector> = runs.into_iter().map(|r| r.readout).collect();
    ResponseMatrix::from_readouts(&readouts)
}

//! Time integration of `u_t + u u_x + beta u_xxx = 0` on a periodic grid.
//!
//! Space is handled pseudo-spectrally: the dispersive term is diagonal in
//! Fourier space and is integrated exactly by a fourth-order exponential
//! integrator (ETDRK4, Cox–Matthews coefficients). The quadratic term is
//! evaluated in physical space in conservative form, `(u^2)_x / 2`, with
//! optional two-thirds-rule de-aliasing.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::SpectralOps;

/// Relative L2 drift beyond which the integration is declared unstable.
const INSTABILITY_DRIFT: f64 = 1e-3;

/// Tolerance when matching record times to step multiples.
const TIME_MATCH_TOL: f64 = 1e-9;

/// Uniform periodic grid; `x_max` identifies with `x_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() || x_max <= x_min {
            return Err(Error::Config(format!(
                "grid bounds [{x_min}, {x_max}) are not a finite nonempty interval"
            )));
        }
        if n_points < 256 || !n_points.is_power_of_two() {
            return Err(Error::Config(format!(
                "n_points = {n_points} must be a power of two >= 256"
            )));
        }
        Ok(Grid {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    /// Index of the grid point nearest to `x`; `x` must lie on the domain.
    pub fn nearest_index(&self, x: f64) -> Result<usize> {
        if !x.is_finite() || x < self.x_min - self.dx() / 2.0 || x > self.x_max + self.dx() / 2.0 {
            return Err(Error::Config(format!(
                "point x = {x} lies outside the grid [{}, {})",
                self.x_min, self.x_max
            )));
        }
        let idx = ((x - self.x_min) / self.dx()).round() as usize;
        Ok(idx % self.n_points)
    }
}

/// Sampled surface-velocity profile u(x) at one instant.
#[derive(Debug, Clone)]
pub struct WaveField {
    values: Vec<f64>,
    grid: Grid,
    time: f64,
}

impl WaveField {
    pub fn new(grid: Grid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::Shape(format!(
                "field has {} samples for a grid of {} points",
                values.len(),
                grid.n_points()
            )));
        }
        if !time.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(
                "wave field contains non-finite values".into(),
            ));
        }
        Ok(WaveField { values, grid, time })
    }

    pub fn constant(grid: Grid, value: f64, time: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.n_points()], time)
    }

    pub fn from_fn(grid: Grid, time: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values, time)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// (peak value, grid index of the peak).
    pub fn peak(&self) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, &v) in self.values.iter().enumerate() {
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    }
}

/// Integrator settings.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Dispersion coefficient of the third-derivative term.
    pub beta: f64,
    /// Time step. The dispersive part is integrated exactly, so the only
    /// stability constraint is the advective one, |u| k_max dt < ~2.8.
    pub dt: f64,
    /// Two-thirds-rule truncation of the quadratic term.
    pub dealias: bool,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::Config(format!("beta = {} must be > 0", self.beta)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt = {} must be > 0", self.dt)));
        }
        Ok(())
    }
}

/// Time-ordered snapshots recorded during one `evolve` call.
#[derive(Debug, Clone)]
pub struct Trajectory {
    snapshots: Vec<WaveField>,
    record_times: Vec<f64>,
    beta: f64,
}

impl Trajectory {
    /// Assemble a trajectory from pre-computed snapshots (e.g. sampled
    /// analytic solutions) so the diagnostics below can run on them.
    pub fn from_snapshots(snapshots: Vec<WaveField>, beta: f64) -> Result<Self> {
        if !snapshots.windows(2).all(|w| w[0].time() < w[1].time()) {
            return Err(Error::Config(
                "snapshot times must be strictly increasing".into(),
            ));
        }
        if let Some(first) = snapshots.first() {
            if snapshots.iter().any(|s| s.grid() != first.grid()) {
                return Err(Error::Config("snapshots share one grid".into()));
            }
        }
        let record_times = snapshots.iter().map(|s| s.time()).collect();
        Ok(Trajectory {
            snapshots,
            record_times,
            beta,
        })
    }

    pub fn snapshots(&self) -> &[WaveField] {
        &self.snapshots
    }

    pub fn record_times(&self) -> &[f64] {
        &self.record_times
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn last(&self) -> Option<&WaveField> {
        self.snapshots.last()
    }
}

// --- ETDRK4 machinery ------------------------------------------------------

/// phi_1(z) = (e^z - 1)/z, with a series branch for small |z| where the
/// direct formula cancels.
fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        phi_series(z, 1)
    } else {
        (z.exp() - 1.0) / z
    }
}

fn phi2(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        phi_series(z, 2)
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}

fn phi3(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        phi_series(z, 3)
    } else {
        (z.exp() - 1.0 - z - z * z / 2.0) / (z * z * z)
    }
}

/// Taylor series sum_j z^j / (j + shift)!; 18 terms give < 1 ulp for |z| < 0.5.
fn phi_series(z: Complex64, shift: u32) -> Complex64 {
    let mut factorial = 1.0;
    for j in 1..=shift {
        factorial *= j as f64;
    }
    let mut term = Complex64::new(1.0 / factorial, 0.0);
    let mut sum = term;
    for j in 1..18u32 {
        term = term * z / (j + shift) as f64;
        sum += term;
    }
    sum
}

/// Per-mode ETDRK4 coefficients and scratch buffers for one (grid, config).
struct Etdrk4 {
    ops: SpectralOps,
    dealias: bool,
    e_full: Vec<Complex64>,
    e_half: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
    phys: Vec<Complex64>,
    stage_a: Vec<Complex64>,
    stage_b: Vec<Complex64>,
    stage_c: Vec<Complex64>,
    n_u: Vec<Complex64>,
    n_a: Vec<Complex64>,
    n_b: Vec<Complex64>,
    n_c: Vec<Complex64>,
}

impl Etdrk4 {
    fn new(grid: &Grid, cfg: &SolverConfig) -> Self {
        let ops = SpectralOps::new(grid);
        let n = ops.n();
        let dt = cfg.dt;

        let mut e_full = Vec::with_capacity(n);
        let mut e_half = Vec::with_capacity(n);
        let mut q = Vec::with_capacity(n);
        let mut f1 = Vec::with_capacity(n);
        let mut f2 = Vec::with_capacity(n);
        let mut f3 = Vec::with_capacity(n);
        for &k in ops.wavenumbers() {
            // Linear symbol of -beta * d^3/dx^3 is +i beta k^3.
            let z = Complex64::new(0.0, cfg.beta * k * k * k * dt);
            e_full.push(z.exp());
            e_half.push((z / 2.0).exp());
            q.push(phi1(z / 2.0) * (dt / 2.0));
            let (p1, p2, p3) = (phi1(z), phi2(z), phi3(z));
            f1.push((p1 - 3.0 * p2 + 4.0 * p3) * dt);
            f2.push((p2 - 2.0 * p3) * dt);
            f3.push((4.0 * p3 - p2) * dt);
        }

        let zeros = vec![Complex64::ZERO; n];
        Etdrk4 {
            ops,
            dealias: cfg.dealias,
            e_full,
            e_half,
            q,
            f1,
            f2,
            f3,
            phys: zeros.clone(),
            stage_a: zeros.clone(),
            stage_b: zeros.clone(),
            stage_c: zeros.clone(),
            n_u: zeros.clone(),
            n_a: zeros.clone(),
            n_b: zeros.clone(),
            n_c: zeros,
        }
    }

    /// Spectrum of the nonlinear term, out = -(i k / 2) F[(F^-1 input)^2].
    fn nonlinear(
        ops: &mut SpectralOps,
        phys: &mut [Complex64],
        dealias: bool,
        input: &[Complex64],
        out: &mut [Complex64],
    ) {
        let n = ops.n() as f64;
        let inv_n = 1.0 / n;
        if dealias {
            for i in 0..input.len() {
                phys[i] = if ops.kept(i) {
                    input[i]
                } else {
                    Complex64::ZERO
                };
            }
        } else {
            phys.copy_from_slice(input);
        }
        ops.inverse(phys);
        for p in phys.iter_mut() {
            let u = p.re * inv_n;
            *p = Complex64::new(u * u, 0.0);
        }
        ops.forward(phys);
        for i in 0..out.len() {
            out[i] = if !dealias || ops.kept(i) {
                phys[i] * Complex64::new(0.0, -ops.wavenumbers()[i] / 2.0)
            } else {
                Complex64::ZERO
            };
        }
    }

    /// One ETDRK4 step, advancing `u_hat` in place by dt.
    fn step(&mut self, u_hat: &mut [Complex64]) {
        let Etdrk4 {
            ops,
            dealias,
            e_full,
            e_half,
            q,
            f1,
            f2,
            f3,
            phys,
            stage_a,
            stage_b,
            stage_c,
            n_u,
            n_a,
            n_b,
            n_c,
        } = self;
        let dealias = *dealias;

        Self::nonlinear(ops, phys, dealias, u_hat, n_u);
        for i in 0..u_hat.len() {
            stage_a[i] = e_half[i] * u_hat[i] + q[i] * n_u[i];
        }
        Self::nonlinear(ops, phys, dealias, stage_a, n_a);
        for i in 0..u_hat.len() {
            stage_b[i] = e_half[i] * u_hat[i] + q[i] * n_a[i];
        }
        Self::nonlinear(ops, phys, dealias, stage_b, n_b);
        for i in 0..u_hat.len() {
            stage_c[i] = e_half[i] * stage_a[i] + q[i] * (2.0 * n_b[i] - n_u[i]);
        }
        Self::nonlinear(ops, phys, dealias, stage_c, n_c);
        for i in 0..u_hat.len() {
            u_hat[i] = e_full[i] * u_hat[i]
                + f1[i] * n_u[i]
                + f2[i] * 2.0 * (n_a[i] + n_b[i])
                + f3[i] * n_c[i];
        }
    }
}

/// Map each record time to its step count from `t0`, requiring exact
/// divisibility by dt and strict monotonicity.
fn record_steps(t0: f64, dt: f64, record_times: &[f64]) -> Result<Vec<usize>> {
    let mut steps = Vec::with_capacity(record_times.len());
    let mut prev: Option<usize> = None;
    for &t in record_times {
        let raw = (t - t0) / dt;
        let n = raw.round();
        if n < 0.0 {
            return Err(Error::Config(format!(
                "record time {t} precedes the initial time {t0}"
            )));
        }
        if (t - (t0 + n * dt)).abs() > TIME_MATCH_TOL * t.abs().max(1.0) {
            return Err(Error::Config(format!(
                "record time {t} is not an integer multiple of dt = {dt} from t0 = {t0}"
            )));
        }
        let n = n as usize;
        if prev.is_some_and(|p| p >= n) {
            return Err(Error::Config(
                "record times must be strictly increasing".into(),
            ));
        }
        prev = Some(n);
        steps.push(n);
    }
    Ok(steps)
}

/// Integrate `u0` forward, returning snapshots at exactly the requested times.
///
/// Fails with [`Error::Unstable`] if any value becomes non-finite or the
/// L2 invariant drifts by more than 0.1% relative.
pub fn evolve(u0: &WaveField, cfg: &SolverConfig, record_times: &[f64]) -> Result<Trajectory> {
    cfg.validate()?;
    let steps = record_steps(u0.time(), cfg.dt, record_times)?;
    let grid = u0.grid();

    let mut integrator = Etdrk4::new(&grid, cfg);
    let mut u_hat = integrator.ops.spectrum_of(u0.values());
    let i2_ref = SpectralOps::l2_from_spectrum(&u_hat, grid.dx());

    let mut snapshots = Vec::with_capacity(record_times.len());
    let mut next_record = 0;
    if steps.first() == Some(&0) {
        snapshots.push(u0.clone());
        next_record = 1;
    }

    let last_step = steps.last().copied().unwrap_or(0);
    for step in 1..=last_step {
        integrator.step(&mut u_hat);

        let i2 = SpectralOps::l2_from_spectrum(&u_hat, grid.dx());
        let time = u0.time() + step as f64 * cfg.dt;
        if !i2.is_finite() {
            return Err(Error::Unstable {
                step,
                time,
                reason: "field contains non-finite values".into(),
            });
        }
        let drift = (i2 - i2_ref).abs() / i2_ref.abs().max(f64::MIN_POSITIVE);
        if drift > INSTABILITY_DRIFT {
            return Err(Error::Unstable {
                step,
                time,
                reason: format!("relative L2 drift {drift:.3e} exceeds {INSTABILITY_DRIFT:.0e}"),
            });
        }

        if next_record < steps.len() && steps[next_record] == step {
            let values = integrator.ops.values_of(&u_hat);
            snapshots.push(WaveField::new(grid, values, record_times[next_record])?);
            next_record += 1;
        }
    }

    Ok(Trajectory {
        snapshots,
        record_times: record_times.to_vec(),
        beta: cfg.beta,
    })
}

/// The first three conserved quantities of the equation:
/// I1 = int u dx, I2 = int u^2 dx, I3 = int (u^3/3 - beta u_x^2) dx,
/// evaluated with spectral quadrature on the periodic domain.
pub fn invariants(u: &WaveField, beta: f64) -> (f64, f64, f64) {
    let grid = u.grid();
    let dx = grid.dx();
    let mut ops = SpectralOps::new(&grid);
    let ux = ops.derivative(u.values(), 1);

    let mut i1 = 0.0;
    let mut i2 = 0.0;
    let mut i3 = 0.0;
    for (&v, &d) in u.values().iter().zip(&ux) {
        i1 += v;
        i2 += v * v;
        i3 += v * v * v / 3.0 - beta * d * d;
    }
    (i1 * dx, i2 * dx, i3 * dx)
}

/// Max-norm residual of the equation on a trajectory: time derivative by
/// central differences over a snapshot triple spaced `stencil_dt` apart,
/// space derivatives spectrally from the middle snapshot.
pub fn kdv_residual(traj: &Trajectory, stencil_dt: f64) -> Result<f64> {
    if traj.len() < 3 {
        return Err(Error::Diagnostic(format!(
            "need at least 3 snapshots for a time stencil, got {}",
            traj.len()
        )));
    }
    let mid = (traj.len() / 2).clamp(1, traj.len() - 2);
    let (before, center, after) = (
        &traj.snapshots[mid - 1],
        &traj.snapshots[mid],
        &traj.snapshots[mid + 1],
    );
    for (a, b) in [(before, center), (center, after)] {
        let gap = b.time() - a.time();
        if (gap - stencil_dt).abs() > TIME_MATCH_TOL * stencil_dt.max(1.0) {
            return Err(Error::Diagnostic(format!(
                "snapshots too sparse: gap {gap} does not match stencil_dt = {stencil_dt}"
            )));
        }
    }

    let grid = center.grid();
    let mut ops = SpectralOps::new(&grid);
    let ux = ops.derivative(center.values(), 1);
    let uxxx = ops.derivative(center.values(), 3);

    let mut worst = 0.0f64;
    for i in 0..grid.n_points() {
        let ut = (after.values()[i] - before.values()[i]) / (2.0 * stencil_dt);
        let r = ut + center.values()[i] * ux[i] + traj.beta * uxxx[i];
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

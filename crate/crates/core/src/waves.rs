//! Analytic traveling-wave generators: cnoidal profiles, their soliton and
//! low-amplitude limits, truncated encoding trains, and the composite
//! initial condition used by the gate pipeline.
//!
//! All quantities are adimensional (see [`crate::units`] for the mapping
//! to physical scales).

use crate::elliptic::sn_cn_dn_impl;
use crate::error::{Error, Result};
use crate::solver::{Grid, WaveField};

/// Within this distance of the degenerate elliptic parameters the profile
/// dispatches to the closed-form limits, where the AGM kernel loses accuracy.
const DEGENERATE_EPS: f64 = 1e-12;

/// Periodic traveling wave described by its three ordered Riemann
/// invariants and the dispersion coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnoidalParams {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub beta: f64,
}

impl CnoidalParams {
    pub fn new(r1: f64, r2: f64, r3: f64, beta: f64) -> Result<Self> {
        if ![r1, r2, r3, beta].iter().all(|v| v.is_finite()) {
            return Err(Error::Config("cnoidal parameters must be finite".into()));
        }
        if !(r1 >= r2 && r2 >= r3) {
            return Err(Error::Config(format!(
                "Riemann invariants must be ordered r1 >= r2 >= r3, got ({r1}, {r2}, {r3})"
            )));
        }
        if beta <= 0.0 {
            return Err(Error::Config(format!("beta = {beta} must be > 0")));
        }
        Ok(CnoidalParams { r1, r2, r3, beta })
    }

    /// Propagation speed, the arithmetic mean of the Riemann invariants.
    pub fn speed(&self) -> f64 {
        (self.r1 + self.r2 + self.r3) / 3.0
    }

    /// Elliptic parameter m = (r1 - r2)/(r1 - r3); `None` for the fully
    /// degenerate constant wave r1 = r3.
    pub fn elliptic_parameter(&self) -> Option<f64> {
        let span = self.r1 - self.r3;
        if span == 0.0 {
            None
        } else {
            Some(((self.r1 - self.r2) / span).clamp(0.0, 1.0))
        }
    }

    /// u(x, t) = r1 - (r1 - r2) sn^2(sqrt((r1 - r3)/(12 beta)) (x - v t), m).
    pub fn profile(&self, x: f64, t: f64) -> f64 {
        let Some(m) = self.elliptic_parameter() else {
            return self.r1; // zero-amplitude degenerate wave
        };
        let kappa = ((self.r1 - self.r3) / (12.0 * self.beta)).sqrt();
        let arg = kappa * (x - self.speed() * t);
        let amp = self.r1 - self.r2;
        if m < DEGENERATE_EPS {
            // low-amplitude limit: sn -> sin
            let s = arg.sin();
            self.r1 - amp * s * s
        } else if 1.0 - m < DEGENERATE_EPS {
            // soliton limit: sn -> tanh, so 1 - sn^2 -> sech^2
            let sech = 1.0 / arg.cosh();
            self.r2 + amp * sech * sech
        } else {
            let (sn, _, _) = sn_cn_dn_impl(arg, m);
            self.r1 - amp * sn * sn
        }
    }

    /// Spatial period 2 K(m) / kappa of the sn^2 pattern, for grid sizing.
    /// `None` in both degenerate limits (constant / infinite period).
    pub fn spatial_period(&self) -> Option<f64> {
        use crate::elliptic::{complete_elliptic_k, EllipticParameter};
        let m = self.elliptic_parameter()?;
        if 1.0 - m < DEGENERATE_EPS {
            return None;
        }
        let kappa = ((self.r1 - self.r3) / (12.0 * self.beta)).sqrt();
        let k = complete_elliptic_k(EllipticParameter::new(m).ok()?).ok()?;
        Some(2.0 * k / kappa)
    }
}

/// Solitary wave on background `r2` (the r3 -> r2 limit of the cnoidal
/// family), centered at `x0` at t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonParams {
    pub r1: f64,
    pub r2: f64,
    pub beta: f64,
    pub x0: f64,
}

impl SolitonParams {
    pub fn new(r1: f64, r2: f64, beta: f64, x0: f64) -> Result<Self> {
        if ![r1, r2, beta, x0].iter().all(|v| v.is_finite()) {
            return Err(Error::Config("soliton parameters must be finite".into()));
        }
        if r1 <= r2 {
            return Err(Error::Config(format!(
                "soliton needs r1 > r2, got r1 = {r1}, r2 = {r2}"
            )));
        }
        if beta <= 0.0 {
            return Err(Error::Config(format!("beta = {beta} must be > 0")));
        }
        Ok(SolitonParams { r1, r2, beta, x0 })
    }

    /// Height above the background.
    pub fn amplitude(&self) -> f64 {
        self.r1 - self.r2
    }

    /// Inverse width of the sech^2 hump, sqrt((r1 - r2)/(12 beta)).
    pub fn width_parameter(&self) -> f64 {
        (self.amplitude() / (12.0 * self.beta)).sqrt()
    }

    /// v = (r1 + 2 r2)/3, the cnoidal mean with r3 = r2.
    pub fn speed(&self) -> f64 {
        (self.r1 + 2.0 * self.r2) / 3.0
    }

    /// u(x, t) = r2 + (r1 - r2) sech^2(kappa (x - x0 - v t)).
    pub fn profile(&self, x: f64, t: f64) -> f64 {
        let arg = self.width_parameter() * (x - self.x0 - self.speed() * t);
        let sech = 1.0 / arg.cosh();
        self.r2 + self.amplitude() * sech * sech
    }
}

/// One cos^2 encoding wave: the wavenumber labels a variable, the
/// amplitude carries its value (zero encodes Boolean false).
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingWaveParams {
    pub epsilon: f64,
    pub wavenumber: f64,
    pub label: String,
}

impl EncodingWaveParams {
    pub fn new(epsilon: f64, wavenumber: f64, label: impl Into<String>) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::Config(format!("amplitude {epsilon} must be >= 0")));
        }
        if !wavenumber.is_finite() || wavenumber <= 0.0 {
            return Err(Error::Config(format!(
                "wavenumber {wavenumber} must be > 0"
            )));
        }
        Ok(EncodingWaveParams {
            epsilon,
            wavenumber,
            label: label.into(),
        })
    }

    /// Propagation speed on background r2: r2 + (2/3) eps - 4 beta k^2.
    pub fn speed(&self, r2: f64, beta: f64) -> f64 {
        r2 + (2.0 / 3.0) * self.epsilon - 4.0 * beta * self.wavenumber * self.wavenumber
    }
}

/// Ordered superposition of encoding waves under one smooth truncation
/// envelope of length `l` centered at x = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingTrain {
    pub waves: Vec<EncodingWaveParams>,
    pub envelope_length: f64,
}

impl EncodingTrain {
    pub fn new(waves: Vec<EncodingWaveParams>, envelope_length: f64) -> Result<Self> {
        if waves.is_empty() {
            return Err(Error::Config(
                "encoding train needs at least one wave".into(),
            ));
        }
        if !envelope_length.is_finite() || envelope_length <= 0.0 {
            return Err(Error::Config(format!(
                "envelope length {envelope_length} must be > 0"
            )));
        }
        Ok(EncodingTrain {
            waves,
            envelope_length,
        })
    }

    /// The super-Gaussian truncation window exp(-(2x/l)^8).
    pub fn envelope(&self, x: f64) -> f64 {
        (-(2.0 * x / self.envelope_length).powi(8)).exp()
    }

    /// u_e(x) = envelope(x) * sum_n eps_n cos^2(k_n x).
    pub fn profile(&self, x: f64) -> f64 {
        let sum: f64 = self
            .waves
            .iter()
            .map(|w| {
                let c = (w.wavenumber * x).cos();
                w.epsilon * c * c
            })
            .sum();
        self.envelope(x) * sum
    }

    /// Half-width beyond which the envelope is numerically zero.
    pub fn support_radius(&self) -> f64 {
        self.envelope_length
    }
}

/// Sample `u_0(x) = u_e(x) + u_s(x, 0)` on the grid.
///
/// The grid must contain the envelope support and a band of at least five
/// soliton widths around the soliton center, so the field reaches the
/// background value before the periodic seam.
pub fn build_initial_condition(
    train: &EncodingTrain,
    soliton: &SolitonParams,
    grid: &Grid,
) -> Result<WaveField> {
    let margin = 5.0 / soliton.width_parameter();
    let need_min = (-train.support_radius()).min(soliton.x0 - margin);
    let need_max = train.support_radius().max(soliton.x0 + margin);
    if grid.x_min() > need_min || grid.x_max() < need_max {
        return Err(Error::Config(format!(
            "grid [{}, {}) too small: initial condition needs [{need_min}, {need_max}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    WaveField::from_fn(*grid, 0.0, |x| train.profile(x) + soliton.profile(x, 0.0))
}

/// Space-time point where a slower encoding wave is overtaken by the
/// soliton launched a delay `L` behind it: (v_n L/(v - v_n), L/(v - v_n)).
pub fn collision_point(v: f64, v_n: f64, delay: f64) -> Result<(f64, f64)> {
    if v <= v_n {
        return Err(Error::NoCollision { v, v_n });
    }
    let t_c = delay / (v - v_n);
    Ok((v_n * t_c, t_c))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Soliton with r1 = 2, r2 = 1, beta = 1/3: speed 4/3, width parameter 1/2.
    fn reference_soliton() -> SolitonParams {
        SolitonParams::new(2.0, 1.0, 1.0 / 3.0, -17.0).unwrap()
    }

    #[test]
    fn cnoidal_ordering_is_enforced() {
        assert!(CnoidalParams::new(1.0, 2.0, 0.0, 1.0).is_err());
        assert!(CnoidalParams::new(2.0, 1.0, 0.5, -1.0).is_err());
        assert!(CnoidalParams::new(2.0, 1.0, 0.5, 1.0).is_ok());
    }

    #[test]
    fn degenerate_cnoidal_is_constant() {
        let p = CnoidalParams::new(1.5, 1.5, 1.5, 0.3).unwrap();
        for i in 0..20 {
            let x = -5.0 + i as f64;
            assert_eq!(p.profile(x, 2.0), 1.5);
        }
        assert_eq!(p.speed(), 1.5);
    }

    #[test]
    fn cnoidal_speed_is_the_mean() {
        let p = CnoidalParams::new(2.0, 1.0, 1.0, 1.0 / 3.0).unwrap();
        assert!((p.speed() - 4.0 / 3.0).abs() < 1e-15);
        let q = CnoidalParams::new(3.0, 2.0, 1.0, 1.0).unwrap();
        assert_eq!(q.speed(), 2.0);
        let z = CnoidalParams::new(0.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(z.speed(), 0.0);
    }

    #[test]
    fn cnoidal_with_equal_lower_invariants_is_the_soliton() {
        let c = CnoidalParams::new(2.0, 1.0, 1.0, 1.0 / 3.0).unwrap();
        let s = SolitonParams::new(2.0, 1.0, 1.0 / 3.0, 0.0).unwrap();
        for i in 0..50 {
            let x = -12.0 + 0.5 * i as f64;
            let t = 0.7;
            let diff = (c.profile(x + c.speed() * t, t) - s.profile(x + s.speed() * t, t)).abs();
            assert!(diff < 1e-12, "x = {x}: diff = {diff}");
        }
        // peak value at the co-moving origin
        assert!((c.profile(c.speed() * 3.0, 3.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn soliton_peak_background_and_width() {
        let s = reference_soliton();
        assert!((s.profile(s.x0 + s.speed() * 5.0, 5.0) - 2.0).abs() < 1e-14);
        assert!((s.profile(1e4, 0.0) - 1.0).abs() < 1e-14);
        assert!((s.width_parameter() - 0.5).abs() < 1e-15);
        assert!((s.speed() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn encoding_wave_speeds_match_the_gate_table() {
        // eps = 1/4, k = sqrt(3)/4 -> 11/12; k = 1/2 -> 5/6 (r2 = 1, beta = 1/3)
        let a = EncodingWaveParams::new(0.25, 3.0_f64.sqrt() / 4.0, "A").unwrap();
        let b = EncodingWaveParams::new(0.25, 0.5, "B").unwrap();
        assert!((a.speed(1.0, 1.0 / 3.0) - 11.0 / 12.0).abs() <= f64::EPSILON);
        assert!((b.speed(1.0, 1.0 / 3.0) - 5.0 / 6.0).abs() <= f64::EPSILON);
        // eps = 0 drops the amplitude correction
        let silent = EncodingWaveParams::new(0.0, 0.7, "A").unwrap();
        assert!((silent.speed(1.2, 0.4) - (1.2 - 4.0 * 0.4 * 0.7 * 0.7)).abs() < 1e-15);
    }

    #[test]
    fn train_profile_trivial_points() {
        let train = EncodingTrain::new(
            vec![
                EncodingWaveParams::new(0.25, 3.0_f64.sqrt() / 4.0, "A").unwrap(),
                EncodingWaveParams::new(0.25, 0.5, "B").unwrap(),
            ],
            20.0,
        )
        .unwrap();
        assert!((train.profile(0.0) - 0.5).abs() < 1e-15);

        // at x = l/2 the envelope exponent is exactly 1
        let l = train.envelope_length;
        let expected = (-1.0f64).exp()
            * (0.25 * (3.0_f64.sqrt() / 4.0 * l / 2.0).cos().powi(2)
                + 0.25 * (0.5 * l / 2.0).cos().powi(2));
        assert!((train.profile(l / 2.0) - expected).abs() < 1e-15);

        let silent =
            EncodingTrain::new(vec![EncodingWaveParams::new(0.0, 0.5, "B").unwrap()], 20.0)
                .unwrap();
        for i in 0..100 {
            assert_eq!(silent.profile(-30.0 + 0.6 * i as f64), 0.0);
        }
    }

    #[test]
    fn initial_condition_superposes_train_and_soliton() {
        let grid = Grid::new(-64.0, 192.0, 8192).unwrap();
        let soliton = reference_soliton();
        let train = EncodingTrain::new(
            vec![
                EncodingWaveParams::new(0.25, 3.0_f64.sqrt() / 4.0, "A").unwrap(),
                EncodingWaveParams::new(0.25, 0.5, "B").unwrap(),
            ],
            20.0,
        )
        .unwrap();

        let field = build_initial_condition(&train, &soliton, &grid).unwrap();
        let at = |x: f64| field.values()[grid.nearest_index(x).unwrap()];

        // soliton tail at x = 0 is < 1e-6, so u(0) = 1/4 + 1/4 + 1
        assert!((at(0.0) - 1.5).abs() < 1e-6);
        // far field is the background
        assert!((at(150.0) - 1.0).abs() < 1e-9);
        // soliton peak with silent train
        let silent =
            EncodingTrain::new(vec![EncodingWaveParams::new(0.0, 0.5, "B").unwrap()], 20.0)
                .unwrap();
        let bare = build_initial_condition(&silent, &soliton, &grid).unwrap();
        assert!((bare.values()[grid.nearest_index(-17.0).unwrap()] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn initial_condition_rejects_small_grid() {
        let grid = Grid::new(-4.0, 4.0, 256).unwrap();
        let soliton = reference_soliton();
        let train =
            EncodingTrain::new(vec![EncodingWaveParams::new(0.25, 0.5, "B").unwrap()], 20.0)
                .unwrap();
        assert!(build_initial_condition(&train, &soliton, &grid).is_err());
    }

    #[test]
    fn collision_point_formula_and_failure() {
        // v = 4/3, v_n = 11/12, L = 17 -> (37.4, 40.8)
        let (x, t) = collision_point(4.0 / 3.0, 11.0 / 12.0, 17.0).unwrap();
        assert!((x - 37.4).abs() < 1e-12);
        assert!((t - 40.8).abs() < 1e-12);
        // v = 4/3, v_n = 5/6, L = 17 -> (28.333..., 34)
        let (x, t) = collision_point(4.0 / 3.0, 5.0 / 6.0, 17.0).unwrap();
        assert!((x - 85.0 / 3.0).abs() < 1e-12);
        assert!((t - 34.0).abs() < 1e-12);
        // stationary target
        let (x, t) = collision_point(2.0, 0.0, 10.0).unwrap();
        assert_eq!(x, 0.0);
        assert_eq!(t, 5.0);
        assert!(collision_point(1.0, 1.0, 10.0).is_err());
        assert!(collision_point(1.0, 1.5, 10.0).is_err());
    }
}

//! Conversion between the adimensional solver quantities and physical
//! units: every adimensional value is a ratio over a reference scale
//! (length D, time T, velocity v0 = D/T), plus a separate height rule
//! that maps the background level onto the rest water height.

use crate::error::{Error, Result};

/// Reference scales. Velocity is always D/T; the normalized dispersion
/// `nu` is the beta used by the adimensional equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    /// Time reference T in seconds.
    pub time_ref: f64,
    /// Length reference D in meters.
    pub length_ref: f64,
    /// Normalized dispersion coefficient (adimensional).
    pub nu: f64,
    /// Height rule factor in seconds: physical height = u * v0 * height_scale.
    /// Defaults to 10 T, which maps a unit background onto the rest height.
    pub height_scale: f64,
}

impl UnitSystem {
    pub fn new(time_ref: f64, length_ref: f64, nu: f64) -> Result<Self> {
        Self::with_height_scale(time_ref, length_ref, nu, 10.0 * time_ref)
    }

    pub fn with_height_scale(
        time_ref: f64,
        length_ref: f64,
        nu: f64,
        height_scale: f64,
    ) -> Result<Self> {
        if !(time_ref.is_finite() && time_ref > 0.0)
            || !(length_ref.is_finite() && length_ref > 0.0)
        {
            return Err(Error::Config(
                "unit references T and D must be positive and finite".into(),
            ));
        }
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::Config(format!("nu = {nu} must be > 0")));
        }
        if !(height_scale.is_finite() && height_scale > 0.0) {
            return Err(Error::Config(format!(
                "height scale {height_scale} must be > 0"
            )));
        }
        Ok(UnitSystem {
            time_ref,
            length_ref,
            nu,
            height_scale,
        })
    }

    /// Millimeter/millisecond bench scales: D = 1 mm, T = 1 ms, v0 = 1 m/s,
    /// nu = 1/3.
    pub fn benchtop() -> Self {
        UnitSystem::new(1e-3, 1e-3, 1.0 / 3.0).expect("static scales are valid")
    }

    /// Velocity reference v0 = D/T in meters per second.
    pub fn velocity_ref(&self) -> f64 {
        self.length_ref / self.time_ref
    }
}

/// The kinds of quantity the converter understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Length,
    Time,
    Velocity,
    Height,
    Wavenumber,
    Wavelength,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::Length,
        Quantity::Time,
        Quantity::Velocity,
        Quantity::Height,
        Quantity::Wavenumber,
        Quantity::Wavelength,
    ];

    pub fn unit_symbol(self) -> &'static str {
        match self {
            Quantity::Length | Quantity::Height | Quantity::Wavelength => "m",
            Quantity::Time => "s",
            Quantity::Velocity => "m/s",
            Quantity::Wavenumber => "1/m",
        }
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "length" => Ok(Quantity::Length),
            "time" => Ok(Quantity::Time),
            "velocity" => Ok(Quantity::Velocity),
            "height" => Ok(Quantity::Height),
            "wavenumber" => Ok(Quantity::Wavenumber),
            "wavelength" => Ok(Quantity::Wavelength),
            other => Err(Error::Domain(format!(
                "unknown quantity kind '{other}' (expected length, time, velocity, height, wavenumber, or wavelength)"
            ))),
        }
    }
}

/// Adimensional value -> dimensioned value (SI).
pub fn to_physical(value: f64, kind: Quantity, u: &UnitSystem) -> f64 {
    match kind {
        Quantity::Length | Quantity::Wavelength => value * u.length_ref,
        Quantity::Time => value * u.time_ref,
        Quantity::Velocity => value * u.velocity_ref(),
        Quantity::Height => value * u.velocity_ref() * u.height_scale,
        Quantity::Wavenumber => value / u.length_ref,
    }
}

/// Dimensioned value (SI) -> adimensional value; inverse of [`to_physical`].
pub fn to_adimensional(value: f64, kind: Quantity, u: &UnitSystem) -> f64 {
    match kind {
        Quantity::Length | Quantity::Wavelength => value / u.length_ref,
        Quantity::Time => value / u.time_ref,
        Quantity::Velocity => value / u.velocity_ref(),
        Quantity::Height => value / (u.velocity_ref() * u.height_scale),
        Quantity::Wavenumber => value * u.length_ref,
    }
}

/// Nominal bench hardware for the thought experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalSetup {
    /// Side of the square basin in meters.
    pub bucket_side: f64,
    /// Water height at rest in meters.
    pub rest_height: f64,
    /// Gravitational acceleration in m/s^2.
    pub gravity: f64,
}

impl Default for PhysicalSetup {
    fn default() -> Self {
        PhysicalSetup {
            bucket_side: 0.10,
            rest_height: 0.01,
            gravity: 9.80665,
        }
    }
}

/// Shallow-water estimate of the surface wave speed, sqrt(g h0).
pub fn shallow_water_speed(setup: &PhysicalSetup) -> Result<f64> {
    if !(setup.rest_height.is_finite() && setup.rest_height > 0.0) {
        return Err(Error::Domain(format!(
            "rest height {} must be > 0",
            setup.rest_height
        )));
    }
    if !(setup.gravity.is_finite() && setup.gravity > 0.0) {
        return Err(Error::Domain(format!(
            "gravity {} must be > 0",
            setup.gravity
        )));
    }
    Ok((setup.gravity * setup.rest_height).sqrt())
}

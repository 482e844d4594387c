//! The physical dimensioning table: every adimensional parameter of the
//! configured experiment mapped to SI units, plus consistency notes on
//! the nominal bench hardware.

use std::f64::consts::PI;

use kdvrc_core::reservoir::GateConfig;
use kdvrc_core::units::{shallow_water_speed, to_physical, PhysicalSetup, Quantity, UnitSystem};

use crate::error::Result;
use crate::formats::sig10;

#[derive(Debug, Clone)]
pub struct UnitRow {
    pub name: String,
    pub adimensional: f64,
    pub physical: f64,
    pub unit: &'static str,
}

#[derive(Debug, Clone)]
pub struct UnitsReport {
    pub rows: Vec<UnitRow>,
    pub notes: Vec<String>,
}

impl UnitsReport {
    pub fn row(&self, name: &str) -> Option<&UnitRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<38} {:>16} {:>16} {}\n",
            "quantity", "adimensional", "physical", "unit"
        ));
        for r in &self.rows {
            out.push_str(&format!(
                "{:<38} {:>16.10} {:>16.6e} {}\n",
                r.name, r.adimensional, r.physical, r.unit
            ));
        }
        if !self.notes.is_empty() {
            out.push_str("\nnotes:\n");
            for n in &self.notes {
                out.push_str("  - ");
                out.push_str(n);
                out.push('\n');
            }
        }
        out
    }
}

pub fn units_report(
    cfg: &GateConfig,
    units: &UnitSystem,
    setup: &PhysicalSetup,
) -> Result<UnitsReport> {
    let mut rows = Vec::new();
    let mut push = |name: String, value: f64, kind: Quantity| {
        rows.push(UnitRow {
            name,
            adimensional: value,
            physical: sig10(to_physical(value, kind, units)),
            unit: kind.unit_symbol(),
        });
    };

    push("reference length D".into(), 1.0, Quantity::Length);
    push("reference time T".into(), 1.0, Quantity::Time);
    push("reference velocity v0".into(), 1.0, Quantity::Velocity);

    let s = &cfg.soliton;
    push("soliton amplitude".into(), s.amplitude(), Quantity::Height);
    push("soliton background".into(), s.r2, Quantity::Height);
    push(
        "soliton wavenumber".into(),
        s.width_parameter(),
        Quantity::Wavenumber,
    );
    push(
        "soliton wavelength".into(),
        2.0 * PI / s.width_parameter(),
        Quantity::Wavelength,
    );
    push("soliton velocity".into(), s.speed(), Quantity::Velocity);
    push(
        "soliton delay time".into(),
        cfg.delay / s.speed(),
        Quantity::Time,
    );
    push(
        "excitation length".into(),
        cfg.envelope_length,
        Quantity::Length,
    );

    for w in &cfg.variables {
        push(
            format!("encoding {} amplitude", w.label),
            w.epsilon,
            Quantity::Height,
        );
        push(
            format!("encoding {} wavenumber", w.label),
            w.wavenumber,
            Quantity::Wavenumber,
        );
        push(
            format!("encoding {} wavelength", w.label),
            2.0 * PI / w.wavenumber,
            Quantity::Wavelength,
        );
        push(
            format!("encoding {} velocity", w.label),
            w.speed(s.r2, s.beta),
            Quantity::Velocity,
        );
    }

    let mut notes = Vec::new();
    let swe = shallow_water_speed(setup)?;
    let v0 = units.velocity_ref();
    notes.push(format!(
        "shallow-water speed check: sqrt(g h0) = {:.3} m/s against the velocity reference v0 = {:.3} m/s (ratio {:.2}); the nominal bench height {} m sits an order of magnitude below the speed-matched regime",
        swe,
        v0,
        swe / v0,
        setup.rest_height,
    ));
    for w in &cfg.variables {
        let lambda = 2.0 * PI / w.wavenumber;
        let four_pi_dev = (lambda - 4.0 * PI).abs() / (4.0 * PI);
        if four_pi_dev > 1e-6 {
            notes.push(format!(
                "wavelength check: encoding {} has lambda = 2 pi / k = {:.4} (adimensional), which is {:.1}% away from the 4 pi value that applies only to k = 1/2 waves",
                w.label,
                lambda,
                100.0 * four_pi_dev,
            ));
        }
    }

    Ok(UnitsReport { rows, notes })
}

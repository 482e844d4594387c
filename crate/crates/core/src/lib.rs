//! Shallow-water wave computing in software.
//!
//! Boolean inputs are encoded as truncated cos^2 wave trains riding ahead
//! of a solitary wave; the composite field evolves under the
//! Korteweg-de Vries equation, collides, and is sampled at a detection
//! point. A linear readout trained by one direct solve (an extreme
//! learning machine) turns the samples into logic outputs.
//!
//! Module map:
//! - [`elliptic`]: Jacobi elliptic sine and complete integral K(m)
//! - [`waves`]: cnoidal/soliton/encoding-train generators and collision geometry
//! - [`solver`]: periodic pseudo-spectral KdV integration with diagnostics
//! - [`reservoir`]: Boolean encoding, evolution, detection-point readout
//! - [`elm`]: readout training (exact and pseudoinverse), inference, decoding
//! - [`units`]: adimensional <-> physical conversions

pub mod elliptic;
pub mod elm;
pub mod error;
pub mod reservoir;
pub mod solver;
mod spectral;
pub mod units;
pub mod waves;

pub use error::{Error, Result};

//! Design models for quantum-paraelectric (SrTiO3 / KTaO3) varactors and the
//! degenerate parametric amplifiers built from them.
//!
//! The crate is layered bottom-up:
//!
//! - [`material`]: field-dependent permittivity and loss tangent of the dielectric.
//! - [`varactor`]: the nonlinear parallel-plate capacitor, its charge-voltage curve
//!   and the charge derivatives of its stored energy.
//! - [`resonator`]: LC mode frequency, zero-point fluctuations, three-wave-mixing
//!   strength and effective Kerr at a DC operating point.
//! - [`amplifier`]: loss-rate budget, reflection gain and compression estimate.
//! - [`sweep`]: bias, field, geometry and pump sweeps plus the 3WM optimizer.
//!
//! All quantities are SI internally (rad/s for rates and frequencies).

pub mod amplifier;
pub mod constants;
mod error;
pub mod material;
pub mod numerics;
pub mod resonator;
pub mod sweep;
pub mod varactor;

pub use error::{Error, Result};

pub use amplifier::{CompressionEstimate, FrequencyGrid, GainProfile, RateBudget};
pub use material::{DielectricResponse, LossTangent, MaterialParams};
pub use resonator::{CircuitParams, DriveSpec, LinearMode, ModeCoefficients};
pub use varactor::{ChargePoint, LocalDerivatives, VaractorDesign};

/// Crate version, recorded in sweep metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

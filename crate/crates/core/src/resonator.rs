//! Lumped LC mode around a DC operating point.
//!
//! For small charge excursions about the bias charge `q0`, the driven mode is
//! described by a frequency `omega0 = 1/sqrt(L C(v0))`, a three-wave-mixing
//! strength `xi` (pump at `2 omega0`) and an effective Kerr `K_eff`. Both nonlinear
//! coefficients are computed in the charge form (energy derivatives) and in the
//! voltage form (capacitance derivatives); the two are algebraically identical and
//! are cross-checked on every call.
//!
//! The Kerr-induced shift `omega0 -> omega0 + K_eff` is not applied.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::error::{require, Error, Result};
use crate::varactor::{LocalDerivatives, VaractorDesign};

/// Relative disagreement between the charge and voltage forms that is reported
/// as an internal-consistency failure.
pub const FORM_AGREEMENT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// L, H.
    pub inductance: f64,
    /// Q_ext = omega0 / kappa_ext.
    pub q_ext: f64,
}

impl CircuitParams {
    /// 0.5 nH, Q_ext = 100.
    pub fn reference() -> Self {
        Self {
            inductance: 0.5e-9,
            q_ext: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require(
            self.inductance.is_finite() && self.inductance > 0.0,
            "inductance",
            self.inductance,
            "must be finite and > 0",
        )?;
        require(
            self.q_ext.is_finite() && self.q_ext > 0.0,
            "q_ext",
            self.q_ext,
            "must be finite and > 0",
        )
    }
}

/// Pump applied across the capacitor at `2 omega0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    /// AC voltage amplitude, V.
    pub v_ac: f64,
    /// Drive phase theta, rad.
    pub theta: f64,
}

impl DriveSpec {
    pub fn new(v_ac: f64, theta: f64) -> Self {
        Self { v_ac, theta }
    }

    /// 1 mV, zero phase.
    pub fn reference() -> Self {
        Self::new(1e-3, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        require(
            self.v_ac.is_finite() && self.v_ac >= 0.0,
            "v_ac",
            self.v_ac,
            "must be finite and >= 0",
        )?;
        require(self.theta.is_finite(), "theta", self.theta, "must be finite")
    }

    /// AC charge amplitude `q_ac = v_ac C(v0)`, C.
    pub fn charge_amplitude(&self, capacitance: f64) -> f64 {
        self.v_ac * capacitance
    }
}

/// Linear part of the mode at one bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearMode {
    pub bias: f64,
    /// C(v0), F.
    pub capacitance: f64,
    /// omega0, rad/s.
    pub omega0: f64,
    /// sqrt(L/C), Ω.
    pub z0: f64,
    /// C.
    pub q_zpf: f64,
    /// Wb.
    pub phi_zpf: f64,
    /// V.
    pub v_zpf: f64,
}

impl LinearMode {
    fn from_capacitance(bias: f64, capacitance: f64, inductance: f64) -> Self {
        let z0 = (inductance / capacitance).sqrt();
        let q_zpf = (HBAR / (2.0 * z0)).sqrt();
        Self {
            bias,
            capacitance,
            omega0: 1.0 / (inductance * capacitance).sqrt(),
            z0,
            q_zpf,
            phi_zpf: (z0 * HBAR / 2.0).sqrt(),
            v_zpf: q_zpf / capacitance,
        }
    }
}

/// Linear and nonlinear mode coefficients at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub linear: LinearMode,
    /// xi, rad/s.
    #[serde(with = "complex_parts")]
    pub xi: Complex64,
    /// K_eff, rad/s.
    pub k_eff: f64,
}

impl ModeCoefficients {
    pub fn omega0(&self) -> f64 {
        self.linear.omega0
    }

    pub fn xi_magnitude(&self) -> f64 {
        self.xi.norm()
    }

    /// |xi| / K_eff.
    pub fn figure_of_merit(&self) -> f64 {
        self.xi.norm() / self.k_eff
    }
}

mod complex_parts {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        (z.re, z.im).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let (re, im) = <(f64, f64)>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Frequency and zero-point fluctuations at bias `v0`.
pub fn mode(v0: f64, design: &VaractorDesign, circuit: &CircuitParams) -> Result<LinearMode> {
    circuit.validate()?;
    let c = design.capacitance(v0)?;
    Ok(LinearMode::from_capacitance(v0, c, circuit.inductance))
}

/// `xi` from the charge form `-U_c''' q_ac q_zpf^2 e^{-i theta} / 2 hbar`.
pub fn three_wave_strength_charge_form(local: &LocalDerivatives, linear: &LinearMode, drive: &DriveSpec) -> Complex64 {
    let q_ac = drive.charge_amplitude(local.capacitance);
    let magnitude = -local.u3 * q_ac * linear.q_zpf * linear.q_zpf / (2.0 * HBAR);
    Complex64::from_polar(1.0, -drive.theta) * magnitude
}

/// `xi` from the voltage form `C'(v0) v_ac v_zpf^2 e^{-i theta} / 2 hbar`.
pub fn three_wave_strength_voltage_form(local: &LocalDerivatives, linear: &LinearMode, drive: &DriveSpec) -> Complex64 {
    let magnitude = local.dc_dv * drive.v_ac * linear.v_zpf * linear.v_zpf / (2.0 * HBAR);
    Complex64::from_polar(1.0, -drive.theta) * magnitude
}

/// `K_eff` from the charge form `U_c'''' q_zpf^4 / 2 hbar`.
pub fn kerr_charge_form(local: &LocalDerivatives, linear: &LinearMode) -> f64 {
    local.u4 * linear.q_zpf.powi(4) / (2.0 * HBAR)
}

/// `K_eff` from the voltage form `(-C'' + 3 C'^2 / C) v_zpf^4 / 2 hbar`.
pub fn kerr_voltage_form(local: &LocalDerivatives, linear: &LinearMode) -> f64 {
    let c = local.capacitance;
    (-local.d2c_dv2 + 3.0 * local.dc_dv * local.dc_dv / c) * linear.v_zpf.powi(4) / (2.0 * HBAR)
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn check_forms(quantity: &'static str, charge: f64, voltage: f64) -> Result<()> {
    let relative = relative_gap(charge, voltage);
    if relative > FORM_AGREEMENT_LIMIT || !relative.is_finite() {
        return Err(Error::Consistency {
            quantity,
            first: charge,
            second: voltage,
            relative,
        });
    }
    Ok(())
}

/// Three-wave-mixing strength `xi` (rad/s) at bias `v0`; the voltage form is returned.
pub fn three_wave_strength(
    v0: f64,
    drive: &DriveSpec,
    design: &VaractorDesign,
    circuit: &CircuitParams,
) -> Result<Complex64> {
    drive.validate()?;
    circuit.validate()?;
    let local = design.local_derivatives(v0)?;
    let linear = LinearMode::from_capacitance(v0, local.capacitance, circuit.inductance);
    let by_charge = three_wave_strength_charge_form(&local, &linear, drive);
    let by_voltage = three_wave_strength_voltage_form(&local, &linear, drive);
    check_forms("xi", by_charge.norm(), by_voltage.norm())?;
    Ok(by_voltage)
}

/// Effective Kerr `K_eff` (rad/s) at bias `v0`; the voltage form is returned.
pub fn kerr_strength(v0: f64, design: &VaractorDesign, circuit: &CircuitParams) -> Result<f64> {
    circuit.validate()?;
    let local = design.local_derivatives(v0)?;
    let linear = LinearMode::from_capacitance(v0, local.capacitance, circuit.inductance);
    let by_charge = kerr_charge_form(&local, &linear);
    let by_voltage = kerr_voltage_form(&local, &linear);
    check_forms("K_eff", by_charge, by_voltage)?;
    Ok(by_voltage)
}

/// All mode coefficients at bias `v0`.
pub fn mode_coefficients(
    v0: f64,
    drive: &DriveSpec,
    design: &VaractorDesign,
    circuit: &CircuitParams,
) -> Result<ModeCoefficients> {
    Ok(ModeCoefficients {
        linear: mode(v0, design, circuit)?,
        xi: three_wave_strength(v0, drive, design, circuit)?,
        k_eff: kerr_strength(v0, design, circuit)?,
    })
}

/// Pump strength expressed as `(q_ac / 2 q_zpf)^2`.
///
/// One of several possible photon-number conventions; informational only.
pub fn pump_photons(v0: f64, drive: &DriveSpec, design: &VaractorDesign, circuit: &CircuitParams) -> Result<f64> {
    let linear = mode(v0, design, circuit)?;
    let q_ac = drive.charge_amplitude(linear.capacitance);
    Ok((q_ac / (2.0 * linear.q_zpf)).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::TWO_PI;
    use crate::material::MaterialParams;
    use approx::assert_relative_eq;

    fn sto() -> VaractorDesign {
        VaractorDesign::reference(MaterialParams::strontium_titanate())
    }

    fn kto() -> VaractorDesign {
        VaractorDesign::reference(MaterialParams::potassium_tantalate())
    }

    #[test]
    fn mode_frequencies_at_quoted_biases() {
        let c = CircuitParams::reference();
        let f = mode(9.3e-3, &sto(), &c).unwrap().omega0 / TWO_PI;
        assert!((f / 2.072e9 - 1.0).abs() < 5e-3, "{f}");
        let f = mode(66e-3, &kto(), &c).unwrap().omega0 / TWO_PI;
        assert!((f / 4.882e9 - 1.0).abs() < 5e-3, "{f}");
    }

    #[test]
    fn zero_point_product() {
        let m = mode(0.05, &sto(), &CircuitParams::reference()).unwrap();
        assert_relative_eq!(m.q_zpf * m.phi_zpf, HBAR / 2.0, max_relative = 1e-12);
        assert_relative_eq!(m.v_zpf, m.q_zpf / m.capacitance, max_relative = 1e-15);
        assert_relative_eq!(m.omega0, 1.0 / (0.5e-9 * m.capacitance).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn xi_magnitudes() {
        let c = CircuitParams::reference();
        let d = DriveSpec::reference();
        let xi = three_wave_strength(9.3e-3, &d, &sto(), &c).unwrap().norm() / TWO_PI;
        assert!((xi / 26e6 - 1.0).abs() < 0.05, "{xi}");
        let xi = three_wave_strength(66e-3, &d, &kto(), &c).unwrap().norm() / TWO_PI;
        assert!((xi / 9.5e6 - 1.0).abs() < 0.05, "{xi}");
        assert_eq!(
            three_wave_strength(0.0, &d, &sto(), &c).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn phase_rotates_xi() {
        let c = CircuitParams::reference();
        let base = three_wave_strength(0.02, &DriveSpec::new(1e-3, 0.0), &sto(), &c).unwrap();
        let theta = 0.7;
        let rotated = three_wave_strength(0.02, &DriveSpec::new(1e-3, theta), &sto(), &c).unwrap();
        let expected = base * Complex64::from_polar(1.0, -theta);
        assert_relative_eq!(rotated.re, expected.re, max_relative = 1e-15);
        assert_relative_eq!(rotated.im, expected.im, max_relative = 1e-15);
    }

    #[test]
    fn kerr_scale_and_zero_bias() {
        let c = CircuitParams::reference();
        let k = kerr_strength(9.3e-3, &sto(), &c).unwrap() / TWO_PI;
        assert!(k > 0.03 && k < 0.3, "{k}");
        let k0 = kerr_strength(0.0, &sto(), &c).unwrap();
        assert!(k0 > 0.0 && k0 > k * TWO_PI);
    }

    #[test]
    fn negative_drive_rejected() {
        let r = three_wave_strength(0.01, &DriveSpec::new(-1e-3, 0.0), &sto(), &CircuitParams::reference());
        assert!(matches!(r, Err(Error::InvalidParameter { name: "v_ac", .. })));
    }

    #[test]
    fn pump_photon_diagnostic_is_large() {
        let n = pump_photons(9.3e-3, &DriveSpec::reference(), &sto(), &CircuitParams::reference()).unwrap();
        assert!(n > 1e5 && n < 1e8, "{n}");
    }
}

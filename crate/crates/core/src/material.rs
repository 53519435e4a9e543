//! Modified Landau-Ginzburg-Devonshire dielectric model of a quantum paraelectric.
//!
//! The real part of the permittivity is `eps00 * G(lambda)` with
//!
//! ```text
//! lambda = sqrt(lambda_s^2 + (E / E_N)^2)
//! s      = sqrt(lambda^2 + eta^3)
//! G      = 1 / ((s + lambda)^(2/3) + (s - lambda)^(2/3) - eta)
//! y      = (s + lambda)^(1/3) - (s - lambda)^(1/3)
//! ```
//!
//! `y` is the real root of `y^3 + 3 eta y = 2 lambda`, and `G = 1 / (y^2 + eta)`.
//! The imaginary part only enters through the loss tangent `tan(delta) = Gamma * G`.

use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};

/// Table constants for one quantum-paraelectric material at one temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    /// eps00 / eps0.
    pub eps00_rel: f64,
    /// Curie temperature T_c, K.
    pub curie_temp: f64,
    /// Debye temperature theta_F, K.
    pub debye_temp: f64,
    /// Renormalizing field E_N, V/m.
    pub renorm_field: f64,
    /// Inhomogeneity lambda_s.
    pub inhomogeneity: f64,
    /// Multi-phonon loss coefficient A_1.
    pub a1: f64,
    /// Residual-piezoelectric loss coefficient A_2.
    pub a2: f64,
    /// Charged-defect loss coefficient A_3; not tabulated for STO/KTO.
    pub a3: Option<f64>,
    /// Charged defect density n_d.
    pub defect_density: f64,
    /// Operating temperature T, K.
    pub temperature: f64,
}

/// 1 V/µm in V/m.
pub const V_PER_UM: f64 = 1e6;

impl MaterialParams {
    /// Strontium titanate, 10 mK.
    pub fn strontium_titanate() -> Self {
        Self {
            eps00_rel: 2080.0,
            curie_temp: 42.0,
            debye_temp: 175.0,
            renorm_field: 1.93 * V_PER_UM,
            inhomogeneity: 0.018,
            a1: 2.45e-4,
            a2: 2.45e-3,
            a3: None,
            defect_density: 0.0,
            temperature: 1e-2,
        }
    }

    /// Potassium tantalate, 10 mK.
    pub fn potassium_tantalate() -> Self {
        Self {
            eps00_rel: 1390.0,
            curie_temp: 32.5,
            debye_temp: 170.0,
            renorm_field: 1.56 * V_PER_UM,
            inhomogeneity: 0.020,
            a1: 2.06e-4,
            a2: 4e-4,
            a3: None,
            defect_density: 0.0,
            temperature: 1e-2,
        }
    }

    /// Looks up a built-in material by short name (`sto` or `kto`).
    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "sto" | "srtio3" => Some(Self::strontium_titanate()),
            "kto" | "ktao3" => Some(Self::potassium_tantalate()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = "must be finite and > 0";
        let non_negative = "must be finite and >= 0";
        let pos = |x: f64| x.is_finite() && x > 0.0;
        let non_neg = |x: f64| x.is_finite() && x >= 0.0;
        require(pos(self.eps00_rel), "eps00_rel", self.eps00_rel, positive)?;
        require(pos(self.curie_temp), "curie_temp", self.curie_temp, positive)?;
        require(pos(self.debye_temp), "debye_temp", self.debye_temp, positive)?;
        require(pos(self.renorm_field), "renorm_field", self.renorm_field, positive)?;
        require(
            non_neg(self.inhomogeneity),
            "inhomogeneity",
            self.inhomogeneity,
            non_negative,
        )?;
        require(non_neg(self.a1), "a1", self.a1, non_negative)?;
        require(non_neg(self.a2), "a2", self.a2, non_negative)?;
        if let Some(a3) = self.a3 {
            require(non_neg(a3), "a3", a3, non_negative)?;
        }
        require(
            non_neg(self.defect_density),
            "defect_density",
            self.defect_density,
            non_negative,
        )?;
        require(non_neg(self.temperature), "temperature", self.temperature, non_negative)?;
        if self.temperature >= self.debye_temp / 10.0 {
            return Err(Error::Domain(format!(
                "temperature {} K is not small compared to the Debye temperature {} K (need T < theta_F/10)",
                self.temperature, self.debye_temp
            )));
        }
        if self.defect_density > 0.0 && self.a3.is_none() {
            return Err(Error::Configuration(format!(
                "defect_density = {} requires the defect loss coefficient a3",
                self.defect_density
            )));
        }
        Ok(())
    }

    /// Quantum-paraelectric parameter `eta = (theta_F/T_c) sqrt(1/16 + (T/theta_F)^2) - 1`.
    pub fn eta(&self) -> Result<f64> {
        self.validate()?;
        let t = self.temperature / self.debye_temp;
        let eta = self.debye_temp / self.curie_temp * (0.0625 + t * t).sqrt() - 1.0;
        if eta < 0.0 {
            return Err(Error::Domain(format!(
                "eta = {eta} < 0: material is ferroelectric at {} K, model does not apply",
                self.temperature
            )));
        }
        Ok(eta)
    }

    /// `eta`, additionally required to be strictly positive so that `G` stays bounded.
    pub(crate) fn paraelectric_eta(&self) -> Result<f64> {
        let eta = self.eta()?;
        if eta > 0.0 {
            Ok(eta)
        } else {
            Err(Error::Domain(
                "eta = 0: the zero-field permittivity is unbounded".to_string(),
            ))
        }
    }

    /// Normalized bias `lambda` for field `E` (V/m).
    pub fn normalized_bias(&self, field: f64) -> f64 {
        normalized_bias(field, self)
    }

    /// Relative permittivity at field `E` (V/m).
    pub fn permittivity(&self, field: f64) -> Result<f64> {
        permittivity(field, self)
    }

    /// Full dielectric state at field `E` (V/m).
    pub fn response(&self, field: f64) -> Result<DielectricResponse> {
        let eta = self.paraelectric_eta()?;
        Ok(self.response_with_eta(field, eta))
    }

    /// Same as [`response`](Self::response) with a precomputed, already validated `eta`.
    pub(crate) fn response_with_eta(&self, field: f64, eta: f64) -> DielectricResponse {
        let lambda = normalized_bias(field, self);
        let roots = CubeRoots::new(lambda, eta);
        let greens = roots.greens();
        let displacement = roots.displacement();
        let loss = self.loss_components(greens, displacement);
        DielectricResponse {
            bias_field: field,
            lambda,
            eta,
            greens,
            displacement,
            eps_rel: self.eps00_rel * greens,
            loss,
            gamma: loss.total / greens,
        }
    }

    fn loss_components(&self, greens: f64, displacement: f64) -> LossTangent {
        let t = self.temperature / self.curie_temp;
        let phonon = self.a1 * t * t * greens.powf(1.5);
        let piezo = self.a2 * displacement * displacement * greens;
        let defect = match self.a3 {
            Some(a3) => a3 * self.defect_density * greens,
            None => 0.0,
        };
        LossTangent {
            phonon,
            piezo,
            defect,
            total: phonon + piezo + defect,
        }
    }
}

/// Loss tangent and its three contributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossTangent {
    /// tan(delta_1): multi-phonon scattering.
    pub phonon: f64,
    /// tan(delta_2): residual ferroelectric displacement.
    pub piezo: f64,
    /// tan(delta_3): charged defects.
    pub defect: f64,
    pub total: f64,
}

impl LossTangent {
    /// Internal quality factor `1 / tan(delta)`.
    pub fn q_int(&self) -> f64 {
        1.0 / self.total
    }
}

/// Dielectric state at one bias field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DielectricResponse {
    /// E, V/m.
    pub bias_field: f64,
    pub lambda: f64,
    pub eta: f64,
    /// Real part of the Green's function, G.
    pub greens: f64,
    /// Residual ferroelectric displacement, y.
    pub displacement: f64,
    pub eps_rel: f64,
    pub loss: LossTangent,
    /// Gamma = Gamma_1 + Gamma_2 + Gamma_3, so that `loss.total = gamma * greens`.
    pub gamma: f64,
}

/// The two cube roots `(s ± lambda)^(1/3)` shared by `G` and `y`.
#[derive(Debug, Clone, Copy)]
struct CubeRoots {
    lambda: f64,
    eta: f64,
    plus: f64,
    minus: f64,
}

impl CubeRoots {
    fn new(lambda: f64, eta: f64) -> Self {
        let eta3 = eta * eta * eta;
        let s = (lambda * lambda + eta3).sqrt();
        // s - lambda = eta^3 / (s + lambda), without the cancellation
        let diff = eta3 / (s + lambda);
        Self {
            lambda,
            eta,
            plus: (s + lambda).cbrt(),
            minus: diff.cbrt(),
        }
    }

    fn greens(&self) -> f64 {
        1.0 / (self.plus * self.plus + self.minus * self.minus - self.eta)
    }

    fn displacement(&self) -> f64 {
        // a - b = (a^3 - b^3) / (a^2 + ab + b^2) and a^3 - b^3 = 2 lambda
        let (a, b) = (self.plus, self.minus);
        2.0 * self.lambda / (a * a + a * b + b * b)
    }
}

/// Normalized bias `lambda = sqrt(lambda_s^2 + (E/E_N)^2)`.
pub fn normalized_bias(field: f64, params: &MaterialParams) -> f64 {
    params.inhomogeneity.hypot(field / params.renorm_field)
}

/// `eta` of `params`; see [`MaterialParams::eta`].
pub fn eta(params: &MaterialParams) -> Result<f64> {
    params.eta()
}

/// Real part of the Green's function, `G(lambda)`.
pub fn greens(lambda: f64, eta: f64) -> f64 {
    CubeRoots::new(lambda, eta).greens()
}

/// Residual ferroelectric displacement `y(lambda)`.
pub fn displacement(lambda: f64, eta: f64) -> f64 {
    CubeRoots::new(lambda, eta).displacement()
}

/// `dy/dlambda = 2G/3`.
pub fn displacement_slope(lambda: f64, eta: f64) -> f64 {
    2.0 * greens(lambda, eta) / 3.0
}

/// `dG/dlambda = -(4/3) G^3 y`.
pub fn greens_slope(lambda: f64, eta: f64) -> f64 {
    let roots = CubeRoots::new(lambda, eta);
    let g = roots.greens();
    -4.0 / 3.0 * g * g * g * roots.displacement()
}

/// `d^2G/dlambda^2 = (16/3) G^5 y^2 - (8/9) G^4`.
pub fn greens_curvature(lambda: f64, eta: f64) -> f64 {
    let roots = CubeRoots::new(lambda, eta);
    let g = roots.greens();
    let y = roots.displacement();
    let g4 = g * g * g * g;
    16.0 / 3.0 * g4 * g * y * y - 8.0 / 9.0 * g4
}

/// Relative permittivity `eps00_rel * G(lambda(E))`.
pub fn permittivity(field: f64, params: &MaterialParams) -> Result<f64> {
    let eta = params.paraelectric_eta()?;
    Ok(params.eps00_rel * greens(normalized_bias(field, params), eta))
}

/// Loss tangent and its components at field `E`.
pub fn loss_tangent(field: f64, params: &MaterialParams) -> Result<LossTangent> {
    Ok(params.response(field)?.loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sto() -> MaterialParams {
        MaterialParams::strontium_titanate()
    }

    fn kto() -> MaterialParams {
        MaterialParams::potassium_tantalate()
    }

    #[test]
    fn eta_table_values() {
        assert_relative_eq!(sto().eta().unwrap(), 175.0 / 168.0 - 1.0, max_relative = 1e-6);
        assert_relative_eq!(kto().eta().unwrap(), 170.0 / 130.0 - 1.0, max_relative = 1e-6);
        assert!((sto().eta().unwrap() - 0.041_67).abs() < 1e-5);
        assert!((kto().eta().unwrap() - 0.307_7).abs() < 1e-4);
    }

    #[test]
    fn eta_finite_temperature_reduces_to_zero_limit() {
        let mut m = sto();
        m.temperature = 0.0;
        assert_eq!(m.eta().unwrap(), 175.0 / 42.0 * 0.25 - 1.0);
        m.temperature = 1.0;
        assert!(m.eta().unwrap() > 175.0 / 168.0 - 1.0);
    }

    #[test]
    fn eta_boundary_is_zero_and_rejected() {
        let mut m = sto();
        m.debye_temp = 4.0 * m.curie_temp;
        m.temperature = 0.0;
        assert_eq!(m.eta().unwrap(), 0.0);
        // G would be unbounded at lambda = 0
        assert!(matches!(m.permittivity(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn eta_rejects_hot_material() {
        let mut m = sto();
        m.temperature = 17.5;
        assert!(matches!(m.eta(), Err(Error::Domain(_))));
        m.temperature = 17.4;
        assert!(m.eta().is_ok());
    }

    #[test]
    fn normalized_bias_examples() {
        assert_eq!(sto().normalized_bias(0.0), 0.018);
        let mut m = sto();
        m.inhomogeneity = 0.0;
        assert_eq!(m.normalized_bias(m.renorm_field), 1.0);
        assert!((sto().normalized_bias(4.65e4) - 0.0301).abs() < 5e-5);
        assert_eq!(sto().normalized_bias(-3e5), sto().normalized_bias(3e5));
    }

    #[test]
    fn greens_and_displacement_at_zero_bias() {
        let eta = 0.3;
        assert_relative_eq!(greens(0.0, eta), 1.0 / eta, max_relative = 1e-15);
        assert_eq!(displacement(0.0, eta), 0.0);
    }

    #[test]
    fn greens_table_values() {
        let g = greens(0.018, sto().eta().unwrap());
        assert!((g - 11.55).abs() < 0.005, "{g}");
        let g = greens(0.020, kto().eta().unwrap());
        assert!((g - 3.23).abs() < 0.005, "{g}");
    }

    #[test]
    fn large_lambda_uses_stable_branch() {
        // s - lambda underflows relative to lambda here
        let eta = 0.04;
        let lambda = 1e9;
        let y = displacement(lambda, eta);
        let residual = y * y * y + 3.0 * eta * y - 2.0 * lambda;
        assert!(residual.abs() <= 1e-12 * 2.0 * lambda);
        let g = greens(lambda, eta);
        assert_relative_eq!(g * (y * y + eta), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_bias_permittivity() {
        let eps = sto().permittivity(0.0).unwrap();
        assert!((eps / 24e3 - 1.0).abs() < 0.02, "{eps}");
        let eps = kto().permittivity(0.0).unwrap();
        assert!((eps / 4.5e3 - 1.0).abs() < 0.02, "{eps}");
        let eps = sto().permittivity(4.65e4).unwrap();
        assert!((eps / 1.66e4 - 1.0).abs() < 0.005, "{eps}");
    }

    #[test]
    fn ideal_crystal_closed_form() {
        let mut m = sto();
        m.inhomogeneity = 0.0;
        assert_relative_eq!(
            m.permittivity(0.0).unwrap(),
            m.eps00_rel / m.eta().unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn lossless_limit() {
        let mut m = sto();
        m.inhomogeneity = 0.0;
        m.temperature = 0.0;
        let loss = loss_tangent(0.0, &m).unwrap();
        assert_eq!(loss.total, 0.0);
    }

    #[test]
    fn loss_operating_points() {
        let sto_loss = loss_tangent(9.3e-3 / 200e-9, &sto()).unwrap();
        assert!((sto_loss.total / 1.64e-3 - 1.0).abs() < 0.01, "{:?}", sto_loss);
        assert!((sto_loss.q_int() / 6.1e2 - 1.0).abs() < 0.01);
        let kto_loss = loss_tangent(66e-3 / 200e-9, &kto()).unwrap();
        assert!((kto_loss.total / 1.35e-4 - 1.0).abs() < 0.01, "{:?}", kto_loss);
        assert!((kto_loss.q_int() / 7.4e3 - 1.0).abs() < 0.01);
        assert_eq!(kto_loss.defect, 0.0);
    }

    #[test]
    fn defects_without_coefficient_is_error() {
        let mut m = sto();
        m.defect_density = 1e-3;
        assert!(matches!(loss_tangent(0.0, &m), Err(Error::Configuration(_))));
        m.a3 = Some(2.0);
        let loss = loss_tangent(0.0, &m).unwrap();
        assert_relative_eq!(loss.defect, 2.0 * 1e-3 * m.response(0.0).unwrap().greens);
    }

    #[test]
    fn gamma_times_greens_is_loss() {
        let r = sto().response(2e5).unwrap();
        assert_relative_eq!(r.gamma * r.greens, r.loss.total, max_relative = 1e-14);
    }

    #[test]
    fn invalid_params_rejected() {
        let mut m = sto();
        m.renorm_field = 0.0;
        assert!(matches!(
            m.validate(),
            Err(Error::InvalidParameter {
                name: "renorm_field",
                ..
            })
        ));
        let mut m = kto();
        m.inhomogeneity = -0.1;
        assert!(m.validate().is_err());
        assert!(MaterialParams::builtin("STO").is_some());
        assert!(MaterialParams::builtin("bto").is_none());
    }
}

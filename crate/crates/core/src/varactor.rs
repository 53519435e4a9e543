//! Nonlinear parallel-plate capacitor with a quantum-paraelectric dielectric.
//!
//! With a uniform field `E = v/d`, the capacitor obeys
//!
//! ```text
//! C(v) = eps0 eps_r(v/d) A / d
//! q(v) = (eps0 A / d) * integral_0^v eps_r(v'/d) dv'
//! U_c(q) = integral_0^q v(q') dq'
//! ```
//!
//! The charge derivatives of `U_c` follow from `dU_c/dq = v` and `d^2U_c/dq^2 = 1/C`:
//! `U_c''' = -C'/C^3` and `U_c'''' = (-C'' + 3 C'^2 / C) / C^4`, where primes on `C`
//! are voltage derivatives. Those are evaluated with the analytic chain rule through
//! `G(lambda)`; no finite differences are involved.

use serde::{Deserialize, Serialize};

use crate::constants::EPSILON_0;
use crate::error::{require, Error, Result};
use crate::material::{self, MaterialParams};
use crate::numerics;

/// Relative tolerance of the charge and energy quadratures.
pub const QUADRATURE_REL_TOL: f64 = 1e-12;

/// Relative tolerance in `v` of [`VaractorDesign::voltage_from_charge`].
pub const INVERSION_REL_TOL: f64 = 1e-14;

/// Default largest bias magnitude, V.
pub const DEFAULT_V_MAX: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VaractorDesign {
    /// Plate area A, m².
    pub plate_area: f64,
    /// Dielectric thickness d, m.
    pub thickness: f64,
    pub material: MaterialParams,
    /// Largest |v| accepted by the charge-domain operations, V.
    pub v_max: f64,
}

/// Voltage-domain derivatives of the capacitance and the matching charge
/// derivatives of the stored energy at one bias point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalDerivatives {
    /// v, V.
    pub voltage: f64,
    /// E = v/d, V/m.
    pub field: f64,
    /// C, F.
    pub capacitance: f64,
    /// dC/dv, F/V.
    pub dc_dv: f64,
    /// d²C/dv², F/V².
    pub d2c_dv2: f64,
    /// d²U_c/dq² = 1/C, J/C².
    pub u2: f64,
    /// d³U_c/dq³, J/C³.
    pub u3: f64,
    /// d⁴U_c/dq⁴, J/C⁴.
    pub u4: f64,
}

/// Full state of the capacitor at one bias: [`LocalDerivatives`] plus charge and energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargePoint {
    pub voltage: f64,
    pub field: f64,
    /// q(v), C.
    pub charge: f64,
    pub capacitance: f64,
    pub dc_dv: f64,
    pub d2c_dv2: f64,
    /// U_c(q(v)), J.
    pub energy: f64,
    pub u2: f64,
    pub u3: f64,
    pub u4: f64,
}

impl VaractorDesign {
    pub fn new(plate_area: f64, thickness: f64, material: MaterialParams) -> Result<Self> {
        let design = Self {
            plate_area,
            thickness,
            material,
            v_max: DEFAULT_V_MAX,
        };
        design.validate()?;
        Ok(design)
    }

    /// (4 µm)² plates, 200 nm film.
    pub fn reference(material: MaterialParams) -> Self {
        Self {
            plate_area: 16e-12,
            thickness: 200e-9,
            material,
            v_max: DEFAULT_V_MAX,
        }
    }

    pub fn with_v_max(mut self, v_max: f64) -> Self {
        self.v_max = v_max;
        self
    }

    /// Same material and A/d ratio with a new thickness; `v_max` scales with `d`
    /// so that the accepted field range is unchanged.
    pub fn rescaled_thickness(&self, thickness: f64) -> Self {
        let ratio = thickness / self.thickness;
        Self {
            plate_area: self.plate_area * ratio,
            thickness,
            material: self.material,
            v_max: self.v_max * ratio,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = "must be finite and > 0";
        require(
            self.plate_area.is_finite() && self.plate_area > 0.0,
            "plate_area",
            self.plate_area,
            positive,
        )?;
        require(
            self.thickness.is_finite() && self.thickness > 0.0,
            "thickness",
            self.thickness,
            positive,
        )?;
        require(
            self.v_max.is_finite() && self.v_max > 0.0,
            "v_max",
            self.v_max,
            positive,
        )?;
        self.material.validate()
    }

    /// eps0 A / d, F.
    pub fn geometric_capacitance(&self) -> f64 {
        EPSILON_0 * self.plate_area / self.thickness
    }

    /// `C(v)`, F.
    pub fn capacitance(&self, v: f64) -> Result<f64> {
        self.validate()?;
        let eta = self.material.paraelectric_eta()?;
        Ok(self.capacitance_with_eta(v, eta))
    }

    fn capacitance_with_eta(&self, v: f64, eta: f64) -> f64 {
        let lambda = self.material.normalized_bias(v / self.thickness);
        self.geometric_capacitance() * self.material.eps00_rel * material::greens(lambda, eta)
    }

    /// `C`, `C'`, `C''` and the energy derivatives at bias `v`, analytically.
    pub fn local_derivatives(&self, v: f64) -> Result<LocalDerivatives> {
        self.validate()?;
        let eta = self.material.paraelectric_eta()?;
        let m = &self.material;
        // lambda = hypot(lambda_s, k v)
        let k = 1.0 / (self.thickness * m.renorm_field);
        let lambda = m.normalized_bias(v / self.thickness);
        let (dl, dl_sq, d2l) = if lambda > 0.0 {
            let dl = k * k * v / lambda;
            let d2l = k * k * m.inhomogeneity * m.inhomogeneity / (lambda * lambda * lambda);
            (dl, dl * dl, d2l)
        } else {
            // ideal crystal at v = 0: |dlambda/dv| = k and G'(0) = 0
            (0.0, k * k, 0.0)
        };
        let g0 = self.geometric_capacitance() * m.eps00_rel;
        let g = material::greens(lambda, eta);
        let g1 = material::greens_slope(lambda, eta);
        let g2 = material::greens_curvature(lambda, eta);

        let c = g0 * g;
        let c1 = g0 * g1 * dl;
        let c2 = if g1 == 0.0 {
            g0 * g2 * dl_sq
        } else {
            g0 * (g2 * dl_sq + g1 * d2l)
        };
        let c3 = c * c * c;
        Ok(LocalDerivatives {
            voltage: v,
            field: v / self.thickness,
            capacitance: c,
            dc_dv: c1,
            d2c_dv2: c2,
            u2: 1.0 / c,
            u3: -c1 / c3,
            u4: (-c2 + 3.0 * c1 * c1 / c) / (c3 * c),
        })
    }

    fn check_bias(&self, v: f64) -> Result<()> {
        if !v.is_finite() || v.abs() > self.v_max {
            return Err(Error::Domain(format!(
                "bias {v:e} V outside [-{0:e}, {0:e}] V",
                self.v_max
            )));
        }
        Ok(())
    }

    /// `q(v)` by quadrature of the permittivity, C. Odd in `v`.
    pub fn charge(&self, v: f64) -> Result<f64> {
        self.validate()?;
        self.check_bias(v)?;
        let eta = self.material.paraelectric_eta()?;
        self.charge_with_eta(v, eta)
    }

    fn charge_with_eta(&self, v: f64, eta: f64) -> Result<f64> {
        if v == 0.0 {
            return Ok(0.0);
        }
        let m = &self.material;
        let d = self.thickness;
        let integral = numerics::integrate(
            |u| material::greens(m.normalized_bias(u / d), eta),
            0.0,
            v.abs(),
            QUADRATURE_REL_TOL,
        )?;
        Ok(v.signum() * self.geometric_capacitance() * m.eps00_rel * integral.value)
    }

    /// Inverse of [`charge`](Self::charge), V.
    pub fn voltage_from_charge(&self, q: f64) -> Result<f64> {
        self.validate()?;
        let eta = self.material.paraelectric_eta()?;
        let q_max = self.charge_with_eta(self.v_max, eta)?;
        if !q.is_finite() || q.abs() > q_max {
            return Err(Error::Domain(format!(
                "charge {q:e} C outside [-{q_max:e}, {q_max:e}] C reachable with |v| <= {} V",
                self.v_max
            )));
        }
        if q == 0.0 {
            return Ok(0.0);
        }
        let target = q.abs();
        let mut failure = None;
        let v = numerics::find_root(
            |v| match self.charge_with_eta(v, eta) {
                Ok(qv) => qv - target,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            0.0,
            self.v_max,
            INVERSION_REL_TOL,
            f64::MIN_POSITIVE,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(q.signum() * v?)
    }

    /// Stored energy `U_c(q0) = integral_0^{v0} v C(v) dv`, J.
    pub fn energy(&self, v0: f64) -> Result<f64> {
        self.validate()?;
        self.check_bias(v0)?;
        let eta = self.material.paraelectric_eta()?;
        self.energy_with_eta(v0, eta)
    }

    fn energy_with_eta(&self, v0: f64, eta: f64) -> Result<f64> {
        if v0 == 0.0 {
            return Ok(0.0);
        }
        let integral = numerics::integrate(
            |u| u * self.capacitance_with_eta(u, eta),
            0.0,
            v0.abs(),
            QUADRATURE_REL_TOL,
        )?;
        Ok(integral.value)
    }

    /// Charge, energy and energy derivatives up to fourth order at bias `v0`.
    pub fn energy_and_derivatives(&self, v0: f64) -> Result<ChargePoint> {
        let local = self.local_derivatives(v0)?;
        self.check_bias(v0)?;
        let eta = self.material.paraelectric_eta()?;
        Ok(ChargePoint {
            voltage: v0,
            field: local.field,
            charge: self.charge_with_eta(v0, eta)?,
            capacitance: local.capacitance,
            dc_dv: local.dc_dv,
            d2c_dv2: local.d2c_dv2,
            energy: self.energy_with_eta(v0, eta)?,
            u2: local.u2,
            u3: local.u3,
            u4: local.u4,
        })
    }
}

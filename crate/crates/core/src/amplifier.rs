//! Single-port degenerate parametric amplifier in the input-output picture.
//!
//! In the frame rotating at half the pump frequency the reflection coefficient is
//!
//! ```text
//!            kappa_ext kappa/2 + i kappa_ext (Delta + omega - omega_p/2)
//! R(omega) = ----------------------------------------------------------- - 1
//!              Delta^2 + (kappa/2 + i (omega - omega_p/2))^2 - |xi|^2
//! ```
//!
//! with `Delta = omega0 - omega_p/2`. The mode is stable while
//! `|xi|^2 < Delta^2 + (kappa/2)^2`; at `Delta = 0` this is `|xi| < kappa/2`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, TWO_PI};
use crate::error::{require, Error, Result};
use crate::numerics;
use crate::resonator::{self, CircuitParams, DriveSpec};
use crate::varactor::VaractorDesign;

/// Loss and detuning rates of the mode, all in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBudget {
    pub omega0: f64,
    /// Q_int = 1/tan(delta); infinite for a lossless dielectric.
    pub q_int: f64,
    pub kappa_int: f64,
    pub kappa_ext: f64,
    pub kappa: f64,
    /// Delta = omega0 - omega_p/2.
    pub delta: f64,
    pub omega_p: f64,
}

impl RateBudget {
    /// Budget for explicit rates, pumped at `2 omega0`.
    pub fn from_rates(omega0: f64, kappa_int: f64, kappa_ext: f64) -> Result<Self> {
        require(
            omega0.is_finite() && omega0 > 0.0,
            "omega0",
            omega0,
            "must be finite and > 0",
        )?;
        require(
            kappa_int.is_finite() && kappa_int >= 0.0,
            "kappa_int",
            kappa_int,
            "must be finite and >= 0",
        )?;
        require(
            kappa_ext.is_finite() && kappa_ext > 0.0,
            "kappa_ext",
            kappa_ext,
            "must be finite and > 0",
        )?;
        Ok(Self {
            omega0,
            q_int: omega0 / kappa_int,
            kappa_int,
            kappa_ext,
            kappa: kappa_int + kappa_ext,
            delta: 0.0,
            omega_p: 2.0 * omega0,
        })
    }

    /// Moves the pump so that `omega0 - omega_p/2 = delta`.
    pub fn with_detuning(mut self, delta: f64) -> Self {
        self.delta = delta;
        self.omega_p = 2.0 * (self.omega0 - delta);
        self
    }

    pub fn half_pump(&self) -> f64 {
        0.5 * self.omega_p
    }

    /// |xi| / (kappa/2).
    pub fn pump_ratio(&self, xi_mag: f64) -> f64 {
        xi_mag / (0.5 * self.kappa)
    }

    /// |xi| at which the mode reaches parametric threshold.
    pub fn threshold_xi(&self) -> f64 {
        self.delta.hypot(0.5 * self.kappa)
    }
}

/// Loss budget at bias `v0`: `kappa_int = omega0 tan(delta)`, `kappa_ext = omega0 / Q_ext`.
pub fn rate_budget(v0: f64, design: &VaractorDesign, circuit: &CircuitParams) -> Result<RateBudget> {
    let linear = resonator::mode(v0, design, circuit)?;
    let tan_delta = design.material.response(v0 / design.thickness)?.loss.total;
    let omega0 = linear.omega0;
    RateBudget::from_rates(omega0, omega0 * tan_delta, omega0 / circuit.q_ext)
}

/// `R(omega)` for pump strength `|xi|`.
pub fn reflection(omega: f64, xi_mag: f64, rates: &RateBudget) -> Result<Complex64> {
    let x = omega - rates.half_pump();
    let half_kappa = 0.5 * rates.kappa;
    let numerator = Complex64::new(rates.kappa_ext * half_kappa, rates.kappa_ext * (rates.delta + x));
    let loaded = Complex64::new(half_kappa, x);
    let denominator = rates.delta * rates.delta + loaded * loaded - xi_mag * xi_mag;
    let scale = half_kappa * half_kappa + rates.delta * rates.delta + x * x + xi_mag * xi_mag;
    if denominator.norm() <= 4.0 * f64::EPSILON * scale {
        return Err(Error::Threshold {
            pump_ratio: rates.pump_ratio(xi_mag),
        });
    }
    Ok(numerator / denominator - 1.0)
}

/// Evenly spaced angular-frequency grid, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl FrequencyGrid {
    pub fn around(center: f64, half_span: f64, count: usize) -> Self {
        Self {
            start: center - half_span,
            stop: center + half_span,
            count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require(
            self.start.is_finite() && self.stop.is_finite() && self.start < self.stop,
            "frequency grid",
            self.stop - self.start,
            "needs finite start < stop",
        )?;
        require(
            self.count >= 2,
            "frequency grid count",
            self.count as f64,
            "must be >= 2",
        )
    }

    pub fn points(&self) -> Vec<f64> {
        numerics::linspace(self.start, self.stop, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainProfile {
    pub rates: RateBudget,
    pub xi_mag: f64,
    /// rad/s.
    pub frequencies: Vec<f64>,
    #[serde(skip)]
    pub reflection: Vec<Complex64>,
    /// 10 log10 |R|^2 on the grid.
    pub gain_db: Vec<f64>,
    /// Gain at omega_p/2, dB.
    pub peak_gain_db: f64,
    /// Full width where |R|^2 stays above half its value at omega_p/2, rad/s.
    /// `None` when the center gain is below 3 dB and no such crossing exists.
    pub bandwidth_3db: Option<f64>,
    /// |xi| / (kappa/2).
    pub pump_ratio: f64,
}

/// Power gain in dB of a reflection coefficient.
pub fn gain_db(r: Complex64) -> f64 {
    10.0 * r.norm_sqr().log10()
}

/// Gain profile for a given pump strength `|xi|` (rad/s).
pub fn gain_profile_for_xi(xi_mag: f64, rates: &RateBudget, grid: &FrequencyGrid) -> Result<GainProfile> {
    grid.validate()?;
    require(
        xi_mag.is_finite() && xi_mag >= 0.0,
        "xi",
        xi_mag,
        "must be finite and >= 0",
    )?;
    if xi_mag >= rates.threshold_xi() {
        return Err(Error::Threshold {
            pump_ratio: rates.pump_ratio(xi_mag),
        });
    }
    let frequencies = grid.points();
    let values = frequencies
        .par_iter()
        .map(|&w| reflection(w, xi_mag, rates))
        .collect::<Result<Vec<_>>>()?;
    let gain = values.iter().map(|&r| gain_db(r)).collect();
    let center = rates.half_pump();
    let center_power = reflection(center, xi_mag, rates)?.norm_sqr();
    let bandwidth_3db = half_power_width(xi_mag, rates, center_power)?;
    Ok(GainProfile {
        rates: *rates,
        xi_mag,
        frequencies,
        reflection: values,
        gain_db: gain,
        peak_gain_db: 10.0 * center_power.log10(),
        bandwidth_3db,
        pump_ratio: rates.pump_ratio(xi_mag),
    })
}

fn half_power_width(xi_mag: f64, rates: &RateBudget, center_power: f64) -> Result<Option<f64>> {
    // far from resonance |R|^2 -> 1, so a half-power crossing needs > 3 dB at the center
    if center_power <= 2.0 {
        return Ok(None);
    }
    let target = 0.5 * center_power;
    let center = rates.half_pump();
    let step = rates.kappa / 8.0;
    let excess = |w: f64| reflection(w, xi_mag, rates).map(|r| r.norm_sqr() - target);
    let mut edges = [0.0; 2];
    for (edge, sign) in edges.iter_mut().zip([-1.0, 1.0]) {
        let mut inner = center;
        let mut outer = center + sign * step;
        let mut steps = 0;
        while excess(outer)? > 0.0 {
            inner = outer;
            outer += sign * step;
            steps += 1;
            if steps > 1_000_000 {
                return Ok(None);
            }
        }
        let mut failure = None;
        let root = numerics::find_root(
            |w| match excess(w) {
                Ok(e) => e,
                Err(err) => {
                    failure.get_or_insert(err);
                    f64::NAN
                }
            },
            inner,
            outer,
            1e-15,
            1e-12 * rates.kappa,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        *edge = root?;
    }
    Ok(Some(edges[1] - edges[0]))
}

/// Gain profile at bias `v0` with the pump strength set by `drive`.
pub fn gain_profile(
    v0: f64,
    drive: &DriveSpec,
    design: &VaractorDesign,
    circuit: &CircuitParams,
    grid: &FrequencyGrid,
) -> Result<GainProfile> {
    let rates = rate_budget(v0, design, circuit)?;
    let xi = resonator::three_wave_strength(v0, drive, design, circuit)?;
    gain_profile_for_xi(xi.norm(), &rates, grid)
}

/// Photon number and circulating power at which the Kerr shift equals the linewidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionEstimate {
    /// N = kappa / K_eff.
    pub n_photons: f64,
    /// N hbar (omega0/2pi) (kappa/2pi), in dBm.
    pub p_circ_dbm_cyclic: f64,
    /// N hbar omega0 kappa, in dBm.
    pub p_circ_dbm_angular: f64,
}

/// Unit convention for the circulating power `N hbar omega0 kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerConvention {
    /// Frequency and linewidth entered in Hz.
    OrdinaryFrequency,
    /// Frequency and linewidth entered in rad/s.
    AngularFrequency,
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts / 1e-3).log10()
}

/// Circulating power in W for `n` photons.
pub fn circulating_power(n: f64, omega0: f64, kappa: f64, convention: PowerConvention) -> f64 {
    match convention {
        PowerConvention::OrdinaryFrequency => n * HBAR * (omega0 / TWO_PI) * (kappa / TWO_PI),
        PowerConvention::AngularFrequency => n * HBAR * omega0 * kappa,
    }
}

pub fn compression_estimate(k_eff: f64, rates: &RateBudget, omega0: f64) -> Result<CompressionEstimate> {
    if !(k_eff.is_finite() && k_eff > 0.0) {
        return Err(Error::Domain(format!("K_eff = {k_eff:e} rad/s must be > 0")));
    }
    let n = rates.kappa / k_eff;
    Ok(CompressionEstimate {
        n_photons: n,
        p_circ_dbm_cyclic: watts_to_dbm(circulating_power(
            n,
            omega0,
            rates.kappa,
            PowerConvention::OrdinaryFrequency,
        )),
        p_circ_dbm_angular: watts_to_dbm(circulating_power(
            n,
            omega0,
            rates.kappa,
            PowerConvention::AngularFrequency,
        )),
    })
}

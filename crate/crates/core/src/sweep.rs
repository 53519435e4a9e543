//! Parameter sweeps and the 3WM operating-point optimizer.
//!
//! Sweep points are independent and may be evaluated on the rayon pool; rows are
//! always returned in the order of the swept values, and the first failing point
//! (in that order) is the one reported.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplifier::{self, FrequencyGrid, RateBudget};
use crate::error::{Error, Result};
use crate::material::{LossTangent, MaterialParams};
use crate::numerics;
use crate::resonator::{self, CircuitParams, DriveSpec};
use crate::varactor::VaractorDesign;
use crate::VERSION;

/// Smallest number of grid points in the coarse stage of [`maximize_3wm`].
pub const OPTIMIZER_GRID_POINTS: usize = 401;

/// Bracket width at which the golden-section refinement stops, V.
pub const OPTIMIZER_RESOLUTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// DC bias v0, V.
    BiasVoltage,
    /// Bias field E, V/m.
    BiasField,
    /// Dielectric thickness d with A/d held fixed, m.
    PlateSeparation,
    /// |xi| / (kappa/2).
    PumpRatio,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            Self::BiasVoltage => "bias_voltage",
            Self::BiasField => "bias_field",
            Self::PlateSeparation => "plate_separation",
            Self::PumpRatio => "pump_ratio",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    /// In SI units of `variable`.
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
    #[serde(default)]
    pub execution: Execution,
}

impl SweepSpec {
    pub fn linear(variable: SweepVariable, min: f64, max: f64, count: usize) -> Self {
        Self {
            variable,
            min,
            max,
            count,
            spacing: Spacing::Linear,
            execution: Execution::Parallel,
        }
    }

    pub fn log(variable: SweepVariable, min: f64, max: f64, count: usize) -> Self {
        Self {
            spacing: Spacing::Log,
            ..Self::linear(variable, min, max, count)
        }
    }

    pub fn serial(mut self) -> Self {
        self.execution = Execution::Serial;
        self
    }

    /// Swept values, ascending. A single point requires `min == max`.
    pub fn values(&self) -> Result<Vec<f64>> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::Configuration(format!(
                "sweep range [{}, {}] is not finite",
                self.min, self.max
            )));
        }
        match self.count {
            0 => return Err(Error::Configuration("sweep needs at least one point".into())),
            1 if self.min == self.max => return Ok(vec![self.min]),
            1 => {
                return Err(Error::Configuration(format!(
                    "a one-point sweep needs min == max, got [{}, {}]",
                    self.min, self.max
                )))
            }
            _ if self.min >= self.max => {
                return Err(Error::Configuration(format!(
                    "empty sweep range: min {} must be < max {}",
                    self.min, self.max
                )))
            }
            _ => {}
        }
        match self.spacing {
            Spacing::Linear => Ok(numerics::linspace(self.min, self.max, self.count)),
            Spacing::Log if self.min > 0.0 => Ok(numerics::logspace(self.min, self.max, self.count)),
            Spacing::Log => Err(Error::Configuration(format!(
                "log spacing needs min > 0, got {}",
                self.min
            ))),
        }
    }

    fn expect(&self, variable: SweepVariable) -> Result<()> {
        if self.variable == variable {
            Ok(())
        } else {
            Err(Error::Configuration(format!(
                "expected a {} sweep, got {}",
                variable.name(),
                self.variable.name()
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub version: String,
    pub spec: SweepSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult<R> {
    pub rows: Vec<R>,
    pub metadata: SweepMetadata,
}

impl<R> SweepResult<R> {
    fn new(spec: &SweepSpec, rows: Vec<R>) -> Self {
        Self {
            rows,
            metadata: SweepMetadata {
                version: VERSION.to_string(),
                spec: *spec,
            },
        }
    }
}

fn evaluate<T, F>(spec: &SweepSpec, values: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    let variable = spec.variable.name();
    let results: Vec<Result<T>> = match spec.execution {
        Execution::Serial => values.iter().map(|&x| f(x)).collect(),
        Execution::Parallel => values.par_iter().map(|&x| f(x)).collect(),
    };
    results
        .into_iter()
        .zip(values)
        .map(|(r, &x)| r.map_err(|e| e.at(variable, x)))
        .collect()
}

/// One bias point of a [`bias_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasRow {
    /// v0, V.
    pub bias: f64,
    /// V/m.
    pub field: f64,
    pub eps_r: f64,
    pub tan_delta: f64,
    /// F.
    pub capacitance: f64,
    /// rad/s.
    pub omega0: f64,
    /// rad/s.
    pub xi_re: f64,
    pub xi_im: f64,
    pub xi_mag: f64,
    /// rad/s.
    pub k_eff: f64,
    pub kappa_int: f64,
    pub kappa_ext: f64,
    /// Gain at omega_p/2 with Delta = 0; `None` at or above threshold.
    pub peak_gain_db: Option<f64>,
}

impl BiasRow {
    pub fn xi(&self) -> Complex64 {
        Complex64::new(self.xi_re, self.xi_im)
    }
}

fn center_gain_db(xi_mag: f64, rates: &RateBudget) -> Result<Option<f64>> {
    if xi_mag >= rates.threshold_xi() {
        return Ok(None);
    }
    let r = amplifier::reflection(rates.half_pump(), xi_mag, rates)?;
    Ok(Some(amplifier::gain_db(r)))
}

fn bias_point(v0: f64, design: &VaractorDesign, circuit: &CircuitParams, drive: &DriveSpec) -> Result<BiasRow> {
    let field = v0 / design.thickness;
    let dielectric = design.material.response(field)?;
    let coeffs = resonator::mode_coefficients(v0, drive, design, circuit)?;
    let rates = amplifier::rate_budget(v0, design, circuit)?;
    let xi_mag = coeffs.xi.norm();
    Ok(BiasRow {
        bias: v0,
        field,
        eps_r: dielectric.eps_rel,
        tan_delta: dielectric.loss.total,
        capacitance: coeffs.linear.capacitance,
        omega0: coeffs.linear.omega0,
        xi_re: coeffs.xi.re,
        xi_im: coeffs.xi.im,
        xi_mag,
        k_eff: coeffs.k_eff,
        kappa_int: rates.kappa_int,
        kappa_ext: rates.kappa_ext,
        peak_gain_db: center_gain_db(xi_mag, &rates)?,
    })
}

/// Mode coefficients and loss rates as functions of the DC bias.
pub fn bias_sweep(
    spec: &SweepSpec,
    design: &VaractorDesign,
    circuit: &CircuitParams,
    drive: &DriveSpec,
) -> Result<SweepResult<BiasRow>> {
    spec.expect(SweepVariable::BiasVoltage)?;
    design.validate()?;
    circuit.validate()?;
    drive.validate()?;
    let values = spec.values()?;
    let rows = evaluate(spec, &values, |v| bias_point(v, design, circuit, drive))?;
    Ok(SweepResult::new(spec, rows))
}

/// Bias of largest |xi| found by [`maximize_3wm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    /// V.
    pub v0: f64,
    /// rad/s.
    pub xi_re: f64,
    pub xi_im: f64,
    pub xi_mag: f64,
}

impl Optimum {
    pub fn xi(&self) -> Complex64 {
        Complex64::new(self.xi_re, self.xi_im)
    }
}

/// Maximizes |xi(v0)| over `v_range` by a grid scan refined with golden-section search.
pub fn maximize_3wm(
    design: &VaractorDesign,
    circuit: &CircuitParams,
    drive: &DriveSpec,
    v_range: (f64, f64),
) -> Result<Optimum> {
    design.validate()?;
    circuit.validate()?;
    drive.validate()?;
    let (lo, hi) = (v_range.0.min(v_range.1), v_range.0.max(v_range.1));
    if !(lo.is_finite() && hi.is_finite()) || lo == hi {
        return Err(Error::Configuration(format!(
            "search range [{}, {}] V is empty",
            v_range.0, v_range.1
        )));
    }
    if lo.abs().max(hi.abs()) > design.v_max {
        return Err(Error::Domain(format!(
            "search range [{lo}, {hi}] V exceeds the design bias limit {} V",
            design.v_max
        )));
    }
    let xi = |v: f64| resonator::three_wave_strength(v, drive, design, circuit);

    let grid = numerics::linspace(lo, hi, OPTIMIZER_GRID_POINTS);
    let magnitudes = grid
        .par_iter()
        .map(|&v| xi(v).map(|z| z.norm()).map_err(|e| e.at("bias_voltage", v)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let (best, &best_mag) =
        magnitudes.iter().enumerate().fold(
            (0, &magnitudes[0]),
            |acc, (i, m)| if *m > *acc.1 { (i, m) } else { acc },
        );
    if best_mag == 0.0 {
        return Err(Error::FlatObjective);
    }

    let left = grid[best.saturating_sub(1)];
    let right = grid[(best + 1).min(grid.len() - 1)];
    let tol = OPTIMIZER_RESOLUTION.min(1e-6 * (hi - lo));
    let mut failure = None;
    let refined = numerics::golden_section_max(
        |v| match xi(v) {
            Ok(z) => z.norm(),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        left,
        right,
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let v0 = if refined.value >= best_mag {
        refined.x
    } else {
        grid[best]
    };
    let z = xi(v0)?;
    Ok(Optimum {
        v0,
        xi_re: z.re,
        xi_im: z.im,
        xi_mag: z.norm(),
    })
}

/// One thickness of a [`geometry_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryRow {
    /// d, m.
    pub thickness: f64,
    /// A, m².
    pub plate_area: f64,
    /// Optimal bias at this thickness, V.
    pub v0_max: f64,
    /// |xi| at `v0_max`, rad/s.
    pub xi_max: f64,
    /// omega0 at `v0_max`, rad/s.
    pub omega0_at_max: f64,
    /// K_eff at v0 = 0, rad/s.
    pub k_eff_zero: f64,
    /// xi_max / k_eff_zero.
    pub ratio: f64,
}

/// Scales the plate separation at fixed A/d, re-optimizing the bias at every point.
///
/// `search_range` is the bias search window of `design` at its own thickness; it is
/// scaled with `d` so that the same field window is searched.
pub fn geometry_sweep(
    spec: &SweepSpec,
    design: &VaractorDesign,
    circuit: &CircuitParams,
    drive: &DriveSpec,
    search_range: (f64, f64),
) -> Result<SweepResult<GeometryRow>> {
    spec.expect(SweepVariable::PlateSeparation)?;
    design.validate()?;
    let values = spec.values()?;
    if values[0] <= 0.0 {
        return Err(Error::Configuration(format!(
            "plate separation must be > 0, got {}",
            values[0]
        )));
    }
    let rows = evaluate(spec, &values, |d| {
        let scaled = design.rescaled_thickness(d);
        let ratio = d / design.thickness;
        let opt = maximize_3wm(
            &scaled,
            circuit,
            drive,
            (search_range.0 * ratio, search_range.1 * ratio),
        )?;
        let k0 = resonator::kerr_strength(0.0, &scaled, circuit)?;
        let omega0 = resonator::mode(opt.v0, &scaled, circuit)?.omega0;
        Ok(GeometryRow {
            thickness: d,
            plate_area: scaled.plate_area,
            v0_max: opt.v0,
            xi_max: opt.xi_mag,
            omega0_at_max: omega0,
            k_eff_zero: k0,
            ratio: opt.xi_mag / k0,
        })
    })?;
    Ok(SweepResult::new(spec, rows))
}

/// One field point of a [`dielectric_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DielectricRow {
    /// E, V/m.
    pub field: f64,
    pub lambda: f64,
    pub greens: f64,
    pub displacement: f64,
    pub eps_r: f64,
    pub loss: LossTangent,
}

/// Permittivity and loss tangent versus bias field, for `0 <= E <= 10 E_N`.
pub fn dielectric_sweep(material: &MaterialParams, spec: &SweepSpec) -> Result<SweepResult<DielectricRow>> {
    spec.expect(SweepVariable::BiasField)?;
    material.validate()?;
    let values = spec.values()?;
    let limit = 10.0 * material.renorm_field;
    if values[0] < 0.0 || values[values.len() - 1] > limit {
        return Err(Error::Domain(format!(
            "field range [{:e}, {:e}] V/m outside [0, 10 E_N = {limit:e}]",
            values[0],
            values[values.len() - 1]
        )));
    }
    let rows = evaluate(spec, &values, |e| {
        let r = material.response(e)?;
        Ok(DielectricRow {
            field: e,
            lambda: r.lambda,
            greens: r.greens,
            displacement: r.displacement,
            eps_r: r.eps_rel,
            loss: r.loss,
        })
    })?;
    Ok(SweepResult::new(spec, rows))
}

/// One point of a [`pump_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpRow {
    pub pump_ratio: f64,
    /// rad/s.
    pub xi_mag: f64,
    /// Gain at omega_p/2, dB.
    pub peak_gain_db: f64,
    /// rad/s.
    pub bandwidth_3db: Option<f64>,
}

/// Center gain and bandwidth versus |xi|/(kappa/2) for a fixed rate budget.
pub fn pump_sweep(spec: &SweepSpec, rates: &RateBudget) -> Result<SweepResult<PumpRow>> {
    spec.expect(SweepVariable::PumpRatio)?;
    let values = spec.values()?;
    if values[0] < 0.0 {
        return Err(Error::Configuration(format!(
            "pump ratio must be >= 0, got {}",
            values[0]
        )));
    }
    let grid = FrequencyGrid::around(rates.half_pump(), rates.kappa, 2);
    let rows = evaluate(spec, &values, |ratio| {
        let xi_mag = ratio * 0.5 * rates.kappa;
        let profile = amplifier::gain_profile_for_xi(xi_mag, rates, &grid)?;
        Ok(PumpRow {
            pump_ratio: ratio,
            xi_mag,
            peak_gain_db: profile.peak_gain_db,
            bandwidth_3db: profile.bandwidth_3db,
        })
    })?;
    Ok(SweepResult::new(spec, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::TWO_PI;

    fn sto() -> VaractorDesign {
        VaractorDesign::reference(MaterialParams::strontium_titanate())
    }

    #[test]
    fn spec_validation() {
        let bad = SweepSpec::linear(SweepVariable::BiasVoltage, 0.1, 0.1, 5);
        assert!(matches!(bad.values(), Err(Error::Configuration(_))));
        let bad = SweepSpec::log(SweepVariable::PlateSeparation, 0.0, 1.0, 5);
        assert!(bad.values().is_err());
        let one = SweepSpec::linear(SweepVariable::BiasVoltage, 0.0, 0.0, 1);
        assert_eq!(one.values().unwrap(), vec![0.0]);
        let two = SweepSpec::linear(SweepVariable::BiasVoltage, 0.0, 0.25, 2);
        assert_eq!(two.values().unwrap(), vec![0.0, 0.25]);
    }

    #[test]
    fn single_point_at_zero_bias() {
        let spec = SweepSpec::linear(SweepVariable::BiasVoltage, 0.0, 0.0, 1);
        let res = bias_sweep(&spec, &sto(), &CircuitParams::reference(), &DriveSpec::reference()).unwrap();
        assert_eq!(res.rows.len(), 1);
        assert_eq!(res.rows[0].xi_mag, 0.0);
        assert!(res.rows[0].peak_gain_db.is_some());
    }

    #[test]
    fn wrong_variable_rejected() {
        let spec = SweepSpec::linear(SweepVariable::BiasField, 0.0, 1.0, 3);
        assert!(bias_sweep(&spec, &sto(), &CircuitParams::reference(), &DriveSpec::reference()).is_err());
    }

    #[test]
    fn sto_optimum() {
        let opt = maximize_3wm(
            &sto(),
            &CircuitParams::reference(),
            &DriveSpec::reference(),
            (0.0, 0.25),
        )
        .unwrap();
        assert!((opt.v0 - 9.3e-3).abs() < 0.2e-3, "{}", opt.v0);
        assert!((opt.xi_mag / TWO_PI / 26e6 - 1.0).abs() < 0.05);
    }

    #[test]
    fn negative_range_mirrors_optimum() {
        let c = CircuitParams::reference();
        let d = DriveSpec::reference();
        let pos = maximize_3wm(&sto(), &c, &d, (0.0, 0.25)).unwrap();
        let neg = maximize_3wm(&sto(), &c, &d, (-0.25, 0.0)).unwrap();
        assert!((pos.v0 + neg.v0).abs() < 1e-6);
        assert!((pos.xi_mag / neg.xi_mag - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_drive_is_flat() {
        let r = maximize_3wm(
            &sto(),
            &CircuitParams::reference(),
            &DriveSpec::new(0.0, 0.0),
            (0.0, 0.25),
        );
        assert_eq!(r.unwrap_err(), Error::FlatObjective);
    }

    #[test]
    fn out_of_range_point_is_tagged() {
        let spec = SweepSpec::linear(SweepVariable::BiasVoltage, 0.0, 0.25, 3);
        let mut design = sto();
        design.material.temperature = 50.0;
        let err = bias_sweep(&spec, &design, &CircuitParams::reference(), &DriveSpec::reference()).unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn dielectric_range_limit() {
        let m = MaterialParams::strontium_titanate();
        let spec = SweepSpec::linear(SweepVariable::BiasField, 0.0, 11.0 * m.renorm_field, 3);
        assert!(matches!(dielectric_sweep(&m, &spec), Err(Error::Domain(_))));
    }

    #[test]
    fn pump_sweep_above_threshold_fails_at_point() {
        let rates = RateBudget::from_rates(TWO_PI * 2e9, TWO_PI * 1e6, TWO_PI * 20e6).unwrap();
        let spec = SweepSpec::linear(SweepVariable::PumpRatio, 0.0, 1.2, 7);
        match pump_sweep(&spec, &rates).unwrap_err() {
            Error::AtPoint { value, source, .. } => {
                assert!((value - 1.0).abs() < 1e-12);
                assert!(matches!(*source, Error::Threshold { .. }));
            }
            other => panic!("{other:?}"),
        }
    }
}

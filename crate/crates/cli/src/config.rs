//! TOML run configuration. Keys carry their unit in the name (`thickness_nm`,
//! `v_ac_mv`, ...); everything is converted to SI in [`ToolConfig::resolve`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use paravaractor::amplifier::FrequencyGrid;
use paravaractor::constants::TWO_PI;
use paravaractor::material::V_PER_UM;
use paravaractor::sweep::{Spacing, SweepSpec, SweepVariable};
use paravaractor::{CircuitParams, DriveSpec, MaterialParams, VaractorDesign};

use crate::CliError;

/// First line of every echoed configuration block.
pub const ECHO_BANNER: &str = "# paravaractor";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToolConfig {
    pub material: MaterialSection,
    pub geometry: GeometrySection,
    pub circuit: CircuitSection,
    pub drive: DriveSection,
    pub operating_point: OperatingPointSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain: Option<GainSection>,
    pub output: OutputSection,
}

/// Built-in material by name, with optional per-field overrides.
/// `name = "custom"` requires every field except `a3` and `defect_density`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    #[serde(default = "default_material_name")]
    pub name: String,
    pub eps00_rel: Option<f64>,
    pub curie_temp_k: Option<f64>,
    pub debye_temp_k: Option<f64>,
    pub renorm_field_v_per_um: Option<f64>,
    pub inhomogeneity: Option<f64>,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub a3: Option<f64>,
    pub defect_density: Option<f64>,
    pub temperature_k: Option<f64>,
}

fn default_material_name() -> String {
    "sto".into()
}

impl Default for MaterialSection {
    fn default() -> Self {
        Self {
            name: default_material_name(),
            eps00_rel: None,
            curie_temp_k: None,
            debye_temp_k: None,
            renorm_field_v_per_um: None,
            inhomogeneity: None,
            a1: None,
            a2: None,
            a3: None,
            defect_density: None,
            temperature_k: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub area_um2: f64,
    pub thickness_nm: f64,
    /// Largest bias accepted by the charge integrals.
    pub v_max_mv: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            area_um2: 16.0,
            thickness_nm: 200.0,
            v_max_mv: 1000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CircuitSection {
    pub inductance_nh: f64,
    pub q_ext: f64,
    /// omega0 - omega_p/2, over 2 pi.
    pub detuning_mhz: f64,
}

impl Default for CircuitSection {
    fn default() -> Self {
        Self {
            inductance_nh: 0.5,
            q_ext: 100.0,
            detuning_mhz: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSection {
    pub v_ac_mv: f64,
    pub theta_rad: f64,
}

impl Default for DriveSection {
    fn default() -> Self {
        Self {
            v_ac_mv: 1.0,
            theta_rad: 0.0,
        }
    }
}

/// Bias used by `design` and `gain`: `bias_mv` if given, else the 3WM optimum
/// inside `[search_min_mv, search_max_mv]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OperatingPointSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias_mv: Option<f64>,
    pub search_min_mv: f64,
    pub search_max_mv: f64,
}

impl Default for OperatingPointSection {
    fn default() -> Self {
        Self {
            bias_mv: None,
            search_min_mv: 0.0,
            search_max_mv: 250.0,
        }
    }
}

/// `min`/`max` are in mV (bias_voltage), V/µm (bias_field), nm (plate_separation)
/// or plain ratios (pump_ratio).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Linear
}

impl SweepSection {
    fn unit_scale(&self) -> f64 {
        match self.variable {
            SweepVariable::BiasVoltage => 1e-3,
            SweepVariable::BiasField => V_PER_UM,
            SweepVariable::PlateSeparation => 1e-9,
            SweepVariable::PumpRatio => 1.0,
        }
    }

    pub fn to_spec(&self) -> SweepSpec {
        let s = self.unit_scale();
        let (min, max) = (self.min * s, self.max * s);
        match self.spacing {
            Spacing::Linear => SweepSpec::linear(self.variable, min, max, self.count),
            Spacing::Log => SweepSpec::log(self.variable, min, max, self.count),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GainSection {
    /// Pump strengths |xi| / (kappa/2).
    pub xi_ratios: Vec<f64>,
    /// Half-width of the frequency window in units of kappa.
    pub span_kappa: f64,
    pub points: usize,
}

impl Default for GainSection {
    fn default() -> Self {
        Self {
            xi_ratios: vec![0.0, 0.5, 0.8, 0.9, 0.95],
            span_kappa: 3.0,
            points: 601,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Output directory.
    pub path: PathBuf,
    pub format: OutputFormat,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            path: PathBuf::from("out"),
            format: OutputFormat::Csv,
        }
    }
}

/// Model inputs in SI units.
#[derive(Debug, Clone, Copy)]
pub struct Resolved {
    pub design: VaractorDesign,
    pub circuit: CircuitParams,
    pub drive: DriveSpec,
    /// rad/s.
    pub detuning: f64,
    /// V.
    pub bias: Option<f64>,
    /// V.
    pub search: (f64, f64),
}

fn positive(name: &str, value: f64) -> Result<(), CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "`{name}` must be finite and > 0, got {value}"
        )))
    }
}

fn finite(name: &str, value: f64) -> Result<(), CliError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("`{name}` must be finite, got {value}")))
    }
}

impl MaterialSection {
    pub fn params(&self) -> Result<MaterialParams, CliError> {
        let mut m = match self.name.as_str() {
            "custom" => {
                let missing: Vec<&str> = [
                    ("eps00_rel", self.eps00_rel),
                    ("curie_temp_k", self.curie_temp_k),
                    ("debye_temp_k", self.debye_temp_k),
                    ("renorm_field_v_per_um", self.renorm_field_v_per_um),
                    ("inhomogeneity", self.inhomogeneity),
                    ("a1", self.a1),
                    ("a2", self.a2),
                    ("temperature_k", self.temperature_k),
                ]
                .iter()
                .filter(|(_, v)| v.is_none())
                .map(|(k, _)| *k)
                .collect();
                if !missing.is_empty() {
                    return Err(CliError::Config(format!(
                        "material.name = \"custom\" requires material.{}",
                        missing.join(", material.")
                    )));
                }
                MaterialParams::strontium_titanate()
            }
            name => MaterialParams::builtin(name).ok_or_else(|| {
                CliError::Config(format!(
                    "material.name: unknown material `{name}` (expected sto, kto or custom)"
                ))
            })?,
        };
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut m.eps00_rel, self.eps00_rel);
        set(&mut m.curie_temp, self.curie_temp_k);
        set(&mut m.debye_temp, self.debye_temp_k);
        set(&mut m.renorm_field, self.renorm_field_v_per_um.map(|e| e * V_PER_UM));
        set(&mut m.inhomogeneity, self.inhomogeneity);
        set(&mut m.a1, self.a1);
        set(&mut m.a2, self.a2);
        set(&mut m.defect_density, self.defect_density);
        set(&mut m.temperature, self.temperature_k);
        if self.a3.is_some() {
            m.a3 = self.a3;
        }
        m.validate()?;
        Ok(m)
    }

    /// The same section with every field spelled out.
    fn explicit(&self, m: &MaterialParams) -> Self {
        Self {
            name: self.name.clone(),
            eps00_rel: Some(m.eps00_rel),
            curie_temp_k: Some(m.curie_temp),
            debye_temp_k: Some(m.debye_temp),
            renorm_field_v_per_um: Some(m.renorm_field / V_PER_UM),
            inhomogeneity: Some(m.inhomogeneity),
            a1: Some(m.a1),
            a2: Some(m.a2),
            a3: m.a3,
            defect_density: Some(m.defect_density),
            temperature_k: Some(m.temperature),
        }
    }
}

impl ToolConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads a TOML file, or the configuration echoed into the header of an
    /// output file written by this tool.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let text = if text.starts_with(ECHO_BANNER) {
            unecho(&text)
        } else {
            text
        };
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Applies `section.key=value` assignments; the value is parsed as a TOML
    /// value and taken as a bare string if that fails.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self, CliError> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut table = toml::Table::try_from(self).map_err(|e| CliError::Config(e.to_string()))?;
        for item in overrides {
            let (path, raw) = item
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("override `{item}`: expected section.key=value")))?;
            let (section, key) = path
                .trim()
                .split_once('.')
                .ok_or_else(|| CliError::Config(format!("override `{item}`: key must be section.key")))?;
            let value = parse_value(raw.trim());
            let slot = table
                .entry(section.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            match slot {
                toml::Value::Table(t) => {
                    t.insert(key.to_string(), value);
                }
                _ => {
                    return Err(CliError::Config(format!(
                        "override `{item}`: `{section}` is not a section"
                    )))
                }
            }
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(format!("after overrides: {}", e.message())))
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let g = &self.geometry;
        positive("geometry.area_um2", g.area_um2)?;
        positive("geometry.thickness_nm", g.thickness_nm)?;
        positive("geometry.v_max_mv", g.v_max_mv)?;
        positive("circuit.inductance_nh", self.circuit.inductance_nh)?;
        positive("circuit.q_ext", self.circuit.q_ext)?;
        finite("circuit.detuning_mhz", self.circuit.detuning_mhz)?;
        positive("drive.v_ac_mv", self.drive.v_ac_mv)?;
        finite("drive.theta_rad", self.drive.theta_rad)?;
        let op = &self.operating_point;
        finite("operating_point.search_min_mv", op.search_min_mv)?;
        finite("operating_point.search_max_mv", op.search_max_mv)?;
        if op.search_min_mv >= op.search_max_mv {
            return Err(CliError::Config(format!(
                "operating_point: search_min_mv {} must be < search_max_mv {}",
                op.search_min_mv, op.search_max_mv
            )));
        }
        if let Some(b) = op.bias_mv {
            finite("operating_point.bias_mv", b)?;
        }
        let material = self.material.params()?;
        let design =
            VaractorDesign::new(g.area_um2 * 1e-12, g.thickness_nm * 1e-9, material)?.with_v_max(g.v_max_mv * 1e-3);
        Ok(Resolved {
            design,
            circuit: CircuitParams {
                inductance: self.circuit.inductance_nh * 1e-9,
                q_ext: self.circuit.q_ext,
            },
            drive: DriveSpec::new(self.drive.v_ac_mv * 1e-3, self.drive.theta_rad),
            detuning: TWO_PI * self.circuit.detuning_mhz * 1e6,
            bias: op.bias_mv.map(|b| b * 1e-3),
            search: (op.search_min_mv * 1e-3, op.search_max_mv * 1e-3),
        })
    }

    /// The configuration with defaults filled in and the material spelled out.
    pub fn effective(&self) -> Result<Self, CliError> {
        let mut out = self.clone();
        out.material = self.material.explicit(&self.material.params()?);
        Ok(out)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes to TOML")
    }

    /// `# `-prefixed block embedding this configuration in an output file.
    pub fn echo(&self, command: &str) -> String {
        let mut out = format!("{ECHO_BANNER} {} {command}\n", paravaractor::VERSION);
        // the output location is not a model input and is left out
        let mut table = toml::Table::try_from(self).expect("configuration serializes to TOML");
        table.remove("output");
        for line in toml::to_string(&table).expect("TOML table serializes").lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

impl GainSection {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.xi_ratios.is_empty() {
            return Err(CliError::Config("gain.xi_ratios must not be empty".into()));
        }
        if let Some(r) = self.xi_ratios.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(CliError::Config(format!("gain.xi_ratios: {r} must be finite and >= 0")));
        }
        positive("gain.span_kappa", self.span_kappa)?;
        if self.points < 2 {
            return Err(CliError::Config(format!(
                "gain.points must be >= 2, got {}",
                self.points
            )));
        }
        Ok(())
    }

    pub fn grid(&self, center: f64, kappa: f64) -> FrequencyGrid {
        FrequencyGrid::around(center, self.span_kappa * kappa, self.points)
    }
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Recovers the TOML text from the leading comment block of an output file.
fn unecho(text: &str) -> String {
    text.lines()
        .skip(1)
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.strip_prefix("# ").unwrap_or(l.trim_start_matches('#')))
        .collect::<Vec<_>>()
        .join("\n")
}

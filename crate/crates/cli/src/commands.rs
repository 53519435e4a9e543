use std::fmt::Write;

use paravaractor::amplifier::{self, RateBudget};
use paravaractor::constants::TWO_PI;
use paravaractor::material::V_PER_UM;
use paravaractor::sweep::{self, DielectricRow, Spacing, SweepVariable};
use paravaractor::{resonator, MaterialParams};

use crate::config::{GainSection, Resolved, SweepSection, ToolConfig};
use crate::table::{number, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Permittivity and loss tangent versus bias field.
    Material,
    /// Operating point report at the 3WM optimum or a fixed bias.
    Design,
    /// Reflection gain profiles for a list of pump strengths.
    Gain,
    /// Bias, field, plate-separation or pump-ratio sweep.
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Material => "material",
            Self::Design => "design",
            Self::Gain => "gain",
            Self::Sweep => "sweep",
        }
    }
}

/// Files to write (name, contents) and text for standard output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    pub files: Vec<(String, String)>,
    pub stdout: String,
}

impl Output {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }
}

pub fn execute(command: Command, config: &ToolConfig) -> Result<Output, CliError> {
    match command {
        Command::Material => cmd_material(config),
        Command::Design => cmd_design(config),
        Command::Gain => cmd_gain(config),
        Command::Sweep => cmd_sweep(config),
    }
}

const MHZ: f64 = TWO_PI * 1e6;
const GHZ: f64 = TWO_PI * 1e9;

fn default_field_sweep(material: &MaterialParams) -> SweepSection {
    SweepSection {
        variable: SweepVariable::BiasField,
        min: 0.0,
        max: 10.0 * material.renorm_field / V_PER_UM,
        count: 501,
        spacing: Spacing::Linear,
    }
}

fn dielectric_table(rows: &[DielectricRow]) -> Table {
    let mut t = Table::new(&[
        "E_V_per_um",
        "eps_r",
        "tan_delta",
        "tan_delta_1",
        "tan_delta_2",
        "tan_delta_3",
    ]);
    for r in rows {
        t.push_values(&[
            r.field / V_PER_UM,
            r.eps_r,
            r.loss.total,
            r.loss.phonon,
            r.loss.piezo,
            r.loss.defect,
        ]);
    }
    t
}

pub fn cmd_material(config: &ToolConfig) -> Result<Output, CliError> {
    let mut cfg = config.effective()?;
    let material = cfg.material.params()?;
    let section = match &cfg.sweep {
        None => default_field_sweep(&material),
        Some(s) if s.variable == SweepVariable::BiasField => s.clone(),
        Some(s) => {
            return Err(CliError::Config(format!(
                "the material command sweeps bias_field, but [sweep] has variable = {}",
                s.variable.name()
            )))
        }
    };
    let result = sweep::dielectric_sweep(&material, &section.to_spec())?;
    cfg.sweep = Some(section);
    let csv = dielectric_table(&result.rows).render(&cfg.echo("material"));
    let first = &result.rows[0];
    Ok(Output {
        stdout: format!(
            "{} field points; eps_r {:.6e} at {:.4} V/um, tan_delta {:.4e}\n",
            result.rows.len(),
            first.eps_r,
            first.field / V_PER_UM,
            first.loss.total
        ),
        files: vec![("material.csv".into(), csv)],
    })
}

/// Fixed bias if configured, else the 3WM optimum in the search window.
fn operating_bias(r: &Resolved) -> Result<(f64, &'static str), CliError> {
    match r.bias {
        Some(v0) => Ok((v0, "fixed")),
        None => Ok((
            sweep::maximize_3wm(&r.design, &r.circuit, &r.drive, r.search)?.v0,
            "optimum",
        )),
    }
}

fn rates_at(v0: f64, r: &Resolved) -> Result<RateBudget, CliError> {
    Ok(amplifier::rate_budget(v0, &r.design, &r.circuit)?.with_detuning(r.detuning))
}

pub fn cmd_design(config: &ToolConfig) -> Result<Output, CliError> {
    let cfg = config.effective()?;
    let r = cfg.resolve()?;
    let (v0, source) = operating_bias(&r)?;
    let coeffs = resonator::mode_coefficients(v0, &r.drive, &r.design, &r.circuit)?;
    let rates = rates_at(v0, &r)?;
    let dielectric = r.design.material.response(v0 / r.design.thickness)?;
    let linear = &coeffs.linear;
    let xi = coeffs.xi;
    let compression = amplifier::compression_estimate(coeffs.k_eff, &rates, linear.omega0)?;
    let photons = resonator::pump_photons(v0, &r.drive, &r.design, &r.circuit)?;

    let entries: [(&str, f64, &str); 22] = [
        ("v0_mv", v0 * 1e3, "DC bias"),
        ("field_v_per_um", v0 / r.design.thickness / V_PER_UM, "bias field"),
        ("eps_r", dielectric.eps_rel, "relative permittivity"),
        ("tan_delta", dielectric.loss.total, "loss tangent"),
        ("q_int", rates.q_int, "internal quality factor"),
        ("capacitance_pf", linear.capacitance * 1e12, "small-signal capacitance"),
        ("f0_ghz", linear.omega0 / GHZ, "mode frequency omega0/2pi"),
        ("z0_ohm", linear.z0, "characteristic impedance"),
        ("xi_mhz", xi.norm() / MHZ, "|xi|/2pi"),
        ("xi_re_mhz", xi.re / MHZ, "Re xi/2pi"),
        ("xi_im_mhz", xi.im / MHZ, "Im xi/2pi"),
        ("k_eff_hz", coeffs.k_eff / TWO_PI, "K_eff/2pi"),
        ("xi_over_k", coeffs.figure_of_merit(), "|xi|/K_eff"),
        ("kappa_int_mhz", rates.kappa_int / MHZ, "kappa_int/2pi"),
        ("kappa_ext_mhz", rates.kappa_ext / MHZ, "kappa_ext/2pi"),
        ("kappa_mhz", rates.kappa / MHZ, "kappa/2pi"),
        ("detuning_mhz", rates.delta / MHZ, "omega0 - omega_p/2, over 2pi"),
        ("pump_ratio", rates.pump_ratio(xi.norm()), "|xi|/(kappa/2)"),
        ("n_photons", compression.n_photons, "kappa/K_eff"),
        (
            "p_circ_dbm_cyclic",
            compression.p_circ_dbm_cyclic,
            "P_circ, N hbar f0 (kappa/2pi)",
        ),
        (
            "p_circ_dbm_angular",
            compression.p_circ_dbm_angular,
            "P_circ, N hbar omega0 kappa",
        ),
        ("pump_photons", photons, "(q_ac/2q_zpf)^2, one convention"),
    ];

    let mut kv = cfg.echo("design");
    writeln!(kv, "material = \"{}\"", cfg.material.name).unwrap();
    writeln!(kv, "bias_source = \"{source}\"").unwrap();
    for (key, value, _) in &entries {
        writeln!(kv, "{key} = {}", number(*value)).unwrap();
    }

    let mut report = format!("design report: {} at {source} bias\n", cfg.material.name);
    for (key, value, label) in &entries {
        writeln!(report, "  {label:<34} {key:<18} {value:>14.6e}").unwrap();
    }
    Ok(Output {
        files: vec![("design.toml".into(), kv)],
        stdout: report,
    })
}

pub fn cmd_gain(config: &ToolConfig) -> Result<Output, CliError> {
    let mut cfg = config.effective()?;
    let gain = cfg.gain.clone().unwrap_or_default();
    gain.validate()?;
    let r = cfg.resolve()?;
    let (v0, source) = operating_bias(&r)?;
    let rates = rates_at(v0, &r)?;
    let table = gain_table(&gain, &rates)?;
    cfg.gain = Some(gain.clone());
    let mut stdout = format!(
        "gain at {source} bias {:.6} mV: f0 {:.6} GHz, kappa/2pi {:.6} MHz\n",
        v0 * 1e3,
        rates.omega0 / GHZ,
        rates.kappa / MHZ
    );
    for (ratio, peak, bw) in &table.1 {
        let bw = bw.map_or("-".to_string(), |b| format!("{:.6} MHz", b / MHZ));
        writeln!(
            stdout,
            "  xi/(kappa/2) = {ratio}: center gain {peak:.4} dB, 3 dB bandwidth {bw}"
        )
        .unwrap();
    }
    Ok(Output {
        files: vec![("gain.csv".into(), table.0.render(&cfg.echo("gain")))],
        stdout,
    })
}

type GainSummary = Vec<(f64, f64, Option<f64>)>;

fn gain_table(gain: &GainSection, rates: &RateBudget) -> Result<(Table, GainSummary), CliError> {
    let grid = gain.grid(rates.half_pump(), rates.kappa);
    let mut t = Table::new(&["xi_ratio", "freq_ghz", "gain_db", "re_R", "im_R"]);
    let mut summary = Vec::new();
    for &ratio in &gain.xi_ratios {
        let p = amplifier::gain_profile_for_xi(ratio * 0.5 * rates.kappa, rates, &grid)?;
        for ((w, g), r) in p.frequencies.iter().zip(&p.gain_db).zip(&p.reflection) {
            t.push_values(&[ratio, w / GHZ, *g, r.re, r.im]);
        }
        summary.push((ratio, p.peak_gain_db, p.bandwidth_3db));
    }
    Ok((t, summary))
}

fn default_bias_sweep() -> SweepSection {
    SweepSection {
        variable: SweepVariable::BiasVoltage,
        min: 0.0,
        max: 250.0,
        count: 251,
        spacing: Spacing::Linear,
    }
}

pub fn cmd_sweep(config: &ToolConfig) -> Result<Output, CliError> {
    let mut cfg = config.effective()?;
    let section = cfg.sweep.clone().unwrap_or_else(default_bias_sweep);
    cfg.sweep = Some(section.clone());
    let r = cfg.resolve()?;
    let spec = section.to_spec();
    let table = match section.variable {
        SweepVariable::BiasVoltage => {
            let rows = sweep::bias_sweep(&spec, &r.design, &r.circuit, &r.drive)?.rows;
            let mut t = Table::new(&[
                "bias_mv",
                "field_v_per_um",
                "eps_r",
                "tan_delta",
                "capacitance_pf",
                "f0_ghz",
                "xi_re_mhz",
                "xi_im_mhz",
                "xi_mhz",
                "k_eff_hz",
                "kappa_int_mhz",
                "kappa_ext_mhz",
                "peak_gain_db",
            ]);
            for b in rows {
                let mut row: Vec<Option<f64>> = [
                    b.bias * 1e3,
                    b.field / V_PER_UM,
                    b.eps_r,
                    b.tan_delta,
                    b.capacitance * 1e12,
                    b.omega0 / GHZ,
                    b.xi_re / MHZ,
                    b.xi_im / MHZ,
                    b.xi_mag / MHZ,
                    b.k_eff / TWO_PI,
                    b.kappa_int / MHZ,
                    b.kappa_ext / MHZ,
                ]
                .into_iter()
                .map(Some)
                .collect();
                row.push(b.peak_gain_db);
                t.push(row);
            }
            t
        }
        SweepVariable::BiasField => dielectric_table(&sweep::dielectric_sweep(&r.design.material, &spec)?.rows),
        SweepVariable::PlateSeparation => {
            let rows = sweep::geometry_sweep(&spec, &r.design, &r.circuit, &r.drive, r.search)?.rows;
            let mut t = Table::new(&[
                "thickness_nm",
                "area_um2",
                "v0_max_mv",
                "xi_max_mhz",
                "f0_at_max_ghz",
                "k_eff_zero_hz",
                "xi_over_k",
            ]);
            for g in rows {
                t.push_values(&[
                    g.thickness * 1e9,
                    g.plate_area * 1e12,
                    g.v0_max * 1e3,
                    g.xi_max / MHZ,
                    g.omega0_at_max / GHZ,
                    g.k_eff_zero / TWO_PI,
                    g.ratio,
                ]);
            }
            t
        }
        SweepVariable::PumpRatio => {
            let (v0, _) = operating_bias(&r)?;
            let rates = rates_at(v0, &r)?;
            let rows = sweep::pump_sweep(&spec, &rates)?.rows;
            let mut t = Table::new(&["pump_ratio", "xi_mhz", "peak_gain_db", "bandwidth_mhz"]);
            for p in rows {
                t.push(vec![
                    Some(p.pump_ratio),
                    Some(p.xi_mag / MHZ),
                    Some(p.peak_gain_db),
                    p.bandwidth_3db.map(|b| b / MHZ),
                ]);
            }
            t
        }
    };
    let name = format!("sweep_{}.csv", section.variable.name());
    Ok(Output {
        stdout: format!("{} rows -> {name}\n", table.rows.len()),
        files: vec![(name, table.render(&cfg.echo("sweep")))],
    })
}

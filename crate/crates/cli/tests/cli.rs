use std::path::Path;
use std::process::{Command, Output};

use paravaractor::amplifier;
use paravaractor::resonator::{CircuitParams, DriveSpec};
use paravaractor::sweep;
use paravaractor::{MaterialParams, VaractorDesign};
use paravaractor_cli::table;

fn run(out: &Path, args: &[&str]) -> Output {
    run_with_env(out, args, &[])
}

fn run_with_env(out: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_paravaractor"));
    cmd.args(args).arg("--out").arg(out);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn rows(path: &Path) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    table::parse(&read(path)).unwrap()
}

fn design_value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("{key} missing"))
        .parse()
        .unwrap()
}

#[test]
fn kto_design_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["design", "--material", "kto"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let kv = read(&dir.path().join("design.toml"));
    assert!((design_value(&kv, "f0_ghz") / 4.882 - 1.0).abs() < 5e-3);
    assert!((design_value(&kv, "xi_mhz") / 9.5 - 1.0).abs() < 0.05);
    assert!((design_value(&kv, "kappa_mhz") / 49.5 - 1.0).abs() < 0.03);
    assert!(String::from_utf8_lossy(&o.stdout).contains("K_eff/2pi"));
}

#[test]
fn sto_design_ratio_near_1e8() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["design"]).status.success());
    let kv = read(&dir.path().join("design.toml"));
    let ratio = design_value(&kv, "xi_over_k");
    assert!(ratio > 1e8 / 3.0 && ratio < 3e8, "{ratio}");
    assert!((design_value(&kv, "f0_ghz") / 2.072 - 1.0).abs() < 5e-3);
}

#[test]
fn echoed_config_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let cases: [(&[&str], &str); 4] = [
        (&["material", "--material", "kto"], "material.csv"),
        (&["design", "--override", "drive.theta_rad=0.3"], "design.toml"),
        (
            &[
                "gain",
                "--override",
                "gain.points=41",
                "--override",
                "circuit.detuning_mhz=1.5",
            ],
            "gain.csv",
        ),
        (
            &[
                "sweep",
                "--override",
                "sweep.variable=bias_voltage",
                "--override",
                "sweep.min=-5",
                "--override",
                "sweep.max=20",
                "--override",
                "sweep.count=6",
            ],
            "sweep_bias_voltage.csv",
        ),
    ];
    for (args, file) in cases {
        assert!(run(&first, args).status.success());
        let produced = first.join(file);
        let cmd = args[0];
        let o = run(&second, &[cmd, "--config", produced.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(read(&produced), read(&second.join(file)), "{file}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--override",
        "sweep.variable=bias_voltage",
        "--override",
        "sweep.min=0",
        "--override",
        "sweep.max=100",
        "--override",
        "sweep.count=64",
    ];
    assert!(
        run_with_env(&dir.path().join("one"), &args, &[("PARAVARACTOR_THREADS", "1")])
            .status
            .success()
    );
    assert!(
        run_with_env(&dir.path().join("four"), &args, &[("PARAVARACTOR_THREADS", "4")])
            .status
            .success()
    );
    assert_eq!(
        read(&dir.path().join("one/sweep_bias_voltage.csv")),
        read(&dir.path().join("four/sweep_bias_voltage.csv"))
    );
    let bad = run_with_env(dir.path(), &args, &[("PARAVARACTOR_THREADS", "zero")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn unknown_key_is_a_config_error_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[circuit]\ninductance_nh = 0.5\nq_extern = 100\n").unwrap();
    let o = run(dir.path(), &["design", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("q_extern") && msg.contains("line 3"), "{msg}");
}

#[test]
fn empty_sweep_range_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "material",
            "--override",
            "sweep.variable=bias_field",
            "--override",
            "sweep.min=1",
            "--override",
            "sweep.max=1",
            "--override",
            "sweep.count=10",
        ],
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = run(dir.path(), &["design", "--override", "geometry.thickness_nm=-200"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn above_threshold_gain_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["gain", "--override", "gain.xi_ratios=[0.5, 1.1]"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("threshold"));
}

#[test]
fn custom_material_without_inhomogeneity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("custom.toml");
    std::fs::write(
        &cfg,
        "[material]\nname = \"custom\"\neps00_rel = 1500.0\ncurie_temp_k = 35.0\ndebye_temp_k = 160.0\n\
         renorm_field_v_per_um = 1.7\ninhomogeneity = 0.0\na1 = 2e-4\na2 = 1e-3\ntemperature_k = 0.02\n",
    )
    .unwrap();
    let o = run(dir.path(), &["material", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, r) = rows(&dir.path().join("material.csv"));
    let eta = 160.0 / 35.0 * (1.0 / 16.0 + (0.02f64 / 160.0).powi(2)).sqrt() - 1.0;
    assert!((r[0][1].unwrap() / (1500.0 / eta) - 1.0).abs() < 1e-12);
}

#[test]
fn unpumped_lossless_gain_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "gain",
            "--override",
            "material.a1=0",
            "--override",
            "material.a2=0",
            "--override",
            "gain.xi_ratios=[0.0]",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, r) = rows(&dir.path().join("gain.csv"));
    assert!(r.iter().all(|row| row[2].unwrap().abs() < 1e-10));
}

#[test]
fn gain_peak_row_matches_scalar_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "gain",
            "--override",
            "gain.xi_ratios=[0.9]",
            "--override",
            "gain.points=201",
        ],
    );
    assert!(o.status.success());
    let (_, r) = rows(&dir.path().join("gain.csv"));
    let center = &r[100];

    let design = VaractorDesign::reference(MaterialParams::strontium_titanate());
    let circuit = CircuitParams::reference();
    let opt = sweep::maximize_3wm(&design, &circuit, &DriveSpec::reference(), (0.0, 0.25)).unwrap();
    let rates = amplifier::rate_budget(opt.v0, &design, &circuit).unwrap();
    let half = 0.5 * rates.kappa;
    let xi = 0.9 * half;
    let re = rates.kappa_ext * half / (half * half - xi * xi) - 1.0;
    assert!((center[3].unwrap() / re - 1.0).abs() < 1e-12);
    assert!(center[4].unwrap().abs() < 1e-12 * re);
    assert!((center[2].unwrap() - 20.0 * re.abs().log10()).abs() < 1e-9);
}

#[test]
fn geometry_sweep_log_spacing() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "sweep",
            "--override",
            "sweep.variable=plate_separation",
            "--override",
            "sweep.min=100",
            "--override",
            "sweep.max=100000",
            "--override",
            "sweep.count=4",
            "--override",
            "sweep.spacing=log",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let (cols, r) = rows(&dir.path().join("sweep_plate_separation.csv"));
    assert_eq!(cols[0], "thickness_nm");
    let d: Vec<f64> = r.iter().map(|row| row[0].unwrap()).collect();
    assert!((d[1] / 1000.0 - 1.0).abs() < 1e-12 && (d[3] / 1e5 - 1.0).abs() < 1e-12);
    assert!(r.windows(2).all(|w| w[1][3].unwrap() < w[0][3].unwrap()));
}

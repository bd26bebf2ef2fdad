use std::fs;
use std::path::Path;
use std::process::Command;

use rydberg_switch_cli::commands::{self, sweep_rows};
use rydberg_switch_cli::config::{FigureKind, RunConfig, SweepAxis, SweepSection};
use rydberg_switch_cli::error::{exit, CliError};
use tempfile::tempdir;

const SMALL: &str = r#"
solver = "all"

[medium]
g = "200 gamma"
blockade_radius = "0.5 L"

[spinwave]
positions = ["0 um", "1 L"]

[output]
heatmap_stride = 16
"#;

fn small_in(dir: &Path) -> RunConfig {
    let mut cfg = RunConfig::parse(SMALL).unwrap();
    cfg.output.dir = dir.to_owned();
    cfg
}

fn rswitch() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rswitch"))
}

fn config_message(text: &str) -> String {
    match RunConfig::parse(text) {
        Err(CliError::Config(m)) => m,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn unknown_keys_rejected_with_line() {
    let m = config_message("[medium]\ng = \"100 gamma\"\ncolour = \"blue\"\n");
    assert!(m.contains("colour"), "{m}");
    assert!(m.contains("line 3"), "{m}");
    let m = config_message("[mediun]\n");
    assert!(m.contains("mediun"), "{m}");
}

#[test]
fn unitless_and_unknown_units_rejected_with_line() {
    let m = config_message("[pulse]\n\ntau = \"5\"\n");
    assert!(m.contains("line 3") && m.contains("no unit"), "{m}");
    let m = config_message("[medium]\nlength = \"20 furlong\"\n");
    assert!(m.contains("line 2") && m.contains("furlong"), "{m}");
    let m = config_message("[medium]\ng = 1000\n");
    assert!(m.contains("line 2"), "{m}");
}

#[test]
fn empty_positions_rejected() {
    let cfg = RunConfig::parse("[spinwave]\npositions = []\n").unwrap();
    match cfg.resolve() {
        Err(CliError::Config(m)) => assert!(m.contains("at least one position"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn conflicting_keys_rejected() {
    let both = "[medium]\nc6 = \"1 GHz um^6\"\nblockade_radius = \"10 um\"\n";
    assert!(RunConfig::parse(both).unwrap().resolve().is_err());
    let sites = "[spinwave]\nsites = 4\npositions = [\"1 um\"]\n";
    assert!(RunConfig::parse(sites).unwrap().resolve().is_err());
    let grid = "[grids]\nn_omega = 512\n";
    assert!(RunConfig::parse(grid).unwrap().resolve().is_err());
}

#[test]
fn si_and_relative_units_agree() {
    let a = RunConfig::parse("[medium]\nlength = \"2e-5 m\"\nblockade_radius = \"0.5 L\"\n[pulse]\ntau = \"5 /gamma\"\n")
        .unwrap()
        .resolve()
        .unwrap();
    let b = RunConfig::parse("[medium]\nlength = \"20 um\"\nblockade_radius = \"10000 nm\"\n")
        .unwrap()
        .resolve()
        .unwrap();
    assert!((a.params.length() - b.params.length()).abs() < 1e-12);
    assert!((a.params.c6() / b.params.c6() - 1.0).abs() < 1e-9);
    assert_eq!(a.pulse.tau(), b.pulse.tau());
}

#[test]
fn run_is_byte_deterministic_and_reports_cross_solver_deltas() {
    let (d1, d2) = (tempdir().unwrap(), tempdir().unwrap());
    let files = commands::run(&small_in(d1.path())).unwrap();
    commands::run(&small_in(d2.path())).unwrap();
    assert!(files.len() >= 13);
    for f in &files {
        let name = f.file_name().unwrap();
        let a = fs::read(d1.path().join(name)).unwrap();
        let b = fs::read(d2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name:?} differs between runs");
    }

    let deltas = fs::read_to_string(d1.path().join("deltas.txt")).unwrap();
    let value = |key: &str| -> f64 {
        let line = deltas.lines().find(|l| l.starts_with(key)).unwrap();
        line.rsplit(" = ").next().unwrap().parse().unwrap()
    };
    assert!(value("transmission_oracle_minus_spectral").abs() < 1e-3);
    assert!(value("overlap_max_abs_diff_oracle_spectral") < 1e-3);

    let heat = fs::read_to_string(d1.path().join("heatmap_spectral_0.csv")).unwrap();
    assert_eq!(heat.lines().next().unwrap(), "z [um],t [gamma^-1],|P|^2 [um^-1]");
    let exit_field = fs::read_to_string(d1.path().join("exit_field_oracle_1.csv")).unwrap();
    assert!(exit_field.starts_with("t [gamma^-1],re_E [um^-1/2],im_E [um^-1/2],|E|^2 [um^-1]\n"));
    let report = fs::read_to_string(d1.path().join("report_spectral.txt")).unwrap();
    assert!(report.contains("regime_warnings = R_b"));
}

#[test]
fn sweep_keeps_order_and_reports_bad_values() {
    let mut cfg = RunConfig::parse("[medium]\ng = \"200 gamma\"\n[spinwave]\nsites = 2\n").unwrap();
    let dir = tempdir().unwrap();
    cfg.output.dir = dir.path().to_owned();
    let sweep = SweepSection {
        axis: SweepAxis::Tau,
        values: vec!["10 /gamma".into(), "-1 /gamma".into(), "5 /gamma".into(), "5 hours".into()],
    };
    let rows = sweep_rows(&cfg, &sweep);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0].axis(), Some(10.0));
    assert_eq!(rows[2].axis(), Some(5.0));
    assert!(rows[1].status.starts_with("skipped"));
    assert!(rows[3].status.starts_with("skipped"));
    // a shorter pulse has more bandwidth outside the absorption window
    assert!(rows[2].t_numeric.unwrap() > rows[0].t_numeric.unwrap());
    assert!(rows[0].t_analytic.is_some());

    let mut csv = Vec::new();
    commands::write_sweep_csv(&mut csv, SweepAxis::Tau, &rows).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let header_cols = text.lines().next().unwrap().split(',').count();
    assert!(text.lines().all(|l| l.split(',').count() == header_cols), "{text}");
}

#[test]
fn figure_three_profiles() {
    let dir = tempdir().unwrap();
    let mut cfg = RunConfig::default_config();
    cfg.output.dir = dir.path().to_owned();
    commands::figure(FigureKind::Fig3, &cfg).unwrap();
    for f in ["fig3_heatmap_z0.csv", "fig3_heatmap_zL.csv", "fig3_report.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let text = fs::read_to_string(dir.path().join("fig3_intensity.csv")).unwrap();
    let rows: Vec<[f64; 3]> = text
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect();
    let argmax = |k: usize| rows.iter().max_by(|a, b| a[k].total_cmp(&b[k])).unwrap()[0];
    assert!(argmax(1) < 1.0, "gate at 0 peaks at the entrance");
    assert!((argmax(2) - 10.0).abs() < 2.0, "gate at L peaks near L - R_b");
}

#[test]
fn figure_scenario_needs_a_name() {
    let mut cfg = RunConfig::parse("scenario = \"figure\"\n").unwrap();
    let dir = tempdir().unwrap();
    cfg.output.dir = dir.path().to_owned();
    assert!(matches!(commands::run(&cfg), Err(CliError::Config(_))));
    assert!(matches!(
        commands::sweep(&cfg),
        Err(CliError::Config(m)) if m.contains("[sweep]")
    ));
}

#[test]
fn exit_codes_are_distinct() {
    let codes = [exit::OK, exit::CHECK_FAILED, exit::USAGE, exit::CONFIG, exit::RUNTIME];
    for (i, a) in codes.iter().enumerate() {
        assert!(codes[i + 1..].iter().all(|b| a != b));
    }
    assert_eq!(CliError::ChecksFailed(2).exit_code(), exit::CHECK_FAILED);

    let status = |cmd: &mut Command| cmd.output().unwrap().status.code().unwrap();
    assert_eq!(status(rswitch().arg("run")), exit::USAGE as i32);
    assert_eq!(status(rswitch().args(["run", "--config", "/nonexistent.toml"])), exit::USAGE as i32);
    assert_eq!(status(rswitch().arg("frobnicate")), exit::USAGE as i32);
    assert_eq!(status(rswitch().args(["validate", "--checks", "99"])), exit::USAGE as i32);

    let dir = tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[medium]\nspin = \"up\"\n").unwrap();
    let out = rswitch().arg("run").arg("--config").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(exit::CONFIG as i32));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bad.toml") && stderr.contains("line 2"), "{stderr}");
}

#[test]
fn binary_runs_limits_check_and_sweep() {
    let out = rswitch().args(["validate", "--checks", "9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("[PASS]  9 limits"));

    let dir = tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    fs::write(
        &cfg,
        "scenario = \"sweep\"\n[medium]\ng = \"300 gamma\"\n[spinwave]\nsites = 2\n[sweep]\naxis = \"g\"\nvalues = [\"100 gamma\", \"-5 gamma\", \"300 gamma\"]\n",
    )
    .unwrap();
    let out = rswitch()
        .args(["run", "--threads", "2", "--solver", "analytic", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("g [gamma],T_numeric [1]"));
    assert!(lines[1].starts_with("1.000000000e2,,"));
    assert!(lines[2].contains("skipped"));
}

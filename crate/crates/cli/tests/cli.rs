use std::fs;
use std::process::Command;

use bounded_opinion::dsmc::InitialCondition;
use bounded_opinion::par::ExecMode;
use bounded_opinion_cli::plotdata::Table;
use bounded_opinion_cli::{
    emit_plotdata, expand, parse_config, rerun_manifest, run_scenario, Overrides, Preset, RunManifest,
};

const MINIMAL: &str = r#"
lambda = 0.5
delta_amp = 1.0
n_particles = 2000
t_end = 3.0
seed = 5

[init]
kind = "ranges"
ranges = [ { lo = 0.5, hi = 0.9, weight = 1.0 }, { lo = -0.9, hi = -0.5, weight = 1.0 } ]
"#;

fn small(particles: usize, t_end: f64) -> Overrides {
    Overrides { particles: Some(particles), t_end: Some(t_end), ..Default::default() }
}

#[test]
fn config_defaults_fill_in() {
    let c = parse_config(MINIMAL).unwrap();
    assert_eq!((c.a_rate, c.b_rate, c.m_party), (1.0, 0.0, 0.0));
    assert_eq!(c.dt, 0.1);
    assert_eq!(c.histogram_bins, 100);
    assert_eq!(c.exec, ExecMode::Deterministic);
}

#[test]
fn config_lists_every_missing_field() {
    let err = parse_config("lambda = 0.5\n").unwrap_err().to_string();
    assert!(err.starts_with("config error: missing required fields:"), "{err}");
    for field in ["delta_amp", "n_particles", "t_end", "seed", "init"] {
        assert!(err.contains(field), "{err}");
    }
    assert!(!err.contains("lambda"));
}

#[test]
fn config_rejects_unknown_keys_and_bad_values() {
    let err = parse_config(&format!("colour = 3\n{MINIMAL}")).unwrap_err().to_string();
    assert!(err.contains("colour"), "{err}");
    let err = format!("{:#}", parse_config(&MINIMAL.replace("lambda = 0.5", "lambda = 1.5")).unwrap_err());
    assert!(err.contains("lambda"), "{err}");
}

#[test]
fn config_accepts_parallel_and_juttner() {
    let text = r#"
lambda = 0.0
delta_amp = 0.0
n_particles = 5000
t_end = 1.0
seed = 1
exec = { mode = "parallel", chunks = 16 }
kernel = "literal-flux"
[init]
kind = "juttner"
chi = 2.0
mbar = 0.3
"#;
    let c = parse_config(text).unwrap();
    assert_eq!(c.exec, ExecMode::Parallel { chunks: 16 });
    assert_eq!(c.init, InitialCondition::Juttner { chi: 2.0, mbar: 0.3 });
}

#[test]
fn presets_expand_to_documented_runs() {
    let a1 = expand(Preset::A1, &Overrides::default()).unwrap();
    assert_eq!(a1.runs.len(), 1);
    let c = &a1.runs[0].config;
    assert_eq!((c.lambda, c.delta_amp, c.b_rate, c.n_particles), (0.0, 0.0, 0.0, 100_000));
    assert_eq!(c.init, InitialCondition::symmetric_band(0.99, 1.0));

    let c1 = expand(Preset::C1, &Overrides::default()).unwrap();
    let amps: Vec<f64> = c1.runs.iter().map(|r| r.config.delta_amp).collect();
    assert_eq!(amps, vec![1.0, 5.0, 11.5, 25.0]);
    let seeds: std::collections::HashSet<u64> = c1.runs.iter().map(|r| r.config.seed).collect();
    assert_eq!(seeds.len(), 4);

    let grid = expand(Preset::DGrid, &Overrides::default()).unwrap();
    assert_eq!(grid.runs.len(), 6);
    assert!(grid.runs.iter().all(|r| r.config.lambda == 0.0 && r.config.b_rate > 0.0));

    assert!("nope".parse::<Preset>().unwrap_err().to_string().contains("d-grid"));
}

#[test]
fn scenario_writes_outputs_and_reruns_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let plan = expand(Preset::A1, &small(3000, 4.0)).unwrap();
    let manifests = run_scenario(&plan, dir.path()).unwrap();
    assert_eq!(manifests.len(), 1);
    let run_dir = dir.path().join("a1");
    for name in ["timeseries.csv", "histograms.csv", "histogram_avg.csv", "manifest.json"] {
        assert!(run_dir.join(name).exists(), "{name}");
    }
    let ts = Table::read(&run_dir.join("timeseries.csv")).unwrap();
    let t = ts.col("t").unwrap();
    assert_eq!(t.first(), Some(&0.0));
    assert!((t.last().unwrap() - 4.0).abs() < 1e-9);
    assert!(ts.col("chi").unwrap().iter().all(|c| *c > 0.0));

    let again = dir.path().join("again");
    let m = rerun_manifest(&run_dir.join("manifest.json"), &again).unwrap();
    assert_eq!(m.seed, manifests[0].seed);
    assert_eq!(fs::read(run_dir.join("timeseries.csv")).unwrap(), fs::read(again.join("timeseries.csv")).unwrap());
    let stored = RunManifest::read(&run_dir.join("manifest.json")).unwrap();
    assert!(stored.failure.is_none() && stored.summary.is_some());
}

#[test]
fn figure_data_needs_its_runs() {
    let dir = tempfile::tempdir().unwrap();
    let err = emit_plotdata(dir.path(), "fig99", dir.path()).unwrap_err().to_string();
    assert!(err.contains("unknown figure") && err.contains("fig7-left"), "{err}");
    let err = emit_plotdata(dir.path(), "fig3", dir.path()).unwrap_err().to_string();
    assert!(err.contains("a1"), "{err}");
}

#[test]
fn fig1_table_reports_the_peak() {
    let dir = tempfile::tempdir().unwrap();
    let files = emit_plotdata(dir.path(), "fig1", dir.path()).unwrap();
    let peak = files.iter().find(|p| p.to_string_lossy().contains("peak")).expect("peak file");
    let text = fs::read_to_string(peak).unwrap();
    assert!(text.contains("4.13"), "{text}");
}

#[test]
fn binary_lists_and_runs_configs() {
    let exe = env!("CARGO_BIN_EXE_bounded-opinion");
    let out = Command::new(exe).arg("list").output().unwrap();
    assert!(out.status.success());
    let listing = String::from_utf8_lossy(&out.stdout);
    for p in Preset::ALL {
        assert!(listing.contains(p.name()));
    }

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, MINIMAL).unwrap();
    let out = Command::new(exe)
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out").read_dir().unwrap().count() > 0);

    fs::write(&cfg, "lambda = 0.5\n").unwrap();
    let out = Command::new(exe).args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing required fields"));
}

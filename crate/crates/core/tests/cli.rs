use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use wigner_carrier::bench::{emit_field_csv, field_file_name, read_field_csv};
use wigner_carrier::grid::GridSpec;
use wigner_carrier::schrodinger::init_superposition_02;
use wigner_carrier::wigner::wigner_from_wavefunction;

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wigner-bench"))
        .args(args)
        .env_remove("WIGNER_BENCH_OUT")
        .output()
        .expect("binary runs")
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn error_body(out: &Output) -> Value {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    serde_json::from_str(text.trim()).unwrap_or_else(|_| panic!("stderr is not JSON: {text}"))
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = bench(&[
            "--scenario",
            "quartic-compare",
            "--grid-preset",
            "reduced",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let listed = String::from_utf8(out.stdout).unwrap();
        assert!(listed.lines().any(|l| l.ends_with("summary.json")));
    }
    for file in ["summary.json", "series.csv"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file} differs");
    }
    let s = summary(a.path());
    assert_eq!(s["scenario"], "quartic-compare");
    assert_eq!(s["schema_version"], 1);
    assert!(s["classical_error"].as_f64().unwrap() > 0.0);
}

#[test]
fn series_has_diagnostic_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(&[
        "--scenario",
        "harmonic-null",
        "--grid-preset",
        "reduced",
        "--samples",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_path(dir.path().join("series.csv")).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&header[..3], ["run", "index", "time"]);
    assert!(header.iter().any(|h| h == "chi_q"));
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert!(rows.iter().filter(|r| &r[0] == "corrected").count() == 5);
    assert!(rows.iter().all(|r| r.len() == header.len()));
}

#[test]
fn field_dumps_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(&[
        "--scenario",
        "quartic-residual-field",
        "--grid-preset",
        "reduced",
        "--dump-fields",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let g = GridSpec::reduced();
    let dump = dir.path().join(field_file_name("residual", 0.0));
    let rows = read_field_csv(&dump).unwrap();
    assert_eq!(rows.len(), g.n_q * g.n_p);
    let mass: f64 = rows.iter().map(|r| r.2).sum::<f64>() * g.cell();
    assert!(mass.abs() <= 1e-12);
    let pos = read_field_csv(&dir.path().join(field_file_name("residual_positive", 0.0))).unwrap();
    let neg = read_field_csv(&dir.path().join(field_file_name("residual_negative", 0.0))).unwrap();
    for ((r, a), b) in rows.iter().zip(&pos).zip(&neg) {
        assert_eq!(r.2, a.2 - b.2);
        assert!(a.2 == 0.0 || b.2 == 0.0);
    }
}

#[test]
fn balanced_dump_has_one_row_per_point_and_keeps_the_norm() {
    let dir = tempfile::tempdir().unwrap();
    let g = GridSpec::balanced();
    let w = wigner_from_wavefunction(&init_superposition_02(g).unwrap(), &g).unwrap();
    let path = dir.path().join(field_file_name("wigner", 0.0));
    emit_field_csv(&w, &path).unwrap();
    let rows = read_field_csv(&path).unwrap();
    assert_eq!(rows.len(), 384 * 768);
    let norm: f64 = rows.iter().map(|r| r.2).sum::<f64>() * g.cell();
    assert!((norm - w.integral()).abs() <= 1e-12);
    assert_eq!((rows[769].0, rows[769].1), (g.q(1), g.p(1)));
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out_dir = dir.path().join("out");
    std::fs::write(
        &cfg,
        format!(
            "scenario = \"quartic-compare\"\nlambda = 0.05\ngrid-preset = \"reduced\"\nsamples = 3\nout = \"{}\"\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let out = bench(&[
        "--config",
        cfg.to_str().unwrap(),
        "--lambda",
        "0.03",
        "--t-final",
        "0.5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let s = summary(&out_dir);
    assert_eq!(s["config"]["lambda"], 0.03);
    assert_eq!(s["config"]["samples"], 3);
    assert_eq!(s["config"]["t_final"], 0.5);
    assert_eq!(s["config"]["grid_preset"], "reduced");
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_wigner-bench"))
        .args(["--scenario", "underdetermination-demo"])
        .env("WIGNER_BENCH_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let s = summary(dir.path());
    assert!(s["max_marginal_difference"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn configuration_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let cases: [&[&str]; 5] = [
        &["--scenario", "quartic", "--out", d],
        &["--out", d],
        &["--scenario", "quartic-compare", "--lambda=-1", "--out", d],
        &[
            "--scenario",
            "quartic-compare",
            "--scheme",
            "euler",
            "--out",
            d,
        ],
        &[
            "--scenario",
            "quartic-compare",
            "--config",
            "/nonexistent/run.toml",
            "--out",
            d,
        ],
    ];
    for args in cases {
        let out = bench(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let body = error_body(&out);
        assert_eq!(body["error"]["kind"], "invalid-config", "{args:?}");
        assert!(body["error"]["message"].as_str().unwrap().len() > 3);
    }
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "lamda = 0.1\n").unwrap();
    let out = bench(&[
        "--scenario",
        "quartic-compare",
        "--config",
        bad.to_str().unwrap(),
        "--out",
        d,
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_body(&out)["error"]["stage"], "config");
}

#[test]
fn run_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("coarse.toml");
    std::fs::write(
        &cfg,
        "scenario = \"quartic-compare\"\nn-q = 32\ndq = 0.25\n",
    )
    .unwrap();
    let out = bench(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let body = error_body(&out);
    assert_eq!(body["error"]["stage"], "run");
    assert_eq!(body["error"]["kind"], "unresolved");
}

#[test]
fn help_and_version_succeed() {
    for flag in ["--help", "--version"] {
        let out = bench(&[flag]);
        assert!(out.status.success());
        assert!(!out.stdout.is_empty());
    }
}

//! End-to-end contract tests for the `epdiff` binary: exit codes, output
//! schemas, determinism, and flag/config-file precedence.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn epdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epdiff"))
        .args(args)
        .output()
        .expect("spawn epdiff")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn simulate_smooth_run_exit_0_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = epdiff(&[
        "simulate",
        "--operator",
        "sobolev",
        "--s",
        "3",
        "--u0",
        "sin",
        "--T",
        "0.5",
        "--N",
        "32",
        "--output",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap();
    assert!(csv.starts_with("t,energy,h12,h32,h2,sup_u,sup_ux,dt,tail_fraction\n"));
    assert!(csv.lines().count() > 10);

    let summary = json(&out_dir.join("summary.json"));
    assert_eq!(summary["verdict"], "none");
    assert_eq!(summary["termination"], "horizon");
    assert!(summary["energy_drift_rel"].as_f64().unwrap() < 1e-8);

    assert!(out_dir.join("plot.gp").exists());
    let snaps: Vec<_> = fs::read_dir(out_dir.join("snapshots")).unwrap().collect();
    assert!(!snaps.is_empty());
    // snapshot schema round-trips as an initial condition
    let snap_path = out_dir.join("snapshots/snap_000000.json");
    let snap = json(&snap_path);
    assert_eq!(snap["bandwidth"], 32);
    assert!(snap["coeffs"].as_array().unwrap().len() == 33);
    let replay = epdiff(&[
        "simulate",
        "--operator",
        "sobolev_32",
        "--u0",
        snap_path.to_str().unwrap(),
        "--T",
        "0.1",
        "--N",
        "32",
        "--output",
        dir.path().join("replay").to_str().unwrap(),
    ]);
    assert_eq!(code(&replay), 0);
}

#[test]
fn simulate_burgers_blowup_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = epdiff(&[
        "simulate",
        "--operator",
        "burgers",
        "--u0",
        "sin",
        "--T",
        "1",
        "--N",
        "256",
        "--output",
        dir.path().join("b").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let summary = json(&dir.path().join("b/summary.json"));
    assert_eq!(summary["verdict"], "certain");
    let t_event = summary["t_event"].as_f64().unwrap();
    assert!((0.31..0.36).contains(&t_event), "t_event = {t_event}");
}

#[test]
fn simulate_degenerate_needs_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let out = epdiff(&[
        "simulate",
        "--operator",
        "weil_petersson",
        "--u0",
        "sin",
        "--T",
        "0.1",
        "--N",
        "32",
        "--output",
        dir.path().join("wp").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));

    let out = epdiff(&[
        "simulate",
        "--operator",
        "weil_petersson",
        "--allow-degenerate",
        "--u0",
        "sin",
        "--T",
        "0.1",
        "--N",
        "32",
        "--output",
        dir.path().join("wp2").to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn verify_divergent_order_exits_1() {
    let out = epdiff(&["verify", "lemma_c", "--order", "-0.25", "--fields", "10"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverges"));
}

#[test]
fn verify_writes_reports_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = epdiff(&[
        "verify",
        "q_decomposition",
        "--operator",
        "one_minus_HD3",
        "--N",
        "32",
        "--fields",
        "25",
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let reports = json(&dir.path().join("reports.json"));
    assert_eq!(reports["pass"], true);
    let rows = reports["reports"].as_array().unwrap();
    assert!(rows
        .iter()
        .any(|r| r["name"] == "q_decomposition" && r["lhs"].as_f64().unwrap() <= 1e-10));
}

#[test]
fn verify_uncertified_operator_refused_for_class_suites() {
    let out = epdiff(&[
        "verify",
        "q_decomposition",
        "--operator",
        "burgers",
        "--fields",
        "5",
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("certif"));
}

#[test]
fn decompose_sobolev_binomial_anchor() {
    let dir = tempfile::tempdir().unwrap();
    let out = epdiff(&[
        "decompose",
        "--operator",
        "sobolev",
        "--s",
        "3",
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let dump = json(&dir.path().join("decompose.json"));
    let coeffs = dump["coefficients"].as_array().unwrap();
    let expected = [1.0, 0.0, 1.5, 0.0, 0.375];
    for (c, e) in coeffs.iter().zip(expected) {
        assert!((c.as_f64().unwrap() - e).abs() <= 1e-6);
    }
    assert_eq!(dump["report"]["pass"], true);
}

#[test]
fn decompose_weil_petersson_fails_ellipticity_with_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let out = epdiff(&[
        "decompose",
        "--operator",
        "weil_petersson",
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0); // expansion converges; class verdicts carry the failure
    let dump = json(&dir.path().join("decompose.json"));
    assert_eq!(dump["report"]["ellipticity"], false);
    assert_eq!(
        dump["report"]["kernel_modes"],
        serde_json::json!([-1, 0, 1])
    );
    let coeffs = dump["coefficients"].as_array().unwrap();
    for (c, e) in coeffs.iter().zip([1.0, 0.0, -1.0, 0.0, 0.0]) {
        assert!((c.as_f64().unwrap() - e).abs() <= 1e-6);
    }
}

#[test]
fn decompose_burgers_expansion_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = epdiff(&[
        "decompose",
        "--operator",
        "burgers",
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("expansion failure"));
}

#[test]
fn sweep_rows_and_single_point_consistency() {
    let dir = tempfile::tempdir().unwrap();
    let out = epdiff(&[
        "sweep",
        "--s-min",
        "1.5",
        "--s-max",
        "1.5",
        "--steps",
        "1",
        "--u0",
        "sin",
        "--T",
        "0.3",
        "--N",
        "64",
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let phase = fs::read_to_string(dir.path().join("phase.csv")).unwrap();
    let mut lines = phase.lines();
    assert_eq!(lines.next().unwrap(), "s,verdict,t_event,max_sup_ux");
    let row = lines.next().unwrap();
    assert!(row.contains(",none,"), "row: {row}");

    // single-point sweep agrees with simulate on the same configuration
    let sim_dir = dir.path().join("sim");
    let out = epdiff(&[
        "simulate",
        "--operator",
        "sobolev",
        "--s",
        "3",
        "--u0",
        "sin",
        "--T",
        "0.3",
        "--N",
        "64",
        "--output",
        sim_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&sim_dir.join("summary.json"))["verdict"], "none");

    // empty range
    let out = epdiff(&["sweep", "--s-min", "1.0", "--s-max", "0.5", "--steps", "3"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn config_file_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        "operator = \"sobolev\"\ns = 3.0\nn = 32\nt = 0.4\nu0 = \"sin\"\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = epdiff(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--T",
        "0.2",
        "--output",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = json(&out_dir.join("summary.json"));
    // flag horizon wins over the file's 0.4; file bandwidth is honored
    assert_eq!(summary["horizon"].as_f64().unwrap(), 0.2);
    assert_eq!(summary["bandwidth"], 32);

    // unknown keys are configuration errors
    fs::write(&cfg, "nonsense = 1\n").unwrap();
    let out = epdiff(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn identical_configs_give_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = epdiff(&[
            "simulate",
            "--operator",
            "sobolev_32",
            "--u0",
            "random:3:42",
            "--T",
            "0.3",
            "--N",
            "32",
            "--output",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        out_dir
    };
    let a = run("a");
    let b = run("b");
    for file in [
        "diagnostics.csv",
        "summary.json",
        "snapshots/snap_000000.json",
    ] {
        let fa = fs::read(a.join(file)).unwrap();
        let fb = fs::read(b.join(file)).unwrap();
        assert_eq!(fa, fb, "{file} differs between identical runs");
    }
}

#[test]
fn tabulated_symbol_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("camassa.csv");
    let mut text = String::from("k,a\n");
    for k in 0..=96i64 {
        text.push_str(&format!("{k},{}\n", 1 + k * k));
    }
    fs::write(&table, text).unwrap();
    let out = epdiff(&[
        "simulate",
        "--operator",
        table.to_str().unwrap(),
        "--order",
        "2",
        "--u0",
        "sin",
        "--T",
        "0.2",
        "--N",
        "32",
        "--output",
        dir.path().join("t").to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

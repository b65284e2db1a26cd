use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn covqm(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covqm"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("COVQM_OUT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn header(path: &Path) -> Value {
    let text = fs::read_to_string(path).unwrap();
    serde_json::from_str(text.lines().next().unwrap()).unwrap()
}

fn report(path: &Path) -> Value {
    let text = fs::read_to_string(path).unwrap();
    let body: String = text.lines().skip(1).collect::<Vec<_>>().join("\n");
    serde_json::from_str(&body).unwrap()
}

#[test]
fn demo_gaussian_writes_tables_and_report() {
    let dir = TempDir::new().unwrap();
    let o = covqm(&["demo-gaussian", "--seed", "7"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&dir.path().join("report.json"));
    assert!(r["max_chi_error"].as_f64().unwrap() < 1e-8);
    let h = header(&dir.path().join("chi.csv"));
    assert_eq!(h["seed"], 7);
    assert_eq!(h["artifact"], "covqm");
    assert!(h["version"].is_string());
    assert_eq!(h["config"]["grid_n"], 512);
    let chi = fs::read_to_string(dir.path().join("chi.csv")).unwrap();
    assert_eq!(chi.lines().nth(1).unwrap(), "k1,q1,re,im,reference,error");
    assert_eq!(chi.lines().count(), 2 + 33 * 33);
}

#[test]
fn unresolvable_width_is_a_configuration_error() {
    let dir = TempDir::new().unwrap();
    let o = covqm(&["demo-gaussian", "--lambda", "0.01"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not resolvable"));
}

#[test]
fn bad_configuration_exits_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&covqm(&["demo-gaussian", "--tol-override", "bogus=1"], dir.path())), 2);
    assert_eq!(code(&covqm(&["demo-gaussian", "--tol-override", "chi=-1"], dir.path())), 2);
    assert_eq!(code(&covqm(&["demo-gaussian", "--grid-n", "100"], dir.path())), 2);
    assert_eq!(code(&covqm(&["demo-gaussian", "--kappa", "0"], dir.path())), 2);
}

#[test]
fn tight_tolerance_reports_failures_with_exit_1() {
    let dir = TempDir::new().unwrap();
    let o = covqm(&["check-invariants", "--tol-override", "ccr=1e-20"], dir.path());
    assert_eq!(code(&o), 1);
    let r = report(&dir.path().join("invariants.json"));
    assert_eq!(r["pass"], false);
    let failed: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["ccr"]);
}

#[test]
fn invariant_verdicts_do_not_depend_on_the_seed() {
    let verdicts = |seed: &str| {
        let dir = TempDir::new().unwrap();
        assert_eq!(code(&covqm(&["check-invariants", "--seed", seed], dir.path())), 0);
        let r = report(&dir.path().join("invariants.json"));
        r["checks"].as_array().unwrap().iter().map(|c| (c["name"].clone(), c["pass"].clone())).collect::<Vec<_>>()
    };
    assert_eq!(verdicts("1"), verdicts("2024"));
}

#[test]
fn reruns_are_byte_identical() {
    for cmd in ["demo-gaussian", "cocycle-table", "check-invariants"] {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        assert_eq!(code(&covqm(&[cmd, "--seed", "3"], a.path())), 0);
        assert_eq!(code(&covqm(&[cmd, "--seed", "3"], b.path())), 0);
        let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(!names.is_empty());
        for n in names {
            assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{cmd} {n:?}");
        }
    }
}

#[test]
fn module_dumps_have_expected_shape() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&covqm(&["cocycle-table"], dir.path())), 0);
    let csv = fs::read_to_string(dir.path().join("cocycle.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 200);
    let worst = csv
        .lines()
        .skip(2)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(worst < 1e-8);

    assert_eq!(code(&covqm(&["spin-demo"], dir.path())), 0);
    let csv = fs::read_to_string(dir.path().join("multipliers.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "z_half_turn,z_half_turn,-1"));

    assert_eq!(code(&covqm(&["circle-spectrum", "--grid-n", "64"], dir.path())), 0);
    let csv = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(2).collect();
    assert_eq!(rows.len(), 63);
    for row in rows {
        let cols: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((cols[1] - cols[0]).abs() < 1e-10);
        assert!((cols[2] - cols[0] * cols[0] / 2.0).abs() < 1e-9);
    }

    assert_eq!(code(&covqm(&["vn-check"], dir.path())), 0);
    let r = report(&dir.path().join("vn.json"));
    assert!(r["idempotency"].as_f64().unwrap() < 1e-8);
    assert!(r["rank_gap"].as_f64().unwrap() < 1e-6);
}

#[test]
fn export_then_import_round_trip() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&covqm(&["export-wavefunction", "--grid-n", "256", "--box", "32"], dir.path())), 0);
    let file = dir.path().join("wavefunction.txt");
    let h = header(&file);
    assert_eq!((h["dim"].as_u64(), h["N"].as_u64(), h["L"].as_f64()), (Some(1), Some(256), Some(32.0)));
    let o = covqm(&["import-wavefunction", "--input", file.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0);
    let r = report(&dir.path().join("import.json"));
    assert!((r["norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((r["width"].as_f64().unwrap() - 1.0).abs() < 1e-8);

    fs::write(dir.path().join("broken.txt"), "{\"dim\":1,\"N\":4,\"L\":2.0}\n0 1 0\n").unwrap();
    let broken = dir.path().join("broken.txt");
    assert_eq!(code(&covqm(&["import-wavefunction", "--input", broken.to_str().unwrap()], dir.path())), 2);
}

#[test]
fn config_file_and_environment() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "lambda = 2\ngrid-n = 512\nseed = 11\ntol.chi = 1e-7\n").unwrap();
    let env_out = dir.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_covqm"))
        .args(["demo-gaussian", "--config", cfg.to_str().unwrap(), "--seed", "12"])
        .env("COVQM_OUT", &env_out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let h = header(&env_out.join("report.json"));
    assert_eq!(h["config"]["lambda"], 2.0);
    assert_eq!(h["config"]["tolerances"]["chi"], 1e-7);
    assert_eq!(h["seed"], 12);
}

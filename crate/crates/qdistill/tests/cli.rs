use std::path::Path;
use std::process::{Command, Output};

use qdistill::io::StateFile;
use qdistill::report::compare_reports;
use qdistill_core::DensityMatrix;
use serde_json::Value;

fn qdistill(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdistill"))
        .args(args)
        .current_dir(dir)
        .env("QDISTILL_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(dir: &Path, args: &[&str]) -> (i32, Value) {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--report", "r.json"]);
    let o = qdistill(dir, &full);
    let text = std::fs::read_to_string(dir.join("r.json")).expect("report written");
    (code(&o), serde_json::from_str(&text).expect("report is JSON"))
}

#[test]
fn gen_writes_valid_states() {
    let dir = tempfile::tempdir().unwrap();
    let o = qdistill(dir.path(), &["gen", "werner", "--d", "3", "--alpha", "-0.9", "--out", "w.qstate.json"]);
    assert_eq!(code(&o), 0);
    let op = StateFile::load(&dir.path().join("w.qstate.json")).unwrap().op;
    assert_eq!(op.dims(), (3, 3));
    DensityMatrix::new(op).unwrap();

    let o = qdistill(dir.path(), &["gen", "maxent", "--d", "2"]);
    assert_eq!(code(&o), 0);
    let f = StateFile::from_json(std::str::from_utf8(&o.stdout).unwrap(), "stdout").unwrap();
    let pplus = qdistill_core::states::max_entangled(2).unwrap();
    assert_eq!(f.op, pplus);
}

#[test]
fn bad_parameters_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = qdistill(dir.path(), &["gen", "werner", "--alpha", "2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Werner"));
    assert_eq!(code(&qdistill(dir.path(), &["gen", "isotropic", "--d", "3"])), 2);
}

#[test]
fn io_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&qdistill(dir.path(), &["check", "absent.qstate.json"])), 3);
    assert_eq!(code(&qdistill(dir.path(), &["gen", "maxent", "--out", "no/such/dir/x.json"])), 3);
}

#[test]
fn threads_variable_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qdistill"))
        .args(["gen", "maxent"])
        .current_dir(dir.path())
        .env("QDISTILL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn distill_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    qdistill(d, &["gen", "isotropic", "--d", "3", "--fidelity", "0.5", "-o", "iso.qstate.json"]);
    let (c, r) = report(d, &["distill", "iso.qstate.json", "--restarts", "8"]);
    assert_eq!(c, 0);
    let screen = r["details"]["screen"].as_array().unwrap();
    let l1 = screen.iter().find(|e| e["map"] == "lambda1" && e["side"] == "right").unwrap();
    assert!((l1["witness_value"].as_f64().unwrap() + 0.5).abs() < 1e-12);
    assert_eq!(l1["flagged"], true);
    assert_eq!(r["schema"], 1);

    qdistill(d, &["gen", "random", "--d", "3", "--rank", "9", "--seed", "2", "-o", "full.qstate.json"]);
    qdistill(d, &["gen", "isotropic", "--d", "3", "--fidelity", "0.1111111111111111", "-o", "mm.qstate.json"]);
    let (c, r) = report(d, &["distill", "mm.qstate.json", "--restarts", "8"]);
    assert_eq!(c, 1);
    assert_eq!(r["verdicts"].as_array().unwrap().last().unwrap()["kind"], "none");
}

#[test]
fn two_copy_certificate_from_one_copy_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    qdistill(d, &["gen", "werner", "--d", "2", "--alpha", "-0.9", "-o", "w.qstate.json"]);
    let (c, r) = report(d, &["distill", "w.qstate.json", "--copies", "2", "--restarts", "4"]);
    assert_eq!(c, 0);
    let verdicts = r["verdicts"].as_array().unwrap();
    let fin = verdicts.last().unwrap();
    assert_eq!(fin["copies"], 2);
    assert_eq!(fin["certificate"]["dims"], serde_json::json!([4, 4]));
    assert!(verdicts.iter().any(|v| v["label"].as_str().unwrap().ends_with("_extended")));

    // ψ ⊗ |φ⟩ with φ a basis product vector: the value factorizes
    let one = verdicts.iter().find(|v| v["label"] == "search_1").unwrap()["value"].as_f64().unwrap();
    let ext = verdicts.iter().find(|v| v["label"] == "search_1_extended").unwrap()["value"].as_f64().unwrap();
    let rho = qdistill_core::states::werner(2, -0.9).unwrap();
    let (_, phi) = qdistill_core::distill::best_product_basis_vector(&rho);
    assert!((ext - one * phi).abs() < 1e-12);
}

#[test]
fn kpos_examples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (c, r) = report(d, &["kpos", "--map", "lambda1", "--d", "3", "--k", "2", "--restarts", "8"]);
    assert_eq!(c, 0);
    // at (|00⟩+|11⟩)/√2: ⟨ψ|1 - 3P₊|ψ⟩ = 1 - 3·(2/3) = -1
    assert!((r["verdicts"][0]["value"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert_eq!(code(&qdistill(d, &["kpos", "--map", "lambda1", "--d", "3", "--k", "1", "--restarts", "8"])), 1);

    qdistill(d, &["gen", "isotropic", "--d", "3", "--fidelity", "0.1111111111111111", "-o", "mixed.qstate.json"]);
    assert_eq!(code(&qdistill(d, &["kpos", "--from-state", "mixed.qstate.json", "--k", "2", "--restarts", "8"])), 1);

    qdistill(d, &["export-map", "--map", "lambda1", "--d", "3", "-o", "l1.qstate.json"]);
    let f = StateFile::load(&d.join("l1.qstate.json")).unwrap();
    assert_eq!(f.jamiolkowski_scale, Some(3.0));
    let (c, r) = report(d, &["kpos", "--operator", "l1.qstate.json", "--k", "2", "--restarts", "8"]);
    assert_eq!(c, 0);
    assert!((r["verdicts"][0]["value"].as_f64().unwrap() + 1.0).abs() < 1e-9);
}

#[test]
fn check_examples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    qdistill(d, &["gen", "maxent", "--d", "3", "-o", "p.qstate.json"]);
    let (c, r) = report(d, &["check", "p.qstate.json"]);
    assert_eq!(c, 0);
    assert!((r["details"]["witness_values"]["lambda1"].as_f64().unwrap() + 2.0).abs() < 1e-12);

    qdistill(d, &["gen", "isotropic", "--d", "3", "--fidelity", "0.1111111111111111", "-o", "m.qstate.json"]);
    let (c, r) = report(d, &["check", "m.qstate.json"]);
    assert_eq!(c, 1);
    for (_, v) in r["details"]["witness_values"].as_object().unwrap() {
        assert!(v.as_f64().unwrap() >= 0.0);
    }

    std::fs::write(d.join("nh.qstate.json"), r#"{"dims":[1,2],"matrix":[[[0.5,0],[0.5,0]],[[0,0],[0.5,0]]]}"#).unwrap();
    let (c, r) = report(d, &["check", "nh.qstate.json"]);
    assert_eq!(c, 2);
    assert!(r["details"]["failed"][0].as_str().unwrap().contains("Hermitian"));

    std::fs::write(d.join("bad.qstate.json"), r#"{"dims":[2],"matrix":[]}"#).unwrap();
    let o = qdistill(d, &["check", "bad.qstate.json"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

fn parse_csv(text: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("param,min_pt_eig,reduction_value,rank2_min_value,verdict"));
    lines.map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn sweep_examples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = qdistill(d, &["sweep", "werner", "--d", "2", "--from", "-1", "--to", "0", "--steps", "11"]);
    let rows = parse_csv(std::str::from_utf8(&o.stdout).unwrap());
    assert_eq!(rows.len(), 11);
    for r in &rows {
        let min_pt: f64 = r[1].parse().unwrap();
        assert_eq!(r[4] == "violation", min_pt < -1e-9, "{r:?}");
    }

    let o = qdistill(
        d,
        &[
            "sweep",
            "isotropic",
            "--d",
            "3",
            "--from",
            "0",
            "--to",
            "1",
            "--steps",
            "11",
            "--restarts",
            "8",
            "-o",
            "iso.csv",
        ],
    );
    assert_eq!(code(&o), 0);
    let rows = parse_csv(&std::fs::read_to_string(d.join("iso.csv")).unwrap());
    for r in &rows {
        let f: f64 = r[0].parse().unwrap();
        let reduction: f64 = r[2].parse().unwrap();
        assert!((reduction - (1.0 - 3.0 * f)).abs() < 1e-12);
    }

    let o = qdistill(
        d,
        &[
            "sweep",
            "werner",
            "--d",
            "3",
            "--from",
            "-1",
            "--to",
            "-0.3333333333333333",
            "--steps",
            "9",
            "--restarts",
            "16",
        ],
    );
    let rows = parse_csv(std::str::from_utf8(&o.stdout).unwrap());
    let values: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    // α increases down the table, so -α decreases and the value must not decrease
    assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-8), "{values:?}");
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    qdistill(d, &["gen", "random", "--d", "3", "--rank", "2", "--seed", "4", "-o", "s.qstate.json"]);
    let (_, a) = report(d, &["distill", "s.qstate.json", "--restarts", "16", "--seed", "7"]);
    let (_, b) = report(d, &["distill", "s.qstate.json", "--restarts", "16", "--seed", "7"]);
    compare_reports(&a, &b, 0.0).unwrap();
}

use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str], config: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stablewalk"));
    cmd.args(args).arg("--out").arg(dir);
    if let Some(c) = config {
        let p = dir.join("config.json");
        std::fs::write(&p, c).unwrap();
        cmd.arg("--config").arg(p);
    }
    cmd.output().unwrap()
}

const LAPLACE: &str = r#"{"version":1,
 "law":{"kind":"lazy_nearest_neighbor","dim":1,"hold":0.5},
 "source":{"kind":"range_dp","nu":1.0},
 "schedule":{"geometric":{"start":100,"factor":2,"count":4}},
 "fit":{"predicted":0.3333333333333333,"window":[100,800]}}"#;

#[test]
fn laplace_writes_hashed_csv_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["laplace"], Some(LAPLACE));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("laplace.csv")).unwrap();
    assert!(csv.starts_with("# config_sha256="));
    assert_eq!(csv.lines().count(), 2 + 4);
    let fit: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    let slope = fit["fit"]["slope"].as_f64().unwrap();
    assert!(slope > 0.2 && slope < 0.5, "{slope}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = r#"{"version":1,"law":{"kind":"radial","dim":1,"alpha":1.0},
        "source":{"kind":"laplace","profile":{"kind":"power","nu":0.5,"gamma":0.5}},
        "schedule":{"list":[10,20,40]},"replicas":500,"seed":3}"#;
    assert!(run(a.path(), &["laplace", "--workers", "1"], Some(cfg)).status.success());
    assert!(run(b.path(), &["laplace", "--workers", "3"], Some(cfg)).status.success());
    let x = std::fs::read(a.path().join("laplace.csv")).unwrap();
    let y = std::fs::read(b.path().join("laplace.csv")).unwrap();
    assert_eq!(x, y);
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = LAPLACE.replace("\"version\":1", "\"version\":9");
    assert_eq!(run(dir.path(), &["laplace"], Some(&bad)).status.code(), Some(2));
    let unknown = LAPLACE.replace("\"replicas\"", "\"replicaz\"").replace("\"fit\"", "\"bogus\"");
    assert_eq!(run(dir.path(), &["laplace"], Some(&unknown)).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["wreath-return"], Some(LAPLACE)).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["eigen"], None).status.code(), Some(2));
}

#[test]
fn skip_only_runs_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"version":1,"law":{"kind":"lazy_nearest_neighbor","dim":1,"hold":0.5},
        "source":{"kind":"enumerate_paths","profile":{"kind":"indicator","nu":1.0}},
        "schedule":{"list":[40,80]}}"#;
    let out = run(dir.path(), &["laplace"], Some(cfg));
    assert_eq!(out.status.code(), Some(3));
    let csv = std::fs::read_to_string(dir.path().join("laplace.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| l.starts_with("40,") || l.starts_with("80,")).count(), 2);
}

#[test]
fn other_subcommands_produce_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let sim = r#"{"version":1,"law":{"kind":"axis_product","alphas":[1.0,1.5]},"n":100,"paths":5,"seed":1}"#;
    assert!(run(d, &["simulate"], Some(sim)).status.success());
    let s = std::fs::read_to_string(d.join("simulate.csv")).unwrap();
    assert_eq!(s.lines().count(), 2 + 5);

    let constants = r#"{"version":1,"requests":[
        {"formula":"dv_theta","theta":1.0,"tr_e":0.5,"lambda1":4.934802200544679},
        {"formula":"nonamenable","rho":0.5},
        {"formula":"iterated","alphas":[2.0,2.0],"dims":[1,1]}]}"#;
    assert!(run(d, &["constants"], Some(constants)).status.success());
    let c: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("constants.json")).unwrap()).unwrap();
    let k = c["constants"][0]["value"].as_f64().unwrap();
    assert!((k - 3.2175).abs() < 1e-3, "{k}");

    let eigen = r#"{"version":1,"limit":{"symmetric_stable":{"alpha":2.0,"scale":1.0}},
        "domain":{"shape":"interval","lo":0.0,"hi":1.0},"basis_sizes":[8,16]}"#;
    assert!(run(d, &["eigen"], Some(eigen)).status.success());

    let scaling = r#"{"version":1,"profile":{"kind":"indicator","nu":1.0},
        "exponent":{"kind":"diagonal","alphas":[2.0]},"schedule":{"list":[1000,10000]}}"#;
    assert!(run(d, &["scaling"], Some(scaling)).status.success());
    let sj: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("scaling.json")).unwrap()).unwrap();
    assert!((sj["kappa"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);

    let llt = r#"{"version":1,"law":{"kind":"lazy_nearest_neighbor","dim":1,"hold":0.5},"schedule":{"list":[32,64]}}"#;
    assert!(run(d, &["llt-check"], Some(llt)).status.success());

    assert!(run(d, &["laplace"], Some(LAPLACE)).status.success());
    let fit = format!(
        r#"{{"version":1,"input":{:?},"predicted":0.3333333333333333}}"#,
        d.join("laplace.csv").to_str().unwrap()
    );
    assert!(run(d, &["fit"], Some(&fit)).status.success());
}

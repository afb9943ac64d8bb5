use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use symrank::tensors::Scalar;

fn symrank(store: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symrank"))
        .arg("--store")
        .arg(store)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn stored_path(v: &Value, key: &str) -> PathBuf {
    PathBuf::from(v[key]["path"].as_str().expect("stored path"))
}

#[test]
fn wpower_decompose_has_13_terms() {
    let dir = tempfile::tempdir().unwrap();
    let out = symrank(dir.path(), &["wpower", "--N", "5", "--n", "2", "--decompose"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["certificate"]["terms"], 13);
    assert_eq!(v["verify"]["ok"], true);
}

#[test]
fn tampered_weight_exits_one_with_residual() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&symrank(dir.path(), &["w3cubed"]));
    let path = stored_path(&v, "certificate");
    let mut env: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(env["scalar_field"], "rational");
    let weight = &mut env["payload"]["terms"][0]["weight"];
    let w: Scalar = serde_json::from_value(weight.clone()).unwrap();
    *weight = serde_json::to_value(&w * &Scalar::ratio(1001, 1000)).unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_vec(&env).unwrap()).unwrap();
    let out = symrank(dir.path(), &["verify", "--cert", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["ok"], false);
    assert!(report["residual"].as_f64().unwrap() > 0.0);
}

#[test]
fn bounds_table_n2_column() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bounds.csv");
    let out = symrank(
        dir.path(),
        &["bounds-table", "--N-range", "3:12", "--n-range", "1:3", "--out", csv.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,n,lower,constructive_upper,generic_upper,nth_root"));
    let mut rows = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (big_n, n): (u64, u64) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        if n == 2 {
            let want = (3 * big_n - 2).to_string();
            assert_eq!(f[2], want);
            assert_eq!(f[3], want);
            if big_n >= 4 {
                assert_eq!(f[4], want);
            }
            rows += 1;
        }
    }
    assert_eq!(rows, 10);
}

#[test]
fn store_is_idempotent_and_envelopes_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = json(&symrank(dir.path(), &["monomial", "--exps", "2,1,1"]));
    let b = json(&symrank(dir.path(), &["monomial", "--exps", "2,1,1"]));
    assert_eq!(a["certificate"]["path"], b["certificate"]["path"]);
    let path = stored_path(&a, "certificate");
    let env: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(env["format_version"], 1);
    assert_eq!(env["target"], serde_json::json!({"gen": "monomial", "exps": [2, 1, 1]}));
    assert_eq!(env["provenance"]["command"], "monomial --exps 2,1,1");
    let out = symrank(dir.path(), &["verify", "--cert", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(symrank(dir.path(), &["wpower", "--N", "5"]).status.code(), Some(2));
    assert_eq!(symrank(dir.path(), &["smlocc-demo", "--N", "4"]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(symrank(dir.path(), &["verify", "--cert", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn failed_search_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = symrank(
        dir.path(),
        &["rank-search", "--target", "w_power:N=3,n=1", "--r", "2", "--restarts", "2", "--seed", "7"],
    );
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["certificate"], Value::Null);
    assert_eq!(v["search"]["seed"], 7);
}

#[test]
fn ghz_convert_and_hyperdet() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&symrank(dir.path(), &["dicke", "--m", "2", "--n", "1"]));
    let cert = stored_path(&v, "certificate");
    let out = symrank(dir.path(), &["ghz-convert", "--cert", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verify"]["ok"], true);

    let state = dir.path().join("ghz.json");
    std::fs::write(
        &state,
        r#"{"local_dims":[2,2,2],"amplitudes":[{"idx":[0,0,0],"q":"1"},{"idx":[1,1,1],"q":"1"}]}"#,
    )
    .unwrap();
    let out = symrank(dir.path(), &["hyperdet", "--state", state.to_str().unwrap()]);
    let v = json(&out);
    assert_eq!((v["class"].as_str(), v["rank"].as_u64()), (Some("ghz"), Some(2)));
}

#[test]
fn eliminate_from_permutation_entries() {
    let dir = tempfile::tempdir().unwrap();
    let coeffs = dir.path().join("c.json");
    std::fs::write(&coeffs, r#"[{"perm":[1,0],"k":1,"q":"2/3"},{"slots":[],"q":"-4"}]"#).unwrap();
    let out = symrank(dir.path(), &["eliminate", "--N", "4", "--n", "2", "--coeffs", coeffs.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verify"]["exact"], true);
    assert_eq!(v["steps"].as_array().unwrap().len(), 2);
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use catprob::gen::Gen;
use catprob::io::{to_json, FamilyDoc, MapDoc};
use catprob::{ConsistentMeasureFamily, MeasurePreservingMap, Rational};
use serde_json::Value;
use tempfile::TempDir;

fn catprob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catprob"))
        .args(args)
        .env_remove("CATPROB_BACKEND")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn martingale_csv_matches_closed_form_error() {
    let out = catprob(&["martingale", "--ground", "identity", "--depth", "8", "--format", "csv"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap(), vec!["depth", "l1_error", "second_moment", "gap"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 9);
    for (n, row) in rows.iter().enumerate() {
        assert_eq!(row[0], n.to_string());
        assert_eq!(row[1], format!("1/{}", 1u64 << (n + 2)));
        // E[X_n²] = 1/3 − 4^{-n}/12
        let den = 12u64 << (2 * n);
        let num = 4 * (1u64 << (2 * n)) - 1;
        let want = catprob::Rational::new(num.into(), den.into());
        assert_eq!(row[2], format!("{want}"));
    }
}

#[test]
fn martingale_float_backend_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_catprob"))
        .args(["martingale", "--depth", "3"])
        .env("CATPROB_BACKEND", "float")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["backend"], "f64");
    assert_eq!(v["rows"][3]["l1_error"], "0.03125");
    assert_eq!(v["limit_second_moment"].as_str().unwrap().parse::<f64>().unwrap(), 1.0 / 3.0);
}

#[test]
fn martingale_constant_ground_has_no_error() {
    let out = catprob(&["martingale", "--ground", "constant:3/2", "--depth", "4", "--format", "csv"]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[1], "0");
        assert_eq!(cols[2], "9/4");
    }
}

#[test]
fn check_appendix_passes_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = catprob(&["check-appendix", "--seed", "42", "--trials", "500", "--out", arg(p)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["seed"], 42);
    assert!(v["properties"].as_array().unwrap().iter().all(|p| p["failures"] == 0));
}

#[test]
fn other_suites_pass() {
    for cmd in ["check-naturality", "check-lipschitz", "check-metric", "check-reconstruction"] {
        let out = catprob(&[cmd, "--seed", "7", "--trials", "60", "--format", "csv"]);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).starts_with("id,trials,failures\n"));
    }
    let out = catprob(&["--backend", "float", "check-lipschitz", "--seed", "7", "--trials", "60"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["backend"], "f64");
}

#[test]
fn rn_roundtrip_residual_is_zero() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.json", r#"{"atoms": ["a", "b", "c"], "weights": ["1/4", "1/4", "1/2"]}"#);
    let m = write(&dir, "m.json", r#"{"mass": ["1/8", "1/2", "3/8"]}"#);
    let out = catprob(&["rn", "--space", arg(&s), "--measure", arg(&m)]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["residual"], "0");
    assert_eq!(v["derivative"], serde_json::json!(["1/2", "2", "3/4"]));

    let out = catprob(&["rn", "--space", arg(&s), "--measure", arg(&m), "--bound", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds"));
}

#[test]
fn bad_input_reports_file_and_location() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.json", r#"{"atoms": ["a"], "weights": ["1"]}"#);
    let m = write(&dir, "broken.json", "{\"mass\": [\n  \"1\",\n");
    let out = catprob(&["rn", "--space", arg(&s), "--measure", arg(&m)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("broken.json") && err.contains("line 3"), "{err}");

    let w = write(&dir, "w.json", r#"{"atoms": ["a", "b"], "weights": ["1/2", "1/3"]}"#);
    let out = catprob(&["rn", "--space", arg(&w), "--measure", arg(&m)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn condexp_residuals_vanish() {
    let dir = TempDir::new().unwrap();
    let map = write(
        &dir,
        "f.json",
        r#"{
            "src": {"atoms": ["0", "1", "2", "3"], "weights": ["1/4", "1/4", "1/4", "1/4"]},
            "dst": {"atoms": ["lo", "hi"], "weights": ["1/2", "1/2"]},
            "assign": {"0": "lo", "1": "lo", "2": "hi", "3": "hi"}
        }"#,
    );
    let rv = write(&dir, "x.json", r#"{"values": [0, 1, 2, 3]}"#);
    let out = catprob(&["condexp", "--map", arg(&map), "--rv", arg(&rv)]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["cond_exp"], serde_json::json!(["1/2", "5/2"]));
    let subsets = v["subsets"].as_array().unwrap();
    assert_eq!(subsets.len(), 4);
    assert!(subsets.iter().all(|s| s["residual"] == "0"));
}

#[test]
fn mapdist_of_swapped_halves() {
    let dir = TempDir::new().unwrap();
    let src = r#"{"atoms": ["0", "1", "2", "3"], "weights": ["1/4", "1/4", "1/4", "1/4"]}"#;
    let dst = r#"{"atoms": ["x", "y"], "weights": ["1/2", "1/2"]}"#;
    let f = write(
        &dir,
        "f.json",
        &format!(r#"{{"src": {src}, "dst": {dst}, "assign": {{"0": "x", "1": "x", "2": "y", "3": "y"}}}}"#),
    );
    let g = write(
        &dir,
        "g.json",
        &format!(r#"{{"src": {src}, "dst": {dst}, "assign": {{"0": "x", "1": "y", "2": "x", "3": "y"}}}}"#),
    );
    let out = catprob(&["mapdist", "--f", arg(&f), "--g", arg(&g), "--bound", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    // Preimages of {x} are {0,1} and {0,2}: symmetric difference has mass 1/2.
    assert_eq!(v["distance"], "1/2");
    assert_eq!(v["disagreement"], "1/2");
    assert_eq!(v["equal_as_maps"], false);
    assert_eq!(v["scaled"], "1");
}

#[test]
fn extend_recovers_the_restricted_measure() {
    let mut g = Gen::new(3);
    let d = g.refining_chain::<Rational>(3, 2);
    let r = Rational::new(2.into(), 1.into());
    let mu = g.bounded_measure(d.top().unwrap().space(), &r);
    let fam = ConsistentMeasureFamily::restrictions(&mu, &d, r).unwrap();
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "fam.json", &to_json(&FamilyDoc::encode(&fam)));
    let out = catprob(&["extend", "--family", arg(&file)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["square_residual"], "0");
    let mass: Vec<String> = v["extension"]["mass"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m.as_str().unwrap().to_string())
        .collect();
    let want: Vec<String> = mu.mass().iter().map(ToString::to_string).collect();
    assert_eq!(mass, want);

    let out = catprob(&["extend", "--family", arg(&file), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn metcat_batch_scans_constructions() {
    let dir = TempDir::new().unwrap();
    let file = write(
        &dir,
        "batch.json",
        r#"{
            "spaces": {
                "Y": {"points": ["a", "b", "c"], "dist": [[0, 2, 3], [2, 0, 1], [3, 1, 0]]},
                "U": {"points": ["u"], "dist": [[0]]}
            },
            "maps": {
                "f": {"src": "U", "dst": "Y", "assign": {"u": "a"}},
                "g": {"src": "U", "dst": "Y", "assign": {"u": "b"}}
            },
            "constructions": [
                {"op": "coequalizer", "args": ["f", "g"]},
                {"op": "product", "args": ["Y", "Y"]},
                {"op": "coproduct", "args": ["Y", "U"]},
                {"op": "tensor", "args": ["Y", "U"]},
                {"op": "equalizer", "args": ["f", "g"]},
                {"op": "hom", "args": ["U", "Y", "f", "g"]},
                {"op": "scale", "args": ["Y"], "factor": "1/2"},
                {"op": "reflect", "args": ["Y"]}
            ]
        }"#,
    );
    let out = catprob(&["metcat", arg(&file)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let c = v["constructions"].as_array().unwrap();
    assert_eq!(c.len(), 8);
    assert_eq!(c[0]["space"]["dist"][0][1], "1");
    assert_eq!(c[2]["space"]["dist"][0][3], "inf");
    assert_eq!(c[4]["space"]["points"].as_array().unwrap().len(), 0);

    let broken = write(
        &dir,
        "broken.json",
        r#"{
            "spaces": {"Y": {"points": ["a", "b", "c"], "dist": [[0, 2, 5], [2, 0, 1], [5, 1, 0]]}},
            "constructions": [{"op": "reflect", "args": ["Y"]}]
        }"#,
    );
    let out = catprob(&["metcat", arg(&broken)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds"));
}

#[test]
fn encoded_maps_are_accepted() {
    let mut g = Gen::new(5);
    let omega = g.space::<Rational>(2, 6);
    let f: MeasurePreservingMap<Rational> = g.quotient(&omega, 3);
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "f.json", &to_json(&MapDoc::encode(&f)));
    let out = catprob(&["mapdist", "--f", arg(&file), "--g", arg(&file)]);
    assert!(out.status.success());
    assert_eq!(json(&out)["distance"], "0");
}

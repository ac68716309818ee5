use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn tauforge(args: &[&str]) -> Run {
    let out: Output = Command::new(env!("CARGO_BIN_EXE_tauforge"))
        .args(args)
        .env_remove("TAUFORGE_THREADS")
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn file(dir: &TempDir, name: &str, v: &Value) -> String {
    let p: PathBuf = dir.path().join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_owned()
}

fn column(rows: usize, hot: &[usize]) -> Value {
    let entries: Vec<Vec<String>> = (1..=rows)
        .map(|r| {
            hot.iter()
                .map(|&h| if h == r { "1" } else { "0" }.to_string())
                .collect()
        })
        .collect();
    json!({ "rows": rows, "cols": hot.len(), "entries": entries })
}

fn poly(vars: usize, terms: &[(&[u16], &str)]) -> Value {
    let terms: Vec<Value> = terms
        .iter()
        .map(|(e, c)| {
            let c = if c.contains('/') {
                c.to_string()
            } else {
                format!("{c}/1")
            };
            json!({ "exp": e, "coef": c })
        })
        .collect();
    json!({ "vars": vars, "terms": terms })
}

fn s2() -> Value {
    poly(2, &[(&[2, 0], "1/2"), (&[0, 1], "1")])
}

/// span{s^-2} ⊕ H_{-1}
fn point() -> Value {
    json!({ "tail": -1, "basis": [{ "minExp": -2, "coefs": ["1"] }] })
}

#[test]
fn e3_gives_s2_with_one_violation() {
    let d = TempDir::new().unwrap();
    let m = file(&d, "a.json", &column(3, &[3]));
    let r = tauforge(&["tau-from-matrix", "--matrix", &m, "--k", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["tau"]["poly"], s2());
    assert_eq!(v["report"]["violations"], json!([1]));
    assert_eq!(v["point"]["tail"], -1);
    assert_eq!(
        v["point"]["basis"][0],
        json!({ "minExp": -2, "coefs": ["1/1"] })
    );
}

#[test]
fn e1_gives_one() {
    let d = TempDir::new().unwrap();
    let m = file(&d, "a.json", &column(3, &[1]));
    let r = tauforge(&["tau-from-matrix", "--matrix", &m, "--k", "1"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["tau"]["poly"], poly(1, &[(&[0], "1")]));
    assert_eq!(r.json()["report"]["violations"], json!([]));
}

#[test]
fn repeated_column_is_rank_deficient() {
    let d = TempDir::new().unwrap();
    let m = file(&d, "a.json", &column(3, &[3, 3]));
    let r = tauforge(&["tau-from-matrix", "--matrix", &m, "--k", "1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("rank 1"), "{}", r.stderr);
}

#[test]
fn verify_exit_codes() {
    let d = TempDir::new().unwrap();
    let one = file(&d, "one.json", &poly(1, &[(&[0], "1")]));
    assert_eq!(tauforge(&["verify", "--tau", &one, "--k", "1"]).code, 0);

    let sq = file(&d, "sq.json", &poly(1, &[(&[2], "1")]));
    let r = tauforge(&["verify", "--tau", &sq, "--k", "1"]);
    assert_eq!(r.code, 1);
    let kp = &r.json()["checks"][0];
    assert_eq!(kp["id"], "KP");
    assert_eq!(kp["pass"], false);
    assert!(!kp["witness"]["terms"].as_array().unwrap().is_empty());

    let bad = d.path().join("bad.json");
    std::fs::write(&bad, "{").unwrap();
    assert_eq!(
        tauforge(&["verify", "--tau", bad.to_str().unwrap(), "--k", "1"]).code,
        2
    );
}

#[test]
fn grass_queries_on_the_s2_point() {
    let d = TempDir::new().unwrap();
    let w = file(&d, "w.json", &point());
    let n = tauforge(&["grass", "min-n", "--point", &w, "--k", "1"]);
    assert_eq!(n.json()["n"], 1);

    let c = tauforge(&["grass", "companions", "--point", &w, "--k", "1"]);
    assert_eq!(c.code, 0);
    assert_eq!(c.json()["tau"]["poly"], s2());
    assert_eq!(c.json()["rho"][0]["charge"], 1);
    assert_eq!(c.json()["sigma"][0]["charge"], -2);

    let t = tauforge(&["grass", "dtk", "--point", &w, "--k", "1"]);
    assert_eq!(
        t.json(),
        json!([{ "charge": 0, "poly": poly(1, &[(&[1], "1")]) }])
    );

    // The companions file feeds straight back into verify.
    let cf = file(&d, "c.json", &c.json());
    let r = tauforge(&["verify", "--companions", &cf, "--k", "1"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.json()["checks"].as_array().unwrap().len(), 4);
}

#[test]
fn lax_on_s2() {
    let d = TempDir::new().unwrap();
    let tau = file(&d, "tau.json", &s2());
    let ok = tauforge(&[
        "lax", "--tau", &tau, "--k", "1", "--order", "5", "--times", "1",
    ]);
    assert_eq!(ok.code, 0, "{}{}", ok.stdout, ok.stderr);
    assert_eq!(ok.json()["constraint"]["pairs"], 1);

    let none = tauforge(&[
        "lax", "--tau", &tau, "--k", "1", "--order", "3", "--times", "1", "--n", "0",
    ]);
    assert_eq!(none.code, 1);
    let first = &none.json()["constraint"]["orders"][0];
    assert_eq!(first["order"], -1);
    assert_eq!(first["pass"], false);
}

#[test]
fn lax_on_one() {
    let d = TempDir::new().unwrap();
    let tau = file(&d, "tau.json", &poly(1, &[(&[0], "1")]));
    assert_eq!(tauforge(&["lax", "--tau", &tau, "--k", "1"]).code, 0);
}

#[test]
fn dress_s2() {
    let d = TempDir::new().unwrap();
    let tau = file(&d, "tau.json", &s2());
    let r = tauforge(&["dress", "--tau", &tau, "--order", "2"]);
    assert_eq!(r.code, 0);
    let v = r.json();
    assert_eq!(v["L"]["maxOrder"], 1);
    assert_eq!(v["L"]["truncation"], -2);
    // P = 1 - 2t_1/(t_1² + 2t_2) ∂^{-1}
    assert_eq!(v["P"]["coefs"]["-1"]["num"], poly(2, &[(&[1, 0], "-2")]));
}

#[test]
fn fock_apply_raises_a_hook() {
    let d = TempDir::new().unwrap();
    let mut e = vec![vec!["0"; 4]; 4];
    for (i, row) in e.iter_mut().enumerate() {
        row[i] = "1";
    }
    // A v_{-3/2} = v_{-3/2} + 2 v_{3/2}
    e[3][0] = "2";
    let m = file(&d, "m.json", &json!({ "window": 2, "entries": e }));
    let r = tauforge(&["fock-apply", "--matrix", &m, "--charge", "0"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(
        v["vector"][1],
        json!({ "state": { "charge": 0, "partition": [2, 1] }, "coef": "-2/1" })
    );
    assert_eq!(
        v["sigma"][0]["poly"],
        poly(
            3,
            &[(&[3, 0, 0], "-2/3"), (&[0, 0, 1], "2"), (&[0, 0, 0], "1")]
        )
    );
}

#[test]
fn config_and_flags() {
    let d = TempDir::new().unwrap();
    let one = file(&d, "one.json", &poly(1, &[(&[0], "1")]));
    let cfg = file(&d, "cfg.json", &json!({ "D": 1 }));
    let w = file(&d, "w.json", &point());
    let c = file(
        &d,
        "c.json",
        &tauforge(&["grass", "companions", "--point", &w, "--k", "1"]).json(),
    );
    let r = tauforge(&["--config", &cfg, "verify", "--companions", &c, "--k", "1"]);
    assert_eq!(r.code, 0);
    assert!(r.stderr.contains("raising D"));

    let bad = file(&d, "bad.json", &json!({ "trials": 0 }));
    assert_eq!(
        tauforge(&["--config", &bad, "verify", "--tau", &one, "--k", "1"]).code,
        2
    );
    let unknown = file(&d, "unk.json", &json!({ "depth": 3 }));
    assert_eq!(
        tauforge(&["--config", &unknown, "verify", "--tau", &one, "--k", "1"]).code,
        2
    );

    let pretty = tauforge(&["verify", "--tau", &one, "--k", "1", "--pretty"]);
    assert!(pretty.stdout.contains("\n  "));
    assert_eq!(
        pretty.json(),
        tauforge(&["verify", "--tau", &one, "--k", "1"]).json()
    );
}

#[test]
fn same_seed_same_bytes() {
    let d = TempDir::new().unwrap();
    let tau = file(&d, "tau.json", &s2());
    let args = [
        "lax", "--tau", &tau, "--k", "1", "--n", "0", "--order", "2", "--times", "1", "--seed", "9",
    ];
    let a = tauforge(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_tauforge"))
        .args(args)
        .env("TAUFORGE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout.as_bytes(), b.stdout.as_slice());
    assert_eq!(a.code, 1);
}

#[test]
fn bad_thread_cap_is_an_input_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_tauforge"))
        .args(["grass", "min-n", "--point", "missing.json", "--k", "1"])
        .env("TAUFORGE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

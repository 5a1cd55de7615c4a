//! End-to-end runs of the `subfact` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn subfact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subfact"))
        .args(args)
        .env_remove("SUBFACT_CACHE_DIR")
        .env_remove("SUBFACT_ACCEPTANCE_EXTENDED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = subfact(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

/// CSV rows as strings and JSON rows rendered back to text must coincide.
fn assert_csv_json_agree(args: &[&str]) -> usize {
    let csv_out = ok(&[args, &["--format", "csv"]].concat());
    let json_out = ok(&[args, &["--format", "json"]].concat());
    let json: Vec<serde_json::Map<String, Value>> = serde_json::from_str(&json_out).unwrap();
    let mut rdr = csv::Reader::from_reader(csv_out.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    let records: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), json.len(), "{args:?}");
    for (rec, obj) in records.iter().zip(&json) {
        assert_eq!(obj.keys().cloned().collect::<Vec<_>>(), header);
        for (h, field) in header.iter().zip(rec.iter()) {
            let text = match &obj[h] {
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                v => v.to_string(),
            };
            assert_eq!(text, field, "{args:?} column {h}");
        }
    }
    records.len()
}

#[test]
fn seq_derangements() {
    assert_eq!(ok(&["seq", "--family", "derangement", "--upto", "10"]).trim(), "1,0,1,2,9,44,265,1854,14833,133496,1334961");
    assert_eq!(ok(&["seq", "--family", "derangement", "--upto", "6", "--modulus", "7"]).trim(), "1,0,1,2,2,2,6");
    let big = ok(&["seq", "--family", "derangement", "--upto", "40"]);
    assert!(big.trim().ends_with("300158458444475693321518926221316715906770469041"));
}

#[test]
fn classify_small_range() {
    let out = ok(&["classify", "--range", "2..30", "--format", "csv"]);
    let a: Vec<&str> = out.lines().skip(1).filter(|l| l.split(',').nth(1) == Some("A")).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(a, ["2", "5", "7", "17", "19", "23", "29"]);
    assert!(out.starts_with("prime,ab_class,zero_residues,degenerate,valuation_capped,kurepa_valuation\n"));
    // half-open and inclusive spellings agree
    assert_eq!(out, ok(&["classify", "--range", "2..=29", "--format", "csv"]));
}

#[test]
fn dioph_even_factorial() {
    let out = ok(&["dioph", "factorial", "--family", "even", "--format", "csv"]);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows, ["D_EVEN,1,0,0", "D_EVEN,1,0,1", "D_EVEN,1,3,2", "D_EVEN,1,5,4"]);
    let out = ok(&["dioph", "prime-power", "--p", "3", "--format", "csv"]);
    assert_eq!(out.lines().nth(1), Some("D,3,4,2"));
}

#[test]
fn csv_and_json_are_field_identical() {
    let queries: Vec<Vec<&str>> = vec![
        vec!["seq", "--family", "e-odd", "--upto", "30"],
        vec!["period", "--family", "rclass", "--f", "X^2+1", "--h1", "1", "--h2", "-1", "--modulus", "9"],
        vec!["lift", "--kind", "e-even", "--p", "3"],
        vec!["classify", "--range", "2..200"],
        vec!["classify", "--prime", "429943"],
        vec!["kurepa", "--bound", "100"],
        vec!["dioph", "factorial", "--q", "1/2"],
        vec!["dioph", "two-solution", "--n0", "3", "--n1", "5"],
        vec!["shiftdiv", "--b", "0", "--h1", "1", "--h2", "2", "--range", "1..=20"],
        vec!["shiftdiv", "--b", "0", "--h1", "1", "--h2", "-1", "--lcm", "2,3,6"],
        vec!["roots", "--fd", "6"],
        vec!["roots", "--poly", "[1,-4,4,-1]"],
    ];
    for q in queries {
        assert!(assert_csv_json_agree(&q) > 0, "{q:?}");
    }
}

#[test]
fn periods_and_roots() {
    let out = ok(&["period", "--family", "schenker", "--h", "X+1", "--modulus", "25", "--format", "csv"]);
    let row: Vec<String> = out.lines().nth(1).unwrap().split(',').map(String::from).collect();
    assert_eq!((row[2].as_str(), row[4].as_str()), ("10", "100"));
    let out = ok(&["roots", "--fd", "7", "--format", "json"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["real_roots"], 6);
    assert_eq!(v[0]["rational_roots"], "1");
    assert_eq!(v[0]["derivative_at_one"], 33);
}

#[test]
fn resume_reuses_cached_ranges() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let run = |range: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_subfact"))
            .args(["classify", "--range", range, "--resume", "--chunk", "500", "--format", "csv"])
            .env("SUBFACT_CACHE_DIR", cache)
            .output()
            .unwrap();
        assert!(o.status.success());
        (stdout(&o), String::from_utf8(o.stderr).unwrap())
    };
    let (first, err1) = run("2..=2000");
    assert!(err1.contains("0 reused"), "{err1}");
    let (second, err2) = run("2..=2000");
    assert!(err2.contains(" 0 primes computed"), "{err2}");
    assert_eq!(first, second);
    let (_, err3) = run("2..=2500");
    assert!(err3.contains("reused") && !err3.contains(" 0 primes computed"), "{err3}");
    assert_eq!(first, ok(&["classify", "--range", "2..=2000", "--format", "csv"]));
}

#[test]
fn exit_codes() {
    assert_eq!(subfact(&["seq", "--family", "derangement", "--upto", "3", "--bogus"]).status.code(), Some(2));
    assert_eq!(subfact(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(subfact(&["seq", "--family", "rclass", "--upto", "3"]).status.code(), Some(2));
    assert_eq!(subfact(&["seq", "--family", "derangement", "--f", "X^", "--upto", "3"]).status.code(), Some(2));
    assert_eq!(subfact(&["period", "--family", "derangement", "--modulus", "1"]).status.code(), Some(3));
    assert_eq!(subfact(&["classify", "--prime", "91"]).status.code(), Some(3));
    assert_eq!(subfact(&["dioph", "factorial", "--q", "-1"]).status.code(), Some(3));
    assert_eq!(subfact(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_reports_ten_criteria() {
    let out = ok(&["verify", "--format", "csv"]);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.contains(",PASS,") || r.contains(",FAIL (known),")), "{out}");
}

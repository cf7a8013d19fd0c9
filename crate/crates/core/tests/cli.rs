use std::path::PathBuf;

use clap::Parser;
use porverif::cli::{run, Cli, CSV_HEADER};

fn protocol(name: &str) -> String {
    format!("{}/protocols/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("porverif-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn exec(args: &[&str]) -> (i32, String, String) {
    let cli = Cli::try_parse_from(std::iter::once("porverif").chain(args.iter().copied())).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(cli, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn without_timing(s: &str) -> String {
    s.lines()
        .map(|l| match l.find("wall_ms=") {
            Some(i) => &l[..i],
            None => l,
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn exit_codes() {
    let auth = protocol("private_auth.spv");
    let toy = protocol("toy3.spv");
    assert_eq!(exec(&["check", &toy]).0, 0);
    assert_eq!(exec(&["check", &auth]).0, 1);
    assert_eq!(exec(&["check", "/nonexistent.spv"]).0, 2);
    assert_eq!(exec(&["check", &toy, "--depth", "0"]).0, 2);
    let bad = scratch("bad.spv");
    std::fs::write(&bad, "let A = in(c, x\n").unwrap();
    let (code, _, err) = exec(&["check", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn reports_are_reproducible() {
    let auth = protocol("private_auth.spv");
    let (_, first, _) = exec(&["check", &auth, "--all-modes"]);
    let (_, second, _) = exec(&["check", &auth, "--all-modes"]);
    assert_eq!(without_timing(&first), without_timing(&second));
    assert!(first.contains("in(cB,aenc(pair(w1,w1),w2)).out(cB,w3)"));
}

#[test]
fn bench_csv_appends_under_one_header() {
    let path = scratch("bench.csv");
    let _ = std::fs::remove_file(&path);
    let p = path.to_str().unwrap();
    for _ in 0..2 {
        assert_eq!(exec(&["bench", "toy", "--n-max", "2", "--out", p]).0, 0);
    }
    let text = std::fs::read_to_string(&path).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rows.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER.to_vec());
    let records: Vec<csv::StringRecord> = rows.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), 12);
    for r in &records {
        for field in r.iter().skip(3) {
            assert!(field.chars().all(|c| c.is_ascii_digit()), "{field}");
        }
    }
    assert_eq!(text.matches("max_traces").count(), 1);
}

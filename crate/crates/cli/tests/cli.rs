//! End-to-end runs of the `ipta` command line.

use std::collections::HashMap;
use std::path::PathBuf;

use ipta::explore::read_export;
use ipta_cli::{parse_range, run, RequestRange, EXIT_ERROR, EXIT_OK, EXIT_VIOLATED};

fn model(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name)
        .display()
        .to_string()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn ipta(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("ipta").chain(args.iter().copied()), &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// Splits a `key=value` line, honouring JSON-quoted values.
fn record(line: &str) -> HashMap<String, String> {
    let mut fields = HashMap::new();
    let mut rest = line.trim();
    while !rest.is_empty() {
        let (key, tail) = rest.split_once('=').unwrap();
        let (value, tail) = if tail.starts_with('"') {
            let mut de = serde_json::Deserializer::from_str(tail).into_iter::<String>();
            let v = de.next().unwrap().unwrap();
            (v, &tail[de.byte_offset()..])
        } else {
            let end = tail.find(' ').unwrap_or(tail.len());
            (tail[..end].to_string(), &tail[end..])
        };
        fields.insert(key.to_string(), value);
        rest = tail.trim_start();
    }
    fields
}

fn records(stdout: &str) -> Vec<HashMap<String, String>> {
    stdout.lines().map(record).collect()
}

fn num(r: &HashMap<String, String>, key: &str) -> f64 {
    r[key].parse().unwrap()
}

/// Running example bindings with a short timeout; every value used here is
/// the same for any timeout above the largest other clock constant.
const SMALL: [&str; 8] = [
    "--const", "L=0.7", "--const", "U=0.8", "--const", "REQUESTS=2", "--const", "TIMEOUT=30",
];

fn with_small<'a>(args: &[&'a str]) -> Vec<&'a str> {
    args.iter().copied().chain(SMALL).collect()
}

const ONE_SLOW: &str = "Pmin=? [F (t=2 & w=1)]";

#[test]
fn check_reports_interval_sample_and_encoded_values() {
    let cs = model("client_server.ipta");
    let ipta_run = ipta(&with_small(&["check", &cs, ONE_SLOW]));
    assert_eq!(ipta_run.code, EXIT_OK, "{}", ipta_run.stderr);
    let r = &records(&ipta_run.stdout)[0];
    assert!((num(r, "value") - 0.30).abs() < 1e-9);
    assert_eq!(r["engine"], "ipta");
    assert_eq!(r["direction"], "min");
    assert_eq!(r["converged"], "true");
    for key in ["states", "transitions", "iterations", "build_seconds", "solve_seconds"] {
        assert!(r.contains_key(key), "missing {key}");
    }

    let s = ipta(&with_small(&["check", &cs, ONE_SLOW, "--engine", "sample", "--value", "0.75"]));
    assert!((num(&records(&s.stdout)[0], "value") - 0.375).abs() < 1e-9);

    let p = ipta(&with_small(&["check", &cs, ONE_SLOW, "--engine", "ptastar"]));
    let p = &records(&p.stdout)[0];
    assert!((num(p, "value") - num(r, "value")).abs() < 1e-9);
    assert!(num(p, "transitions") > num(r, "transitions"));
}

#[test]
fn properties_file_runs_every_query() {
    let run = ipta(&with_small(&["check", &model("client_server.ipta"), &model("client_server.props")]));
    assert_eq!(run.code, EXIT_OK);
    let values: Vec<f64> = records(&run.stdout).iter().map(|r| num(r, "value")).collect();
    assert_eq!(values.len(), 4);
    assert!((values[0] - 0.30).abs() < 1e-6 && (values[1] - 0.45).abs() < 1e-6);
    assert!(values[2] <= values[3]);
}

#[test]
fn exit_codes_follow_the_contract() {
    let cs = model("client_server.ipta");
    let holds = ipta(&with_small(&["check", &cs, "P>=0.3 [F (t=2 & w=1)]"]));
    assert_eq!(holds.code, EXIT_OK);
    assert_eq!(records(&holds.stdout)[0]["verdict"], "true");

    let violated = ipta(&with_small(&["check", &cs, "P>=0.35 [F (t=2 & w=1)]"]));
    assert_eq!(violated.code, EXIT_VIOLATED);
    assert_eq!(records(&violated.stdout)[0]["verdict"], "false");

    let unbound = ipta(&["check", &cs, ONE_SLOW]);
    assert_eq!(unbound.code, EXIT_ERROR);
    assert!(unbound.stdout.is_empty());
    assert!(unbound.stderr.contains("client_server.ipta:"), "{}", unbound.stderr);
    assert!(unbound.stderr.contains("constant `L` has no value"));

    let missing = ipta(&["check", "no/such/model.ipta", ONE_SLOW]);
    assert_eq!(missing.code, EXIT_ERROR);

    let bad_query = ipta(&with_small(&["check", &cs, "Pmin=? [F"]));
    assert_eq!(bad_query.code, EXIT_ERROR);
    assert!(bad_query.stderr.starts_with("error: query:"));

    let misplaced_value = ipta(&with_small(&["check", &cs, ONE_SLOW, "--value", "0.75"]));
    assert_eq!(misplaced_value.code, EXIT_ERROR);

    let bad_flag = ipta(&["check", "--bogus"]);
    assert_eq!(bad_flag.code, EXIT_ERROR);
    assert_eq!(ipta(&["--help"]).code, EXIT_OK);
}

#[test]
fn diagnostics_stay_on_stderr() {
    let run = ipta(&with_small(&["check", &model("client_server.ipta"), &model("client_server.props")]));
    // The response guard `x>20` is strict; the warning appears once.
    assert_eq!(run.stderr.matches("strict clock constraints").count(), 1);
    assert!(run.stdout.lines().all(|l| l.starts_with("query=")));
}

#[test]
fn json_mirrors_the_text_report() {
    let cs = model("client_server.ipta");
    let text = ipta(&with_small(&["check", &cs, ONE_SLOW]));
    let json = ipta(&with_small(&["check", &cs, ONE_SLOW, "--json"]));
    let doc: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    let r = &records(&text.stdout)[0];
    let j = &doc["results"][0];
    for key in ["engine", "direction", "states", "choices", "transitions", "iterations"] {
        assert_eq!(j[key].to_string().trim_matches('"'), r[key], "{key}");
    }
    assert_eq!(j["value"].as_f64().unwrap(), num(r, "value"));
    assert!(j.get("verdict").unwrap().is_null());
}

#[test]
fn repeated_runs_are_identical() {
    let cs = model("client_server.ipta");
    let strip = |s: &str| {
        records(s)
            .into_iter()
            .map(|mut r| {
                r.remove("build_seconds");
                r.remove("solve_seconds");
                r
            })
            .collect::<Vec<_>>()
    };
    let a = ipta(&with_small(&["check", &cs, &model("client_server.props")]));
    let b = ipta(&with_small(&["check", &cs, &model("client_server.props")]));
    assert_eq!(strip(&a.stdout), strip(&b.stdout));
}

fn stats(args: &[&str]) -> HashMap<String, HashMap<String, String>> {
    let run = ipta(args);
    assert_eq!(run.code, EXIT_OK, "{}", run.stderr);
    records(&run.stdout)
        .into_iter()
        .map(|r| (r["engine"].clone(), r))
        .collect()
}

#[test]
fn stats_compare_engines() {
    let cs = model("client_server.ipta");
    let by_engine = stats(&[
        "stats", &cs, "--const", "L=0.7", "--const", "U=0.8", "--const", "REQUESTS=10", "--const",
        "TIMEOUT=30",
    ]);
    assert_eq!(by_engine.len(), 3);
    let t = |e: &str| num(&by_engine[e], "transitions");
    assert_eq!(t("ipta"), t("sample"));
    assert!(t("ptastar") > t("ipta"));
    assert_eq!(by_engine["ipta"]["states"], by_engine["ptastar"]["states"]);

    let only = stats(&with_small(&["stats", &cs, "--engine", "ptastar", "--query", ONE_SLOW]));
    assert_eq!(only.keys().collect::<Vec<_>>(), ["ptastar"]);
}

#[test]
fn stats_of_an_empty_model_has_one_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.ipta");
    std::fs::write(&path, "ipta\nmodule Idle\n  s : [0..0] init 0;\nendmodule\n").unwrap();
    let by_engine = stats(&["stats", path.to_str().unwrap(), "--engine", "ipta"]);
    assert_eq!(by_engine["ipta"]["states"], "1");
}

#[test]
fn bench_emits_one_row_per_engine_and_value() {
    let cs = model("client_server.ipta");
    let bench = |range: &str, query: &str| {
        let run = ipta(&[
            "bench", &cs, query, "--requests", range, "--const", "L=0.7", "--const", "U=0.8",
            "--const", "TIMEOUT=30",
        ]);
        assert_eq!(run.code, EXIT_OK, "{}", run.stderr);
        records(&run.stdout)
    };
    let min = bench("2..6:2", "Pmin=? [F (t=REQUESTS & w=1)]");
    assert_eq!(min.len(), 9);
    let engines: Vec<&str> = min.iter().map(|r| r["engine"].as_str()).collect();
    assert_eq!(engines[..3], ["ipta", "ptastar", "sample"]);
    let max = bench("2..6:2", "Pmax=? [F (t=REQUESTS & w=1)]");
    for (lo, hi) in min.chunks(3).zip(max.chunks(3)) {
        assert_eq!(lo[0]["requests"], lo[2]["requests"]);
        assert!((num(&lo[0], "value") - num(&lo[1], "value")).abs() < 1e-9);
        // The sampled automaton lies inside the interval family.
        let sample = num(&lo[2], "value");
        assert!(num(&lo[0], "value") - 1e-9 <= sample && sample <= num(&hi[0], "value") + 1e-9);
        for key in ["states", "transitions", "seconds"] {
            assert!(lo.iter().all(|r| r.contains_key(key)));
        }
    }
    assert_eq!(bench("4", "Pmin=? [F (t=REQUESTS & w=1)]").len(), 3);
}

#[test]
fn request_ranges() {
    assert_eq!(parse_range("10..50:10"), Ok(RequestRange { from: 10, to: 50, step: 10 }));
    assert_eq!(parse_range("3").unwrap().values().collect::<Vec<_>>(), [3]);
    assert_eq!(parse_range("1..4").unwrap().values().collect::<Vec<_>>(), [1, 2, 3, 4]);
    assert!(parse_range("5..1").is_err());
    assert!(parse_range("1..5:0").is_err());
}

#[test]
fn export_round_trips_and_is_deterministic() {
    let cs = model("client_server.ipta");
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, engine: &str| {
        let path = dir.path().join(name);
        let run = ipta(&with_small(&[
            "export", &cs, "--engine", engine, "--query", ONE_SLOW, "--export", path.to_str().unwrap(),
        ]));
        assert_eq!(run.code, EXIT_OK, "{}", run.stderr);
        assert!(run.stdout.is_empty());
        std::fs::read_to_string(path).unwrap()
    };
    let first = write("a.imdp", "ipta");
    assert_eq!(first, write("b.imdp", "ipta"));

    let summary = read_export(&first).unwrap();
    let check = records(&ipta(&with_small(&["check", &cs, ONE_SLOW])).stdout).remove(0);
    assert_eq!(summary.states.to_string(), check["states"]);
    assert_eq!(summary.choices.to_string(), check["choices"]);
    assert_eq!(summary.transitions.to_string(), check["transitions"]);
    assert!(summary.labels.iter().any(|(name, ids)| name == "target" && !ids.is_empty()));

    let encoded = read_export(&write("c.imdp", "ptastar")).unwrap();
    assert!(encoded.choices > summary.choices);

    let stdout = ipta(&with_small(&["export", &cs]));
    assert_eq!(read_export(&stdout.stdout).unwrap().labels[0].0, "init");
}

#[test]
fn prune_reports_and_fixes_nonminimal_commands() {
    let coin = model("nonminimal.ipta");
    let run = ipta(&["prune", &coin]);
    assert_eq!(run.code, EXIT_OK);
    let rs = records(&run.stdout);
    assert_eq!(rs[0]["minimal"], "false");
    assert_eq!(rs[0]["violations"], "0:2,1:2");
    assert_eq!(rs[0]["bounds"], "[2/5,1/2],[2/5,1/2]");
    assert_eq!(rs[0]["pruned"], "[1/2,1/2],[1/2,1/2]");
    assert_eq!(rs[1]["nonminimal"], "1");

    let dir = tempfile::tempdir().unwrap();
    let fixed = dir.path().join("fixed.ipta");
    let fix = ipta(&["prune", &coin, "--fix", "-o", fixed.to_str().unwrap()]);
    assert_eq!(fix.code, EXIT_OK);
    let again = records(&ipta(&["prune", fixed.to_str().unwrap()]).stdout);
    assert_eq!(again[0]["minimal"], "true");
    assert_eq!(again[0]["bounds"], "[1/2,1/2],[1/2,1/2]");

    // Without an output path the model goes to stdout and the report to stderr.
    let piped = ipta(&["prune", &coin, "--fix"]);
    assert!(piped.stdout.starts_with("ipta"));
    assert!(piped.stderr.contains("minimal=false"));
}

#[test]
fn prune_accepts_the_running_example() {
    let run = ipta(&[
        "prune", &model("client_server.ipta"), "--const", "L=0.95", "--const", "U=1", "--const",
        "REQUESTS=2", "--json",
    ]);
    assert_eq!(run.code, EXIT_OK, "{}", run.stderr);
    let doc: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(doc["summary"]["nonminimal"], 0);
    assert!(doc["commands"].as_array().unwrap().iter().all(|c| c["minimal"] == true));
}

//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Wall-clock limits are measured and reported on each line but do not
//! decide the exit status; everything else does.

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;
use std::time::Instant;

use ipta::encode::{pta_star, sample, DEFAULT_SUPPORT_LIMIT};
use ipta::explore::{build_imdp, BuildOptions, Imdp};
use ipta::lang::{parse_binding, parse_model, parse_query, resolve};
use ipta::pipeline::{run_query, Engine, System};
use ipta::solve::{inner_extreme, value_iteration, Direction, SolveSettings};
use ipta::{
    prob, prob_to_f64, Action, ClockConstraint, ClockSet, Edge, EdgeOutcome, IntervalDistribution,
    Ipta, LocId, Location, MinimalityCondition, Prob,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Tolerance for reproduced paper values.
const VALUE_TOL: f64 = 1e-6;
/// Tolerance for comparisons between exact-equivalent computations.
const EXACT_TOL: f64 = 1e-9;
/// Tolerance against grid oracles.
const GRID_TOL: f64 = 1e-6;
/// Timeout used where the paper's 30000 makes the state space too large to
/// sweep; every value involved is the same for any timeout above 20.
const SHORT_TIMEOUT: u32 = 30;
const PAPER_TIMEOUT: u32 = 30000;

fn model_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name)
}

fn model_text(name: &str) -> String {
    std::fs::read_to_string(model_path(name)).unwrap()
}

fn system(l: &str, u: &str, requests: u32, timeout: u32) -> System {
    let b: Vec<_> = [
        format!("L={l}"),
        format!("U={u}"),
        format!("REQUESTS={requests}"),
        format!("TIMEOUT={timeout}"),
    ]
    .iter()
    .map(|s| parse_binding(s).unwrap())
    .collect();
    System::parse(&model_text("client_server.ipta"), &b).unwrap()
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = ipta_cli::run(std::iter::once("ipta").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// `key=value` fields of one output line; values here never contain spaces
/// except the quoted query, which is skipped.
fn fields(line: &str) -> HashMap<String, String> {
    let tail = match line.find("\" ") {
        Some(i) if line.starts_with("query=") => &line[i + 2..],
        _ => line,
    };
    tail.split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

struct Verdict {
    pass: bool,
    /// Whether the parts that do not depend on wall-clock time pass.
    untimed_pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    timed(pass, pass, detail)
}

fn timed(pass: bool, untimed_pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        untimed_pass,
        detail: detail.into(),
    }
}

fn default_settings() -> SolveSettings {
    SolveSettings::default()
}

fn solve(sys: &System, engine: &Engine, query: &str) -> (f64, Imdp) {
    let q = parse_query(query).unwrap();
    let o = run_query(sys, engine, &q, &BuildOptions::default(), &default_settings()).unwrap();
    assert!(o.check.result.converged, "{query} did not converge");
    (o.check.value, o.imdp)
}

fn interval_values() -> Verdict {
    let args = [
        "check",
        model_path("client_server.ipta").to_str().unwrap(),
        "",
        "--const",
        "L=0.7",
        "--const",
        "U=0.8",
        "--const",
        "REQUESTS=2",
        "--const",
        "TIMEOUT=30000",
    ]
    .map(String::from);
    let mut values = Vec::new();
    let mut slowest: f64 = 0.0;
    let mut states = 0;
    for q in ["Pmin=? [F (t=2 & w=1)]", "Pmax=? [F (t=2 & w=1)]"] {
        let mut a = args.clone();
        a[2] = q.to_string();
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        let start = Instant::now();
        let (code, out, err) = cli(&refs);
        slowest = slowest.max(start.elapsed().as_secs_f64());
        assert_eq!(code, 0, "{err}");
        let f = fields(out.lines().next().unwrap());
        values.push(f["value"].parse::<f64>().unwrap());
        states = f["states"].parse().unwrap();
    }
    let ok = (values[0] - 0.30).abs() < VALUE_TOL && (values[1] - 0.45).abs() < VALUE_TOL;
    let fast = slowest < 1.0;
    timed(
        ok && fast,
        ok,
        format!(
            "p_min={:.9} p_max={:.9} (tol {VALUE_TOL}); {states} states; slowest query {slowest:.2}s, limit 1s{}",
            values[0],
            values[1],
            if fast { "" } else { " not met" }
        ),
    )
}

fn sampling_values() -> Verdict {
    let sys = system("0.7", "0.8", 2, PAPER_TIMEOUT);
    let mut got = Vec::new();
    let mut ok = true;
    for (y, expected) in [("7/10", 0.42), ("3/4", 0.375), ("4/5", 0.32)] {
        let y: Prob = y.parse().unwrap();
        let (v, _) = solve(&sys, &Engine::Sample(Some(y)), "Pmin=? [F (t=2 & w=1)]");
        ok &= (v - expected).abs() < VALUE_TOL;
        got.push(format!("{v:.9}"));
    }
    verdict(ok, format!("y=0.7,0.75,0.8 -> {} (expected 0.42, 0.375, 0.32)", got.join(", ")))
}

fn sampling_insufficient() -> Verdict {
    let sys = system("0.7", "0.8", 2, PAPER_TIMEOUT);
    let mut ok = true;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 70..=80 {
        let (v, _) = solve(&sys, &Engine::Sample(Some(prob(k, 100))), "Pmin=? [F (t=2 & w=1)]");
        ok &= v > 0.30 + VALUE_TOL && v < 0.45 - VALUE_TOL;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    verdict(ok, format!("y=0.70..0.80 gives values in [{lo:.6}, {hi:.6}], strictly inside (0.30, 0.45)"))
}

fn pta_star_equivalence() -> Verdict {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    let cases = [(2, PAPER_TIMEOUT), (2, SHORT_TIMEOUT), (10, SHORT_TIMEOUT), (20, SHORT_TIMEOUT)];
    for (r, timeout) in cases {
        let sys = system("0.7", "0.8", r, timeout);
        for target in [format!("(t={r} & w=1)"), "\"lessThan50PercentSlow\"".to_string()] {
            for dir in ["Pmin", "Pmax"] {
                let q = format!("{dir}=? [F {target}]");
                let (a, ia) = solve(&sys, &Engine::Ipta, &q);
                let (b, ib) = solve(&sys, &Engine::PtaStar, &q);
                let (_, is) = solve(&sys, &Engine::Sample(Some(prob(3, 4))), &q);
                worst = worst.max((a - b).abs());
                let counts = ib.num_transitions() > ia.num_transitions()
                    && is.num_transitions() == ia.num_transitions();
                if (a - b).abs() > EXACT_TOL || !counts {
                    ok = false;
                    notes.push(format!(
                        "R={r} T={timeout} {q}: ipta {a} ptastar {b}, transitions {}/{}/{}",
                        ia.num_transitions(),
                        ib.num_transitions(),
                        is.num_transitions()
                    ));
                }
            }
        }
    }
    // The shortened timeout does not change the answers.
    let full = system("0.7", "0.8", 2, PAPER_TIMEOUT);
    let short = system("0.7", "0.8", 2, SHORT_TIMEOUT);
    for q in ["Pmin=? [F (t=2 & w=1)]", "Pmax=? [F \"lessThan50PercentSlow\"]"] {
        let (a, _) = solve(&full, &Engine::Ipta, q);
        let (b, _) = solve(&short, &Engine::Ipta, q);
        if (a - b).abs() > EXACT_TOL {
            ok = false;
            notes.push(format!("TIMEOUT changes {q}: {a} vs {b}"));
        }
    }
    let mut detail = format!(
        "R in {{2,10,20}} (TIMEOUT={SHORT_TIMEOUT}, and R=2 at {PAPER_TIMEOUT}), both targets, min and max: max |ipta-ptastar| = {worst:.1e}; ptastar transitions > ipta = sample"
    );
    for n in notes {
        detail.push_str("; ");
        detail.push_str(&n);
    }
    verdict(ok, detail)
}

fn fig4_encoding() -> Verdict {
    let src = parse_model(&model_text("server.ipta")).unwrap();
    let server = &resolve(&src, &[]).unwrap().modules[0];
    let original: Vec<&Edge> = server.edges.iter().filter(|e| e.action.to_string() == "request").collect();
    let outcomes: Vec<EdgeOutcome> = original[0].distribution.outcomes().cloned().collect();
    let encoded = pta_star(server, DEFAULT_SUPPORT_LIMIT).unwrap();
    let emitted: BTreeSet<Vec<Prob>> = encoded
        .edges
        .iter()
        .filter(|e| e.action.to_string() == "request")
        .map(|e| {
            outcomes
                .iter()
                .map(|o| e.distribution.get(o).map_or(prob(0, 1), |x| x.lower.clone()))
                .collect()
        })
        .collect();
    let count = encoded.edges.iter().filter(|e| e.action.to_string() == "request").count();
    let expected: BTreeSet<Vec<Prob>> =
        [vec![prob(1, 1), prob(0, 1)], vec![prob(95, 100), prob(5, 100)]].into();
    let shown: Vec<String> = emitted
        .iter()
        .map(|mu| format!("({})", mu.iter().map(ipta::fmt_prob).collect::<Vec<_>>().join(",")))
        .collect();
    verdict(
        original.len() == 1 && count == 2 && emitted == expected,
        format!("request edge [19/20,1]/[0,1/20] -> {{{}}} in {count} edges", shown.join(", ")),
    )
}

fn scaling() -> Verdict {
    let start = Instant::now();
    let (code, out, err) = cli(&[
        "bench",
        model_path("client_server.ipta").to_str().unwrap(),
        "Pmin=? [F \"lessThan50PercentSlow\"]",
        "--requests",
        "10..50:10",
        "--repeat",
        "3",
        "--const",
        "L=0.7",
        "--const",
        "U=0.8",
        "--const",
        &format!("TIMEOUT={SHORT_TIMEOUT}"),
    ]);
    let total = start.elapsed().as_secs_f64();
    if code != 0 {
        return verdict(false, format!("bench failed: {err}"));
    }
    let rows: Vec<HashMap<String, String>> = out.lines().map(fields).collect();
    let last: HashMap<&str, f64> = rows
        .iter()
        .filter(|r| r["requests"] == "50")
        .map(|r| (engine_name(&r["engine"]), r["seconds"].parse().unwrap()))
        .collect();
    let ordered = last["sample"] <= last["ipta"] && last["ipta"] <= last["ptastar"];
    timed(
        rows.len() == 15 && total < 600.0 && ordered,
        rows.len() == 15,
        format!(
            "REQUESTS=10..50 step 10, TIMEOUT={SHORT_TIMEOUT}, best of 3: {} rows in {total:.1}s (limit 600s); at 50 sample {:.3}s, ipta {:.3}s, ptastar {:.3}s",
            rows.len(),
            last["sample"],
            last["ipta"],
            last["ptastar"]
        ),
    )
}

fn engine_name(s: &str) -> &'static str {
    match s {
        "ipta" => "ipta",
        "ptastar" => "ptastar",
        _ => "sample",
    }
}

// Property suites.

fn interval_dist(max_support: usize, grid: i64) -> impl Strategy<Value = IntervalDistribution<usize>> {
    (1..=max_support)
        .prop_flat_map(move |n| {
            (
                proptest::collection::vec(0..=grid, n),
                proptest::collection::vec(0..=grid / 4, n),
                proptest::collection::vec(0..=grid / 4, n),
            )
        })
        .prop_filter_map("all-zero weights", move |(w, down, up)| {
            let total: i64 = w.iter().sum();
            if total == 0 {
                return None;
            }
            let mut mu: Vec<i64> = w.iter().map(|x| x * grid / total).collect();
            mu[0] += grid - mu.iter().sum::<i64>();
            let bounds = mu.iter().enumerate().map(|(i, &m)| {
                (i, prob((m - down[i]).max(0), grid), prob((m + up[i]).min(grid), grid))
            });
            Some(IntervalDistribution::from_bounds(bounds))
        })
}

fn grid_points(n: usize, grid: i64) -> Vec<Vec<i64>> {
    fn rec(n: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if n == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(n - 1, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, grid, &mut Vec::new(), &mut out);
    out
}

fn conforming(d: &IntervalDistribution<usize>, n: usize, grid: i64) -> BTreeSet<Vec<i64>> {
    grid_points(n, grid)
        .into_iter()
        .filter(|p| {
            let mu: Vec<(usize, Prob)> = p.iter().enumerate().map(|(i, &k)| (i, prob(k, grid))).collect();
            d.conforms(&mu)
        })
        .collect()
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn inner_extreme_suite() -> Result<(), String> {
    let strategy = (
        interval_dist(3, 50),
        proptest::collection::vec(0u32..=10, 3),
        any::<bool>(),
    );
    runner(200)
        .run(&strategy, |(d, values, max)| {
            let dir = if max { Direction::Max } else { Direction::Min };
            let outcomes: Vec<usize> = d.outcomes().cloned().collect();
            let vals: Vec<f64> = outcomes.iter().map(|&o| values[o] as f64 / 10.0).collect();
            let (lo, hi): (Vec<f64>, Vec<f64>) = d
                .entries()
                .iter()
                .map(|e| (prob_to_f64(&e.lower), prob_to_f64(&e.upper)))
                .unzip();
            let ids: Vec<u32> = (0..d.len() as u32).collect();
            let (_, objective) = inner_extreme(&lo, &hi, &vals, &ids, dir);
            let best = grid_points(d.len(), 50)
                .into_iter()
                .filter(|p| {
                    let pairs: Vec<(usize, Prob)> =
                        outcomes.iter().zip(p).map(|(&o, &x)| (o, prob(x, 50))).collect();
                    d.conforms(&pairs)
                })
                .map(|p| p.iter().zip(&vals).map(|(&x, v)| x as f64 / 50.0 * v).sum::<f64>())
                .fold(None, |acc: Option<f64>, v| {
                    Some(match (acc, dir) {
                        (None, _) => v,
                        (Some(b), Direction::Max) => b.max(v),
                        (Some(b), Direction::Min) => b.min(v),
                    })
                })
                .unwrap();
            prop_assert!((best - objective).abs() < GRID_TOL, "oracle {best} vs {objective}");
            Ok(())
        })
        .map_err(|e| format!("inner_extreme: {e}"))
}

fn prune_suite() -> Result<(), String> {
    runner(200)
        .run(&interval_dist(3, 50), |d| {
            let n = d.entries().iter().map(|e| e.outcome).max().unwrap() + 1;
            let p = d.prune().unwrap();
            prop_assert!(p.is_minimal().unwrap());
            prop_assert_eq!(conforming(&d, n, 50), conforming(&p, n, 50));
            Ok(())
        })
        .map_err(|e| format!("prune: {e}"))
}

fn precise() -> SolveSettings {
    SolveSettings {
        epsilon: 1e-14,
        ..SolveSettings::default()
    }
}

fn bracketing_suite() -> Result<(), String> {
    let sys = system("0.7", "0.8", 3, SHORT_TIMEOUT);
    let query = parse_query("Pmin=? [ F (t=3 & w=1) ]").unwrap();
    let compiled = sys.compile(&query).unwrap();
    let solve_for = |m: &Ipta, dir: Direction| {
        let imdp = build_imdp(m, Some(&compiled), &BuildOptions::default()).unwrap();
        let target = imdp.target.clone().unwrap();
        value_iteration(&imdp, &target, dir, None, &precise()).unwrap().initial_value
    };
    let pmin = solve_for(&sys.automaton, Direction::Min);
    let pmax = solve_for(&sys.automaton, Direction::Max);
    let interval_edges = sys.automaton.edges.iter().filter(|e| !e.distribution.is_point_interval()).count();
    runner(100)
        .run(&proptest::collection::vec(0i64..=1000, interval_edges), |ys| {
            let mut k = 0;
            let choices: Vec<Option<Vec<Prob>>> = sys
                .automaton
                .edges
                .iter()
                .map(|e| {
                    if e.distribution.is_point_interval() {
                        return None;
                    }
                    let first = &e.distribution.entries()[0];
                    let y = &first.lower + (&first.upper - &first.lower) * prob(ys[k], 1000);
                    k += 1;
                    Some(vec![y.clone(), prob(1, 1) - y])
                })
                .collect();
            let sampled = sample(&sys.automaton, &choices).unwrap();
            let v = solve_for(&sampled, Direction::Min);
            prop_assert!(pmin - EXACT_TOL <= v && v <= pmax + EXACT_TOL, "{pmin} <= {v} <= {pmax}");
            Ok(())
        })
        .map_err(|e| format!("bracketing: {e}"))
}

/// A random clock-free automaton whose edges are point distributions.
fn random_point_ipta() -> impl Strategy<Value = (Ipta, Vec<bool>)> {
    (3usize..=5).prop_flat_map(|n| {
        let all: Vec<u32> = (0..n as u32).collect();
        let edge = (0..n, Just(all).prop_shuffle(), interval_dist(3, 50));
        (
            proptest::collection::vec(edge, 1..=2 * n),
            proptest::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(edges, target)| {
                let edges: Vec<Edge> = edges
                    .into_iter()
                    .enumerate()
                    .map(|(i, (source, perm, d))| {
                        let mu = ipta::encode::proportional_choice(&d);
                        let outcomes: Vec<usize> = d.outcomes().cloned().collect();
                        let point = IntervalDistribution::from_probabilities(outcomes.into_iter().zip(mu));
                        Edge {
                            source: LocId(source as u32),
                            guard: ClockConstraint::tt(),
                            action: Action::Named(format!("a{}", i % 2)),
                            distribution: point.map_outcomes(|&o| EdgeOutcome {
                                resets: ClockSet::EMPTY,
                                target: LocId(perm[o]),
                            }),
                            origin: format!("e{i}"),
                        }
                    })
                    .collect();
                let m = Ipta {
                    variables: vec!["l".into()],
                    locations: (0..n as i64).map(|v| Location { values: vec![v] }).collect(),
                    initial: vec![LocId(0)],
                    actions: edges.iter().map(|e| e.action.clone()).collect(),
                    clocks: vec![],
                    invariants: vec![ClockConstraint::tt(); n],
                    edges,
                    labels: vec![Default::default(); n],
                };
                (m, target)
            })
    })
}

/// Textbook value iteration on point distributions.
fn classical(imdp: &Imdp, target: &[bool], dir: Direction) -> Vec<f64> {
    let mut x: Vec<f64> = target.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect();
    for _ in 0..100_000 {
        let next: Vec<f64> = (0..imdp.num_states())
            .map(|s| {
                if target[s] {
                    return 1.0;
                }
                let vals = imdp.choices(s).map(|c| {
                    imdp.transitions(c)
                        .map(|t| imdp.bounds_f64[imdp.trans_bound[t] as usize].0 * x[imdp.trans_target[t] as usize])
                        .sum::<f64>()
                });
                let v = match dir {
                    Direction::Max => vals.fold(0.0, f64::max),
                    Direction::Min => vals.fold(f64::INFINITY, f64::min),
                };
                if v.is_infinite() { 0.0 } else { v }
            })
            .collect();
        let delta = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        if delta < 1e-15 {
            break;
        }
    }
    x
}

fn classical_suite() -> Result<(), String> {
    runner(100)
        .run(&random_point_ipta(), |(m, target_locs)| {
            let imdp = build_imdp(&m, None, &BuildOptions::default()).unwrap();
            let target: Vec<bool> = imdp.state_loc.iter().map(|&l| target_locs[l as usize]).collect();
            for dir in [Direction::Min, Direction::Max] {
                let ours = value_iteration(&imdp, &target, dir, None, &precise()).unwrap();
                let reference = classical(&imdp, &target, dir);
                for (a, b) in ours.values.iter().zip(&reference) {
                    prop_assert!((a - b).abs() < EXACT_TOL, "{:?} vs {:?}", ours.values, reference);
                }
            }
            Ok(())
        })
        .map_err(|e| format!("classical: {e}"))
}

fn property_suites() -> Verdict {
    let results = [
        ("inner_extreme vs grid oracle (200 cases)", inner_extreme_suite()),
        ("prune keeps conforming set (200 cases)", prune_suite()),
        ("bracketing of conforming samples (100 cases)", bracketing_suite()),
        ("point intervals = classical VI (100 cases)", classical_suite()),
    ];
    let failures: Vec<&String> = results.iter().filter_map(|(_, r)| r.as_ref().err()).collect();
    let names: Vec<&str> = results.iter().map(|(n, _)| *n).collect();
    let mut detail = format!("supports <= 3, grid 1/50: {}", names.join("; "));
    for f in &failures {
        detail.push_str(&format!("; FAILED {f}"));
    }
    verdict(failures.is_empty(), detail)
}

fn minimality() -> Verdict {
    let d = IntervalDistribution::from_bounds([
        ("s", prob(4, 10), prob(5, 10)),
        ("t", prob(4, 10), prob(5, 10)),
    ]);
    let mut conditions: Vec<MinimalityCondition> =
        d.minimality_violations().unwrap().into_iter().map(|v| v.condition).collect();
    conditions.dedup();
    let pruned = d.prune().unwrap();
    let expected = IntervalDistribution::from_bounds([
        ("s", prob(1, 2), prob(1, 2)),
        ("t", prob(1, 2), prob(1, 2)),
    ]);
    let (code, out, _) = cli(&["prune", model_path("nonminimal.ipta").to_str().unwrap()]);
    let report = fields(out.lines().next().unwrap_or_default());
    let cli_ok = code == 0
        && report.get("violations").map(String::as_str) == Some("0:2,1:2")
        && report.get("pruned").map(String::as_str) == Some("[1/2,1/2],[1/2,1/2]");
    verdict(
        conditions == [MinimalityCondition::LowerAttainable] && pruned == expected && cli_ok,
        format!(
            "{{[0.4,0.5],[0.4,0.5]}} violates condition(s) {:?}, prunes to {{[1/2,1/2],[1/2,1/2]}}: {}; cli prune reports {}",
            conditions.iter().map(|c| c.number()).collect::<Vec<_>>(),
            pruned == expected,
            report.get("violations").cloned().unwrap_or_default()
        ),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 8] = [
        ("interval values", interval_values),
        ("sampling values", sampling_values),
        ("sampling insufficiency", sampling_insufficient),
        ("ptastar equivalence", pta_star_equivalence),
        ("server edge encoding", fig4_encoding),
        ("scaling", scaling),
        ("property suites", property_suites),
        ("minimality", minimality),
    ];
    let mut failed = false;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        let status = if v.pass { "PASS" } else { "FAIL" };
        let note = if !v.pass && v.untimed_pass { " [timing only; not enforced]" } else { "" };
        println!("{status} criterion {} ({name}): {}{note}", n + 1, v.detail);
        failed |= !v.untimed_pass;
    }
    if failed {
        std::process::exit(1);
    }
}

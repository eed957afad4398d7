mod common;

use common::{imdp_for, model_text, modules, system};
use ipta::compose::{compose, compose_all, ComposeError};
use ipta::explore::{build_imdp, BuildOptions};
use ipta::solve::{value_iteration, Direction, SolveSettings};
use ipta::{prob, Action, Ipta};

fn request_bounds(m: &Ipta) -> Vec<(String, String)> {
    let e = m
        .edges
        .iter()
        .find(|e| e.action == Action::Named("request".into()))
        .unwrap();
    e.distribution
        .entries()
        .iter()
        .map(|x| (ipta::fmt_prob(&x.lower), ipta::fmt_prob(&x.upper)))
        .collect()
}

#[test]
fn server_with_client_keeps_request_intervals() {
    let ms = modules(&model_text("client_server_small.ipta"), &[]);
    let sys = compose(&ms[0], &ms[1]).unwrap();
    assert_eq!(
        request_bounds(&sys),
        [("19/20".into(), "1".into()), ("0".into(), "1/20".into())]
    );
    sys.validate().unwrap();
    assert_eq!(sys.clocks, ["x", "y"]);
    assert_eq!(sys.variables, ["s", "c"]);
}

const TOYS: &str = "
ipta
module A
  a : [0..1] init 0;
  [go] a=0 -> (a'=1);
  [back] a=1 -> 0.5~0.6:(a'=0) + 0.4~0.5:(a'=1);
endmodule
module B
  b : [0..1] init 0;
  [ping] b=0 -> (b'=1);
endmodule
module C
  c : [0..2] init 0;
  [tick] c<2 -> (c'=c+1);
  [tock] c=2 -> (c'=0);
endmodule
";

#[test]
fn disjoint_actions_interleave() {
    let ms = modules(TOYS, &[]);
    let (a, b) = (&ms[0], &ms[1]);
    let ab = compose(a, b).unwrap();
    assert_eq!(ab.locations.len(), 4);
    let expected = a.edges.len() * b.locations.len() + a.locations.len() * b.edges.len();
    assert_eq!(ab.edges.len(), expected);
    // The idle partner keeps its location with probability exactly one.
    for e in &ab.edges {
        let src = &ab.locations[e.source.index()].values;
        for o in e.distribution.outcomes() {
            let dst = &ab.locations[o.target.index()].values;
            let moved = src.iter().zip(dst).filter(|(x, y)| x != y).count();
            assert!(moved <= 1);
        }
    }
}

#[test]
fn fold_of_disjoint_components_multiplies_location_counts() {
    let ms = modules(TOYS, &[]);
    let abc = compose_all(&ms).unwrap();
    let product: usize = ms.iter().map(|m| m.locations.len()).product();
    assert_eq!(abc.locations.len(), product);
    assert_eq!(compose_all(&ms[..1]).unwrap(), ms[0]);
    assert_eq!(compose_all(&ms[..2]).unwrap(), compose(&ms[0], &ms[1]).unwrap());
    assert_eq!(compose_all(&[]), Err(ComposeError::Empty));
}

const TWO_SERVERS: &str = "
ipta
module S1
  s : [1..3] init 1;
  x : clock;
  invariant (s=2 => x<=20) & (s=3 => x<=100) endinvariant
  [request]  s=1 -> (0.95~1):(s'=2)&(x'=0) + (0~0.05):(s'=3)&(x'=0);
  [response] s=2 & x<20 -> (s'=1);
  [response] s=3 & x>=20 -> (s'=1);
endmodule
module S2
  r : [1..3] init 1;
  z : clock;
  invariant (r=2 => z<=20) & (r=3 => z<=100) endinvariant
  [request]  r=1 -> (0.95~1):(r'=2)&(z'=0) + (0~0.05):(r'=3)&(z'=0);
  [response] r=2 & z<20 -> (r'=1);
  [response] r=3 & z>=20 -> (r'=1);
endmodule
";

#[test]
fn shared_action_multiplies_bounds() {
    let ms = modules(TWO_SERVERS, &[]);
    let sys = compose(&ms[0], &ms[1]).unwrap();
    let e = sys
        .edges
        .iter()
        .find(|e| e.action == Action::Named("request".into()))
        .unwrap();
    assert_eq!(e.distribution.len(), 4);
    for x in e.distribution.entries() {
        let vals = &sys.locations[x.outcome.target.index()].values;
        let (lo, hi) = match (vals[0], vals[1]) {
            (2, 2) => (prob(9025, 10000), prob(1, 1)),
            (2, 3) | (3, 2) => (prob(0, 1), prob(5, 100)),
            (3, 3) => (prob(0, 1), prob(25, 10000)),
            other => panic!("unexpected target {other:?}"),
        };
        assert_eq!((&x.lower, &x.upper), (&lo, &hi));
        // Both clocks are reset on every branch.
        assert_eq!(x.outcome.resets.iter().count(), 2);
    }
    sys.validate().unwrap();
    // Responses synchronize too: each needs both servers ready.
    let responses = sys
        .edges
        .iter()
        .filter(|e| e.action == Action::Named("response".into()))
        .count();
    assert_eq!(responses, 4);
}

#[test]
fn point_intervals_stay_points() {
    let ms = modules(&model_text("client_server.ipta"), &["L=0.7", "U=0.7", "REQUESTS=2"]);
    let sys = compose_all(&ms).unwrap();
    assert!(sys.edges.iter().all(|e| e.distribution.is_point_interval()));
}

#[test]
fn name_clashes_are_rejected() {
    let ms = modules(TWO_SERVERS, &[]);
    assert_eq!(
        compose(&ms[0], &ms[0]),
        Err(ComposeError::ClockNameClash("x".into()))
    );
    let mut renamed = ms[0].clone();
    renamed.clocks = vec!["w".into()];
    assert_eq!(
        compose(&ms[0], &renamed),
        Err(ComposeError::VariableNameClash("s".into()))
    );
}

#[test]
fn composition_is_associative_up_to_state_space() {
    let text = "
ipta
module A
  a : [0..2] init 0;
  x : clock;
  invariant (a=1 => x<=3) endinvariant
  [sync] a=0 -> 0.3~0.6:(a'=1)&(x'=0) + 0.4~0.7:(a'=2);
  [] a=1 & x>=2 -> (a'=0);
endmodule
module B
  b : [0..1] init 0;
  y : clock;
  invariant (b=1 => y<=2) endinvariant
  [sync] b=0 -> (b'=1)&(y'=0);
  [other] b=1 -> 0.5~1:(b'=0) + 0~0.5:(b'=1)&(y'=0);
endmodule
module C
  c : [0..1] init 0;
  [other] true -> 0.2~0.9:(c'=1) + 0.1~0.8:(c'=0);
endmodule
label \"goal\" = a=2 & c=1;
";
    let sys = system(text, &[]);
    let ms = &sys.model.modules;
    let left = compose(&compose(&ms[0], &ms[1]).unwrap(), &ms[2]).unwrap();
    let right = compose(&ms[0], &compose(&ms[1], &ms[2]).unwrap()).unwrap();
    let settings = SolveSettings::default();
    let mut results = Vec::new();
    for mut m in [left, right] {
        sys.model.apply_labels(&mut m).unwrap();
        let imdp = build_imdp(&m, None, &BuildOptions::default()).unwrap();
        let goal = imdp.states_with_label("goal");
        let lo = value_iteration(&imdp, &goal, Direction::Min, None, &settings).unwrap();
        let hi = value_iteration(&imdp, &goal, Direction::Max, None, &settings).unwrap();
        results.push((
            imdp.num_states(),
            imdp.num_choices(),
            imdp.num_transitions(),
            lo.initial_value,
            hi.initial_value,
        ));
    }
    let (a, b) = (results[0], results[1]);
    assert_eq!((a.0, a.1, a.2), (b.0, b.1, b.2));
    assert!((a.3 - b.3).abs() < 1e-9 && (a.4 - b.4).abs() < 1e-9);
    assert!(a.3 < a.4);
    // Sanity check through the query path as well.
    let imdp = imdp_for(&sys, "Pmax=? [ F \"goal\" ]");
    assert!(imdp.target.unwrap().iter().any(|&t| t));
}

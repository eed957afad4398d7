//! Minimal and maximal reachability probabilities on an interval MDP.
//!
//! Values start at 0 off the target and are improved by value iteration. Each
//! step picks the best action (outer optimization) and, for that action, the
//! distribution within the interval bounds that moves as much mass as
//! possible towards high values for maxima, or low values for minima (inner
//! optimization, [`inner_extreme`]).

use crate::explore::Imdp;
use crate::lang::QueryMode;
use crate::model::{prob_to_f64, CmpOp, IntervalDistribution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    Absolute,
    Relative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Solve strongly connected components one at a time, successors first.
    Topological,
    /// Sweep all states per iteration.
    Jacobi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveSettings {
    pub epsilon: f64,
    pub max_iterations: usize,
    pub criterion: Criterion,
    pub method: Method,
}

impl Default for SolveSettings {
    fn default() -> Self {
        SolveSettings {
            epsilon: 1e-6,
            max_iterations: 100_000,
            criterion: Criterion::Absolute,
            method: Method::Topological,
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("state set has {got} entries but the model has {expected} states")]
    StateSetSize { expected: usize, got: usize },
    #[error("epsilon must be positive and max_iterations at least 1")]
    InvalidSettings,
    #[error("the state space was built without a query target")]
    MissingTarget,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    /// Optimum over initial states: minimum for `Min`, maximum for `Max`.
    pub initial_value: f64,
    pub values: Vec<f64>,
    /// Number of sweeps; with the topological method, the most any single
    /// component needed.
    pub iterations: usize,
    pub converged: bool,
}

/// States from which `target` cannot be reached along support edges. With
/// `constrain`, paths may only pass through states in `constrain`.
pub fn unreachable_set(m: &Imdp, target: &[bool], constrain: Option<&[bool]>) -> Vec<bool> {
    let n = m.num_states();
    let preds = predecessors(m);
    let mut reach = target.to_vec();
    let mut stack: Vec<u32> = (0..n as u32).filter(|&s| target[s as usize]).collect();
    while let Some(t) = stack.pop() {
        for &p in &preds.1[preds.0[t as usize] as usize..preds.0[t as usize + 1] as usize] {
            let p = p as usize;
            if !reach[p] && constrain.is_none_or(|c| c[p]) {
                reach[p] = true;
                stack.push(p as u32);
            }
        }
    }
    reach.iter().map(|r| !r).collect()
}

/// Predecessor lists in CSR form (offsets, sources); a source appears once
/// per transition into the state.
fn predecessors(m: &Imdp) -> (Vec<u32>, Vec<u32>) {
    let n = m.num_states();
    let mut offsets = vec![0u32; n + 1];
    for &t in &m.trans_target {
        offsets[t as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut sources = vec![0u32; m.num_transitions()];
    for s in 0..n {
        for c in m.choices(s) {
            for t in m.transitions(c) {
                let slot = &mut fill[m.trans_target[t] as usize];
                sources[*slot as usize] = s as u32;
                *slot += 1;
            }
        }
    }
    (offsets, sources)
}

/// Extreme conforming distribution for the given outcome values.
///
/// Outcomes are ordered by value, descending for `Max` and ascending for
/// `Min`, ties broken by `ids`; each in turn receives as much mass as its
/// upper bound and the lower bounds of the outcomes after it allow. Returns
/// the distribution (in input order) and its expected value.
pub fn inner_extreme(
    lower: &[f64],
    upper: &[f64],
    values: &[f64],
    ids: &[u32],
    dir: Direction,
) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    sort_outcomes(&mut order, values, ids, dir);
    let mass = crate::model::greedy_extreme(&order, lower, upper);
    let objective = mass.iter().zip(values).map(|(m, v)| m * v).sum();
    (mass, objective)
}

/// [`inner_extreme`] on an interval distribution; ties go to outcome order.
pub fn inner_extreme_of<O: Clone>(
    d: &IntervalDistribution<O>,
    value: impl Fn(&O) -> f64,
    dir: Direction,
) -> (Vec<(O, f64)>, f64) {
    let e = d.entries();
    let lower: Vec<f64> = e.iter().map(|x| prob_to_f64(&x.lower)).collect();
    let upper: Vec<f64> = e.iter().map(|x| prob_to_f64(&x.upper)).collect();
    let values: Vec<f64> = e.iter().map(|x| value(&x.outcome)).collect();
    let ids: Vec<u32> = (0..e.len() as u32).collect();
    let (mass, objective) = inner_extreme(&lower, &upper, &values, &ids, dir);
    let dist = e.iter().map(|x| x.outcome.clone()).zip(mass).collect();
    (dist, objective)
}

fn sort_outcomes(order: &mut [usize], values: &[f64], ids: &[u32], dir: Direction) {
    order.sort_by(|&a, &b| {
        let by_value = match dir {
            Direction::Max => values[b].total_cmp(&values[a]),
            Direction::Min => values[a].total_cmp(&values[b]),
        };
        by_value.then(ids[a].cmp(&ids[b]))
    });
}

/// Per-choice data flattened for the iteration loop.
struct Choices<'a> {
    m: &'a Imdp,
    /// Every transition of the choice has a point interval.
    fixed: Vec<bool>,
}

impl<'a> Choices<'a> {
    fn new(m: &'a Imdp) -> Self {
        let fixed = (0..m.num_choices())
            .map(|c| {
                m.transitions(c).all(|t| {
                    let (l, u) = m.bounds_f64[m.trans_bound[t] as usize];
                    l == u
                })
            })
            .collect();
        Choices { m, fixed }
    }

    /// Expected value of choice `c` under the extreme distribution.
    fn value(&self, c: usize, x: &[f64], dir: Direction, buf: &mut Vec<(f64, u32, f64, f64)>) -> f64 {
        let m = self.m;
        let ts = m.transitions(c);
        if self.fixed[c] {
            return ts
                .map(|t| m.bounds_f64[m.trans_bound[t] as usize].0 * x[m.trans_target[t] as usize])
                .sum();
        }
        buf.clear();
        let mut rest_lower = 0.0;
        for t in ts {
            let tgt = m.trans_target[t];
            let (l, u) = m.bounds_f64[m.trans_bound[t] as usize];
            rest_lower += l;
            buf.push((x[tgt as usize], tgt, l, u));
        }
        buf.sort_by(|a, b| {
            let by_value = match dir {
                Direction::Max => b.0.total_cmp(&a.0),
                Direction::Min => a.0.total_cmp(&b.0),
            };
            by_value.then(a.1.cmp(&b.1))
        });
        let mut assigned = 0.0;
        let mut total = 0.0;
        for &(v, _, l, u) in buf.iter() {
            rest_lower -= l;
            let mass = u.min(1.0 - assigned - rest_lower).max(0.0);
            assigned += mass;
            total += mass * v;
        }
        total
    }

    fn best(&self, s: usize, x: &[f64], dir: Direction, buf: &mut Vec<(f64, u32, f64, f64)>) -> f64 {
        let mut best: Option<f64> = None;
        for c in self.m.choices(s) {
            let v = self.value(c, x, dir, buf);
            best = Some(match (best, dir) {
                (None, _) => v,
                (Some(b), Direction::Max) => b.max(v),
                (Some(b), Direction::Min) => b.min(v),
            });
        }
        best.unwrap_or(0.0)
    }
}

fn change(old: f64, new: f64, criterion: Criterion) -> f64 {
    let d = (new - old).abs();
    match criterion {
        Criterion::Absolute => d,
        Criterion::Relative if new != 0.0 => d / new.abs(),
        Criterion::Relative => d,
    }
}

/// Probability of reaching `target`, optimized over all resolutions of
/// nondeterminism and interval uncertainty.
///
/// With `constrain`, states outside `constrain` and `target` count as failed
/// (until semantics).
pub fn value_iteration(
    m: &Imdp,
    target: &[bool],
    dir: Direction,
    constrain: Option<&[bool]>,
    settings: &SolveSettings,
) -> Result<SolveResult, SolveError> {
    let n = m.num_states();
    for set in std::iter::once(target).chain(constrain) {
        if set.len() != n {
            return Err(SolveError::StateSetSize {
                expected: n,
                got: set.len(),
            });
        }
    }
    if settings.epsilon.is_nan() || settings.epsilon <= 0.0 || settings.max_iterations == 0 {
        return Err(SolveError::InvalidSettings);
    }
    let no = unreachable_set(m, target, constrain);
    let mut x: Vec<f64> = target.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect();
    let undecided: Vec<bool> = (0..n).map(|s| !target[s] && !no[s]).collect();
    let choices = Choices::new(m);
    let (iterations, converged) = match settings.method {
        Method::Jacobi => jacobi(&choices, &mut x, &undecided, dir, settings),
        Method::Topological => topological(&choices, &mut x, &undecided, dir, settings),
    };
    let init = m.initial.iter().map(|&s| x[s as usize]);
    let initial_value = match dir {
        Direction::Max => init.fold(0.0, f64::max),
        Direction::Min => init.fold(1.0, f64::min),
    };
    Ok(SolveResult {
        initial_value,
        values: x,
        iterations,
        converged,
    })
}

fn jacobi(
    ch: &Choices,
    x: &mut Vec<f64>,
    undecided: &[bool],
    dir: Direction,
    settings: &SolveSettings,
) -> (usize, bool) {
    let states: Vec<usize> = (0..x.len()).filter(|&s| undecided[s]).collect();
    let mut next = x.clone();
    let mut buf = Vec::new();
    for iter in 1..=settings.max_iterations {
        let mut delta: f64 = 0.0;
        for &s in &states {
            let v = ch.best(s, x, dir, &mut buf);
            delta = delta.max(change(x[s], v, settings.criterion));
            next[s] = v;
        }
        std::mem::swap(x, &mut next);
        if delta < settings.epsilon {
            return (iter, true);
        }
    }
    (settings.max_iterations, false)
}

fn topological(
    ch: &Choices,
    x: &mut [f64],
    undecided: &[bool],
    dir: Direction,
    settings: &SolveSettings,
) -> (usize, bool) {
    let m = ch.m;
    let n = x.len();
    // Successor lists restricted to undecided states.
    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets = Vec::new();
    offsets.push(0u32);
    for s in 0..n {
        if undecided[s] {
            for c in m.choices(s) {
                for t in m.transitions(c) {
                    let t = m.trans_target[t];
                    if undecided[t as usize] {
                        targets.push(t);
                    }
                }
            }
        }
        offsets.push(targets.len() as u32);
    }
    let (order, starts) = tarjan(&offsets, &targets, undecided);
    let mut max_iters = 0;
    let mut converged = true;
    let mut buf = Vec::new();
    let mut next: Vec<f64> = Vec::new();
    for w in starts.windows(2) {
        let comp = &order[w[0] as usize..w[1] as usize];
        let s0 = comp[0] as usize;
        let self_loop = targets[offsets[s0] as usize..offsets[s0 + 1] as usize].contains(&comp[0]);
        if comp.len() == 1 && !self_loop {
            x[s0] = ch.best(s0, x, dir, &mut buf);
            max_iters = max_iters.max(1);
            continue;
        }
        let mut done = false;
        let mut iter = 0;
        while iter < settings.max_iterations {
            iter += 1;
            next.clear();
            let mut delta: f64 = 0.0;
            for &s in comp {
                let v = ch.best(s as usize, x, dir, &mut buf);
                delta = delta.max(change(x[s as usize], v, settings.criterion));
                next.push(v);
            }
            for (&s, &v) in comp.iter().zip(&next) {
                x[s as usize] = v;
            }
            if delta < settings.epsilon {
                done = true;
                break;
            }
        }
        max_iters = max_iters.max(iter);
        converged &= done;
    }
    (max_iters, converged)
}

/// Strongly connected components of the included states, each listed before
/// any component that can reach it. Returns the states grouped by component
/// and the component boundaries.
fn tarjan(offsets: &[u32], targets: &[u32], include: &[bool]) -> (Vec<u32>, Vec<u32>) {
    const NONE: u32 = u32::MAX;
    let n = include.len();
    let mut index = vec![NONE; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut order = Vec::new();
    let mut starts = vec![0u32];
    let mut counter = 0u32;
    // (state, position of the next successor to visit)
    let mut call: Vec<(u32, u32)> = Vec::new();
    for root in 0..n {
        if !include[root] || index[root] != NONE {
            continue;
        }
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root as u32);
        on_stack[root] = true;
        call.push((root as u32, offsets[root]));
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let v = v as usize;
            if *pos < offsets[v + 1] {
                let w = targets[*pos as usize] as usize;
                *pos += 1;
                if index[w] == NONE {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    call.push((w as u32, offsets[w]));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent as usize] = low[parent as usize].min(low[v]);
            }
            if low[v] == index[v] {
                let begin = order.len();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w as usize] = false;
                    order.push(w);
                    if w as usize == v {
                        break;
                    }
                }
                order[begin..].sort_unstable();
                starts.push(order.len() as u32);
            }
        }
    }
    (order, starts)
}

/// Answer to a query: the optimum asked for, or a threshold verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub direction: Direction,
    pub value: f64,
    /// `Some` for threshold queries.
    pub verdict: Option<bool>,
    pub result: SolveResult,
}

/// Values this close to a threshold count as equal to it.
pub const THRESHOLD_TOLERANCE: f64 = 1e-9;

/// Direction whose value decides a query: thresholds from below (`>`, `>=`)
/// need the minimum, thresholds from above the maximum.
pub fn direction_for(mode: &QueryMode) -> Direction {
    match mode {
        QueryMode::Min => Direction::Min,
        QueryMode::Max => Direction::Max,
        QueryMode::Threshold { op, .. } => match op {
            CmpOp::Ge | CmpOp::Gt => Direction::Min,
            CmpOp::Le | CmpOp::Lt => Direction::Max,
        },
    }
}

/// Evaluates a query on a state space built for it.
pub fn check(m: &Imdp, mode: &QueryMode, settings: &SolveSettings) -> Result<CheckResult, SolveError> {
    let target = m.target.as_deref().ok_or(SolveError::MissingTarget)?;
    let direction = direction_for(mode);
    let result = value_iteration(m, target, direction, m.left.as_deref(), settings)?;
    let value = result.initial_value;
    let verdict = match mode {
        QueryMode::Threshold { op, bound } => {
            let b = prob_to_f64(bound);
            Some(if (value - b).abs() <= THRESHOLD_TOLERANCE {
                !op.is_strict()
            } else {
                op.holds(value, b)
            })
        }
        _ => None,
    };
    Ok(CheckResult {
        direction,
        value,
        verdict,
        result,
    })
}

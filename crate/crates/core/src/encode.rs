//! Turning an interval automaton into ordinary probabilistic ones.
//!
//! [`pta_star`] replaces every interval edge by one point edge per extreme
//! distribution of its bounds, which preserves minimal and maximal
//! reachability. [`sample`] instead fixes one distribution per edge, which
//! gives a single probabilistic automaton inside the interval family.

use num_traits::{One, Zero};

use crate::model::{greedy_extreme, Edge, EdgeOutcome, Ipta, IntervalDistribution, Prob};

/// Largest support for which all orderings are enumerated (8! = 40320).
pub const DEFAULT_SUPPORT_LIMIT: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("edge {edge} has {size} outcomes; enumerating orderings is limited to {limit}")]
    SupportTooLarge {
        edge: String,
        size: usize,
        limit: usize,
    },
    #[error("chosen probability {value} for outcome {outcome} of edge {edge} lies outside [{lower}, {upper}]")]
    NonConforming {
        edge: String,
        outcome: String,
        value: String,
        lower: String,
        upper: String,
    },
    #[error("chosen probabilities for edge {edge} sum to {sum}, not 1")]
    NonNormalized { edge: String, sum: String },
    #[error("edge {edge} has {got} outcomes but {expected} probabilities were given")]
    WrongLength {
        edge: String,
        expected: usize,
        got: usize,
    },
    #[error("interval edge {edge} has no chosen distribution")]
    MissingChoice { edge: String },
    #[error("expected one choice per edge ({expected}), got {got}")]
    ChoiceCount { expected: usize, got: usize },
    #[error("interval edge {edge} has {size} outcomes; a single value only fixes two-outcome edges")]
    UnsupportedArity { edge: String, size: usize },
}

/// Rearranges `p` into the next lexicographic permutation; false after the last.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Distinct greedy extreme distributions over all orderings of the support,
/// in order of first appearance (orderings enumerated lexicographically).
pub fn extreme_distributions<O>(d: &IntervalDistribution<O>) -> Vec<Vec<Prob>> {
    let lower: Vec<Prob> = d.entries().iter().map(|e| e.lower.clone()).collect();
    let upper: Vec<Prob> = d.entries().iter().map(|e| e.upper.clone()).collect();
    if d.is_point_interval() {
        return vec![lower];
    }
    let mut order: Vec<usize> = (0..lower.len()).collect();
    let mut found: Vec<Vec<Prob>> = Vec::new();
    loop {
        let mu = greedy_extreme(&order, &lower, &upper);
        if !found.contains(&mu) {
            found.push(mu);
        }
        if !next_permutation(&mut order) {
            return found;
        }
    }
}

/// The exact encoding: one point-interval edge per distinct extreme
/// distribution of each edge. Identical distributions produced for the same
/// source, guard and action are emitted once.
pub fn pta_star(m: &Ipta, support_limit: usize) -> Result<Ipta, EncodeError> {
    let mut edges: Vec<Edge> = Vec::new();
    for ids in m.edges_by_source() {
        let first = edges.len();
        for i in ids {
            let e = &m.edges[i];
            let size = e.distribution.len();
            if size > support_limit && !e.distribution.is_point_interval() {
                return Err(EncodeError::SupportTooLarge {
                    edge: e.origin.clone(),
                    size,
                    limit: support_limit,
                });
            }
            for mu in extreme_distributions(&e.distribution) {
                let distribution = IntervalDistribution::from_probabilities(
                    e.distribution
                        .entries()
                        .iter()
                        .map(|x| x.outcome)
                        .zip(mu),
                );
                let duplicate = edges[first..].iter().any(|f| {
                    f.guard == e.guard && f.action == e.action && f.distribution == distribution
                });
                if !duplicate {
                    edges.push(Edge {
                        distribution,
                        ..e.clone()
                    });
                }
            }
        }
    }
    Ok(Ipta {
        edges,
        ..m.clone()
    })
}

fn describe_outcome(m: &Ipta, o: &EdgeOutcome) -> String {
    let mut s = m.describe_location(o.target);
    if !o.resets.is_empty() {
        let names: Vec<&str> = o.resets.iter().map(|c| m.clocks[c.index()].as_str()).collect();
        s.push_str(&format!(" resetting {}", names.join(",")));
    }
    s
}

/// Fixes one distribution per edge. `choices[i]` gives probabilities for the
/// outcomes of edge `i` in entry order; `None` is allowed only for edges whose
/// intervals are already points.
pub fn sample(m: &Ipta, choices: &[Option<Vec<Prob>>]) -> Result<Ipta, EncodeError> {
    if choices.len() != m.edges.len() {
        return Err(EncodeError::ChoiceCount {
            expected: m.edges.len(),
            got: choices.len(),
        });
    }
    let mut edges = Vec::with_capacity(m.edges.len());
    for (e, choice) in m.edges.iter().zip(choices) {
        let entries = e.distribution.entries();
        let Some(mu) = choice else {
            if !e.distribution.is_point_interval() {
                return Err(EncodeError::MissingChoice {
                    edge: e.origin.clone(),
                });
            }
            edges.push(e.clone());
            continue;
        };
        if mu.len() != entries.len() {
            return Err(EncodeError::WrongLength {
                edge: e.origin.clone(),
                expected: entries.len(),
                got: mu.len(),
            });
        }
        for (x, p) in entries.iter().zip(mu) {
            if p < &x.lower || p > &x.upper {
                return Err(EncodeError::NonConforming {
                    edge: e.origin.clone(),
                    outcome: describe_outcome(m, &x.outcome),
                    value: crate::model::fmt_prob(p),
                    lower: crate::model::fmt_prob(&x.lower),
                    upper: crate::model::fmt_prob(&x.upper),
                });
            }
        }
        let sum: Prob = mu.iter().sum();
        if !sum.is_one() {
            return Err(EncodeError::NonNormalized {
                edge: e.origin.clone(),
                sum: crate::model::fmt_prob(&sum),
            });
        }
        let distribution = IntervalDistribution::from_probabilities(
            entries.iter().map(|x| x.outcome).zip(mu.iter().cloned()),
        );
        edges.push(Edge {
            distribution,
            ..e.clone()
        });
    }
    Ok(Ipta {
        edges,
        ..m.clone()
    })
}

/// Samples every interval edge with `y` on its first outcome and `1 - y` on
/// its second. Every interval edge must have exactly two outcomes.
pub fn scalar_sample(m: &Ipta, y: &Prob) -> Result<Ipta, EncodeError> {
    let mut choices = Vec::with_capacity(m.edges.len());
    for e in &m.edges {
        if e.distribution.is_point_interval() {
            choices.push(None);
            continue;
        }
        if e.distribution.len() != 2 {
            return Err(EncodeError::UnsupportedArity {
                edge: e.origin.clone(),
                size: e.distribution.len(),
            });
        }
        choices.push(Some(vec![y.clone(), Prob::one() - y]));
    }
    sample(m, &choices)
}

/// The distribution placing every outcome at the same relative position
/// `alpha` between its bounds, with `alpha` chosen so the total is 1.
pub fn proportional_choice<O>(d: &IntervalDistribution<O>) -> Vec<Prob> {
    let lo = d.sum_lower();
    let hi = d.sum_upper();
    let span = &hi - &lo;
    let alpha = if span.is_zero() {
        Prob::zero()
    } else {
        (Prob::one() - &lo) / span
    };
    d.entries()
        .iter()
        .map(|e| &e.lower + &alpha * (&e.upper - &e.lower))
        .collect()
}

/// [`sample`] with [`proportional_choice`] on every interval edge.
pub fn proportional_sample(m: &Ipta) -> Result<Ipta, EncodeError> {
    let choices: Vec<Option<Vec<Prob>>> = m
        .edges
        .iter()
        .map(|e| (!e.distribution.is_point_interval()).then(|| proportional_choice(&e.distribution)))
        .collect();
    sample(m, &choices)
}

//! Parallel composition of interval automata.
//!
//! Shared actions synchronize every component that knows them, with guards
//! conjoined and distributions multiplied bound by bound. Other actions
//! interleave: the idle partner stays put with probability exactly one.
//! Only location pairs reachable from the initial pairs are kept.

use std::collections::{HashMap, VecDeque};

use crate::model::{Edge, EdgeOutcome, Ipta, LocId, Location};
use crate::model::clock::MAX_CLOCKS;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ComposeError {
    #[error("clock `{0}` is declared by more than one component")]
    ClockNameClash(String),
    #[error("variable `{0}` is declared by more than one component")]
    VariableNameClash(String),
    #[error("composition has {0} clocks; at most 64 are supported")]
    TooManyClocks(usize),
    #[error("nothing to compose")]
    Empty,
}

pub fn compose(a: &Ipta, b: &Ipta) -> Result<Ipta, ComposeError> {
    if let Some(c) = a.clocks.iter().find(|c| b.clocks.contains(c)) {
        return Err(ComposeError::ClockNameClash(c.clone()));
    }
    if let Some(v) = a.variables.iter().find(|v| b.variables.contains(v)) {
        return Err(ComposeError::VariableNameClash(v.clone()));
    }
    let total_clocks = a.clocks.len() + b.clocks.len();
    if total_clocks > MAX_CLOCKS {
        return Err(ComposeError::TooManyClocks(total_clocks));
    }
    let shift = a.clocks.len() as u16;
    let a_edges = a.edges_by_source();
    let b_edges = b.edges_by_source();

    let mut index: HashMap<(LocId, LocId), LocId> = HashMap::new();
    let mut pairs: Vec<(LocId, LocId)> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |p: (LocId, LocId), pairs: &mut Vec<(LocId, LocId)>, queue: &mut VecDeque<LocId>| {
        *index.entry(p).or_insert_with(|| {
            let id = LocId(pairs.len() as u32);
            pairs.push(p);
            queue.push_back(id);
            id
        })
    };
    let mut initial = Vec::new();
    for &la in &a.initial {
        for &lb in &b.initial {
            initial.push(intern((la, lb), &mut pairs, &mut queue));
        }
    }

    let mut edges = Vec::new();
    while let Some(id) = queue.pop_front() {
        let (la, lb) = pairs[id.index()];
        for &ei in &a_edges[la.index()] {
            let e = &a.edges[ei];
            if b.actions.contains(&e.action) {
                for &ej in &b_edges[lb.index()] {
                    let f = &b.edges[ej];
                    if f.action != e.action {
                        continue;
                    }
                    let distribution = e.distribution.product(&f.distribution, |x, y| {
                        (x.resets.union(y.resets.shifted(shift)), (x.target, y.target))
                    });
                    let distribution = distribution.map_outcomes(|(resets, p)| EdgeOutcome {
                        resets: *resets,
                        target: intern(*p, &mut pairs, &mut queue),
                    });
                    edges.push(Edge {
                        source: id,
                        guard: e.guard.and(&f.guard.shifted(shift)),
                        action: e.action.clone(),
                        distribution,
                        origin: format!("{} || {}", e.origin, f.origin),
                    });
                }
            } else {
                let distribution = e.distribution.map_outcomes(|o| EdgeOutcome {
                    resets: o.resets,
                    target: intern((o.target, lb), &mut pairs, &mut queue),
                });
                edges.push(Edge {
                    source: id,
                    guard: e.guard.clone(),
                    action: e.action.clone(),
                    distribution,
                    origin: e.origin.clone(),
                });
            }
        }
        for &ej in &b_edges[lb.index()] {
            let f = &b.edges[ej];
            if a.actions.contains(&f.action) {
                continue;
            }
            let distribution = f.distribution.map_outcomes(|o| EdgeOutcome {
                resets: o.resets.shifted(shift),
                target: intern((la, o.target), &mut pairs, &mut queue),
            });
            edges.push(Edge {
                source: id,
                guard: f.guard.shifted(shift),
                action: f.action.clone(),
                distribution,
                origin: f.origin.clone(),
            });
        }
    }

    let locations = pairs
        .iter()
        .map(|&(la, lb)| {
            let mut values = a.locations[la.index()].values.clone();
            values.extend_from_slice(&b.locations[lb.index()].values);
            Location { values }
        })
        .collect();
    let invariants = pairs
        .iter()
        .map(|&(la, lb)| {
            a.invariants[la.index()].and(&b.invariants[lb.index()].shifted(shift))
        })
        .collect();
    let labels = pairs
        .iter()
        .map(|&(la, lb)| {
            a.labels[la.index()]
                .union(&b.labels[lb.index()])
                .cloned()
                .collect()
        })
        .collect();
    Ok(Ipta {
        variables: a.variables.iter().chain(&b.variables).cloned().collect(),
        locations,
        initial,
        actions: a.actions.union(&b.actions).cloned().collect(),
        clocks: a.clocks.iter().chain(&b.clocks).cloned().collect(),
        invariants,
        edges,
        labels,
    })
}

/// Left fold of [`compose`] over the components in order.
pub fn compose_all(components: &[Ipta]) -> Result<Ipta, ComposeError> {
    let (first, rest) = components.split_first().ok_or(ComposeError::Empty)?;
    let mut acc = first.clone();
    for c in rest {
        acc = compose(&acc, c)?;
    }
    Ok(acc)
}

//! Interval probabilistic timed automata with explicit locations.

use std::collections::BTreeSet;
use std::fmt;

use super::clock::{ClockConstraint, ClockId, ClockSet};
use super::interval::{IntervalDistribution, Violation};

/// Index of a location inside an [`Ipta`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocId(pub u32);

impl LocId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Edge label. Internal actions come from unlabeled commands and never synchronize.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Named(String),
    Internal { module: String, index: usize },
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Named(n) => f.write_str(n),
            Action::Internal { module, index } => write!(f, "tau.{module}.{index}"),
        }
    }
}

/// A location: one valuation of the automaton's discrete variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Location {
    pub values: Vec<i64>,
}

/// Branch of a probabilistic edge: clocks to reset and the target location.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeOutcome {
    pub resets: ClockSet,
    pub target: LocId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: LocId,
    pub guard: ClockConstraint,
    pub action: Action,
    pub distribution: IntervalDistribution<EdgeOutcome>,
    /// Where the edge came from, for diagnostics (e.g. `Server#0`).
    pub origin: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ipta {
    /// Names of the discrete variables; each location holds one value per name.
    pub variables: Vec<String>,
    pub locations: Vec<Location>,
    pub initial: Vec<LocId>,
    pub actions: BTreeSet<Action>,
    pub clocks: Vec<String>,
    pub invariants: Vec<ClockConstraint>,
    pub edges: Vec<Edge>,
    pub labels: Vec<BTreeSet<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum IptaError {
    #[error("edge {origin} has an invalid distribution: {violation}")]
    InvalidDistribution { origin: String, violation: Violation },
    #[error("clock #{clock} is not declared (automaton has {declared} clocks)")]
    UndeclaredClock { clock: u16, declared: usize },
    #[error("location {0} is out of range")]
    UnknownLocation(u32),
    #[error("no initial location")]
    NoInitialLocation,
    #[error("per-location tables have inconsistent lengths")]
    InconsistentTables,
    #[error("too many clocks ({0}); at most 64 are supported")]
    TooManyClocks(usize),
}

impl Ipta {
    pub fn location_count(&self) -> usize {
        self.locations.len()
    }

    pub fn clock_id(&self, name: &str) -> Option<ClockId> {
        self.clocks
            .iter()
            .position(|c| c == name)
            .map(|i| ClockId(i as u16))
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Edge indices grouped by source location.
    pub fn edges_by_source(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.locations.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.source.index()].push(i);
        }
        out
    }

    pub fn has_strict_constraints(&self) -> bool {
        self.invariants.iter().any(|c| c.has_strict()) || self.edges.iter().any(|e| e.guard.has_strict())
    }

    pub fn has_diagonal_constraints(&self) -> bool {
        self.invariants.iter().any(|c| c.has_diagonal())
            || self.edges.iter().any(|e| e.guard.has_diagonal())
    }

    /// Checks the structural invariants: declared clocks, known locations, valid distributions.
    pub fn validate(&self) -> Result<(), IptaError> {
        let n = self.locations.len();
        if self.clocks.len() > super::clock::MAX_CLOCKS {
            return Err(IptaError::TooManyClocks(self.clocks.len()));
        }
        if self.invariants.len() != n || self.labels.len() != n {
            return Err(IptaError::InconsistentTables);
        }
        if self.initial.is_empty() {
            return Err(IptaError::NoInitialLocation);
        }
        let loc_ok = |l: LocId| {
            if l.index() < n {
                Ok(())
            } else {
                Err(IptaError::UnknownLocation(l.0))
            }
        };
        for &l in &self.initial {
            loc_ok(l)?;
        }
        let declared = self.clocks.len();
        let clock_ok = |c: ClockId| {
            if c.index() < declared {
                Ok(())
            } else {
                Err(IptaError::UndeclaredClock {
                    clock: c.0,
                    declared,
                })
            }
        };
        let constraint_ok = |z: &ClockConstraint| -> Result<(), IptaError> {
            for a in z.atoms() {
                match *a {
                    super::clock::ClockAtom::Single { clock, .. } => clock_ok(clock)?,
                    super::clock::ClockAtom::Diagonal { clock, other, .. } => {
                        clock_ok(clock)?;
                        clock_ok(other)?;
                    }
                }
            }
            Ok(())
        };
        for z in &self.invariants {
            constraint_ok(z)?;
        }
        let all_clocks = if declared == 64 {
            u64::MAX
        } else {
            (1u64 << declared) - 1
        };
        for e in &self.edges {
            loc_ok(e.source)?;
            constraint_ok(&e.guard)?;
            for o in e.distribution.outcomes() {
                loc_ok(o.target)?;
                if o.resets.0 & !all_clocks != 0 {
                    let bad = ClockSet(o.resets.0 & !all_clocks).iter().next().unwrap();
                    clock_ok(bad)?;
                }
            }
            e.distribution
                .validate()
                .map_err(|violation| IptaError::InvalidDistribution {
                    origin: e.origin.clone(),
                    violation,
                })?;
        }
        Ok(())
    }

    /// Human-readable `name=value` rendering of a location.
    pub fn describe_location(&self, l: LocId) -> String {
        self.variables
            .iter()
            .zip(&self.locations[l.index()].values)
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

//! Domain types: clocks and constraints, interval distributions, automata.

pub mod automaton;
pub mod clock;
pub mod interval;

pub use automaton::{Action, Edge, EdgeOutcome, Ipta, IptaError, LocId, Location};
pub use clock::{ClockAtom, ClockConstraint, ClockId, ClockSet, ClockValuation, CmpOp};
pub use interval::{
    fmt_prob, greedy_extreme, prob, prob_to_f64, Entry, IntervalDistribution,
    MinimalityCondition, MinimalityViolation, Prob, Violation,
};

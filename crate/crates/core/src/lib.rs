//! Model checking for interval probabilistic timed automata.
//!
//! The pipeline is: parse a model ([`lang`]), elaborate its modules into
//! automata, compose them ([`compose`]), build the finite interval MDP under
//! integer-time semantics ([`explore`]) and compute minimal or maximal
//! reachability probabilities by interval value iteration ([`solve`]).
//! [`encode`] turns an interval automaton into ordinary probabilistic ones,
//! either exactly (one branch per extreme distribution) or by sampling.

pub mod compose;
pub mod encode;
pub mod explore;
pub mod lang;
pub mod model;
pub mod pipeline;
pub mod solve;

pub use model::*;

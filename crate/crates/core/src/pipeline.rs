//! End-to-end helpers: model text to composed automaton, query to answer.

use std::time::{Duration, Instant};

use crate::compose::{compose_all, ComposeError};
use crate::encode::{self, EncodeError};
use crate::explore::{build_imdp, BuildOptions, ExploreError, Imdp};
use crate::lang::{self, CompiledQuery, LangError, Query, ResolvedModel, Value};
use crate::model::{Ipta, IptaError, Prob};
use crate::solve::{check, CheckResult, SolveError, SolveSettings};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Model(#[from] IptaError),
    #[error(transparent)]
    Explore(#[from] ExploreError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

/// A resolved model and the composition of its modules.
#[derive(Clone, Debug)]
pub struct System {
    pub model: ResolvedModel,
    pub automaton: Ipta,
}

impl System {
    pub fn parse(text: &str, bindings: &[(String, Value)]) -> Result<System, Error> {
        let src = lang::parse_model(text)?;
        let model = lang::resolve(&src, bindings)?;
        let mut automaton = compose_all(&model.modules)?;
        model.apply_labels(&mut automaton)?;
        automaton.validate()?;
        Ok(System { model, automaton })
    }

    pub fn compile(&self, q: &Query) -> Result<CompiledQuery, Error> {
        Ok(lang::compile_query(q, &self.automaton, &self.model)?)
    }

    /// The same model with its automaton transformed for `engine`.
    pub fn encoded(&self, engine: &Engine) -> Result<System, Error> {
        let automaton = match engine {
            Engine::Ipta => self.automaton.clone(),
            Engine::PtaStar => encode::pta_star(&self.automaton, encode::DEFAULT_SUPPORT_LIMIT)?,
            Engine::Sample(None) => encode::proportional_sample(&self.automaton)?,
            Engine::Sample(Some(y)) => encode::scalar_sample(&self.automaton, y)?,
        };
        Ok(System {
            model: self.model.clone(),
            automaton,
        })
    }
}

/// How interval edges are treated before exploration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Solve the interval MDP directly.
    Ipta,
    /// Expand each edge into its extreme distributions.
    PtaStar,
    /// Fix one distribution per edge: `y` and `1 - y` on two-outcome edges,
    /// or, without a value, the same relative position between the bounds on
    /// every outcome.
    Sample(Option<Prob>),
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Ipta => "ipta",
            Engine::PtaStar => "ptastar",
            Engine::Sample(_) => "sample",
        }
    }
}

/// Answer to one query together with the size of the state space behind it.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub check: CheckResult,
    pub imdp: Imdp,
    pub build_time: Duration,
    pub solve_time: Duration,
}

/// Encodes, explores and solves one query.
pub fn run_query(
    system: &System,
    engine: &Engine,
    query: &Query,
    build: &BuildOptions,
    settings: &SolveSettings,
) -> Result<Outcome, Error> {
    let start = Instant::now();
    let encoded = system.encoded(engine)?;
    let compiled = encoded.compile(query)?;
    let imdp = build_imdp(&encoded.automaton, Some(&compiled), build)?;
    let build_time = start.elapsed();
    let start = Instant::now();
    let check = check(&imdp, &query.mode, settings)?;
    Ok(Outcome {
        check,
        imdp,
        build_time,
        solve_time: start.elapsed(),
    })
}

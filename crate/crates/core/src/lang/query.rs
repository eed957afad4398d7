//! Binding a parsed query to a composed automaton.

use std::collections::BTreeSet;

use super::ast::{Expr, Query, QueryMode};
use super::error::{LangError, LangErrorKind};
use super::eval::{formula, ClockFormula};
use super::resolve::{ResolvedModel, SystemScope};
use crate::model::{ClockId, Ipta, LocId};

/// A query whose predicates have been evaluated at every location of the system.
#[derive(Clone, Debug)]
pub struct CompiledQuery {
    pub query: Query,
    /// Name of the formula clock, which gets the clock id right after the system's clocks.
    pub formula_clock: Option<String>,
    /// Per-location target condition over clocks.
    pub target: Vec<ClockFormula>,
    /// Per-location left side of an until, if any.
    pub left: Option<Vec<ClockFormula>>,
}

impl CompiledQuery {
    pub fn mode(&self) -> &QueryMode {
        &self.query.mode
    }
}

fn known_name(name: &str, system: &Ipta, model: &ResolvedModel, labels: &BTreeSet<String>) -> bool {
    system.variable_index(name).is_some()
        || system.clock_id(name).is_some()
        || model.constants.contains_key(name)
        || labels.contains(name)
}

/// Resolves names in `q` against `system` and evaluates its predicates per location.
///
/// An undeclared name used in the query is taken to be the formula clock when it is
/// the only one; `z.` prefixes declare it explicitly.
pub fn compile_query(
    q: &Query,
    system: &Ipta,
    model: &ResolvedModel,
) -> Result<CompiledQuery, LangError> {
    let labels = model.label_names();
    let mut unknown: Vec<(String, super::error::Pos)> = Vec::new();
    let mut visit = |e: &Expr| {
        e.for_each_ident(&mut |n, p| {
            if !known_name(n, system, model, &labels)
                && q.formula_clock.as_deref() != Some(n)
                && !unknown.iter().any(|(u, _)| u == n)
            {
                unknown.push((n.to_string(), p));
            }
        })
    };
    if let Some(l) = &q.left {
        visit(l);
    }
    visit(&q.target);
    let formula_clock = match (&q.formula_clock, unknown.as_slice()) {
        (Some(z), []) => {
            if known_name(z, system, model, &labels) {
                return Err(LangError::nowhere(LangErrorKind::DuplicateDeclaration(
                    z.clone(),
                )));
            }
            Some(z.clone())
        }
        (None, []) => None,
        (None, [(z, _)]) => Some(z.clone()),
        (_, [.., (n, p)]) => {
            return Err(LangError::new(
                LangErrorKind::UnknownIdentifier(n.clone()),
                *p,
            ))
        }
    };
    let z_id = ClockId(system.clocks.len() as u16);
    let eval_all = |e: &Expr| -> Result<Vec<ClockFormula>, LangError> {
        (0..system.locations.len())
            .map(|l| {
                let scope = SystemScope {
                    model: system,
                    constants: &model.constants,
                    location: LocId(l as u32),
                    extra_clock: formula_clock.as_deref().map(|z| (z, z_id)),
                    label_names: &labels,
                };
                formula(e, &scope)
            })
            .collect()
    };
    let target = eval_all(&q.target)?;
    let left = q.left.as_ref().map(eval_all).transpose()?;
    Ok(CompiledQuery {
        query: q.clone(),
        formula_clock,
        target,
        left,
    })
}

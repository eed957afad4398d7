//! Minimality of command distributions at the source level.

use std::collections::BTreeMap;

use super::ast::{Expr, ModelSource};
use super::error::{LangError, LangErrorKind, Pos};
use super::eval::{eval, Value};
use super::resolve::ConstScope;
use crate::model::{IntervalDistribution, MinimalityViolation, Prob};

/// Minimality verdict for one command.
#[derive(Clone, Debug)]
pub struct CommandReport {
    pub module: String,
    /// Position of the command among the module's commands.
    pub index: usize,
    pub pos: Pos,
    /// Bounds per alternative, before pruning.
    pub bounds: Vec<(Prob, Prob)>,
    /// Violations; `entry` is the alternative index.
    pub violations: Vec<MinimalityViolation>,
    /// Bounds per alternative after pruning.
    pub pruned: Vec<(Prob, Prob)>,
}

fn bounds_of(e: &Expr, scope: &ConstScope) -> Result<(Prob, Prob), LangError> {
    let number = |e: &Expr| -> Result<Prob, LangError> {
        let v = eval(e, scope)?;
        v.to_rational().ok_or_else(|| {
            LangError::at(
                LangErrorKind::Type(format!("probability must be a number, got {v}")),
                e.pos(),
            )
        })
    };
    match e {
        Expr::Interval(lo, hi) => Ok((number(lo)?, number(hi)?)),
        _ => {
            let p = number(e)?;
            Ok((p.clone(), p))
        }
    }
}

/// Checks every probabilistic command of `src` for minimality.
///
/// Probabilities must be computable from the constants alone; commands whose
/// bounds depend on variables are reported as unsupported.
pub fn check_commands(
    src: &ModelSource,
    constants: &BTreeMap<String, Value>,
) -> Result<Vec<CommandReport>, LangError> {
    let scope = ConstScope { values: constants };
    let mut out = Vec::new();
    for m in &src.modules {
        for (index, c) in m.commands.iter().enumerate() {
            if c.alternatives.iter().all(|a| a.prob.is_none()) {
                continue;
            }
            let mut bounds = Vec::new();
            for a in &c.alternatives {
                bounds.push(match &a.prob {
                    Some(e) => bounds_of(e, &scope).map_err(|err| match err.kind {
                        LangErrorKind::Type(_) => LangError::new(
                            LangErrorKind::Unsupported(format!(
                                "probabilities of command {}#{index} depend on variables",
                                m.name
                            )),
                            c.pos,
                        ),
                        _ => err,
                    })?,
                    None => (Prob::from_integer(1.into()), Prob::from_integer(1.into())),
                });
            }
            let d = IntervalDistribution::from_bounds(
                bounds.iter().cloned().enumerate().map(|(i, (l, u))| (i, l, u)),
            );
            let invalid = |v| {
                LangError::new(
                    LangErrorKind::InvalidDistribution {
                        command: format!("{}#{index}", m.name),
                        detail: format!("{v}"),
                    },
                    c.pos,
                )
            };
            let violations = d
                .minimality_violations()
                .map_err(invalid)?
                .into_iter()
                .map(|v| MinimalityViolation {
                    entry: d.entries()[v.entry].outcome,
                    ..v
                })
                .collect();
            let p = d.prune().map_err(invalid)?;
            let pruned = (0..bounds.len())
                .map(|i| match p.get(&i) {
                    Some(e) => (e.lower.clone(), e.upper.clone()),
                    None => (Prob::default(), Prob::default()),
                })
                .collect();
            out.push(CommandReport {
                module: m.name.clone(),
                index,
                pos: c.pos,
                bounds,
                violations,
                pruned,
            });
        }
    }
    Ok(out)
}

/// `src` with the probabilities of every non-minimal command replaced by its
/// pruned bounds, written as literal intervals.
pub fn apply_pruning(src: &ModelSource, reports: &[CommandReport]) -> ModelSource {
    let mut out = src.clone();
    for r in reports.iter().filter(|r| !r.violations.is_empty()) {
        let m = out.modules.iter_mut().find(|m| m.name == r.module).unwrap();
        for (alt, (lo, hi)) in m.commands[r.index].alternatives.iter_mut().zip(&r.pruned) {
            alt.prob = Some(Expr::Interval(
                Box::new(Expr::Rat(lo.clone())),
                Box::new(Expr::Rat(hi.clone())),
            ));
        }
    }
    out
}

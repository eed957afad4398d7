//! Elaboration of a parsed model into one automaton per module.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ast::*;
use super::error::{LangError, LangErrorKind, Pos};
use super::eval::{eval, formula, ClockFormula, Scope, Sym, Value};
use crate::model::{
    Action, ClockAtom, ClockConstraint, ClockId, ClockSet, CmpOp, Edge, EdgeOutcome,
    IntervalDistribution, Ipta, LocId, Location, Prob,
};
use crate::model::clock::MAX_CLOCKS;

/// A model with all constants fixed and every module elaborated.
#[derive(Clone, Debug)]
pub struct ResolvedModel {
    pub kind: ModelKind,
    pub constants: BTreeMap<String, Value>,
    pub modules: Vec<Ipta>,
    pub labels: Vec<LabelDecl>,
}

/// Parses `NAME=VALUE` command-line style bindings.
pub fn parse_binding(text: &str) -> Result<(String, Value), LangError> {
    let (name, value) = text.split_once('=').ok_or_else(|| {
        LangError::nowhere(LangErrorKind::Syntax(format!(
            "constant binding `{text}` is not of the form NAME=VALUE"
        )))
    })?;
    let expr = super::parser::parse_expr(value.trim())?;
    let v = super::eval::eval_closed(&expr).ok_or_else(|| {
        LangError::nowhere(LangErrorKind::Syntax(format!(
            "value of `{}` is not a constant expression",
            name.trim()
        )))
    })?;
    Ok((name.trim().to_string(), v))
}

pub(crate) struct ConstScope<'a> {
    pub(crate) values: &'a BTreeMap<String, Value>,
}

impl Scope for ConstScope<'_> {
    fn lookup(&self, name: &str, pos: Pos) -> Result<Sym, LangError> {
        match self.values.get(name) {
            Some(v) => Ok(Sym::Value(v.clone())),
            None => Err(LangError::new(
                LangErrorKind::Type(format!("`{name}` is not a constant")),
                pos,
            )),
        }
    }
}

fn coerce(ty: ConstType, name: &str, v: Value, pos: Pos) -> Result<Value, LangError> {
    match (ty, v) {
        (ConstType::Int, Value::Int(i)) => Ok(Value::Int(i)),
        (ConstType::Int, v @ Value::Rat(_)) => match v.as_int() {
            Some(i) => Ok(Value::Int(i)),
            None => Err(LangError::new(
                LangErrorKind::Type(format!("constant `{name}` is an int but got {v}")),
                pos,
            )),
        },
        (ConstType::Double, Value::Int(i)) => Ok(Value::Rat(BigRational::from_integer(i.into()))),
        (ConstType::Double, Value::Rat(r)) => Ok(Value::Rat(r)),
        (_, Value::Bool(_)) => Err(LangError::new(
            LangErrorKind::Type(format!("constant `{name}` cannot be a boolean")),
            pos,
        )),
    }
}

/// Evaluates all constants. Bindings take precedence over values in the file.
fn constants(
    src: &ModelSource,
    bindings: &[(String, Value)],
) -> Result<BTreeMap<String, Value>, LangError> {
    let decls: HashMap<&str, &ConstDecl> =
        src.constants.iter().map(|c| (c.name.as_str(), c)).collect();
    for (name, _) in bindings {
        if !decls.contains_key(name.as_str()) {
            return Err(LangError::nowhere(LangErrorKind::UnknownIdentifier(
                name.clone(),
            )));
        }
    }
    let bound: HashMap<&str, &Value> = bindings.iter().map(|(n, v)| (n.as_str(), v)).collect();
    let mut values = BTreeMap::new();
    // Constants may refer to each other in any order; repeat until no progress.
    let mut pending: Vec<&ConstDecl> = src.constants.iter().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut still = Vec::new();
        let mut last_err = None;
        for c in pending {
            let v = if let Some(v) = bound.get(c.name.as_str()) {
                (*v).clone()
            } else if let Some(e) = &c.value {
                match eval(e, &ConstScope { values: &values }) {
                    Ok(v) => v,
                    Err(err) => {
                        let waiting = mentions_pending(e, &values, &decls);
                        if waiting {
                            last_err = Some(err);
                            still.push(c);
                            continue;
                        }
                        return Err(err);
                    }
                }
            } else {
                return Err(LangError::new(
                    LangErrorKind::UnboundConstant(c.name.clone()),
                    c.pos,
                ));
            };
            values.insert(c.name.clone(), coerce(c.ty, &c.name, v, c.pos)?);
        }
        if still.len() == before {
            let c = still[0];
            return Err(last_err.unwrap_or_else(|| {
                LangError::new(
                    LangErrorKind::Type(format!("constant `{}` depends on itself", c.name)),
                    c.pos,
                )
            }));
        }
        pending = still;
    }
    Ok(values)
}

fn mentions_pending(
    e: &Expr,
    values: &BTreeMap<String, Value>,
    decls: &HashMap<&str, &ConstDecl>,
) -> bool {
    let mut found = false;
    e.for_each_ident(&mut |n, _| {
        if decls.contains_key(n) && !values.contains_key(n) {
            found = true;
        }
    });
    found
}

/// Scope of one module at one valuation of its variables.
struct ModuleScope<'a> {
    constants: &'a BTreeMap<String, Value>,
    vars: &'a HashMap<&'a str, usize>,
    clocks: &'a HashMap<&'a str, ClockId>,
    values: &'a [i64],
    module: &'a str,
}

impl Scope for ModuleScope<'_> {
    fn lookup(&self, name: &str, pos: Pos) -> Result<Sym, LangError> {
        if let Some(&i) = self.vars.get(name) {
            return Ok(Sym::Value(Value::Int(self.values[i])));
        }
        if let Some(&c) = self.clocks.get(name) {
            return Ok(Sym::Clock(c));
        }
        if let Some(v) = self.constants.get(name) {
            return Ok(Sym::Value(v.clone()));
        }
        Err(LangError::new(
            LangErrorKind::Unsupported(format!(
                "module {} refers to `{name}`, which belongs to another module",
                self.module
            )),
            pos,
        ))
    }
}

fn int_of(e: &Expr, scope: &dyn Scope, what: &str) -> Result<i64, LangError> {
    let v = eval(e, scope)?;
    v.as_int().ok_or_else(|| {
        LangError::at(
            LangErrorKind::Type(format!("{what} must be an integer, got {v}")),
            e.pos(),
        )
    })
}

fn prob_of(e: &Expr, scope: &dyn Scope) -> Result<Prob, LangError> {
    let v = eval(e, scope)?;
    v.to_rational().ok_or_else(|| {
        LangError::at(
            LangErrorKind::Type(format!("probability must be a number, got {v}")),
            e.pos(),
        )
    })
}

/// Conjunction required for invariants; `None` means unsatisfiable.
fn invariant_constraint(
    f: &ClockFormula,
    module: &str,
    describe: impl Fn() -> String,
    pos: Pos,
) -> Result<Option<ClockConstraint>, LangError> {
    let mut d = f.dnf();
    match d.len() {
        0 => Ok(None),
        1 => Ok(d.pop()),
        _ => Err(LangError::new(
            LangErrorKind::Unsupported(format!(
                "invariant of module {module} is a disjunction of clock constraints at {}",
                describe()
            )),
            pos,
        )),
    }
}

fn elaborate_module(
    m: &Module,
    constants: &BTreeMap<String, Value>,
) -> Result<Ipta, LangError> {
    if m.clocks.len() > MAX_CLOCKS {
        return Err(LangError::new(
            LangErrorKind::Unsupported(format!("module {} has more than {MAX_CLOCKS} clocks", m.name)),
            m.pos,
        ));
    }
    let cscope = ConstScope { values: constants };
    let mut ranges = Vec::new();
    let mut init = Vec::new();
    for v in &m.variables {
        let low = int_of(&v.low, &cscope, "range bound")?;
        let high = int_of(&v.high, &cscope, "range bound")?;
        if low > high {
            return Err(LangError::new(
                LangErrorKind::Type(format!("variable `{}` has empty range [{low}..{high}]", v.name)),
                v.pos,
            ));
        }
        let i = match &v.init {
            Some(e) => int_of(e, &cscope, "initial value")?,
            None => low,
        };
        if i < low || i > high {
            return Err(LangError::new(
                LangErrorKind::RangeOverflow {
                    var: v.name.clone(),
                    value: i,
                    low,
                    high,
                },
                v.pos,
            ));
        }
        ranges.push((low, high));
        init.push(i);
    }
    let vars: HashMap<&str, usize> = m
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    let clocks: HashMap<&str, ClockId> = m
        .clocks
        .iter()
        .enumerate()
        .map(|(i, c)| (c.name.as_str(), ClockId(i as u16)))
        .collect();

    let mut actions = BTreeSet::new();
    for (ci, c) in m.commands.iter().enumerate() {
        actions.insert(command_action(m, ci, c));
    }

    let mut index: HashMap<Vec<i64>, LocId> = HashMap::new();
    let mut locations: Vec<Location> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(init.clone(), LocId(0));
    locations.push(Location {
        values: init.clone(),
    });
    queue.push_back(LocId(0));
    let mut edges = Vec::new();
    let mut invariants = Vec::new();

    while let Some(l) = queue.pop_front() {
        let values = locations[l.index()].values.clone();
        let scope = ModuleScope {
            constants,
            vars: &vars,
            clocks: &clocks,
            values: &values,
            module: &m.name,
        };
        let describe = || {
            m.variables
                .iter()
                .zip(&values)
                .map(|(v, x)| format!("{}={x}", v.name))
                .collect::<Vec<_>>()
                .join(",")
        };
        let inv = match &m.invariant {
            None => ClockConstraint::tt(),
            Some(e) => {
                let f = formula(e, &scope)?;
                match invariant_constraint(&f, &m.name, describe, m.pos)? {
                    Some(c) => c,
                    None => match m.clocks.first() {
                        // No clock valuation satisfies x < 0.
                        Some(_) => ClockConstraint::from_atoms([ClockAtom::Single {
                            clock: ClockId(0),
                            op: CmpOp::Lt,
                            bound: 0,
                        }]),
                        None => {
                            return Err(LangError::new(
                                LangErrorKind::Unsupported(format!(
                                    "invariant of module {} is false at {}",
                                    m.name,
                                    describe()
                                )),
                                m.pos,
                            ))
                        }
                    },
                }
            }
        };
        invariants.push(inv);

        for (ci, c) in m.commands.iter().enumerate() {
            let guard = formula(&c.guard, &scope)?;
            let conjuncts = guard.dnf();
            if conjuncts.is_empty() {
                continue;
            }
            let origin = format!("{}#{} ({})", m.name, ci, c.pos);
            let mut bounds = Vec::with_capacity(c.alternatives.len());
            for alt in &c.alternatives {
                let (lo, hi) = match &alt.prob {
                    None => (Prob::one(), Prob::one()),
                    Some(Expr::Interval(a, b)) => (prob_of(a, &scope)?, prob_of(b, &scope)?),
                    Some(p) => {
                        let v = prob_of(p, &scope)?;
                        (v.clone(), v)
                    }
                };
                let bad = |detail: String| {
                    LangError::new(
                        LangErrorKind::InvalidDistribution {
                            command: origin.clone(),
                            detail,
                        },
                        c.pos,
                    )
                };
                if lo > hi {
                    return Err(bad(format!(
                        "interval lower bound {} exceeds upper bound {}",
                        crate::model::fmt_prob(&lo),
                        crate::model::fmt_prob(&hi)
                    )));
                }
                if lo < Prob::zero() || hi > Prob::one() {
                    return Err(bad(format!(
                        "bounds [{}, {}] are outside [0,1]",
                        crate::model::fmt_prob(&lo),
                        crate::model::fmt_prob(&hi)
                    )));
                }
                let mut target = values.clone();
                let mut resets = ClockSet::EMPTY;
                for a in &alt.assignments {
                    if let Some(&x) = clocks.get(a.target.as_str()) {
                        let v = eval(&a.value, &scope)?;
                        if v.to_rational() != Some(BigRational::zero()) {
                            return Err(LangError::new(
                                LangErrorKind::Unsupported(format!(
                                    "clock `{}` can only be reset to 0",
                                    a.target
                                )),
                                a.pos,
                            ));
                        }
                        resets.insert(x);
                    } else {
                        let i = vars[a.target.as_str()];
                        let v = int_of(&a.value, &scope, "assigned value")?;
                        let (low, high) = ranges[i];
                        if v < low || v > high {
                            return Err(LangError::new(
                                LangErrorKind::RangeOverflow {
                                    var: a.target.clone(),
                                    value: v,
                                    low,
                                    high,
                                },
                                a.pos,
                            ));
                        }
                        target[i] = v;
                    }
                }
                let id = match index.get(&target) {
                    Some(&id) => id,
                    None => {
                        let id = LocId(locations.len() as u32);
                        index.insert(target.clone(), id);
                        locations.push(Location { values: target });
                        queue.push_back(id);
                        id
                    }
                };
                bounds.push((EdgeOutcome { resets, target: id }, lo, hi));
            }
            let distribution = IntervalDistribution::from_bounds(bounds);
            distribution.validate().map_err(|v| {
                LangError::new(
                    LangErrorKind::InvalidDistribution {
                        command: origin.clone(),
                        detail: v.to_string(),
                    },
                    c.pos,
                )
            })?;
            let action = command_action(m, ci, c);
            for guard in conjuncts {
                edges.push(Edge {
                    source: l,
                    guard,
                    action: action.clone(),
                    distribution: distribution.clone(),
                    origin: origin.clone(),
                });
            }
        }
    }
    let n = locations.len();
    Ok(Ipta {
        variables: m.variables.iter().map(|v| v.name.clone()).collect(),
        locations,
        initial: vec![LocId(0)],
        actions,
        clocks: m.clocks.iter().map(|c| c.name.clone()).collect(),
        invariants,
        edges,
        labels: vec![BTreeSet::new(); n],
    })
}

fn command_action(m: &Module, index: usize, c: &Command) -> Action {
    match &c.action {
        Some(a) => Action::Named(a.clone()),
        None => Action::Internal {
            module: m.name.clone(),
            index,
        },
    }
}

/// Fixes constants and elaborates every module into an automaton.
pub fn resolve(src: &ModelSource, bindings: &[(String, Value)]) -> Result<ResolvedModel, LangError> {
    let constants = constants(src, bindings)?;
    let modules = src
        .modules
        .iter()
        .map(|m| elaborate_module(m, &constants))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ResolvedModel {
        kind: src.kind,
        constants,
        modules,
        labels: src.labels.clone(),
    })
}

/// Scope of a composed automaton's location; used for labels and queries.
pub struct SystemScope<'a> {
    pub model: &'a Ipta,
    pub constants: &'a BTreeMap<String, Value>,
    pub location: LocId,
    /// Extra clock name (the formula clock) and its id.
    pub extra_clock: Option<(&'a str, ClockId)>,
    /// Every declared label, including ones no location satisfies.
    pub label_names: &'a BTreeSet<String>,
}

impl Scope for SystemScope<'_> {
    fn lookup(&self, name: &str, pos: Pos) -> Result<Sym, LangError> {
        if let Some(i) = self.model.variable_index(name) {
            return Ok(Sym::Value(Value::Int(
                self.model.locations[self.location.index()].values[i],
            )));
        }
        if let Some(c) = self.model.clock_id(name) {
            return Ok(Sym::Clock(c));
        }
        if let Some((z, id)) = self.extra_clock {
            if z == name {
                return Ok(Sym::Clock(id));
            }
        }
        if let Some(v) = self.constants.get(name) {
            return Ok(Sym::Value(v.clone()));
        }
        // Bare label names act as atomic propositions.
        if self.label_names.contains(name) {
            return Ok(Sym::Value(Value::Bool(
                self.model.labels[self.location.index()].contains(name),
            )));
        }
        Err(LangError::new(
            LangErrorKind::UnknownIdentifier(name.to_string()),
            pos,
        ))
    }

    fn label(&self, name: &str, pos: Pos) -> Result<bool, LangError> {
        if name == "init" {
            return Ok(self.model.initial.contains(&self.location));
        }
        if self.label_names.contains(name) {
            return Ok(self.model.labels[self.location.index()].contains(name));
        }
        Err(LangError::new(
            LangErrorKind::UnknownLabel(name.to_string()),
            pos,
        ))
    }
}

impl ResolvedModel {
    pub fn label_names(&self) -> BTreeSet<String> {
        self.labels.iter().map(|l| l.name.clone()).collect()
    }

    /// Evaluates the label definitions on a composed automaton's locations.
    pub fn apply_labels(&self, system: &mut Ipta) -> Result<(), LangError> {
        let names = self.label_names();
        for loc in 0..system.locations.len() {
            let mut add = Vec::new();
            for l in &self.labels {
                let scope = SystemScope {
                    model: system,
                    constants: &self.constants,
                    location: LocId(loc as u32),
                    extra_clock: None,
                    label_names: &names,
                };
                match formula(&l.expr, &scope)? {
                    ClockFormula::Const(true) => add.push(l.name.clone()),
                    ClockFormula::Const(false) => {}
                    _ => {
                        return Err(LangError::new(
                            LangErrorKind::Unsupported(format!(
                                "label \"{}\" mentions clocks; labels are predicates over variables",
                                l.name
                            )),
                            l.pos,
                        ))
                    }
                }
            }
            system.labels[loc].extend(add);
        }
        Ok(())
    }
}

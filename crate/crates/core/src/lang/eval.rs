//! Expression evaluation: exact values for discrete parts, clock formulas for the rest.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::ast::{BinOp, Expr, UnOp};
use super::error::{LangError, LangErrorKind, Pos};
use crate::model::{ClockAtom, ClockConstraint, ClockId, CmpOp};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Rat(BigRational),
    Bool(bool),
}

impl Value {
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            Value::Int(i) => Some(BigRational::from_integer((*i).into())),
            Value::Rat(r) => Some(r.clone()),
            Value::Bool(_) => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            Value::Rat(r) if r.is_integer() => r.to_integer().to_i64(),
            _ => None,
        }
    }

    fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Rat(_) => "double",
            Value::Bool(_) => "bool",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Rat(r) => write!(f, "{}", crate::model::fmt_prob(r)),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// What a name denotes in the current evaluation context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sym {
    Value(Value),
    Clock(ClockId),
}

pub trait Scope {
    /// Resolves an identifier; `Err` carries a context-specific explanation.
    fn lookup(&self, name: &str, pos: Pos) -> Result<Sym, LangError>;

    /// Truth of a quoted label; models have none.
    fn label(&self, name: &str, pos: Pos) -> Result<bool, LangError> {
        Err(LangError::new(
            LangErrorKind::UnknownLabel(name.to_string()),
            pos,
        ))
    }
}

/// Scope without any names; used to fold literal expressions.
struct Empty;

impl Scope for Empty {
    fn lookup(&self, name: &str, pos: Pos) -> Result<Sym, LangError> {
        Err(LangError::new(
            LangErrorKind::UnknownIdentifier(name.to_string()),
            pos,
        ))
    }
}

/// Evaluates an expression that mentions no identifiers.
pub fn eval_closed(e: &Expr) -> Option<Value> {
    eval(e, &Empty).ok()
}

fn type_error(msg: String, pos: Option<Pos>) -> LangError {
    LangError::at(LangErrorKind::Type(msg), pos)
}

/// Either a plain value or a linear combination of clocks plus a constant.
enum Term {
    Val(Value),
    Lin(BigRational, BTreeMap<ClockId, BigRational>),
}

impl Term {
    fn into_linear(self, pos: Option<Pos>) -> Result<(BigRational, BTreeMap<ClockId, BigRational>), LangError> {
        match self {
            Term::Lin(k, c) => Ok((k, c)),
            Term::Val(v) => match v.to_rational() {
                Some(r) => Ok((r, BTreeMap::new())),
                None => Err(type_error("boolean used in a clock expression".into(), pos)),
            },
        }
    }
}

fn overflow(pos: Option<Pos>) -> LangError {
    type_error("integer overflow".into(), pos)
}

fn arith(op: BinOp, a: Value, b: Value, pos: Option<Pos>) -> Result<Value, LangError> {
    match (&a, &b) {
        (Value::Int(x), Value::Int(y)) => {
            let r = match op {
                BinOp::Add => x.checked_add(*y),
                BinOp::Sub => x.checked_sub(*y),
                BinOp::Mul => x.checked_mul(*y),
                BinOp::Div => {
                    if *y == 0 {
                        return Err(type_error("division by zero".into(), pos));
                    }
                    Some(x.div_floor(y))
                }
                _ => unreachable!(),
            };
            r.map(Value::Int).ok_or_else(|| overflow(pos))
        }
        _ => {
            let (x, y) = match (a.to_rational(), b.to_rational()) {
                (Some(x), Some(y)) => (x, y),
                _ => {
                    return Err(type_error(
                        format!("operator `{}` applied to a boolean", op.symbol()),
                        pos,
                    ))
                }
            };
            let r = match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y.is_zero() {
                        return Err(type_error("division by zero".into(), pos));
                    }
                    x / y
                }
                _ => unreachable!(),
            };
            Ok(Value::Rat(r))
        }
    }
}

fn compare(op: BinOp, a: &Value, b: &Value, pos: Option<Pos>) -> Result<bool, LangError> {
    if let (Value::Bool(x), Value::Bool(y)) = (a, b) {
        return match op {
            BinOp::Eq => Ok(x == y),
            BinOp::Neq => Ok(x != y),
            _ => Err(type_error(
                format!("operator `{}` applied to booleans", op.symbol()),
                pos,
            )),
        };
    }
    let (x, y) = match (a.to_rational(), b.to_rational()) {
        (Some(x), Some(y)) => (x, y),
        _ => {
            return Err(type_error(
                format!("cannot compare {} with {}", a.type_name(), b.type_name()),
                pos,
            ))
        }
    };
    Ok(match op {
        BinOp::Eq => x == y,
        BinOp::Neq => x != y,
        BinOp::Lt => x < y,
        BinOp::Le => x <= y,
        BinOp::Gt => x > y,
        BinOp::Ge => x >= y,
        _ => unreachable!(),
    })
}

fn term(e: &Expr, scope: &dyn Scope) -> Result<Term, LangError> {
    match e {
        Expr::Int(i) => Ok(Term::Val(Value::Int(*i))),
        Expr::Rat(r) => Ok(Term::Val(Value::Rat(r.clone()))),
        Expr::Bool(b) => Ok(Term::Val(Value::Bool(*b))),
        Expr::Label(n, p) => Ok(Term::Val(Value::Bool(scope.label(n, *p)?))),
        Expr::Ident(n, p) => match scope.lookup(n, *p)? {
            Sym::Value(v) => Ok(Term::Val(v)),
            Sym::Clock(c) => {
                let mut m = BTreeMap::new();
                m.insert(c, BigRational::from_integer(1.into()));
                Ok(Term::Lin(BigRational::zero(), m))
            }
        },
        Expr::Interval(..) => Err(type_error(
            "`~` is only allowed in probabilities".into(),
            e.pos(),
        )),
        Expr::Unary(UnOp::Neg, a) => match term(a, scope)? {
            Term::Val(Value::Int(i)) => i
                .checked_neg()
                .map(|v| Term::Val(Value::Int(v)))
                .ok_or_else(|| overflow(e.pos())),
            Term::Val(Value::Rat(r)) => Ok(Term::Val(Value::Rat(-r))),
            Term::Val(Value::Bool(_)) => Err(type_error("negation of a boolean".into(), e.pos())),
            Term::Lin(k, c) => Ok(Term::Lin(-k, c.into_iter().map(|(x, v)| (x, -v)).collect())),
        },
        Expr::Unary(UnOp::Not, _) | Expr::Binary(..) if !is_arith(e) => {
            match formula(e, scope)? {
                ClockFormula::Const(b) => Ok(Term::Val(Value::Bool(b))),
                _ => Err(type_error(
                    "clock constraint used where a value is needed".into(),
                    e.pos(),
                )),
            }
        }
        Expr::Binary(op, a, b) => {
            let ta = term(a, scope)?;
            let tb = term(b, scope)?;
            match (ta, tb) {
                (Term::Val(x), Term::Val(y)) => Ok(Term::Val(arith(*op, x, y, e.pos())?)),
                (ta, tb) => {
                    let (ka, ca) = ta.into_linear(e.pos())?;
                    let (kb, cb) = tb.into_linear(e.pos())?;
                    linear_arith(*op, (ka, ca), (kb, cb), e.pos())
                }
            }
        }
        Expr::Unary(UnOp::Not, _) => unreachable!(),
    }
}

fn is_arith(e: &Expr) -> bool {
    matches!(
        e,
        Expr::Binary(BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div, ..)
    )
}

type Linear = (BigRational, BTreeMap<ClockId, BigRational>);

fn linear_arith(op: BinOp, a: Linear, b: Linear, pos: Option<Pos>) -> Result<Term, LangError> {
    let scale = |(k, c): Linear, s: &BigRational| -> Linear {
        (k * s, c.into_iter().map(|(x, v)| (x, v * s)).collect())
    };
    let (k, mut c) = match op {
        BinOp::Add | BinOp::Sub => {
            let sign = BigRational::from_integer(if op == BinOp::Add { 1 } else { -1 }.into());
            let (kb, cb) = scale(b, &sign);
            let (ka, mut ca) = a;
            for (x, v) in cb {
                *ca.entry(x).or_insert_with(BigRational::zero) += v;
            }
            (ka + kb, ca)
        }
        BinOp::Mul => {
            if a.1.is_empty() {
                let s = a.0.clone();
                scale(b, &s)
            } else if b.1.is_empty() {
                let s = b.0.clone();
                scale(a, &s)
            } else {
                return Err(type_error("product of two clocks".into(), pos));
            }
        }
        BinOp::Div => {
            if !b.1.is_empty() {
                return Err(type_error("division by a clock".into(), pos));
            }
            if b.0.is_zero() {
                return Err(type_error("division by zero".into(), pos));
            }
            let inv = b.0.recip();
            scale(a, &inv)
        }
        _ => unreachable!(),
    };
    c.retain(|_, v| !v.is_zero());
    Ok(Term::Lin(k, c))
}

/// Evaluates to a plain value; clocks are rejected.
pub fn eval(e: &Expr, scope: &dyn Scope) -> Result<Value, LangError> {
    match term(e, scope)? {
        Term::Val(v) => Ok(v),
        Term::Lin(..) => Err(type_error(
            "clock used where a value is needed".into(),
            e.pos(),
        )),
    }
}

/// Boolean combination of clock atoms, with discrete parts already decided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClockFormula {
    Const(bool),
    Atom(ClockAtom),
    And(Vec<ClockFormula>),
    Or(Vec<ClockFormula>),
}

impl ClockFormula {
    fn and(a: ClockFormula, b: ClockFormula) -> ClockFormula {
        match (a, b) {
            (ClockFormula::Const(false), _) | (_, ClockFormula::Const(false)) => {
                ClockFormula::Const(false)
            }
            (ClockFormula::Const(true), x) | (x, ClockFormula::Const(true)) => x,
            (ClockFormula::And(mut xs), ClockFormula::And(ys)) => {
                xs.extend(ys);
                ClockFormula::And(xs)
            }
            (ClockFormula::And(mut xs), y) | (y, ClockFormula::And(mut xs)) => {
                xs.push(y);
                ClockFormula::And(xs)
            }
            (x, y) => ClockFormula::And(vec![x, y]),
        }
    }

    fn or(a: ClockFormula, b: ClockFormula) -> ClockFormula {
        match (a, b) {
            (ClockFormula::Const(true), _) | (_, ClockFormula::Const(true)) => {
                ClockFormula::Const(true)
            }
            (ClockFormula::Const(false), x) | (x, ClockFormula::Const(false)) => x,
            (ClockFormula::Or(mut xs), ClockFormula::Or(ys)) => {
                xs.extend(ys);
                ClockFormula::Or(xs)
            }
            (ClockFormula::Or(mut xs), y) | (y, ClockFormula::Or(mut xs)) => {
                xs.push(y);
                ClockFormula::Or(xs)
            }
            (x, y) => ClockFormula::Or(vec![x, y]),
        }
    }

    pub fn negate(self) -> ClockFormula {
        match self {
            ClockFormula::Const(b) => ClockFormula::Const(!b),
            ClockFormula::Atom(a) => ClockFormula::Atom(a.negate()),
            ClockFormula::And(xs) => xs
                .into_iter()
                .map(ClockFormula::negate)
                .fold(ClockFormula::Const(false), ClockFormula::or),
            ClockFormula::Or(xs) => xs
                .into_iter()
                .map(ClockFormula::negate)
                .fold(ClockFormula::Const(true), ClockFormula::and),
        }
    }

    pub fn holds(&self, valuation: &[u32]) -> bool {
        match self {
            ClockFormula::Const(b) => *b,
            ClockFormula::Atom(a) => a.satisfied_by(valuation),
            ClockFormula::And(xs) => xs.iter().all(|x| x.holds(valuation)),
            ClockFormula::Or(xs) => xs.iter().any(|x| x.holds(valuation)),
        }
    }

    /// Disjunctive normal form; an empty list means `false`.
    pub fn dnf(&self) -> Vec<ClockConstraint> {
        let mut out = match self {
            ClockFormula::Const(true) => vec![ClockConstraint::tt()],
            ClockFormula::Const(false) => vec![],
            ClockFormula::Atom(a) => vec![ClockConstraint::from_atoms([*a])],
            ClockFormula::Or(xs) => xs.iter().flat_map(|x| x.dnf()).collect(),
            ClockFormula::And(xs) => {
                let mut acc = vec![ClockConstraint::tt()];
                for x in xs {
                    let d = x.dnf();
                    let mut next = Vec::with_capacity(acc.len() * d.len());
                    for a in &acc {
                        for b in &d {
                            next.push(a.and(b));
                        }
                    }
                    acc = next;
                }
                acc
            }
        };
        let mut seen = Vec::with_capacity(out.len());
        out.retain(|c| {
            if seen.contains(c) {
                false
            } else {
                seen.push(c.clone());
                true
            }
        });
        out
    }

    /// Every clock constant mentioned, per clock, for ceiling computation.
    pub fn atoms(&self, out: &mut Vec<ClockAtom>) {
        match self {
            ClockFormula::Const(_) => {}
            ClockFormula::Atom(a) => out.push(*a),
            ClockFormula::And(xs) | ClockFormula::Or(xs) => xs.iter().for_each(|x| x.atoms(out)),
        }
    }
}

/// Evaluates a condition, turning comparisons that involve clocks into atoms.
pub fn formula(e: &Expr, scope: &dyn Scope) -> Result<ClockFormula, LangError> {
    match e {
        Expr::Unary(UnOp::Not, a) => Ok(formula(a, scope)?.negate()),
        Expr::Binary(BinOp::And, a, b) => Ok(ClockFormula::and(
            formula(a, scope)?,
            formula(b, scope)?,
        )),
        Expr::Binary(BinOp::Or, a, b) => Ok(ClockFormula::or(
            formula(a, scope)?,
            formula(b, scope)?,
        )),
        Expr::Binary(BinOp::Implies, a, b) => Ok(ClockFormula::or(
            formula(a, scope)?.negate(),
            formula(b, scope)?,
        )),
        Expr::Binary(
            op @ (BinOp::Eq | BinOp::Neq | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge),
            a,
            b,
        ) => {
            let ta = term(a, scope)?;
            let tb = term(b, scope)?;
            match (ta, tb) {
                (Term::Val(x), Term::Val(y)) => Ok(ClockFormula::Const(compare(*op, &x, &y, e.pos())?)),
                (ta, tb) => {
                    let (ka, ca) = ta.into_linear(e.pos())?;
                    let (kb, cb) = tb.into_linear(e.pos())?;
                    // a - b op 0
                    let Term::Lin(k, c) = linear_arith(BinOp::Sub, (ka, ca), (kb, cb), e.pos())?
                    else {
                        unreachable!()
                    };
                    clock_comparison(*op, k, c, e.pos())
                }
            }
        }
        _ => match term(e, scope)? {
            Term::Val(Value::Bool(b)) => Ok(ClockFormula::Const(b)),
            Term::Val(v) => Err(type_error(
                format!("{} value used as a condition", v.type_name()),
                e.pos(),
            )),
            Term::Lin(..) => Err(type_error("clock used as a condition".into(), e.pos())),
        },
    }
}

/// `Σ c·x + k op 0` as a clock formula.
fn clock_comparison(
    op: BinOp,
    k: BigRational,
    coefs: BTreeMap<ClockId, BigRational>,
    pos: Option<Pos>,
) -> Result<ClockFormula, LangError> {
    let cmp = match op {
        BinOp::Eq => {
            return Ok(ClockFormula::and(
                clock_comparison(BinOp::Le, k.clone(), coefs.clone(), pos)?,
                clock_comparison(BinOp::Ge, k, coefs, pos)?,
            ))
        }
        BinOp::Neq => {
            return Ok(ClockFormula::or(
                clock_comparison(BinOp::Lt, k.clone(), coefs.clone(), pos)?,
                clock_comparison(BinOp::Gt, k, coefs, pos)?,
            ))
        }
        BinOp::Lt => CmpOp::Lt,
        BinOp::Le => CmpOp::Le,
        BinOp::Gt => CmpOp::Gt,
        BinOp::Ge => CmpOp::Ge,
        _ => unreachable!(),
    };
    let unsupported = || {
        LangError::at(
            LangErrorKind::Unsupported(
                "clock constraints must have the form `x op c` or `x - y op c`".into(),
            ),
            pos,
        )
    };
    let terms: Vec<(ClockId, BigRational)> = coefs.into_iter().collect();
    match terms.as_slice() {
        [] => Ok(ClockFormula::Const(cmp.holds(k.signum().to_i64().unwrap(), 0))),
        [(x, c)] => {
            // c·x + k op 0  ⇔  x op' -k/c
            let op = if c.is_positive() { cmp } else { cmp.mirror() };
            let bound = -k / c;
            let b = integer_bound(&bound, pos)?;
            if b < 0 {
                // x ≥ 0 always, so only the lower-bound forms hold.
                return Ok(ClockFormula::Const(matches!(op, CmpOp::Gt | CmpOp::Ge)));
            }
            Ok(ClockFormula::Atom(ClockAtom::Single {
                clock: *x,
                op,
                bound: to_u32(b, pos)?,
            }))
        }
        [(x, cx), (y, cy)] if (cx + cy).is_zero() => {
            // cx·(x - y) + k op 0  ⇔  x - y op' -k/cx
            let op = if cx.is_positive() { cmp } else { cmp.mirror() };
            let b = integer_bound(&(-k / cx), pos)?;
            let atom = if b >= 0 {
                ClockAtom::Diagonal {
                    clock: *x,
                    other: *y,
                    op,
                    bound: to_u32(b, pos)?,
                }
            } else {
                ClockAtom::Diagonal {
                    clock: *y,
                    other: *x,
                    op: op.mirror(),
                    bound: to_u32(-b, pos)?,
                }
            };
            Ok(ClockFormula::Atom(atom))
        }
        _ => Err(unsupported()),
    }
}

fn integer_bound(r: &BigRational, pos: Option<Pos>) -> Result<i64, LangError> {
    if !r.is_integer() {
        return Err(LangError::at(
            LangErrorKind::Unsupported(format!(
                "clock constant {} is not an integer",
                crate::model::fmt_prob(r)
            )),
            pos,
        ));
    }
    r.to_integer()
        .to_i64()
        .ok_or_else(|| overflow(pos))
}

fn to_u32(b: i64, pos: Option<Pos>) -> Result<u32, LangError> {
    u32::try_from(b).map_err(|_| {
        LangError::at(
            LangErrorKind::Unsupported(format!("clock constant {b} is too large")),
            pos,
        )
    })
}

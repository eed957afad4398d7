//! Syntax tree of models and queries, with a pretty-printer that the parser accepts back.

use std::fmt;

use num_rational::BigRational;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::error::Pos;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Ipta,
    Pta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstType {
    Int,
    Double,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Implies,
    Or,
    And,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Implies => 1,
            BinOp::Or => 2,
            BinOp::And => 3,
            BinOp::Eq | BinOp::Neq | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 5,
            BinOp::Add | BinOp::Sub => 6,
            BinOp::Mul | BinOp::Div => 7,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Implies => "=>",
            BinOp::Or => "|",
            BinOp::And => "&",
            BinOp::Eq => "=",
            BinOp::Neq => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i64),
    /// Exact decimal literal.
    Rat(BigRational),
    Bool(bool),
    Ident(String, Pos),
    /// Quoted label reference, only meaningful in queries.
    Label(String, Pos),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// `lower ~ upper`; only valid as the probability of an alternative.
    Interval(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    /// Position of the first identifier in the expression, for diagnostics.
    pub fn pos(&self) -> Option<Pos> {
        match self {
            Expr::Ident(_, p) | Expr::Label(_, p) => Some(*p),
            Expr::Unary(_, e) => e.pos(),
            Expr::Binary(_, a, b) | Expr::Interval(a, b) => a.pos().or_else(|| b.pos()),
            _ => None,
        }
    }

    pub fn contains_interval(&self) -> bool {
        match self {
            Expr::Interval(..) => true,
            Expr::Unary(_, e) => e.contains_interval(),
            Expr::Binary(_, a, b) => a.contains_interval() || b.contains_interval(),
            _ => false,
        }
    }

    /// Visits every identifier with its position.
    pub fn for_each_ident(&self, f: &mut impl FnMut(&str, Pos)) {
        match self {
            Expr::Ident(n, p) => f(n, *p),
            Expr::Unary(_, e) => e.for_each_ident(f),
            Expr::Binary(_, a, b) | Expr::Interval(a, b) => {
                a.for_each_ident(f);
                b.for_each_ident(f);
            }
            _ => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Interval(..) => 0,
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Unary(UnOp::Not, _) => 4,
            Expr::Unary(UnOp::Neg, _) => 8,
            _ => 9,
        }
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        return write!(f, "{}.0", r.numer());
    }
    // Terminating decimals print as decimals; anything else as an exact quotient.
    let mut denom = r.denom().clone();
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&denom % 2u32).is_zero() {
        denom /= 2u32;
        twos += 1;
    }
    while (&denom % 5u32).is_zero() {
        denom /= 5u32;
        fives += 1;
    }
    if !denom.is_one() {
        return write!(f, "({}.0/{})", r.numer(), r.denom());
    }
    let digits = twos.max(fives);
    let scaled = r * BigRational::from_integer(BigInt::from(10u32).pow(digits as u32));
    let n = scaled.to_integer();
    let sign = if n.is_negative() { "-" } else { "" };
    let s = format!("{:0>width$}", n.abs(), width = digits + 1);
    let (int, frac) = s.split_at(s.len() - digits);
    write!(f, "{sign}{int}.{frac}")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(i) => write!(f, "{i}"),
            Expr::Rat(r) => fmt_rational(r, f),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Ident(n, _) => f.write_str(n),
            Expr::Label(n, _) => write!(f, "\"{n}\""),
            Expr::Unary(op, e) => {
                let sym = if *op == UnOp::Neg { "-" } else { "!" };
                if e.precedence() < self.precedence() || matches!(**e, Expr::Unary(..)) {
                    write!(f, "{sym}({e})")
                } else {
                    write!(f, "{sym}{e}")
                }
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                // Left-associative except `=>`, which associates to the right.
                let right_assoc = *op == BinOp::Implies;
                let comparison = p == 5;
                let wrap_a = a.precedence() < p
                    || (a.precedence() == p && (right_assoc || comparison));
                let wrap_b = b.precedence() < p
                    || (b.precedence() == p && (!right_assoc || comparison));
                if wrap_a {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, " {} ", op.symbol())?;
                if wrap_b {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Expr::Interval(a, b) => {
                let wrap = |e: &Expr| e.precedence() == 0;
                if wrap(a) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                f.write_str("~")?;
                if wrap(b) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstDecl {
    pub name: String,
    pub ty: ConstType,
    pub value: Option<Expr>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub low: Expr,
    pub high: Expr,
    /// Defaults to the lower bound when absent.
    pub init: Option<Expr>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClockDecl {
    pub name: String,
    pub pos: Pos,
}

/// `v' = expr`; for clocks only `x' = 0` is accepted by elaboration.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub target: String,
    pub value: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Alternative {
    /// `None` when the command has a single update without a probability.
    pub prob: Option<Expr>,
    /// Empty means `true` (no change).
    pub assignments: Vec<Assignment>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Command {
    pub action: Option<String>,
    pub guard: Expr,
    pub alternatives: Vec<Alternative>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Module {
    pub name: String,
    pub variables: Vec<VarDecl>,
    pub clocks: Vec<ClockDecl>,
    pub invariant: Option<Expr>,
    pub commands: Vec<Command>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabelDecl {
    pub name: String,
    pub expr: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSource {
    pub kind: ModelKind,
    pub constants: Vec<ConstDecl>,
    pub modules: Vec<Module>,
    pub labels: Vec<LabelDecl>,
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.prob {
            match p {
                Expr::Interval(..) => write!(f, "({p}):")?,
                Expr::Int(_) | Expr::Rat(_) | Expr::Ident(..) => write!(f, "{p}:")?,
                _ => write!(f, "({p}):")?,
            }
        }
        if self.assignments.is_empty() {
            return f.write_str("true");
        }
        for (i, a) in self.assignments.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "({}'={})", a.target, a.value)?;
        }
        Ok(())
    }
}

impl fmt::Display for ModelSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ModelKind::Ipta => writeln!(f, "ipta")?,
            ModelKind::Pta => writeln!(f, "pta")?,
        }
        if !self.constants.is_empty() {
            writeln!(f)?;
        }
        for c in &self.constants {
            let ty = match c.ty {
                ConstType::Int => "int",
                ConstType::Double => "double",
            };
            match &c.value {
                Some(v) => writeln!(f, "const {ty} {} = {v};", c.name)?,
                None => writeln!(f, "const {ty} {};", c.name)?,
            }
        }
        for m in &self.modules {
            writeln!(f, "\nmodule {}", m.name)?;
            for v in &m.variables {
                write!(f, "  {} : [{}..{}]", v.name, v.low, v.high)?;
                if let Some(i) = &v.init {
                    write!(f, " init {i}")?;
                }
                writeln!(f, ";")?;
            }
            for c in &m.clocks {
                writeln!(f, "  {} : clock;", c.name)?;
            }
            if let Some(inv) = &m.invariant {
                writeln!(f, "  invariant\n    {inv}\n  endinvariant")?;
            }
            for c in &m.commands {
                write!(f, "  [{}] {} -> ", c.action.as_deref().unwrap_or(""), c.guard)?;
                for (i, a) in c.alternatives.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{a}")?;
                }
                writeln!(f, ";")?;
            }
            writeln!(f, "endmodule")?;
        }
        if !self.labels.is_empty() {
            writeln!(f)?;
        }
        for l in &self.labels {
            writeln!(f, "label \"{}\" = {};", l.name, l.expr)?;
        }
        Ok(())
    }
}

/// Optimization mode of a probabilistic query.
#[derive(Clone, Debug, PartialEq)]
pub enum QueryMode {
    Min,
    Max,
    /// `P op bound [...]`.
    Threshold { op: super::super::CmpOp, bound: BigRational },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub mode: QueryMode,
    /// Formula clock introduced by a `z.` prefix.
    pub formula_clock: Option<String>,
    /// Left side of an until; `None` for `F target`.
    pub left: Option<Expr>,
    pub target: Expr,
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(z) = &self.formula_clock {
            write!(f, "{z}.")?;
        }
        match &self.mode {
            QueryMode::Min => f.write_str("Pmin=? ")?,
            QueryMode::Max => f.write_str("Pmax=? ")?,
            QueryMode::Threshold { op, bound } => {
                write!(f, "P{op}{} ", Expr::Rat(bound.clone()))?;
            }
        }
        match &self.left {
            Some(l) => write!(f, "[ {l} U {} ]", self.target),
            None => write!(f, "[ F {} ]", self.target),
        }
    }
}

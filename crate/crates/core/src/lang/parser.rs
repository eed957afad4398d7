//! Recursive-descent parser for models and queries.

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ast::*;
use super::error::{LangError, LangErrorKind, Pos};
use super::eval::eval_closed;
use super::lexer::{tokenize, Tok, Token};
use crate::model::CmpOp;

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

fn syntax(msg: impl Into<String>, pos: Pos) -> LangError {
    LangError::new(LangErrorKind::Syntax(msg.into()), pos)
}

impl Parser {
    fn new(text: &str) -> Result<Self, LangError> {
        Ok(Parser {
            toks: tokenize(text)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<Pos, LangError> {
        if self.peek() == tok {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn unexpected(&self, wanted: &str) -> LangError {
        syntax(
            format!("expected {wanted}, found {}", self.peek().describe()),
            self.pos(),
        )
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Pos, LangError> {
        if self.is_keyword(kw) {
            Ok(self.bump().pos)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), LangError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_reserved(&s) => {
                let p = self.bump().pos;
                Ok((s, p))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    // expr := implies ('~' implies)?
    fn expr(&mut self) -> Result<Expr, LangError> {
        let lhs = self.implies()?;
        if self.eat(&Tok::Tilde) {
            let rhs = self.implies()?;
            return Ok(Expr::Interval(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Expr, LangError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(Expr::binary(BinOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and()?;
            lhs = Expr::binary(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.not()?;
        while self.eat(&Tok::And) {
            let rhs = self.not()?;
            lhs = Expr::binary(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Expr, LangError> {
        if self.eat(&Tok::Not) {
            let e = self.not()?;
            return Ok(Expr::Unary(UnOp::Not, Box::new(e)));
        }
        self.relation()
    }

    fn relation(&mut self) -> Result<Expr, LangError> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Neq => BinOp::Neq,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.additive()?;
        Ok(Expr::binary(op, lhs, rhs))
    }

    fn additive(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, LangError> {
        if self.eat(&Tok::Minus) {
            let e = self.unary()?;
            return Ok(Expr::Unary(UnOp::Neg, Box::new(e)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, LangError> {
        let t = self.bump();
        match t.tok {
            Tok::Int(i) => Ok(Expr::Int(i)),
            Tok::Dec(d) => Ok(Expr::Rat(d)),
            Tok::Str(s) => Ok(Expr::Label(s, t.pos)),
            Tok::Ident(s) if s == "true" => Ok(Expr::Bool(true)),
            Tok::Ident(s) if s == "false" => Ok(Expr::Bool(false)),
            Tok::Ident(s) if !is_reserved(&s) => Ok(Expr::Ident(s, t.pos)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            other => Err(syntax(
                format!("expected an expression, found {}", other.describe()),
                t.pos,
            )),
        }
    }
}

impl Parser {
    fn model(&mut self) -> Result<ModelSource, LangError> {
        let kind = if self.eat_keyword("ipta") {
            ModelKind::Ipta
        } else if self.eat_keyword("pta") {
            ModelKind::Pta
        } else {
            ModelKind::Ipta
        };
        let mut src = ModelSource {
            kind,
            constants: Vec::new(),
            modules: Vec::new(),
            labels: Vec::new(),
        };
        loop {
            if *self.peek() == Tok::Eof {
                break;
            } else if self.is_keyword("const") {
                src.constants.push(self.constant()?);
            } else if self.is_keyword("module") {
                src.modules.push(self.module(kind)?);
            } else if self.is_keyword("label") {
                let pos = self.bump().pos;
                let name = match self.bump().tok {
                    Tok::Str(s) => s,
                    _ => return Err(syntax("expected a quoted label name", pos)),
                };
                self.expect(&Tok::Eq)?;
                let expr = self.expr()?;
                self.expect(&Tok::Semi)?;
                src.labels.push(LabelDecl { name, expr, pos });
            } else {
                return Err(self.unexpected("`const`, `module` or `label`"));
            }
        }
        Ok(src)
    }

    fn constant(&mut self) -> Result<ConstDecl, LangError> {
        let pos = self.expect_keyword("const")?;
        let ty = if self.eat_keyword("int") {
            ConstType::Int
        } else if self.eat_keyword("double") {
            ConstType::Double
        } else {
            ConstType::Int
        };
        let (name, _) = self.ident()?;
        let value = if self.eat(&Tok::Eq) {
            Some(self.expr()?)
        } else {
            None
        };
        self.expect(&Tok::Semi)?;
        Ok(ConstDecl {
            name,
            ty,
            value,
            pos,
        })
    }

    fn module(&mut self, kind: ModelKind) -> Result<Module, LangError> {
        let pos = self.expect_keyword("module")?;
        let (name, _) = self.ident()?;
        let mut m = Module {
            name,
            variables: Vec::new(),
            clocks: Vec::new(),
            invariant: None,
            commands: Vec::new(),
            pos,
        };
        loop {
            if self.eat_keyword("endmodule") {
                return Ok(m);
            } else if self.is_keyword("invariant") {
                let ipos = self.bump().pos;
                if m.invariant.is_some() {
                    return Err(syntax("a module has at most one invariant block", ipos));
                }
                let e = self.expr()?;
                self.expect_keyword("endinvariant")?;
                m.invariant = Some(e);
            } else if *self.peek() == Tok::LBracket {
                m.commands.push(self.command(kind)?);
            } else if matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Colon {
                let (vname, vpos) = self.ident()?;
                self.expect(&Tok::Colon)?;
                if self.eat_keyword("clock") {
                    m.clocks.push(ClockDecl {
                        name: vname,
                        pos: vpos,
                    });
                } else {
                    self.expect(&Tok::LBracket)?;
                    let low = self.expr()?;
                    self.expect(&Tok::DotDot)?;
                    let high = self.expr()?;
                    self.expect(&Tok::RBracket)?;
                    let init = if self.eat_keyword("init") {
                        Some(self.expr()?)
                    } else {
                        None
                    };
                    m.variables.push(VarDecl {
                        name: vname,
                        low,
                        high,
                        init,
                        pos: vpos,
                    });
                }
                self.expect(&Tok::Semi)?;
            } else {
                return Err(self.unexpected("a declaration, command or `endmodule`"));
            }
        }
    }

    fn command(&mut self, kind: ModelKind) -> Result<Command, LangError> {
        let pos = self.expect(&Tok::LBracket)?;
        let action = if *self.peek() == Tok::RBracket {
            None
        } else {
            Some(self.ident()?.0)
        };
        self.expect(&Tok::RBracket)?;
        let guard = self.expr()?;
        if guard.contains_interval() {
            return Err(syntax("`~` is only allowed in probabilities", pos));
        }
        self.expect(&Tok::Arrow)?;
        let mut alternatives = vec![self.alternative(kind)?];
        while self.eat(&Tok::Plus) {
            alternatives.push(self.alternative(kind)?);
        }
        if alternatives.len() > 1 && alternatives.iter().any(|a| a.prob.is_none()) {
            return Err(syntax(
                "every alternative of a probabilistic choice needs a probability",
                pos,
            ));
        }
        self.expect(&Tok::Semi)?;
        Ok(Command {
            action,
            guard,
            alternatives,
            pos,
        })
    }

    fn starts_update(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) if s == "true" => {
                matches!(self.peek_at(1), Tok::Semi | Tok::Plus)
            }
            Tok::LParen => {
                matches!(self.peek_at(1), Tok::Ident(_)) && *self.peek_at(2) == Tok::Prime
            }
            _ => false,
        }
    }

    fn alternative(&mut self, kind: ModelKind) -> Result<Alternative, LangError> {
        let prob = if self.starts_update() {
            None
        } else {
            let ppos = self.pos();
            let p = self.expr()?;
            check_probability(&p, kind, ppos)?;
            self.expect(&Tok::Colon)?;
            Some(p)
        };
        let mut assignments = Vec::new();
        if !self.eat_keyword("true") {
            loop {
                self.expect(&Tok::LParen)?;
                let (target, apos) = self.ident()?;
                self.expect(&Tok::Prime)?;
                self.expect(&Tok::Eq)?;
                let value = self.expr()?;
                if value.contains_interval() {
                    return Err(syntax("`~` is only allowed in probabilities", apos));
                }
                self.expect(&Tok::RParen)?;
                assignments.push(Assignment {
                    target,
                    value,
                    pos: apos,
                });
                if !self.eat(&Tok::And) {
                    break;
                }
            }
        }
        Ok(Alternative { prob, assignments })
    }

    fn query(&mut self) -> Result<Query, LangError> {
        let formula_clock = if matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Dot
        {
            let (z, _) = self.ident()?;
            self.bump();
            Some(z)
        } else {
            None
        };
        let ppos = self.pos();
        let head = match self.bump().tok {
            Tok::Ident(s) => s,
            other => {
                return Err(syntax(
                    format!("expected `Pmin`, `Pmax` or `P`, found {}", other.describe()),
                    ppos,
                ))
            }
        };
        let mode = match head.as_str() {
            "Pmin" | "Pmax" => {
                self.expect(&Tok::Eq)?;
                self.expect(&Tok::Question)?;
                if head == "Pmin" {
                    QueryMode::Min
                } else {
                    QueryMode::Max
                }
            }
            "P" => {
                let op = match self.bump().tok {
                    Tok::Le => CmpOp::Le,
                    Tok::Lt => CmpOp::Lt,
                    Tok::Gt => CmpOp::Gt,
                    Tok::Ge => CmpOp::Ge,
                    _ => return Err(syntax("expected a comparison after `P`", ppos)),
                };
                let bpos = self.pos();
                let bound = match self.bump().tok {
                    Tok::Int(i) => BigRational::from_integer(i.into()),
                    Tok::Dec(d) => d,
                    other => {
                        return Err(syntax(
                            format!("expected a probability bound, found {}", other.describe()),
                            bpos,
                        ))
                    }
                };
                if bound > BigRational::one() || bound < BigRational::zero() {
                    return Err(syntax("probability bound must lie in [0,1]", bpos));
                }
                QueryMode::Threshold { op, bound }
            }
            _ => {
                return Err(syntax(
                    format!("expected `Pmin`, `Pmax` or `P`, found `{head}`"),
                    ppos,
                ))
            }
        };
        self.expect(&Tok::LBracket)?;
        let (left, target) = if self.eat_keyword("F") {
            (None, self.expr()?)
        } else {
            let l = self.expr()?;
            self.expect_keyword("U")?;
            (Some(l), self.expr()?)
        };
        self.expect(&Tok::RBracket)?;
        for e in left.iter().chain(std::iter::once(&target)) {
            if e.contains_interval() {
                return Err(syntax("`~` is not allowed in queries", ppos));
            }
        }
        Ok(Query {
            mode,
            formula_clock,
            left,
            target,
        })
    }
}

fn check_probability(p: &Expr, kind: ModelKind, pos: Pos) -> Result<(), LangError> {
    match p {
        Expr::Interval(lo, hi) => {
            if kind == ModelKind::Pta {
                return Err(syntax(
                    "probability intervals need the `ipta` model type",
                    pos,
                ));
            }
            if lo.contains_interval() || hi.contains_interval() {
                return Err(syntax("nested `~`", pos));
            }
            let closed = |e: &Expr| eval_closed(e).and_then(|v| v.to_rational());
            if let (Some(l), Some(u)) = (closed(lo), closed(hi)) {
                if l > u {
                    return Err(LangError::new(
                        LangErrorKind::InvertedInterval {
                            lower: lo.to_string(),
                            upper: hi.to_string(),
                        },
                        pos,
                    ));
                }
            }
            Ok(())
        }
        other if other.contains_interval() => {
            Err(syntax("`~` must be the outermost operator of a probability", pos))
        }
        _ => Ok(()),
    }
}

/// Checks declaration uniqueness and that every identifier refers to something declared.
fn check_names(src: &ModelSource) -> Result<(), LangError> {
    let mut seen: HashSet<&str> = HashSet::new();
    let dup = |name: &str, pos: Pos| {
        LangError::new(LangErrorKind::DuplicateDeclaration(name.to_string()), pos)
    };
    for c in &src.constants {
        if !seen.insert(&c.name) {
            return Err(dup(&c.name, c.pos));
        }
    }
    let mut module_names = HashSet::new();
    for m in &src.modules {
        if !module_names.insert(&m.name) {
            return Err(dup(&m.name, m.pos));
        }
        for v in &m.variables {
            if !seen.insert(&v.name) {
                return Err(dup(&v.name, v.pos));
            }
        }
        for c in &m.clocks {
            if !seen.insert(&c.name) {
                return Err(dup(&c.name, c.pos));
            }
        }
    }
    let mut label_names = HashSet::new();
    for l in &src.labels {
        if !label_names.insert(&l.name) {
            return Err(dup(&l.name, l.pos));
        }
    }
    let check = |e: &Expr| -> Result<(), LangError> {
        let mut err = None;
        e.for_each_ident(&mut |n, p| {
            if err.is_none() && !seen.contains(n) {
                err = Some(LangError::new(
                    LangErrorKind::UnknownIdentifier(n.to_string()),
                    p,
                ));
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if let Some(Expr::Label(n, p)) = find_label(e) {
            return Err(syntax(format!("label reference \"{n}\" inside a model"), p));
        }
        Ok(())
    };
    for c in &src.constants {
        if let Some(v) = &c.value {
            check(v)?;
        }
    }
    for m in &src.modules {
        for v in &m.variables {
            check(&v.low)?;
            check(&v.high)?;
            if let Some(i) = &v.init {
                check(i)?;
            }
        }
        if let Some(inv) = &m.invariant {
            check(inv)?;
        }
        let own: HashSet<&str> = m
            .variables
            .iter()
            .map(|v| v.name.as_str())
            .chain(m.clocks.iter().map(|c| c.name.as_str()))
            .collect();
        for c in &m.commands {
            check(&c.guard)?;
            for a in &c.alternatives {
                if let Some(p) = &a.prob {
                    check(p)?;
                }
                let mut targets = HashSet::new();
                for asg in &a.assignments {
                    check(&asg.value)?;
                    if !seen.contains(asg.target.as_str()) {
                        return Err(LangError::new(
                            LangErrorKind::UnknownIdentifier(asg.target.clone()),
                            asg.pos,
                        ));
                    }
                    if !own.contains(asg.target.as_str()) {
                        return Err(syntax(
                            format!(
                                "module {} cannot update `{}`, which belongs to another module",
                                m.name, asg.target
                            ),
                            asg.pos,
                        ));
                    }
                    if !targets.insert(asg.target.as_str()) {
                        return Err(syntax(
                            format!("`{}` is updated twice in one alternative", asg.target),
                            asg.pos,
                        ));
                    }
                }
            }
        }
    }
    for l in &src.labels {
        check(&l.expr)?;
    }
    Ok(())
}

fn find_label(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Label(..) => Some(e.clone()),
        Expr::Unary(_, a) => find_label(a),
        Expr::Binary(_, a, b) | Expr::Interval(a, b) => find_label(a).or_else(|| find_label(b)),
        _ => None,
    }
}

/// Parses a model text into its syntax tree.
pub fn parse_model(text: &str) -> Result<ModelSource, LangError> {
    let mut p = Parser::new(text)?;
    let src = p.model()?;
    check_names(&src)?;
    Ok(src)
}

/// Parses a standalone expression.
pub fn parse_expr(text: &str) -> Result<Expr, LangError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}

/// Parses a single query.
pub fn parse_query(text: &str) -> Result<Query, LangError> {
    let mut p = Parser::new(text)?;
    let q = p.query()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of query"));
    }
    Ok(q)
}

/// Parses a properties file: queries separated by whitespace, newlines or `;`.
pub fn parse_queries(text: &str) -> Result<Vec<Query>, LangError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    while *p.peek() != Tok::Eof {
        out.push(p.query()?);
        while p.eat(&Tok::Semi) {}
    }
    Ok(out)
}

fn is_reserved(s: &str) -> bool {
    matches!(
        s,
        "module"
            | "endmodule"
            | "invariant"
            | "endinvariant"
            | "const"
            | "label"
            | "init"
            | "clock"
            | "true"
            | "false"
    )
}

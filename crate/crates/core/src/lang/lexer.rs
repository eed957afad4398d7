//! Tokenizer shared by the model and query parsers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::error::{LangError, LangErrorKind, Pos};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    /// Decimal literal such as `0.95`, kept exact.
    Dec(BigRational),
    Str(String),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Dot,
    DotDot,
    Prime,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    And,
    Or,
    Not,
    Implies,
    Arrow,
    Tilde,
    Question,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(i) => format!("integer `{i}`"),
            Tok::Dec(d) => format!("number `{d}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::DotDot => "..",
            Tok::Prime => "'",
            Tok::Eq => "=",
            Tok::Neq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Not => "!",
            Tok::Implies => "=>",
            Tok::Arrow => "->",
            Tok::Tilde => "~",
            Tok::Question => "?",
            _ => "",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, LangError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;
    let advance = |i: &mut usize, line: &mut u32, col: &mut u32, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut col, 1);
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col, 1);
            }
            let int_part: String = chars[start..i].iter().collect();
            // A `.` followed by a digit makes a decimal; `..` is a range.
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col, 1);
                let fs = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance(&mut i, &mut line, &mut col, 1);
                }
                let frac: String = chars[fs..i].iter().collect();
                out.push(Token {
                    tok: Tok::Dec(decimal(&int_part, &frac)),
                    pos,
                });
            } else {
                let v = int_part.parse::<i64>().map_err(|_| {
                    LangError::new(
                        LangErrorKind::Syntax(format!("integer literal `{int_part}` is too large")),
                        pos,
                    )
                })?;
                out.push(Token {
                    tok: Tok::Int(v),
                    pos,
                });
            }
            continue;
        }
        if c == '"' {
            advance(&mut i, &mut line, &mut col, 1);
            let start = i;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(LangError::new(
                    LangErrorKind::Syntax("unterminated string".into()),
                    pos,
                ));
            }
            let s: String = chars[start..i].iter().collect();
            advance(&mut i, &mut line, &mut col, 1);
            out.push(Token { tok: Tok::Str(s), pos });
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match (c, next) {
            ('.', Some('.')) => (Tok::DotDot, 2),
            ('!', Some('=')) => (Tok::Neq, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('=', Some('>')) => (Tok::Implies, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            (';', _) => (Tok::Semi, 1),
            (':', _) => (Tok::Colon, 1),
            (',', _) => (Tok::Comma, 1),
            ('.', _) => (Tok::Dot, 1),
            ('\'', _) => (Tok::Prime, 1),
            ('=', _) => (Tok::Eq, 1),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            ('&', _) | ('∧', _) => (Tok::And, 1),
            ('|', _) | ('∨', _) => (Tok::Or, 1),
            ('!', _) | ('¬', _) => (Tok::Not, 1),
            ('~', _) | ('∼', _) => (Tok::Tilde, 1),
            ('?', _) => (Tok::Question, 1),
            ('≤', _) => (Tok::Le, 1),
            ('≥', _) => (Tok::Ge, 1),
            ('≠', _) => (Tok::Neq, 1),
            ('⇒', _) => (Tok::Implies, 1),
            ('→', _) => (Tok::Arrow, 1),
            _ => {
                return Err(LangError::new(
                    LangErrorKind::Syntax(format!("unexpected character `{c}`")),
                    pos,
                ))
            }
        };
        advance(&mut i, &mut line, &mut col, len);
        out.push(Token { tok, pos });
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

fn decimal(int_part: &str, frac: &str) -> BigRational {
    let digits: String = format!("{int_part}{frac}");
    let numer: BigInt = digits.parse().unwrap_or_else(|_| BigInt::zero());
    let mut denom = BigInt::one();
    for _ in 0..frac.len() {
        denom *= 10;
    }
    BigRational::new(numer, denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(
            toks("0.95"),
            vec![
                Tok::Dec(BigRational::new(95.into(), 100.into())),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn range_is_not_decimal() {
        assert_eq!(
            toks("[0..2]"),
            vec![
                Tok::LBracket,
                Tok::Int(0),
                Tok::DotDot,
                Tok::Int(2),
                Tok::RBracket,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn unicode_operators() {
        assert_eq!(
            toks("x≤20 ⇒ a → L∼U"),
            vec![
                Tok::Ident("x".into()),
                Tok::Le,
                Tok::Int(20),
                Tok::Implies,
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("L".into()),
                Tok::Tilde,
                Tok::Ident("U".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("a // c\n  b").unwrap();
        assert_eq!(t[1].tok, Tok::Ident("b".into()));
        assert_eq!(t[1].pos, Pos { line: 2, col: 3 });
    }

    #[test]
    fn bad_character() {
        let e = tokenize("a $ b").unwrap_err();
        assert_eq!(e.pos, Some(Pos { line: 1, col: 3 }));
    }
}

//! Recursive-descent parser for the canonical polynomial text form.
//!
//! Grammar (whitespace insignificant, no implicit multiplication):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | identifier | '(' expr ')'
//! ```
//!
//! Numbers are integers or decimals; `7/2` parses as a quotient.

use std::sync::Arc;

use crate::error::{AlgebraError, Result};
use crate::mpoly::MPoly;
use crate::rat::parse_rat;
use crate::ratfn::RatFn;
use crate::ring::VarRing;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
    End,
}

struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).map_or(false, |d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(Token {
                tok: Tok::Num(s),
                line: l0,
                column: c0,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(Token {
                tok: Tok::Ident(s),
                line: l0,
                column: c0,
            });
            continue;
        }
        if "+-*/^()".contains(c) {
            out.push(Token {
                tok: Tok::Op(c),
                line: l0,
                column: c0,
            });
            i += 1;
            column += 1;
            continue;
        }
        return Err(AlgebraError::Syntax {
            line,
            column,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    ring: &'a Arc<VarRing>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn error(&self, message: impl Into<String>) -> AlgebraError {
        let t = &self.toks[self.pos];
        AlgebraError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RatFn> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    acc = acc.checked_add(&self.term()?)?;
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = acc.checked_sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFn> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    acc = acc.checked_mul(&self.unary()?)?;
                }
                Tok::Op('/') => {
                    self.bump();
                    let rhs = self.unary()?;
                    if rhs.is_zero() {
                        return Err(AlgebraError::DivisionByZero);
                    }
                    acc = acc.checked_div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFn> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFn> {
        let base = self.atom()?;
        if self.peek() != &Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        match self.peek().clone() {
            Tok::Num(s) if s.chars().all(|c| c.is_ascii_digit()) => {
                let e: u32 = s
                    .parse()
                    .map_err(|_| self.error(format!("exponent `{s}` out of range")))?;
                self.bump();
                base.pow(e as i64)
            }
            Tok::Num(s) => Err(self.error(format!("exponent `{s}` is not a nonnegative integer"))),
            Tok::Op('-') => Err(self.error("negative exponents are not allowed")),
            _ => Err(self.error("expected a nonnegative integer exponent after `^`")),
        }
    }

    fn atom(&mut self) -> Result<RatFn> {
        match self.peek().clone() {
            Tok::Num(s) => {
                let v = parse_rat(&s).ok_or_else(|| self.error(format!("malformed number `{s}`")))?;
                self.bump();
                Ok(RatFn::constant(self.ring, v))
            }
            Tok::Ident(name) => {
                let p = MPoly::symbol(self.ring, &name)?;
                self.bump();
                Ok(RatFn::from_poly(p))
            }
            Tok::Op('(') => {
                self.bump();
                let inner = self.expr()?;
                if self.peek() != &Tok::Op(')') {
                    return Err(self.error("expected `)`"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => Err(self.error("unexpected end of input")),
            Tok::Op(c) => Err(self.error(format!("unexpected `{c}`"))),
        }
    }
}

/// Parses a rational-function expression over `ring`.
pub fn parse_ratfn(text: &str, ring: &Arc<VarRing>) -> Result<RatFn> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, ring };
    if p.peek() == &Tok::End {
        return Err(p.error("empty expression"));
    }
    let v = p.expr()?;
    if p.peek() != &Tok::End {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(v)
}

/// Parses a polynomial; division is only allowed by nonzero constants.
pub fn parse_poly(text: &str, ring: &Arc<VarRing>) -> Result<MPoly> {
    let f = parse_ratfn(text, ring)?;
    if !f.is_polynomial() {
        return Err(AlgebraError::Domain(format!(
            "`{}` is not a polynomial",
            text.trim()
        )));
    }
    Ok(f.into_parts().0)
}

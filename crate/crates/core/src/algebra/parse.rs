//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar: `+ - * ^ ( )`, the literal `i`, integers, and division by
//! nonzero constants (so `p/q` rationals work). Exponents are nonnegative
//! integers. Function application is rejected.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{AlgebraError, GaussianRational, Order, Series, VarSpace};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, AlgebraError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[s..i].iter().collect();
            out.push((s + 1, Tok::Num(text.parse().expect("digits"))));
        } else if c.is_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((s + 1, Tok::Ident(chars[s..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i + 1, Tok::Op(c)));
            i += 1;
        } else {
            return Err(AlgebraError::Parse {
                col: i + 1,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    space: &'a Arc<VarSpace>,
    order: Order,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, AlgebraError> {
        Err(AlgebraError::Parse {
            col: self.col(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Series, AlgebraError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Series, AlgebraError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let col = self.col();
                let d = self.unary()?;
                let c = d.constant_term();
                if d.len() > 1 || (d.len() == 1 && c.is_zero()) {
                    return Err(AlgebraError::Parse {
                        col,
                        msg: "division by a non-constant".into(),
                    });
                }
                let inv = c.inv().ok_or(AlgebraError::Parse {
                    col,
                    msg: "division by zero".into(),
                })?;
                acc = acc.scale(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Series, AlgebraError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Series, AlgebraError> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = match n.try_into() {
                        Ok(e) if e <= u16::MAX as u32 => e,
                        _ => return self.err("exponent too large"),
                    };
                    Ok(base.pow(e))
                }
                _ => self.err("expected a nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Series, AlgebraError> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let c = GaussianRational::from(BigRational::from_integer(n));
                Ok(Series::constant(self.space, c, self.order))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Op('(')) {
                    return Err(AlgebraError::Parse {
                        col,
                        msg: format!("function `{name}` is not supported (polynomial input only)"),
                    });
                }
                if name == "i" {
                    return Ok(Series::constant(self.space, GaussianRational::i(), self.order));
                }
                let v = self.space.var(&name)?;
                Ok(Series::var(self.space, v, self.order))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `src` into a series over `space`.
pub fn parse_series(src: &str, space: &Arc<VarSpace>, order: Order) -> Result<Series, AlgebraError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.chars().count() + 1,
        space,
        order,
    };
    let s = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(s)
}

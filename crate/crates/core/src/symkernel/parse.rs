//! Infix expression parser.
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*
//! unary  := '-' unary | factor
//! factor := base ('^' '-'? int)?
//! base   := name | int | '(' expr ')' | func '(' expr ')'
//! ```
//!
//! Decimal literals are rejected; write fractions as `a/b`.

use super::canon::try_canonicalize;
use super::expr::{Expr, Func};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { offset: usize, name: String },
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Names accepted as opaque unary functions, written `f(..)`, `f'(..)`.
    pub opaque: BTreeSet<String>,
    /// Skip canonicalization of the result.
    pub raw: bool,
}

/// Parses and canonicalizes.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, &ParseOptions::default())
}

pub fn parse_with(text: &str, opts: &ParseOptions) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        opts,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    if opts.raw {
        return Ok(e);
    }
    try_canonicalize(&e).map_err(|_| ParseError::DivisionByZero)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    opts: &'a ParseOptions,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = Vec::new();
        let first_neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let t = self.term()?;
        terms.push(if first_neg { -t } else { t });
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(-self.term()?);
            } else {
                break;
            }
        }
        Ok(Expr::add_all(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.unary()?;
            } else if self.eat(b'/') {
                acc = acc / self.unary()?;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.eat(b'^') {
            let neg = if self.eat(b'(') {
                let neg = self.eat(b'-');
                let k = self.integer()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)` after exponent"));
                }
                return Ok(Expr::pow(&base, signed(neg, k, self)?));
            } else {
                self.eat(b'-')
            };
            let k = self.integer()?;
            return Ok(Expr::pow(&base, signed(neg, k, self)?));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            return Err(self.err("decimal literals are not allowed; write a fraction"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Expr::num(BigRational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                let mut primes = 0u32;
                while self.pos < self.src.len() && self.src[self.pos] == b'\'' {
                    primes += 1;
                    self.pos += 1;
                }
                if self.peek() == Some(b'(') {
                    let func = if primes == 0 {
                        Func::from_name(&name)
                    } else {
                        None
                    };
                    let func = match func {
                        Some(f) => f,
                        None if self.opts.opaque.contains(&name) => Func::Opaque {
                            name: Arc::from(name.as_str()),
                            order: primes,
                        },
                        None => {
                            return Err(ParseError::UnknownFunction {
                                offset: start,
                                name,
                            })
                        }
                    };
                    self.pos += 1;
                    let arg = self.expr()?;
                    if !self.eat(b')') {
                        return Err(self.err("expected `)` after function argument"));
                    }
                    return Ok(Expr::func(func, arg));
                }
                if primes > 0 {
                    return Err(ParseError::Syntax {
                        offset: start,
                        message: "primes are only allowed on opaque function names".into(),
                    });
                }
                Ok(Expr::sym(&name))
            }
            Some(_) => Err(self.err("unexpected character")),
        }
    }
}

fn signed(neg: bool, k: BigInt, p: &Parser) -> Result<i64, ParseError> {
    let k: i64 = k.try_into().map_err(|_| p.err("exponent too large"))?;
    Ok(if neg { -k } else { k })
}

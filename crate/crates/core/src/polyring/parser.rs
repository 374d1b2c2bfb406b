//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := var | int ['/' int] | '(' expr ')'
//! ```
//!
//! Variable tokens must match a declared name exactly. Juxtaposition is
//! rejected (`2x` and `x y` are syntax errors).

use num_bigint::BigInt;
use num_traits::Zero;

use super::polynomial::{Coeff, Polynomial};
use super::varset::Ring;
use super::PolyError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    /// Number with a fractional part; never valid, lexed for error reporting.
    Decimal,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((Tok::Plus, start)),
            '-' => out.push((Tok::Minus, start)),
            '*' => out.push((Tok::Star, start)),
            '^' => out.push((Tok::Caret, start)),
            '/' => out.push((Tok::Slash, start)),
            '(' => out.push((Tok::LParen, start)),
            ')' => out.push((Tok::RParen, start)),
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    out.push((Tok::Decimal, start));
                    continue;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((Tok::Int(n), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            other => return Err(PolyError::SyntaxError { pos: start, msg: format!("unexpected character {other:?}") }),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    ring: &'a Ring,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn syntax(&self, msg: impl Into<String>) -> PolyError {
        PolyError::SyntaxError { pos: self.offset(), msg: msg.into() }
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let negate = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            let f = self.factor()?;
            acc = acc.try_mul(&f)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.base()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        match self.bump() {
            Some(Tok::Int(n)) => {
                let e: u32 = n.try_into().map_err(|_| PolyError::ExponentOverflow)?;
                base.pow(e)
            }
            Some(Tok::Minus) | Some(Tok::Decimal) => Err(PolyError::NonIntegerExponent { pos: at }),
            Some(Tok::Ident(_)) | Some(Tok::LParen) => Err(PolyError::NonIntegerExponent { pos: at }),
            _ => Err(PolyError::SyntaxError { pos: at, msg: "expected exponent".into() }),
        }
    }

    fn base(&mut self) -> Result<Polynomial, PolyError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Ident(name)) => match self.ring.index_of(&name) {
                Some(i) => Ok(Polynomial::var(self.ring, i)),
                None => Err(PolyError::UnknownVariable { name, pos: at }),
            },
            Some(Tok::Int(n)) => {
                if self.peek() == Some(&Tok::Slash) {
                    self.bump();
                    let dat = self.offset();
                    match self.bump() {
                        Some(Tok::Int(d)) if !d.is_zero() => Ok(Polynomial::constant(self.ring, Coeff::new(n, d))),
                        Some(Tok::Int(_)) => Err(PolyError::SyntaxError { pos: dat, msg: "division by zero".into() }),
                        _ => Err(PolyError::SyntaxError { pos: dat, msg: "expected integer denominator".into() }),
                    }
                } else {
                    Ok(Polynomial::constant(self.ring, Coeff::from_integer(n)))
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                if self.bump() != Some(Tok::RParen) {
                    self.pos -= 1;
                    return Err(self.syntax("expected ')'"));
                }
                Ok(inner)
            }
            Some(Tok::Decimal) => {
                Err(PolyError::SyntaxError { pos: at, msg: "decimal literals are not allowed".into() })
            }
            Some(_) => Err(PolyError::SyntaxError { pos: at, msg: "expected operand".into() }),
            None => Err(PolyError::SyntaxError { pos: at, msg: "unexpected end of input".into() }),
        }
    }
}

/// Parses `text` into a polynomial over `ring`.
pub fn parse_poly(text: &str, ring: &Ring) -> Result<Polynomial, PolyError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(PolyError::SyntaxError { pos: 0, msg: "empty expression".into() });
    }
    let mut p = Parser { toks, pos: 0, end: text.len(), ring };
    let out = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.syntax("unexpected token (implicit multiplication is not accepted)"));
    }
    Ok(out)
}

//! Arithmetic expressions over the prototype ring, e.g. `(t - t^(-1)) * inv(1 + t)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Exponent, NovikovElement, TruncatedSeries};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(BigInt),
    T,
    Inv,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let tok = match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => Token::Plus,
            '-' => Token::Minus,
            '*' => Token::Star,
            '/' => Token::Slash,
            '^' => Token::Caret,
            '(' => Token::LParen,
            ')' => Token::RParen,
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = src[start..i].parse().expect("digits");
                out.push((start, Token::Int(n)));
                continue;
            }
            'a'..='z' | 'A'..='Z' => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                match &src[start..i] {
                    "t" => out.push((start, Token::T)),
                    "inv" => out.push((start, Token::Inv)),
                    word => return Err(Error::parse(start, format!("unknown name `{word}`"))),
                }
                continue;
            }
            other => return Err(Error::parse(start, format!("unexpected character `{other}`"))),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    cutoff: Exponent,
    allow_inverse: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn eat(&mut self, tok: &Token) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Token, what: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(Error::parse(self.offset(), format!("expected {what}")))
        }
    }

    fn invert(&self, x: &TruncatedSeries, at: usize) -> Result<TruncatedSeries> {
        if !self.allow_inverse {
            return Err(Error::parse(at, "inverses are not allowed here"));
        }
        x.invert(self.cutoff).map_err(|e| Error::parse(at, e.to_string()))
    }

    fn expr(&mut self) -> Result<TruncatedSeries> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Token::Plus) {
                acc = acc.add(&self.term()?);
            } else if self.eat(&Token::Minus) {
                acc = acc.add(&self.term()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<TruncatedSeries> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(&Token::Star) {
                acc = acc.mul(&self.factor()?);
            } else if self.peek() == Some(&Token::Slash) {
                let at = self.offset();
                self.pos += 1;
                let rhs = self.factor()?;
                acc = acc.mul(&self.invert(&rhs, at)?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<TruncatedSeries> {
        if self.eat(&Token::Minus) {
            return Ok(self.factor()?.neg());
        }
        if self.eat(&Token::Plus) {
            return self.factor();
        }
        let at = self.offset();
        let is_t = self.peek() == Some(&Token::T);
        let base = self.atom()?;
        if !self.eat(&Token::Caret) {
            return Ok(base);
        }
        let exp_at = self.offset();
        let exponent = self.exponent()?;
        if is_t {
            return Ok(TruncatedSeries::exact(NovikovElement::exp_hom(exponent)));
        }
        if !exponent.is_integer() {
            return Err(Error::parse(exp_at, "fractional powers are only defined for t"));
        }
        let n = *exponent.numer();
        let magnitude = u32::try_from(n.unsigned_abs())
            .map_err(|_| Error::parse(exp_at, "exponent too large"))?;
        let mut acc = TruncatedSeries::exact(NovikovElement::one());
        for _ in 0..magnitude {
            acc = acc.mul(&base);
        }
        if n < 0 {
            acc = self.invert(&acc, at)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<TruncatedSeries> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Token::Int(n)) => {
                self.pos += 1;
                Ok(TruncatedSeries::exact(NovikovElement::constant(n)))
            }
            Some(Token::T) => {
                self.pos += 1;
                Ok(TruncatedSeries::exact(NovikovElement::exp_hom(Exponent::one())))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(&Token::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Token::Inv) => {
                self.pos += 1;
                self.expect(&Token::LParen, "`(` after inv")?;
                let inner = self.expr()?;
                self.expect(&Token::RParen, "`)`")?;
                self.invert(&inner, at)
            }
            _ => Err(Error::parse(at, "expected a number, `t`, `inv` or `(`")),
        }
    }

    fn small_int(&mut self) -> Result<i64> {
        let at = self.offset();
        let negative = self.eat(&Token::Minus);
        match self.peek().cloned() {
            Some(Token::Int(n)) => {
                self.pos += 1;
                let v = i64::try_from(n).map_err(|_| Error::parse(at, "exponent out of range"))?;
                Ok(if negative { -v } else { v })
            }
            _ => Err(Error::parse(self.offset(), "expected an integer")),
        }
    }

    fn exponent(&mut self) -> Result<Exponent> {
        if !self.eat(&Token::LParen) {
            return Ok(Exponent::from_integer(self.small_int()?));
        }
        let numer = self.small_int()?;
        let mut denom = 1;
        if self.eat(&Token::Slash) {
            let at = self.offset();
            denom = self.small_int()?;
            if denom == 0 {
                return Err(Error::parse(at, "zero denominator"));
            }
        }
        self.expect(&Token::RParen, "`)` closing the exponent")?;
        Ok(Exponent::new(numer, denom))
    }
}

fn run(src: &str, cutoff: Exponent, allow_inverse: bool) -> Result<TruncatedSeries> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: src.len(),
        cutoff,
        allow_inverse,
    };
    if p.tokens.is_empty() {
        return Err(Error::parse(0, "empty expression"));
    }
    let value = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::parse(p.offset(), "unexpected trailing input"));
    }
    Ok(value)
}

/// Evaluates an expression; inverses (`inv(x)`, `x^(-n)`, `a / b`) are expanded so the
/// result is correct through `cutoff` wherever the inputs allow.
pub fn evaluate_expression(src: &str, cutoff: Exponent) -> Result<TruncatedSeries> {
    run(src, cutoff, true)
}

pub(super) fn parse_exact(src: &str) -> Result<NovikovElement> {
    let value = run(src, Exponent::zero(), false)?;
    debug_assert!(value.is_exact());
    Ok(value.known_terms().clone())
}

//! Text syntax for polynomials: `2/3*x1^2*x3 - x2 + 1`.
//!
//! Variables are `x1..xn`. The single letters `x`, `y`, `z` alias `x1`, `x2`,
//! `x3`, and `t` aliases the last variable `xn`. Products may be written with
//! `*` or by juxtaposition (`2x1`, `3 x2`), powers with `^`, and parentheses
//! nest. Division is allowed by constants only. Decimal literals are read
//! exactly (`0.25` is `1/4`).

use num::{BigInt, BigRational, One, Zero};

use super::polynomial::Polynomial;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(BigRational),
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str, nvars: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1
            }
            '-' => {
                out.push(Token::Minus);
                i += 1
            }
            '*' => {
                out.push(Token::Star);
                i += 1
            }
            '/' => {
                out.push(Token::Slash);
                i += 1
            }
            '^' => {
                out.push(Token::Caret);
                i += 1
            }
            '(' => {
                out.push(Token::LParen);
                i += 1
            }
            ')' => {
                out.push(Token::RParen);
                i += 1
            }
            d if d.is_ascii_digit() || d == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().collect();
                out.push(Token::Num(parse_decimal(&lit)?));
            }
            a if a.is_ascii_alphabetic() => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                out.push(Token::Var(resolve_var(&name, nvars)?));
            }
            other => return Err(Error::parse(format!("unexpected character '{other}'"))),
        }
    }
    Ok(out)
}

fn parse_decimal(lit: &str) -> Result<BigRational> {
    let bad = || Error::parse(format!("bad number '{lit}'"));
    let (int, frac) = match lit.split_once('.') {
        Some((a, b)) => (a, b),
        None => (lit, ""),
    };
    if (int.is_empty() && frac.is_empty()) || frac.contains('.') {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(num, den))
}

fn resolve_var(name: &str, nvars: usize) -> Result<usize> {
    let idx = match name {
        "x" => 0,
        "y" => 1,
        "z" => 2,
        "t" => nvars.checked_sub(1).ok_or_else(|| Error::parse("no variables"))?,
        _ => {
            let digits = name
                .strip_prefix('x')
                .filter(|d| !d.is_empty())
                .ok_or_else(|| Error::parse(format!("unknown variable '{name}'")))?;
            let k: usize = digits.parse().map_err(|_| Error::parse(format!("unknown variable '{name}'")))?;
            if k == 0 {
                return Err(Error::parse("variables are numbered from x1"));
            }
            k - 1
        }
    };
    if idx >= nvars {
        return Err(Error::Parse {
            line: None,
            message: format!("variable '{name}' out of range for n={nvars}"),
        });
    }
    Ok(idx)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Plus => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Token::Minus => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let d = self.power()?;
                    let c = d
                        .as_constant()
                        .ok_or_else(|| Error::parse("division by a non-constant polynomial"))?;
                    if c.is_zero() {
                        return Err(Error::parse("division by zero"));
                    }
                    acc = acc.scale(&(BigRational::one() / c));
                }
                // juxtaposition: `2x1`, `3 (x1 + 1)`
                Some(Token::Num(_)) | Some(Token::Var(_)) | Some(Token::LParen) => {
                    acc = &acc * &self.power()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.primary()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let e = match self.next() {
                Some(Token::Num(r)) if r.is_integer() => r
                    .to_integer()
                    .try_into()
                    .map_err(|_| Error::parse("exponent too large"))?,
                _ => return Err(Error::parse("expected a non-negative integer exponent after '^'")),
            };
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Polynomial> {
        match self.next() {
            Some(Token::Num(r)) => Ok(Polynomial::constant(self.nvars, r)),
            Some(Token::Var(i)) => Polynomial::var(self.nvars, i),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(Error::parse("missing ')'")),
                }
            }
            Some(t) => Err(Error::parse(format!("unexpected token {t:?}"))),
            None => Err(Error::parse("unexpected end of expression")),
        }
    }
}

/// Parses a polynomial in `nvars` variables.
pub fn parse_polynomial(src: &str, nvars: usize) -> Result<Polynomial> {
    let tokens = tokenize(src, nvars)?;
    if tokens.is_empty() {
        return Err(Error::parse("empty polynomial"));
    }
    let mut p = Parser { tokens: &tokens, pos: 0, nvars };
    let poly = p.expr()?;
    if p.pos != tokens.len() {
        return Err(Error::parse(format!("trailing input after position {}", p.pos)));
    }
    Ok(poly)
}

/// Parses an exact rational literal: `3`, `-2/5`, `0.125`.
pub fn parse_rational(src: &str) -> Result<BigRational> {
    let s = src.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, s.strip_prefix('+').unwrap_or(s).trim()),
    };
    let value = match body.split_once('/') {
        Some((a, b)) => {
            let d = parse_decimal(b.trim())?;
            if d.is_zero() {
                return Err(Error::parse("zero denominator"));
            }
            parse_decimal(a.trim())? / d
        }
        None => parse_decimal(body)?,
    };
    Ok(if neg { -value } else { value })
}

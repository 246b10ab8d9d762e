//! Expression syntax for rational functions in `z` with Gaussian-rational
//! coefficients: `+ - * / ^`, parentheses, the imaginary unit `i`, decimal
//! and integer literals, and implicit multiplication (`2z`, `3/4 i`).

use super::gaussian::GaussianRational as G;
use super::ratfunc::RationalFunction;
use super::rational::parse_rational;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Z,
    I,
    Op(char),
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        match c {
            ' ' | '\t' | '\n' => {}
            '0'..='9' | '.' => {
                let start = k;
                while k + 1 < chars.len() && (chars[k + 1].is_ascii_digit() || chars[k + 1] == '.')
                {
                    k += 1;
                }
                out.push(Tok::Num(chars[start..=k].iter().collect()));
            }
            'z' => out.push(Tok::Z),
            'i' => out.push(Tok::I),
            '+' | '-' | '*' | '/' | '^' => out.push(Tok::Op(c)),
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            _ => {
                return Err(Error::Parse(format!(
                    "unexpected character {c:?} at offset {k} in {s:?}"
                )))
            }
        }
        k += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at token {} in {:?}", self.pos, self.src))
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' {
                acc.add(&rhs)
            } else {
                acc.sub(&rhs)
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    if rhs.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                    acc = acc.div(&rhs)?;
                }
                Some(Tok::Num(_) | Tok::Z | Tok::I | Tok::LParen) => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Op('^')) {
            return Ok(base);
        }
        self.pos += 1;
        let negative = match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                true
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let e: i32 = match self.bump() {
            Some(Tok::Num(n)) => n
                .parse()
                .map_err(|_| self.err("exponent must be an integer"))?,
            _ => return Err(self.err("expected integer exponent")),
        };
        let e = if negative { -e } else { e };
        if e < 0 && base.is_zero() {
            return Err(self.err("negative power of zero"));
        }
        base.pow(e)
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.bump() {
            Some(Tok::Num(n)) => Ok(RationalFunction::constant(G::from_rational(
                parse_rational(&n)?,
            ))),
            Some(Tok::Z) => Ok(RationalFunction::z()),
            Some(Tok::I) => Ok(RationalFunction::constant(G::i())),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(self.err("expected ')'")),
                }
            }
            _ => Err(self.err("expected a number, z, i or '('")),
        }
    }
}

/// Parses a rational function of `z`, e.g. `"(z-1)/(z-3)"` or `"z^2 + (1/2+i) z"`.
pub fn parse_rational_function(s: &str) -> Result<RationalFunction> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        src: s,
    };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

/// Parses a Gaussian rational such as `"1/2+3/4 i"`, `"-i"` or `"5"`.
pub fn parse_gaussian(s: &str) -> Result<G> {
    let f = parse_rational_function(s)?;
    f.as_constant()
        .ok_or_else(|| Error::Parse(format!("{s:?} is not a constant")))
}

impl std::str::FromStr for RationalFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_rational_function(s)
    }
}

impl std::str::FromStr for G {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_gaussian(s)
    }
}

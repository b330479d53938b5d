//! A small expression language for diagram observables `f(r, s)`:
//! polynomials in `r`, `s`, `s - r` plus the bounded primitives
//! `exp(-a*s)` and `min(s, M)`, closed under `+`, `-`, `*`, and integer
//! powers. Anything outside the language is rejected at parse time.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    Const(f64),
    Birth,
    Death,
    /// `s - r`
    Lifetime,
    /// `exp(-a * s)` with `a > 0`
    ExpNegDeath(f64),
    /// `min(s, cap)`
    MinDeath(f64),
    Add(Box<Observable>, Box<Observable>),
    Mul(Box<Observable>, Box<Observable>),
    Pow(Box<Observable>, u32),
}

impl Observable {
    pub fn eval(&self, r: f64, s: f64) -> f64 {
        match self {
            Observable::Const(c) => *c,
            Observable::Birth => r,
            Observable::Death => s,
            Observable::Lifetime => s - r,
            Observable::ExpNegDeath(a) => (-a * s).exp(),
            Observable::MinDeath(cap) => s.min(*cap),
            Observable::Add(a, b) => a.eval(r, s) + b.eval(r, s),
            Observable::Mul(a, b) => a.eval(r, s) * b.eval(r, s),
            Observable::Pow(a, e) => a.eval(r, s).powi(*e as i32),
        }
    }

    /// Degree of the polynomial growth bound `|f(r, s)| = O(1 + s^deg)` on
    /// the region `r <= s`.
    pub fn growth_degree(&self) -> u32 {
        match self {
            Observable::Const(_) | Observable::ExpNegDeath(_) | Observable::MinDeath(_) => 0,
            Observable::Birth | Observable::Death | Observable::Lifetime => 1,
            Observable::Add(a, b) => a.growth_degree().max(b.growth_degree()),
            Observable::Mul(a, b) => a.growth_degree() + b.growth_degree(),
            Observable::Pow(a, e) => a.growth_degree() * e,
        }
    }

    /// Parses expressions like `s - r`, `(s-r)^2 + 3*r`, `exp(-0.5*s)`,
    /// `min(s, 4)`.
    pub fn parse(src: &str) -> Result<Observable> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let expr = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
        }
        Ok(expr)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    R,
    S,
    Exp,
    Min,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            ',' => {
                out.push(Tok::Comma);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                    i += 1;
                }
                let text = &src[start..i];
                out.push(Tok::Num(text.parse().map_err(|_| {
                    Error::Parse(format!("bad number `{text}`"))
                })?));
            }
            'a'..='z' => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_alphabetic() {
                    i += 1;
                }
                match &src[start..i] {
                    "r" => out.push(Tok::R),
                    "s" => out.push(Tok::S),
                    "exp" => out.push(Tok::Exp),
                    "min" => out.push(Tok::Min),
                    other => return Err(Error::Parse(format!("unknown identifier `{other}`"))),
                }
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        match self.bump() {
            Some(got) if got == t => Ok(()),
            got => Err(Error::Parse(format!("expected {t:?}, got {got:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Observable> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = Observable::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = Observable::Add(
                        Box::new(acc),
                        Box::new(Observable::Mul(
                            Box::new(Observable::Const(-1.0)),
                            Box::new(rhs),
                        )),
                    );
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Observable> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            acc = Observable::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Observable> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            match self.bump() {
                Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => {
                    return Ok(Observable::Pow(Box::new(base), v as u32));
                }
                got => return Err(Error::Parse(format!("exponent must be a nonnegative integer, got {got:?}"))),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Observable> {
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Observable::Const(v)),
            Some(Tok::Minus) => {
                let inner = self.atom()?;
                Ok(Observable::Mul(Box::new(Observable::Const(-1.0)), Box::new(inner)))
            }
            Some(Tok::R) => Ok(Observable::Birth),
            Some(Tok::S) => Ok(Observable::Death),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::Exp) => {
                // exp(-a*s) or exp(-s)
                self.expect(Tok::LParen)?;
                self.expect(Tok::Minus)?;
                let a = match self.bump() {
                    Some(Tok::Num(a)) => {
                        if self.peek() == Some(&Tok::Star) {
                            self.bump();
                        }
                        self.expect(Tok::S)?;
                        a
                    }
                    Some(Tok::S) => 1.0,
                    got => return Err(Error::Parse(format!("exp wants `-a*s`, got {got:?}"))),
                };
                self.expect(Tok::RParen)?;
                if a <= 0.0 {
                    return Err(Error::Parse("exp rate must be positive".into()));
                }
                Ok(Observable::ExpNegDeath(a))
            }
            Some(Tok::Min) => {
                self.expect(Tok::LParen)?;
                self.expect(Tok::S)?;
                self.expect(Tok::Comma)?;
                let cap = match self.bump() {
                    Some(Tok::Num(v)) => v,
                    got => return Err(Error::Parse(format!("min cap must be a number, got {got:?}"))),
                };
                self.expect(Tok::RParen)?;
                Ok(Observable::MinDeath(cap))
            }
            got => Err(Error::Parse(format!("unexpected token {got:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lifetime_polynomial() {
        let f = Observable::parse("(s-r)^2 + 3*r").unwrap();
        assert_eq!(f.eval(1.0, 4.0), 9.0 + 3.0);
        assert_eq!(f.growth_degree(), 2);
    }

    #[test]
    fn parses_primitives() {
        let f = Observable::parse("exp(-0.5*s)").unwrap();
        assert!((f.eval(0.0, 2.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(f.growth_degree(), 0);
        let g = Observable::parse("min(s, 4)").unwrap();
        assert_eq!(g.eval(0.0, 7.0), 4.0);
        let h = Observable::parse("1").unwrap();
        assert_eq!(h.eval(3.0, 5.0), 1.0);
        let l = Observable::parse("s - r").unwrap();
        assert_eq!(l.eval(1.5, 4.0), 2.5);
    }

    #[test]
    fn rejects_outside_language() {
        assert!(Observable::parse("sin(s)").is_err());
        assert!(Observable::parse("s / r").is_err());
        assert!(Observable::parse("exp(s)").is_err());
        assert!(Observable::parse("s ^ 1.5").is_err());
        assert!(Observable::parse("s r").is_err());
    }
}

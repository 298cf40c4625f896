//! Recursive-descent parser for rational-function literals.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' integer)?
//! atom  := integer | 't' | '(' expr ')'
//! ```
//!
//! `-t^2` is `-(t^2)`; `1/2*t` is `(1/2)*t`. U+2212 is accepted as a minus.

use num_bigint::BigInt;

use super::{Rat, RatFunc};
use crate::error::{Error, Result};

const MAX_EXPONENT: u32 = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    T,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(pos, ch)) = it.peek() {
        let tok = match ch {
            c if c.is_whitespace() => {
                it.next();
                continue;
            }
            '0'..='9' => {
                let mut end = pos;
                while let Some(&(i, d)) = it.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    end = i + 1;
                    it.next();
                }
                out.push((pos, Tok::Int(src[pos..end].parse().expect("digits"))));
                continue;
            }
            't' => Tok::T,
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => return Err(err(pos, format!("unexpected character {other:?}"))),
        };
        it.next();
        out.push((pos, tok));
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    if rhs.is_zero() {
                        return Err(Error::ZeroDenominator);
                    }
                    acc = &acc / &rhs;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump() {
            Tok::Int(e) => {
                let e: u32 = e
                    .try_into()
                    .ok()
                    .filter(|&e| e <= MAX_EXPONENT)
                    .ok_or_else(|| err(pos, "exponent too large"))?;
                Ok(base.pow(e))
            }
            _ => Err(err(pos, "expected a nonnegative integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<RatFunc> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(RatFunc::constant(Rat::from_integer(n))),
            Tok::T => Ok(RatFunc::t()),
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.pos();
                match self.bump() {
                    Tok::RParen => Ok(inner),
                    _ => Err(err(close, "expected ')'")),
                }
            }
            Tok::End => Err(err(pos, "unexpected end of input")),
            other => Err(err(pos, format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses and normalizes a rational function in `t`.
pub fn parse_ratfunc(src: &str) -> Result<RatFunc> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
    };
    let z = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(err(p.pos(), "trailing input"));
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::{rat_frac, Poly};

    #[test]
    fn basic_literals() {
        assert_eq!(
            parse_ratfunc("1 - t").unwrap(),
            RatFunc::from_poly(Poly::from_i64s(&[1, -1]))
        );
        let z = parse_ratfunc("(t^2+2*t-1)/(t-1)").unwrap();
        assert_eq!(z.num(), &Poly::from_i64s(&[-1, 2, 1]));
        assert_eq!(z.den(), &Poly::from_i64s(&[-1, 1]));
        assert_eq!(
            parse_ratfunc("(t^2-1)/(t-1)").unwrap().to_string(),
            "(t + 1)/(1)"
        );
        assert_eq!(
            parse_ratfunc("-t^2").unwrap(),
            RatFunc::from_poly(Poly::from_i64s(&[0, 0, -1]))
        );
        assert_eq!(
            parse_ratfunc("\u{2212}3").unwrap(),
            RatFunc::constant(rat_frac(-3, 1))
        );
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_ratfunc("t/(t-t)"), Err(Error::ZeroDenominator));
        assert!(matches!(
            parse_ratfunc("t + "),
            Err(Error::Parse { pos: 4, .. })
        ));
        assert!(matches!(
            parse_ratfunc("t ^ t"),
            Err(Error::Parse { pos: 4, .. })
        ));
        assert!(matches!(
            parse_ratfunc("2 x"),
            Err(Error::Parse { pos: 2, .. })
        ));
        assert!(matches!(
            parse_ratfunc("(t"),
            Err(Error::Parse { pos: 2, .. })
        ));
        assert!(matches!(
            parse_ratfunc("t t"),
            Err(Error::Parse { pos: 2, .. })
        ));
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "(-3*t^3 + 1/2*t - 1)/(t^2 + 1)",
            "(7/3)/(1)",
            "(0)/(1)",
            "(t)/(t - 5/2)",
        ] {
            let z = parse_ratfunc(s).unwrap();
            assert_eq!(parse_ratfunc(&z.to_string()).unwrap(), z);
        }
    }
}

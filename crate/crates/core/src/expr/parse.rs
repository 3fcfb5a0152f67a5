//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := signed (('*' | '/') signed)*
//! signed   := ('-' | '+') signed | power
//! power    := base ('^' exponent)?
//! base     := number | ident | '(' expr ')' | func '(' expr ')'
//! exponent := ['-'] integer | '(' ['-'] integer ['/' integer] ')'
//! ```
//!
//! Numbers are decimal literals with optional fraction and exponent; they
//! are read exactly as rationals.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Chart, Expr, Func, Rational, Symbol};
use crate::error::{Error, Result};

/// Parse against a chart. Identifiers that are not chart variables become
/// named parameters, except names shaped like chart variables (`q3`, `p2`,
/// `u`, `pu`) that this chart does not have.
pub fn parse(text: &str, chart: &Chart) -> Result<Expr> {
    Parser::new(text, chart, None).run()
}

/// Parse with an explicit parameter list; any other identifier that is not
/// a chart variable is an error.
pub fn parse_with_params(text: &str, chart: &Chart, params: &[&str]) -> Result<Expr> {
    Parser::new(text, chart, Some(params)).run()
}

fn reserved_shape(name: &str) -> bool {
    if name == "u" || name == "pu" {
        return true;
    }
    let rest = name.strip_prefix('q').or_else(|| name.strip_prefix('p'));
    matches!(rest, Some(d) if !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    chart: &'a Chart,
    params: Option<&'a [&'a str]>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, chart: &'a Chart, params: Option<&'a [&'a str]>) -> Self {
        Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            chart,
            params,
        }
    }

    fn run(mut self) -> Result<Expr> {
        let e = self.expr()?;
        self.skip_ws();
        if self.pos < self.bytes.len() {
            return Err(self.error(format!("unexpected `{}`", self.peek_char())));
        }
        Ok(e)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn peek_char(&self) -> char {
        self.src[self.pos..].chars().next().unwrap_or('\0')
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else if self.pos >= self.bytes.len() {
            Err(self.error(format!("expected `{}`, found end of input", b as char)))
        } else {
            Err(self.error(format!("expected `{}`", b as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(self.term()?.neg());
            } else {
                break;
            }
        }
        Ok(Expr::add_all(terms))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.signed()?];
        loop {
            if self.eat(b'*') {
                factors.push(self.signed()?);
            } else if self.eat(b'/') {
                let start = self.pos;
                let d = self.signed()?;
                if d.is_literal_zero() {
                    self.pos = start;
                    return Err(self.error("division by literal zero"));
                }
                factors.push(d.recip());
            } else {
                break;
            }
        }
        Ok(Expr::mul_all(factors))
    }

    fn signed(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            Ok(self.signed()?.neg())
        } else if self.eat(b'+') {
            self.signed()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if self.eat(b'^') {
            let r = self.exponent()?;
            return Ok(base.pow(r));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Rational> {
        if self.eat(b'(') {
            let neg = self.eat(b'-');
            let p = self.integer()?;
            let mut r = Rational::from_integer(p);
            if self.eat(b'/') {
                let q = self.integer()?;
                if q.is_zero() {
                    return Err(self.error("zero denominator in exponent"));
                }
                r /= Rational::from_integer(q);
            }
            self.expect(b')')?;
            Ok(if neg { -r } else { r })
        } else {
            let neg = self.eat(b'-');
            let p = Rational::from_integer(self.integer()?);
            Ok(if neg { -p } else { p })
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        Ok(BigInt::from_str(&self.src[start..self.pos]).expect("digits"))
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(),
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => self.ident(),
            Some(_) => Err(self.error(format!("unexpected `{}`", self.peek_char()))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let mut digits = String::new();
        let mut scale: i64 = 0;
        let mut seen_dot = false;
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_digit() {
                digits.push(b as char);
                if seen_dot {
                    scale -= 1;
                }
            } else if b == b'.' && !seen_dot {
                seen_dot = true;
            } else {
                break;
            }
            self.pos += 1;
        }
        if digits.is_empty() {
            self.pos = start;
            return Err(self.error("malformed number"));
        }
        if self.pos < self.bytes.len() && (self.bytes[self.pos] == b'e' || self.bytes[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            let neg = match self.bytes.get(self.pos) {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let exp_start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if exp_start == self.pos {
                // Not an exponent: `2e` would be the number 2 times `e`.
                self.pos = save;
            } else {
                let e: i64 = self.src[exp_start..self.pos]
                    .parse()
                    .map_err(|_| self.error("exponent too large"))?;
                scale += if neg { -e } else { e };
            }
        }
        let mantissa = BigInt::from_str(&digits).expect("digits");
        let ten = Rational::from_integer(BigInt::from(10));
        let factor = if scale >= 0 {
            num_traits::pow(ten, scale as usize)
        } else {
            num_traits::pow(ten, (-scale) as usize).recip()
        };
        Ok(Expr::num(Rational::from_integer(mantissa) * factor))
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        if let Some(f) = Func::from_name(name) {
            if self.peek() == Some(b'(') {
                self.pos += 1;
                let arg = self.expr()?;
                self.expect(b')')?;
                return Ok(Expr::apply(f, arg));
            }
        }
        let sym = Symbol::new(name);
        if self.chart.contains(&sym) {
            return Ok(Expr::symbol(&sym));
        }
        let unknown = || Error::UnknownIdentifier {
            name: name.to_string(),
            offset: start,
        };
        if reserved_shape(name) {
            return Err(unknown());
        }
        match self.params {
            Some(list) if !list.contains(&name) => Err(unknown()),
            _ => Ok(Expr::symbol(&sym)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::PhasePoint;

    fn chart2() -> Chart {
        Chart::standard(2)
    }

    #[test]
    fn hamiltonian_with_parameter() {
        let e = parse("p1^2/2 + l/(q1^2)", &chart2()).unwrap();
        let names: Vec<String> = e.free_symbols().iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["l", "p1", "q1"]);
    }

    #[test]
    fn negative_power_of_sine() {
        let e = parse("sin(3*q2)^(-2)", &chart2()).unwrap();
        let pt = PhasePoint::from_pairs([("q2", 0.3)]);
        let expected = 1.0 / (0.9f64).sin().powi(2);
        assert!((e.eval(&pt).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn dangling_operator_reports_offset() {
        match parse("q1 +", &chart2()) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn chart_shaped_names_must_exist() {
        assert!(matches!(
            parse("q3 + 1", &chart2()),
            Err(Error::UnknownIdentifier { offset: 0, .. })
        ));
        assert!(parse("u", &chart2()).is_err());
        assert!(parse("u", &chart2().extended()).is_ok());
    }

    #[test]
    fn declared_parameters_are_enforced() {
        assert!(parse_with_params("a*q1", &chart2(), &["a"]).is_ok());
        assert!(parse_with_params("b*q1", &chart2(), &["a"]).is_err());
    }

    #[test]
    fn decimals_are_exact() {
        let e = parse("0.1 + 0.2", &chart2()).unwrap();
        assert_eq!(e.as_rational().unwrap(), &(Rational::new(3.into(), 10.into())));
        let e = parse("2.5e-1", &chart2()).unwrap();
        assert_eq!(e.as_rational().unwrap(), &(Rational::new(1.into(), 4.into())));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let e = parse("-q1^2", &chart2()).unwrap();
        let pt = PhasePoint::from_pairs([("q1", 3.0)]);
        assert_eq!(e.eval(&pt).unwrap(), -9.0);
    }

    #[test]
    fn printing_round_trips() {
        let chart = chart2().extended();
        for src in [
            "p1^2/2 + l/(q1^2)",
            "-3*q1 + (1/2)*sin(q2)^(-2) - sqrt(u)",
            "(q1 + 1)^(3/2)*exp(-u) - 1/(2*u^2)",
            "cosh(2*pu)*sinh(q1 - q2)",
        ] {
            let e = parse(src, &chart).unwrap();
            let again = parse(&e.to_string(), &chart).unwrap();
            assert_eq!(e, again, "{src} printed as {e}");
        }
    }
}

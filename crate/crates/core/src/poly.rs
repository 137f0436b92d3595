//! Multivariate polynomials with real coefficients, used as the scalar
//! inputs of the metric families (`f` of `g_f`, the `f_i` of `g_F`, and
//! conformal factors).
//!
//! The text syntax is a sum of monomials, for example `x1^2 - 3/2*x2*x3 + 1`.
//! Coefficients may be integers, decimals or fractions; the `*` between a
//! coefficient and a variable may be omitted.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::jet::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    vars: Vec<String>,
    /// exponent vector -> coefficient, zero coefficients removed
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Polynomial {
    pub fn zero(vars: &[&str]) -> Self {
        Polynomial {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    /// `c * Π x_i^{exps_i}`
    pub fn monomial(vars: &[&str], c: f64, exps: &[u32]) -> Self {
        let mut p = Polynomial::zero(vars);
        assert_eq!(exps.len(), vars.len(), "one exponent per variable");
        p.add_term(exps.to_vec(), c);
        p
    }

    pub fn parse(text: &str, vars: &[&str]) -> Result<Self> {
        Parser::new(text, vars).parse()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    fn add_term(&mut self, exps: Vec<u32>, c: f64) {
        let entry = self.terms.entry(exps).or_insert(0.0);
        *entry += c;
        let cleared = *entry == 0.0;
        if cleared {
            self.terms.retain(|_, v| *v != 0.0);
        }
    }

    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut out = Polynomial {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        for (exps, &c) in &self.terms {
            if exps[i] == 0 {
                continue;
            }
            let mut e = exps.clone();
            e[i] -= 1;
            out.add_term(e, c * exps[i] as f64);
        }
        out
    }

    /// Total degree, 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> S {
        assert_eq!(x.len(), self.vars.len(), "point has wrong arity");
        let zero = x[0].lift(0.0);
        self.terms.iter().fold(zero, |acc, (exps, &c)| {
            let mut term = x[0].lift(c);
            for (xi, &e) in x.iter().zip(exps) {
                if e > 0 {
                    term = term * xi.powi(e);
                }
            }
            acc + term
        })
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest degree first, then lexicographic
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then(b.0.cmp(a.0))
        });
        for (n, (exps, &c)) in terms.into_iter().enumerate() {
            let sign = if c < 0.0 { "-" } else { "+" };
            if n == 0 {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            let factors: Vec<String> = exps
                .iter()
                .zip(&self.vars)
                .filter(|(e, _)| **e > 0)
                .map(|(&e, v)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect();
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else {
                if a != 1.0 {
                    write!(f, "{a}*")?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, vars: &'a [&'a str]) -> Self {
        Parser {
            src,
            chars: src.chars().collect(),
            pos: 0,
            vars,
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("polynomial `{}` at offset {}: {msg}", self.src, self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Polynomial> {
        let mut poly = Polynomial::zero(self.vars);
        if self.peek().is_none() {
            return Err(self.err("empty expression"));
        }
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    1.0
                }
                Some('-') => {
                    self.pos += 1;
                    -1.0
                }
                Some(_) if first => 1.0,
                Some(c) => return Err(self.err(&format!("expected `+` or `-`, found `{c}`"))),
                None => break,
            };
            first = false;
            let (c, exps) = self.term()?;
            poly.add_term(exps, sign * c);
        }
        Ok(poly)
    }

    fn term(&mut self) -> Result<(f64, Vec<u32>)> {
        let mut coef = 1.0;
        let mut exps = vec![0u32; self.vars.len()];
        let mut seen_factor = false;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
            coef = self.rational()?;
            seen_factor = true;
        }
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    if !self.factor(&mut coef, &mut exps)? {
                        return Err(self.err("expected a factor after `*`"));
                    }
                }
                Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                    self.factor(&mut coef, &mut exps)?;
                }
                _ => break,
            }
            seen_factor = true;
        }
        if !seen_factor {
            return Err(self.err("expected a term"));
        }
        Ok((coef, exps))
    }

    /// Parses a number or a variable power; returns false if neither is present.
    fn factor(&mut self, coef: &mut f64, exps: &mut [u32]) -> Result<bool> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => {
                *coef *= self.rational()?;
                Ok(true)
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                let idx = self.vars.iter().position(|v| *v == name).ok_or_else(|| {
                    self.err(&format!(
                        "unknown variable `{name}` (expected one of {})",
                        self.vars.join(", ")
                    ))
                })?;
                let mut e = 1;
                if self.peek() == Some('^') {
                    self.pos += 1;
                    e = self.integer()?;
                }
                exps[idx] += e;
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    fn integer(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("expected a non-negative integer exponent"))
    }

    fn decimal(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_ascii_digit() || self.chars[self.pos] == '.')
        {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err(&format!("bad number `{s}`")))
    }

    fn rational(&mut self) -> Result<f64> {
        let num = self.decimal()?;
        if self.peek() == Some('/') {
            self.pos += 1;
            let den = self.decimal()?;
            if den == 0.0 {
                return Err(self.err("zero denominator"));
            }
            return Ok(num / den);
        }
        Ok(num)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet2;

    const XYZ: [&str; 3] = ["x1", "x2", "x3"];

    #[test]
    fn parses_and_evaluates() {
        let p = Polynomial::parse("x1^2 - x2^2 + x3^2", &XYZ).unwrap();
        assert_eq!(p.eval_f64(&[1.0, 2.0, 3.0]), 1.0 - 4.0 + 9.0);
        let q = Polynomial::parse("3/2*x1*x2^2 + 2x3 - 0.5", &XYZ).unwrap();
        assert!((q.eval_f64(&[2.0, 1.0, 1.0]) - (3.0 + 2.0 - 0.5)).abs() < 1e-15);
        let c = Polynomial::parse(" -4 ", &XYZ).unwrap();
        assert_eq!(c.eval_f64(&[9.0, 9.0, 9.0]), -4.0);
        assert_eq!(c.degree(), 0);
    }

    #[test]
    fn like_terms_combine() {
        let p = Polynomial::parse("x1*x2 + x2*x1 - 2*x1*x2", &XYZ).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.to_string(), "0");
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["", "x4", "x1^", "x1 +", "1/0", "x1 x2 ^ -1", "2 ** x1", "x1 $"] {
            assert!(Polynomial::parse(bad, &XYZ).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn derivative_of_monomials() {
        let p = Polynomial::parse("x1^3*x2 + 5x2", &XYZ).unwrap();
        let d1 = p.derivative(0);
        assert_eq!(d1, Polynomial::parse("3x1^2*x2", &XYZ).unwrap());
        let d2 = p.derivative(1);
        assert_eq!(d2, Polynomial::parse("x1^3 + 5", &XYZ).unwrap());
        assert!(p.derivative(2).is_zero());
    }

    #[test]
    fn jet_evaluation_matches_symbolic_derivatives() {
        let p = Polynomial::parse("x1^2*x3 - 2x2^3 + x1*x2", &XYZ).unwrap();
        let pt = [0.3, -0.7, 1.1];
        let j = p.eval(&Jet2::seed(&pt));
        assert!((j.value - p.eval_f64(&pt)).abs() < 1e-14);
        for i in 0..3 {
            let di = p.derivative(i);
            assert!((j.grad[i] - di.eval_f64(&pt)).abs() < 1e-13);
            for k in 0..3 {
                let dik = di.derivative(k).eval_f64(&pt);
                assert!((j.hess[(i, k)] - dik).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn display_round_trips() {
        let p = Polynomial::parse("-x1^2*x3 + 3/4*x2 - 7", &XYZ).unwrap();
        let q = Polynomial::parse(&p.to_string(), &XYZ).unwrap();
        assert_eq!(p, q);
    }
}

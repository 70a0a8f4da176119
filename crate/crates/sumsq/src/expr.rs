//! Text form of polynomials.
//!
//! ```text
//! expr := ['+'|'-'] term (('+'|'-') term)*
//! term := factor (['*'] factor)*
//! factor := rat | var ['^' nat]
//! rat  := int ['/' nat]
//! var  := x | y | z | t | u | v | s
//! ```
//! Whitespace is ignored. No parentheses.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::series::Vars;
use crate::{Rational, Series};

pub const VARIABLES: [char; 7] = ['x', 'y', 'z', 't', 'u', 'v', 's'];

/// A sum of `coefficient * monomial` terms as written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprAst {
    pub terms: Vec<(Rational, BTreeMap<char, u32>)>,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T> {
        Err(Error::Parse { offset: self.pos, expected: expected.iter().map(|s| s.to_string()).collect() })
    }

    fn nat(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.fail(&["digit"]);
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn factor(&mut self) -> Result<Factor> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.nat()?;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let d = self.nat()?;
                    if d.is_zero() {
                        self.pos -= 1;
                        return self.fail(&["nonzero denominator"]);
                    }
                    Ok(Factor::Coeff(Rational::new(n, d)))
                } else {
                    Ok(Factor::Coeff(Rational::from_integer(n)))
                }
            }
            Some(c) if VARIABLES.contains(&(c as char)) => {
                self.pos += 1;
                let mut e = 1u32;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let at = self.pos;
                    let n = self.nat()?;
                    e = u32::try_from(n).map_err(|_| Error::Parse {
                        offset: at,
                        expected: vec!["exponent below 2^32".into()],
                    })?;
                }
                Ok(Factor::Var(c as char, e))
            }
            _ => self.fail(&["number", "variable"]),
        }
    }

    fn term(&mut self) -> Result<(Rational, BTreeMap<char, u32>)> {
        let mut coeff = Rational::one();
        let mut mono = BTreeMap::new();
        loop {
            match self.factor()? {
                Factor::Coeff(c) => coeff *= c,
                Factor::Var(v, e) => *mono.entry(v).or_insert(0) += e,
            }
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                }
                Some(c) if c.is_ascii_digit() || VARIABLES.contains(&(c as char)) => {}
                _ => break,
            }
        }
        mono.retain(|_, e| *e > 0);
        Ok((coeff, mono))
    }
}

enum Factor {
    Coeff(Rational),
    Var(char, u32),
}

pub fn parse_expr(text: &str) -> Result<ExprAst> {
    let mut lx = Lexer { src: text.as_bytes(), pos: 0 };
    let mut terms = Vec::new();
    let mut sign = match lx.peek() {
        Some(b'-') => {
            lx.pos += 1;
            -Rational::one()
        }
        Some(b'+') => {
            lx.pos += 1;
            Rational::one()
        }
        None => return lx.fail(&["term"]),
        _ => Rational::one(),
    };
    loop {
        let (c, m) = lx.term()?;
        terms.push((sign * c, m));
        match lx.peek() {
            None => break,
            Some(b'+') => {
                lx.pos += 1;
                sign = Rational::one();
            }
            Some(b'-') => {
                lx.pos += 1;
                sign = -Rational::one();
            }
            Some(_) => return lx.fail(&["+", "-", "*", "end of input"]),
        }
    }
    Ok(ExprAst { terms })
}

impl ExprAst {
    /// Variables that occur, in the fixed order `x y z t u v s`.
    pub fn variables(&self) -> Vec<String> {
        VARIABLES
            .iter()
            .filter(|v| self.terms.iter().any(|(_, m)| m.contains_key(v)))
            .map(|v| v.to_string())
            .collect()
    }

    pub fn to_series(&self, vars: &Vars) -> Result<Series> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (c, m) in &self.terms {
            let mut e = vec![0u32; vars.len()];
            for (v, p) in m {
                let i = vars.iter().position(|w| w.len() == 1 && w.starts_with(*v)).ok_or_else(|| {
                    Error::VariableMismatch(format!("variable {v} not among {:?}", vars.as_ref()))
                })?;
                e[i] += p;
            }
            let d: u32 = e.iter().sum();
            if d >= crate::series::DEGREE_CAP || e.iter().any(|&x| x > 255) {
                return Err(Error::InvalidArgument(format!("degree {d} too large")));
            }
            terms.push((e, c.clone()));
        }
        Series::polynomial(vars.clone(), terms)
    }
}

/// Parse straight into an exact polynomial over `vars`.
pub fn parse_series(text: &str, vars: &Vars) -> Result<Series> {
    parse_expr(text)?.to_series(vars)
}

/// Parse over `[x, y]` plus whatever else occurs.
pub fn parse_default(text: &str) -> Result<Series> {
    let ast = parse_expr(text)?;
    let mut names = vec!["x".to_string(), "y".to_string()];
    for v in ast.variables() {
        if !names.contains(&v) {
            names.push(v);
        }
    }
    let vars: Vars = names.into();
    ast.to_series(&vars)
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vars = {
            let mut v = self.variables();
            if v.is_empty() {
                v.push("x".into());
            }
            v.into()
        };
        match self.to_series(&names) {
            Ok(s) => write!(f, "{s}"),
            Err(_) => write!(f, "<unprintable>"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::series::vars;
    use proptest::prelude::*;

    #[test]
    fn parses_examples() {
        let a = parse_expr("x^3 + 2*y^3").unwrap();
        assert_eq!(a.terms.len(), 2);
        let b = parse_expr("1/2*x*y^2 - y^3").unwrap();
        assert_eq!(b.terms[0].0, q(1, 2));
        assert_eq!(b.terms[1].0, q(-1, 1));
        let s = parse_series("x^3 + 1/2 x y^2 - y^3", &vars(&["x", "y"])).unwrap();
        assert_eq!(s.to_string(), "x^3 + 1/2*x*y^2 - y^3");
    }

    #[test]
    fn reports_offsets() {
        match parse_expr("x^^2") {
            Err(Error::Parse { offset, expected }) => {
                assert_eq!(offset, 2);
                assert_eq!(expected, vec!["digit".to_string()]);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr(""), Err(Error::Parse { offset: 0, .. })));
        assert!(matches!(parse_expr("x + (y)"), Err(Error::Parse { offset: 4, .. })));
        assert!(matches!(parse_expr("1/0"), Err(Error::Parse { .. })));
    }

    #[test]
    fn leading_sign_and_constants() {
        let s = parse_default("-x^2 + 3").unwrap();
        assert_eq!(s.to_string(), "3 - x^2");
        let z = parse_default("0").unwrap();
        assert!(z.is_zero());
        let w = parse_default("x*z - z*x").unwrap();
        assert!(w.is_zero());
        assert_eq!(w.nvars(), 3);
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(
            ts in prop::collection::vec(((0u32..4, 0u32..4, 0u32..3), -9i64..10, 1i64..5), 0..8)
        ) {
            let v = vars(&["x", "y", "z"]);
            let terms = ts.iter().map(|((a, b, c), n, d)| (vec![*a, *b, *c], q(*n, *d))).collect();
            let s = Series::polynomial(v.clone(), terms).unwrap();
            let text = s.to_string();
            let back = parse_series(&text, &v).unwrap();
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(parse_series(&back.to_string(), &v).unwrap(), back);
        }
    }
}

//! Four-square decompositions of nonnegative rationals.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

type Cache = RwLock<HashMap<Rational, [Rational; 4]>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn is_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Not of the form `4^a (8b + 7)`.
fn three_squares_possible(n: &BigInt) -> bool {
    let mut m = n.clone();
    if m.is_zero() {
        return true;
    }
    let four = BigInt::from(4);
    while (&m % &four).is_zero() {
        m /= &four;
    }
    &m % BigInt::from(8) != BigInt::from(7)
}

fn two_squares(n: &BigInt) -> Option<(BigInt, BigInt)> {
    let mut c = n.sqrt();
    while &c * &c * 2 >= *n {
        if let Some(d) = is_square(&(n - &c * &c)) {
            return Some((c, d));
        }
        if c.is_zero() {
            break;
        }
        c -= 1;
    }
    None
}

/// `n = a² + b² + c² + d²`, greedy from the largest square down, so the
/// result is deterministic.
pub fn four_squares_int(n: &BigInt) -> Result<[BigInt; 4]> {
    if n.is_negative() {
        return Err(Error::InvalidArgument(format!("{n} is negative")));
    }
    let mut a = n.sqrt();
    loop {
        let r1 = n - &a * &a;
        if three_squares_possible(&r1) {
            let mut b = r1.sqrt();
            loop {
                let r2 = &r1 - &b * &b;
                if let Some((c, d)) = two_squares(&r2) {
                    return Ok([a, b, c, d]);
                }
                if b.is_zero() {
                    break;
                }
                b -= 1;
            }
        }
        if a.is_zero() {
            unreachable!("every natural number is a sum of four squares");
        }
        a -= 1;
    }
}

/// `r = Σ t_i²` with rational `t_i`; cached.
pub fn four_squares(r: &Rational) -> Result<[Rational; 4]> {
    if r.is_negative() {
        return Err(Error::InvalidArgument(format!("{r} is negative")));
    }
    if let Some(hit) = cache().read().expect("cache lock").get(r) {
        return Ok(hit.clone());
    }
    // p/q = p q / q²
    let p = r.numer() * r.denom();
    let ints = four_squares_int(&p)?;
    let den = Rational::from_integer(r.denom().clone());
    let out = ints.map(|t| Rational::from_integer(t) / &den);
    cache().write().expect("cache lock").entry(r.clone()).or_insert_with(|| out.clone());
    Ok(out)
}

/// Sum of the squares of the parts.
pub fn recombine(parts: &[Rational; 4]) -> Rational {
    parts.iter().fold(Rational::zero(), |acc, t| acc + t * t)
}

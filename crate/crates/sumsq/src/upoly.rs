//! Dense univariate polynomials.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Field;
use crate::Rational;

/// Coefficients from the constant term up; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UPoly<C> {
    coeffs: Vec<C>,
}

impl<C: Field> UPoly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// `x`
    pub fn x() -> Self {
        Self::new(vec![C::zero(), C::one()])
    }

    pub fn from_i64(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| C::from_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> C {
        self.coeffs.last().cloned().unwrap_or_else(C::zero)
    }

    pub fn eval(&self, t: &C) -> C {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * C::from_i64(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += &(a.clone() * b.clone());
            }
        }
        Self::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut qc = vec![C::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = r[i].clone() / lead.clone();
            if c.is_zero() {
                continue;
            }
            for (j, b) in d.coeffs.iter().enumerate() {
                let t = c.clone() * b.clone();
                r[i - dd + j] -= &t;
            }
            qc[i - dd] = c;
        }
        r.truncate(dd);
        (Self::new(qc), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let l = C::one() / self.leading();
        self.scale(&l)
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`.
    pub fn squarefree_part(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        self.div_rem(&g).0
    }

    pub fn sign_at(&self, t: &C) -> i32 {
        self.eval(t).sign()
    }

    /// Sign as `t -> +inf` (or `-inf` when `negative`).
    pub fn sign_at_infinity(&self, negative: bool) -> i32 {
        match self.degree() {
            None => 0,
            Some(d) => {
                let s = self.leading().sign();
                if negative && d % 2 == 1 {
                    -s
                } else {
                    s
                }
            }
        }
    }
}

impl UPoly<Rational> {
    /// Integer multiple with coprime integer coefficients and positive
    /// leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &l).to_integer()).collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if !g.is_zero() {
            let neg = ints.last().is_some_and(|c| c.is_negative());
            for c in ints.iter_mut() {
                *c = &*c / &g;
                if neg {
                    *c = -&*c;
                }
            }
        }
        ints
    }

    /// All rational roots, ascending, without multiplicity.
    ///
    /// Real roots of the squarefree part are isolated by Sturm bisection
    /// until each interval is shorter than `1/(2q^2)`, `q` the leading
    /// integer coefficient; the only candidate with denominator dividing `q`
    /// is then the simplest fraction in the interval.
    pub fn rational_roots(&self) -> Vec<Rational> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let p = self.squarefree_part();
        let lead = p.primitive_integer().last().cloned().unwrap_or_else(BigInt::one).abs();
        let width = Rational::new(BigInt::one(), BigInt::from(2) * &lead * &lead);
        let mut roots = Vec::new();
        for (lo, hi) in p.isolate_real_roots(&width) {
            let r = if lo == hi { lo } else { simplest_in(&lo, &hi) };
            if p.eval(&r).is_zero() {
                roots.push(r);
            }
        }
        roots.sort();
        roots.dedup();
        roots
    }

    /// Sturm chain: `p, p'`, then negated remainders.
    pub fn sturm_chain(&self) -> Vec<Self> {
        let mut chain = vec![self.clone()];
        if self.is_zero() {
            return chain;
        }
        let d = self.derivative();
        if d.is_zero() {
            return chain;
        }
        chain.push(d);
        loop {
            let n = chain.len();
            let r = chain[n - 2].div_rem(&chain[n - 1]).1;
            if r.is_zero() {
                break;
            }
            chain.push(r.scale(&-Rational::one()));
        }
        chain
    }

    /// Cauchy bound: every real root lies in `(-b, b)`.
    pub fn root_bound(&self) -> Rational {
        let l = self.leading().abs();
        let n = self.coeffs.len();
        let m = self.coeffs[..n.saturating_sub(1)].iter().map(|c| c.abs() / &l).max().unwrap_or_else(Rational::zero);
        m + Rational::one()
    }

    /// Disjoint intervals `[lo, hi]` (degenerate when a root is hit
    /// exactly), each holding one real root of `self`, refined below
    /// `width`. `self` must be squarefree.
    pub fn isolate_real_roots(&self, width: &Rational) -> Vec<(Rational, Rational)> {
        let chain = self.sturm_chain();
        let two = Rational::from_integer(BigInt::from(2));
        let b = self.root_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-b.clone(), b)];
        while let Some((lo, hi)) = stack.pop() {
            let n = count_in(&chain, &lo, &hi);
            if n == 0 {
                continue;
            }
            if n == 1 && &(&hi - &lo) < width {
                out.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / &two;
            if self.eval(&mid).is_zero() {
                out.push((mid.clone(), mid.clone()));
                // step off the exact root on both sides
                let mut l = (&lo + &mid) / &two;
                while count_in(&chain, &l, &mid) > 1 {
                    l = (&l + &mid) / &two;
                }
                let mut r = (&mid + &hi) / &two;
                while count_in(&chain, &mid, &r) > 0 {
                    r = (&r + &mid) / &two;
                }
                stack.push((lo, l));
                stack.push((r, hi));
            } else {
                stack.push((mid.clone(), hi));
                stack.push((lo, mid));
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Sign changes of the chain at `t`, zeros skipped.
pub fn sign_variations(chain: &[UPoly<Rational>], t: &Rational) -> usize {
    variations(chain.iter().map(|p| p.sign_at(t)))
}

/// Sign changes of the chain at `+inf` or `-inf`.
pub fn sign_variations_at_infinity(chain: &[UPoly<Rational>], negative: bool) -> usize {
    variations(chain.iter().map(|p| p.sign_at_infinity(negative)))
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

/// Distinct roots in the half-open interval `(lo, hi]`.
pub fn count_in(chain: &[UPoly<Rational>], lo: &Rational, hi: &Rational) -> usize {
    sign_variations(chain, lo).saturating_sub(sign_variations(chain, hi))
}

/// The fraction with least denominator in `[lo, hi]`.
pub fn simplest_in(lo: &Rational, hi: &Rational) -> Rational {
    if lo > hi {
        return simplest_in(hi, lo);
    }
    if Signed::is_positive(lo) {
        let fl = lo.floor();
        if &fl == lo {
            return fl;
        }
        let next = &fl + Rational::one();
        if &next <= hi {
            return next;
        }
        // lo and hi share the integer part
        let inner = simplest_in(&(Rational::one() / (hi - &fl)), &(Rational::one() / (lo - &fl)));
        return fl + Rational::one() / inner;
    }
    if Signed::is_negative(hi) {
        return -simplest_in(&-hi.clone(), &-lo.clone());
    }
    Rational::zero()
}

impl<C: Field> fmt::Display for UPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            if i == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    type P = UPoly<Rational>;

    #[test]
    fn arithmetic_and_division() {
        let p = P::from_i64(&[-1, 0, 1]);
        let d = P::from_i64(&[-1, 1]);
        let (quo, rem) = p.div_rem(&d);
        assert_eq!(quo, P::from_i64(&[1, 1]));
        assert!(rem.is_zero());
        assert_eq!(quo.mul(&d), p);
        assert_eq!(p.derivative(), P::from_i64(&[0, 2]));
        assert_eq!(p.to_string(), "x^2 - 1");
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = P::from_i64(&[-1, 1]).mul(&P::from_i64(&[-1, 1])).mul(&P::from_i64(&[2, 1]));
        assert_eq!(a.squarefree_part().monic(), P::from_i64(&[-1, 1]).mul(&P::from_i64(&[2, 1])));
        assert_eq!(a.gcd(&P::from_i64(&[-1, 1])), P::from_i64(&[-1, 1]));
    }

    #[test]
    fn rational_roots_found() {
        // (2x - 1)(x + 3) x
        let p = P::from_i64(&[-1, 2]).mul(&P::from_i64(&[3, 1])).mul(&P::x());
        assert_eq!(p.rational_roots(), vec![qi(-3), qi(0), q(1, 2)]);
        assert!(P::from_i64(&[2, 0, 0, 1]).rational_roots().is_empty());
        let scaled = P::new(vec![q(1, 3), q(-1, 1)]);
        assert_eq!(scaled.rational_roots(), vec![q(1, 3)]);
    }

    #[test]
    fn large_coefficients() {
        // (1234567 x - 890123)(x^2 + 7)
        let p = P::new(vec![qi(-890123), qi(1234567)]).mul(&P::from_i64(&[7, 0, 1]));
        assert_eq!(p.rational_roots(), vec![q(890123, 1234567)]);
        let chain = P::from_i64(&[0, -1, 0, 1]).sturm_chain();
        assert_eq!(count_in(&chain, &qi(-2), &qi(2)), 3);
        assert_eq!(count_in(&chain, &qi(-1), &qi(1)), 2);
        assert_eq!(simplest_in(&q(3, 10), &q(2, 5)), q(1, 3));
        assert_eq!(simplest_in(&q(-7, 5), &q(-6, 5)), q(-4, 3));
    }

    #[test]
    fn signs() {
        let p = P::from_i64(&[0, -1, 0, 1]);
        assert_eq!(p.sign_at_infinity(false), 1);
        assert_eq!(p.sign_at_infinity(true), -1);
        assert_eq!(p.sign_at(&q(1, 2)), -1);
    }
}

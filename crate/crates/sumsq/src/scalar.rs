//! Coefficient field abstraction.
//!
//! Everything in the series, division and determinacy layers is written
//! against [`Field`]. Exact rationals are the intended instance; the float
//! impls exist so the algebra can be exercised numerically, but zero tests
//! on floats are literal and no decision procedure trusts them.

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
    + Send
    + Sync
    + 'static
{
    /// Whether arithmetic is exact, so that `is_zero` is a sound test.
    const EXACT: bool;

    fn from_i64(n: i64) -> Self;

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_i64(n) / Self::from_i64(d)
    }

    /// -1, 0 or 1 according to the sign in the field's ordering.
    fn sign(&self) -> i32;

    fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    /// Reduce `rows` to row echelon form on the first `ncols` columns and
    /// return the pivot columns. Exact backends may override the default
    /// Gaussian elimination.
    fn echelon(rows: &mut [Vec<Self>], ncols: usize) -> Vec<usize> {
        crate::linalg::gauss_echelon(rows, ncols)
    }
}

impl Field for BigRational {
    const EXACT: bool = true;

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sign(&self) -> i32 {
        if self.is_zero() {
            0
        } else if Signed::is_negative(self) {
            -1
        } else {
            1
        }
    }

    fn echelon(rows: &mut [Vec<Self>], ncols: usize) -> Vec<usize> {
        crate::linalg::bareiss_echelon(rows, ncols)
    }
}

macro_rules! float_field {
    ($t:ty) => {
        impl Field for $t {
            const EXACT: bool = false;

            fn from_i64(n: i64) -> Self {
                n as $t
            }

            fn sign(&self) -> i32 {
                if *self > 0.0 {
                    1
                } else if *self < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    };
}

float_field!(f64);
float_field!(f32);

/// Shorthand for building rationals in code and tests.
pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::from_ratio(n, d)
}

pub fn qi(n: i64) -> BigRational {
    <BigRational as Field>::from_i64(n)
}

/// Integer powers by repeated squaring.
pub fn pow<C: Field>(base: &C, mut e: u32) -> C {
    let mut acc = C::one();
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            let sq = b.clone() * b.clone();
            b = sq;
        }
    }
    acc
}

/// Exact rational square root, if one exists.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if Signed::is_negative(r) {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Exact rational cube root, if one exists.
pub fn rational_cbrt(r: &BigRational) -> Option<BigRational> {
    let n = r.numer().cbrt();
    let d = r.denom().cbrt();
    if &(&n * &n * &n) == r.numer() && &(&d * &d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Representative of `r` modulo nonzero rational squares: returns `(s, m)`
/// with `s = r · m²`, where `s` is a signed integer free of the squares of
/// primes below `10⁶`. Zero maps to `(0, 1)`.
pub fn square_class(r: &BigRational) -> (BigRational, BigRational) {
    if r.is_zero() {
        return (BigRational::zero(), BigRational::one());
    }
    let mut n = (r.numer() * r.denom()).abs();
    let mut root = BigInt::one();
    let mut p = BigInt::from(2u32);
    let bound = BigInt::from(1_000_000u32);
    while &p * &p <= n && p < bound {
        let p2 = &p * &p;
        while (&n % &p2).is_zero() {
            n /= &p2;
            root *= &p;
        }
        p += 1u32;
    }
    let s = if Signed::is_negative(r) { -BigRational::from(n) } else { BigRational::from(n) };
    // s = sign · |num · den| / root², so m² = s / r = den² / root².
    let m = BigRational::new(r.denom().clone(), root);
    (s, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sign_and_ratio() {
        assert_eq!(q(-3, 6), q(-1, 2));
        assert_eq!(q(-1, 2).sign(), -1);
        assert_eq!(qi(0).sign(), 0);
        assert!(<BigRational as Field>::EXACT);
        assert!(!<f64 as Field>::EXACT);
    }

    #[test]
    fn power_matches_repeated_product() {
        assert_eq!(pow(&q(2, 3), 5), q(32, 243));
        assert_eq!(pow(&qi(7), 0), qi(1));
        assert_eq!(pow(&2.0f64, 10), 1024.0);
    }

    #[test]
    fn roots() {
        assert_eq!(rational_sqrt(&q(9, 4)), Some(q(3, 2)));
        assert_eq!(rational_sqrt(&q(2, 1)), None);
        assert_eq!(rational_sqrt(&q(-1, 1)), None);
        assert_eq!(rational_cbrt(&q(-8, 27)), Some(q(-2, 3)));
        assert_eq!(rational_cbrt(&qi(4)), None);
    }

    #[test]
    fn square_classes() {
        assert_eq!(square_class(&q(1, 9)), (qi(1), qi(3)));
        assert_eq!(square_class(&q(-12, 5)), (qi(-15), q(5, 2)));
        assert_eq!(square_class(&qi(0)).0, qi(0));
        let (s, m) = square_class(&q(50, 3));
        assert_eq!(s, q(50, 3) * &m * &m);
    }
}

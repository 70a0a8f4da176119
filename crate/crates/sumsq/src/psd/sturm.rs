//! Sturm sequences and real root counting.

use crate::error::{Error, Result};
use crate::upoly::{self, UPoly};
use crate::Rational;

type P = UPoly<Rational>;

/// `p, p'`, then negated Euclidean remainders.
#[derive(Clone, Debug, PartialEq)]
pub struct SturmSequence {
    pub polys: Vec<P>,
}

impl SturmSequence {
    /// Each element is the negated remainder of the two before it.
    pub fn is_consistent(&self) -> bool {
        self.polys.windows(3).all(|w| {
            let r = w[0].div_rem(&w[1]).1;
            r.add(&w[2]).is_zero()
        })
    }
}

pub fn sturm(p: &P) -> Result<SturmSequence> {
    if p.is_zero() {
        return Err(Error::InvalidArgument("Sturm sequence of the zero polynomial".into()));
    }
    Ok(SturmSequence { polys: p.sturm_chain() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Interval {
    Real,
    Closed(Rational, Rational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootCount {
    pub count: usize,
    /// The input had repeated factors; distinct roots were counted.
    pub squarefree_taken: bool,
}

/// Distinct real roots in the interval.
pub fn count_real_roots(p: &P, interval: &Interval) -> Result<RootCount> {
    if p.is_zero() {
        return Err(Error::InvalidArgument("the zero polynomial has infinitely many roots".into()));
    }
    let sf = p.squarefree_part();
    let squarefree_taken = sf.degree() != p.degree();
    let chain = sf.sturm_chain();
    let count = match interval {
        Interval::Real => upoly::sign_variations_at_infinity(&chain, true)
            .saturating_sub(upoly::sign_variations_at_infinity(&chain, false)),
        Interval::Closed(lo, hi) => {
            if lo > hi {
                return Err(Error::InvalidArgument("empty interval".into()));
            }
            let at_lo = usize::from(sf.eval(lo) == Rational::from_integer(0.into()));
            upoly::count_in(&chain, lo, hi) + at_lo
        }
    };
    Ok(RootCount { count, squarefree_taken })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    #[test]
    fn examples() {
        let cube = P::from_i64(&[0, -1, 0, 1]);
        assert_eq!(count_real_roots(&cube, &Interval::Real).unwrap().count, 3);
        assert_eq!(count_real_roots(&P::from_i64(&[0, 1, 0, 1]), &Interval::Real).unwrap().count, 1);
        assert_eq!(count_real_roots(&P::from_i64(&[1, 0, 1]), &Interval::Real).unwrap().count, 0);
        assert_eq!(count_real_roots(&cube, &Interval::Closed(qi(-1), qi(0))).unwrap().count, 2);
        assert_eq!(count_real_roots(&cube, &Interval::Closed(qi(1), qi(5))).unwrap().count, 1);
        let s = sturm(&P::from_i64(&[-1, 1])).unwrap();
        assert_eq!(s.polys, vec![P::from_i64(&[-1, 1]), P::from_i64(&[1])]);
        let double = P::from_i64(&[1, -2, 1]);
        let c = count_real_roots(&double, &Interval::Real).unwrap();
        assert!(c.squarefree_taken && c.count == 1);
        assert!(sturm(&cube).unwrap().is_consistent());
    }
}

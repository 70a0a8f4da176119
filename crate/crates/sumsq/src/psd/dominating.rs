//! A constant `M` with `M²‖x‖^{2s} - f` psd for `ω(f) ≥ 2s`.

use num_traits::{One, Zero};

use crate::determinacy::monomials_of_degree;
use crate::error::{Error, Result};
use crate::{Rational, Series};

#[derive(Clone, Debug, PartialEq)]
pub struct DominatingConstant {
    pub m: Rational,
    /// `f = Σ b_ν x^ν` over all `|ν| = 2s`, in lexicographically
    /// descending order of `ν`.
    pub assignment: Vec<(Vec<u32>, Series)>,
}

impl DominatingConstant {
    /// `M² (Σ x_i²)^s - f`.
    pub fn gap(&self, f: &Series, s: u32) -> Series {
        let n = f.nvars();
        let norm = (0..n).fold(Series::exact_zero(f.vars().clone()), |acc, i| &acc + &Series::var(f.vars().clone(), i).square());
        &norm.pow(s).scalar_mul(&(&self.m * &self.m)) - f
    }
}

/// The first degree-`2s` divisor of `μ` in lexicographically descending
/// order: take as much of the first variable as possible, then the next.
pub fn first_divisor(mu: &[u32], degree: u32) -> Vec<u32> {
    let mut left = degree;
    mu.iter()
        .map(|&e| {
            let take = e.min(left);
            left -= take;
            take
        })
        .collect()
}

/// `M = Σ_{|ν| = 2s} (b_ν(0)² + 1)` for the decomposition assigning each
/// monomial of `f` to [`first_divisor`].
pub fn dominating_constant(f: &Series, s: u32) -> Result<DominatingConstant> {
    let d = 2 * s;
    match f.order().known() {
        Some(w) if w < d => return Err(Error::OrderTooLow(format!("order {w} is below {d}"))),
        None if f.trunc() < d => return Err(Error::precision(format!("the series is only known below degree {}", f.trunc()))),
        _ => {}
    }
    let v = f.vars().clone();
    let mut nus = monomials_of_degree(f.nvars(), d);
    nus.sort_by(|a, b| b.cmp(a));
    let mut parts: Vec<Series> = vec![Series::zero(v.clone(), f.trunc().saturating_sub(d)); nus.len()];
    if f.is_exact() {
        parts.iter_mut().for_each(|p| *p = Series::exact_zero(v.clone()));
    }
    for (mu, c) in f.terms() {
        let nu = first_divisor(&mu, d);
        let k = nus.iter().position(|n| *n == nu).expect("divisor has degree 2s");
        let rest: Vec<u32> = mu.iter().zip(&nu).map(|(a, b)| a - b).collect();
        parts[k] = &parts[k] + &Series::monomial(v.clone(), &rest, c.clone());
    }
    let m = parts.iter().fold(Rational::zero(), |acc, b| {
        let c = b.constant_term();
        acc + &c * &c + Rational::one()
    });
    Ok(DominatingConstant { m, assignment: nus.into_iter().zip(parts).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_series;
    use crate::psd::{arc_sign, standard_arcs};
    use crate::scalar::qi;
    use crate::series::vars;

    fn p(s: &str) -> Series {
        parse_series(s, &vars(&["x", "y"])).unwrap()
    }

    #[test]
    fn formula_examples() {
        let d = dominating_constant(&p("3*x^2*y^2"), 2).unwrap();
        assert_eq!(d.m, qi(14));
        assert_eq!(dominating_constant(&p("0"), 2).unwrap().m, qi(5));
        let d = dominating_constant(&p("x^4"), 2).unwrap();
        assert_eq!(d.assignment[0].0, vec![4, 0]);
        assert_eq!(d.m, qi(6));
        assert!(matches!(dominating_constant(&p("x^3"), 2), Err(Error::OrderTooLow(_))));
    }

    #[test]
    fn decomposition_reassembles() {
        let f = p("x^3*y + 2*x*y^4 - 5*y^6 + x^2*y^2");
        let d = dominating_constant(&f, 2).unwrap();
        let back = d.assignment.iter().fold(Series::exact_zero(f.vars().clone()), |acc, (nu, b)| {
            &acc + &b.mul_monomial(nu, &Rational::one())
        });
        assert_eq!(back, f);
        let gap = d.gap(&f, 2);
        assert!(standard_arcs(2).iter().all(|a| !arc_sign(&gap, a).unwrap().is_negative()));
    }
}

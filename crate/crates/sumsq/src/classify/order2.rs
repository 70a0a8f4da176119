use num_traits::{One, Zero};

use super::chain::Chain;
use super::normal_form::{xy, NormalForm, Order2Tail};
use super::{prepare_at, Outcome};
use crate::error::Result;
use crate::weierstrass::{make_regular, tschirnhaus};
use crate::{OrderResult, Rational, Series};

fn mono(ex: u32, ey: u32, c: Rational) -> Series {
    Series::monomial(xy(), &[ex, ey], c)
}

/// `σ` with `σ · ρ(σ) = y`, for a unit `ρ(y)` with `ρ(0) = 1`.
pub(super) fn invert_reparametrization(rho: &Series) -> Result<Series> {
    let y = Series::var(xy(), 1);
    let x = Series::var(xy(), 0);
    if rho.is_exact() && rho.degree() == Some(0) {
        return Ok(y);
    }
    let mut sigma = y.truncate(rho.trunc() + 1);
    for _ in 0..=rho.trunc() + 1 {
        let r = rho.substitute(&[x.clone(), sigma.clone()])?;
        let next = (&y * &r.invert_unit()?).truncate(rho.trunc() + 1);
        if next == sigma {
            break;
        }
        sigma = next;
    }
    Ok(sigma)
}

/// `w^{1/ℓ}` for a unit `w(y)` with `w(0) = 1`.
pub(super) fn unit_root(w: &Series, l: u32, t: u32) -> Result<Series> {
    let w = if w.is_exact() && w.degree() != Some(0) { w.truncate(t) } else { w.clone() };
    w.nth_root_unit(l)
}

/// `y`-part of `c y^ℓ w(y)`: returns `(c, w)` with `w(0) = 1`.
pub(super) fn split_leading(psi: &Series, l: u32) -> Result<(Rational, Series)> {
    let c = psi.coeff(&[0, l]);
    let w = psi.monomial_divide(&[0, l])?.scalar_mul(&(Rational::one() / &c));
    Ok((c, w))
}

pub(super) fn reduce(chain: &mut Chain, t: u32, milnor: u32) -> Result<Outcome> {
    let f = chain.current().clone();
    let (l, g) = make_regular(&f, 0)?;
    if !l.is_identity() {
        chain.push("make x regular", l.images(&f), Series::one(xy()), g.clone())?;
    }
    let w = prepare_at(&g, t)?;
    let (img, w2) = tschirnhaus(&w)?;
    let a = w2.unit.constant_term();
    let psi = w2.coeffs[0].scalar_mul(&a);
    let next = &mono(2, 0, a.clone()) + &psi;
    let unit = w2.unit.scalar_mul(&(Rational::one() / &a));
    chain.push("complete the square in x", vec![img, Series::var(xy(), 1)], unit, next)?;

    let l = match psi.order() {
        OrderResult::Known(l) => l,
        OrderResult::AtLeast(n) => {
            if psi.is_exact() || n >= milnor {
                return Ok(Outcome::Reduced(NormalForm::Order2 { a, tail: Order2Tail::Zero }));
            }
            return Ok(Outcome::NeedPrecision(milnor, "the y-part vanishes below the working truncation".into()));
        }
    };
    let (c, rest) = split_leading(&psi, l)?;
    let rho = unit_root(&rest, l, t.saturating_sub(l))?;
    let sigma = invert_reparametrization(&rho)?;
    chain.push(
        "reparametrize y so the y-part is a single power".to_string(),
        vec![Series::var(xy(), 0), sigma],
        Series::one(xy()),
        &mono(2, 0, a.clone()) + &mono(0, l, c.clone()),
    )?;
    if l % 2 == 1 {
        let k = (l - 1) / 2;
        if !c.is_one() {
            let s = crate::scalar::pow(&c, k + 1);
            chain.push_scaled("scale the y-power to 1", vec![mono(1, 0, s), mono(0, 1, c.clone())], crate::scalar::pow(&c, 2 * k + 2))?;
        }
        Ok(Outcome::Reduced(NormalForm::Order2 { a, tail: Order2Tail::OddPow { k } }))
    } else {
        debug_assert!(!c.is_zero());
        Ok(Outcome::Reduced(NormalForm::Order2 { a, tail: Order2Tail::EvenPow { k: l / 2, b: c } }))
    }
}

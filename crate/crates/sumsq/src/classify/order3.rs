use num_traits::{One, Signed, Zero};

use super::chain::{identity_images, Chain};
use super::normal_form::{xy, NormalForm};
use super::order2::{invert_reparametrization, split_leading, unit_root};
use super::{prepare_at, Outcome};
use crate::error::{Error, Result};
use crate::flow::right_equivalence_witness;
use crate::scalar::{pow, q, qi, square_class};
use crate::upoly::UPoly;
use crate::weierstrass::{make_regular, tschirnhaus};
use crate::{Rational, Series};

fn mono(ex: u32, ey: u32, c: Rational) -> Series {
    Series::monomial(xy(), &[ex, ey], c)
}

fn lin(a: Rational, b: Rational) -> Series {
    &mono(1, 0, a) + &mono(0, 1, b)
}

fn order_of(s: &Series) -> u32 {
    s.order().lower_bound()
}

/// Above this order the explicit flow is too costly; the chain then stops
/// at a series agreeing with the normal form below `k + 1`, which the
/// determinacy certificate covers.
const FLOW_MAX_K: u32 = 9;

/// Flow the current series onto the `k`-determined normal form.
fn finish_by_flow(chain: &mut Chain, nf: NormalForm, k: u32, t: u32) -> Result<Outcome> {
    if k > FLOW_MAX_K {
        let f = nf.polynomial();
        if (&chain.current().truncate(k + 1) - &f).order().lower_bound() <= k {
            return Ok(Outcome::Stuck(nf, "the series does not agree with the normal form below k + 1".into()));
        }
        chain.push(format!("drop the terms of degree above {k}"), identity_images(), Series::one(xy()), f)?;
        return Ok(Outcome::Reduced(nf));
    }
    let n = k + 3;
    let g = chain.current().clone();
    if g.trunc() <= n || t <= n {
        return Ok(Outcome::NeedPrecision(n + 3, format!("the flow to a {k}-determined form needs precision {n}")));
    }
    let f = nf.polynomial();
    let g = g.truncate(n + 1);
    match right_equivalence_witness(&f, &g, k, n) {
        Ok(w) => {
            let unit = w.unit.truncate(n).invert_unit()?;
            chain.push(format!("flow onto the {k}-determined normal form"), w.substitutions, unit, f)?;
            Ok(Outcome::Reduced(nf))
        }
        Err(e @ (Error::DecompositionFailed(_) | Error::NotWithinDeterminacyBall(_))) => {
            Ok(Outcome::Stuck(nf, format!("no flow witness: {e}")))
        }
        Err(e) => Err(e),
    }
}

/// `x²y + (-1)^k a y^k` with `a` only known up to squares: rescale `x` so
/// the parameter is its square-class representative.
fn finish_x2y_plus(chain: &mut Chain, k: u32, a: Rational, t: u32) -> Result<Outcome> {
    let (rep, m) = square_class(&a);
    if !m.is_one() {
        let inv = Rational::one() / &m;
        chain.push_scaled("reduce the y-power coefficient modulo squares", vec![mono(1, 0, inv.clone()), mono(0, 1, qi(1))], &inv * &inv)?;
    }
    finish_by_flow(chain, NormalForm::X2YPlus { k, a: rep }, k, t)
}

/// Rational roots ordered by absolute value, positive first on ties.
fn ordered_roots(p: &UPoly<Rational>) -> Vec<Rational> {
    let mut r = p.rational_roots();
    r.sort_by(|a, b| a.abs().cmp(&b.abs()).then(b.cmp(a)));
    r
}

pub(super) fn reduce(chain: &mut Chain, t: u32, absorb_cap: u32) -> Result<Outcome> {
    let f = chain.current().clone();
    let (l, g) = make_regular(&f, 0)?;
    if !l.is_identity() {
        chain.push("make x regular", l.images(&f), Series::one(xy()), g.clone())?;
    }
    let cubic = g.homogeneous_part(3);
    let lambda = cubic.coeff(&[3, 0]);
    let c2 = cubic.coeff(&[2, 1]);
    if !c2.is_zero() {
        let s = -(&c2 / (qi(3) * &lambda));
        chain.push_plain("remove the x²y term of the cubic form", vec![lin(qi(1), s), mono(0, 1, qi(1))])?;
    }
    if !lambda.is_one() {
        chain.push_scaled(
            "make the cubic form monic",
            vec![mono(1, 0, lambda.clone()), mono(0, 1, lambda.clone())],
            pow(&lambda, 4),
        )?;
    }
    let p = chain.current().clone();
    let cubic = p.homogeneous_part(3);
    let (a, b) = (cubic.coeff(&[1, 2]), cubic.coeff(&[0, 3]));
    let disc = qi(4) * pow(&a, 3) + qi(27) * &b * &b;
    if !disc.is_zero() {
        let roots = ordered_roots(&UPoly::new(vec![b.clone(), a.clone(), Rational::zero(), Rational::one()]));
        let Some(r) = roots.first() else {
            return finish_by_flow(chain, NormalForm::IrreducibleCubic { a, b }, 3, t);
        };
        let d = qi(3) * r * r + &a;
        let e = Rational::one() - qi(9) * r * r / (qi(4) * &d);
        let images = vec![
            lin(r.clone(), Rational::one() - qi(3) * r * r / (qi(2) * &d)),
            lin(Rational::one(), -(qi(3) * r / (qi(2) * &d))),
        ];
        chain.push_plain("move the rational root of the cubic to y = 0", images)?;
        chain.push_scaled("normalize the x²y coefficient", vec![mono(1, 0, qi(1)), mono(0, 1, d.clone())], &d * &d)?;
        return finish_x2y_plus(chain, 3, -(e * d), t);
    }
    if !(a.is_zero() && b.is_zero()) {
        let r2 = -(qi(3) * &b) / (qi(2) * &a);
        let r1 = -(qi(2) * &r2);
        let den = &r1 - &r2;
        let images = vec![
            lin(Rational::one() + &r2 / &den, -(&r2 / &den)),
            lin(Rational::one() / &den, -(Rational::one() / &den)),
        ];
        chain.push_plain("bring the cubic form to x²y", images)?;
        return absorb(chain, t, absorb_cap);
    }
    triple_line(chain, t)
}

/// `x²y + (terms of degree ≥ s)`: cancel degree `s` up to `a y^s`.
fn absorb(chain: &mut Chain, t: u32, cap: u32) -> Result<Outcome> {
    let mut p = chain.current().truncate(t);
    for s in 4..=cap.min(t.saturating_sub(3)) {
        let a = p.coeff(&[0, s]);
        let b = p.coeff(&[1, s - 1]);
        let phi_terms: Vec<(Vec<u32>, Rational)> = p
            .terms()
            .filter(|(e, _)| e[0] >= 2 && e[0] + e[1] >= s)
            .map(|(e, c)| (vec![e[0] - 2, e[1]], c.clone()))
            .collect();
        if !b.is_zero() || !phi_terms.is_empty() {
            let phi = Series::make(xy(), t - 2, phi_terms)?;
            let half_b = &b / qi(2);
            let images = vec![
                &Series::var(xy(), 0) - &mono(0, s - 2, half_b),
                &Series::var(xy(), 1) - &phi,
            ];
            chain.push_plain(&format!("absorb the degree-{s} terms"), images)?;
            p = chain.current().truncate(t);
        }
        if !a.is_zero() {
            let sign = if s % 2 == 0 { qi(1) } else { qi(-1) };
            return finish_x2y_plus(chain, s, sign * a, t);
        }
    }
    if cap + 3 > t {
        return Ok(Outcome::NeedPrecision(cap + 4, "absorbing the x²y tail needs more precision".into()));
    }
    Ok(Outcome::Reduced(NormalForm::X2Y))
}

/// Cubic form `x³`: Weierstrass form `x³ + B(y) x + C(y)` and the three
/// explicit normalizations.
fn triple_line(chain: &mut Chain, t: u32) -> Result<Outcome> {
    let g = chain.current().clone();
    let w = prepare_at(&g, t)?;
    let (img, w2) = tschirnhaus(&w)?;
    chain.push("Weierstrass form x³ + B(y)x + C(y)", vec![img, Series::var(xy(), 1)], w2.unit.clone(), w2.polynomial())?;
    let (bs, cs) = (&w2.coeffs[1], &w2.coeffs[0]);
    let (ob, oc) = (order_of(bs), order_of(cs));
    let x = || Series::var(xy(), 0);
    let y = || Series::var(xy(), 1);
    if oc == 4 {
        let (b, c) = (bs.coeff(&[0, 3]), cs.coeff(&[0, 4]));
        let images = vec![
            &(&(&x() + &mono(2, 0, pow(&b, 4) / (qi(256) * pow(&c, 3)))) - &mono(1, 1, pow(&b, 3) / (qi(24) * &c * &c)))
                + &mono(0, 2, &b * &b / (qi(8) * &c)),
            &y() - &mono(1, 0, &b / (qi(4) * &c)),
        ];
        chain.push_plain("remove the xy³ term", images)?;
        return finish_by_flow(chain, NormalForm::X3Y4 { a: c }, 4, t);
    }
    if ob == 3 {
        let (b, rest) = split_leading(bs, 3)?;
        let rho = unit_root(&rest, 3, t.saturating_sub(3))?;
        let sigma = invert_reparametrization(&rho)?;
        chain.push_plain("reparametrize y so B(y) = b y³", vec![x(), sigma])?;
        chain.push_scaled("scale b to 1", vec![mono(1, 0, &b * &b), mono(0, 1, b.clone())], pow(&b, 6))?;
        let c = chain.current().coeff(&[0, 5]);
        if !c.is_zero() {
            let images = vec![
                [
                    mono(1, 0, qi(1)),
                    mono(0, 2, -c.clone()),
                    mono(2, 0, -pow(&c, 3) / qi(3)),
                    mono(1, 1, -(&c * &c)),
                    mono(3, 0, -pow(&c, 6) / qi(3)),
                    mono(2, 1, -(q(5, 3) * pow(&c, 5))),
                    mono(1, 2, -(qi(2) * pow(&c, 4))),
                    mono(0, 3, -(q(5, 9) * pow(&c, 3))),
                ]
                .iter()
                .fold(Series::exact_zero(xy()), |acc, m| &acc + m),
                &(&y() + &mono(1, 0, c.clone())) - &mono(0, 2, q(4, 3) * &c * &c),
            ];
            chain.push_plain("remove the y⁵ term", images)?;
        }
        return finish_by_flow(chain, NormalForm::X3XY3, 5, t);
    }
    if oc == 5 {
        let (b, c) = (bs.coeff(&[0, 4]), cs.coeff(&[0, 5]));
        let images = vec![
            [
                mono(1, 0, qi(1)),
                mono(3, 0, -(qi(4) * pow(&b, 5) / (qi(9375) * pow(&c, 4)))),
                mono(2, 1, pow(&b, 4) / (qi(125) * pow(&c, 3))),
                mono(1, 2, -(qi(4) * pow(&b, 3) / (qi(75) * &c * &c))),
                mono(0, 3, qi(2) * &b * &b / (qi(15) * &c)),
            ]
            .iter()
            .fold(Series::exact_zero(xy()), |acc, m| &acc + m),
            &y() - &mono(1, 0, &b / (qi(5) * &c)),
        ];
        chain.push_plain("remove the xy⁴ term", images)?;
        chain.push_scaled("scale the y⁵ coefficient to 1", vec![mono(1, 0, &c * &c), mono(0, 1, c.clone())], pow(&c, 6))?;
        return finish_by_flow(chain, NormalForm::X3Y5, 5, t);
    }
    let nf = NormalForm::X3Bare { b: bs.coeff(&[0, 4]), c: cs.coeff(&[0, 6]), prepared: chain.current().clone() };
    Ok(Outcome::Reduced(nf))
}

//! Explicit elements `f + z g` of `ℚ[[x,y,z]]/(z² - F)` that are
//! nonnegative wherever `F ≥ 0` but are not sums of squares.

use num_traits::{One, Signed, Zero};

use super::dominating::dominating_constant;
use super::squares::four_squares;
use super::{arc_sign, Arc, SignResult, Side};
use crate::classify::{NormalForm, Order2Tail};
use crate::error::{Error, Result};
use crate::series::vars;
use crate::{Rational, Series};

#[derive(Clone, Debug, PartialEq)]
pub struct Obstruction {
    pub f: Series,
    pub g: Series,
    /// The `F` of the relation `z² - F`.
    pub surface: Series,
    /// Demonstration arcs with the signs of `F` and `f` along them.
    pub arcs: Vec<(Arc, SignResult, SignResult)>,
    pub description: String,
}

impl Obstruction {
    /// `f + z g` over `x, y, z`.
    pub fn element(&self) -> Series {
        let v = vars(&["x", "y", "z"]);
        let z = Series::var(v.clone(), 2);
        &self.f.embed(&v).expect("x, y") + &(&self.g.embed(&v).expect("x, y") * &z)
    }
}

fn xy(s: &str) -> Series {
    crate::expr::parse_series(s, &vars(&["x", "y"])).expect("internal expression")
}

fn mono(ex: u32, ey: u32, c: Rational) -> Series {
    Series::monomial(vars(&["x", "y"]), &[ex, ey], c)
}

fn build(f: Series, g: Series, surface: Series, extra: Vec<Arc>, description: String) -> Result<Obstruction> {
    let mut arcs = Vec::new();
    let axes = [["s", "0"], ["0", "s"]];
    let mut probes: Vec<Arc> = axes
        .iter()
        .flat_map(|c| [Side::Positive, Side::Negative].map(|side| Arc::parse(c, side).expect("axis arc")))
        .collect();
    probes.extend(extra);
    for arc in probes {
        let sf = arc_sign(&surface, &arc)?;
        let se = arc_sign(&f, &arc)?;
        arcs.push((arc, sf, se));
    }
    Ok(Obstruction { f, g, surface, arcs, description })
}

/// The obstruction element for a normal form whose answer is negative.
pub fn obstruction_arcs(nf: &NormalForm) -> Result<Obstruction> {
    let zero = || Series::exact_zero(vars(&["x", "y"]));
    let surface = nf.polynomial();
    let not_case = || Error::NotAnObstructionCase(format!("{} has no obstruction", nf.tag()));
    match nf {
        NormalForm::Order2 { a, tail } if a.is_negative() => match tail {
            Order2Tail::Zero => build(xy("x"), zero(), surface, vec![], "x vanishes on F ≥ 0".into()),
            Order2Tail::OddPow { .. } => build(xy("y"), zero(), surface, vec![], "F ≥ 0 forces y ≥ 0".into()),
            Order2Tail::EvenPow { k: 1, b } if b.is_negative() => {
                build(xy("x"), zero(), surface, vec![], "F is negative definite".into())
            }
            Order2Tail::EvenPow { k, b } if *k >= 2 => {
                let a1 = four_squares(&-a.clone())?.into_iter().find(|t| !t.is_zero()).expect("positive");
                let lead = b * b + Rational::one();
                let f = if k % 2 == 0 {
                    &mono(0, *k, lead) + &mono(1, 0, a1)
                } else {
                    &mono(0, k + 1, lead) + &mono(1, 1, a1)
                };
                build(f, zero(), surface, vec![], "|x| is bounded by a multiple of |y|^k on F ≥ 0".into())
            }
            _ => Err(not_case()),
        },
        NormalForm::X2YPlus { a, .. } if a.is_negative() => {
            build(xy("y"), zero(), surface, vec![], "F ≥ 0 forces y ≥ 0".into())
        }
        NormalForm::X3Y4 { a } if a.is_negative() => {
            build(xy("x"), zero(), surface, vec![], "F ≥ 0 forces x ≥ 0".into())
        }
        NormalForm::X3Bare { b, c, prepared } => {
            let m = Rational::from_integer(2.into()) * (b * b + Rational::one()) * (c * c + Rational::one());
            let m2 = &m * &m;
            let f = &xy("x") + &mono(0, 2, m2.clone());
            let v = Arc::parameter();
            let extra = vec![Arc::new(
                1,
                vec![Series::monomial(v.clone(), &[2], -m2), Series::var(v, 0)],
                Side::Positive,
            )?];
            build(f, zero(), prepared.clone(), extra, format!("x + M²y² with M = {m}"))
        }
        NormalForm::HighOrder { series, .. } => {
            let m = dominating_constant(series, 2)?.m;
            let f = xy("x^2 + y^2").scalar_mul(&m);
            let g = Series::one(vars(&["x", "y"]));
            build(f, g, series.clone(), vec![], format!("M(x² + y²) + z with M = {m}"))
        }
        NormalForm::NotReduced => {
            build(zero(), Series::one(vars(&["x", "y"])), zero(), vec![], "z with z² = 0".into())
        }
        _ => Err(not_case()),
    }
}

/// Why `f + z g` is not a sum of squares modulo `z² - F`, when a simple
/// degree argument shows it: order one, or an order-two part with a cross
/// term in a variable whose square no square sum nor the relation can
/// produce.
pub fn not_sum_of_squares(element: &Obstruction) -> Option<&'static str> {
    if element.surface.order().lower_bound() < 2 {
        return None;
    }
    let e = element.element();
    if !e.constant_term().is_zero() {
        return None;
    }
    let w = e.order().known()?;
    if w == 1 {
        return Some("order one");
    }
    if w != 2 {
        return None;
    }
    let v3 = e.vars().clone();
    let e2 = e.homogeneous_part(2);
    let rel = &Series::var(v3.clone(), 2).square() - &element.surface.homogeneous_part(2).embed(&v3).ok()?;
    let sq = |i: usize| {
        let mut ex = vec![0; 3];
        ex[i] = 2;
        ex
    };
    let cross = |i: usize, j: usize| {
        let mut ex = vec![0; 3];
        ex[i] += 1;
        ex[j] += 1;
        ex
    };
    (0..3)
        .any(|v| {
            let others = (0..3).filter(move |&u| u != v);
            e2.coeff(&sq(v)).is_zero()
                && rel.coeff(&sq(v)).is_zero()
                && others.clone().all(|u| rel.coeff(&cross(u, v)).is_zero())
                && others.clone().any(|u| !e2.coeff(&cross(u, v)).is_zero())
        })
        .then_some("quadratic part has an unreachable cross term")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionCheck {
    pub arcs_checked: usize,
    pub arcs_with_f_nonnegative: usize,
    pub not_sos: &'static str,
}

/// Check `f ≥ |g| √F` (as `f ≥ 0` and `f² - F g² ≥ 0`) on every arc where
/// `F` is not negative, and the non-SOS argument.
pub fn verify_obstruction(ob: &Obstruction, arcs: &[Arc]) -> Result<ObstructionCheck> {
    let not_sos = not_sum_of_squares(ob)
        .ok_or_else(|| Error::InconsistentInput("no non-SOS argument applies to the element".into()))?;
    let gap = &ob.f.square() - &(&ob.surface * &ob.g.square());
    let mut on = 0;
    let all = ob.arcs.iter().map(|(a, _, _)| a).chain(arcs);
    let mut n = 0;
    for arc in all {
        n += 1;
        if arc_sign(&ob.surface, arc)? == SignResult::Negative {
            continue;
        }
        on += 1;
        if arc_sign(&ob.f, arc)?.is_negative() || arc_sign(&gap, arc)?.is_negative() {
            return Err(Error::InconsistentInput(format!("the element is negative along {:?} where F ≥ 0", arc.components)));
        }
    }
    Ok(ObstructionCheck { arcs_checked: n, arcs_with_f_nonnegative: on, not_sos })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psd::standard_arcs;
    use crate::scalar::qi;

    fn check(nf: NormalForm) -> Obstruction {
        let ob = obstruction_arcs(&nf).unwrap();
        verify_obstruction(&ob, standard_arcs(2)).unwrap();
        ob
    }

    #[test]
    fn order_two_cases() {
        check(NormalForm::Order2 { a: qi(-1), tail: Order2Tail::Zero });
        check(NormalForm::Order2 { a: qi(-2), tail: Order2Tail::OddPow { k: 1 } });
        check(NormalForm::Order2 { a: qi(-1), tail: Order2Tail::EvenPow { k: 1, b: qi(-3) } });
        let ob = check(NormalForm::Order2 { a: qi(-3), tail: Order2Tail::EvenPow { k: 2, b: qi(5) } });
        assert_eq!(ob.f, xy("26*y^2 + x"));
        let ob = check(NormalForm::Order2 { a: qi(-1), tail: Order2Tail::EvenPow { k: 3, b: qi(1) } });
        assert_eq!(not_sum_of_squares(&ob), Some("quadratic part has an unreachable cross term"));
        assert!(obstruction_arcs(&NormalForm::Order2 { a: qi(1), tail: Order2Tail::Zero }).is_err());
    }

    #[test]
    fn cubic_cases() {
        check(NormalForm::X2YPlus { k: 3, a: qi(-1) });
        check(NormalForm::X2YPlus { k: 4, a: qi(-2) });
        check(NormalForm::X3Y4 { a: qi(-1) });
        let ob = check(NormalForm::X3Bare { b: qi(0), c: qi(0), prepared: xy("x^3") });
        assert_eq!(ob.f, xy("x + 4*y^2"));
        let last = ob.arcs.last().unwrap();
        assert_eq!((last.1, last.2), (SignResult::Negative, SignResult::ZeroBelow(256)));
        check(NormalForm::X3Bare { b: qi(1), c: qi(-2), prepared: xy("x^3 + x*y^4 - 2*y^6") });
        assert!(matches!(obstruction_arcs(&NormalForm::X3Y5), Err(Error::NotAnObstructionCase(_))));
    }

    #[test]
    fn degenerate_cases() {
        check(NormalForm::HighOrder { order: 4, series: xy("x^4 + y^4") });
        check(NormalForm::NotReduced);
    }
}

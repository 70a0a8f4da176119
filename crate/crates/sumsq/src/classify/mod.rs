//! Reduction of `F(x, y)` to a normal form for the surface germ
//! `z² = F`, with a verified chain of coordinate changes, and the decision
//! whether every psd element of `ℚ[[x,y,z]]/(z² - F)` is a sum of squares.

mod chain;
mod normal_form;
mod order2;
mod order3;

use num_traits::{Signed, Zero};

pub use chain::ChainStep;
pub use normal_form::{NormalForm, Order2Tail};

use crate::determinacy::{determinacy_bound, DeterminacyReport};
use crate::error::{Error, Result};
use crate::psd::{obstruction_arcs, standard_arcs, verify_obstruction, Obstruction};
use crate::series::DEGREE_CAP;
use crate::weierstrass::{make_regular, prepare, tschirnhaus, WeierstrassFactorization};
use crate::{Rational, Series};
use chain::Chain;
use normal_form::xy;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Unknown(String),
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub input: Series,
    /// Requested truncation.
    pub trunc: u32,
    /// Truncation the reduction finally ran at.
    pub working_trunc: u32,
    /// `None` when `F = 0`.
    pub order: Option<u32>,
    pub normal_form: NormalForm,
    pub verdict: Verdict,
    pub reason: String,
    pub chain: Vec<ChainStep>,
    /// `F ∘ Φ = U · NF` modulo `m^verified_to`.
    pub substitutions: Vec<Series>,
    pub unit: Series,
    pub verified_to: u32,
    pub determinacy: Option<DeterminacyReport<Rational>>,
    pub obstruction: Option<Obstruction>,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    /// Recompute `F ∘ Φ - U · NF` and return the order it vanishes to.
    pub fn recheck(&self) -> Result<u32> {
        let r = &self.input.substitute(&self.substitutions)? - &(&self.unit * &self.normal_form.polynomial());
        Ok(r.order().lower_bound())
    }
}

/// Default working truncation for a polynomial of the given degree.
pub fn default_trunc(degree: u32) -> u32 {
    (2 * degree + 4).max(12)
}

pub(crate) enum Outcome {
    Reduced(NormalForm),
    NeedPrecision(u32, String),
    /// The normal form is known but no verified witness was produced.
    Stuck(NormalForm, String),
}

/// Prepare in `x`, exactly when the division terminates, else at `t`.
pub(crate) fn prepare_at(g: &Series, t: u32) -> Result<WeierstrassFactorization<Rational>> {
    if g.is_exact() {
        let w = prepare(g, 0)?;
        if w.unit.is_exact() && w.coeffs.iter().all(Series::is_exact) {
            return Ok(w);
        }
    }
    prepare(&g.truncate(t), 0)
}

/// The answer for a normal form over `ℚ`, with the reason.
pub fn decide(nf: &NormalForm) -> (Verdict, String) {
    let pos = |r: &Rational| r.is_positive();
    let yes_if = |ok: bool, why_yes: &str, why_no: &str| {
        if ok {
            (Verdict::Yes, why_yes.to_string())
        } else {
            (Verdict::No, why_no.to_string())
        }
    };
    match nf {
        NormalForm::Unit => (Verdict::Yes, "F(0) ≠ 0, so the ring is zero".into()),
        NormalForm::Smooth => (Verdict::Yes, "the surface is smooth, so the ring is a power series ring in two variables".into()),
        NormalForm::Order2 { a, tail: Order2Tail::EvenPow { k: 1, b } } => yes_if(
            pos(a) || pos(b),
            "one of the two squares has a positive coefficient",
            "-F is a sum of squares",
        ),
        NormalForm::Order2 { a, .. } => yes_if(pos(a), "the x² coefficient is positive", "the x² coefficient is negative"),
        NormalForm::X2Y => (Verdict::Yes, "F is equivalent to x²y".into()),
        NormalForm::X2YPlus { a, .. } => yes_if(pos(a), "the parameter a is positive", "the parameter a is negative"),
        NormalForm::IrreducibleCubic { .. } => (Verdict::Yes, "the cubic form has no rational linear factor".into()),
        NormalForm::X3Y4 { a } => yes_if(pos(a), "the y⁴ coefficient is positive", "the y⁴ coefficient is negative"),
        NormalForm::X3XY3 | NormalForm::X3Y5 => (Verdict::Yes, "F is equivalent to a listed simple form".into()),
        NormalForm::X3Bare { .. } => (Verdict::No, "by exclusion: F has cubic form x³ and none of the listed continuations".into()),
        NormalForm::HighOrder { .. } => (Verdict::No, "F has order at least 4".into()),
        NormalForm::NotReduced => (Verdict::No, "F = 0, so the ring is not reduced".into()),
    }
}

/// Whether the preordering generated by `F` in `ℚ[[x, y]]` is saturated;
/// defined for `ω(F) ∈ {2, 3}`.
pub fn preordering_saturated(f: &Series, trunc: u32) -> Result<Verdict> {
    let f = f.embed(&xy())?;
    match f.order().known() {
        Some(2 | 3) => Ok(classify(&f, trunc)?.verdict),
        w => Err(Error::OrderOutOfRange(w.map_or("infinity".into(), |w| w.to_string()))),
    }
}

fn smooth_chain(chain: &mut Chain, t: u32) -> Result<()> {
    let f = chain.current().clone();
    let (l, g) = make_regular(&f, 0)?;
    if !l.is_identity() {
        chain.push("make x regular", l.images(&f), Series::one(xy()), g.clone())?;
    }
    let w = prepare_at(&g, t)?;
    let (img, w2) = tschirnhaus(&w)?;
    chain.push("solve for x", vec![img, Series::var(xy(), 1)], w2.unit.clone(), w2.polynomial())
}

fn reduce(chain: &mut Chain, order: Option<u32>, t: u32, degree: u32) -> Result<Outcome> {
    let d = degree.max(2);
    // Milnor number bound (d - 1)²: a nonzero y-part has order at most (d-1)² + 1
    let milnor = (d - 1) * (d - 1);
    match order {
        None => Ok(Outcome::Reduced(NormalForm::NotReduced)),
        Some(0) => {
            let u = chain.current().clone();
            chain.push("F is a unit", chain::identity_images(), u, Series::one(xy()))?;
            Ok(Outcome::Reduced(NormalForm::Unit))
        }
        Some(1) => {
            smooth_chain(chain, t)?;
            Ok(Outcome::Reduced(NormalForm::Smooth))
        }
        Some(2) => order2::reduce(chain, t, milnor + 2),
        Some(3) => order3::reduce(chain, t, milnor.saturating_sub(1)),
        Some(w) => Ok(Outcome::Reduced(NormalForm::HighOrder { order: w, series: chain.current().clone() })),
    }
}

/// Classify an exact polynomial `F` in `x, y` at working truncation
/// `trunc`, raising it when a branch needs more precision.
pub fn classify(f: &Series, trunc: u32) -> Result<ClassificationReport> {
    let f = f.embed(&xy())?;
    if !f.is_exact() {
        return Err(Error::InvalidArgument("classification takes an exact polynomial".into()));
    }
    let order = f.order().known();
    let degree = f.degree().unwrap_or(0);
    let mut t = trunc.max(4);
    if t >= DEGREE_CAP {
        return Err(Error::precision(format!("truncation {t} is beyond the supported degree cap {DEGREE_CAP}")));
    }
    let mut notes = Vec::new();
    loop {
        let mut chain = Chain::new(&f);
        let outcome = reduce(&mut chain, order, t, degree)?;
        let (nf, stuck) = match outcome {
            Outcome::Reduced(nf) => (nf, None),
            Outcome::Stuck(nf, why) => (nf, Some(why)),
            Outcome::NeedPrecision(m, why) => {
                if m >= DEGREE_CAP - 1 {
                    return Err(Error::precision(format!("{why}; would need truncation {m}")));
                }
                notes.push(format!("working truncation raised from {t} to {m}: {why}"));
                t = m.max(t + 1);
                continue;
            }
        };
        let verified_to = chain.verify(&f)?;
        let witnessed = !matches!(nf, NormalForm::Unit | NormalForm::NotReduced | NormalForm::HighOrder { .. });
        let determinacy = if nf.is_finitely_determined() {
            let p = nf.polynomial();
            Some(determinacy_bound(&p, p.degree().unwrap_or(1) + 2)?)
        } else {
            None
        };
        let needed = determinacy.as_ref().and_then(|d| d.k).map_or(3, |k| k + 1);
        if witnessed && stuck.is_none() && verified_to < needed {
            let m = (needed + 4).max(t + 2);
            if m >= DEGREE_CAP - 1 {
                return Err(Error::precision(format!("the chain verifies only to {verified_to}")));
            }
            notes.push(format!("working truncation raised from {t} to {m}: the chain verified only to {verified_to}"));
            t = m;
            continue;
        }
        let (mut verdict, mut reason) = decide(&nf);
        if let Some(why) = stuck {
            verdict = Verdict::Unknown(why.clone());
            reason = why;
        }
        let mut obstruction = None;
        if verdict == Verdict::No {
            let ob = obstruction_arcs(&nf)?;
            match verify_obstruction(&ob, standard_arcs(2)) {
                Ok(check) => notes.push(format!(
                    "obstruction {} checked on {} arcs ({} with F ≥ 0); not a sum of squares: {}",
                    ob.description, check.arcs_checked, check.arcs_with_f_nonnegative, check.not_sos
                )),
                Err(e) => {
                    verdict = Verdict::Unknown(format!("obstruction failed to verify: {e}"));
                    reason = format!("{reason}; obstruction failed to verify");
                }
            }
            obstruction = Some(ob);
        }
        if verdict == Verdict::Yes && !matches!(nf, NormalForm::Unit) {
            notes.push("every sum of squares in the ring is a sum of at most 16 squares".into());
        }
        if matches!(nf, NormalForm::X2Y | NormalForm::Order2 { tail: Order2Tail::Zero, .. }) {
            notes.push("no further term can appear below the Milnor bound of the input degree".into());
        }
        return Ok(ClassificationReport {
            input: f,
            trunc,
            working_trunc: t,
            order,
            normal_form: nf,
            verdict,
            reason,
            substitutions: chain.phi.clone(),
            unit: chain.unit.clone(),
            chain: chain.steps,
            verified_to,
            determinacy,
            obstruction,
            notes,
        });
    }
}

/// `true` when the unit's constant term is a rational square, so the unit
/// can be absorbed into `z`.
pub fn unit_is_square(u: &Series) -> bool {
    crate::scalar::rational_sqrt(&u.constant_term()).is_some() && !u.constant_term().is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_series;
    use crate::scalar::qi;

    fn p(s: &str) -> Series {
        parse_series(s, &xy()).unwrap()
    }

    fn run(s: &str) -> ClassificationReport {
        let f = p(s);
        let r = classify(&f, default_trunc(f.degree().unwrap_or(0))).unwrap();
        assert_eq!(r.recheck().unwrap(), r.verified_to, "{s}");
        r
    }

    #[test]
    fn decide_table() {
        let nf = NormalForm::Order2 { a: qi(1), tail: Order2Tail::EvenPow { k: 1, b: qi(-3) } };
        assert_eq!(decide(&nf).0, Verdict::Yes);
        assert_eq!(decide(&NormalForm::X3Y4 { a: qi(-2) }).0, Verdict::No);
        assert_eq!(decide(&NormalForm::X2Y).0, Verdict::Yes);
    }

    #[test]
    fn order_two() {
        let r = run("x^2 + y^3");
        assert_eq!(r.normal_form, NormalForm::Order2 { a: qi(1), tail: Order2Tail::OddPow { k: 1 } });
        assert_eq!(r.verdict, Verdict::Yes);
        let r = run("2*x^2 - y^6");
        assert_eq!(r.normal_form, NormalForm::Order2 { a: qi(2), tail: Order2Tail::EvenPow { k: 3, b: qi(-1) } });
        let r = run("-x^2 - y^2");
        assert_eq!(r.verdict, Verdict::No);
        let r = run("-x^2");
        assert_eq!(r.normal_form, NormalForm::Order2 { a: qi(-1), tail: Order2Tail::Zero });
        assert_eq!(r.verdict, Verdict::No);
        let r = run("x*y + y^3");
        assert_eq!(r.verdict, Verdict::Yes);
        assert!(unit_is_square(&r.unit));
    }

    #[test]
    fn order_three() {
        let r = run("x^3 + 2*y^3");
        assert_eq!(r.normal_form, NormalForm::IrreducibleCubic { a: qi(0), b: qi(2) });
        assert_eq!(r.verdict, Verdict::Yes);
        assert_eq!(run("x^2*y - y^3").normal_form, NormalForm::X2YPlus { k: 3, a: qi(1) });
        let r = run("x^2*y + y^3");
        assert_eq!(r.normal_form, NormalForm::X2YPlus { k: 3, a: qi(-1) });
        assert_eq!(r.verdict, Verdict::No);
        assert_eq!(run("x^2*y").normal_form, NormalForm::X2Y);
        assert_eq!(run("x^3 + x*y^3 + y^5").normal_form, NormalForm::X3XY3);
        assert_eq!(run("x^3 + y^5").normal_form, NormalForm::X3Y5);
        assert_eq!(run("x^3 - y^4").verdict, Verdict::No);
        assert_eq!(run("x^3 + y^4").verdict, Verdict::Yes);
        let r = run("x^3");
        assert!(matches!(r.normal_form, NormalForm::X3Bare { .. }));
        assert_eq!(r.verdict, Verdict::No);
    }

    #[test]
    fn degenerate() {
        assert_eq!(run("x^4 + y^4").verdict, Verdict::No);
        assert_eq!(run("0").normal_form, NormalForm::NotReduced);
        assert_eq!(run("x + y^2").normal_form, NormalForm::Smooth);
        assert_eq!(run("1 + x").verdict, Verdict::Yes);
        assert!(matches!(preordering_saturated(&p("x^4"), 12), Err(Error::OrderOutOfRange(_))));
        assert_eq!(preordering_saturated(&p("x^2*y"), 12).unwrap(), Verdict::Yes);
    }
}

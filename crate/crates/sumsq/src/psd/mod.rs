//! Positivity along formal arcs, the quadratic-in-`z` psd criterion and
//! exact sum-of-squares certificates.
//!
//! Local psd-ness of a general series is not decided here. Quadratic forms
//! are decided exactly by inertia; everything else goes through a
//! falsification-only arc oracle, so `Inconclusive` is a normal answer.

pub mod cert;
pub mod dominating;
pub mod obstruction;
pub mod squares;
pub mod sturm;

use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::series::vars;
use crate::{Rational, Series};

pub use cert::{
    cubic_trace_descend, erase_denominators, lagrange_transfer, sos_descend_quadratic, CubicDescent, ErasureProblem,
    LagrangeTransfer, Modulus, QuadraticDescent, SosCertificate, Weight,
};
pub use dominating::{dominating_constant, DominatingConstant};
pub use obstruction::{obstruction_arcs, verify_obstruction, Obstruction, ObstructionCheck};
pub use squares::four_squares;
pub use sturm::{count_real_roots, sturm, Interval, RootCount, SturmSequence};

/// Which way the arc parameter approaches zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Positive,
    Negative,
}

/// A formal curve through the origin, `x_i = ξ_i(s)` with `s → 0` on one
/// side; `q` records the ramification `t = s^q` the arc was drawn with.
#[derive(Clone, Debug, PartialEq)]
pub struct Arc {
    pub q: u32,
    pub components: Vec<Series>,
    pub side: Side,
}

impl Arc {
    pub fn parameter() -> crate::Vars {
        vars(&["s"])
    }

    /// Build from polynomial expressions in `s`.
    pub fn parse(components: &[&str], side: Side) -> Result<Self> {
        let v = Self::parameter();
        let components =
            components.iter().map(|c| crate::expr::parse_series(c, &v)).collect::<Result<Vec<_>>>()?;
        Self::new(1, components, side)
    }

    pub fn new(q: u32, components: Vec<Series>, side: Side) -> Result<Self> {
        if components.iter().any(|c| !c.constant_term().is_zero()) {
            return Err(Error::InvalidArgument("arc components must vanish at s = 0".into()));
        }
        Ok(Self { q, components, side })
    }

    /// Components with `s ↦ -s` applied on the negative side.
    pub fn oriented(&self) -> Vec<Series> {
        match self.side {
            Side::Positive => self.components.clone(),
            Side::Negative => {
                let minus_s = Series::var(Self::parameter(), 0).scalar_mul(&-Rational::one());
                self.components.iter().map(|c| c.substitute(std::slice::from_ref(&minus_s)).expect("one variable")).collect()
            }
        }
    }

    /// Add a component, e.g. a `z` value.
    pub fn extended(&self, c: Series) -> Self {
        let mut components = self.components.clone();
        components.push(c);
        Self { q: self.q, components, side: self.side }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignResult {
    Positive,
    Negative,
    /// Composite vanishes below this order; its sign is not known.
    ZeroBelow(u32),
}

impl SignResult {
    pub fn is_negative(self) -> bool {
        self == SignResult::Negative
    }
}

/// `f ∘ arc` with its sign, orientation already applied.
pub fn compose(f: &Series, arc: &Arc) -> Result<Series> {
    if arc.components.len() != f.nvars() {
        return Err(Error::VariableMismatch(format!(
            "arc has {} components, series has {} variables",
            arc.components.len(),
            f.nvars()
        )));
    }
    f.substitute(&arc.oriented())
}

/// Sign of the leading coefficient of `f ∘ arc` as `s → 0` on the arc's
/// side.
pub fn arc_sign(f: &Series, arc: &Arc) -> Result<SignResult> {
    let g = compose(f, arc)?;
    if g.trunc() == 0 {
        return Err(Error::precision("composition along the arc lost all precision"));
    }
    let lead = g.terms().next().map(|(_, c)| c.is_positive());
    Ok(match lead {
        None => SignResult::ZeroBelow(g.trunc()),
        Some(true) => SignResult::Positive,
        Some(false) => SignResult::Negative,
    })
}

/// Number of arcs in the standard sampling family.
pub const FAMILY_SIZE: usize = 200;
const FAMILY_SEED: u64 = 0x5eed_a7c5;

fn small_rational(rng: &mut ChaCha8Rng, nonzero: bool) -> Rational {
    loop {
        let n: i64 = rng.gen_range(-3..=3);
        let d: i64 = rng.gen_range(1..=2);
        if n != 0 || !nonzero {
            return Rational::new(n.into(), d.into());
        }
    }
}

/// A seeded family of `count` rational arcs in `n` variables: the signed
/// coordinate axes first, then arcs with one component `s^q` (`q ≤ 4`) and
/// the others random polynomials of order 1 to 6 and degree at most 8.
pub fn arc_family(n: usize, count: usize, seed: u64) -> Vec<Arc> {
    let v = Arc::parameter();
    let s_pow = |e: u32| Series::monomial(v.clone(), &[e], Rational::one());
    let mut out = Vec::with_capacity(count);
    'axes: for i in 0..n {
        for side in [Side::Positive, Side::Negative] {
            if out.len() == count {
                break 'axes;
            }
            let comps = (0..n).map(|j| if i == j { s_pow(1) } else { Series::exact_zero(v.clone()) }).collect();
            out.push(Arc { q: 1, components: comps, side });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
    while out.len() < count {
        let q: u32 = rng.gen_range(1..=4);
        let pivot = rng.gen_range(0..n);
        let side = if rng.gen_bool(0.5) { Side::Positive } else { Side::Negative };
        let comps = (0..n)
            .map(|j| {
                if j == pivot {
                    return s_pow(q);
                }
                let ord: u32 = rng.gen_range(1..=6);
                let deg: u32 = rng.gen_range(ord..=8);
                let mut c = Series::exact_zero(v.clone());
                for e in ord..=deg {
                    let coef = small_rational(&mut rng, e == ord);
                    c = &c + &Series::monomial(v.clone(), &[e], coef);
                }
                c
            })
            .collect();
        out.push(Arc { q, components: comps, side });
    }
    out
}

/// The fixed 200-arc family, computed once per dimension.
pub fn standard_arcs(n: usize) -> &'static [Arc] {
    static CACHE: [OnceLock<Vec<Arc>>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    assert!((1..=3).contains(&n), "standard arcs exist for 1 to 3 variables");
    CACHE[n].get_or_init(|| arc_family(n, FAMILY_SIZE, FAMILY_SEED))
}

/// First arc of `arcs` along which `f` is negative.
pub fn find_negative_arc(f: &Series, arcs: &[Arc]) -> Option<Arc> {
    arcs.iter().find(|a| matches!(arc_sign(f, a), Ok(SignResult::Negative))).cloned()
}

/// Signature of a rational quadratic form, with a direction on which it is
/// negative when there is one.
#[derive(Clone, Debug, PartialEq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
    pub negative_direction: Option<Vec<Rational>>,
}

/// Symmetric Gram matrix of a quadratic form.
pub fn gram_matrix(q: &Series) -> Vec<Vec<Rational>> {
    let n = q.nvars();
    let half = Rational::new(1.into(), 2.into());
    let mut a = vec![vec![Rational::zero(); n]; n];
    for (e, c) in q.terms() {
        if e.iter().sum::<u32>() != 2 {
            continue;
        }
        let idx: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, e[i] as usize)).collect();
        let (i, j) = (idx[0], idx[1]);
        if i == j {
            a[i][i] = c.clone();
        } else {
            a[i][j] = c * &half;
            a[j][i] = c * &half;
        }
    }
    a
}

/// Diagonalise by congruence, `P A Pᵀ = D`; a zero pivot is repaired by
/// adding a row/column with a nonzero off-diagonal entry.
pub fn quadratic_form_inertia(q: &Series) -> Inertia {
    let mut a = gram_matrix(q);
    let n = a.len();
    let mut p: Vec<Vec<Rational>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    let mut out = Inertia { positive: 0, negative: 0, zero: 0, negative_direction: None };
    let add_row = |a: &mut Vec<Vec<Rational>>, p: &mut Vec<Vec<Rational>>, k: usize, j: usize, f: &Rational| {
        // row_k += f·row_j, col_k += f·col_j
        for c in 0..n {
            let v = &a[j][c] * f;
            a[k][c] += v;
        }
        for r in 0..n {
            let v = &a[r][j] * f;
            a[r][k] += v;
        }
        for c in 0..n {
            let v = &p[j][c] * f;
            p[k][c] += v;
        }
    };
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
                p.swap(k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                add_row(&mut a, &mut p, k, j, &Rational::one());
            }
        }
        let d = a[k][k].clone();
        if d.is_zero() {
            out.zero += 1;
            continue;
        }
        for j in k + 1..n {
            if !a[j][k].is_zero() {
                let f = -(&a[j][k] / &d);
                add_row(&mut a, &mut p, j, k, &f);
            }
        }
        if d.is_positive() {
            out.positive += 1;
        } else {
            out.negative += 1;
            out.negative_direction.get_or_insert_with(|| p[k].clone());
        }
    }
    out
}

/// Answer of a psd oracle; `No` carries an arc along which the tested
/// series is negative.
#[derive(Clone, Debug, PartialEq)]
pub enum PsdAnswer {
    Yes,
    No(Arc),
    Inconclusive,
}

/// Arc `s ↦ s·v` on the given side.
fn linear_arc(direction: &[Rational], side: Side) -> Arc {
    let v = Arc::parameter();
    let comps = direction.iter().map(|c| Series::monomial(v.clone(), &[1], c.clone())).collect();
    Arc { q: 1, components: comps, side }
}

/// A small integer direction on which the homogeneous `h` has the sign
/// `want` (nonzero).
fn integer_direction(h: &Series, negative: bool) -> Option<Vec<Rational>> {
    let n = h.nvars();
    let grid: Vec<Vec<i64>> = (0..(7usize.pow(n as u32)))
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let d = (k % 7) as i64 - 3;
                    k /= 7;
                    d
                })
                .collect()
        })
        .collect();
    grid.into_iter().find_map(|v| {
        let pt: Vec<Rational> = v.iter().map(|&x| Rational::from_integer(x.into())).collect();
        let val = h
            .terms()
            .fold(Rational::zero(), |acc, (e, c)| acc + c * e.iter().zip(&pt).fold(Rational::one(), |m, (&k, x)| m * crate::scalar::pow(x, k)));
        ((negative && val.is_negative()) || (!negative && val.is_positive())).then_some(pt)
    })
}

/// The base oracle: exact on constants, quadratic forms, odd orders and
/// order-2 germs with a definite or indefinite initial form; otherwise a
/// search through `arcs` that can only refute.
pub fn base_psd(f: &Series, arcs: &[Arc]) -> PsdAnswer {
    if f.is_zero() {
        return if f.is_exact() { PsdAnswer::Yes } else { PsdAnswer::Inconclusive };
    }
    let c = f.constant_term();
    if !c.is_zero() {
        if c.is_positive() {
            return PsdAnswer::Yes;
        }
        let mut dir = vec![Rational::zero(); f.nvars()];
        if let Some(d) = dir.first_mut() {
            *d = Rational::one();
        }
        return PsdAnswer::No(linear_arc(&dir, Side::Positive));
    }
    let Some(w) = f.order().known() else { return PsdAnswer::Inconclusive };
    let initial = f.homogeneous_part(w);
    if w % 2 == 1 {
        if let Some(d) = integer_direction(&initial, true) {
            return PsdAnswer::No(linear_arc(&d, Side::Positive));
        }
    }
    if w == 2 {
        let inertia = quadratic_form_inertia(&initial);
        if let Some(d) = inertia.negative_direction {
            return PsdAnswer::No(linear_arc(&d, Side::Positive));
        }
        if inertia.zero == 0 || (f.is_exact() && f.degree() == Some(2)) {
            return PsdAnswer::Yes;
        }
    }
    find_negative_arc(f, arcs).map_or(PsdAnswer::Inconclusive, PsdAnswer::No)
}

/// Which coefficient test settled a `No`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadraticTerm {
    A0,
    A2,
    Discriminant,
}

#[derive(Clone, Debug, PartialEq)]
pub enum QuadraticZAnswer {
    Yes,
    /// `arc` makes the named series negative; for `A0` the extension by
    /// `z = 0` is a negative arc of `a0 + a1 z + a2 z²` itself.
    No { failing: QuadraticTerm, arc: Arc },
    Inconclusive,
}

/// `a0 + a1 z + a2 z²` is psd iff `a0`, `a2` and `4 a0 a2 - a1²` are.
pub fn quadratic_z_psd(a0: &Series, a1: &Series, a2: &Series, oracle: &dyn Fn(&Series) -> PsdAnswer) -> QuadraticZAnswer {
    let disc = &(a0 * a2).scalar_mul(&Rational::from_integer(4.into())) - &a1.square();
    let mut all_yes = true;
    for (term, s) in [(QuadraticTerm::A0, a0), (QuadraticTerm::A2, a2), (QuadraticTerm::Discriminant, &disc)] {
        match oracle(s) {
            PsdAnswer::Yes => {}
            PsdAnswer::No(arc) => return QuadraticZAnswer::No { failing: term, arc },
            PsdAnswer::Inconclusive => all_yes = false,
        }
    }
    if all_yes {
        QuadraticZAnswer::Yes
    } else {
        QuadraticZAnswer::Inconclusive
    }
}

/// [`quadratic_z_psd`] with [`base_psd`] on the standard arcs.
pub fn quadratic_z_psd_default(a0: &Series, a1: &Series, a2: &Series) -> QuadraticZAnswer {
    let n = a0.nvars().clamp(1, 3);
    quadratic_z_psd(a0, a1, a2, &|s| base_psd(s, standard_arcs(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_series;
    use crate::scalar::qi;
    use proptest::prelude::*;

    fn p(s: &str) -> Series {
        parse_series(s, &vars(&["x", "y"])).unwrap()
    }

    fn poly(terms: &[(i64, u32, u32)]) -> Series {
        terms.iter().fold(Series::exact_zero(vars(&["x", "y"])), |acc, &(c, i, j)| {
            &acc + &Series::monomial(vars(&["x", "y"]), &[i, j], qi(c))
        })
    }

    #[test]
    fn arc_sign_examples() {
        let a = Arc::parse(&["s^3", "s^2"], Side::Positive).unwrap();
        assert!(matches!(arc_sign(&p("x^2 - y^3"), &a).unwrap(), SignResult::ZeroBelow(_)));
        let a = Arc::parse(&["-s^2", "s"], Side::Positive).unwrap();
        assert_eq!(arc_sign(&p("x^3 + y^5"), &a).unwrap(), SignResult::Positive);
        assert_eq!(arc_sign(&p("x"), &a).unwrap(), SignResult::Negative);
        let a = Arc::parse(&["s", "0"], Side::Negative).unwrap();
        assert_eq!(arc_sign(&p("x^3"), &a).unwrap(), SignResult::Negative);
        assert_eq!(arc_sign(&p("x^2"), &a).unwrap(), SignResult::Positive);
        let t = parse_series("x^2", &vars(&["x", "y"])).unwrap().truncate(3);
        let a = Arc::parse(&["s^2", "s"], Side::Positive).unwrap();
        assert!(matches!(arc_sign(&(&t - &p("x^2")).truncate(3), &a).unwrap(), SignResult::ZeroBelow(3)));
    }

    #[test]
    fn family_shape() {
        let fam = standard_arcs(2);
        assert_eq!(fam.len(), FAMILY_SIZE);
        assert!(fam.iter().all(|a| a.q <= 4 && a.components.iter().all(|c| c.order().lower_bound() >= 1)));
        assert_eq!(arc_family(2, 50, 1), arc_family(2, 50, 1));
    }

    #[test]
    fn inertia_cases() {
        let i = quadratic_form_inertia(&p("x^2 + y^2"));
        assert_eq!((i.positive, i.negative, i.zero), (2, 0, 0));
        let i = quadratic_form_inertia(&p("x*y"));
        assert_eq!((i.positive, i.negative, i.zero), (1, 1, 0));
        let d = i.negative_direction.unwrap();
        let arc = linear_arc(&d, Side::Positive);
        assert_eq!(arc_sign(&p("x*y"), &arc).unwrap(), SignResult::Negative);
        let i = quadratic_form_inertia(&p("x^2 + 2*x*y + y^2"));
        assert_eq!((i.positive, i.negative, i.zero), (1, 0, 1));
    }

    #[test]
    fn quadratic_z_examples() {
        let one = p("1");
        let zero = Series::exact_zero(one.vars().clone());
        assert_eq!(quadratic_z_psd_default(&one, &zero, &one), QuadraticZAnswer::Yes);
        assert_eq!(quadratic_z_psd_default(&p("x^2"), &p("2*x"), &one), QuadraticZAnswer::Yes);
        match quadratic_z_psd_default(&p("x^2"), &p("3*x"), &one) {
            QuadraticZAnswer::No { failing, arc } => {
                assert_eq!(failing, QuadraticTerm::Discriminant);
                assert_eq!(arc_sign(&p("-5*x^2"), &arc).unwrap(), SignResult::Negative);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn base_oracle_cases() {
        let fam = standard_arcs(2);
        assert_eq!(base_psd(&p("x^2 + y^4"), fam), PsdAnswer::Inconclusive);
        assert_eq!(base_psd(&p("x^2 + y^2 + x^3"), fam), PsdAnswer::Yes);
        assert!(matches!(base_psd(&p("x^3 + y^4"), fam), PsdAnswer::No(_)));
        assert!(matches!(base_psd(&p("x^2 - y^4"), fam), PsdAnswer::No(_)));
        assert!(matches!(base_psd(&p("-1 + x"), fam), PsdAnswer::No(_)));
        assert_eq!(base_psd(&p("2*x^2"), fam), PsdAnswer::Yes);
        assert_eq!(base_psd(&qi(3).into_series(), fam), PsdAnswer::Yes);
    }

    trait IntoSeries {
        fn into_series(self) -> Series;
    }
    impl IntoSeries for Rational {
        fn into_series(self) -> Series {
            Series::constant(vars(&["x", "y"]), self)
        }
    }

    fn quad() -> impl Strategy<Value = Series> {
        (-3i64..=3, -3i64..=3, -3i64..=3).prop_map(|(a, b, c)| poly(&[(a, 2, 0), (b, 1, 1), (c, 0, 2)]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn arc_sign_matches_evaluation(a in -4i64..=4, b in -4i64..=4, c in -4i64..=4) {
            let f = poly(&[(a, 2, 0), (b, 1, 2), (c, 0, 3)]);
            for arc in &standard_arcs(2)[..40] {
                let sign = arc_sign(&f, arc).unwrap();
                let g = compose(&f, arc).unwrap();
                // evaluate at shrinking positive s
                let mut seen = Vec::new();
                for k in 10..30 {
                    let s = Rational::new(1.into(), num_bigint::BigInt::from(2).pow(k));
                    let val = g.terms().fold(Rational::zero(), |acc, (e, co)| acc + co * crate::scalar::pow(&s, e[0]));
                    seen.push(if val.is_positive() { 1 } else if val.is_negative() { -1 } else { 0 });
                }
                let last = *seen.last().unwrap();
                match sign {
                    SignResult::Positive => prop_assert_eq!(last, 1),
                    SignResult::Negative => prop_assert_eq!(last, -1),
                    SignResult::ZeroBelow(_) => prop_assert_eq!(last, 0),
                }
            }
        }

        #[test]
        fn quadratic_yes_is_sound(a0 in quad(), a1 in quad(), a2 in quad()) {
            let ans = quadratic_z_psd(&a0, &a1, &a2, &|s| {
                // exact only: quadratic forms and constants
                match base_psd(s, &[]) { PsdAnswer::Inconclusive => PsdAnswer::Inconclusive, x => x }
            });
            let v3 = vars(&["x", "y", "z"]);
            let g = &(&a0.embed(&v3).unwrap() + &(&a1.embed(&v3).unwrap() * &Series::var(v3.clone(), 2)))
                + &(&a2.embed(&v3).unwrap() * &Series::var(v3.clone(), 2).square());
            match ans {
                QuadraticZAnswer::Yes => {
                    for arc in standard_arcs(3).iter().take(80) {
                        prop_assert!(!arc_sign(&g, arc).unwrap().is_negative());
                    }
                }
                QuadraticZAnswer::No { failing, arc } => {
                    let disc = &(&a0 * &a2).scalar_mul(&qi(4)) - &a1.square();
                    let s = match failing { QuadraticTerm::A0 => &a0, QuadraticTerm::A2 => &a2, QuadraticTerm::Discriminant => &disc };
                    prop_assert!(arc_sign(s, &arc).unwrap().is_negative());
                }
                QuadraticZAnswer::Inconclusive => {}
            }
        }
    }
}

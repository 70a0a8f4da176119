//! Sum-of-squares certificates and the transformations producing them.

use num_traits::{One, Signed, Zero};

use super::squares::{four_squares, recombine};
use crate::error::{Error, Result};
use crate::series::{Vars, DEGREE_CAP};
use crate::{Rational, Series};

/// A nonnegative rational weight with an explicit four-square
/// decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    pub value: Rational,
    pub squares: [Rational; 4],
}

impl Weight {
    pub fn new(value: Rational) -> Result<Self> {
        let squares = four_squares(&value)
            .map_err(|_| Error::SideConditionViolated(format!("weight {value} is negative")))?;
        Ok(Self { value, squares })
    }

    pub fn recombines(&self) -> bool {
        recombine(&self.squares) == self.value
    }
}

/// `cofactor · relation` added to the sum of squares.
#[derive(Clone, Debug, PartialEq)]
pub struct Modulus {
    pub relation: Series,
    pub cofactor: Series,
}

/// `target ≡ Σ w_i s_i² + cofactor · relation` modulo `m^verified_to`
/// (exact when `verified_to` is the degree cap).
#[derive(Clone, Debug, PartialEq)]
pub struct SosCertificate {
    pub target: Series,
    pub weights: Vec<Weight>,
    pub summands: Vec<Series>,
    pub modulus: Option<Modulus>,
    pub verified_to: u32,
}

impl SosCertificate {
    /// Build and verify; fails when the identity does not hold below the
    /// known precision.
    pub fn new(target: Series, weights: Vec<Rational>, summands: Vec<Series>, modulus: Option<Modulus>) -> Result<Self> {
        if weights.len() != summands.len() {
            return Err(Error::InvalidArgument("one weight per summand".into()));
        }
        let weights = weights.into_iter().map(Weight::new).collect::<Result<Vec<_>>>()?;
        let mut cert = Self { target, weights, summands, modulus, verified_to: 0 };
        let r = cert.residual()?;
        if !r.is_zero() {
            return Err(Error::InconsistentInput(format!("certificate misses the target by {r}")));
        }
        cert.verified_to = r.trunc();
        Ok(cert)
    }

    /// All weights one.
    pub fn plain(target: Series, summands: Vec<Series>, modulus: Option<Modulus>) -> Result<Self> {
        let w = vec![Rational::one(); summands.len()];
        Self::new(target, w, summands, modulus)
    }

    pub fn residual(&self) -> Result<Series> {
        let mut r = self.target.clone();
        for (w, s) in self.weights.iter().zip(&self.summands) {
            r = r.checked_sub(&s.square().scalar_mul(&w.value))?;
        }
        if let Some(m) = &self.modulus {
            r = r.checked_sub(&m.cofactor.checked_mul(&m.relation)?)?;
        }
        Ok(r)
    }

    /// Re-expand the identity and the weight decompositions.
    pub fn check(&self) -> bool {
        self.weights.iter().all(Weight::recombines)
            && self.residual().is_ok_and(|r| r.is_zero() && r.trunc() >= self.verified_to)
    }

    pub fn is_exact(&self) -> bool {
        self.verified_to >= DEGREE_CAP
    }

    pub fn square_count(&self) -> usize {
        self.summands.len()
    }

    /// Replace each weighted square `w s²` by `Σ (t_k s)²` from the weight's
    /// four-square decomposition.
    pub fn expanded(&self) -> Result<Self> {
        let mut summands = Vec::new();
        for (w, s) in self.weights.iter().zip(&self.summands) {
            for t in w.squares.iter().filter(|t| !t.is_zero()) {
                summands.push(s.scalar_mul(t));
            }
        }
        Self::plain(self.target.clone(), summands, self.modulus.clone())
    }
}

/// Variables of `v` plus a fresh `z` (or `v` itself when it has one).
pub fn with_z(v: &Vars) -> (Vars, usize) {
    if let Some(i) = v.iter().position(|n| n == "z") {
        return (v.clone(), i);
    }
    let mut names: Vec<String> = v.iter().cloned().collect();
    names.push("z".into());
    let n = names.len() - 1;
    (names.into(), n)
}

fn z_power(w: &Vars, zi: usize, k: u32) -> Series {
    let mut e = vec![0; w.len()];
    e[zi] = k;
    Series::monomial(w.clone(), &e, Rational::one())
}

/// Assemble `Σ_j c_j z^j`.
fn poly_in_z(coeffs: &[Series], w: &Vars, zi: usize) -> Result<Series> {
    let mut acc = Series::exact_zero(w.clone());
    for (j, c) in coeffs.iter().enumerate() {
        acc = &acc + &c.embed(w)?.checked_mul(&z_power(w, zi, j as u32))?;
    }
    Ok(acc)
}

/// Output of [`lagrange_transfer`].
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangeTransfer {
    pub certificate: SosCertificate,
    /// `δ_ij = 2(α_i β_j - α_j β_i)`, antisymmetric.
    pub delta: Vec<Vec<Series>>,
    pub epsilon: i32,
}

/// From `Σα_i² = a0`, `Σβ_i² = a2` and `4 a0 a2 - a1² = Σ_{i<j} δ_ij²`,
/// the certificate `a0 + a1 z + a2 z² = Σ (α_i + ε β_i z)²`.
pub fn lagrange_transfer(a0: &Series, a1: &Series, a2: &Series, alpha: &[Series], beta: &[Series]) -> Result<LagrangeTransfer> {
    let p = alpha.len();
    if beta.len() != p || p == 0 {
        return Err(Error::InvalidArgument("α and β need the same positive length".into()));
    }
    let sum_sq = |v: &[Series]| v.iter().fold(Series::exact_zero(a0.vars().clone()), |acc, s| &acc + &s.square());
    if !(&sum_sq(alpha) - a0).is_zero() || !(&sum_sq(beta) - a2).is_zero() {
        return Err(Error::InconsistentInput("Σα² or Σβ² misses its target".into()));
    }
    let two = Rational::from_integer(2.into());
    let mut delta = vec![vec![Series::exact_zero(a0.vars().clone()); p]; p];
    let mut dsum = Series::exact_zero(a0.vars().clone());
    for i in 0..p {
        for j in 0..p {
            delta[i][j] = (&(&alpha[i] * &beta[j]) - &(&alpha[j] * &beta[i])).scalar_mul(&two);
            if i < j {
                dsum = &dsum + &delta[i][j].square();
            }
        }
    }
    let disc = &(a0 * a2).scalar_mul(&Rational::from_integer(4.into())) - &a1.square();
    if !(&dsum - &disc).is_zero() {
        return Err(Error::InconsistentInput("Σ δ_ij² differs from 4 a0 a2 - a1²".into()));
    }
    let dot = alpha.iter().zip(beta).fold(Series::exact_zero(a0.vars().clone()), |acc, (a, b)| &acc + &(a * b));
    let twice = dot.scalar_mul(&two);
    let epsilon = if (&twice - a1).is_zero() {
        1
    } else if (&twice + a1).is_zero() {
        -1
    } else {
        return Err(Error::InconsistentInput("a1 is neither 2Σαβ nor -2Σαβ".into()));
    };
    let (w, zi) = with_z(a0.vars());
    let z = Series::var(w.clone(), zi);
    let eps = Rational::from_integer(epsilon.into());
    let summands = alpha
        .iter()
        .zip(beta)
        .map(|(a, b)| Ok(&a.embed(&w)? + &(&b.embed(&w)? * &z).scalar_mul(&eps)))
        .collect::<Result<Vec<_>>>()?;
    let target = poly_in_z(&[a0.clone(), a1.clone(), a2.clone()], &w, zi)?;
    let certificate = SosCertificate::plain(target, summands, None)?;
    Ok(LagrangeTransfer { certificate, delta, epsilon })
}

/// `h^{2r} f = Σ a_i² - b (z^k - h g)` with every polynomial in `z` of
/// degree below `k`, coefficients listed from `z^0` up.
#[derive(Clone, Debug, PartialEq)]
pub struct ErasureProblem {
    pub f: Vec<Series>,
    pub a: Vec<Vec<Series>>,
    pub b: Vec<Series>,
    pub h: Series,
    pub g: Series,
    pub r: u32,
    pub k: u32,
}

/// Exact quotient `a / h`, or `None` when `h` does not divide `a`.
pub fn divide_exactly(a: &Series, h: &Series) -> Option<Series> {
    if a.is_zero() {
        return Some(a.clone());
    }
    if h.is_zero() {
        return None;
    }
    let n = h.nvars();
    let mut low = vec![u32::MAX; n];
    for (e, _) in h.terms() {
        for i in 0..n {
            low[i] = low[i].min(e[i]);
        }
    }
    let unit = h.monomial_divide(&low).ok()?;
    if unit.len() == 1 {
        let q = a.monomial_divide(&low).ok()?;
        return Some(q.scalar_mul(&(Rational::one() / unit.constant_term())));
    }
    if a.is_exact() && h.is_exact() {
        // long division on the largest graded term
        let mut q = Series::exact_zero(a.vars().clone());
        let mut r = a.clone();
        let (he, hc) = h.terms().last().map(|(e, c)| (e, c.clone()))?;
        while let Some((re, rc)) = r.terms().last().map(|(e, c)| (e, c.clone())) {
            if re.iter().zip(&he).any(|(x, y)| x < y) {
                return None;
            }
            let te: Vec<u32> = re.iter().zip(&he).map(|(x, y)| x - y).collect();
            let tc = rc / &hc;
            q = &q + &Series::monomial(a.vars().clone(), &te, tc.clone());
            r = &r - &h.mul_monomial(&te, &tc);
        }
        return Some(q);
    }
    if !unit.constant_term().is_zero() {
        let q = a.monomial_divide(&low).ok()?;
        let inv = unit.truncate(q.trunc()).invert_unit().ok()?;
        return Some(&q * &inv);
    }
    None
}

/// Sufficient coprimality test: `g` a unit, or `h` a monomial not sharing
/// a variable with every term of `g`'s restriction.
fn evidently_coprime(h: &Series, g: &Series) -> bool {
    if !g.constant_term().is_zero() || !h.constant_term().is_zero() {
        return true;
    }
    if h.len() == 1 {
        let (e, _) = h.terms().next().expect("one term");
        return e.iter().enumerate().filter(|(_, &x)| x > 0).all(|(i, _)| {
            // g does not vanish on x_i = 0
            !g.drop_var(i).is_zero()
        });
    }
    true
}

fn erasure_equations(p: &ErasureProblem, hpow: &Series) -> Result<Option<usize>> {
    let k = p.k as usize;
    let hg = &p.h * &p.g;
    for l in 0..2 * k {
        let mut rhs = Series::exact_zero(p.h.vars().clone());
        for ai in &p.a {
            for j in 0..k {
                if l >= j && l - j < k {
                    rhs = &rhs + &(&ai[j] * &ai[l - j]);
                }
            }
        }
        let lhs = if l < k {
            &(hpow * &p.f[l]) - &(&hg * &p.b[l])
        } else {
            p.b[l - k].clone()
        };
        if !(&lhs - &rhs).is_zero() {
            return Ok(Some(l));
        }
    }
    Ok(None)
}

/// Remove the factor `h^{2r}` by dividing the identity by `h²` `r` times;
/// each division is checked exactly and a failure names the coefficient
/// equation (`0 .. 2k-1`) it came from.
pub fn erase_denominators(problem: &ErasureProblem) -> Result<SosCertificate> {
    let k = problem.k as usize;
    if k == 0 || problem.f.len() != k || problem.b.len() != k || problem.a.iter().any(|a| a.len() != k) {
        return Err(Error::InvalidArgument("f, b and every a_i need exactly k coefficients in z".into()));
    }
    if !evidently_coprime(&problem.h, &problem.g) {
        return Err(Error::DivisionFailed { equation: 0, detail: "h and g share a factor".into() });
    }
    let v = problem.h.vars().clone();
    let h2 = problem.h.square();
    let mut cur = problem.clone();
    let mut hpow = Series::one(v.clone());
    for _ in 0..problem.r {
        hpow = &hpow * &h2;
    }
    if let Some(l) = erasure_equations(&cur, &hpow)? {
        return Err(Error::DivisionFailed { equation: l, detail: "the input identity fails".into() });
    }
    for round in 0..problem.r {
        let fail = |equation: usize, what: String| Error::DivisionFailed {
            equation,
            detail: format!("{what} (round {})", round + 1),
        };
        for l in 0..k {
            for (i, ai) in cur.a.iter_mut().enumerate() {
                ai[l] = divide_exactly(&ai[l], &problem.h).ok_or_else(|| fail(2 * l, format!("h does not divide a_{}{l}", i + 1)))?;
            }
            if divide_exactly(&cur.b[l], &problem.h).is_none() {
                return Err(fail(l, format!("h does not divide b_{l}")));
            }
        }
        if !cur.b[k - 1].is_zero() {
            return Err(fail(2 * k - 1, format!("b_{} is not zero", k - 1)));
        }
        for l in 0..k {
            cur.b[l] = divide_exactly(&cur.b[l], &h2).ok_or_else(|| fail(k + l, format!("h² does not divide b_{l}")))?;
        }
    }
    let (w, zi) = with_z(&v);
    let target = poly_in_z(&problem.f, &w, zi)?;
    let summands = cur.a.iter().map(|ai| poly_in_z(ai, &w, zi)).collect::<Result<Vec<_>>>()?;
    let relation = &z_power(&w, zi, problem.k) - &(&problem.h * &problem.g).embed(&w)?;
    let cofactor = poly_in_z(&cur.b, &w, zi)?.scalar_mul(&-Rational::one());
    SosCertificate::plain(target, summands, Some(Modulus { relation, cofactor }))
}

/// A certificate over `ℚ(√a)`: summands `c_i + √a d_i`, modulus cofactor
/// `q1 + √a q2`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticDescent {
    pub radicand: Rational,
    pub target: Series,
    pub summands: Vec<(Series, Series)>,
    pub modulus: Option<(Series, (Series, Series))>,
}

/// Average the certificate with its conjugate: `ψ = Σ c_i² + a Σ d_i² + q1 φ`.
pub fn sos_descend_quadratic(input: &QuadraticDescent) -> Result<SosCertificate> {
    let a = &input.radicand;
    if !a.is_positive() {
        return Err(Error::SideConditionViolated(format!("radicand {a} is not positive")));
    }
    let v = input.target.vars().clone();
    let mut rational = Series::exact_zero(v.clone());
    let mut irrational = Series::exact_zero(v.clone());
    for (c, d) in &input.summands {
        rational = &rational + &(&c.square() + &d.square().scalar_mul(a));
        irrational = &irrational + &(c * d).scalar_mul(&Rational::from_integer(2.into()));
    }
    if let Some((phi, (q1, q2))) = &input.modulus {
        rational = &rational + &(q1 * phi);
        irrational = &irrational + &(q2 * phi);
    }
    if !(&rational - &input.target).is_zero() || !irrational.is_zero() {
        return Err(Error::InconsistentInput("the certificate does not hold over the extension".into()));
    }
    let mut weights = Vec::new();
    let mut summands = Vec::new();
    for (c, d) in &input.summands {
        weights.push(Rational::one());
        summands.push(c.clone());
        if !d.is_zero() {
            weights.push(a.clone());
            summands.push(d.clone());
        }
    }
    let modulus = input.modulus.as_ref().map(|(phi, (q1, _))| Modulus { relation: phi.clone(), cofactor: q1.clone() });
    SosCertificate::new(input.target.clone(), weights, summands, modulus)
}

/// A certificate over `ℚ(ζ)`, `ζ³ + aζ + b = 0`: summands
/// `a_i + ζ b_i + ζ² c_i`, modulus cofactor `d1 + ζ d2 + ζ² d3`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicDescent {
    pub a: Rational,
    pub b: Rational,
    pub target: Series,
    pub summands: Vec<[Series; 3]>,
    pub modulus: Option<(Series, [Series; 3])>,
}

/// Multiply in `R[ζ]/(ζ³ + aζ + b)`.
pub fn cubic_mul(p: &[Series; 3], q: &[Series; 3], a: &Rational, b: &Rational) -> [Series; 3] {
    let z = Series::exact_zero(p[0].vars().clone());
    let mut r = vec![z; 5];
    for i in 0..3 {
        for j in 0..3 {
            r[i + j] = &r[i + j] + &(&p[i] * &q[j]);
        }
    }
    // ζ³ = -aζ - b, ζ⁴ = -aζ² - bζ
    [
        &r[0] - &r[3].scalar_mul(b),
        &(&r[1] - &r[3].scalar_mul(a)) - &r[4].scalar_mul(b),
        &r[2] - &r[4].scalar_mul(a),
    ]
}

/// Sum the three conjugate certificates: with `Tr(1) = 3`, `Tr(ζ) = 0`,
/// `Tr(ζ²) = -2a`, `Tr(ζ³) = -3b`, `Tr(ζ⁴) = 2a²`,
/// `Tr((A + ζB + ζ²C)²) = 3(A - 2a/3 C)² - 2a(B + 3b/(2a) C)² + (4a³+27b²)/(6a) C²`.
pub fn cubic_trace_descend(input: &CubicDescent) -> Result<SosCertificate> {
    let (a, b) = (&input.a, &input.b);
    let disc = -(Rational::from_integer(4.into()) * a * a * a + Rational::from_integer(27.into()) * b * b);
    if !(-a.clone()).is_positive() || !disc.is_positive() {
        return Err(Error::SideConditionViolated(format!("need -a > 0 and -4a³-27b² > 0, got a = {a}, b = {b}")));
    }
    let v = input.target.vars().clone();
    let zero = Series::exact_zero(v.clone());
    let mut acc = [zero.clone(), zero.clone(), zero.clone()];
    for s in &input.summands {
        let sq = cubic_mul(s, s, a, b);
        for i in 0..3 {
            acc[i] = &acc[i] + &sq[i];
        }
    }
    if let Some((phi, d)) = &input.modulus {
        for i in 0..3 {
            acc[i] = &acc[i] + &(&d[i] * phi);
        }
    }
    if !(&acc[0] - &input.target).is_zero() || !acc[1].is_zero() || !acc[2].is_zero() {
        return Err(Error::InconsistentInput("the certificate does not hold over the cubic field".into()));
    }
    let three = Rational::from_integer(3.into());
    let two = Rational::from_integer(2.into());
    let w1 = Rational::one();
    let w2 = -(&two * a) / &three;
    let w3 = (-a.clone()) * &disc / (Rational::from_integer(18.into()) * a * a);
    let shift_a = &two * a / &three;
    let shift_b = &three * b / (&two * a);
    let mut weights = Vec::new();
    let mut summands = Vec::new();
    for [ai, bi, ci] in &input.summands {
        for (w, s) in [
            (&w1, ai - &ci.scalar_mul(&shift_a)),
            (&w2, bi + &ci.scalar_mul(&shift_b)),
            (&w3, ci.clone()),
        ] {
            if !s.is_zero() {
                weights.push(w.clone());
                summands.push(s);
            }
        }
    }
    let modulus = input.modulus.as_ref().map(|(phi, d)| Modulus {
        relation: phi.clone(),
        cofactor: &d[0] - &d[2].scalar_mul(&shift_a),
    });
    SosCertificate::new(input.target.clone(), weights, summands, modulus)
}

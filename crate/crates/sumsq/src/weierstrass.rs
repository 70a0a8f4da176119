//! Weierstrass division and preparation, regularisation by shears, and the
//! Tschirnhaus shift.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Field;
use crate::series::{OrderResult, TruncatedSeries, DEGREE_CAP};

type S<C> = TruncatedSeries<C>;

/// Order of `f` restricted to the `var` axis.
pub fn regular_order<C: Field>(f: &S<C>, var: usize) -> OrderResult {
    let n = f.nvars();
    let on_axis = f
        .terms()
        .filter(|(e, _)| (0..n).all(|i| i == var || e[i] == 0))
        .map(|(e, _)| e[var])
        .min();
    match on_axis {
        Some(k) => OrderResult::Known(k),
        None => OrderResult::AtLeast(f.trunc()),
    }
}

/// An invertible linear substitution `x_i -> sum_j m[i][j] x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearChange<C> {
    pub matrix: Vec<Vec<C>>,
}

impl<C: Field> LinearChange<C> {
    pub fn identity(n: usize) -> Self {
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| if i == j { C::one() } else { C::zero() }).collect())
            .collect();
        Self { matrix }
    }

    pub fn new(matrix: Vec<Vec<C>>) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("linear change must be square".into()));
        }
        if linalg::rank(&matrix, n) != n {
            return Err(Error::InvalidArgument("linear change is singular".into()));
        }
        Ok(Self { matrix })
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.matrix.len())
    }

    /// The images of the coordinates, as exact linear forms.
    pub fn images(&self, like: &S<C>) -> Vec<S<C>> {
        let v = like.vars().clone();
        self.matrix
            .iter()
            .map(|row| {
                let terms = row
                    .iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let mut e = vec![0; v.len()];
                        e[j] = 1;
                        (e, c.clone())
                    })
                    .collect();
                S::polynomial(v.clone(), terms).expect("linear form")
            })
            .collect()
    }

    pub fn apply(&self, f: &S<C>) -> Result<S<C>> {
        f.substitute(&self.images(f))
    }

    pub fn inverse(&self) -> Self {
        let n = self.matrix.len();
        let id = Self::identity(n).matrix;
        // columns of the inverse solve M c = e_j
        let cols = linalg::solve_many(&self.matrix, n, &id);
        let mut inv = vec![vec![C::zero(); n]; n];
        for (j, col) in cols.into_iter().enumerate() {
            let col = col.expect("invertible");
            for i in 0..n {
                inv[i][j] = col[i].clone();
            }
        }
        Self { matrix: inv }
    }

    /// `(self then other)` as substitutions: `f -> f(self(other(x)))`.
    pub fn then(&self, other: &Self) -> Self {
        let n = self.matrix.len();
        let mut m = vec![vec![C::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = C::zero();
                for k in 0..n {
                    acc += &(self.matrix[i][k].clone() * other.matrix[k][j].clone());
                }
                m[i][j] = acc;
            }
        }
        Self { matrix: m }
    }
}

/// Shear parameters in the fixed order 0, 1, -1, 2, -2, ...
fn shear_sequence(i: usize) -> i64 {
    if i == 0 {
        0
    } else if i % 2 == 1 {
        (i as i64 + 1) / 2
    } else {
        -(i as i64 / 2)
    }
}

/// Shear the other variables by integer multiples of `var` until the
/// series becomes regular in `var` of order `ord(f)`.
pub fn make_regular<C: Field>(f: &S<C>, var: usize) -> Result<(LinearChange<C>, S<C>)> {
    let k = match f.order() {
        OrderResult::Known(k) => k,
        OrderResult::AtLeast(n) => return Err(Error::OrderUnknown(n)),
    };
    let n = f.nvars();
    let init = f.homogeneous_part(k);
    let others: Vec<usize> = (0..n).filter(|&i| i != var).collect();
    // search boxes of growing radius; within a box, ordered by sequence index
    for radius in 0..=16usize {
        let width = 2 * radius + 1;
        let total = width.pow(others.len() as u32);
        let mut cands: Vec<Vec<usize>> = (0..total)
            .map(|mut code| {
                (0..others.len())
                    .map(|_| {
                        let d = code % width;
                        code /= width;
                        d
                    })
                    .collect()
            })
            .filter(|idx: &Vec<usize>| radius == 0 || idx.iter().any(|&d| d + 2 >= width))
            .collect();
        cands.sort_by_key(|idx| {
            let mut key = idx.clone();
            key.sort_unstable_by(|a, b| b.cmp(a));
            (key, idx.clone())
        });
        for idx in cands {
            let params: Vec<C> = idx.iter().map(|&d| C::from_i64(shear_sequence(d))).collect();
            let mut point = vec![C::zero(); n];
            point[var] = C::one();
            for (o, p) in others.iter().zip(&params) {
                point[*o] = p.clone();
            }
            let mut val = C::zero();
            for (e, c) in init.terms() {
                let mut t = c.clone();
                for (i, &ei) in e.iter().enumerate() {
                    t *= &crate::scalar::pow(&point[i], ei);
                }
                val += &t;
            }
            if val.is_zero() {
                continue;
            }
            let mut m = LinearChange::identity(n).matrix;
            for (o, p) in others.iter().zip(&params) {
                m[*o][var] = p.clone();
            }
            let change = LinearChange { matrix: m };
            let g = change.apply(f)?;
            return Ok((change, g));
        }
    }
    Err(Error::NotRegular(format!("no small shear makes the series regular in variable {var}")))
}

fn check_regular<C: Field>(g: &S<C>, var: usize) -> Result<u32> {
    match regular_order(g, var) {
        OrderResult::Known(d) => Ok(d),
        OrderResult::AtLeast(_) => Err(Error::NotRegular(format!("variable {}", g.vars()[var]))),
    }
}

/// Split into `var^d * A + B` with `deg_var B < d`.
fn split<C: Field>(h: &S<C>, var: usize, d: u32) -> (S<C>, S<C>) {
    let v = h.vars().clone();
    let mut high = Vec::new();
    let mut low = Vec::new();
    for (mut e, c) in h.terms() {
        if e[var] >= d {
            e[var] -= d;
            high.push((e, c.clone()));
        } else {
            low.push((e, c.clone()));
        }
    }
    let mk = |terms, trunc: u32| {
        let s = S::make(v.clone(), trunc.max(1), terms).expect("degrees in range");
        if h.is_exact() {
            s.into_exact()
        } else {
            s
        }
    };
    (mk(high, h.trunc().saturating_sub(d)), mk(low, h.trunc()))
}

/// Quotient and remainder of a Weierstrass division.
#[derive(Clone, Debug, PartialEq)]
pub struct Division<C: Field> {
    pub quotient: S<C>,
    /// Polynomial in the distinguished variable of degree below `d`.
    pub remainder: S<C>,
    pub degree: u32,
}

/// `f = g Q + R` with `deg_var R < d`, `d` the regular order of `g`.
///
/// Exact inputs are divided at a working precision and the result is
/// promoted to exact when the identity then holds on the nose.
pub fn divide<C: Field>(f: &S<C>, g: &S<C>, var: usize) -> Result<Division<C>> {
    if f.is_exact() && g.is_exact() {
        let d = check_regular(g, var)?;
        let work = (f.degree().unwrap_or(0).max(g.degree().unwrap_or(0)) * 3 + d + 8).min(DEGREE_CAP - 1);
        let r = divide_core(f, g, var, work)?;
        let qx = r.quotient.clone().into_exact();
        let rx = r.remainder.clone().into_exact();
        if (&(g * &qx) + &rx) == *f {
            return Ok(Division { quotient: qx, remainder: rx, degree: d });
        }
        if g.order().lower_bound() < d {
            return Err(Error::NotRegular(format!(
                "order of the divisor is below its regular order {d} and the quotient is not a polynomial"
            )));
        }
        return Ok(r);
    }
    divide_to(f, g, var, DEGREE_CAP)
}

/// Division with all inputs cut at `limit`.
///
/// Truncated inputs need `ord(g)` equal to the regular order `d`: then `Q`
/// is known below `T - d` and `R` below `T`. When `ord(g) < d` the quotient
/// picks up terms of falling degree from every order of `f`, so no
/// truncation of it is determined and the division is refused.
pub fn divide_to<C: Field>(f: &S<C>, g: &S<C>, var: usize, limit: u32) -> Result<Division<C>> {
    let d = check_regular(g, var)?;
    if g.order().lower_bound() < d {
        return Err(Error::NotRegular(format!(
            "order of the divisor is below its regular order {d} in {}; shear it first",
            g.vars()[var]
        )));
    }
    divide_core(f, g, var, limit)
}

fn divide_core<C: Field>(f: &S<C>, g: &S<C>, var: usize, limit: u32) -> Result<Division<C>> {
    let d = check_regular(g, var)?;
    let t = f.trunc().min(g.trunc()).min(limit);
    if t <= d {
        return Err(Error::precision(format!("truncation {t} does not exceed regular order {d}")));
    }
    let f = f.truncate(t);
    let g = g.truncate(t);
    let n = g.nvars();
    let axis: Vec<(Vec<u32>, C)> =
        g.terms().filter(|(e, _)| (0..n).all(|i| i == var || e[i] == 0)).map(|(e, c)| (e, c.clone())).collect();
    let g0 = S::make(g.vars().clone(), t, axis).expect("axis part");
    let g1 = (&g0 - &g).into_exact();
    let mut shift = vec![0; n];
    shift[var] = d;
    let u0_inv = g0.monomial_divide(&shift)?.invert_unit()?.into_exact();
    let q_trunc = t - d;
    // fixed point Q = (f + g1 Q - R) / var^d / u0, each pass gains one
    // degree in the other variables
    let mut q = S::exact_zero(g.vars().clone());
    let mut rem = S::exact_zero(g.vars().clone());
    for _ in 0..=t {
        let h = (&f + &g1.mul_to(&q, t)).truncate(t);
        let (a, b) = split(&h, var, d);
        let next = a.mul_to(&u0_inv, q_trunc).into_exact();
        rem = b;
        if next == q {
            break;
        }
        q = next;
    }
    Ok(Division { quotient: q.truncate(q_trunc), remainder: rem.truncate(t), degree: d })
}

/// `f = P U` with `P` a Weierstrass polynomial in the distinguished variable.
#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassFactorization<C: Field> {
    pub var: usize,
    pub degree: u32,
    /// Coefficients `a_0 .. a_{d-1}` of `P = var^d + sum a_j var^j`; they do
    /// not involve `var`.
    pub coeffs: Vec<S<C>>,
    pub unit: S<C>,
}

impl<C: Field> WeierstrassFactorization<C> {
    pub fn polynomial(&self) -> S<C> {
        let v = self.unit.vars().clone();
        let mut e = vec![0; v.len()];
        e[self.var] = self.degree;
        let mut p = S::monomial(v.clone(), &e, C::one());
        for (j, a) in self.coeffs.iter().enumerate() {
            let mut m = vec![0; v.len()];
            m[self.var] = j as u32;
            p = &p + &a.mul_monomial(&m, &C::one());
        }
        p
    }

    pub fn reconstruct(&self) -> S<C> {
        &self.polynomial() * &self.unit
    }
}

fn is_weierstrass_polynomial<C: Field>(f: &S<C>, var: usize, d: u32) -> bool {
    let n = f.nvars();
    f.is_exact()
        && f.degree_in(var) == d
        && f.terms().all(|(e, c)| {
            if e[var] == d {
                (0..n).all(|i| i == var || e[i] == 0) && c.is_one()
            } else {
                (0..n).any(|i| i != var && e[i] > 0)
            }
        })
}

fn factorization_from<C: Field>(p: &S<C>, var: usize, d: u32, unit: S<C>) -> WeierstrassFactorization<C> {
    let coeffs = (0..d).map(|j| p.coeff_of_power(var, j)).collect();
    WeierstrassFactorization { var, degree: d, coeffs, unit }
}

/// Weierstrass preparation via the division `var^d = f Q + R`.
pub fn prepare<C: Field>(f: &S<C>, var: usize) -> Result<WeierstrassFactorization<C>> {
    let d = check_regular(f, var)?;
    if is_weierstrass_polynomial(f, var, d) {
        return Ok(factorization_from(f, var, d, S::one(f.vars().clone())));
    }
    let v = f.vars().clone();
    let mut e = vec![0; v.len()];
    e[var] = d;
    let yd = S::monomial(v.clone(), &e, C::one());
    let t = if f.is_exact() {
        (f.degree().unwrap_or(0) * 3 + d + 8).min(DEGREE_CAP - 1)
    } else {
        f.trunc()
    };
    let div = if f.is_exact() { divide_core(&yd, f, var, t)? } else { divide_to(&yd, f, var, t)? };
    let unit = div.quotient.invert_unit()?;
    let p = &yd - &div.remainder;
    let wf = factorization_from(&p, var, d, unit);
    if f.is_exact() {
        let px = wf.polynomial().into_exact();
        let ux = wf.unit.clone().into_exact();
        if &px * &ux == *f {
            return Ok(factorization_from(&px, var, d, ux));
        }
    }
    Ok(wf)
}

/// Remove the subleading coefficient: `var -> var - a_{d-1}/d`.
///
/// Returns the image of `var` and the factorization of `f` composed with
/// the shift.
pub fn tschirnhaus<C: Field>(w: &WeierstrassFactorization<C>) -> Result<(S<C>, WeierstrassFactorization<C>)> {
    let d = w.degree;
    let v = w.unit.vars().clone();
    let x = S::var(v.clone(), w.var);
    if d == 0 {
        return Ok((x, w.clone()));
    }
    let a = &w.coeffs[d as usize - 1];
    let s = a.scalar_mul(&(C::one() / C::from_i64(d as i64)));
    let image = &x - &s;
    let mut images: Vec<S<C>> = (0..v.len()).map(|i| S::var(v.clone(), i)).collect();
    images[w.var] = image.clone();
    let p = w.polynomial().substitute(&images)?;
    let unit = w.unit.substitute(&images)?;
    let mut out = factorization_from(&p, w.var, d, unit);
    // the cancellation is exact by construction
    let sub = &out.coeffs[d as usize - 1];
    out.coeffs[d as usize - 1] = if sub.is_exact() { S::exact_zero(v) } else { S::zero(v, sub.trunc()) };
    Ok((image, out))
}

/// Outcome of perturbing a prepared series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    pub r: u32,
    /// Smallest order among `P - Q` coefficient differences.
    pub polynomial_agreement: u32,
    pub unit_agreement: u32,
}

impl StabilityReport {
    pub fn agreement(&self) -> u32 {
        self.polynomial_agreement.min(self.unit_agreement)
    }
}

/// Prepare `f` and `f + h`, with `h = x'^r * w` for a seeded random
/// polynomial `w` and `x'` the first non-distinguished variable, and
/// report how far the factors agree. Runs at truncation `trunc`.
pub fn stability_probe<C: Field>(f: &S<C>, var: usize, r: u32, trunc: u32, seed: u64) -> Result<StabilityReport> {
    let f = f.truncate(trunc);
    let n = f.nvars();
    let other = (0..n).find(|&i| i != var).ok_or_else(|| Error::InvalidArgument("need two variables".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for _ in 0..6 {
        let mut e = vec![0u32; n];
        for x in e.iter_mut() {
            *x = rng.gen_range(0..3);
        }
        terms.push((e, C::from_i64(rng.gen_range(-3..=3))));
    }
    let w = S::polynomial(f.vars().clone(), terms)?;
    let mut m = vec![0; n];
    m[other] = r;
    let h = w.mul_monomial(&m, &C::one()).truncate(trunc);
    let g = &f + &h;
    let a = prepare(&f, var)?;
    let b = prepare(&g, var)?;
    if a.degree != b.degree {
        return Ok(StabilityReport { r, polynomial_agreement: 0, unit_agreement: 0 });
    }
    let pa = a.coeffs.iter().zip(&b.coeffs).map(|(p, q)| p.agreement_order(q)).min().unwrap_or(trunc);
    let ua = a.unit.agreement_order(&b.unit);
    Ok(StabilityReport { r, polynomial_agreement: pa, unit_agreement: ua })
}

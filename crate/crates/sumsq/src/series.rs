//! Truncated multivariate power series.
//!
//! A series is a sparse sorted list of `(key, coefficient)` pairs. The key
//! packs the total degree into the top byte and one byte per exponent below
//! it, first variable highest, so numeric key order is "by degree, then by
//! exponent vector" and a degree slice is a contiguous range. At most
//! [`MAX_VARS`] variables and total degree below [`DEGREE_CAP`].
//!
//! Coefficients are exact for every total degree below `trunc`. Exact
//! series (polynomials) carry `trunc == DEGREE_CAP` and the exact flag,
//! which means nothing at all is hidden above the stored terms.

use std::collections::HashMap;
use std::fmt;
use std::hash::{BuildHasherDefault, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Field;

pub const MAX_VARS: usize = 7;
pub const DEGREE_CAP: u32 = 256;

pub type Vars = Arc<[String]>;

pub fn vars(names: &[&str]) -> Vars {
    names.iter().map(|s| s.to_string()).collect::<Vec<_>>().into()
}

const DEG_SHIFT: u32 = 56;

#[inline]
fn shift_of(i: usize) -> u32 {
    48 - 8 * i as u32
}

#[inline]
pub(crate) fn key_degree(k: u64) -> u32 {
    (k >> DEG_SHIFT) as u32
}

#[inline]
pub(crate) fn key_exp(k: u64, i: usize) -> u32 {
    ((k >> shift_of(i)) & 0xff) as u32
}

pub(crate) fn pack(exps: &[u32]) -> u64 {
    let mut k = 0u64;
    let mut d = 0u32;
    for (i, &e) in exps.iter().enumerate() {
        debug_assert!(e < 256);
        k |= (e as u64) << shift_of(i);
        d += e;
    }
    debug_assert!(d < DEGREE_CAP);
    k | ((d as u64) << DEG_SHIFT)
}

pub(crate) fn unpack(k: u64, n: usize) -> Vec<u32> {
    (0..n).map(|i| key_exp(k, i)).collect()
}

#[inline]
fn unit_key(i: usize) -> u64 {
    (1u64 << DEG_SHIFT) | (1u64 << shift_of(i))
}

/// Multiplicative hash for packed keys.
#[derive(Default)]
pub(crate) struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(5) ^ b as u64).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
        }
    }
    fn write_u64(&mut self, n: u64) {
        self.0 = (n ^ (n >> 29)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
}

pub(crate) type KeyMap<C> = HashMap<u64, C, BuildHasherDefault<KeyHasher>>;

/// Result of asking for the order of a truncated series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderResult {
    Known(u32),
    /// Every coefficient below the truncation vanishes.
    AtLeast(u32),
}

impl OrderResult {
    pub fn known(self) -> Option<u32> {
        match self {
            OrderResult::Known(k) => Some(k),
            OrderResult::AtLeast(_) => None,
        }
    }

    /// A lower bound for the true order.
    pub fn lower_bound(self) -> u32 {
        match self {
            OrderResult::Known(k) | OrderResult::AtLeast(k) => k,
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<C> {
    vars: Vars,
    trunc: u32,
    exact: bool,
    terms: Vec<(u64, C)>,
}

impl<C: Field> TruncatedSeries<C> {
    fn raw(vars: Vars, trunc: u32, exact: bool, mut terms: Vec<(u64, C)>) -> Self {
        terms.retain(|(k, c)| !c.is_zero() && key_degree(*k) < trunc);
        Self { vars, trunc, exact, terms }
    }

    fn from_map(vars: Vars, trunc: u32, exact: bool, map: KeyMap<C>) -> Self {
        let mut terms: Vec<(u64, C)> = map
            .into_iter()
            .filter(|(k, c)| !c.is_zero() && key_degree(*k) < trunc)
            .collect();
        terms.sort_unstable_by_key(|t| t.0);
        Self { vars, trunc, exact, terms }
    }

    fn check_vars(vars: &Vars) -> Result<()> {
        if vars.len() > MAX_VARS {
            return Err(Error::VariableMismatch(format!(
                "at most {MAX_VARS} variables supported, got {}",
                vars.len()
            )));
        }
        Ok(())
    }

    /// Build a truncated series from explicit terms.
    pub fn make(vars: Vars, trunc: u32, terms: Vec<(Vec<u32>, C)>) -> Result<Self> {
        Self::check_vars(&vars)?;
        if trunc == 0 || trunc > DEGREE_CAP {
            return Err(Error::InvalidArgument(format!("truncation {trunc} out of range")));
        }
        let mut map: KeyMap<C> = KeyMap::default();
        for (m, c) in terms {
            if m.len() != vars.len() {
                return Err(Error::VariableMismatch(format!(
                    "monomial has {} exponents, series has {} variables",
                    m.len(),
                    vars.len()
                )));
            }
            let d: u32 = m.iter().sum();
            if d >= trunc {
                return Err(Error::precision(format!(
                    "monomial of degree {d} at truncation {trunc}"
                )));
            }
            *map.entry(pack(&m)).or_insert_with(C::zero) += &c;
        }
        Ok(Self::from_map(vars, trunc, false, map))
    }

    /// Build an exact polynomial.
    pub fn polynomial(vars: Vars, terms: Vec<(Vec<u32>, C)>) -> Result<Self> {
        let mut s = Self::make(vars, DEGREE_CAP, terms)?;
        s.exact = true;
        Ok(s)
    }

    pub fn zero(vars: Vars, trunc: u32) -> Self {
        Self { vars, trunc, exact: false, terms: Vec::new() }
    }

    pub fn exact_zero(vars: Vars) -> Self {
        Self { vars, trunc: DEGREE_CAP, exact: true, terms: Vec::new() }
    }

    pub fn constant(vars: Vars, c: C) -> Self {
        Self::raw(vars, DEGREE_CAP, true, vec![(0, c)])
    }

    pub fn one(vars: Vars) -> Self {
        Self::constant(vars, C::one())
    }

    /// The exact coordinate function of variable `i`.
    pub fn var(vars: Vars, i: usize) -> Self {
        assert!(i < vars.len(), "variable index out of range");
        Self { vars, trunc: DEGREE_CAP, exact: true, terms: vec![(unit_key(i), C::one())] }
    }

    pub fn monomial(vars: Vars, exps: &[u32], c: C) -> Self {
        assert_eq!(exps.len(), vars.len());
        Self::raw(vars, DEGREE_CAP, true, vec![(pack(exps), c)])
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// No stored coefficient (the series may still be unknown above `trunc`).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Vec<u32>, &C)> + '_ {
        let n = self.nvars();
        self.terms.iter().map(move |(k, c)| (unpack(*k, n), c))
    }

    pub fn coeff(&self, exps: &[u32]) -> C {
        if exps.iter().sum::<u32>() >= DEGREE_CAP {
            return C::zero();
        }
        let k = pack(exps);
        match self.terms.binary_search_by_key(&k, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => C::zero(),
        }
    }

    pub fn constant_term(&self) -> C {
        match self.terms.first() {
            Some((0, c)) => c.clone(),
            _ => C::zero(),
        }
    }

    /// Highest stored total degree.
    pub fn degree(&self) -> Option<u32> {
        self.terms.last().map(|t| key_degree(t.0))
    }

    /// Largest exponent of variable `i` among stored terms.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.iter().map(|t| key_exp(t.0, i)).max().unwrap_or(0)
    }

    /// Forget everything from total degree `n` on.
    pub fn truncate(&self, n: u32) -> Self {
        if n >= self.trunc {
            return self.clone();
        }
        let n = n.max(1);
        let cut = self.terms.partition_point(|t| key_degree(t.0) < n);
        Self { vars: self.vars.clone(), trunc: n, exact: false, terms: self.terms[..cut].to_vec() }
    }

    /// Declare a polynomial with no terms at or above `trunc` to be exact.
    pub fn into_exact(mut self) -> Self {
        self.trunc = DEGREE_CAP;
        self.exact = true;
        self
    }

    /// Same coefficients below `n` (both series must be known there).
    pub fn agrees_below(&self, other: &Self, n: u32) -> bool {
        let a = self.terms.iter().take_while(|t| key_degree(t.0) < n);
        let b = other.terms.iter().take_while(|t| key_degree(t.0) < n);
        a.eq(b)
    }

    /// Order of the difference with `other`, capped at the common truncation.
    pub fn agreement_order(&self, other: &Self) -> u32 {
        let d = self.clone() - other.clone();
        d.order().lower_bound()
    }

    pub fn order(&self) -> OrderResult {
        match self.terms.first() {
            Some((k, _)) => OrderResult::Known(key_degree(*k)),
            None => OrderResult::AtLeast(self.trunc),
        }
    }

    /// Lower bound for the true order; exact zero reports the cap.
    fn order_bound(&self) -> u32 {
        self.order().lower_bound()
    }

    fn degree_range(&self, d: u32) -> std::ops::Range<usize> {
        let lo = self.terms.partition_point(|t| key_degree(t.0) < d);
        let hi = self.terms.partition_point(|t| key_degree(t.0) <= d);
        lo..hi
    }

    /// Homogeneous part of degree `d`, as an exact polynomial.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let r = self.degree_range(d);
        Self {
            vars: self.vars.clone(),
            trunc: DEGREE_CAP,
            exact: true,
            terms: self.terms[r].to_vec(),
        }
    }

    pub fn initial_form(&self) -> Result<Self> {
        match self.order() {
            OrderResult::Known(k) => Ok(self.homogeneous_part(k)),
            OrderResult::AtLeast(n) => Err(Error::ZeroUpToTruncation(n)),
        }
    }

    fn same_vars(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok(())
        } else {
            Err(Error::VariableMismatch(format!(
                "{:?} vs {:?}",
                self.vars.as_ref(),
                other.vars.as_ref()
            )))
        }
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let exact = self.exact && other.exact;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let ka = a.get(i).map(|t| t.0).unwrap_or(u64::MAX);
            let kb = b.get(j).map(|t| t.0).unwrap_or(u64::MAX);
            if key_degree(ka.min(kb)) >= trunc {
                break;
            }
            if ka < kb {
                out.push(a[i].clone());
                i += 1;
            } else if kb < ka {
                let c = if negate { -b[j].1.clone() } else { b[j].1.clone() };
                out.push((kb, c));
                j += 1;
            } else {
                let mut c = a[i].1.clone();
                if negate {
                    c -= &b[j].1;
                } else {
                    c += &b[j].1;
                }
                if !c.is_zero() {
                    out.push((ka, c));
                }
                i += 1;
                j += 1;
            }
        }
        Self { vars: self.vars.clone(), trunc, exact, terms: out }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_vars(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_vars(other)?;
        Ok(self.merge(other, true))
    }

    pub fn scalar_mul(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self { terms: Vec::new(), ..self.clone() };
        }
        let terms = self.terms.iter().map(|(k, a)| (*k, a.clone() * c.clone())).collect();
        Self::raw(self.vars.clone(), self.trunc, self.exact, terms)
    }

    /// Multiply by `c * x^exps`.
    pub fn mul_monomial(&self, exps: &[u32], c: &C) -> Self {
        let d: u32 = exps.iter().sum();
        let shifted = pack_saturating(exps);
        let (trunc, exact) = if self.exact {
            (DEGREE_CAP, true)
        } else {
            ((self.trunc + d).min(DEGREE_CAP), false)
        };
        let mut terms = Vec::with_capacity(self.terms.len());
        for (k, a) in &self.terms {
            if key_degree(*k) + d >= trunc {
                break;
            }
            terms.push((k + shifted, a.clone() * c.clone()));
        }
        let overflow = self.exact && self.degree().is_some_and(|m| m + d >= DEGREE_CAP);
        Self::raw(self.vars.clone(), trunc, exact && !overflow, terms)
    }

    /// Product truncation: the error of each factor is multiplied by the
    /// other factor's order.
    fn product_trunc(&self, other: &Self) -> (u32, bool) {
        let oa = self.order_bound();
        let ob = other.order_bound();
        let ta = if self.exact { DEGREE_CAP } else { self.trunc.saturating_add(ob) };
        let tb = if other.exact { DEGREE_CAP } else { other.trunc.saturating_add(oa) };
        let t = ta.min(tb).min(DEGREE_CAP);
        let mut exact = self.exact && other.exact;
        if exact {
            let top = self.degree().unwrap_or(0) + other.degree().unwrap_or(0);
            if !self.is_zero() && !other.is_zero() && top >= DEGREE_CAP {
                exact = false;
            }
        }
        (t, exact)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_vars(other)?;
        Ok(self.mul_to(other, DEGREE_CAP))
    }

    /// Product, additionally truncated at `limit`.
    pub fn mul_to(&self, other: &Self, limit: u32) -> Self {
        let (mut trunc, mut exact) = self.product_trunc(other);
        if limit < trunc {
            trunc = limit.max(1);
            exact = false;
        }
        if self.is_zero() || other.is_zero() {
            return Self { vars: self.vars.clone(), trunc, exact, terms: Vec::new() };
        }
        let (a, b) = if self.terms.len() <= other.terms.len() { (self, other) } else { (other, self) };
        if a.terms.len() == 1 {
            let (k, c) = &a.terms[0];
            let m = unpack(*k, a.nvars());
            let mut r = b.mul_monomial(&m, c).truncate(trunc);
            r.trunc = trunc;
            r.exact = exact;
            return r;
        }
        // first index of each degree in b
        let mut starts = vec![0usize; DEGREE_CAP as usize + 1];
        {
            let mut idx = 0;
            for d in 0..=DEGREE_CAP as usize {
                while idx < b.terms.len() && (key_degree(b.terms[idx].0) as usize) < d {
                    idx += 1;
                }
                starts[d] = idx;
            }
        }
        let mut acc: KeyMap<C> = KeyMap::default();
        acc.reserve(a.terms.len() * 4);
        for (ka, ca) in &a.terms {
            let da = key_degree(*ka);
            if da >= trunc {
                break;
            }
            let end = starts[(trunc - da) as usize];
            for (kb, cb) in &b.terms[..end] {
                let p = ca.clone() * cb.clone();
                match acc.get_mut(&(ka + kb)) {
                    Some(v) => *v += &p,
                    None => {
                        acc.insert(ka + kb, p);
                    }
                }
            }
        }
        Self::from_map(self.vars.clone(), trunc, exact, acc)
    }

    pub fn square(&self) -> Self {
        self.mul_to(self, DEGREE_CAP)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(self.vars.clone());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_to(&base, DEGREE_CAP);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (k, c) in &self.terms {
            let e = key_exp(*k, i);
            if e > 0 {
                terms.push((k - unit_key(i), c.clone() * C::from_i64(e as i64)));
            }
        }
        let trunc = if self.exact { DEGREE_CAP } else { self.trunc.saturating_sub(1).max(1) };
        Self::raw(self.vars.clone(), trunc, self.exact, terms)
    }

    pub fn partial_by_name(&self, name: &str) -> Result<Self> {
        let i = self
            .var_index(name)
            .ok_or_else(|| Error::VariableMismatch(format!("no variable {name}")))?;
        Ok(self.partial(i))
    }

    /// Antiderivative in variable `i` with zero constant of integration.
    pub fn integrate(&self, i: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (k + unit_key(i), c.clone() / C::from_i64(key_exp(*k, i) as i64 + 1)))
            .collect();
        let trunc = if self.exact { DEGREE_CAP } else { (self.trunc + 1).min(DEGREE_CAP) };
        let overflow = self.degree().is_some_and(|d| d + 1 >= DEGREE_CAP);
        Self::raw(self.vars.clone(), trunc, self.exact && !overflow, terms)
    }

    /// Set variable `i` to zero.
    pub fn drop_var(&self, i: usize) -> Self {
        let terms = self.terms.iter().filter(|t| key_exp(t.0, i) == 0).cloned().collect();
        Self { vars: self.vars.clone(), trunc: self.trunc, exact: self.exact, terms }
    }

    /// Coefficient of `x_i^e`, as a series in the same variables (with no
    /// `x_i`). Truncation drops by `e`.
    pub fn coeff_of_power(&self, i: usize, e: u32) -> Self {
        let trunc = if self.exact { DEGREE_CAP } else { self.trunc.saturating_sub(e).max(1) };
        let sub = (e as u64) << shift_of(i) | ((e as u64) << DEG_SHIFT);
        let terms = self
            .terms
            .iter()
            .filter(|t| key_exp(t.0, i) == e)
            .map(|(k, c)| (k - sub, c.clone()))
            .collect();
        Self::raw(self.vars.clone(), trunc, self.exact, terms)
    }

    /// Exact quotient by the monomial `x^exps`.
    pub fn monomial_divide(&self, exps: &[u32]) -> Result<Self> {
        if exps.len() != self.nvars() {
            return Err(Error::VariableMismatch("monomial length".into()));
        }
        let d: u32 = exps.iter().sum();
        let m = pack(exps);
        let mut terms = Vec::with_capacity(self.terms.len());
        for (k, c) in &self.terms {
            if (0..self.nvars()).any(|i| key_exp(*k, i) < exps[i]) {
                return Err(Error::NotDivisible(self.format_monomial(*k)));
            }
            terms.push((k - m, c.clone()));
        }
        let trunc = if self.exact { DEGREE_CAP } else { self.trunc.saturating_sub(d).max(1) };
        Ok(Self::raw(self.vars.clone(), trunc, self.exact, terms))
    }

    pub fn invert_unit(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let inv0 = C::one() / c0;
        if self.terms.len() == 1 {
            return Ok(Self { terms: vec![(0, inv0)], ..self.clone() });
        }
        if self.exact {
            return Err(Error::precision(
                "inverse of a non-constant polynomial needs a truncation; call truncate first",
            ));
        }
        let target = self.trunc;
        let two = Self::constant(self.vars.clone(), C::from_i64(2));
        let mut r = Self::constant(self.vars.clone(), inv0).truncate(1);
        let mut prec = 1u32;
        // Newton: each step doubles the number of correct degrees
        while prec < target {
            prec = (prec * 2).min(target);
            let approx = r.into_exact();
            let f = self.truncate(prec);
            let corr = two.clone() - f.mul_to(&approx, prec);
            r = approx.mul_to(&corr, prec);
        }
        Ok(r)
    }

    /// The unique `n`-th root with constant term 1.
    pub fn nth_root_unit(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("root of index 0".into()));
        }
        if !self.constant_term().is_one() {
            return Err(Error::ConstantTermNotOne);
        }
        if self.terms.len() == 1 {
            return Ok(self.clone());
        }
        if self.exact {
            return Err(Error::precision(
                "root of a non-constant polynomial needs a truncation; call truncate first",
            ));
        }
        // binomial series in g = f - 1, Horner form
        let one = Self::one(self.vars.clone());
        let g = self.clone() - one.clone();
        let t = self.trunc;
        let alpha = C::one() / C::from_i64(n as i64);
        let mut coeffs = vec![C::one()];
        for j in 1..t {
            let prev = coeffs[j as usize - 1].clone();
            let c = prev * (alpha.clone() - C::from_i64(j as i64 - 1)) / C::from_i64(j as i64);
            coeffs.push(c);
        }
        let mut acc = Self::constant(self.vars.clone(), coeffs[t as usize - 1].clone()).truncate(t);
        for j in (0..t as usize - 1).rev() {
            acc = acc.mul_to(&g, t) + Self::constant(self.vars.clone(), coeffs[j].clone());
        }
        acc.trunc = t;
        acc.exact = false;
        Ok(acc.truncate(t))
    }

    /// Compose: replace variable `i` of `self` by `images[i]`.
    pub fn substitute(&self, images: &[Self]) -> Result<Self> {
        if images.len() != self.nvars() {
            return Err(Error::VariableMismatch(format!(
                "{} images for {} variables",
                images.len(),
                self.nvars()
            )));
        }
        let target = match images.first() {
            Some(g) => g.vars.clone(),
            None => {
                // a series in no variables is a constant
                return Ok(self.clone());
            }
        };
        for g in images {
            if !(Arc::ptr_eq(&g.vars, &target) || g.vars == target) {
                return Err(Error::VariableMismatch("images over different variables".into()));
            }
        }
        let min_ord = images.iter().map(|g| g.order_bound()).min().unwrap_or(DEGREE_CAP);
        let has_const = images.iter().any(|g| !g.constant_term().is_zero());
        let mut trunc = DEGREE_CAP;
        let mut exact = self.exact;
        if !self.exact {
            if has_const {
                return Err(Error::OrderTooLow(
                    "an image has a constant term and the series is truncated".into(),
                ));
            }
            trunc = trunc.min(self.trunc.saturating_mul(min_ord));
        }
        let f_ord = self.order_bound();
        for (j, g) in images.iter().enumerate() {
            if g.exact || self.degree_in(j) == 0 && self.exact {
                continue;
            }
            let dj = if self.exact {
                self.partial(j).order_bound()
            } else {
                f_ord.saturating_sub(1)
            };
            exact = false;
            trunc = trunc.min(g.trunc.saturating_add(dj.saturating_mul(min_ord)));
        }
        trunc = trunc.min(DEGREE_CAP).max(1);
        let identity: Vec<bool> = images
            .iter()
            .enumerate()
            .map(|(j, g)| {
                g.terms.len() == 1
                    && g.terms[0].0 == unit_key(j)
                    && g.terms[0].1.is_one()
                    && g.nvars() == self.nvars()
                    && (g.exact || g.trunc >= trunc)
                    && g.vars == self.vars
            })
            .collect();
        let mut cache: Vec<Vec<Self>> = vec![Vec::new(); images.len()];
        let mut sub = SubstCtx { images, identity: &identity, trunc, cache: &mut cache, nvars: self.nvars() };
        let mut out = sub.eval(&self.terms, 0, &target);
        if out.exact && !exact {
            out.exact = false;
        }
        if !exact {
            out = out.truncate(trunc);
            out.trunc = trunc;
            out.exact = false;
        } else if !out.exact {
            // exact composition overflowed the degree cap
            out.exact = false;
        }
        Ok(out)
    }

    /// Re-express over a larger variable list containing all current names.
    pub fn embed(&self, target: &Vars) -> Result<Self> {
        Self::check_vars(target)?;
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                target
                    .iter()
                    .position(|w| w == v)
                    .ok_or_else(|| Error::VariableMismatch(format!("{v} missing from target")))
            })
            .collect::<Result<_>>()?;
        let n = target.len();
        let mut terms: Vec<(u64, C)> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let mut e = vec![0; n];
                for (i, &t) in map.iter().enumerate() {
                    e[t] = key_exp(*k, i);
                }
                (pack(&e), c.clone())
            })
            .collect();
        terms.sort_unstable_by_key(|t| t.0);
        Ok(Self { vars: target.clone(), trunc: self.trunc, exact: self.exact, terms })
    }

    /// Restrict to a smaller variable list; fails if a dropped variable occurs.
    pub fn restrict(&self, target: &Vars) -> Result<Self> {
        let map: Vec<Option<usize>> =
            self.vars.iter().map(|v| target.iter().position(|w| w == v)).collect();
        let n = target.len();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (k, c) in &self.terms {
            let mut e = vec![0; n];
            for (i, t) in map.iter().enumerate() {
                let x = key_exp(*k, i);
                match t {
                    Some(t) => e[*t] = x,
                    None if x > 0 => {
                        return Err(Error::VariableMismatch(format!(
                            "variable {} still occurs",
                            self.vars[i]
                        )))
                    }
                    None => {}
                }
            }
            terms.push((pack(&e), c.clone()));
        }
        terms.sort_unstable_by_key(|t| t.0);
        Ok(Self { vars: target.clone(), trunc: self.trunc, exact: self.exact, terms })
    }

    pub fn map_coeffs<D: Field>(&self, f: impl Fn(&C) -> D) -> TruncatedSeries<D> {
        let terms = self.terms.iter().map(|(k, c)| (*k, f(c))).collect();
        TruncatedSeries::raw(self.vars.clone(), self.trunc, self.exact, terms)
    }

    fn format_monomial(&self, k: u64) -> String {
        let mut parts = Vec::new();
        for (i, v) in self.vars.iter().enumerate() {
            match key_exp(k, i) {
                0 => {}
                1 => parts.push(v.clone()),
                e => parts.push(format!("{v}^{e}")),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

fn pack_saturating(exps: &[u32]) -> u64 {
    let mut k = 0u64;
    let mut d = 0u64;
    for (i, &e) in exps.iter().enumerate() {
        k |= (e.min(255) as u64) << shift_of(i);
        d += e as u64;
    }
    k | (d.min(255) << DEG_SHIFT)
}

struct SubstCtx<'a, C> {
    images: &'a [TruncatedSeries<C>],
    identity: &'a [bool],
    trunc: u32,
    cache: &'a mut Vec<Vec<TruncatedSeries<C>>>,
    nvars: usize,
}

impl<'a, C: Field> SubstCtx<'a, C> {
    fn power(&mut self, j: usize, e: u32) -> TruncatedSeries<C> {
        let g = &self.images[j];
        let cache = &mut self.cache[j];
        if cache.is_empty() {
            cache.push(TruncatedSeries::one(g.vars.clone()));
        }
        while cache.len() <= e as usize {
            let next = cache.last().unwrap().mul_to(g, self.trunc);
            cache.push(next);
        }
        cache[e as usize].clone()
    }

    /// Evaluate the sub-sum `terms` (all agreeing on exponents before `j`,
    /// those exponents already stripped off) in variables `j..`.
    fn eval(&mut self, terms: &[(u64, C)], j: usize, target: &Vars) -> TruncatedSeries<C> {
        if j == self.nvars {
            let mut c = C::zero();
            for (_, a) in terms {
                c += a;
            }
            return TruncatedSeries::constant(target.clone(), c);
        }
        let mut groups: Vec<(u32, Vec<(u64, C)>)> = Vec::new();
        for (k, c) in terms {
            let e = key_exp(*k, j);
            match groups.iter_mut().find(|g| g.0 == e) {
                Some(g) => g.1.push((*k, c.clone())),
                None => groups.push((e, vec![(*k, c.clone())])),
            }
        }
        let mut acc = TruncatedSeries::exact_zero(target.clone());
        for (e, group) in groups {
            let inner = self.eval(&group, j + 1, target);
            let term = if e == 0 {
                inner
            } else if self.identity[j] {
                let mut m = vec![0; target.len()];
                m[j] = e;
                inner.mul_monomial(&m, &C::one()).truncate(self.trunc)
            } else {
                let p = self.power(j, e);
                p.mul_to(&inner, self.trunc)
            };
            acc = acc.merge(&term, false);
        }
        acc
    }
}

impl<C: Field> Add for TruncatedSeries<C> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("series variable lists differ")
    }
}

impl<C: Field> Sub for TruncatedSeries<C> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs).expect("series variable lists differ")
    }
}

impl<C: Field> Mul for TruncatedSeries<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("series variable lists differ")
    }
}

impl<'a, C: Field> Add<&'a TruncatedSeries<C>> for &'a TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn add(self, rhs: Self) -> TruncatedSeries<C> {
        self.checked_add(rhs).expect("series variable lists differ")
    }
}

impl<'a, C: Field> Sub<&'a TruncatedSeries<C>> for &'a TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn sub(self, rhs: Self) -> TruncatedSeries<C> {
        self.checked_sub(rhs).expect("series variable lists differ")
    }
}

impl<'a, C: Field> Mul<&'a TruncatedSeries<C>> for &'a TruncatedSeries<C> {
    type Output = TruncatedSeries<C>;
    fn mul(self, rhs: Self) -> TruncatedSeries<C> {
        self.checked_mul(rhs).expect("series variable lists differ")
    }
}

impl<C: Field> Neg for TruncatedSeries<C> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for t in self.terms.iter_mut() {
            t.1 = -t.1.clone();
        }
        self
    }
}

/// Terms by ascending degree; inside a degree, the first variable's
/// exponent descends (`x^3 + 1/2*x*y^2 - y^3`).
impl<C: Field> fmt::Display for TruncatedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut lo = 0;
        while lo < self.terms.len() {
            let d = key_degree(self.terms[lo].0);
            let mut hi = lo;
            while hi < self.terms.len() && key_degree(self.terms[hi].0) == d {
                hi += 1;
            }
            for (k, c) in self.terms[lo..hi].iter().rev() {
                let neg = c.is_negative();
                let abs = if neg { -c.clone() } else { c.clone() };
                if first {
                    if neg {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, " {} ", if neg { '-' } else { '+' })?;
                }
                first = false;
                let m = self.format_monomial(*k);
                if *k == 0 {
                    write!(f, "{abs}")?;
                } else if abs.is_one() {
                    write!(f, "{m}")?;
                } else {
                    write!(f, "{abs}*{m}")?;
                }
            }
            lo = hi;
        }
        Ok(())
    }
}

impl<C: Field> fmt::Debug for TruncatedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{self}")
        } else {
            write!(f, "{self} + O(m^{})", self.trunc)
        }
    }
}

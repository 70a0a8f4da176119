//! Sufficient determinacy bounds from graded ideal membership.
//!
//! `m^k ⊆ I` for an ideal `I` of the local ring follows from
//! `m^k ⊆ I + m^{k+1}` by Nakayama (m^k is finitely generated), and the
//! latter is a finite linear problem: for every degree-`k` monomial `μ`,
//! match all coefficients of degree `<= k` of a combination of
//! `monomial * generator` products against `μ`.

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Field;
use crate::series::{OrderResult, TruncatedSeries};

type S<C> = TruncatedSeries<C>;

pub fn jacobian_generators<C: Field>(f: &S<C>) -> Vec<S<C>> {
    (0..f.nvars()).map(|i| f.partial(i)).collect()
}

/// Which multipliers a generator may carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultiplierIdeal {
    /// Multipliers in `m` (no constants).
    MaximalIdeal,
    Full,
}

/// For every degree-`k` monomial, a combination of the generators equal
/// to it modulo `m^{k+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipCertificate<C: Field> {
    pub k: u32,
    /// `(mu, [(generator index, multiplier)])`; when `f` was included it has
    /// index `gens.len()`.
    pub entries: Vec<(Vec<u32>, Vec<(usize, S<C>)>)>,
}

impl<C: Field> MembershipCertificate<C> {
    /// Recombine every entry and compare with its monomial below `k + 1`.
    pub fn verify(&self, gens: &[S<C>], f: Option<&S<C>>) -> bool {
        let Some(first) = gens.first() else { return self.entries.is_empty() };
        let v = first.vars().clone();
        self.entries.iter().all(|(mu, combo)| {
            let mut acc = S::exact_zero(v.clone());
            for (i, m) in combo {
                let g = if *i == gens.len() {
                    match f {
                        Some(f) => f,
                        None => return false,
                    }
                } else {
                    &gens[*i]
                };
                acc = &acc + &m.mul_to(g, self.k + 1);
            }
            let target = S::monomial(v.clone(), mu, C::one());
            acc.trunc() > self.k && acc.agrees_below(&target, self.k + 1)
        })
    }

    /// Whether the generator `f` (index `gens_len`) is used anywhere.
    pub fn uses_generator(&self, idx: usize) -> bool {
        self.entries.iter().any(|(_, c)| c.iter().any(|(i, m)| *i == idx && !m.is_zero()))
    }
}

/// Exponent vectors of total degree `d` in `n` variables, descending lex.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in monomials_of_degree(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn order_of<C: Field>(g: &S<C>) -> Option<u32> {
    match g.order() {
        OrderResult::Known(k) => Some(k),
        OrderResult::AtLeast(_) => None,
    }
}

/// Decide `m^k ⊆ M·(gens) [+ (f)]` where `M` is `m` or the whole ring.
///
/// `Ok(None)` means the inclusion fails.
pub fn graded_membership<C: Field>(
    k: u32,
    gens: &[S<C>],
    ideal: MultiplierIdeal,
    include_f: Option<&S<C>>,
) -> Result<Option<MembershipCertificate<C>>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let Some(first) = gens.first().or(include_f) else {
        return Ok(None);
    };
    let v = first.vars().clone();
    let n = v.len();
    for g in gens.iter().chain(include_f) {
        if g.trunc() < k + 1 {
            return Err(Error::precision(format!(
                "generator known below degree {}, membership at degree {k} needs {}",
                g.trunc(),
                k + 1
            )));
        }
    }
    // row index of every monomial of degree <= k
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for d in 0..=k {
        rows.extend(monomials_of_degree(n, d));
    }
    let row_of = |e: &[u32]| rows.iter().position(|r| r.as_slice() == e);
    let lo = match ideal {
        MultiplierIdeal::MaximalIdeal => 1,
        MultiplierIdeal::Full => 0,
    };
    let mut all: Vec<(usize, &S<C>, u32)> = gens.iter().enumerate().map(|(i, g)| (i, g, lo)).collect();
    if let Some(f) = include_f {
        all.push((gens.len(), f, 0));
    }
    // columns: (generator, multiplier monomial)
    let mut cols: Vec<(usize, Vec<u32>)> = Vec::new();
    let mut col_vecs: Vec<Vec<C>> = Vec::new();
    for (i, g, lo) in all.iter() {
        let Some(w) = order_of(g) else { continue };
        if w > k {
            continue;
        }
        for d in *lo..=k - w {
            for m in monomials_of_degree(n, d) {
                let prod = g.mul_monomial(&m, &C::one());
                let mut col = vec![C::zero(); rows.len()];
                for (e, c) in prod.terms() {
                    if e.iter().sum::<u32>() > k {
                        break;
                    }
                    col[row_of(&e).expect("degree <= k")] = c.clone();
                }
                cols.push((*i, m));
                col_vecs.push(col);
            }
        }
    }
    let targets = monomials_of_degree(n, k);
    if cols.is_empty() {
        return Ok(None);
    }
    let a: Vec<Vec<C>> = (0..rows.len()).map(|r| col_vecs.iter().map(|c| c[r].clone()).collect()).collect();
    let rhs: Vec<Vec<C>> = targets
        .iter()
        .map(|mu| {
            let mut b = vec![C::zero(); rows.len()];
            b[row_of(mu).unwrap()] = C::one();
            b
        })
        .collect();
    let sols = linalg::solve_many(&a, cols.len(), &rhs);
    let mut entries = Vec::with_capacity(targets.len());
    for (mu, sol) in targets.into_iter().zip(sols) {
        let Some(sol) = sol else { return Ok(None) };
        let mut combo: Vec<(usize, Vec<(Vec<u32>, C)>)> = Vec::new();
        for ((gi, m), c) in cols.iter().zip(sol) {
            if c.is_zero() {
                continue;
            }
            match combo.iter_mut().find(|e| e.0 == *gi) {
                Some(e) => e.1.push((m.clone(), c)),
                None => combo.push((*gi, vec![(m.clone(), c)])),
            }
        }
        let combo = combo
            .into_iter()
            .map(|(gi, terms)| {
                let g = all.iter().find(|a| a.0 == gi).unwrap().1;
                let w = order_of(g).unwrap_or(0);
                let m = S::make(v.clone(), k + 1 - w, terms).expect("multiplier degrees below bound");
                (gi, m)
            })
            .collect();
        entries.push((mu, combo));
    }
    Ok(Some(MembershipCertificate { k, entries }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeterminacyKind {
    Determined,
    Quasidetermined,
    NotCertifiedUpTo(u32),
}

/// A sufficient bound only: `f` is `k`-determined (resp. quasidetermined)
/// but may well be determined at a smaller order.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminacyReport<C: Field> {
    pub kind: DeterminacyKind,
    pub k: Option<u32>,
    pub certificate: Option<MembershipCertificate<C>>,
}

impl<C: Field> DeterminacyReport<C> {
    pub fn is_determined(&self) -> bool {
        self.kind == DeterminacyKind::Determined
    }
}

/// Smallest `k <= max_k` at which either inclusion holds; at that `k`
/// `m^k ⊆ m J(f)` is tried first, so `Determined` wins ties.
pub fn determinacy_bound<C: Field>(f: &S<C>, max_k: u32) -> Result<DeterminacyReport<C>> {
    let gens = jacobian_generators(f);
    for k in 1..=max_k {
        if !f.is_exact() && f.trunc() < k + 2 {
            return Err(Error::precision(format!(
                "series known below degree {}, certifying k = {k} needs {}",
                f.trunc(),
                k + 2
            )));
        }
        let fk = f.truncate(k + 1);
        let gk: Vec<S<C>> = gens.iter().map(|g| g.truncate(k + 1)).collect();
        if let Some(c) = graded_membership(k, &gk, MultiplierIdeal::MaximalIdeal, None)? {
            return Ok(DeterminacyReport { kind: DeterminacyKind::Determined, k: Some(k), certificate: Some(c) });
        }
        if let Some(c) = graded_membership(k, &gk, MultiplierIdeal::MaximalIdeal, Some(&fk))? {
            return Ok(DeterminacyReport { kind: DeterminacyKind::Quasidetermined, k: Some(k), certificate: Some(c) });
        }
    }
    Ok(DeterminacyReport { kind: DeterminacyKind::NotCertifiedUpTo(max_k), k: None, certificate: None })
}

//! Right-equivalence witnesses by formal flows.
//!
//! For `g = f + h` with `h ∈ m^{k+1}` and `f` certified `k`-(quasi)determined,
//! write `h = Σ x_i h_i` and put `F(x, y) = f + Σ (x_i + y_i) h_i`, so that
//! `F(x, 0) = g` and `F(x, -x) = f`. The auxiliary variables are removed
//! one at a time: decompose `∂F/∂y_j = -ζ F + Σ ξ_i ∂F/∂x_i`, then the
//! first integral `Θ` of `∂/∂y_j - Σ ξ_i ∂/∂x_i` with `Θ|_{y_j=0} = x` and the
//! matching unit `V` satisfy `F|_{y_j=0}(Θ) = V · F`. Composing the stages and
//! setting `y = -x` gives `f = u · g(φ)`.

use crate::determinacy::{self, monomials_of_degree, MultiplierIdeal};
use crate::error::{Error, Result};
use crate::scalar::Field;
use crate::series::{TruncatedSeries, Vars};

type S<C> = TruncatedSeries<C>;

/// Solve `dy/dt = u(t) y`, `y(0) = a`, where `u` and `y` are given by their
/// `t`-coefficients (themselves series over some base ring).
pub fn solve_linear_ode<C: Field>(u: &[S<C>], a: &S<C>, terms: usize) -> Vec<S<C>> {
    let mut y: Vec<S<C>> = Vec::with_capacity(terms);
    if terms == 0 {
        return y;
    }
    y.push(a.clone());
    for k in 1..terms {
        let mut acc = S::exact_zero(a.vars().clone());
        for (j, uj) in u.iter().enumerate().take(k) {
            let l = k - 1 - j;
            acc = &acc + &(uj * &y[l]);
        }
        y.push(acc.scalar_mul(&(C::one() / C::from_i64(k as i64))));
    }
    y
}

/// `∂φ_i/∂t = b_i(φ, base)` with `φ_i(t = 0) = a_i`.
///
/// `rhs` lives over `state ++ base` (the first `n` variables stand for the
/// unknowns); `initial` and the solution live over `base`, which contains
/// the time variable at `t_index`.
#[derive(Clone, Debug)]
pub struct OdeSystem<C: Field> {
    pub n: usize,
    pub rhs: Vec<S<C>>,
    pub initial: Vec<S<C>>,
    pub t_index: usize,
}

impl<C: Field> OdeSystem<C> {
    fn validate(&self) -> Result<Vars> {
        if self.rhs.len() != self.n || self.initial.len() != self.n || self.n == 0 {
            return Err(Error::InvalidOdeSystem("need one right-hand side and one initial value per unknown".into()));
        }
        let base = self.initial[0].vars().clone();
        let ext = self.rhs[0].vars().clone();
        if ext.len() != self.n + base.len() || ext[self.n..] != base[..] {
            return Err(Error::InvalidOdeSystem("right-hand sides must live over state ++ base".into()));
        }
        if self.rhs.iter().any(|b| !b.constant_term().is_zero()) {
            return Err(Error::InvalidOdeSystem("right-hand side must vanish at the origin".into()));
        }
        if self.initial.iter().any(|a| !a.constant_term().is_zero() || a.degree_in(self.t_index) > 0) {
            return Err(Error::InvalidOdeSystem("initial values must vanish at the origin and not involve t".into()));
        }
        Ok(base)
    }
}

/// Picard iteration `φ ← a + ∫_0^t b(φ) dt`, every pass gaining one order.
/// Pass `m` is computed only to the order it can be correct to, and the
/// loop stops at the first fixed point modulo `m^n_trunc`.
pub fn solve_ode_system<C: Field>(sys: &OdeSystem<C>, n_trunc: u32) -> Result<Vec<S<C>>> {
    let base = sys.validate()?;
    let n = sys.n;
    let ids: Vec<S<C>> = (0..base.len()).map(|i| S::var(base.clone(), i)).collect();
    let mut phi: Vec<S<C>> = sys.initial.iter().map(|a| a.truncate(n_trunc)).collect();
    let mut prev_t = 2u32.min(n_trunc);
    for m in 0..=n_trunc as usize + 1 {
        let t = (m as u32 + 3).min(n_trunc);
        let mut images: Vec<S<C>> = phi.iter().map(|p| p.clone().into_exact().truncate(t)).collect();
        images.extend(ids.iter().cloned());
        let mut next = Vec::with_capacity(n);
        for (b, a) in sys.rhs.iter().zip(&sys.initial) {
            let comp = b.truncate(t).substitute(&images)?.into_exact().truncate(t);
            let integral = comp.integrate(sys.t_index).truncate(t);
            next.push((&a.truncate(t) + &integral).truncate(t));
        }
        // consecutive iterates agree below t-degree m + 1
        let k = prev_t.min(t);
        for (a, b) in phi.iter().zip(&next) {
            let d = &a.truncate(k) - &b.truncate(k);
            debug_assert!(d.terms().all(|(e, _)| e[sys.t_index] as usize > m));
        }
        let done = t == n_trunc && prev_t == n_trunc && phi.iter().zip(&next).all(|(a, b)| a.agrees_below(b, t));
        phi = next;
        prev_t = t;
        if done {
            break;
        }
    }
    Ok(phi)
}

/// Substitution images of the identity over `v`.
fn identity_images<C: Field>(v: &Vars) -> Vec<S<C>> {
    (0..v.len()).map(|i| S::var(v.clone(), i)).collect()
}

/// A decomposition `∂F/∂y_j = -ζ F + Σ ξ_i ∂F/∂x_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<C: Field> {
    pub zeta: S<C>,
    pub xi: Vec<S<C>>,
}

/// Lexicographically first degree-`k` divisor of `x^alpha` (first variables
/// taken greedily).
fn lex_first_divisor(alpha: &[u32], k: u32) -> Option<Vec<u32>> {
    let mut left = k;
    let mut mu = vec![0; alpha.len()];
    for (i, &a) in alpha.iter().enumerate() {
        let take = a.min(left);
        mu[i] = take;
        left -= take;
    }
    (left == 0).then_some(mu)
}

/// Multipliers of one certified monomial `mu`: `mu = Σ m_i ∂F/∂x_i + z F + err`.
struct Row<C: Field> {
    mu: Vec<u32>,
    m: Vec<S<C>>,
    z: S<C>,
    err: S<C>,
}

fn certificate_rows<C: Field>(
    cert: &determinacy::MembershipCertificate<C>,
    v: &Vars,
    nx: usize,
    derivs: &[S<C>],
    f_n: &S<C>,
    n_trunc: u32,
) -> Result<Vec<Row<C>>> {
    let mut rows = Vec::new();
    for (mu, combo) in &cert.entries {
        let mut m = vec![S::exact_zero(v.clone()); nx];
        let mut z = S::exact_zero(v.clone());
        for (gi, mult) in combo {
            let lifted = mult.clone().into_exact().embed(v)?;
            if *gi == nx {
                z = lifted;
            } else {
                m[*gi] = lifted;
            }
        }
        let mut mu_full = mu.clone();
        mu_full.resize(v.len(), 0);
        let mut err = S::monomial(v.clone(), &mu_full, C::one());
        for (mi, d) in m.iter().zip(derivs) {
            err = &err - &mi.mul_to(d, n_trunc);
        }
        err = &err - &z.mul_to(f_n, n_trunc);
        rows.push(Row { mu: mu_full, m, z, err: err.truncate(n_trunc) });
    }
    Ok(rows)
}

/// Decompose `∂F/∂y_j` over `F`'s variables, the first `nx` of which are
/// the `x`'s, with every `ξ_i ∈ (x)^c`, modulo `m^n_trunc`.
///
/// The multipliers come from a graded certificate for `F(x, 0)`: each
/// degree-`k` monomial is a combination of the `∂F/∂x_i` (and `F`) up to an
/// error in `m·(x)^k` of higher degree, so rewriting the lowest-degree part
/// of the remainder degree by degree converges. Solutions without `F` are
/// preferred. `Ok(None)` when no certificate applies.
pub fn membership_decompose<C: Field>(
    big_f: &S<C>,
    nx: usize,
    j: usize,
    c: u32,
    n_trunc: u32,
) -> Result<Option<Decomposition<C>>> {
    let v = big_f.vars().clone();
    if big_f.trunc() < n_trunc + 1 && !big_f.is_exact() {
        return Err(Error::precision(format!(
            "F known below {}, decomposition to {n_trunc} needs {}",
            big_f.trunc(),
            n_trunc + 1
        )));
    }
    let f_n = big_f.truncate(n_trunc + 1);
    let target = big_f.partial(j).truncate(n_trunc);
    let xvars: Vars = v[..nx].to_vec().into();
    let zero = S::zero(v.clone(), n_trunc);
    if target.is_zero() {
        return Ok(Some(Decomposition { zeta: zero.clone(), xi: vec![zero; nx] }));
    }
    let xdeg = |e: &[u32]| e[..nx].iter().sum::<u32>();
    let kx = target.terms().map(|(e, _)| xdeg(&e)).min().unwrap_or(0);
    if kx == 0 {
        return Ok(None);
    }
    // base = F at y = 0, over the x variables only
    let mut base = big_f.clone();
    for i in nx..v.len() {
        base = base.drop_var(i);
    }
    let base = base.restrict(&xvars)?;
    let gens: Vec<S<C>> = determinacy::jacobian_generators(&base).iter().map(|g| g.truncate(kx + 1)).collect();
    let base_k = base.truncate(kx + 1);
    let derivs: Vec<S<C>> = (0..nx).map(|i| big_f.partial(i).truncate(n_trunc)).collect();
    // the first certificate whose errors, computed against the full F, all
    // lie above its degree; otherwise the rewriting below cannot advance
    let mut found = None;
    'search: for with_f in [false, true] {
        for kk in 1..=kx {
            let cert = determinacy::graded_membership(
                kk,
                &gens.iter().map(|g| g.truncate(kk + 1)).collect::<Vec<_>>(),
                MultiplierIdeal::MaximalIdeal,
                with_f.then(|| base_k.truncate(kk + 1)).as_ref(),
            )?;
            let Some(cert) = cert else { continue };
            let rows = certificate_rows(&cert, &v, nx, &derivs, &f_n, n_trunc)?;
            if rows.iter().all(|r| r.err.order().lower_bound() > kk) {
                found = Some((kk, rows));
                break 'search;
            }
        }
    }
    let Some((k, rows)) = found else { return Ok(None) };
    let mut xi = vec![S::exact_zero(v.clone()); nx];
    let mut zc = S::exact_zero(v.clone());
    let mut rem = target.clone();
    loop {
        let Some(low) = rem.order().known() else { break };
        if low >= n_trunc {
            break;
        }
        let part = rem.homogeneous_part(low);
        let mut q: Vec<Vec<(Vec<u32>, C)>> = vec![Vec::new(); rows.len()];
        for (e, coef) in part.terms() {
            let Some(mu) = lex_first_divisor(&e[..nx], k) else { return Ok(None) };
            let idx = rows.iter().position(|r| r.mu[..nx] == mu[..]).expect("every degree-k monomial has a row");
            let mut rest = e.clone();
            for i in 0..nx {
                rest[i] -= mu[i];
            }
            q[idx].push((rest, coef.clone()));
        }
        let mut next = &rem - &part;
        for (row, terms) in rows.iter().zip(q) {
            if terms.is_empty() {
                continue;
            }
            let qm = S::polynomial(v.clone(), terms)?;
            for (x, m) in xi.iter_mut().zip(&row.m) {
                if !m.is_zero() {
                    *x = &*x + &qm.mul_to(m, n_trunc);
                }
            }
            if !row.z.is_zero() {
                zc = &zc + &qm.mul_to(&row.z, n_trunc);
            }
            next = &next + &qm.mul_to(&row.err, n_trunc);
        }
        let next = next.truncate(n_trunc);
        if next.order().lower_bound() <= low {
            return Ok(None);
        }
        rem = next;
    }
    let xi: Vec<S<C>> = xi.into_iter().map(|x| x.truncate(n_trunc)).collect();
    if xi.iter().any(|x| x.terms().any(|(e, _)| xdeg(&e) < c)) {
        return Ok(None);
    }
    let zeta = zc.truncate(n_trunc).scalar_mul(&(-C::one()));
    // re-verify the identity
    let mut rhs = zeta.mul_to(&f_n, n_trunc).scalar_mul(&(-C::one()));
    for (x, d) in xi.iter().zip(&derivs) {
        rhs = &rhs + &x.mul_to(d, n_trunc);
    }
    if !rhs.truncate(n_trunc).agrees_below(&target, n_trunc) {
        return Err(Error::DecompositionFailed("decomposition did not re-verify".into()));
    }
    Ok(Some(Decomposition { zeta, xi }))
}

/// First integral `Θ` and unit `V` of one elimination stage: with
/// `D = ∂/∂y_j - Σ ξ_i ∂/∂x_i`, `DΘ = 0`, `DV = ζV`, `Θ = x` and `V = 1` on
/// `y_j = 0`. Solved by the fixed points `Θ = x + ∫ Σ ξ_i ∂Θ/∂x_i dy_j`,
/// `V = 1 + ∫ (Σ ξ_i ∂V/∂x_i + ζV) dy_j`.
pub fn transport<C: Field>(dec: &Decomposition<C>, y: usize, n_trunc: u32) -> (Vec<S<C>>, S<C>) {
    let nx = dec.xi.len();
    let v = dec.zeta.vars().clone();
    let xi: Vec<S<C>> = dec.xi.iter().map(|x| x.clone().into_exact()).collect();
    let zeta = dec.zeta.clone().into_exact();
    let lie = |h: &S<C>, t: u32| {
        let mut acc = S::exact_zero(v.clone());
        for (i, x) in xi.iter().enumerate() {
            if !x.is_zero() {
                acc = &acc + &x.mul_to(&h.partial(i), t);
            }
        }
        acc
    };
    let mut theta: Vec<S<C>> = (0..nx).map(|i| S::var(v.clone(), i)).collect();
    let mut prev = 0u32;
    for m in 0..=n_trunc + 1 {
        let t = (m + 3).min(n_trunc);
        let next: Vec<S<C>> = theta
            .iter()
            .enumerate()
            .map(|(i, th)| {
                let x = S::var(v.clone(), i);
                (&x + &lie(th, t).integrate(y)).truncate(t).into_exact()
            })
            .collect();
        let done = t == n_trunc && prev == n_trunc && next == theta;
        theta = next;
        prev = t;
        if done {
            break;
        }
    }
    let one = S::one(v.clone());
    let mut unit = one.clone();
    if !zeta.is_zero() {
        let mut prev = 0u32;
        for m in 0..=n_trunc + 1 {
            let t = (m + 2).min(n_trunc);
            let rhs = &lie(&unit, t) + &zeta.mul_to(&unit, t);
            let next = (&one + &rhs.integrate(y)).truncate(t).into_exact();
            let done = t == n_trunc && prev == n_trunc && next == unit;
            unit = next;
            prev = t;
            if done {
                break;
            }
        }
    }
    (theta.into_iter().map(|t| t.truncate(n_trunc)).collect(), unit.truncate(n_trunc))
}

/// The same stage solved as an ODE along the flow: `Φ' = ξ(Φ, y', y_j - t)`,
/// `Φ(0) = x`, `P' = ζ(Φ, y', y_j - t) P`, `P(0) = 1`, then `t = y_j`.
pub fn stage_by_ode<C: Field>(dec: &Decomposition<C>, y: usize, n_trunc: u32) -> Result<(Vec<S<C>>, S<C>)> {
    let nx = dec.xi.len();
    let v = dec.zeta.vars().clone();
    let mut base_names: Vec<String> = v.iter().cloned().collect();
    let tname = fresh_name(&v, "t");
    base_names.push(tname);
    let base: Vars = base_names.into();
    let t_index = base.len() - 1;
    let mut ext_names: Vec<String> = (0..nx).map(|i| fresh_name(&base, &format!("s{i}"))).collect();
    ext_names.extend(base.iter().cloned());
    let ext: Vars = ext_names.into();
    // images of v inside ext: x_i -> s_i, y -> y - t, others fixed
    let mut to_ext: Vec<S<C>> = Vec::with_capacity(v.len());
    for i in 0..v.len() {
        if i < nx {
            to_ext.push(S::var(ext.clone(), i));
        } else if i == y {
            to_ext.push(&S::var(ext.clone(), nx + i) - &S::var(ext.clone(), nx + t_index));
        } else {
            to_ext.push(S::var(ext.clone(), nx + i));
        }
    }
    let rhs: Vec<S<C>> = dec.xi.iter().map(|x| x.substitute(&to_ext)).collect::<Result<_>>()?;
    let initial: Vec<S<C>> = (0..nx).map(|i| S::var(base.clone(), i)).collect();
    let sys = OdeSystem { n: nx, rhs, initial, t_index };
    let phi = solve_ode_system(&sys, n_trunc)?;
    // evaluate at t = y_j
    let mut at_y: Vec<S<C>> = identity_images(&v);
    at_y.push(S::var(v.clone(), y));
    let theta: Vec<S<C>> = phi.iter().map(|p| p.substitute(&at_y)).collect::<Result<_>>()?;
    let mut unit = S::one(v.clone()).truncate(n_trunc);
    if !dec.zeta.is_zero() {
        // ζ along the path, as a series in (v, t)
        let mut along: Vec<S<C>> = phi.clone();
        for i in nx..v.len() {
            along.push(if i == y {
                &S::var(base.clone(), i) - &S::var(base.clone(), t_index)
            } else {
                S::var(base.clone(), i)
            });
        }
        let z = dec.zeta.substitute(&along)?;
        let coeffs: Vec<S<C>> = (0..n_trunc)
            .map(|k| z.coeff_of_power(t_index, k).into_exact().truncate(n_trunc))
            .collect();
        let one = S::one(base.clone());
        let p = solve_linear_ode(&coeffs, &one, n_trunc as usize);
        let mut acc = S::exact_zero(base.clone());
        for (k, pk) in p.iter().enumerate() {
            let mut e = vec![0; base.len()];
            e[t_index] = k as u32;
            acc = &acc + &pk.mul_monomial(&e, &C::one());
        }
        unit = acc.truncate(n_trunc).substitute(&at_y)?.truncate(n_trunc);
    }
    Ok((theta.into_iter().map(|t| t.truncate(n_trunc)).collect(), unit))
}

fn fresh_name(v: &Vars, stem: &str) -> String {
    let mut name = format!("{stem}'");
    while v.contains(&name) {
        name.push('\'');
    }
    name
}

/// `f ≡ u · g(φ)` modulo `m^verified_to`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceWitness<C: Field> {
    pub substitutions: Vec<S<C>>,
    pub unit: S<C>,
    pub verified_to: u32,
    /// Per elimination stage, the first integral and unit (last auxiliary
    /// variable first).
    pub stages: Vec<(Vec<S<C>>, S<C>)>,
}

impl<C: Field> EquivalenceWitness<C> {
    pub fn identity(f: &S<C>, n_trunc: u32) -> Self {
        let v = f.vars().clone();
        Self {
            substitutions: identity_images(&v),
            unit: S::one(v),
            verified_to: n_trunc,
            stages: Vec::new(),
        }
    }

    /// Order to which `f - u·g(φ)` is known to vanish.
    pub fn residual_order(&self, f: &S<C>, g: &S<C>) -> Result<u32> {
        let r = f - &(&self.unit * &g.substitute(&self.substitutions)?);
        Ok(r.order().lower_bound())
    }

    /// Linear part of the substitution is the identity.
    pub fn is_tangent_to_identity(&self) -> bool {
        self.substitutions.iter().enumerate().all(|(i, s)| {
            let lin = s.homogeneous_part(1);
            let n = s.nvars();
            (0..n).all(|j| {
                let mut e = vec![0; n];
                e[j] = 1;
                lin.coeff(&e) == if i == j { C::one() } else { C::zero() }
            }) && s.constant_term().is_zero()
        })
    }
}

/// Assign each monomial of `h` to its first variable: `h = Σ x_i h_i`.
fn split_by_first_variable<C: Field>(h: &S<C>) -> Vec<S<C>> {
    let n = h.nvars();
    let v = h.vars().clone();
    let mut parts: Vec<Vec<(Vec<u32>, C)>> = vec![Vec::new(); n];
    for (mut e, c) in h.terms() {
        if let Some(i) = e.iter().position(|&a| a > 0) {
            e[i] -= 1;
            parts[i].push((e, c.clone()));
        }
    }
    parts
        .into_iter()
        .map(|t| {
            let s = S::make(v.clone(), h.trunc().saturating_sub(1).max(1), t).expect("degrees fit");
            if h.is_exact() {
                s.into_exact()
            } else {
                s
            }
        })
        .collect()
}

/// Which stage solver to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageSolver {
    Transport,
    Ode,
}

/// Coordinate change and unit with `f ≡ u · g(φ)` modulo `m^n_trunc`.
pub fn right_equivalence_witness<C: Field>(
    f: &S<C>,
    g: &S<C>,
    k: u32,
    n_trunc: u32,
) -> Result<EquivalenceWitness<C>> {
    right_equivalence_witness_with(f, g, k, n_trunc, StageSolver::Transport)
}

pub fn right_equivalence_witness_with<C: Field>(
    f: &S<C>,
    g: &S<C>,
    k: u32,
    n_trunc: u32,
    solver: StageSolver,
) -> Result<EquivalenceWitness<C>> {
    if f.vars() != g.vars() {
        return Err(Error::VariableMismatch("f and g over different variables".into()));
    }
    let avail = f.trunc().min(g.trunc());
    if n_trunc > avail {
        return Err(Error::precision(format!("requested {n_trunc}, inputs known below {avail}")));
    }
    let h = (g - f).truncate(n_trunc + 1);
    if h.order().lower_bound() < k + 1 {
        return Err(Error::NotWithinDeterminacyBall(k + 1));
    }
    let jac: Vec<S<C>> = determinacy::jacobian_generators(f).iter().map(|d| d.truncate(k + 1)).collect();
    let certified = determinacy::graded_membership(k, &jac, MultiplierIdeal::MaximalIdeal, None)?.is_some()
        || determinacy::graded_membership(k, &jac, MultiplierIdeal::MaximalIdeal, Some(&f.truncate(k + 1)))?
            .is_some();
    if !certified {
        return Err(Error::DecompositionFailed(format!("no membership certificate at k = {k}")));
    }
    if h.is_zero() {
        return Ok(EquivalenceWitness::identity(f, n_trunc));
    }
    let n = f.nvars();
    let v = f.vars().clone();
    let mut names: Vec<String> = v.iter().cloned().collect();
    for i in 0..n {
        let w: Vars = names.clone().into();
        names.push(fresh_name(&w, &format!("w{i}")));
    }
    let ext: Vars = names.into();
    if ext.len() > crate::series::MAX_VARS {
        return Err(Error::InvalidArgument("too many variables for auxiliary elimination".into()));
    }
    let parts = split_by_first_variable(&h);
    let f_ext = f.truncate(n_trunc + 1).embed(&ext)?;
    let mut big_f = f_ext;
    for (i, hi) in parts.iter().enumerate() {
        let lin = &S::var(ext.clone(), i) + &S::var(ext.clone(), n + i);
        big_f = &big_f + &lin.mul_to(&hi.embed(&ext)?, n_trunc + 1);
    }
    let big_f = big_f.truncate(n_trunc + 1);
    let mut stages = Vec::with_capacity(n);
    // eliminate the last auxiliary variable first
    let mut h_j = big_f.clone();
    for j in (0..n).rev() {
        let y = n + j;
        let dec = membership_decompose(&h_j, n, y, 1, n_trunc)?
            .ok_or_else(|| Error::DecompositionFailed(format!("stage {}", j + 1)))?;
        let stage = match solver {
            StageSolver::Transport => transport(&dec, y, n_trunc),
            StageSolver::Ode => stage_by_ode(&dec, y, n_trunc)?,
        };
        stages.push(stage);
        h_j = h_j.drop_var(y);
    }
    // compose Ψ = Θ_1 ∘ … ∘ Θ_n and U = Π V_j ∘ (Θ_{j+1} ∘ … ∘ Θ_n)
    let mut maps: Vec<S<C>> = identity_images(&ext).into_iter().map(|s| s.truncate(n_trunc)).collect();
    let mut unit = S::one(ext.clone()).truncate(n_trunc);
    for (theta, vj) in stages.iter() {
        // stages are stored n, n-1, ..., 1
        unit = (&unit * &vj.substitute(&maps)?).truncate(n_trunc);
        let mut full: Vec<S<C>> = theta.clone();
        full.extend((n..ext.len()).map(|i| S::var(ext.clone(), i)));
        let composed: Vec<S<C>> = full
            .iter()
            .map(|t| t.substitute(&maps).map(|s| s.truncate(n_trunc)))
            .collect::<Result<_>>()?;
        maps = composed;
    }
    // y = -x
    let mut spec: Vec<S<C>> = identity_images(&v);
    spec.extend((0..n).map(|i| S::var(v.clone(), i).scalar_mul(&(-C::one()))));
    let phi: Vec<S<C>> = maps[..n]
        .iter()
        .map(|m| m.substitute(&spec).map(|s| s.truncate(n_trunc)))
        .collect::<Result<_>>()?;
    let u_spec = unit.substitute(&spec)?.truncate(n_trunc);
    let u = if u_spec.len() == 1 && u_spec.constant_term().is_one() {
        S::one(v.clone())
    } else {
        u_spec.invert_unit()?
    };
    let mut w = EquivalenceWitness { substitutions: phi, unit: u, verified_to: 0, stages };
    let got = w.residual_order(f, g)?;
    if got < n_trunc {
        return Err(Error::DecompositionFailed(format!(
            "residual has order {got}, below the requested {n_trunc}"
        )));
    }
    w.verified_to = n_trunc;
    Ok(w)
}

/// All degree-`k` monomials in `n` variables (re-exported helper).
pub fn degree_monomials(n: usize, k: u32) -> Vec<Vec<u32>> {
    monomials_of_degree(n, k)
}

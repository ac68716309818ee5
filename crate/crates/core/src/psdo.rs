//! Pseudo-differential operators in `∂ = ∂/∂t_1`, Sato dressing from τ, and
//! checks of the k-constraint and the Lax flows.
//!
//! Operators are generic over the coefficient ring. [`RatFun`] is the general
//! choice; [`TauFrac`] keeps every coefficient as `num/τ^e` so exact zero tests
//! are a numerator comparison; [`Jet`] is a truncated Taylor expansion at a
//! rational point along `t_1`, with an optional first-order part along one
//! other time, used for fast exact evaluation.
//!
//! An operator carries `low`: coefficients at orders below it are unknown.
//! `None` means the operator is exact at every order.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::rat::{binomial, format_rat};
use crate::algebra::{ChargedPoly, MPoly, Rat, RatFun};
use crate::error::{Error, Result};
use crate::sample::{pole_free_point, rng, POLE_BUDGET};
use crate::schur::{miwa_shift, Shift};

pub trait DiffCoeff: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    /// Certified zero. Types that cannot certify return `false`.
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Rat) -> Self;
    /// `∂/∂t_1`.
    fn d1(&self) -> Self;
}

const SHARED_VARS: &str = "coefficients share one variable set";

impl DiffCoeff for RatFun {
    fn zero_like(&self) -> Self {
        RatFun::zero(self.nvars())
    }
    fn one_like(&self) -> Self {
        RatFun::one(self.nvars())
    }
    fn is_zero(&self) -> bool {
        RatFun::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect(SHARED_VARS)
    }
    fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect(SHARED_VARS)
    }
    fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect(SHARED_VARS)
    }
    fn neg(&self) -> Self {
        RatFun::neg(self)
    }
    fn scale(&self, c: &Rat) -> Self {
        RatFun::scale(self, c)
    }
    fn d1(&self) -> Self {
        self.differentiate(1).expect("at least one variable")
    }
}

/// τ, `∂_1 τ` and cached powers of τ.
#[derive(Debug)]
pub struct TauContext {
    tau: MPoly,
    dtau: MPoly,
    powers: Mutex<Vec<MPoly>>,
}

impl TauContext {
    pub fn new(tau: &MPoly) -> Result<Arc<Self>> {
        if tau.is_zero() {
            return Err(Error::ZeroTau);
        }
        let tau = tau.with_vars(tau.nvars().max(1))?;
        Ok(Arc::new(TauContext {
            dtau: tau.differentiate(1)?,
            powers: Mutex::new(vec![MPoly::one(tau.nvars()), tau.clone()]),
            tau,
        }))
    }

    pub fn tau(&self) -> &MPoly {
        &self.tau
    }

    fn power(&self, e: u32) -> MPoly {
        let mut p = self.powers.lock().unwrap();
        while p.len() <= e as usize {
            let next = &p[p.len() - 1] * &self.tau;
            p.push(next);
        }
        p[e as usize].clone()
    }
}

/// `num / τ^e`.
#[derive(Clone, Debug)]
pub struct TauFrac {
    num: MPoly,
    e: u32,
    ctx: Arc<TauContext>,
}

impl TauFrac {
    pub fn new(num: MPoly, e: u32, ctx: &Arc<TauContext>) -> Result<Self> {
        Ok(TauFrac {
            num: num.with_vars(ctx.tau.nvars())?,
            e,
            ctx: ctx.clone(),
        })
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.e
    }

    /// As a rational function with common factors of τ cancelled.
    pub fn to_ratfun(&self) -> RatFun {
        RatFun::new(self.num.clone(), self.ctx.power(self.e))
            .expect("τ is nonzero")
            .reduce_by(&self.ctx.tau)
    }

    fn aligned(&self, o: &Self) -> (MPoly, MPoly, u32) {
        match self.e.cmp(&o.e) {
            std::cmp::Ordering::Equal => (self.num.clone(), o.num.clone(), self.e),
            std::cmp::Ordering::Less => (&self.num * &self.ctx.power(o.e - self.e), o.num.clone(), o.e),
            std::cmp::Ordering::Greater => (self.num.clone(), &o.num * &self.ctx.power(self.e - o.e), self.e),
        }
    }

    fn with(&self, num: MPoly, e: u32) -> Self {
        if num.is_zero() {
            return TauFrac { num, e: 0, ctx: self.ctx.clone() };
        }
        TauFrac { num, e, ctx: self.ctx.clone() }
    }
}

impl DiffCoeff for TauFrac {
    fn zero_like(&self) -> Self {
        self.with(MPoly::zero(self.num.nvars()), 0)
    }
    fn one_like(&self) -> Self {
        self.with(MPoly::one(self.num.nvars()), 0)
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        if o.num.is_zero() {
            return self.clone();
        }
        if self.num.is_zero() {
            return o.clone();
        }
        let (a, b, e) = self.aligned(o);
        self.with(&a + &b, e)
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        if self.num.is_zero() || o.num.is_zero() {
            return self.zero_like();
        }
        self.with(&self.num * &o.num, self.e + o.e)
    }
    fn neg(&self) -> Self {
        self.with(-&self.num, self.e)
    }
    fn scale(&self, c: &Rat) -> Self {
        self.with(self.num.scale(c), self.e)
    }
    fn d1(&self) -> Self {
        let dn = self.num.differentiate(1).expect("at least one variable");
        if self.e == 0 {
            return self.with(dn, 0);
        }
        let mut n = &dn * &self.ctx.tau;
        n.add_scaled(&(&self.num * &self.ctx.dtau), &-Rat::from_integer(self.e.into()));
        self.with(n, self.e + 1)
    }
}

/// `f(t⁰ + ε e_1 + δ e_j) mod (ε^len, δ²)`: `c0` holds the ε-coefficients
/// of the δ-free part and `c1` those of the δ part. Products keep the
/// shorter length and each `d1` drops one coefficient, so a length tracks
/// exactly how much of the expansion is known.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    c0: Vec<Rat>,
    c1: Option<Vec<Rat>>,
}

fn series_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().min(b.len());
    (0..n)
        .map(|k| {
            let mut s = Rat::zero();
            for i in 0..=k {
                if !a[i].is_zero() && !b[k - i].is_zero() {
                    s += &a[i] * &b[k - i];
                }
            }
            s
        })
        .collect()
}

fn series_zip(a: &[Rat], b: &[Rat], f: impl Fn(&Rat, &Rat) -> Rat) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

fn series_d(a: &[Rat]) -> Vec<Rat> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(n, c)| c * Rat::from_integer((n as i64).into()))
        .collect()
}

fn series_inv(a: &[Rat]) -> Result<Vec<Rat>> {
    if a.is_empty() || a[0].is_zero() {
        return Err(Error::Pole);
    }
    let inv0 = a[0].recip();
    let mut out: Vec<Rat> = vec![inv0.clone()];
    for k in 1..a.len() {
        let mut s = Rat::zero();
        for i in 1..=k {
            s += &a[i] * &out[k - i];
        }
        out.push(-s * &inv0);
    }
    Ok(out)
}

fn taylor(p: &MPoly, point: &[Rat], len: usize) -> Result<Vec<Rat>> {
    let mut q = p.clone();
    let mut fact = Rat::one();
    let mut out = Vec::with_capacity(len);
    for n in 0..len {
        if n > 0 {
            fact *= Rat::from_integer((n as i64).into());
        }
        out.push(q.evaluate(point)? / &fact);
        q = q.differentiate(1)?;
    }
    Ok(out)
}

impl Jet {
    /// Expansion of `p` at `point`, with a δ part along `t_dual` if given.
    pub fn of_poly(p: &MPoly, point: &[Rat], len: usize, dual: Option<usize>) -> Result<Jet> {
        let p = p.with_vars(point.len())?;
        Ok(Jet {
            c0: taylor(&p, point, len)?,
            c1: match dual {
                None => None,
                Some(j) => Some(taylor(&p.differentiate(j)?, point, len)?),
            },
        })
    }

    pub fn constant(c: Rat, len: usize, dual: bool) -> Jet {
        let mut c0 = vec![Rat::zero(); len];
        if len > 0 {
            c0[0] = c;
        }
        Jet {
            c1: dual.then(|| vec![Rat::zero(); len]),
            c0,
        }
    }

    pub fn precision(&self) -> usize {
        self.c0.len()
    }

    /// Value at the point, if still known.
    pub fn value(&self) -> Option<Rat> {
        self.c0.first().cloned()
    }

    /// Derivative along the dual direction at the point, if known.
    pub fn dual_value(&self) -> Option<Rat> {
        self.c1.as_ref().and_then(|c| c.first().cloned())
    }

    pub fn inverse(&self) -> Result<Jet> {
        let i0 = series_inv(&self.c0)?;
        let c1 = self.c1.as_ref().map(|c| {
            let sq = series_mul(&i0, &i0);
            series_mul(c, &sq).into_iter().map(|x| -x).collect()
        });
        Ok(Jet { c0: i0, c1 })
    }

    fn zip(&self, o: &Jet, f: impl Fn(&Rat, &Rat) -> Rat + Copy) -> Jet {
        Jet {
            c0: series_zip(&self.c0, &o.c0, f),
            c1: match (&self.c1, &o.c1) {
                (Some(a), Some(b)) => Some(series_zip(a, b, f)),
                _ => None,
            },
        }
    }
}

impl DiffCoeff for Jet {
    fn zero_like(&self) -> Self {
        Jet::constant(Rat::zero(), self.c0.len(), self.c1.is_some())
    }
    fn one_like(&self) -> Self {
        Jet::constant(Rat::one(), self.c0.len(), self.c1.is_some())
    }
    fn is_zero(&self) -> bool {
        false
    }
    fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }
    fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }
    fn mul(&self, o: &Self) -> Self {
        let c0 = series_mul(&self.c0, &o.c0);
        let c1 = match (&self.c1, &o.c1) {
            (Some(a), Some(b)) => Some(series_zip(&series_mul(&self.c0, b), &series_mul(a, &o.c0), |x, y| x + y)),
            _ => None,
        };
        Jet { c0, c1 }
    }
    fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }
    fn scale(&self, c: &Rat) -> Self {
        Jet {
            c0: self.c0.iter().map(|x| x * c).collect(),
            c1: self.c1.as_ref().map(|v| v.iter().map(|x| x * c).collect()),
        }
    }
    fn d1(&self) -> Self {
        Jet {
            c0: series_d(&self.c0),
            c1: self.c1.as_ref().map(|v| series_d(v)),
        }
    }
}

/// Safety cap on Leibniz expansions that have no truncation to stop them.
const MAX_EXPANSION: u32 = 256;

fn max_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// `Σ_i c_i ∂^i`, exact at orders `>= low`.
#[derive(Clone, Debug)]
pub struct PsiDO<C> {
    terms: BTreeMap<i64, C>,
    low: Option<i64>,
}

impl<C: DiffCoeff> PsiDO<C> {
    pub fn zero(low: Option<i64>) -> Self {
        PsiDO {
            terms: BTreeMap::new(),
            low,
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, C)>, low: Option<i64>) -> Self {
        let mut op = PsiDO::zero(low);
        for (i, c) in terms {
            op.add_term(i, c);
        }
        op
    }

    pub fn monomial(c: C, order: i64) -> Self {
        PsiDO::from_terms([(order, c)], None)
    }

    fn add_term(&mut self, i: i64, c: C) {
        if self.low.is_some_and(|l| i < l) || c.is_zero() {
            return;
        }
        match self.terms.entry(i) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn low(&self) -> Option<i64> {
        self.low
    }

    pub fn max_order(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.terms.iter().map(|(i, c)| (*i, c))
    }

    /// Coefficient of `∂^order`, `None` for zero.
    pub fn coeff(&self, order: i64) -> Result<Option<&C>> {
        if let Some(l) = self.low {
            if order < l {
                return Err(Error::InexactOrder {
                    order,
                    lo: l.to_string(),
                    hi: "+inf".into(),
                });
            }
        }
        Ok(self.terms.get(&order))
    }

    pub fn truncate(&self, low: i64) -> Self {
        PsiDO::from_terms(
            self.terms.iter().map(|(i, c)| (*i, c.clone())),
            max_opt(self.low, Some(low)),
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = PsiDO::from_terms(self.terms.iter().map(|(i, c)| (*i, c.clone())), max_opt(self.low, o.low));
        for (i, c) in &o.terms {
            out.add_term(*i, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        PsiDO {
            terms: self.terms.iter().map(|(i, c)| (*i, c.neg())).collect(),
            low: self.low,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn map<D: DiffCoeff>(&self, f: impl Fn(&C) -> D) -> PsiDO<D> {
        PsiDO::from_terms(self.terms.iter().map(|(i, c)| (*i, f(c))), self.low)
    }

    /// `A ∘ B` via `∂^i ∘ b = Σ_l C(i,l) b^{(l)} ∂^{i-l}`, exact down to the
    /// larger of `trunc` and what the operands' own truncations allow.
    pub fn compose(&self, o: &Self, trunc: Option<i64>) -> Result<Self> {
        let (Some(ma), Some(mb)) = (self.max_order(), o.max_order()) else {
            let low = max_opt(trunc, max_opt(self.low, o.low));
            return Ok(PsiDO::zero(low));
        };
        let mut low = trunc;
        if let Some(la) = self.low {
            low = max_opt(low, Some(la + mb));
        }
        if let Some(lb) = o.low {
            low = max_opt(low, Some(lb + ma));
        }
        if low.is_some_and(|l| l > ma + mb) {
            return Err(Error::EmptyValidRange);
        }
        let mut out = PsiDO::zero(low);
        for (&j, b) in &o.terms {
            let mut derivs = vec![b.clone()];
            for (&i, a) in &self.terms {
                let mut l: u32 = 0;
                loop {
                    let ord = i + j - l as i64;
                    if low.is_some_and(|lo| ord < lo) || (i >= 0 && l as i64 > i) {
                        break;
                    }
                    if l >= MAX_EXPANSION {
                        return Err(Error::InvalidInput(
                            "expansion does not terminate; supply a truncation".into(),
                        ));
                    }
                    if derivs.len() <= l as usize {
                        let next = derivs[derivs.len() - 1].d1();
                        derivs.push(next);
                    }
                    let d = &derivs[l as usize];
                    if d.is_zero() {
                        break;
                    }
                    out.add_term(ord, a.mul(d).scale(&binomial(i, l)));
                    l += 1;
                }
            }
        }
        Ok(out)
    }

    /// `(a∂^i)* = (-∂)^i ∘ a`, extended linearly.
    pub fn adjoint(&self, trunc: Option<i64>) -> Result<Self> {
        let low = max_opt(self.low, trunc);
        let mut out = PsiDO::zero(low);
        for (&i, a) in &self.terms {
            let d = PsiDO::monomial(a.one_like(), i);
            let part = d.compose(&PsiDO::monomial(a.clone(), 0), low)?;
            let sign = if i.rem_euclid(2) == 0 { Rat::one() } else { -Rat::one() };
            for (o, c) in part.terms {
                out.add_term(o, c.scale(&sign));
            }
        }
        Ok(out)
    }

    /// `(A_+, A_-)`: orders `>= 0` and `< 0`.
    pub fn split(&self) -> (Self, Self) {
        let pick = |keep: &dyn Fn(i64) -> bool| {
            self.terms
                .iter()
                .filter(|(i, _)| keep(**i))
                .map(|(i, c)| (*i, c.clone()))
                .collect::<BTreeMap<_, _>>()
        };
        (
            PsiDO {
                terms: pick(&|i| i >= 0),
                low: self.low.filter(|l| *l > 0),
            },
            PsiDO {
                terms: pick(&|i| i < 0),
                low: self.low,
            },
        )
    }

    /// Action of a differential operator on a function.
    pub fn apply(&self, f: &C) -> Result<C> {
        if self.low.is_some_and(|l| l > 0) || self.terms.keys().any(|&i| i < 0) {
            return Err(Error::InvalidInput("apply needs an exact differential operator".into()));
        }
        let mut acc = f.zero_like();
        let mut d = f.clone();
        let top = self.max_order().unwrap_or(0);
        for i in 0..=top {
            if let Some(c) = self.terms.get(&i) {
                acc = acc.add(&c.mul(&d));
            }
            if i < top {
                d = d.d1();
            }
        }
        Ok(acc)
    }

    /// Inverse of a monic order-zero operator `1 + Σ_{i>0} a_i ∂^{-i}`, to
    /// order `-depth`.
    pub fn inverse_monic(&self, depth: i64) -> Result<Self> {
        if self.max_order() != Some(0) {
            return Err(Error::InvalidInput("inverse needs a monic order-zero operator".into()));
        }
        if self.low.is_some_and(|l| l > -depth) {
            return Err(Error::EmptyValidRange);
        }
        let one = self.terms[&0].clone();
        // derivs[m][l] = b_m^{(l)}
        let mut derivs: Vec<Vec<C>> = vec![vec![one.clone()]];
        for j in 1..=depth {
            let mut b = one.zero_like();
            for i in 1..=j {
                let Some(a) = self.terms.get(&-i) else { continue };
                for l in 0..=(j - i) {
                    let m = (j - i - l) as usize;
                    while derivs[m].len() <= l as usize {
                        let next = derivs[m][derivs[m].len() - 1].d1();
                        derivs[m].push(next);
                    }
                    b = b.sub(&a.mul(&derivs[m][l as usize]).scale(&binomial(-i, l as u32)));
                }
            }
            derivs.push(vec![b]);
        }
        Ok(PsiDO::from_terms(
            derivs.into_iter().enumerate().map(|(m, mut d)| (-(m as i64), d.swap_remove(0))),
            Some(-depth),
        ))
    }

    pub fn pow(&self, k: u32, one: &C, trunc: Option<i64>) -> Result<Self> {
        let mut acc = PsiDO::monomial(one.clone(), 0);
        for _ in 0..k {
            acc = acc.compose(self, trunc)?;
        }
        Ok(acc)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct PsiDOJson {
    max_order: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    truncation: Option<i64>,
    coefs: BTreeMap<String, RatFun>,
}

impl Serialize for PsiDO<RatFun> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PsiDOJson {
            max_order: self.max_order(),
            truncation: self.low,
            coefs: self.terms.iter().map(|(i, c)| (i.to_string(), c.clone())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PsiDO<RatFun> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PsiDOJson::deserialize(d)?;
        let mut terms = Vec::new();
        for (k, c) in j.coefs {
            let i: i64 = k.parse().map_err(serde::de::Error::custom)?;
            terms.push((i, c));
        }
        Ok(PsiDO::from_terms(terms, j.truncation))
    }
}

/// Dressing coefficients `a_i` as numerators over τ: the coefficient of
/// `z^{-i}` in `τ(t - [z^{-1}])`, for `i = 1..=wdeg τ`.
fn dressing_numerators(tau: &MPoly) -> Result<Vec<MPoly>> {
    let w = tau.wdeg().ok_or(Error::ZeroTau)?;
    let s = miwa_shift(tau, Shift::Minus, w)?;
    (1..=w as i64).map(|i| s.coeff(-i)).collect()
}

fn dressing_operator<C: DiffCoeff>(one: &C, a: Vec<C>) -> PsiDO<C> {
    PsiDO::from_terms(
        std::iter::once((0, one.clone())).chain(a.into_iter().enumerate().map(|(i, c)| (-(i as i64) - 1, c))),
        None,
    )
}

/// `P ∂^k P^{-1}` exact down to `∂^{-depth}`.
fn dressed_power<C: DiffCoeff>(p: &PsiDO<C>, one: &C, k: u32, depth: i64) -> Result<PsiDO<C>> {
    let pinv = p.inverse_monic(depth + k as i64)?;
    let dk = PsiDO::monomial(one.clone(), k as i64);
    p.compose(&dk.compose(&pinv, None)?, None)
}

/// Coefficients of `L^k - (L^k)_+ - Σ q_j ∂^{-1} r_j` at orders `-1..=-depth`.
fn constraint_coeffs<C: DiffCoeff>(p: &PsiDO<C>, one: &C, q: &[C], r: &[C], k: u32, depth: i64) -> Result<Vec<C>> {
    let lk = dressed_power(p, one, k, depth)?;
    let mut rd: Vec<C> = r.to_vec();
    let mut out = Vec::new();
    for j in 1..=depth {
        let mut c = lk.coeff(-j)?.cloned().unwrap_or_else(|| one.zero_like());
        // q ∂^{-1} r = Σ_l (-1)^l q r^{(l)} ∂^{-1-l}
        for (qn, rn) in q.iter().zip(&rd) {
            let t = qn.mul(rn);
            c = if (j - 1) % 2 == 0 { c.sub(&t) } else { c.add(&t) };
        }
        out.push(c);
        rd = rd.iter().map(C::d1).collect();
    }
    Ok(out)
}

/// Dressing operator and Lax operator `L = P∂P^{-1}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DressingPair {
    #[serde(rename = "P")]
    pub p: PsiDO<RatFun>,
    #[serde(rename = "L")]
    pub l: PsiDO<RatFun>,
}

pub fn dress_from_tau(tau: &ChargedPoly, depth: u32, nvars: usize) -> Result<DressingPair> {
    if tau.is_zero() {
        return Err(Error::ZeroTau);
    }
    let poly = tau.poly.with_vars(nvars.max(1).max(tau.poly.max_var_used()))?;
    let ctx = TauContext::new(&poly)?;
    let one = TauFrac::new(MPoly::one(poly.nvars()), 0, &ctx)?;
    let a = dressing_numerators(&poly)?
        .into_iter()
        .map(|n| TauFrac::new(n, 1, &ctx))
        .collect::<Result<Vec<_>>>()?;
    let p = dressing_operator(&one, a);
    let l = dressed_power(&p, &one, 1, depth as i64)?;
    Ok(DressingPair {
        p: p.map(TauFrac::to_ratfun),
        l: l.map(TauFrac::to_ratfun),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    CrossMultiplication,
    Evaluation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderCheck {
    pub order: i64,
    pub pass: bool,
    pub method: Method,
    /// First sample point where the coefficient is nonzero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_point: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstraintReport {
    pub k: u32,
    pub pairs: usize,
    pub truncation: i64,
    pub orders: Vec<OrderCheck>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlowCheck {
    pub time: u32,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<i64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_point: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowReport {
    pub checks: Vec<FlowCheck>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LaxOptions {
    /// Orders `∂^{-1} .. ∂^{-truncation}` are checked.
    pub truncation: u32,
    pub trials: usize,
    pub seed: u64,
    /// Leading negative orders additionally confirmed by exact numerators.
    pub symbolic_orders: u32,
}

impl Default for LaxOptions {
    fn default() -> Self {
        LaxOptions {
            truncation: 5,
            trials: 20,
            seed: 0,
            symbolic_orders: 2,
        }
    }
}

struct Inputs {
    tau: MPoly,
    rho: Vec<MPoly>,
    sigma: Vec<MPoly>,
}

fn prepare(tau: &ChargedPoly, rho: &[ChargedPoly], sigma: &[ChargedPoly], k: u32, min_vars: usize) -> Result<Inputs> {
    if tau.is_zero() {
        return Err(Error::ZeroTau);
    }
    if rho.len() != sigma.len() {
        return Err(Error::InvalidInput(format!("{} rho against {} sigma", rho.len(), sigma.len())));
    }
    let m = tau.charge;
    for (j, r) in rho.iter().enumerate() {
        if r.charge != m + 1 {
            return Err(Error::ChargeMismatch { what: format!("rho_{}", j + 1), expected: m + 1, got: r.charge });
        }
    }
    for (j, s) in sigma.iter().enumerate() {
        let want = m - k as i64 - 1;
        if s.charge != want {
            return Err(Error::ChargeMismatch { what: format!("sigma_{}", j + 1), expected: want, got: s.charge });
        }
    }
    let n = rho
        .iter()
        .chain(sigma)
        .map(|p| p.poly.max_var_used())
        .chain([tau.poly.max_var_used(), min_vars, 1])
        .max()
        .unwrap();
    let fit = |p: &ChargedPoly| p.poly.with_vars(n);
    Ok(Inputs {
        tau: fit(tau)?,
        rho: rho.iter().map(fit).collect::<Result<_>>()?,
        sigma: sigma.iter().map(fit).collect::<Result<_>>()?,
    })
}

fn sample_points(tau: &MPoly, trials: usize, seed: u64) -> Result<Vec<Vec<Rat>>> {
    let mut r = rng(seed);
    (0..trials).map(|_| pole_free_point(&mut r, tau, POLE_BUDGET)).collect()
}

fn show_point(p: &[Rat]) -> Vec<String> {
    p.iter().map(format_rat).collect()
}

struct JetInputs {
    one: Jet,
    p: PsiDO<Jet>,
    q: Vec<Jet>,
    r: Vec<Jet>,
}

fn jet_inputs(inp: &Inputs, point: &[Rat], len: usize, dual: Option<usize>) -> Result<JetInputs> {
    let jt = Jet::of_poly(&inp.tau, point, len, dual)?;
    let inv = jt.inverse()?;
    let one = jt.one_like();
    let frac = |p: &MPoly| -> Result<Jet> { Ok(Jet::of_poly(p, point, len, dual)?.mul(&inv)) };
    let a = dressing_numerators(&inp.tau)?
        .iter()
        .map(frac)
        .collect::<Result<Vec<_>>>()?;
    Ok(JetInputs {
        p: dressing_operator(&one, a),
        q: inp.rho.iter().map(frac).collect::<Result<_>>()?,
        r: inp.sigma.iter().map(frac).collect::<Result<_>>()?,
        one,
    })
}

/// Run `f` with growing jet length until no coefficient runs out of precision.
fn with_precision<T>(start: usize, f: impl Fn(usize) -> Result<T>) -> Result<T> {
    let mut len = start;
    loop {
        match f(len) {
            Err(Error::JetPrecision { .. }) if len < start + 12 => len += 4,
            other => return other,
        }
    }
}

fn constraint_values(inp: &Inputs, point: &[Rat], k: u32, depth: i64) -> Result<Vec<Rat>> {
    with_precision(depth as usize + k as usize + 2, |len| {
        let j = jet_inputs(inp, point, len, None)?;
        constraint_coeffs(&j.p, &j.one, &j.q, &j.r, k, depth)?
            .iter()
            .enumerate()
            .map(|(i, c)| c.value().ok_or(Error::JetPrecision { order: -(i as i64) - 1 }))
            .collect()
    })
}

/// Exact numerators of the constraint coefficients at orders `-1..=-depth`.
pub fn constraint_numerators(
    tau: &ChargedPoly,
    rho: &[ChargedPoly],
    sigma: &[ChargedPoly],
    k: u32,
    depth: u32,
) -> Result<Vec<TauFrac>> {
    let inp = prepare(tau, rho, sigma, k, 1)?;
    let ctx = TauContext::new(&inp.tau)?;
    let one = TauFrac::new(MPoly::one(inp.tau.nvars()), 0, &ctx)?;
    let frac = |p: &MPoly| TauFrac::new(p.clone(), 1, &ctx);
    let a = dressing_numerators(&inp.tau)?
        .iter()
        .map(frac)
        .collect::<Result<Vec<_>>>()?;
    let p = dressing_operator(&one, a);
    let q = inp.rho.iter().map(frac).collect::<Result<Vec<_>>>()?;
    let r = inp.sigma.iter().map(frac).collect::<Result<Vec<_>>>()?;
    constraint_coeffs(&p, &one, &q, &r, k, depth as i64)
}

/// Checks `L^k = (L^k)_+ + Σ q_j ∂^{-1} r_j` at orders `∂^{-1} .. ∂^{-T}` with
/// `q_j = ρ_j/τ`, `r_j = σ_j/τ`.
pub fn verify_constraint(
    tau: &ChargedPoly,
    rho: &[ChargedPoly],
    sigma: &[ChargedPoly],
    k: u32,
    opts: &LaxOptions,
) -> Result<ConstraintReport> {
    if opts.truncation == 0 {
        return Err(Error::InvalidInput("truncation must be positive".into()));
    }
    let inp = prepare(tau, rho, sigma, k, 1)?;
    let depth = opts.truncation as i64;
    let points = sample_points(&inp.tau, opts.trials, opts.seed)?;
    let values = points
        .par_iter()
        .map(|p| constraint_values(&inp, p, k, depth))
        .collect::<Result<Vec<_>>>()?;
    let mut orders: Vec<OrderCheck> = (1..=depth)
        .map(|j| {
            let bad = values.iter().position(|v| !v[(j - 1) as usize].is_zero());
            OrderCheck {
                order: -j,
                pass: bad.is_none(),
                method: Method::Evaluation,
                witness_point: bad.map(|i| show_point(&points[i])),
            }
        })
        .collect();
    let sym = opts.symbolic_orders.min(opts.truncation);
    if sym > 0 && orders[..sym as usize].iter().all(|o| o.pass) {
        let nums = constraint_numerators(tau, rho, sigma, k, sym)?;
        for (o, n) in orders.iter_mut().zip(&nums) {
            o.pass = n.is_zero();
            o.method = Method::CrossMultiplication;
        }
    }
    Ok(ConstraintReport {
        k,
        pairs: rho.len(),
        truncation: -depth,
        pass: orders.iter().all(|o| o.pass),
        orders,
    })
}

/// Values at one point of both sides of every flow equation for `t_time`.
/// Returned as `(target, order, lhs, rhs)`.
type FlowRow = (String, Option<i64>, Rat, Rat);

fn flow_values(inp: &Inputs, point: &[Rat], time: u32, depth: i64) -> Result<Vec<FlowRow>> {
    with_precision(depth as usize + time as usize + 3, |len| {
        let j = jet_inputs(inp, point, len, Some(time as usize))?;
        let prec = |order: i64| Error::JetPrecision { order };
        let l = dressed_power(&j.p, &j.one, 1, depth + time as i64)?;
        let (b, _) = dressed_power(&j.p, &j.one, time, 0)?.split();
        let comm = b.compose(&l, None)?.sub(&l.compose(&b, None)?);
        let mut rows = Vec::new();
        for o in (-depth..=1).rev() {
            let lhs = match l.coeff(o)? {
                Some(c) => c.dual_value().ok_or(prec(o))?,
                None => Rat::zero(),
            };
            let rhs = match comm.coeff(o)? {
                Some(c) => c.value().ok_or(prec(o))?,
                None => Rat::zero(),
            };
            rows.push(("L".to_string(), Some(o), lhs, rhs));
        }
        let bstar = b.adjoint(None)?;
        for (n, q) in j.q.iter().enumerate() {
            let rhs = b.apply(q)?.value().ok_or(prec(0))?;
            rows.push((format!("q_{}", n + 1), None, q.dual_value().ok_or(prec(0))?, rhs));
        }
        for (n, r) in j.r.iter().enumerate() {
            let rhs = bstar.apply(r)?.neg().value().ok_or(prec(0))?;
            rows.push((format!("r_{}", n + 1), None, r.dual_value().ok_or(prec(0))?, rhs));
        }
        Ok(rows)
    })
}

/// Checks `∂L/∂t_j = [(L^j)_+, L]` to order `∂^{-T}`, `∂q/∂t_j = (L^j)_+ q`
/// and `∂r/∂t_j = -((L^j)_+)^* r` for each `j` in `times`, by exact evaluation.
pub fn verify_flows(
    tau: &ChargedPoly,
    rho: &[ChargedPoly],
    sigma: &[ChargedPoly],
    k: u32,
    times: &[u32],
    opts: &LaxOptions,
) -> Result<FlowReport> {
    let max_time = times.iter().copied().max().unwrap_or(1) as usize;
    let inp = prepare(tau, rho, sigma, k, max_time)?;
    let depth = opts.truncation as i64;
    let points = sample_points(&inp.tau, opts.trials, opts.seed)?;
    let mut checks = Vec::new();
    for &time in times {
        if time == 0 {
            return Err(Error::InvalidInput("flow times start at 1".into()));
        }
        let per_point = points
            .par_iter()
            .map(|p| flow_values(&inp, p, time, depth))
            .collect::<Result<Vec<_>>>()?;
        for (row, (target, order, _, _)) in per_point[0].iter().enumerate() {
            let bad = per_point.iter().position(|rows| rows[row].2 != rows[row].3);
            checks.push(FlowCheck {
                time,
                target: target.clone(),
                order: *order,
                pass: bad.is_none(),
                witness_point: bad.map(|i| show_point(&points[i])),
            });
        }
    }
    Ok(FlowReport {
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}

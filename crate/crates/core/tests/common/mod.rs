//! Relation checks shared by the property tests and the acceptance runner.
//! Each takes a seeded generator and returns whether the relation held on the
//! instance it drew.
#![allow(dead_code)]

use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tauforge::algebra::{ChargedPoly, MPoly, Rat, RatFun};
use tauforge::fock::{alpha, psi_minus, psi_plus, shift_q, sigma_single, vertex_coeff, FockVector, HalfInt};
use tauforge::psdo::PsiDO;
use tauforge::sample::{random_fock_vector, small_rat};

pub fn state<R: Rng>(rng: &mut R) -> (i64, FockVector) {
    let m = rng.gen_range(-2..=2);
    let n = rng.gen_range(1..=3);
    (m, random_fock_vector(rng, m, 4, n))
}

fn half<R: Rng>(rng: &mut R, bound: i64) -> HalfInt {
    HalfInt::plus_half(rng.gen_range(-bound..bound))
}

fn psi(plus: bool, j: HalfInt, v: &FockVector) -> FockVector {
    if plus {
        psi_plus(j, v)
    } else {
        psi_minus(j, v)
    }
}

/// `{ψ^λ_i, ψ^μ_j} = δ_{λ,-μ} δ_{i,-j}`.
pub fn clifford(rng: &mut ChaCha8Rng) -> bool {
    let (_, v) = state(rng);
    let (a, b) = (rng.gen_bool(0.5), rng.gen_bool(0.5));
    let i = half(rng, 5);
    // Bias toward i = -j so the nonzero case is exercised.
    let j = if rng.gen_bool(0.4) { i.neg() } else { half(rng, 5) };
    let lhs = psi(a, i, &psi(b, j, &v)).add(&psi(b, j, &psi(a, i, &v)));
    let expect = if a != b && i == j.neg() { v } else { FockVector::zero() };
    lhs == expect
}

/// `[α_k, α_l] = k δ_{k,-l}`.
pub fn oscillator(rng: &mut ChaCha8Rng) -> bool {
    let (_, v) = state(rng);
    let k = rng.gen_range(-4..=4);
    let l = if rng.gen_bool(0.4) { -k } else { rng.gen_range(-4..=4) };
    let lhs = alpha(k, &alpha(l, &v)).sub(&alpha(l, &alpha(k, &v)));
    let expect = if k == -l { v.scale(&Rat::from_integer(k.into())) } else { FockVector::zero() };
    lhs == expect
}

/// `Q ψ^±_k = ψ^±_{k∓1} Q`.
pub fn q_commutation(rng: &mut ChaCha8Rng) -> bool {
    let (_, v) = state(rng);
    let k = half(rng, 5);
    let plus = psi_plus(k.add_int(-1), &shift_q(1, &v)) == shift_q(1, &psi_plus(k, &v));
    let minus = psi_minus(k.add_int(1), &shift_q(1, &v)) == shift_q(1, &psi_minus(k, &v));
    plus && minus
}

/// `σ α_{-m} = m t_m σ`, `σ α_m = ∂_{t_m} σ`, `σ Q = q σ`.
pub fn intertwining(rng: &mut ChaCha8Rng) -> bool {
    let (m, v) = state(rng);
    let k = rng.gen_range(1..=4);
    let n = 10;
    let s = sigma_single(&v, m, n).unwrap();
    let raised = sigma_single(&alpha(-k, &v), m, n).unwrap();
    let lowered = sigma_single(&alpha(k, &v), m, n).unwrap();
    let q = sigma_single(&shift_q(1, &v), m + 1, n).unwrap();
    raised == &MPoly::t(n, k as usize).scale(&Rat::from_integer(k.into())) * &s
        && lowered == s.differentiate(k as usize).unwrap()
        && q == s
}

/// The z^p coefficient of the bosonic vertex operators matches
/// `σ(ψ^±_j v)` with `z^{-j-1/2} = z^p`, for weights up to 8.
pub fn vertex(rng: &mut ChaCha8Rng) -> bool {
    let (m, v) = state(rng);
    let plus = rng.gen_bool(0.5);
    let n = 12;
    let f = ChargedPoly::new(m, sigma_single(&v, m, n).unwrap());
    let w = v.max_weight() as i64;
    // The coefficient is nonzero only for a bounded window of p.
    let (lo, hi) = if plus { (m - w, m + 8 - w) } else { (-m - w, -m + 8 - w) };
    (lo..=hi).all(|p| {
        let j = HalfInt::minus_half(-p);
        let fermionic = psi(plus, j, &v);
        let mq = if plus { m + 1 } else { m - 1 };
        let expect = sigma_single(&fermionic, mq, n).unwrap();
        let got = vertex_coeff(&f, plus, p).unwrap();
        got.charge == mq && got.poly.with_vars(n).unwrap() == expect
    })
}

fn random_op(rng: &mut ChaCha8Rng, n: usize) -> PsiDO<RatFun> {
    let terms: Vec<(i64, RatFun)> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let order = rng.gen_range(-2..=2);
            let deg = rng.gen_range(0..=2);
            let mut p = MPoly::constant(n, small_rat(rng));
            for _ in 0..deg {
                p = &p * &(&MPoly::t(n, rng.gen_range(1..=n)) + &MPoly::constant(n, small_rat(rng)));
            }
            (order, RatFun::from_poly(p))
        })
        .collect();
    PsiDO::from_terms(terms, None)
}

fn agree_from(a: &PsiDO<RatFun>, b: &PsiDO<RatFun>, low: i64, high: i64) -> bool {
    (low..=high).all(|o| {
        let x = a.coeff(o).unwrap().cloned();
        let y = b.coeff(o).unwrap().cloned();
        match (x, y) {
            (None, None) => true,
            (Some(x), None) | (None, Some(x)) => x.is_zero(),
            (Some(x), Some(y)) => x.equals(&y),
        }
    })
}

const DEPTH: i64 = -6;

/// `(AB)* = B* A*` down to a fixed depth.
pub fn adjoint_antihom(rng: &mut ChaCha8Rng) -> bool {
    let n = 2;
    let a = random_op(rng, n);
    let b = random_op(rng, n);
    let ab = a.compose(&b, Some(DEPTH - 4)).unwrap().adjoint(Some(DEPTH)).unwrap();
    let ba = b
        .adjoint(Some(DEPTH - 4))
        .unwrap()
        .compose(&a.adjoint(Some(DEPTH - 4)).unwrap(), Some(DEPTH))
        .unwrap();
    agree_from(&ab, &ba, DEPTH, 4)
}

/// `(AB)C = A(BC)` down to a fixed depth.
pub fn associativity(rng: &mut ChaCha8Rng) -> bool {
    let n = 2;
    let (a, b, c) = (random_op(rng, n), random_op(rng, n), random_op(rng, n));
    let left = a.compose(&b, Some(DEPTH - 4)).unwrap().compose(&c, Some(DEPTH)).unwrap();
    let right = a.compose(&b.compose(&c, Some(DEPTH - 4)).unwrap(), Some(DEPTH)).unwrap();
    agree_from(&left, &right, DEPTH, 6)
}

/// `split` is a direct sum and idempotent.
pub fn split_sum(rng: &mut ChaCha8Rng) -> bool {
    let a = random_op(rng, 2);
    let (p, m) = a.split();
    let (pp, pm) = p.split();
    agree_from(&p.add(&m), &a, -2, 2) && agree_from(&pp, &p, -2, 2) && pm.terms().next().is_none()
}

pub fn nonzero_ratio(a: &MPoly, b: &MPoly) -> Option<Rat> {
    // a = c·b for a single nonzero rational c.
    let (m, cb) = b.terms().next()?;
    let ca = a.coeff(m.exps());
    if ca.is_zero() {
        return None;
    }
    let c = ca / cb;
    (a == &b.scale(&c)).then_some(c)
}

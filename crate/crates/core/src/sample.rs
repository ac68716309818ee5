//! Seeded random instances for property checks and the acceptance suite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{rat, MPoly, Rat};
use crate::error::{Error, Result};
use crate::fock::{FockVector, HalfInt, MayaState, WindowMatrix};
use crate::grassmannian::{GrPoint, LaurentVec};
use crate::schur::Partition;

pub const POLE_BUDGET: usize = 100;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `p ∈ [-9, 9]`, `q ∈ [1, 5]`.
pub fn small_rat<R: Rng>(rng: &mut R) -> Rat {
    rat(rng.gen_range(-9..=9), rng.gen_range(1..=5))
}

fn nonzero_rat<R: Rng>(rng: &mut R) -> Rat {
    loop {
        let c = small_rat(rng);
        if c != Rat::from_integer(0.into()) {
            return c;
        }
    }
}

pub fn rational_point<R: Rng>(rng: &mut R, nvars: usize) -> Vec<Rat> {
    (0..nvars).map(|_| small_rat(rng)).collect()
}

/// A point where `avoid` does not vanish, resampling up to `budget` times.
pub fn pole_free_point<R: Rng>(rng: &mut R, avoid: &MPoly, budget: usize) -> Result<Vec<Rat>> {
    for _ in 0..budget {
        let p = rational_point(rng, avoid.nvars());
        if avoid.evaluate(&p)? != Rat::from_integer(0.into()) {
            return Ok(p);
        }
    }
    Err(Error::PoleBudgetExhausted { attempts: budget })
}

/// Shape of random Grassmannian points: tail range, number of extra basis
/// vectors, how far below the tail they reach, and a weight cap on τ.
#[derive(Clone, Debug)]
pub struct GrShape {
    pub tail: (i64, i64),
    pub max_extra: usize,
    pub depth: i64,
    pub max_weight: u32,
}

impl Default for GrShape {
    fn default() -> Self {
        GrShape {
            tail: (-2, 1),
            max_extra: 3,
            depth: 5,
            max_weight: 6,
        }
    }
}

pub fn random_grpoint<R: Rng>(rng: &mut R, shape: &GrShape) -> GrPoint {
    loop {
        let tail = rng.gen_range(shape.tail.0..=shape.tail.1);
        let r = rng.gen_range(0..=shape.max_extra);
        let raw: Vec<LaurentVec> = (0..r)
            .map(|_| {
                let nterms = rng.gen_range(1..=2);
                LaurentVec::from_terms(
                    (0..nterms).map(|_| (rng.gen_range(-tail - shape.depth..=-tail - 1), nonzero_rat(rng))),
                )
            })
            .collect();
        let w = GrPoint::reduce(&raw, tail);
        if w.weight_bound() <= shape.max_weight {
            return w;
        }
    }
}

/// Identity plus a few entries between labels in `labels`, invertible.
pub fn random_window_matrix<R: Rng>(
    rng: &mut R,
    window: i64,
    labels: (i64, i64),
    extra: usize,
) -> WindowMatrix {
    loop {
        let mut a = WindowMatrix::identity(window);
        for _ in 0..extra {
            let row = HalfInt::plus_half(rng.gen_range(labels.0..=labels.1));
            let col = HalfInt::plus_half(rng.gen_range(labels.0..=labels.1));
            a.set(row, col, small_rat(rng)).expect("labels lie inside the window");
        }
        if let Ok(a) = a.validated() {
            return a;
        }
    }
}

pub fn random_partition<R: Rng>(rng: &mut R, max_weight: u32) -> Partition {
    let w = rng.gen_range(0..=max_weight);
    Partition::all_of_weight(w)
        .choose(rng)
        .cloned()
        .unwrap_or_else(Partition::empty)
}

/// `nterms` random basis states at one charge with nonzero coefficients.
pub fn random_fock_vector<R: Rng>(rng: &mut R, charge: i64, max_weight: u32, nterms: usize) -> FockVector {
    FockVector::from_terms(
        (0..nterms).map(|_| (MayaState::new(charge, random_partition(rng, max_weight)), nonzero_rat(rng))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::apply_window_matrix;

    #[test]
    fn deterministic_for_seed() {
        let a: Vec<Rat> = rational_point(&mut rng(7), 5);
        let b: Vec<Rat> = rational_point(&mut rng(7), 5);
        assert_eq!(a, b);
        let s = GrShape::default();
        assert_eq!(random_grpoint(&mut rng(3), &s), random_grpoint(&mut rng(3), &s));
    }

    #[test]
    fn generated_instances_respect_caps() {
        let mut r = rng(11);
        let s = GrShape::default();
        for _ in 0..30 {
            let w = random_grpoint(&mut r, &s);
            assert!(w.weight_bound() <= s.max_weight);
            assert!(w.low_exp() >= -8);
            let a = random_window_matrix(&mut r, 8, (-4, 3), 3);
            assert!(apply_window_matrix(&a, r.gen_range(-2..=2), 8).is_ok());
        }
    }

    #[test]
    fn pole_avoidance() {
        let t1 = MPoly::t(2, 1);
        let p = pole_free_point(&mut rng(1), &t1, POLE_BUDGET).unwrap();
        assert_ne!(t1.evaluate(&p).unwrap(), rat(0, 1));
        assert!(matches!(
            pole_free_point(&mut rng(1), &MPoly::zero(2), 5),
            Err(Error::PoleBudgetExhausted { attempts: 5 })
        ));
    }
}

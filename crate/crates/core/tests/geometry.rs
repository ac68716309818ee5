//! Property tests tying subspace geometry to the bilinear and Lax checks.

mod common;

use proptest::prelude::*;
use rand::Rng;
use tauforge::algebra::ChargedPoly;
use tauforge::fock::{apply_window_matrix, sigma_map, wedge_vector};
use tauforge::grassmannian::{companion_vectors, stable_subspace, tau_fock, tau_of, window_point};
use tauforge::hirota::{fermionic_suite, suite_vars, verify_suite};
use tauforge::psdo::{verify_constraint, LaxOptions};
use tauforge::sample::{random_grpoint, random_window_matrix, rng, GrShape};

fn without(v: &[ChargedPoly], i: usize) -> Vec<ChargedPoly> {
    v.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn companions_satisfy_every_identity(seed in any::<u64>(), k in 1i64..=3) {
        let w = random_grpoint(&mut rng(seed), &GrShape::default());
        let cv = companion_vectors(&w, k).unwrap();
        prop_assert!(fermionic_suite(&cv, 10).unwrap().pass());
        let c = cv.to_polys((cv.max_weight() as usize).max(1)).unwrap();
        let d = suite_vars(&c.tau, &c.rho, &c.sigma, k);
        prop_assert!(verify_suite(&c.tau, &c.rho, &c.sigma, k, d).unwrap().pass());
    }

    #[test]
    fn constraint_needs_every_pair(seed in any::<u64>(), k in 1u32..=2) {
        let w = random_grpoint(&mut rng(seed), &GrShape::default());
        let cv = companion_vectors(&w, k as i64).unwrap();
        let c = cv.to_polys((cv.max_weight() as usize).max(1)).unwrap();
        let opts = LaxOptions { truncation: 4, trials: 6, seed, symbolic_orders: 1 };
        prop_assert!(verify_constraint(&c.tau, &c.rho, &c.sigma, k, &opts).unwrap().pass);
        for i in 0..c.rho.len() {
            let r = verify_constraint(&c.tau, &without(&c.rho, i), &without(&c.sigma, i), k, &opts).unwrap();
            prop_assert!(!r.pass);
        }
    }

    #[test]
    fn enlarging_never_raises_the_index(seed in any::<u64>(), k in 1i64..=3) {
        let w = random_grpoint(&mut rng(seed), &GrShape::default());
        let n = stable_subspace(&w, k).unwrap().n;
        prop_assert!(stable_subspace(&w.enlarge_tail(), k).unwrap().n <= n);
        prop_assert!(n <= w.basis().len() + k as usize);
    }

    #[test]
    fn window_matrices_match_their_points(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_window_matrix(&mut r, 6, (-3, 2), 3);
        let m = r.gen_range(-2..=2);
        let v = apply_window_matrix(&a, m, 6).unwrap();
        let w = window_point(&a, m);
        prop_assert_eq!(w.charge(), m);
        let nv = (v.max_weight() as usize).max(1);
        let f = &sigma_map(&v, nv).unwrap()[0];
        let g = tau_of(&w, nv).unwrap();
        prop_assert!(common::nonzero_ratio(&f.poly, &g.poly).is_some());
    }

    #[test]
    fn wedge_annihilates_its_subspace(seed in any::<u64>()) {
        let w = random_grpoint(&mut rng(seed), &GrShape::default());
        let tau = tau_fock(&w);
        for b in w.basis() {
            prop_assert!(wedge_vector(&b.as_indices(), &tau).is_zero());
        }
        let below = tauforge::grassmannian::LaurentVec::monomial(-w.tail());
        prop_assert!(wedge_vector(&below.as_indices(), &tau).is_zero());
    }
}

//! Acceptance runner: one line per criterion, exit status 1 if any fails.
//! Every identity is exact (tolerance 0); only wall-clock budgets are
//! approximate.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tauforge::algebra::{int, rat, ChargedPoly, MPoly, Rat, RatFun};
use tauforge::fock::{apply_window_matrix, sigma_map, sigma_single, Tensor};
use tauforge::grassmannian::{
    companion_vectors, dtk_decomposition, generate_from_matrix, in_filtration, stable_subspace, tau_of,
    window_point, GrPoint, LaurentVec, RatMatrix,
};
use tauforge::hirota::{fermionic_bilinear_check, kp_residue, needed_vars, suite_vars, verify_suite};
use tauforge::psdo::{dress_from_tau, verify_constraint, LaxOptions, Method};
use tauforge::sample::{random_fock_vector, random_grpoint, random_window_matrix, rng, GrShape};
use tauforge::schur::{elementary_schur, schur_of_partition, Partition};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn kp_zero(tau: &ChargedPoly) -> Result<bool, String> {
    let d = needed_vars(&tau.poly, &tau.poly, 0).max(1);
    Ok(kp_residue(tau, d).map_err(err)?.is_zero())
}

fn criterion_1() -> Outcome {
    let mut cases = 0;
    for w in 0..=6 {
        for lambda in Partition::all_of_weight(w) {
            let s = schur_of_partition(&lambda, 6).map_err(err)?;
            ensure(kp_zero(&ChargedPoly::new(0, s)).map_err(err)?, || format!("S_{lambda} fails"))?;
            cases += 1;
        }
    }
    let n = 3;
    let x = |i: usize| &MPoly::t(2 * n, i) - &MPoly::t(2 * n, n + i);
    let expect = &(&x(1).pow(3).scale(&rat(1, 6)) - &(&x(1) * &x(2))) + &x(3);
    let got = kp_residue(&ChargedPoly::new(0, MPoly::t(n, 1).pow(2)), n).map_err(err)?;
    ensure(got == expect, || format!("kp_residue(t_1^2) = {got}"))?;
    Ok(format!("{cases} Schur polynomials with |λ| ≤ 6 plus the t_1² witness"))
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    for i in 0..50 {
        let a = random_window_matrix(&mut r, 8, (-4, 3), 3);
        let m = r.gen_range(-2..=2);
        let v = apply_window_matrix(&a, m, 8).map_err(err)?;
        let f = fermionic_bilinear_check("KP", &v, &v, &Tensor::zero(), 8).map_err(err)?;
        let nv = (v.max_weight() as usize).max(1);
        let s = &sigma_map(&v, nv).map_err(err)?[0];
        ensure(f.pass && kp_zero(s)?, || format!("perfect wedge #{i} fails"))?;
    }
    let mut found = 0;
    let mut tried = 0;
    while found < 20 {
        tried += 1;
        ensure(tried < 1000, || "could not draw 20 non-decomposable vectors".into())?;
        let m = r.gen_range(-2..=2);
        let v = random_fock_vector(&mut r, m, 4, 3);
        let f = fermionic_bilinear_check("KP", &v, &v, &Tensor::zero(), 8).map_err(err)?;
        if f.pass {
            continue;
        }
        found += 1;
        let nv = (v.max_weight() as usize).max(1);
        let s = ChargedPoly::new(m, sigma_single(&v, m, nv).map_err(err)?);
        ensure(!kp_zero(&s)?, || format!("vector {v:?} fails fermionically only"))?;
    }
    Ok(format!("50 perfect wedges pass both; 20 of {tried} random vectors fail both"))
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let shape = GrShape::default();
    let opts = |seed| LaxOptions {
        truncation: 5,
        trials: 20,
        seed,
        symbolic_orders: 2,
    };
    let mut total_pairs = 0;
    let mut max_n = 0;
    for i in 0..20 {
        let w = random_grpoint(&mut r, &shape);
        for k in 1..=3u32 {
            let n = stable_subspace(&w, k as i64).map_err(err)?.n;
            let cv = companion_vectors(&w, k as i64).map_err(err)?;
            ensure(cv.rho.len() == n, || format!("point #{i}, k={k}: {} pairs for n={n}", cv.rho.len()))?;
            let c = cv.to_polys((cv.max_weight() as usize).max(1)).map_err(err)?;
            let d = suite_vars(&c.tau, &c.rho, &c.sigma, k as i64);
            let rep = verify_suite(&c.tau, &c.rho, &c.sigma, k as i64, d).map_err(err)?;
            ensure(rep.pass(), || format!("point #{i}, k={k}: suite fails with n={n}"))?;
            for drop in 0..n {
                let keep = |v: &[ChargedPoly]| -> Vec<ChargedPoly> {
                    v.iter().enumerate().filter(|(j, _)| *j != drop).map(|(_, p)| p.clone()).collect()
                };
                let (rho, sigma) = (keep(&c.rho), keep(&c.sigma));
                let rep = verify_suite(&c.tau, &rho, &sigma, k as i64, d).map_err(err)?;
                ensure(!rep.pass(), || format!("point #{i}, k={k}: passes without pair {}", drop + 1))?;
            }
            let lax = verify_constraint(&c.tau, &c.rho, &c.sigma, k, &opts(100 * i as u64 + k as u64)).map_err(err)?;
            ensure(lax.pass, || format!("point #{i}, k={k}: constraint fails {:?}", lax.orders))?;
            ensure(
                lax.orders[..2].iter().all(|o| o.method == Method::CrossMultiplication),
                || format!("point #{i}, k={k}: leading orders not confirmed exactly"),
            )?;
            total_pairs += n;
            max_n = max_n.max(n);
        }
    }
    Ok(format!(
        "60 (W,k) instances, {total_pairs} pairs in total, max n = {max_n}; constraint to ∂^-5 at 20 points, ∂^-1 and ∂^-2 cross-multiplied"
    ))
}

fn criterion_4() -> Outcome {
    let w = GrPoint::reduce(&[LaurentVec::monomial(-2)], -1);
    let nv = 4;
    let s2 = elementary_schur(2, nv).map_err(err)?;
    let tau = tau_of(&w, nv).map_err(err)?;
    ensure(tau == ChargedPoly::new(0, s2.clone()), || format!("τ = {}", tau.poly))?;
    ensure(stable_subspace(&w, 1).map_err(err)?.n == 1, || "n ≠ 1".into())?;
    let c = companion_vectors(&w, 1).map_err(err)?.to_polys(nv).map_err(err)?;
    let s11 = schur_of_partition(&Partition::from_parts(&[1, 1]), nv).map_err(err)?;
    ensure(c.sigma == vec![ChargedPoly::new(-2, MPoly::one(nv))], || format!("σ = {:?}", c.sigma))?;
    ensure(
        c.rho.len() == 1 && c.rho[0].charge == 1 && (c.rho[0].poly == s11 || c.rho[0].poly == -&s11),
        || format!("ρ = {:?}", c.rho),
    )?;
    let d = suite_vars(&c.tau, &c.rho, &c.sigma, 1);
    ensure(verify_suite(&c.tau, &c.rho, &c.sigma, 1, d).map_err(err)?.pass(), || "suite fails".into())?;
    let pair = dress_from_tau(&tau, 4, nv).map_err(err)?;
    let a1 = RatFun::new(-&MPoly::t(nv, 1), s2.clone()).map_err(err)?;
    let p_ok = pair.p.max_order() == Some(0)
        && pair.p.terms().count() == 2
        && pair.p.coeff(-1).map_err(err)?.is_some_and(|c| c.equals(&a1));
    ensure(p_ok, || "P ≠ 1 - (t_1/τ)∂^-1".into())?;
    let dt = s2.differentiate(1).map_err(err)?;
    let ddt = dt.differentiate(1).map_err(err)?;
    let log2 = RatFun::new(&(&ddt * &s2) - &(&dt * &dt), &s2 * &s2).map_err(err)?;
    let u1 = pair.l.coeff(-1).map_err(err)?.cloned();
    ensure(u1.is_some_and(|u| u.equals(&log2)), || "u_1 ≠ ∂² log τ".into())?;
    let t1 = MPoly::t(nv, 1);
    for (k, expect) in [(1, t1), (2, MPoly::one(nv))] {
        let dec = dtk_decomposition(&w, k, nv).map_err(err)?;
        ensure(dec.len() == 1 && dec[0].poly == expect, || format!("k={k}: decomposition {dec:?}"))?;
        ensure(kp_zero(&dec[0])?, || format!("k={k}: summand fails KP"))?;
    }
    let sign = if c.rho[0].poly == s11 { "" } else { "-" };
    Ok(format!(
        "τ = t_1²/2 + t_2, n = 1, σ_1 = 1, ρ_1 = {sign}(t_1²/2 - t_2), P and u_1 as expected, ∂τ/∂t_k decompositions [t_1], [1]"
    ))
}

fn unit(m: usize, i: usize) -> Vec<Rat> {
    (1..=m).map(|l| if l == i { int(1) } else { Rat::zero() }).collect()
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    for i in 0..25 {
        let a = random_window_matrix(&mut r, 6, (-3, 2), 3);
        let m = r.gen_range(-2..=2);
        let v = apply_window_matrix(&a, m, 6).map_err(err)?;
        let nv = (v.max_weight() as usize).max(1);
        let f = &sigma_map(&v, nv).map_err(err)?[0];
        let g = tau_of(&window_point(&a, m), nv).map_err(err)?;
        ensure(f.charge == g.charge, || format!("matrix #{i}: charges differ"))?;
        ensure(common::nonzero_ratio(&f.poly, &g.poly).is_some(), || format!("matrix #{i}: {} vs {}", f.poly, g.poly))?;
    }
    let nv = 3;
    let s1 = elementary_schur(1, nv).map_err(err)?;
    let s2 = elementary_schur(2, nv).map_err(err)?;
    let examples = [
        (vec![unit(3, 1)], MPoly::one(nv)),
        (vec![unit(3, 3)], s2.clone()),
        (vec![unit(3, 3), unit(3, 2)], &s2 - &s1.pow(2)),
    ];
    for (cols, expect) in examples {
        let a = RatMatrix::from_columns(&cols).map_err(err)?;
        let g = generate_from_matrix(&a, 1, 1, nv).map_err(err)?;
        ensure(g.tau.poly == expect, || format!("τ = {} for {cols:?}", g.tau.poly))?;
        let n = g.report.violations.len();
        let cv = companion_vectors(&g.point, 1).map_err(err)?;
        let c = cv.to_polys((cv.max_weight() as usize).max(1)).map_err(err)?;
        ensure(c.rho.len() == n, || format!("{} pairs against {n} violations", c.rho.len()))?;
        ensure(common::nonzero_ratio(&c.tau.poly.with_vars(nv).map_err(err)?, &expect).is_some(), || "companion τ differs".into())?;
        let d = suite_vars(&c.tau, &c.rho, &c.sigma, 1);
        ensure(verify_suite(&c.tau, &c.rho, &c.sigma, 1, d).map_err(err)?.pass(), || "suite fails".into())?;
    }
    Ok("25 window matrices agree up to scale; τ ∈ {1, S_2, S_2 - S_1²} reproduced".into())
}

fn criterion_6() -> Outcome {
    let suites: [(&str, fn(&mut ChaCha8Rng) -> bool); 8] = [
        ("Clifford", common::clifford),
        ("oscillator", common::oscillator),
        ("Q-commutation", common::q_commutation),
        ("σ-intertwining", common::intertwining),
        ("vertex", common::vertex),
        ("adjoint", common::adjoint_antihom),
        ("associativity", common::associativity),
        ("split", common::split_sum),
    ];
    for (s, (name, check)) in suites.iter().enumerate() {
        let mut r = rng(600 + s as u64);
        for i in 0..60 {
            ensure(check(&mut r), || format!("{name} fails on instance {i}"))?;
        }
    }
    Ok("8 suites × 60 instances".into())
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let shape = GrShape {
        max_weight: 8,
        max_extra: 3,
        ..Default::default()
    };
    let mut worst = 0;
    for i in 0..100 {
        let w = random_grpoint(&mut r, &shape);
        let k = r.gen_range(1..=3i64);
        let bound = w.basis().len() + k as usize;
        let n = stable_subspace(&w, k).map_err(err)?.n;
        ensure(n <= bound, || format!("point #{i}: n = {n} > {bound}"))?;
        let member: Vec<bool> = (0..=bound + 1).map(|j| in_filtration(&w, j, k)).collect::<Result<_, _>>().map_err(err)?;
        let first = member.iter().position(|&b| b);
        ensure(first == Some(n), || format!("point #{i}: first index {first:?}, n = {n}"))?;
        ensure(member[n..].iter().all(|&b| b), || format!("point #{i}: membership not monotone"))?;
        worst = worst.max(n);
    }
    Ok(format!("100 points, max filtration index {worst}"))
}

fn main() -> ExitCode {
    if let Err(e) = tauforge::init_threads_from_env() {
        eprintln!("{e}");
        return ExitCode::from(2);
    }
    let criteria: [(u32, &str, u64, fn() -> Outcome); 7] = [
        (1, "Schur/KP suite", 60, criterion_1),
        (2, "fermion/boson cross-check", 120, criterion_2),
        (3, "stability ⇔ constrained hierarchy", 600, criterion_3),
        (4, "worked example", 30, criterion_4),
        (5, "determinant generator", 120, criterion_5),
        (6, "algebraic relations", 120, criterion_6),
        (7, "filtration", 60, criterion_7),
    ];
    println!("acceptance: tolerance 0 (exact rational arithmetic)");
    let mut ok = true;
    for (n, name, budget, run) in criteria {
        let start = Instant::now();
        let res = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(budget);
        let pass = res.is_ok() && in_time;
        ok &= pass;
        let detail = match &res {
            Ok(s) => s.clone(),
            Err(s) => s.clone(),
        };
        println!(
            "criterion {n} [{name}]: {} ({detail}; {:.2}s of {budget}s)",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Bosonic bilinear residues and their fermionic counterparts.
//!
//! Every bosonic identity has the shape
//! `Res_z z^off f(t-[z^{-1}]) e^{ξ(t,z)} g(t'+[z^{-1}]) e^{-ξ(t',z)} = rhs(t,t')`
//! with `off = charge(f) - charge(g)` read off from the fermionic pairing
//! `Σ_i ψ⁺_i u ⊗ ψ⁻_{-i} v`:
//!
//! | identity      | f     | g     | off | rhs             |
//! |---------------|-------|-------|-----|-----------------|
//! | KP            | τ     | τ     | 0   | 0               |
//! | constrained-k | τ     | τ     | k   | Σ ρ_j(t)σ_j(t') |
//! | rho_j         | τ     | ρ_j   | -1  | ρ_j(t)τ(t')     |
//! | sigma_j       | σ_j   | τ     | -1  | τ(t)σ_j(t')     |
//!
//! Results live over `t_1..t_D, t'_1..t'_D`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{ChargedPoly, MPoly};
use crate::error::{Error, Result};
use crate::fock::{fermionic_pairing_in, shift_q, FockVector, Tensor};
use crate::grassmannian::CompanionVectors;
use crate::schur::{elementary_schurs, miwa_shift, residue_vars, Shift};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<MPoly>,
}

impl Check {
    fn from_difference(id: String, diff: MPoly) -> Self {
        if diff.is_zero() {
            Check {
                id,
                pass: true,
                witness: None,
            }
        } else {
            Check {
                id,
                pass: false,
                witness: Some(diff),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearReport {
    pub checks: Vec<Check>,
}

impl BilinearReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// Variables needed for an exact residue of `f`, `g` at offset `off`.
pub fn needed_vars(f: &MPoly, g: &MPoly, off: i64) -> usize {
    let wf = f.wdeg().unwrap_or(0);
    let wg = g.wdeg().unwrap_or(0);
    residue_vars(wf, wg, off)
        .max(f.max_var_used())
        .max(g.max_var_used())
}

/// `Res_z z^off f(t-[z^{-1}]) e^{ξ(t,z)} g(t'+[z^{-1}]) e^{-ξ(t',z)}`.
///
/// Computed as `Σ_a A_a(t) B_{-1-off-a}(t')` where `A`, `B` are the two
/// single-variable-set factors, so no doubled-variable kernel is formed.
pub fn bilinear_residue(f: &MPoly, g: &MPoly, off: i64, nvars: usize) -> Result<MPoly> {
    let two = 2 * nvars;
    if f.is_zero() || g.is_zero() {
        return Ok(MPoly::zero(two));
    }
    let need = needed_vars(f, g, off);
    if nvars < need {
        return Err(Error::TooFewVariables {
            needed: need,
            got: nvars,
        });
    }
    let f = f.with_vars(nvars)?;
    let g = g.with_vars(nvars)?;
    let wf = f.wdeg().unwrap() as i64;
    let wg = g.wdeg().unwrap() as i64;
    let hi_a = -1 - off + wg;
    if hi_a < -wf {
        return Ok(MPoly::zero(two));
    }
    let smax = (hi_a + wf).max(0) as usize;
    let table = elementary_schurs(smax, nvars)?;
    let neg_table: Vec<MPoly> = table.iter().map(|s| s.flip_signs(|_| true)).collect();
    let fs = miwa_shift(&f, Shift::Minus, wf as u32)?;
    let gs = miwa_shift(&g, Shift::Plus, wg as u32)?;
    let factor = |shifted: &crate::algebra::ZSeries, tab: &[MPoly], a: i64| -> MPoly {
        let mut acc = MPoly::zero(nvars);
        for (b, c) in shifted.iter() {
            let i = a - b;
            if i >= 0 && (i as usize) < tab.len() {
                acc.add_assign_ref(&(c * &tab[i as usize]));
            }
        }
        acc
    };
    let mut out = MPoly::zero(two);
    for a in -wf..=hi_a {
        let c = -1 - off - a;
        if c < -wg {
            continue;
        }
        let left = factor(&fs, &table, a);
        if left.is_zero() {
            continue;
        }
        let right = factor(&gs, &neg_table, c);
        if right.is_zero() {
            continue;
        }
        out.add_assign_ref(&(&left.embed(two, 0)? * &right.embed(two, nvars)?));
    }
    Ok(out)
}

/// `p(t) q(t')` over the doubled variables.
pub fn outer(p: &MPoly, q: &MPoly, nvars: usize) -> Result<MPoly> {
    Ok(&p.embed(2 * nvars, 0)? * &q.embed(2 * nvars, nvars)?)
}

pub fn kp_residue(tau: &ChargedPoly, nvars: usize) -> Result<MPoly> {
    bilinear_residue(&tau.poly, &tau.poly, 0, nvars)
}

fn expect_charge(what: String, p: &ChargedPoly, expected: i64) -> Result<()> {
    if p.charge != expected {
        return Err(Error::ChargeMismatch {
            what,
            expected,
            got: p.charge,
        });
    }
    Ok(())
}

pub fn constrained_residue(
    tau: &ChargedPoly,
    k: i64,
    rho: &[ChargedPoly],
    sigma: &[ChargedPoly],
    nvars: usize,
) -> Result<Check> {
    if rho.len() != sigma.len() {
        return Err(Error::InvalidInput(format!(
            "{} rho against {} sigma",
            rho.len(),
            sigma.len()
        )));
    }
    let m = tau.charge;
    let mut rhs = MPoly::zero(2 * nvars);
    for (j, (r, s)) in rho.iter().zip(sigma).enumerate() {
        expect_charge(format!("rho_{}", j + 1), r, m + 1)?;
        expect_charge(format!("sigma_{}", j + 1), s, m - k - 1)?;
        rhs.add_assign_ref(&outer(&r.poly, &s.poly, nvars)?);
    }
    let lhs = bilinear_residue(&tau.poly, &tau.poly, k, nvars)?;
    Ok(Check::from_difference("constrained-k".into(), &lhs - &rhs))
}

/// Residue identity for an eigenfunction numerator `ρ` (charge `m+1`).
pub fn rho_identity(tau: &ChargedPoly, rho: &ChargedPoly, j: usize, nvars: usize) -> Result<Check> {
    expect_charge(format!("rho_{j}"), rho, tau.charge + 1)?;
    let lhs = bilinear_residue(&tau.poly, &rho.poly, -1, nvars)?;
    let rhs = outer(&rho.poly, &tau.poly, nvars)?;
    Ok(Check::from_difference(format!("rho_{j}"), &lhs - &rhs))
}

/// Residue identity for an adjoint eigenfunction numerator `σ` (charge
/// `m-k-1`).
pub fn sigma_identity(
    tau: &ChargedPoly,
    sigma: &ChargedPoly,
    k: i64,
    j: usize,
    nvars: usize,
) -> Result<Check> {
    expect_charge(format!("sigma_{j}"), sigma, tau.charge - k - 1)?;
    let lhs = bilinear_residue(&sigma.poly, &tau.poly, -1, nvars)?;
    let rhs = outer(&tau.poly, &sigma.poly, nvars)?;
    Ok(Check::from_difference(format!("sigma_{j}"), &lhs - &rhs))
}

/// Both eigenfunction families for a list of pairs.
pub fn eigenfunction_identities(
    tau: &ChargedPoly,
    rho: &[ChargedPoly],
    sigma: &[ChargedPoly],
    k: i64,
    nvars: usize,
) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (j, r) in rho.iter().enumerate() {
        out.push(rho_identity(tau, r, j + 1, nvars)?);
    }
    for (j, s) in sigma.iter().enumerate() {
        out.push(sigma_identity(tau, s, k, j + 1, nvars)?);
    }
    Ok(out)
}

/// Variables sufficient for every residue in [`verify_suite`].
pub fn suite_vars(tau: &ChargedPoly, rho: &[ChargedPoly], sigma: &[ChargedPoly], k: i64) -> usize {
    let t = &tau.poly;
    let mut d = needed_vars(t, t, 0).max(needed_vars(t, t, k));
    for r in rho {
        d = d.max(needed_vars(t, &r.poly, -1));
    }
    for s in sigma {
        d = d.max(needed_vars(&s.poly, t, -1));
    }
    d.max(1)
}

enum Job<'a> {
    Kp,
    Constrained,
    Rho(usize, &'a ChargedPoly),
    Sigma(usize, &'a ChargedPoly),
}

/// KP, constrained-k and both eigenfunction families, in that order.
pub fn verify_suite(
    tau: &ChargedPoly,
    rho: &[ChargedPoly],
    sigma: &[ChargedPoly],
    k: i64,
    nvars: usize,
) -> Result<BilinearReport> {
    if tau.is_zero() {
        return Err(Error::ZeroTau);
    }
    if rho.len() != sigma.len() {
        return Err(Error::InvalidInput(format!(
            "{} rho against {} sigma",
            rho.len(),
            sigma.len()
        )));
    }
    for (j, r) in rho.iter().enumerate() {
        expect_charge(format!("rho_{}", j + 1), r, tau.charge + 1)?;
    }
    for (j, s) in sigma.iter().enumerate() {
        expect_charge(format!("sigma_{}", j + 1), s, tau.charge - k - 1)?;
    }
    let mut jobs = vec![Job::Kp, Job::Constrained];
    jobs.extend(rho.iter().enumerate().map(|(j, r)| Job::Rho(j + 1, r)));
    jobs.extend(sigma.iter().enumerate().map(|(j, s)| Job::Sigma(j + 1, s)));
    let checks = jobs
        .par_iter()
        .map(|job| match job {
            Job::Kp => Ok(Check::from_difference("KP".into(), kp_residue(tau, nvars)?)),
            Job::Constrained => constrained_residue(tau, k, rho, sigma, nvars),
            Job::Rho(j, r) => rho_identity(tau, r, *j, nvars),
            Job::Sigma(j, s) => sigma_identity(tau, s, k, *j, nvars),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BilinearReport { checks })
}

/// σ⊗σ image of a tensor summed over charge pairs, or `None` if zero.
fn tensor_witness(t: &Tensor) -> Result<Option<MPoly>> {
    if t.is_zero() {
        return Ok(None);
    }
    let w = t
        .iter()
        .map(|((a, b), _)| a.partition.weight().max(b.partition.weight()))
        .max()
        .unwrap_or(0)
        .max(1) as usize;
    let img = t.sigma_image(w)?;
    let mut acc = MPoly::zero(2 * w);
    for p in img.values() {
        acc.add_assign_ref(p);
    }
    Ok(Some(acc))
}

/// `Σ_i ψ⁺_i u ⊗ ψ⁻_{-i} v == target`.
pub fn fermionic_bilinear_check(
    id: &str,
    u: &FockVector,
    v: &FockVector,
    target: &Tensor,
    window: i64,
) -> Result<Check> {
    let diff = fermionic_pairing_in(u, v, window)?.sub(target);
    let pass = diff.is_zero();
    Ok(Check {
        id: id.into(),
        pass,
        witness: if pass { None } else { tensor_witness(&diff)? },
    })
}

/// Fermionic forms of the four identity families for wedge-space companions.
pub fn fermionic_suite(c: &CompanionVectors, window: i64) -> Result<BilinearReport> {
    let qk = shift_q(-c.k, &c.tau);
    let mut checks = vec![
        fermionic_bilinear_check("fermionic-KP", &c.tau, &c.tau, &Tensor::zero(), window)?,
        fermionic_bilinear_check(
            "fermionic-constrained-k",
            &c.tau,
            &qk,
            &Tensor::from_pairs(c.rho.iter().zip(&c.sigma)),
            window,
        )?,
    ];
    for (j, r) in c.rho.iter().enumerate() {
        checks.push(fermionic_bilinear_check(
            &format!("fermionic-rho_{}", j + 1),
            &c.tau,
            r,
            &Tensor::from_pairs([(r, &c.tau)]),
            window,
        )?);
    }
    for (j, s) in c.sigma.iter().enumerate() {
        checks.push(fermionic_bilinear_check(
            &format!("fermionic-sigma_{}", j + 1),
            s,
            &qk,
            &Tensor::from_pairs([(&qk, s)]),
            window,
        )?);
    }
    Ok(BilinearReport { checks })
}

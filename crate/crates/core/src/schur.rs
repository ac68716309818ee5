//! Elementary Schur functions, Schur functions of partitions, Miwa shifts
//! and the exponential kernels entering the bilinear residues.
//!
//! The elementary Schur functions are the coefficients of
//! `exp(Σ t_i z^i) = Σ S_i(t) z^i`; they satisfy `n·S_n = Σ_j j·t_j·S_{n-j}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::linalg::det_mpoly;
use crate::algebra::rat::{binomial, int, rat};
use crate::algebra::{MPoly, ZSeries};
use crate::error::{Error, Result};

/// Weakly decreasing list of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!("parts not non-increasing: {parts:?}")));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidInput(format!("zero part in {parts:?}")));
        }
        Ok(Partition(parts))
    }

    /// Builds from any list, dropping zeros; panics on an unsorted list.
    pub fn from_parts(parts: &[u32]) -> Self {
        Self::new(parts.iter().copied().filter(|&p| p > 0).collect()).expect("valid partition")
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `λ_s` with `λ_s = 0` past the end (1-based).
    pub fn part(&self, s: usize) -> u32 {
        self.0.get(s - 1).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let first = self.0.first().copied().unwrap_or(0);
        Partition(
            (1..=first)
                .map(|j| self.0.iter().filter(|&&p| p >= j).count() as u32)
                .collect(),
        )
    }

    /// All partitions of `n`, in reverse lexicographic order.
    pub fn all_of_weight(n: u32) -> Vec<Partition> {
        fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if n == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=n.min(max)).rev() {
                cur.push(p);
                rec(n - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

/// `S_0..=S_max` in `nvars` variables via the power-sum recurrence.
/// Requires `nvars >= max` so every `S_i` is exact.
pub fn elementary_schurs(max: usize, nvars: usize) -> Result<Vec<MPoly>> {
    if nvars < max.max(1) {
        return Err(Error::TooFewVariables {
            needed: max.max(1),
            got: nvars,
        });
    }
    let mut s = vec![MPoly::one(nvars)];
    for n in 1..=max {
        let mut acc = MPoly::zero(nvars);
        for j in 1..=n {
            let tj = MPoly::t(nvars, j).scale(&int(j as i64));
            acc.add_assign_ref(&(&tj * &s[n - j]));
        }
        s.push(acc.scale(&rat(1, n as i64)));
    }
    Ok(s)
}

/// `S_i(t_1..t_D)`; zero for negative `i`.
pub fn elementary_schur(i: i64, nvars: usize) -> Result<MPoly> {
    if nvars == 0 {
        return Err(Error::TooFewVariables { needed: 1, got: 0 });
    }
    if i < 0 {
        return Ok(MPoly::zero(nvars));
    }
    let mut all = elementary_schurs(i as usize, nvars)?;
    Ok(all.pop().unwrap())
}

/// Jacobi–Trudi determinant `det(S_{λ_i - i + j})` given precomputed `S_0..`.
pub fn schur_from_table(lambda: &Partition, table: &[MPoly], nvars: usize) -> MPoly {
    let l = lambda.len();
    let entry = |k: i64| -> MPoly {
        if k < 0 {
            MPoly::zero(nvars)
        } else {
            table[k as usize].clone()
        }
    };
    let m: Vec<Vec<MPoly>> = (1..=l)
        .map(|i| {
            (1..=l)
                .map(|j| entry(lambda.part(i) as i64 - i as i64 + j as i64))
                .collect()
        })
        .collect();
    det_mpoly(&m, nvars)
}

pub fn schur_of_partition(lambda: &Partition, nvars: usize) -> Result<MPoly> {
    let w = lambda.weight() as usize;
    if nvars < w.max(1) {
        return Err(Error::TooFewVariables {
            needed: w.max(1),
            got: nvars,
        });
    }
    let top = lambda.part(1) as usize + lambda.len();
    let table = elementary_schurs(top.min(nvars).max(w), nvars.max(top))?;
    let s = schur_from_table(lambda, &table, nvars.max(top));
    s.with_vars(nvars)
}

/// Direction of a Miwa shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    /// `t - [z^-1]`
    Minus,
    /// `t + [z^-1]`
    Plus,
}

/// `p(t ∓ [z^-1])` with `[z^-1] = (z^-1, z^-2/2, z^-3/3, …)`, as an exact
/// Laurent polynomial in `z^-1`.
pub fn miwa_shift(p: &MPoly, shift: Shift, z_window: u32) -> Result<ZSeries> {
    let n = p.nvars();
    let w = p.wdeg().unwrap_or(0);
    if z_window < w {
        return Err(Error::InvalidInput(format!(
            "z window {z_window} below weighted degree {w}"
        )));
    }
    let sign = match shift {
        Shift::Minus => -1,
        Shift::Plus => 1,
    };
    // Coefficients of w^a, w = z^-1, index a = 0..=w.
    let mut out: Vec<MPoly> = vec![MPoly::zero(n); w as usize + 1];
    // Cache of (t_i + sign·w^i/i)^e as sparse lists of (w-power, poly).
    let mut cache: rustc_hash::FxHashMap<(usize, u16), Vec<(usize, MPoly)>> = Default::default();
    let mut power = |i: usize, e: u16| -> Vec<(usize, MPoly)> {
        cache
            .entry((i, e))
            .or_insert_with(|| {
                let step = rat(sign, i as i64);
                (0..=e)
                    .map(|a| {
                        let c = binomial(e as i64, a as u32) * num_traits::pow(step.clone(), a as usize);
                        let mut exps = vec![0u16; n];
                        exps[i - 1] = e - a;
                        (i * a as usize, MPoly::monomial(n, &exps, c).unwrap())
                    })
                    .collect()
            })
            .clone()
    };
    for (m, c) in p.terms() {
        let mut acc: Vec<(usize, MPoly)> = vec![(0, MPoly::constant(n, c.clone()))];
        for (idx, &e) in m.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let f = power(idx + 1, e);
            let mut next: Vec<(usize, MPoly)> = Vec::with_capacity(acc.len() * f.len());
            for (pa, a) in &acc {
                for (pb, b) in &f {
                    next.push((pa + pb, a * b));
                }
            }
            acc = next;
        }
        for (pw, q) in acc {
            out[pw].add_assign_ref(&q);
        }
    }
    out.reverse();
    ZSeries::laurent(n, -(w as i64), out)
}

/// `Σ_{i=0}^{order} S_i(±t) z^i`, exact through `z^order`.
pub fn exp_xi(nvars: usize, order: usize, shift: Shift) -> Result<ZSeries> {
    let table = elementary_schurs(order, nvars.max(order).max(1))?;
    let coeffs: Vec<MPoly> = table
        .into_iter()
        .map(|s| {
            let s = s.with_vars(nvars).expect("S_i uses t_1..t_i only");
            match shift {
                Shift::Plus => s,
                Shift::Minus => s.flip_signs(|_| true),
            }
        })
        .collect();
    ZSeries::truncated(nvars, 0, coeffs, order as i64)
}

/// `e^{ξ(t,z)} e^{-ξ(t',z)} = Σ_i S_i(t - t') z^i` through `z^order`, over
/// the doubled variables `t_1..t_D, t'_1..t'_D`.
pub fn xi_kernel(nvars: usize, order: usize) -> Result<ZSeries> {
    if order > nvars {
        return Err(Error::TooFewVariables {
            needed: order,
            got: nvars,
        });
    }
    let table = elementary_schurs(order, nvars.max(1))?;
    let two = 2 * nvars;
    let left: Vec<MPoly> = table.iter().map(|s| s.embed(two, 0).unwrap()).collect();
    let right: Vec<MPoly> = table
        .iter()
        .map(|s| s.flip_signs(|_| true).embed(two, nvars).unwrap())
        .collect();
    let coeffs: Vec<MPoly> = (0..=order)
        .map(|i| {
            let mut acc = MPoly::zero(two);
            for a in 0..=i {
                acc.add_assign_ref(&(&left[a] * &right[i - a]));
            }
            acc
        })
        .collect();
    ZSeries::truncated(two, 0, coeffs, order as i64)
}

/// Variables needed so that the residue
/// `Res z^offset f(t-[z^-1]) g(t'+[z^-1]) e^{ξ(t,z)-ξ(t',z)}` is exact:
/// the kernel is read up to order `wdeg f + wdeg g - 1 - offset`.
pub fn residue_vars(wf: u32, wg: u32, offset: i64) -> usize {
    (wf as i64 + wg as i64 - 1 - offset).max(1) as usize
}

/// `p(t_1, -t_2, t_3, -t_4, …)`.
pub fn alternate_signs(p: &MPoly) -> MPoly {
    p.flip_signs(|i| i % 2 == 0)
}

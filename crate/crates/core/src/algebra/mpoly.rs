//! Sparse multivariate polynomials over exact rationals.
//!
//! Variables are the times `t_1..t_D`, addressed 1-based in the public API.
//! A doubled space `(t, t')` is an ordinary `MPoly` with `2D` variables laid
//! out as `t_1..t_D, t'_1..t'_D`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;

use super::rat::{format_rat_short, int, Rat};
use crate::error::{Error, Result};

/// Exponent vector, one entry per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn from_exps(exps: Vec<u16>) -> Self {
        Monomial(exps)
    }

    pub fn exps(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// `Σ i·e_i` with 1-based variable weights.
    pub fn weighted_degree(&self) -> u32 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &e)| (i as u32 + 1) * e as u32)
            .sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Graded lexicographic comparison: total degree first, then exponents
    /// from `t_1` upward.
    pub fn grlex_cmp(&self, other: &Monomial) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MPoly {
    nvars: usize,
    terms: FxHashMap<Monomial, Rat>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: FxHashMap::default(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    /// The time variable `t_i`, 1-based.
    pub fn t(nvars: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= nvars, "t_{i} outside 1..={nvars}");
        let mut e = vec![0; nvars];
        e[i - 1] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial(e), Rat::one());
        p
    }

    pub fn monomial(nvars: usize, exps: &[u16], c: Rat) -> Result<Self> {
        if exps.len() != nvars {
            return Err(Error::VarCountMismatch {
                left: nvars,
                right: exps.len(),
            });
        }
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial(exps.to_vec()), c);
        }
        Ok(p)
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u16>, Rat)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::VarCountMismatch {
                    left: nvars,
                    right: e.len(),
                });
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_term(&self) -> Rat {
        self.terms
            .get(&Monomial::one(self.nvars))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn coeff(&self, exps: &[u16]) -> Rat {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    /// Terms in descending graded lexicographic order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rat)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.grlex_cmp(a.0));
        v
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().max_by(|a, b| a.0.grlex_cmp(b.0))
    }

    /// Largest weighted degree `Σ i·e_i` over the terms; `None` for zero.
    pub fn wdeg(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::weighted_degree).max()
    }

    /// Largest 1-based variable index that actually occurs.
    pub fn max_var_used(&self) -> usize {
        self.terms
            .keys()
            .filter_map(|m| m.0.iter().rposition(|&e| e > 0).map(|i| i + 1))
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    fn check_vars(&self, other: &MPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VarCountMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MPoly) -> Result<MPoly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MPoly) -> Result<MPoly> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &MPoly) -> Result<MPoly> {
        self.check_vars(other)?;
        let mut acc: FxHashMap<Monomial, Rat> = FxHashMap::default();
        acc.reserve(self.terms.len().saturating_mul(other.terms.len()).min(1 << 20));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(x) => *x += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(MPoly {
            nvars: self.nvars,
            terms: acc,
        })
    }

    pub fn add_assign_ref(&mut self, other: &MPoly) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &MPoly, c: &Rat) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// Scalar division; errors on a zero divisor.
    pub fn div_scalar(&self, c: &Rat) -> Result<MPoly> {
        if c.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.scale(&(Rat::one() / c)))
    }

    pub fn pow(&self, n: u32) -> MPoly {
        let mut acc = MPoly::one(self.nvars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to `t_i` (1-based).
    pub fn differentiate(&self, i: usize) -> Result<MPoly> {
        if i == 0 || i > self.nvars {
            return Err(Error::VariableOutOfRange {
                index: i,
                vars: self.nvars,
            });
        }
        let k = i - 1;
        let mut out = MPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[k];
            if e == 0 {
                continue;
            }
            let mut nm = m.clone();
            nm.0[k] -= 1;
            out.terms.insert(nm, c * int(e as i64));
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Rat]) -> Result<Rat> {
        if point.len() != self.nvars {
            return Err(Error::VarCountMismatch {
                left: self.nvars,
                right: point.len(),
            });
        }
        let mut powers: Vec<Vec<Rat>> = vec![vec![Rat::one()]; self.nvars];
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = &mut powers[i];
                while pw.len() <= e as usize {
                    let next = pw.last().unwrap() * &point[i];
                    pw.push(next);
                }
                term *= &pw[e as usize];
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Re-express in `nvars` variables with variable `i` moved to `i + offset`.
    /// Errors if a used variable would fall outside the new range.
    pub fn embed(&self, nvars: usize, offset: usize) -> Result<MPoly> {
        let used = self.max_var_used();
        if used + offset > nvars {
            return Err(Error::TooFewVariables {
                needed: used + offset,
                got: nvars,
            });
        }
        let mut out = MPoly::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; nvars];
            for (i, &x) in m.0.iter().enumerate() {
                if x > 0 {
                    e[i + offset] = x;
                }
            }
            out.terms.insert(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Same polynomial in a different number of variables.
    pub fn with_vars(&self, nvars: usize) -> Result<MPoly> {
        if nvars == self.nvars {
            return Ok(self.clone());
        }
        self.embed(nvars, 0)
    }

    /// Substitute `t_i ↦ sign_i · t_i` for every variable.
    pub fn flip_signs(&self, sign_of: impl Fn(usize) -> bool) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let odd: u32 = m
                .0
                .iter()
                .enumerate()
                .filter(|(i, _)| sign_of(i + 1))
                .map(|(_, &e)| e as u32)
                .sum();
            let c = if odd % 2 == 1 { -c.clone() } else { c.clone() };
            out.terms.insert(m.clone(), c);
        }
        out
    }

    /// Exact polynomial division: `Some(q)` with `self = q · divisor`, or
    /// `None` when the divisor does not divide.
    pub fn try_div(&self, divisor: &MPoly) -> Option<MPoly> {
        if self.nvars != divisor.nvars || divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(MPoly::zero(self.nvars));
        }
        let (lm, lc) = divisor.leading_term()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = MPoly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading_term() {
            if !lm.divides(rm) {
                return None;
            }
            let qm = rm.div(&lm);
            let qc = rc / &lc;
            let mut step = MPoly::zero(self.nvars);
            step.terms.insert(qm, qc);
            rem = &rem - &(&step * divisor);
            quot.add_assign_ref(&step);
        }
        Some(quot)
    }

    /// Coefficient of the grlex-leading term, or zero.
    pub fn leading_coeff(&self) -> Rat {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    }

    /// Componentwise minimum exponent over all terms.
    pub fn monomial_gcd(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one(self.nvars);
        };
        let mut g = first.0.clone();
        for m in it {
            for (a, b) in g.iter_mut().zip(&m.0) {
                *a = (*a).min(*b);
            }
        }
        Monomial(g)
    }

    pub fn div_monomial(&self, m: &Monomial) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.div(m), c.clone()))
                .collect(),
        }
    }

    /// Render with custom variable names.
    pub fn display_with(&self, name: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(name(i + 1)),
                    _ => factors.push(format!("{}^{}", name(i + 1), e)),
                }
            }
            if factors.is_empty() {
                out.push_str(&format_rat_short(&a));
            } else {
                if !a.is_one() {
                    out.push_str(&format_rat_short(&a));
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&|i| format!("t{i}")))
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        self.try_add(rhs).expect("variable count mismatch")
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self.try_sub(rhs).expect("variable count mismatch")
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        self.try_mul(rhs).expect("variable count mismatch")
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&-Rat::one())
    }
}

impl Add for MPoly {
    type Output = MPoly;
    fn add(self, rhs: MPoly) -> MPoly {
        &self + &rhs
    }
}

impl Sub for MPoly {
    type Output = MPoly;
    fn sub(self, rhs: MPoly) -> MPoly {
        &self - &rhs
    }
}

impl Mul for MPoly {
    type Output = MPoly;
    fn mul(self, rhs: MPoly) -> MPoly {
        &self * &rhs
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

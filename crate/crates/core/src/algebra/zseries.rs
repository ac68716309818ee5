//! Laurent series in a formal variable `z` with polynomial coefficients.
//!
//! Every series carries the interval of orders on which its coefficients are
//! known exactly. Coefficients outside the stored block but inside the exact
//! interval are zero; coefficients outside the interval are unknown and any
//! attempt to read them is an error.

use super::mpoly::MPoly;
use super::rat::Rat;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ZSeries {
    nvars: usize,
    min_order: i64,
    coeffs: Vec<MPoly>,
    /// Lowest exactly known order; `None` means exact all the way down.
    exact_lo: Option<i64>,
    /// Highest exactly known order; `None` means exact all the way up.
    exact_hi: Option<i64>,
}

impl ZSeries {
    pub fn zero(nvars: usize) -> Self {
        ZSeries {
            nvars,
            min_order: 0,
            coeffs: Vec::new(),
            exact_lo: None,
            exact_hi: None,
        }
    }

    /// A Laurent polynomial: exact at every order.
    pub fn laurent(nvars: usize, min_order: i64, coeffs: Vec<MPoly>) -> Result<Self> {
        Self::with_range(nvars, min_order, coeffs, None, None)
    }

    /// A power series known exactly up to and including `exact_hi`.
    pub fn truncated(nvars: usize, min_order: i64, coeffs: Vec<MPoly>, exact_hi: i64) -> Result<Self> {
        Self::with_range(nvars, min_order, coeffs, None, Some(exact_hi))
    }

    pub fn with_range(
        nvars: usize,
        min_order: i64,
        coeffs: Vec<MPoly>,
        exact_lo: Option<i64>,
        exact_hi: Option<i64>,
    ) -> Result<Self> {
        for c in &coeffs {
            if c.nvars() != nvars {
                return Err(Error::VarCountMismatch {
                    left: nvars,
                    right: c.nvars(),
                });
            }
        }
        let mut s = ZSeries {
            nvars,
            min_order,
            coeffs,
            exact_lo,
            exact_hi,
        };
        s.trim();
        Ok(s)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn exact_range(&self) -> (Option<i64>, Option<i64>) {
        (self.exact_lo, self.exact_hi)
    }

    fn in_range(&self, order: i64) -> bool {
        self.exact_lo.is_none_or(|lo| order >= lo) && self.exact_hi.is_none_or(|hi| order <= hi)
    }

    fn trim(&mut self) {
        // Drop stored coefficients outside the exact interval and zero padding.
        if let Some(hi) = self.exact_hi {
            let keep = (hi - self.min_order + 1).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        if let Some(lo) = self.exact_lo {
            if lo > self.min_order {
                let drop = ((lo - self.min_order) as usize).min(self.coeffs.len());
                self.coeffs.drain(..drop);
                self.min_order = lo;
            }
        }
        while self.coeffs.last().is_some_and(MPoly::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_order += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.min_order = 0;
        }
    }

    /// Exact coefficient of `z^order`.
    pub fn coeff(&self, order: i64) -> Result<MPoly> {
        if !self.in_range(order) {
            return Err(Error::InexactOrder {
                order,
                lo: fmt_bound(self.exact_lo, "-inf"),
                hi: fmt_bound(self.exact_hi, "+inf"),
            });
        }
        Ok(self.stored(order).cloned().unwrap_or_else(|| MPoly::zero(self.nvars)))
    }

    fn stored(&self, order: i64) -> Option<&MPoly> {
        let i = order - self.min_order;
        if i < 0 {
            return None;
        }
        self.coeffs.get(i as usize)
    }

    pub fn residue(&self) -> Result<MPoly> {
        self.coeff(-1)
    }

    /// Lowest order with a stored nonzero coefficient (`None` for zero).
    pub fn lowest_order(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.min_order)
        }
    }

    pub fn highest_order(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.min_order + self.coeffs.len() as i64 - 1)
        }
    }

    /// Stored block as `(order, coefficient)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &MPoly)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.min_order + i as i64, c))
    }

    fn check(&self, other: &ZSeries) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VarCountMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    fn combine(&self, other: &ZSeries, sign: &Rat) -> Result<ZSeries> {
        self.check(other)?;
        let lo = max_opt(self.exact_lo, other.exact_lo);
        let hi = min_opt(self.exact_hi, other.exact_hi);
        if let (Some(l), Some(h)) = (lo, hi) {
            if l > h {
                return Err(Error::EmptyValidRange);
            }
        }
        let (a_lo, b_lo) = (self.lowest_order(), other.lowest_order());
        let start = match (a_lo, b_lo) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => 0,
        };
        let end = self
            .highest_order()
            .into_iter()
            .chain(other.highest_order())
            .max()
            .unwrap_or(-1);
        let mut coeffs = Vec::new();
        for o in start..=end {
            let mut c = self.stored(o).cloned().unwrap_or_else(|| MPoly::zero(self.nvars));
            if let Some(b) = other.stored(o) {
                c.add_scaled(b, sign);
            }
            coeffs.push(c);
        }
        ZSeries::with_range(self.nvars, start, coeffs, lo, hi)
    }

    pub fn try_add(&self, other: &ZSeries) -> Result<ZSeries> {
        self.combine(other, &Rat::from_integer(1.into()))
    }

    pub fn try_sub(&self, other: &ZSeries) -> Result<ZSeries> {
        self.combine(other, &Rat::from_integer((-1).into()))
    }

    pub fn scale(&self, c: &Rat) -> ZSeries {
        let mut s = self.clone();
        for x in &mut s.coeffs {
            *x = x.scale(c);
        }
        s.trim();
        s
    }

    /// Multiply every coefficient by a polynomial.
    pub fn mul_poly(&self, p: &MPoly) -> Result<ZSeries> {
        let mut s = self.clone();
        for x in &mut s.coeffs {
            *x = x.try_mul(p)?;
        }
        s.trim();
        Ok(s)
    }

    /// Multiply by `z^n`.
    pub fn shift(&self, n: i64) -> ZSeries {
        let mut s = self.clone();
        s.min_order += n;
        s.exact_lo = s.exact_lo.map(|l| l + n);
        s.exact_hi = s.exact_hi.map(|h| h + n);
        if s.coeffs.is_empty() {
            s.min_order = 0;
        }
        s
    }

    /// Exact range of a product, derived from the unknown tails of each factor.
    fn product_range(&self, other: &ZSeries) -> (Option<i64>, Option<i64>) {
        // Unknown high tail of `a` times the lowest term of `b` starts right
        // above `hi_a + low(b)`. A factor with an unknown low tail has no
        // lowest term, so any unknown high tail of the other poisons everything.
        let hi_part = |a: &ZSeries, b: &ZSeries| -> Option<Option<i64>> {
            match a.exact_hi {
                None => Some(None),
                Some(h) => match (b.exact_lo, b.lowest_order()) {
                    (None, Some(l)) => Some(Some(h + l)),
                    (None, None) => Some(None),
                    (Some(_), _) => None,
                },
            }
        };
        let lo_part = |a: &ZSeries, b: &ZSeries| -> Option<Option<i64>> {
            match a.exact_lo {
                None => Some(None),
                Some(l) => match (b.exact_hi, b.highest_order()) {
                    (None, Some(h)) => Some(Some(l + h)),
                    (None, None) => Some(None),
                    (Some(_), _) => None,
                },
            }
        };
        let hi = match (hi_part(self, other), hi_part(other, self)) {
            (Some(x), Some(y)) => min_opt(x, y),
            _ => Some(i64::MIN / 4),
        };
        let lo = match (lo_part(self, other), lo_part(other, self)) {
            (Some(x), Some(y)) => max_opt(x, y),
            _ => Some(i64::MAX / 4),
        };
        (lo, hi)
    }

    /// Product restricted to orders inside `window` (inclusive); the result's
    /// exact range is intersected with the window.
    pub fn mul_window(&self, other: &ZSeries, window: Option<(i64, i64)>) -> Result<ZSeries> {
        self.check(other)?;
        let (mut lo, mut hi) = self.product_range(other);
        if let Some((wl, wh)) = window {
            lo = max_opt(lo, Some(wl));
            hi = min_opt(hi, Some(wh));
        }
        if let (Some(l), Some(h)) = (lo, hi) {
            if l > h {
                return Err(Error::EmptyValidRange);
            }
        }
        let (Some(a0), Some(b0)) = (self.lowest_order(), other.lowest_order()) else {
            return ZSeries::with_range(self.nvars, 0, Vec::new(), lo, hi);
        };
        let a1 = self.highest_order().unwrap();
        let b1 = other.highest_order().unwrap();
        let start = max_opt(Some(a0 + b0), lo).unwrap();
        let end = min_opt(Some(a1 + b1), hi).unwrap();
        let mut coeffs = Vec::new();
        for o in start..=end {
            coeffs.push(self.product_coeff(other, o));
        }
        ZSeries::with_range(self.nvars, start.min(end.max(start)), coeffs, lo, hi)
    }

    pub fn try_mul(&self, other: &ZSeries) -> Result<ZSeries> {
        self.mul_window(other, None)
    }

    fn product_coeff(&self, other: &ZSeries, order: i64) -> MPoly {
        let mut acc = MPoly::zero(self.nvars);
        for (i, a) in self.iter() {
            if let Some(b) = other.stored(order - i) {
                acc.add_assign_ref(&(a * b));
            }
        }
        acc
    }

    /// A single exact coefficient of `self · other`, without forming the
    /// whole product.
    pub fn coeff_of_product(&self, other: &ZSeries, order: i64) -> Result<MPoly> {
        self.check(other)?;
        let (lo, hi) = self.product_range(other);
        if lo.is_some_and(|l| order < l) || hi.is_some_and(|h| order > h) {
            return Err(Error::InexactOrder {
                order,
                lo: fmt_bound(lo, "-inf"),
                hi: fmt_bound(hi, "+inf"),
            });
        }
        Ok(self.product_coeff(other, order))
    }

    /// Apply a map to each coefficient (e.g. change of variable space).
    pub fn map_coeffs(&self, nvars: usize, f: impl Fn(&MPoly) -> Result<MPoly>) -> Result<ZSeries> {
        let coeffs = self.coeffs.iter().map(f).collect::<Result<Vec<_>>>()?;
        ZSeries::with_range(nvars, self.min_order, coeffs, self.exact_lo, self.exact_hi)
    }
}

fn fmt_bound(b: Option<i64>, inf: &str) -> String {
    b.map(|x| x.to_string()).unwrap_or_else(|| inf.to_string())
}

fn max_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{int, rat};
    use proptest::prelude::*;

    fn c(n: i64) -> MPoly {
        MPoly::constant(1, int(n))
    }

    #[test]
    fn laurent_difference_of_squares() {
        // (z^-1 + z)(z^-1 - z) = z^-2 - z^2
        let a = ZSeries::laurent(1, -1, vec![c(1), c(0), c(1)]).unwrap();
        let b = ZSeries::laurent(1, -1, vec![c(1), c(0), c(-1)]).unwrap();
        let p = a.try_mul(&b).unwrap();
        assert_eq!(p.coeff(-2).unwrap(), c(1));
        assert_eq!(p.coeff(0).unwrap(), c(0));
        assert_eq!(p.coeff(2).unwrap(), c(-1));
        assert_eq!(p.coeff(7).unwrap(), c(0));
        assert_eq!(p.lowest_order(), Some(-2));
        assert_eq!(p.highest_order(), Some(2));
    }

    #[test]
    fn truncation_shrinks_exact_range() {
        // (1 + z + z^2 + O(z^3)) * (z^-1 + 1): exact up to z^1 only.
        let a = ZSeries::truncated(1, 0, vec![c(1), c(1), c(1)], 2).unwrap();
        let b = ZSeries::laurent(1, -1, vec![c(1), c(1)]).unwrap();
        let p = a.try_mul(&b).unwrap();
        assert_eq!(p.exact_range(), (None, Some(1)));
        assert_eq!(p.residue().unwrap(), c(1));
        assert_eq!(p.coeff(1).unwrap(), c(2));
        assert!(matches!(p.coeff(2), Err(Error::InexactOrder { .. })));
    }

    #[test]
    fn mismatched_vars() {
        let a = ZSeries::laurent(1, 0, vec![c(1)]).unwrap();
        let b = ZSeries::laurent(2, 0, vec![MPoly::one(2)]).unwrap();
        assert!(a.try_mul(&b).is_err());
        assert!(a.try_add(&b).is_err());
    }

    #[test]
    fn scalar_ops() {
        let a = ZSeries::laurent(1, -1, vec![c(2), c(4)]).unwrap();
        let h = a.scale(&rat(1, 2));
        assert_eq!(h.coeff(-1).unwrap(), c(1));
        assert_eq!(a.shift(1).coeff(0).unwrap(), c(2));
        assert!(a.try_sub(&a).unwrap().lowest_order().is_none());
    }

    proptest! {
        #[test]
        fn product_is_convolution(
            xs in prop::collection::vec(-3i64..4, 1..5),
            ys in prop::collection::vec(-3i64..4, 1..5),
            lo in -3i64..2, lo2 in -3i64..2, cut in 0i64..4,
        ) {
            let a = ZSeries::truncated(1, lo, xs.iter().map(|&x| c(x)).collect(), lo + cut).unwrap();
            let b = ZSeries::laurent(1, lo2, ys.iter().map(|&y| c(y)).collect()).unwrap();
            let p = a.try_mul(&b).unwrap();
            let (_, hi) = p.exact_range();
            let hi = hi.unwrap_or(lo + lo2 + 8);
            for o in (lo + lo2)..=hi {
                let mut want = 0i64;
                for (i, &x) in xs.iter().enumerate() {
                    let i = lo + i as i64;
                    if i > lo + cut { continue; }
                    let j = o - i - lo2;
                    if j >= 0 && (j as usize) < ys.len() {
                        want += x * ys[j as usize];
                    }
                }
                prop_assert_eq!(p.coeff(o).unwrap(), c(want));
            }
        }
    }
}

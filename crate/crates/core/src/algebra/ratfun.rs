//! Rational functions `num/den` in the time variables.
//!
//! No multivariate gcd is attempted. The canonical form divides out the
//! common monomial factor, scales the denominator to a unit grlex-leading
//! coefficient, and cancels the denominator entirely when it divides the
//! numerator exactly. Equality is decided by cross-multiplication.

use std::fmt;

use num_traits::{One, Zero};

use super::mpoly::MPoly;
use super::rat::Rat;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RatFun {
    num: MPoly,
    den: MPoly,
}

impl RatFun {
    pub fn new(num: MPoly, den: MPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.nvars() != den.nvars() {
            return Err(Error::VarCountMismatch {
                left: num.nvars(),
                right: den.nvars(),
            });
        }
        let mut f = RatFun { num, den };
        f.light_normalize();
        Ok(f)
    }

    pub fn from_poly(p: MPoly) -> Self {
        let n = p.nvars();
        RatFun {
            num: p,
            den: MPoly::one(n),
        }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(MPoly::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(MPoly::one(nvars))
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        Self::from_poly(MPoly::constant(nvars, c))
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cheap canonicalization: zero numerator gives `0/1`, constant
    /// denominators fold into the numerator, denominators get a unit
    /// leading coefficient, and a common monomial factor cancels.
    fn light_normalize(&mut self) {
        let n = self.num.nvars();
        if self.num.is_zero() {
            self.den = MPoly::one(n);
            return;
        }
        if self.den.is_constant() {
            let c = self.den.constant_term();
            self.num = self.num.scale(&(Rat::one() / c));
            self.den = MPoly::one(n);
            return;
        }
        let g = self.num.monomial_gcd();
        let h = self.den.monomial_gcd();
        let common: Vec<u16> = g
            .exps()
            .iter()
            .zip(h.exps())
            .map(|(a, b)| *a.min(b))
            .collect();
        if common.iter().any(|&e| e > 0) {
            let m = super::mpoly::Monomial::from_exps(common);
            self.num = self.num.div_monomial(&m);
            self.den = self.den.div_monomial(&m);
        }
        let lc = self.den.leading_coeff();
        if !lc.is_one() {
            let inv = Rat::one() / lc;
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
        if self.den.is_constant() {
            self.light_normalize();
        }
    }

    /// Full canonical form: light normalization plus exact cancellation when
    /// one side divides the other.
    pub fn normalize(&self) -> RatFun {
        let mut f = self.clone();
        f.light_normalize();
        if f.den.is_constant() {
            return f;
        }
        if let Some(q) = f.num.try_div(&f.den) {
            return RatFun::from_poly(q);
        }
        if let Some(q) = f.den.try_div(&f.num) {
            let n = f.nvars();
            let mut g = RatFun {
                num: MPoly::one(n),
                den: q,
            };
            g.light_normalize();
            return g;
        }
        f
    }

    /// Divide numerator and denominator by `factor` as often as both allow.
    pub fn reduce_by(&self, factor: &MPoly) -> RatFun {
        if factor.is_constant() || self.num.is_zero() {
            return self.clone();
        }
        let mut f = self.clone();
        loop {
            let Some(d) = f.den.try_div(factor) else { break };
            let Some(n) = f.num.try_div(factor) else { break };
            f.num = n;
            f.den = d;
        }
        f.light_normalize();
        f
    }

    /// Cross-multiplied equality `n1·d2 = n2·d1`.
    pub fn equals(&self, other: &RatFun) -> bool {
        if self.nvars() != other.nvars() {
            return false;
        }
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }

    fn check(&self, other: &RatFun) -> Result<()> {
        if self.nvars() != other.nvars() {
            return Err(Error::VarCountMismatch {
                left: self.nvars(),
                right: other.nvars(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &RatFun) -> Result<RatFun> {
        self.check(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let (num, den) = if self.den == other.den {
            (&self.num + &other.num, self.den.clone())
        } else if let Some(q) = other.den.try_div(&self.den) {
            (&(&self.num * &q) + &other.num, other.den.clone())
        } else if let Some(q) = self.den.try_div(&other.den) {
            (&self.num + &(&other.num * &q), self.den.clone())
        } else {
            (
                &(&self.num * &other.den) + &(&other.num * &self.den),
                &self.den * &other.den,
            )
        };
        RatFun::new(num, den)
    }

    pub fn try_sub(&self, other: &RatFun) -> Result<RatFun> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &RatFun) -> Result<RatFun> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(RatFun::zero(self.nvars()));
        }
        RatFun::new(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn try_div(&self, other: &RatFun) -> Result<RatFun> {
        self.check(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RatFun::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn neg(&self) -> RatFun {
        RatFun {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: &Rat) -> RatFun {
        if c.is_zero() {
            return RatFun::zero(self.nvars());
        }
        RatFun {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Partial derivative with respect to `t_i` (1-based).
    pub fn differentiate(&self, i: usize) -> Result<RatFun> {
        let dn = self.num.differentiate(i)?;
        let dd = self.den.differentiate(i)?;
        if dd.is_zero() {
            return RatFun::new(dn, self.den.clone());
        }
        RatFun::new(&(&dn * &self.den) - &(&self.num * &dd), self.den.pow(2))
    }

    pub fn evaluate(&self, point: &[Rat]) -> Result<Rat> {
        let d = self.den.evaluate(point)?;
        if d.is_zero() {
            return Err(Error::Pole);
        }
        Ok(self.num.evaluate(point)? / d)
    }
}

impl PartialEq for RatFun {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den.constant_term().is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

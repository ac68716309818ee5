//! Exact rationals. `Rat` is `num_rational::BigRational`, which keeps
//! numerator and denominator coprime with a positive denominator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Always `p/q`, including integers (`3/1`).
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Compact human form: `3`, `-1/2`.
pub fn format_rat_short(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Accepts `p/q` and bare integers `p`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(BigRational::new(n, d))
}

/// Generalized binomial coefficient C(n, l) for integer n (possibly negative).
pub fn binomial(n: i64, l: u32) -> Rat {
    let mut acc = Rat::one();
    for j in 0..l as i64 {
        acc *= int(n - j);
        acc /= int(j + 1);
    }
    acc
}

pub fn is_negative(r: &Rat) -> bool {
    r.is_negative()
}

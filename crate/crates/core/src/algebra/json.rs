//! JSON wire forms shared by every module.
//!
//! Polynomial: `{"vars": D, "terms": [{"exp": [e1,…,eD], "coef": "p/q"}]}`
//! with terms in descending graded lexicographic order.

use serde::{Deserialize, Serialize};

use super::mpoly::MPoly;
use super::rat::{format_rat, parse_rat};
use super::ratfun::RatFun;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    pub exp: Vec<u16>,
    pub coef: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolyJson {
    pub vars: usize,
    pub terms: Vec<TermJson>,
}

impl From<&MPoly> for PolyJson {
    fn from(p: &MPoly) -> Self {
        PolyJson {
            vars: p.nvars(),
            terms: p
                .sorted_terms()
                .into_iter()
                .map(|(m, c)| TermJson {
                    exp: m.exps().to_vec(),
                    coef: format_rat(c),
                })
                .collect(),
        }
    }
}

impl From<MPoly> for PolyJson {
    fn from(p: MPoly) -> Self {
        PolyJson::from(&p)
    }
}

impl TryFrom<PolyJson> for MPoly {
    type Error = Error;
    fn try_from(j: PolyJson) -> Result<MPoly> {
        if j.vars == 0 {
            return Err(Error::InvalidInput("polynomial needs vars >= 1".into()));
        }
        let terms = j
            .terms
            .into_iter()
            .map(|t| Ok((t.exp, parse_rat(&t.coef)?)))
            .collect::<Result<Vec<_>>>()?;
        MPoly::from_terms(j.vars, terms)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RatFunJson {
    pub num: PolyJson,
    pub den: PolyJson,
}

impl From<&RatFun> for RatFunJson {
    fn from(f: &RatFun) -> Self {
        RatFunJson {
            num: f.num().into(),
            den: f.den().into(),
        }
    }
}

impl TryFrom<RatFunJson> for RatFun {
    type Error = Error;
    fn try_from(j: RatFunJson) -> Result<RatFun> {
        RatFun::new(j.num.try_into()?, j.den.try_into()?)
    }
}

impl Serialize for MPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        MPoly::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl Serialize for RatFun {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RatFunJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatFun {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = RatFunJson::deserialize(d)?;
        RatFun::try_from(j).map_err(serde::de::Error::custom)
    }
}

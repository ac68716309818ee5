use serde::{Deserialize, Serialize};

use super::mpoly::MPoly;

/// A polynomial in the times together with the charge `m` carried by `q^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargedPoly {
    pub charge: i64,
    pub poly: MPoly,
}

impl ChargedPoly {
    pub fn new(charge: i64, poly: MPoly) -> Self {
        ChargedPoly { charge, poly }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

//! Exact rational, polynomial, Laurent-series and rational-function arithmetic.

pub mod charged;
pub mod json;
pub mod linalg;
pub mod mpoly;
pub mod rat;
pub mod ratfun;
pub mod zseries;

pub use charged::ChargedPoly;
pub use mpoly::{MPoly, Monomial};
pub use rat::{format_rat, int, parse_rat, rat, Rat};
pub use ratfun::RatFun;
pub use zseries::ZSeries;

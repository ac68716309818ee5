//! Exact construction and verification of polynomial tau-functions of the
//! vector k-constrained KP hierarchy.
//!
//! A tau-function is built from a point of the polynomial Sato Grassmannian
//! and checked three ways: stability of the subspace under `s^k`, fermionic
//! bilinear identities in a finite window of the semi-infinite wedge space,
//! and bosonic Hirota residues. The `psdo` module dresses the Lax operator
//! and checks the constraint `L^k = (L^k)_+ + Σ q_j ∂^{-1} r_j` directly.

pub mod algebra;
pub mod error;
pub mod fock;
pub mod grassmannian;
pub mod hirota;
pub mod psdo;
pub mod sample;
pub mod schur;

pub use error::{Error, Result};

/// Caps the global worker pool at `TAUFORGE_THREADS` when it is set. Results
/// never depend on the pool size.
pub fn init_threads_from_env() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("TAUFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("TAUFORGE_THREADS must be a positive integer, got {v:?}"))?;
    // A pool that is already built keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

//! Classical simulation of the lattice QMA protocol: Gaussian witnesses over
//! a fine grid, autocorrelation circuits, the super-verifier and its
//! amplification, and positive-definite-function audits.

pub mod autocorr;
pub mod error;
pub mod lattice;
pub mod par;
pub mod pd;
pub mod protocol;
pub mod witness;

pub use error::{Error, Result};

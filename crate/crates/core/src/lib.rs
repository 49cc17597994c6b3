//! Gaussian continuous-variable states, entanglement measures and
//! protocol analysis for quantum key distribution.

pub mod cad;
pub mod classical;
pub mod efficiency;
pub mod entanglement;
pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod qkd;
pub mod rng;

pub use error::{Error, Result};

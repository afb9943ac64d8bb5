//! Tensor-rank certificates for symmetric multipartite states.
//!
//! Symmetric states correspond to homogeneous polynomials, so Waring
//! decompositions of polynomials give product decompositions of states and,
//! through them, explicit local operators converting GHZ states into the
//! target. The crate builds such certificates exactly where possible, checks
//! every one of them by re-expansion, and searches numerically where no
//! closed form is known.

pub(crate) mod combinat;
mod error;
pub mod ranksearch;
pub mod slocc;
pub mod sympoly;
pub mod tensors;
pub mod wpower;

pub use error::{Error, Result};

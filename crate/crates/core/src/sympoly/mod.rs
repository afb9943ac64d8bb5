//! Symmetric states as homogeneous polynomials, and Waring certificates.
//!
//! A symmetric `N`-party state over `d` levels is identified with a degree-`N`
//! polynomial in `d` variables so that `v^{⊗N}` corresponds to
//! `(v_0 x_0 + … + v_{d−1} x_{d−1})^N`. A sum of `r` such powers is then both a
//! Waring decomposition of the polynomial and an `r`-term product
//! decomposition of the state.

mod correspondence;
mod decomp;
mod poly;
mod symmetrize;
mod waring;

pub use correspondence::{dicke_state, is_symmetric, poly_from_state, state_from_poly};
pub use decomp::{expand, PowerTerm, SymmetricDecomposition, Verified};
pub use poly::{ExponentVector, HomogeneousPolynomial, LinearForm};
pub use symmetrize::symmetrize_decomposition;
pub use waring::{
    binary_monomial_decompose, fischer_decompose, monomial_decompose, monomial_term_count, MonomialShape,
    FLOAT_CERT_TOL,
};

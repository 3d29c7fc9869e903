//! Rationally extended harmonic oscillators built from exceptional Hermite
//! polynomials, their one-parameter isospectral deformations (with the Pursey
//! and Abraham-Moses limits), eigenstates, uncertainty products, and
//! independent numerical oracles.
//!
//! Units: `hbar = 2m = 1`, so every Hamiltonian is `-d^2/dx^2 + V(x) - eps`
//! with factorization energy `eps = -2m - 1`. Only even codimension `m` is
//! supported.

pub mod error;
pub mod expectation;
pub mod polynomials;
pub mod potentials;
pub mod reference;
pub mod states;
pub mod tables;
pub mod validation;

pub use error::{Error, Result};
pub use expectation::quadrature::{integrate, QuadConfig};
pub use expectation::{expect_p2, expect_x, expect_x2, uncertainty, UncertaintyReport};
pub use polynomials::{exceptional_hermite, hermite, pseudo_hermite, Codimension, Polynomial};
pub use potentials::{FamilyKind, FamilySpec, RehoSystem};
pub use states::{energy, Eigenstate, WaveState};
pub use validation::{fd_spectrum, gram_matrix, residual, GridSpec, SpectrumReport};

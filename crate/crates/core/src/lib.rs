//! C-symmetric matrices and their Jordan operator algebra.
//!
//! A conjugation `C` on `C^n` is an antilinear involutive isometry
//! `x ↦ U·conj(x)` with `U` symmetric unitary. `S_C` is the set of matrices
//! with `C T C = T*`; it is closed under the Jordan product
//! `A ∘ B = ½(AB + BA)` but not under ordinary multiplication.

pub mod approximation;
pub mod cli;
pub mod conjugation;
pub mod decomposition;
pub mod error;
pub mod io;
pub mod jordan_mult;
pub mod linalg;
pub mod random;
pub mod sc_space;
pub mod structure;
pub mod suite;

pub use conjugation::Conjugation;
pub use error::{Error, Result};
pub use sc_space::{OcElement, ScElement};

//! Decide whether a closed oriented 3-manifold carries a homologically fibered
//! link with fiber `Σ_{g,n+1}`, working purely from homological data: the
//! free rank and torsion linking form of `H₁`, or a rational surgery diagram.
//!
//! Existence reduces to an integer equation
//!
//! ```text
//! | M0       W·X        |
//! | Xᵗ   Y + (E ⊕ O_n)  |  = ±1,      Y = Yᵗ
//! ```
//!
//! where `(M0, W)` comes from a linking decomposition ([`linking::theorem_matrices`])
//! or from a surgery diagram ([`surgery::phi_psi`]). The [`engine`] verifies,
//! searches for and obstructs solutions; [`hc`] builds on it to bound the
//! minimal genus of a homological fiber of a knot.

pub mod engine;
pub mod group;
pub mod hc;
pub mod linalg;
pub mod linking;
mod matrix;
pub mod surgery;

pub use group::AbelianGroup;
pub use matrix::IntMatrix;

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("matrix is singular")]
    Singular,
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("{len} entries do not fill a {rows}x{cols} matrix")]
    BadLength { rows: usize, cols: usize, len: usize },
    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("invalid invariant factor {0}")]
    BadInvariantFactor(BigInt),
}

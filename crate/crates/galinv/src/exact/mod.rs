//! Exact scalar, polynomial, matrix and linear-algebra substrate.

pub mod linform;
pub mod matrix;
pub mod scalar;
pub mod solve;
pub mod vpoly;

pub use linform::{reassemble, LinForm, LinFormCR, UnknownTable};
pub use matrix::{pauli, pauli_decompose, Coeff, Mat, MatCR, MatLF, MatVP};
pub use scalar::{parse_positive_rat, rat, CRat, Rat};
pub use solve::{normalize_first_nonzero, ConstraintSystem, Echelon, Nullspace, Span};
pub use vpoly::{Mono, VPoly, EPS, MONO_ONE, NVARS, U1, V1, V2, V3};

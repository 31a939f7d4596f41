//! Exact-arithmetic engine for Galilean-invariant spinor wave equations.
//!
//! The crate derives, classifies and verifies dynamical equations for
//! N-component wave functions under the extended Galilei group, entirely in
//! exact complex-rational arithmetic:
//!
//! - [`exact`]: complex rationals, sparse polynomials in the boost velocity,
//!   linear forms in ansatz unknowns, matrices, and exact nullspaces.
//! - [`galilei`]: group elements and composition, spinor representations,
//!   commutation-relation solving for boost generators, exact boost matrices.
//! - [`engine`]: the invariance machinery; transforms a matrix-coefficient
//!   differential operator under a group element plus phase and solves for
//!   the space of invariant equations.
//! - [`calculus`]: operator composition and powers, plane-wave reduction,
//!   covariance checks on explicit solutions.
//! - [`coupling`]: minimal coupling and the noncommutative elimination that
//!   produces the two-component magnetic equation.
//! - [`report`]: serialisable report types shared by the CLI and the demo.

pub mod calculus;
pub mod coupling;
pub mod engine;
mod error;
pub mod exact;
pub mod galilei;
pub mod report;

pub use error::{Error, Result};

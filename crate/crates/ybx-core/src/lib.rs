//! Classical and quantum Yang-Baxter maps for U_q(sl(2)).
//!
//! The crate turns the algebraic identities of this integrable-systems circle
//! into machine-checkable numerical residuals: set-theoretic Yang-Baxter maps
//! and their Hopf-algebra compatibilities, lattice Lax matrices and monodromy
//! invariants, the tau-function solution of the inhomogeneous discrete
//! Liouville equation, dilogarithm Lagrangians, finite-dimensional universal
//! R-matrices, quantum transfer matrices, and the non-compact quantum
//! dilogarithm kernel.

pub mod classical;
pub mod action;
pub mod liouville;
pub mod error;
pub mod mat;
pub mod numeric;
pub mod qdilog;
pub mod quantum;

pub use error::{Error, Result};

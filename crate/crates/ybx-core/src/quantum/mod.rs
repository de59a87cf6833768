//! Quantum side: representations of the deformed algebra, the universal
//! R-matrix, the quantum Yang-Baxter map, L-operators, and the lattice
//! model built from them.

pub mod lattice;
pub mod rep;

pub use rep::{
    lax_blocks, lax_lambda, quantum_map_residual, r_check, r_lambda_q, r_minus, r_plus,
    rll_ybe_residual, spin_rep, universal_r, GenSet, LaxOperator, LaxSign, QDirection, QParams,
    SpinRep,
};
pub use rep::hopf_residual_suite;

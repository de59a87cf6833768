//! Non-compact quantum dilogarithm, the factorized integral-kernel R-matrix
//! built from it, and the quasiclassical and star-triangle cross-checks that
//! tie it back to the Lagrangian picture.

pub mod kernel;
pub mod limits;
pub mod phi;

pub use kernel::{
    delta_family_trend, fourier_duality_residual, fourier_v, kernel_funcs,
    operator_factorization_residual, r_kernel, recurrence_residuals, weight_norm, FourierV,
    KernelKind, KernelPoint,
};
pub use limits::{
    default_b_sequence, quasiclassical_residual, random_three_leg_params, star_triangle_residual,
    three_leg_residual, QuasiRow, ScaledPoint, StarTriangleKind, StarTriangleOutcome,
    StarTriangleParams,
};
pub use phi::{
    aux_inversion_residual, aux_phi, functional_equation_residual, grid_csv, inversion_residual,
    phi, DilogParams,
};

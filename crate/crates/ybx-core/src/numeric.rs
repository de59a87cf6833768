//! Polynomial coefficient extraction and finite-difference gradients.
//!
//! `fit_poly_lambda2` recovers the coefficients c_0..c_d of expansions of the
//! form value = lambda^p * sum_n c_n lambda^{-2n}, which is how transfer-matrix
//! traces package their conserved coefficients. The Vandermonde system is
//! solved in the variable mu = lambda^{-2}.

use crate::error::{Error, Result};
use crate::mat::ComplexMatrix;
use num_complex::Complex64;

/// Derivative estimation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientScheme {
    /// Symmetric difference along the real direction of each coordinate.
    CentralDifference,
    /// Symmetric difference along the imaginary direction; only valid for
    /// functions analytic in each coordinate.
    ComplexStep,
}

/// Configuration for `fd_gradient`.
#[derive(Debug, Clone, Copy)]
pub struct GradientConfig {
    pub scheme: GradientScheme,
    pub step: f64,
}

impl Default for GradientConfig {
    fn default() -> Self {
        Self { scheme: GradientScheme::CentralDifference, step: 1e-6 }
    }
}

impl GradientConfig {
    pub fn new(scheme: GradientScheme, step: f64) -> Self {
        assert!(step > 0.0, "gradient step must be positive");
        Self { scheme, step }
    }
}

/// Inverse of the Vandermonde system in mu = lambda^{-2}: returns, for each
/// coefficient index n, the weights w_{n,k} such that c_n = sum_k w_{n,k} *
/// (value_k * lambda_k^{-p}).
fn vandermonde_weights(lambdas: &[Complex64], degree: usize) -> Result<ComplexMatrix> {
    let m = degree + 1;
    if lambdas.len() < m {
        return Err(Error::DegenerateSamples(format!(
            "need at least {m} samples for degree {degree}, got {}",
            lambdas.len()
        )));
    }
    let mus: Vec<Complex64> = lambdas[..m].iter().map(|l| 1.0 / (l * l)).collect();
    for i in 0..m {
        for j in i + 1..m {
            if (mus[i] - mus[j]).norm() < 1e-14 {
                return Err(Error::DegenerateSamples(format!(
                    "repeated lambda^2 sample at indices {i},{j}"
                )));
            }
        }
    }
    let v = ComplexMatrix::from_fn(m, m, |k, n| mus[k].powu(n as u32));
    v.inverse("fit_poly_lambda2 Vandermonde")
}

/// Fit scalar samples (lambda_k, value_k) to value = lambda^p sum c_n lambda^{-2n}.
pub fn fit_poly_lambda2(
    samples: &[(Complex64, Complex64)],
    degree: usize,
    prefactor_power: i32,
) -> Result<Vec<Complex64>> {
    let lambdas: Vec<Complex64> = samples.iter().map(|(l, _)| *l).collect();
    let w = vandermonde_weights(&lambdas, degree)?;
    let m = degree + 1;
    let rhs: Vec<Complex64> = samples[..m]
        .iter()
        .map(|(l, v)| v * l.powi(-prefactor_power))
        .collect();
    Ok((0..m)
        .map(|n| (0..m).map(|k| w[(n, k)] * rhs[k]).sum())
        .collect())
}

/// Matrix-valued version of `fit_poly_lambda2`: coefficients are matrices of
/// the common sample shape.
pub fn fit_poly_lambda2_matrix(
    samples: &[(Complex64, ComplexMatrix)],
    degree: usize,
    prefactor_power: i32,
) -> Result<Vec<ComplexMatrix>> {
    let lambdas: Vec<Complex64> = samples.iter().map(|(l, _)| *l).collect();
    let w = vandermonde_weights(&lambdas, degree)?;
    let m = degree + 1;
    let (rows, cols) = (samples[0].1.rows(), samples[0].1.cols());
    let mut out = Vec::with_capacity(m);
    for n in 0..m {
        let mut coeff = ComplexMatrix::zeros(rows, cols);
        for (k, (l, mat)) in samples[..m].iter().enumerate() {
            let scale = w[(n, k)] * l.powi(-prefactor_power);
            coeff = coeff.add(&mat.scale(scale));
        }
        out.push(coeff);
    }
    Ok(out)
}

/// Evaluate a fitted expansion at lambda (shared by tests and reports).
pub fn eval_poly_lambda2(
    coeffs: &[Complex64],
    lambda: Complex64,
    prefactor_power: i32,
) -> Complex64 {
    let mu = 1.0 / (lambda * lambda);
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * mu + c;
    }
    acc * lambda.powi(prefactor_power)
}

/// Gradient of a complex-valued function of n complex coordinates, where each
/// coordinate is probed along a real (or imaginary, for ComplexStep) offset.
///
/// For functions holomorphic in each coordinate both schemes estimate the
/// complex derivative with O(step^2) error.
pub fn fd_gradient<F>(f: F, point: &[Complex64], cfg: GradientConfig) -> Result<Vec<Complex64>>
where
    F: Fn(&[Complex64]) -> Result<Complex64>,
{
    let h = cfg.step;
    let offset = match cfg.scheme {
        GradientScheme::CentralDifference => Complex64::new(h, 0.0),
        GradientScheme::ComplexStep => Complex64::new(0.0, h),
    };
    let mut grad = Vec::with_capacity(point.len());
    let mut probe = point.to_vec();
    for i in 0..point.len() {
        probe[i] = point[i] + offset;
        let fp = f(&probe)?;
        probe[i] = point[i] - offset;
        let fm = f(&probe)?;
        probe[i] = point[i];
        grad.push((fp - fm) / (2.0 * offset));
    }
    Ok(grad)
}

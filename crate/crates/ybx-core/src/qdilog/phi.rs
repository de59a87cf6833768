//! The non-compact quantum dilogarithm and its cosh-weighted companion,
//! evaluated by direct contour quadrature.
//!
//! Both functions are defined by integrals along the real axis passing above
//! the origin,
//!
//! ```text
//! log phi(z) = (1/4) int_{R+i0} e^{-2izw} / (sinh(wb) sinh(w/b)) dw/w,
//! log Phi(z) = (1/8) int_{R+i0} e^{-2izw} / (sinh(wb) sinh(w/b) cosh(2 eta w)) dw/w.
//! ```
//!
//! The integrand has a third-order pole at w = 0.  The contour is split into
//! the two half-lines [r0, inf) traversed as f(w) + f(-w), plus a small
//! semicircular detour above the origin whose contribution is computed from
//! the Laurent coefficients a_{-3}..a_{3} of the integrand (Cauchy formula on
//! a circle).  On the detour only a_{-1} and the even-index coefficients
//! survive.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Modular parameter of the dilogarithm together with the derived constants
/// eta = (b + 1/b)/2 and q = exp(i pi b^2).
#[derive(Debug, Clone, Copy)]
pub struct DilogParams {
    pub b: Complex64,
    pub eta: Complex64,
    pub q: Complex64,
}

impl DilogParams {
    /// Builds the parameter set from b, requiring Im(b^2) > 0 and |b| < 1.
    pub fn new(b: Complex64) -> Result<Self> {
        let b2 = b * b;
        if b2.im <= 0.0 {
            return Err(Error::ParameterDomain(format!(
                "Im(b^2) = {:.3e} must be positive",
                b2.im
            )));
        }
        if b.norm() >= 1.0 {
            return Err(Error::ParameterDomain(format!(
                "|b| = {:.3} must be below 1",
                b.norm()
            )));
        }
        let eta = (b + b.inv()) / 2.0;
        if eta.re <= 0.0 {
            return Err(Error::ParameterDomain(
                "Re(eta) must be positive for the contour to converge".into(),
            ));
        }
        Ok(Self {
            b,
            eta,
            q: (I * std::f64::consts::PI * b2).exp(),
        })
    }

    /// Default working point b = 0.6 e^{i pi/10}.
    pub fn default_b() -> Self {
        let arg = std::f64::consts::PI / 10.0;
        Self::new(0.6 * c(arg.cos(), arg.sin())).expect("default b is admissible")
    }

    /// Residual of the defining relation eta = (b + 1/b)/2.
    pub fn eta_residual(&self) -> f64 {
        (self.eta - (self.b + self.b.inv()) / 2.0).norm()
    }
}

/// 64-point Gauss-Legendre rule on [-1, 1], nodes and weights.
fn gauss_legendre_64() -> &'static [(f64, f64); 64] {
    static RULE: OnceLock<[(f64, f64); 64]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = 64usize;
        let mut rule = [(0.0, 0.0); 64];
        for k in 0..n {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0f64, x);
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            rule[k] = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

/// Crate-visible handle on the quadrature rule, shared with the kernel and
/// star-triangle integrators.
pub(crate) fn gauss_rule() -> &'static [(f64, f64); 64] {
    gauss_legendre_64()
}

/// Integrates f over [a, b] with the 64-point rule.
fn gl_panel<F: Fn(f64) -> Complex64>(a: f64, b: f64, f: &F) -> Complex64 {
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    let mut acc = c(0.0, 0.0);
    for &(x, w) in gauss_legendre_64() {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Raw contour integrand of log phi (aux = false) or log Phi (aux = true),
/// without the 1/4 resp. 1/8 prefactor.
fn integrand(w: Complex64, z: Complex64, p: &DilogParams, aux: bool) -> Complex64 {
    let mut den = (w * p.b).sinh() * (w / p.b).sinh() * w;
    if aux {
        den *= (2.0 * p.eta * w).cosh();
    }
    (-2.0 * I * z * w).exp() / den
}

/// Laurent coefficients a_{-3}..a_{9} of the integrand at w = 0, via the
/// Cauchy formula on the circle |w| = 0.1 with a 64-point trapezoid rule.
/// The high even orders matter: on the detour their contribution scales like
/// (2z)^n r0^{n+1}/n!, which is no longer negligible for |Re z| ~ 20.
fn laurent_coeffs(z: Complex64, p: &DilogParams, aux: bool) -> [Complex64; 13] {
    let rho = 0.1;
    let m = 64usize;
    let mut coeffs = [c(0.0, 0.0); 13];
    for k in 0..m {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
        let w = rho * c(theta.cos(), theta.sin());
        let f = integrand(w, z, p, aux);
        for (idx, cf) in coeffs.iter_mut().enumerate() {
            let n = idx as i32 - 3;
            // a_n = (1/2 pi i) oint f(w) w^{-n-1} dw = (1/m) sum f w^{-n}.
            *cf += f * w.powi(-n) / m as f64;
        }
    }
    coeffs
}

const PANEL_START: f64 = 0.01;
const TAIL_CUTOFF: f64 = 1e-18;
const MAX_PANELS: usize = 400;

/// Evaluates the contour integral (line parts plus detour) for log phi or
/// log Phi at a point inside the convergence strip.
fn contour_log(z: Complex64, p: &DilogParams, aux: bool) -> Result<Complex64> {
    let r0 = PANEL_START;
    let coeffs = laurent_coeffs(z, p, aux);
    // Semicircular detour above w = 0, radius r0: odd-index terms cancel,
    // a_{-1} picks up -i pi, even powers integrate to 2 r0^{n+1}/(n+1).
    let mut arc = -I * std::f64::consts::PI * coeffs[2];
    for n in [-2i32, 0, 2, 4, 6, 8] {
        let a_n = coeffs[(n + 3) as usize];
        arc += 2.0 * a_n * r0.powi(n + 1) / (n + 1) as f64;
    }

    let folded = |t: f64| {
        let w = c(t, 0.0);
        integrand(w, z, p, aux) + integrand(-w, z, p, aux)
    };
    let mut line = c(0.0, 0.0);
    let mut left = r0;
    let mut width = r0;
    let mut converged = false;
    for _ in 0..MAX_PANELS {
        let right = left + width;
        line += gl_panel(left, right, &folded);
        left = right;
        if width < 1.0 {
            width = (width * 2.0).min(1.0);
        }
        if folded(left).norm() < TAIL_CUTOFF {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::QuadratureFailure {
            context: "quantum dilogarithm contour",
            detail: format!(
                "tail still {:.3e} at w = {:.2} for z = {}",
                folded(left).norm(),
                left,
                z
            ),
        });
    }
    Ok((line + arc) / if aux { 8.0 } else { 4.0 })
}

type MemoKey = [i64; 5];

fn memo() -> &'static Mutex<HashMap<MemoKey, Complex64>> {
    static MEMO: OnceLock<Mutex<HashMap<MemoKey, Complex64>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn memo_key(z: Complex64, b: Complex64, aux: bool) -> MemoKey {
    let q = |x: f64| (x / 1e-14).round() as i64;
    [q(z.re), q(z.im), q(b.re), q(b.im), aux as i64]
}

fn contour_log_memo(z: Complex64, p: &DilogParams, aux: bool) -> Result<Complex64> {
    let key = memo_key(z, p.b, aux);
    if let Some(&v) = memo().lock().unwrap().get(&key) {
        return Ok(v);
    }
    let v = contour_log(z, p, aux)?;
    memo().lock().unwrap().insert(key, v);
    Ok(v)
}

/// The non-compact quantum dilogarithm phi(z).
///
/// Inside the strip |Im z| < Re(eta)/2 the contour integral is evaluated
/// directly.  Outside, the argument is first walked back into the strip with
/// the shift relation phi(z - ib/2) = phi(z + ib/2) (1 + e^{2 pi b z}), so the
/// function is available on the much wider domain needed by rotated Fourier
/// contours and quasiclassical scaling.
pub fn phi(z: Complex64, p: &DilogParams) -> Result<Complex64> {
    let thresh = 0.5 * p.eta.re;
    let ib = I * p.b;
    let two_pi_b = 2.0 * std::f64::consts::PI * p.b;
    let mut z = z;
    let mut log_corr = c(0.0, 0.0);
    let mut guard = 0usize;
    while z.im > thresh {
        z -= ib;
        log_corr -= (1.0 + (two_pi_b * (z + ib / 2.0)).exp()).ln();
        guard += 1;
        if guard > 200 {
            return Err(Error::ParameterDomain(format!(
                "shift reduction failed to reach the strip for z = {z}"
            )));
        }
    }
    while z.im < -thresh {
        log_corr += (1.0 + (two_pi_b * (z + ib / 2.0)).exp()).ln();
        z += ib;
        guard += 1;
        if guard > 200 {
            return Err(Error::ParameterDomain(format!(
                "shift reduction failed to reach the strip for z = {z}"
            )));
        }
    }
    Ok((contour_log_memo(z, p, false)? + log_corr).exp())
}

/// The cosh-weighted companion function Phi(z).
///
/// No shift relation is used here; the argument must lie inside the contour's
/// own convergence strip, which is all the Boltzmann-weight normalization
/// F_alpha ever needs.
pub fn aux_phi(z: Complex64, p: &DilogParams) -> Result<Complex64> {
    if z.im.abs() >= 2.0 * p.eta.re {
        return Err(Error::ParameterDomain(format!(
            "aux_phi argument {z} outside the convergence strip"
        )));
    }
    Ok(contour_log_memo(z, p, true)?.exp())
}

/// Residual of the defining difference equation
/// log phi(z - ib/2) - log phi(z + ib/2) = log(1 + e^{2 pi b z}).
pub fn functional_equation_residual(z: Complex64, p: &DilogParams) -> Result<f64> {
    let half = I * p.b / 2.0;
    let lhs = phi(z - half, p)? / phi(z + half, p)?;
    let rhs = 1.0 + (2.0 * std::f64::consts::PI * p.b * z).exp();
    Ok((lhs.ln() - rhs.ln()).norm())
}

/// Residual of the inversion relation
/// phi(z) phi(-z) = exp(i pi z^2 - i pi (1 - 2 eta^2)/6).
pub fn inversion_residual(z: Complex64, p: &DilogParams) -> Result<f64> {
    let pi = std::f64::consts::PI;
    let lhs = phi(z, p)? * phi(-z, p)?;
    let rhs = (I * pi * z * z - I * pi * (1.0 - 2.0 * p.eta * p.eta) / 6.0).exp();
    Ok((lhs - rhs).norm())
}

/// Residual of the companion inversion relation
/// Phi(z) Phi(-z) = exp(i pi z^2/2 - i pi (1 - 8 eta^2)/12).
pub fn aux_inversion_residual(z: Complex64, p: &DilogParams) -> Result<f64> {
    let pi = std::f64::consts::PI;
    let lhs = aux_phi(z, p)? * aux_phi(-z, p)?;
    let rhs = (I * pi * z * z / 2.0 - I * pi * (1.0 - 8.0 * p.eta * p.eta) / 12.0).exp();
    Ok((lhs - rhs).norm())
}

/// CSV dump of a complex function sampled on a list of points, with columns
/// (Re z, Im z, Re f, Im f).
pub fn grid_csv<F: Fn(Complex64) -> Result<Complex64>>(
    points: &[Complex64],
    f: F,
) -> Result<String> {
    let mut out = String::from("re_z,im_z,re_f,im_f\n");
    for &z in points {
        let v = f(z)?;
        out.push_str(&format!("{},{},{},{}\n", z.re, z.im, v.re, v.im));
    }
    Ok(out)
}

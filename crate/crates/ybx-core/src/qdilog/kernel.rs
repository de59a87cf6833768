//! Factorized integral kernel of the R-matrix in the coordinate basis, the
//! single-variable functions it is built from, and the recurrence relations
//! that pin it down.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qdilog::phi::{aux_phi, phi, DilogParams};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const I: Complex64 = Complex64::new(0.0, 1.0);
const PI: f64 = std::f64::consts::PI;

/// The five single-variable kernel functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// V_alpha(s) = e^{i pi/8 - i pi s^2} phi(i alpha - s).
    V,
    /// Vbar_alpha(s) = e^{-i pi/8 + i pi s^2} / phi(i alpha - i eta - s).
    VBar,
    /// Vbar*_alpha(s) = e^{i pi/8 - i pi s^2} phi(i eta + i alpha - s).
    VBarStar,
    /// Faddeev-Volkov weight W_alpha(s), with the F_alpha normalization.
    W,
    /// WBar_alpha(s) = W_{eta - alpha}(s).
    WBar,
}

/// Normalization constant F_alpha = e^{i pi alpha^2 + i pi (1 - 8 eta^2)/24} Phi(2 i alpha).
pub fn weight_norm(alpha: Complex64, p: &DilogParams) -> Result<Complex64> {
    let eta2 = p.eta * p.eta;
    Ok((I * PI * alpha * alpha + I * PI * (1.0 - 8.0 * eta2) / 24.0).exp()
        * aux_phi(2.0 * I * alpha, p)?)
}

/// Evaluates one of the kernel functions at spectral parameter alpha and
/// argument s.
pub fn kernel_funcs(
    kind: KernelKind,
    alpha: Complex64,
    s: Complex64,
    p: &DilogParams,
) -> Result<Complex64> {
    let gauss = (I * PI / 8.0 - I * PI * s * s).exp();
    match kind {
        KernelKind::V => Ok(gauss * phi(I * alpha - s, p)?),
        KernelKind::VBar => Ok(gauss.inv() / phi(I * alpha - I * p.eta - s, p)?),
        KernelKind::VBarStar => Ok(gauss * phi(I * p.eta + I * alpha - s, p)?),
        KernelKind::W => Ok((2.0 * PI * alpha * s).exp() * phi(s + I * alpha, p)?
            / (weight_norm(alpha, p)? * phi(s - I * alpha, p)?)),
        KernelKind::WBar => kernel_funcs(KernelKind::W, p.eta - alpha, s, p),
    }
}

/// One evaluation point of the two-particle kernel: incoming coordinates
/// s1, s2, outgoing s1', s2', and the representation parameters of each slot.
#[derive(Debug, Clone, Copy)]
pub struct KernelPoint {
    pub s1: Complex64,
    pub s2: Complex64,
    pub s1p: Complex64,
    pub s2p: Complex64,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    pub beta1: Complex64,
    pub beta2: Complex64,
}

impl KernelPoint {
    /// Largest |Im s| over the four coordinates; the analyticity strip of the
    /// recurrences requires this to stay below Re(b), and the recurrence
    /// tests keep it below Re(b)/2.
    pub fn strip_excursion(&self) -> f64 {
        [self.s1, self.s2, self.s1p, self.s2p]
            .iter()
            .map(|s| s.im.abs())
            .fold(0.0, f64::max)
    }

    /// The multiplicative z-parameters z_i = -e^{2 pi i b (alpha_i - beta_i)}.
    pub fn z_params(&self, p: &DilogParams) -> (Complex64, Complex64) {
        (
            -(2.0 * PI * I * p.b * (self.alpha1 - self.beta1)).exp(),
            -(2.0 * PI * I * p.b * (self.alpha2 - self.beta2)).exp(),
        )
    }
}

/// Kernel of the R-matrix (inverse = false),
///
/// ```text
/// <s1 s2|R|s1' s2'> = V_{b1-a2}(s2-s1) V_{a1-b2}(s2'-s1')
///                     Vbar_{a1-a2}(s2'-s1) Vbar_{b1-b2}(s2-s1'),
/// ```
///
/// or of its inverse (inverse = true),
///
/// ```text
/// <s1' s2'|R^{-1}|s1 s2> = Vbar*_{a1-a2}(s2'-s1) Vbar*_{b1-b2}(s2-s1')
///                          / (V_{b1-a2}(s2-s1) V_{a1-b2}(s2'-s1')).
/// ```
///
/// Defined up to one overall constant; only ratios of kernel values are ever
/// compared.
pub fn r_kernel(pt: &KernelPoint, p: &DilogParams, inverse: bool) -> Result<Complex64> {
    let v_in = kernel_funcs(KernelKind::V, pt.beta1 - pt.alpha2, pt.s2 - pt.s1, p)?;
    let v_out = kernel_funcs(KernelKind::V, pt.alpha1 - pt.beta2, pt.s2p - pt.s1p, p)?;
    if inverse {
        let vs_a = kernel_funcs(KernelKind::VBarStar, pt.alpha1 - pt.alpha2, pt.s2p - pt.s1, p)?;
        let vs_b = kernel_funcs(KernelKind::VBarStar, pt.beta1 - pt.beta2, pt.s2 - pt.s1p, p)?;
        Ok(vs_a * vs_b / (v_in * v_out))
    } else {
        let vb_a = kernel_funcs(KernelKind::VBar, pt.alpha1 - pt.alpha2, pt.s2p - pt.s1, p)?;
        let vb_b = kernel_funcs(KernelKind::VBar, pt.beta1 - pt.beta2, pt.s2 - pt.s1p, p)?;
        Ok(v_in * v_out * vb_a * vb_b)
    }
}

/// Relative residuals of the four first-order recurrences in s1, s2, s1', s2'
/// that characterize the kernel up to normalization.  Each entry is
/// |kernel ratio / closed-form ratio - 1|.
pub fn recurrence_residuals(pt: &KernelPoint, p: &DilogParams) -> Result<[f64; 4]> {
    let ib = I * p.b;
    let q = p.q;
    let (z1, z2) = pt.z_params(p);
    let v = |s: Complex64, beta: Complex64| (2.0 * PI * p.b * (s + I * beta)).exp();
    let (v1, v2) = (v(pt.s1, pt.beta1), v(pt.s2, pt.beta2));
    let (v1p, v2p) = (v(pt.s1p, pt.beta1), v(pt.s2p, pt.beta2));

    let base = r_kernel(pt, p, false)?;
    let shifted = |s1, s2, s1p, s2p| {
        r_kernel(
            &KernelPoint {
                s1,
                s2,
                s1p,
                s2p,
                ..*pt
            },
            p,
            false,
        )
    };

    let expected = [
        z1 * (1.0 - z2 * v2p / (z1 * v1)) / (q * (1.0 - z2 * v2 / (q * v1))),
        z2 * (1.0 - v2 / v1p) / (q * (1.0 - z2 * v2 / (q * v1))),
        (1.0 - v2 / v1p) / (q * z1 * (1.0 - v2p / (q * z1 * v1p))),
        (1.0 - z2 * v2p / (z1 * v1)) / (q * z2 * (1.0 - v2p / (q * z1 * v1p))),
    ];
    let actual = [
        shifted(pt.s1 + ib, pt.s2, pt.s1p, pt.s2p)? / base,
        shifted(pt.s1, pt.s2 - ib, pt.s1p, pt.s2p)? / base,
        shifted(pt.s1, pt.s2, pt.s1p + ib, pt.s2p)? / base,
        shifted(pt.s1, pt.s2, pt.s1p, pt.s2p - ib)? / base,
    ];
    let mut out = [0.0; 4];
    for k in 0..4 {
        out[k] = (actual[k] / expected[k] - 1.0).norm();
    }
    Ok(out)
}

/// Integrates f over [a, b] (real interval) with 64-point Gauss-Legendre
/// panels of the given width, failing on non-finite values.
pub(crate) fn integrate_panels<F: Fn(f64) -> Result<Complex64>>(
    a: f64,
    b: f64,
    width: f64,
    f: &F,
) -> Result<Complex64> {
    let rule = gauss_legendre_64_pub();
    let n_panels = ((b - a) / width).ceil() as usize;
    let mut acc = c(0.0, 0.0);
    for k in 0..n_panels {
        let lo = a + (b - a) * k as f64 / n_panels as f64;
        let hi = a + (b - a) * (k + 1) as f64 / n_panels as f64;
        let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        for &(x, w) in rule {
            let val = f(mid + half * x)?;
            if !val.re.is_finite() || !val.im.is_finite() {
                return Err(Error::QuadratureFailure {
                    context: "kernel quadrature",
                    detail: format!("non-finite integrand at t = {}", mid + half * x),
                });
            }
            acc += w * half * val;
        }
    }
    Ok(acc)
}

/// Shared 64-point Gauss-Legendre rule (same nodes as the phi contour).
pub(crate) fn gauss_legendre_64_pub() -> &'static [(f64, f64); 64] {
    super::phi::gauss_rule()
}

/// Chebyshev interpolant of a smooth complex function on a real interval.
/// Sampling costs one function call per node; evaluation afterwards is a
/// barycentric sum, cheap enough for the dense outer quadratures.
pub(crate) struct LineCache {
    lo: f64,
    hi: f64,
    nodes: Vec<f64>,
    vals: Vec<Complex64>,
}

impl LineCache {
    pub(crate) fn build<F: Fn(f64) -> Result<Complex64>>(
        lo: f64,
        hi: f64,
        n: usize,
        f: F,
    ) -> Result<Self> {
        let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        let mut nodes = Vec::with_capacity(n + 1);
        let mut vals = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let x = mid + half * (PI * k as f64 / n as f64).cos();
            nodes.push(x);
            vals.push(f(x)?);
        }
        Ok(Self { lo, hi, nodes, vals })
    }

    pub(crate) fn eval(&self, x: f64) -> Complex64 {
        debug_assert!(x >= self.lo - 1e-9 && x <= self.hi + 1e-9);
        let n = self.nodes.len() - 1;
        let mut num = c(0.0, 0.0);
        let mut den = c(0.0, 0.0);
        for k in 0..=n {
            let d = x - self.nodes[k];
            if d.abs() < 1e-14 {
                return self.vals[k];
            }
            let mut w = if k % 2 == 0 { 1.0 } else { -1.0 };
            if k == 0 || k == n {
                w *= 0.5;
            }
            let t = c(w / d, 0.0);
            num += t * self.vals[k];
            den += t;
        }
        num / den
    }
}

const FOURIER_THETA: f64 = -PI / 16.0;
const FOURIER_RANGE: f64 = 8.0;

/// Fourier transform of V by quadrature: int e^{2 pi i s x} V_alpha(s) ds,
/// which should reproduce VBar_alpha(x).
///
/// The integration line is rotated by theta = -pi/16: along s = t e^{i theta}
/// the Gaussian factor e^{-i pi s^2} decays like e^{-pi sin(pi/8) t^2}, which
/// tames the oscillation on both tails.  Requires x >= 0 and small Re(alpha)
/// >= 0 so the phi tail does not outrun the plane-wave damping at t -> -inf.
pub struct FourierV {
    rot: Complex64,
    cache: LineCache,
}

impl FourierV {
    /// Samples V_alpha along the rotated line.  The plane wave is applied at
    /// transform time so one sampling pass serves every x.
    pub fn new(alpha: Complex64, p: &DilogParams) -> Result<Self> {
        let rot = c(FOURIER_THETA.cos(), FOURIER_THETA.sin());
        let cache = LineCache::build(-FOURIER_RANGE, FOURIER_RANGE, 320, |t| {
            kernel_funcs(KernelKind::V, alpha, rot * t, p)
        })?;
        // Spot-check the interpolant against direct evaluation.
        for &t in &[-3.137, 0.411, 2.719] {
            let direct = kernel_funcs(KernelKind::V, alpha, rot * t, p)?;
            if (cache.eval(t) - direct).norm() > 1e-8 * (1.0 + direct.norm()) {
                return Err(Error::QuadratureFailure {
                    context: "Fourier line cache",
                    detail: format!("interpolant off by {:.3e} at t = {t}",
                        (cache.eval(t) - direct).norm()),
                });
            }
        }
        Ok(Self { rot, cache })
    }

    /// The transform at plane-wave parameter x.
    pub fn at(&self, x: f64) -> Result<Complex64> {
        let rot = self.rot;
        let f = |t: f64| -> Result<Complex64> {
            Ok((2.0 * PI * I * rot * t * x).exp() * self.cache.eval(t))
        };
        Ok(rot * integrate_panels(-FOURIER_RANGE, FOURIER_RANGE, 0.5, &f)?)
    }
}

/// One-shot Fourier transform of V at a single x.
pub fn fourier_v(alpha: Complex64, x: f64, p: &DilogParams) -> Result<Complex64> {
    FourierV::new(alpha, p)?.at(x)
}

/// Residual of the Fourier duality against the closed form.
pub fn fourier_duality_residual(alpha: Complex64, x: f64, p: &DilogParams) -> Result<f64> {
    let lhs = fourier_v(alpha, x, p)?;
    let rhs = kernel_funcs(KernelKind::VBar, alpha, c(x, 0.0), p)?;
    Ok((lhs - rhs).norm())
}

/// Checks the operator factorization of the kernel: in the coordinate basis
/// the two momentum-dependent factors become Fourier transforms, so the
/// kernel must equal
///
/// ```text
/// V_{b1-a2}(s2-s1) [int e^{2 pi i p (s2'-s1)} V_{a1-a2}(p) dp]
///                  [int e^{2 pi i p (s2-s1')} V_{b1-b2}(p) dp] V_{a1-b2}(s2'-s1'),
/// ```
///
/// with the permutation absorbed into the primed-coordinate routing.  Returns
/// |composed/kernel - 1|.  Stretch check: quadrature-limited accuracy.
pub fn operator_factorization_residual(pt: &KernelPoint, p: &DilogParams) -> Result<f64> {
    let x_a = pt.s2p - pt.s1;
    let x_b = pt.s2 - pt.s1p;
    if x_a.im.abs() > 1e-12 || x_b.im.abs() > 1e-12 {
        return Err(Error::InvalidPoint(
            "operator factorization check needs real coordinate differences".into(),
        ));
    }
    let composed = kernel_funcs(KernelKind::V, pt.beta1 - pt.alpha2, pt.s2 - pt.s1, p)?
        * FourierV::new(pt.alpha1 - pt.alpha2, p)?.at(x_a.re)?
        * FourierV::new(pt.beta1 - pt.beta2, p)?.at(x_b.re)?
        * kernel_funcs(KernelKind::V, pt.alpha1 - pt.beta2, pt.s2p - pt.s1p, p)?;
    let direct = r_kernel(pt, p, false)?;
    Ok((composed / direct - 1.0).norm())
}

/// Finite-epsilon probe of the inversion integral
/// int ds VBar_{alpha+eps}(s-u) VBar*_{alpha-eps}(s-v) -> delta(u-v):
/// smears the first factor with a unit Gaussian e^{-pi u^2} and compares the
/// result at v with the Gaussian itself.  Returns (eps, error) pairs for a
/// decreasing sequence of eps; the error trend should decrease.
pub fn delta_family_trend(
    alpha: Complex64,
    v: f64,
    eps_seq: &[f64],
    p: &DilogParams,
) -> Result<Vec<(f64, f64)>> {
    let range = 12.0;
    let mut rows = Vec::new();
    for &eps in eps_seq {
        // Cache the smooth phi factors once per eps; the explicit Gaussian
        // phase e^{+-i pi x^2} is restored at evaluation time.
        let bar = LineCache::build(-range, range, 256, |x| {
            Ok(phi(I * (alpha + eps - p.eta) - x, p)?.inv())
        })?;
        let star = LineCache::build(-range, range, 256, |x| {
            phi(I * (p.eta + alpha - eps) - x, p)
        })?;
        let vbar = |x: f64| (-I * PI / 8.0 + I * PI * x * x).exp() * bar.eval(x);
        let vbar_star = |x: f64| (I * PI / 8.0 - I * PI * x * x).exp() * star.eval(x);
        let smeared = |s: f64| -> Result<Complex64> {
            let inner = |u: f64| -> Result<Complex64> {
                Ok((-PI * u * u).exp() * vbar(s - u))
            };
            Ok(integrate_panels(-4.0, 4.0, 1.0, &inner)? * vbar_star(s - v))
        };
        let total = integrate_panels(-7.0, 7.0, 1.0, &smeared)?;
        let target = (-PI * v * v).exp();
        rows.push((eps, (total - target).norm()));
    }
    Ok(rows)
}

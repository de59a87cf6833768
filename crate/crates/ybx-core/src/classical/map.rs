//! The classical Yang-Baxter map on the Poisson algebra, in both (k,e,f) and
//! canonical Weyl (u,v,z) coordinates, plus the classical Hopf operations.

use crate::error::{Error, Result};
use crate::numeric::{fd_gradient, GradientConfig};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Pivot magnitudes below this are treated as the map's singular set.
pub const PIVOT_GUARD: f64 = 1e-6;

/// Forward / inverse direction of the Yang-Baxter maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// A point of the classical Poisson algebra: generators (k, e, f).
///
/// The bracket is {k,e} = ke, {k,f} = -kf, {e,f} = k - 1/k, with central
/// element c = ef + k + 1/k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalTriple {
    pub k: Complex64,
    pub e: Complex64,
    pub f: Complex64,
}

impl ClassicalTriple {
    pub fn new(k: Complex64, e: Complex64, f: Complex64) -> Self {
        Self { k, e, f }
    }

    /// The identity-like point (1,0,0): unit Lax matrices, casimir 2.
    pub fn unit() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    fn check(&self) -> Result<()> {
        if self.k.norm() == 0.0 {
            return Err(Error::InvalidPoint("k must be invertible".into()));
        }
        Ok(())
    }
}

/// Canonical Weyl chart: coordinates (u, v) with {log u, log v} = 1, plus the
/// casimir parameter z (c = z + 1/z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylTriple {
    pub u: Complex64,
    pub v: Complex64,
    pub z: Complex64,
}

impl WeylTriple {
    pub fn new(u: Complex64, v: Complex64, z: Complex64) -> Self {
        Self { u, v, z }
    }

    fn check(&self) -> Result<()> {
        if self.u.norm() == 0.0 || self.v.norm() == 0.0 || self.z.norm() == 0.0 {
            return Err(Error::InvalidPoint("u, v, z must all be nonzero".into()));
        }
        Ok(())
    }
}

/// Central element c = ef + k + 1/k.
pub fn casimir(x: &ClassicalTriple) -> Result<Complex64> {
    x.check()?;
    Ok(x.e * x.f + x.k + 1.0 / x.k)
}

/// The Yang-Baxter map in (k,e,f) coordinates.
///
/// Forward: with pivot g = 1 - e1 f2 k2 / k1,
///   k1' = k1 g            k2' = k2 / g
///   e1' = e1 k2           e2' = k1 e2 + e1 - e1 k2^2 / g
///   f1' = f1/k2 + f2 - f2 k1^{-2} / g
///   f2' = f2 / k1
/// Inverse: with pivot h = 1 - e1' f2', the matching unprimed expressions.
pub fn yb_map_kef(
    x1: &ClassicalTriple,
    x2: &ClassicalTriple,
    dir: Direction,
) -> Result<(ClassicalTriple, ClassicalTriple)> {
    x1.check()?;
    x2.check()?;
    match dir {
        Direction::Forward => {
            let g = 1.0 - x1.e * x2.f * x2.k / x1.k;
            if g.norm() < PIVOT_GUARD {
                return Err(Error::SingularMap { context: "yb_map_kef forward", pivot: g });
            }
            let y1 = ClassicalTriple::new(
                x1.k * g,
                x1.e * x2.k,
                x1.f / x2.k + x2.f - x2.f / (x1.k * x1.k) / g,
            );
            let y2 = ClassicalTriple::new(
                x2.k / g,
                x1.k * x2.e + x1.e - x1.e * x2.k * x2.k / g,
                x2.f / x1.k,
            );
            Ok((y1, y2))
        }
        Direction::Inverse => {
            // Here x1, x2 play the role of the primed pair.
            let h = 1.0 - x1.e * x2.f;
            if h.norm() < PIVOT_GUARD {
                return Err(Error::SingularMap { context: "yb_map_kef inverse", pivot: h });
            }
            let (k1p, e1p, f1p) = (x1.k, x1.e, x1.f);
            let (k2p, e2p, f2p) = (x2.k, x2.e, x2.f);
            let y1 = ClassicalTriple::new(
                k1p / h,
                e1p / (k2p * h),
                (f1p + f2p / k1p) * h * k2p - k1p * f2p * k2p,
            );
            let y2 = ClassicalTriple::new(
                k2p * h,
                (e2p + e1p * k2p) * h / k1p - e1p / (k1p * k2p),
                f2p * k1p / h,
            );
            Ok((y1, y2))
        }
    }
}

/// Classical coproduct by set-multiplication: (k1k2, e1k2 + e2, f1 + f2/k1).
pub fn coproduct_pair(x1: &ClassicalTriple, x2: &ClassicalTriple) -> Result<ClassicalTriple> {
    x1.check()?;
    x2.check()?;
    Ok(ClassicalTriple::new(
        x1.k * x2.k,
        x1.e * x2.k + x2.e,
        x1.f + x2.f / x1.k,
    ))
}

/// Which unary Hopf operation to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopfUnary {
    Antipode,
    Counit,
}

/// Classical antipode (1/k, -e/k, -k f) or counit (1, 0, 0).
pub fn hopf_unary(x: &ClassicalTriple, which: HopfUnary) -> Result<ClassicalTriple> {
    x.check()?;
    Ok(match which {
        HopfUnary::Antipode => ClassicalTriple::new(1.0 / x.k, -x.e / x.k, -x.k * x.f),
        HopfUnary::Counit => ClassicalTriple::unit(),
    })
}

/// Embed the Weyl chart into the algebra: (u, v(z-u), v^{-1}(1 - 1/(z u))).
pub fn weyl_embed(w: &WeylTriple) -> Result<ClassicalTriple> {
    w.check()?;
    Ok(ClassicalTriple::new(
        w.u,
        w.v * (w.z - w.u),
        (1.0 - 1.0 / (w.z * w.u)) / w.v,
    ))
}

/// The Yang-Baxter map in the canonical (u,v) chart; z1, z2 pass through
/// unchanged (bitwise).
pub fn yb_map_uv(
    w1: &WeylTriple,
    w2: &WeylTriple,
    dir: Direction,
) -> Result<(WeylTriple, WeylTriple)> {
    w1.check()?;
    w2.check()?;
    let (z1, z2) = (w1.z, w2.z);
    match dir {
        Direction::Forward => {
            let (u1, v1, u2, v2) = (w1.u, w1.v, w2.u, w2.v);
            let g = 1.0 - v1 * (z1 - u1) * (u2 - 1.0 / z2) / (u1 * v2);
            if g.norm() < PIVOT_GUARD {
                return Err(Error::SingularMap { context: "yb_map_uv forward", pivot: g });
            }
            let den = v1 * u2 + (v2 - v1 / z2);
            if den.norm() < PIVOT_GUARD {
                return Err(Error::SingularMap { context: "yb_map_uv forward", pivot: den });
            }
            let w1p = WeylTriple::new(u1 * g, v1 * v2 * u2 / den, z1);
            let w2p = WeylTriple::new(u2 / g, z1 * v1 / z2 + (v2 - v1 / z2) * u1, z2);
            Ok((w1p, w2p))
        }
        Direction::Inverse => {
            let (u1p, v1p, u2p, v2p) = (w1.u, w1.v, w2.u, w2.v);
            let g = 1.0 - v1p * (z1 - u1p) * (u2p - 1.0 / z2) / (v2p * u2p);
            if g.norm() < PIVOT_GUARD {
                return Err(Error::SingularMap { context: "yb_map_uv inverse", pivot: g });
            }
            let den = z1 * v1p / z2 + (v2p - z1 * v1p) * u2p;
            if den.norm() < PIVOT_GUARD {
                return Err(Error::SingularMap { context: "yb_map_uv inverse", pivot: den });
            }
            let w1 = WeylTriple::new(u1p / g, v1p * v2p / den, z1);
            let w2 = WeylTriple::new(u2p * g, v1p + (v2p - z1 * v1p) / u1p, z2);
            Ok((w1, w2))
        }
    }
}

/// Poisson bracket of two scalar observables of a Weyl pair, induced by
/// {log u_i, log v_j} = delta_ij:
///   {F,G} = sum_i u_i v_i (dF/du_i dG/dv_i - dF/dv_i dG/du_i).
pub fn poisson_bracket_numeric<F, G>(
    f: F,
    g: G,
    point: &(WeylTriple, WeylTriple),
    cfg: GradientConfig,
) -> Result<Complex64>
where
    F: Fn(&(WeylTriple, WeylTriple)) -> Result<Complex64>,
    G: Fn(&(WeylTriple, WeylTriple)) -> Result<Complex64>,
{
    let (w1, w2) = *point;
    let coords = [w1.u, w1.v, w2.u, w2.v];
    let rebuild = |x: &[Complex64]| {
        (
            WeylTriple::new(x[0], x[1], w1.z),
            WeylTriple::new(x[2], x[3], w2.z),
        )
    };
    let grad_f = fd_gradient(|x| f(&rebuild(x)), &coords, cfg)?;
    let grad_g = fd_gradient(|x| g(&rebuild(x)), &coords, cfg)?;
    // Coordinate layout: [u1, v1, u2, v2].
    let mut bracket = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        let (ui, vi) = (coords[2 * i], coords[2 * i + 1]);
        bracket += ui * vi * (grad_f[2 * i] * grad_g[2 * i + 1] - grad_f[2 * i + 1] * grad_g[2 * i]);
    }
    Ok(bracket)
}

/// Draw a complex number with log uniform in [-1,1] + i[-1,1].
pub fn sample_log_unit<R: Rng>(rng: &mut R) -> Complex64 {
    let w = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    w.exp()
}

/// Random Weyl triple in the generic sampling domain.
pub fn sample_weyl<R: Rng>(rng: &mut R) -> WeylTriple {
    WeylTriple::new(sample_log_unit(rng), sample_log_unit(rng), sample_log_unit(rng))
}

/// Random algebra triple obtained by pushing a random Weyl point through the
/// chart (guarantees a meaningful casimir and nonzero k).
pub fn sample_kef<R: Rng>(rng: &mut R) -> ClassicalTriple {
    loop {
        if let Ok(x) = weyl_embed(&sample_weyl(rng)) {
            if x.e.norm() > 1e-3 && x.f.norm() > 1e-3 {
                return x;
            }
        }
    }
}

/// Sample a Weyl pair for which the forward map (and its pivot) is
/// comfortably non-singular; bounded retries.
pub fn sample_weyl_pair<R: Rng>(rng: &mut R) -> (WeylTriple, WeylTriple) {
    for _ in 0..1000 {
        let (w1, w2) = (sample_weyl(rng), sample_weyl(rng));
        if yb_map_uv(&w1, &w2, Direction::Forward).is_ok() {
            return (w1, w2);
        }
    }
    panic!("sampling domain exhausted without a non-singular pair");
}

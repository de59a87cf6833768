//! Tau-function solution of the inhomogeneous discrete Liouville equation
//! and its translation back to the lattice variables (u, v).
//!
//! The grid lives in light-cone coordinates x = (x1, x2) with shifts
//! e1 = (1, 0) and e2 = (0, 1). A field stores tau on {0..n1} x {0..n2}
//! together with the four free sequences alpha, beta, phi, gamma that
//! parameterize the general solution.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Tau values on a light-cone grid plus the data that generated them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TauField {
    /// Extent in x1; tau is defined for x1 = 0..=n1.
    pub n1: usize,
    /// Extent in x2; tau is defined for x2 = 0..=n2.
    pub n2: usize,
    /// Row-major in x1: tau[x1 * (n2 + 1) + x2].
    pub tau: Vec<Complex64>,
    /// Inhomogeneity over x1, length n1.
    pub alpha: Vec<Complex64>,
    /// Inhomogeneity over x2, length n2.
    pub beta: Vec<Complex64>,
    /// Free sequence over x1, length n1 + 1.
    pub phi: Vec<Complex64>,
    /// Free sequence over x2, length n2 + 1.
    pub gamma: Vec<Complex64>,
}

impl TauField {
    /// Tau at light-cone point (x1, x2).
    pub fn tau_at(&self, x1: usize, x2: usize) -> Complex64 {
        self.tau[x1 * (self.n2 + 1) + x2]
    }

    fn set_tau(&mut self, x1: usize, x2: usize, value: Complex64) {
        let idx = x1 * (self.n2 + 1) + x2;
        self.tau[idx] = value;
    }

    /// CSV lines `x1,x2,re,im`, one grid point per line, with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x1,x2,re_tau,im_tau\n");
        for x1 in 0..=self.n1 {
            for x2 in 0..=self.n2 {
                let t = self.tau_at(x1, x2);
                out.push_str(&format!("{x1},{x2},{},{}\n", t.re, t.im));
            }
        }
        out
    }
}

/// Builds the general solution tau = (1 + f g) / (phi gamma).
///
/// The accumulators follow first order recursions in which the f-equation
/// carries a negated source, f_{x1+1} - f_{x1} = -alpha_{x1} phi_{x1} phi_{x1+1},
/// while g_{x2+1} - g_{x2} = +beta_{x2} gamma_{x2} gamma_{x2+1}. With both
/// sources positive the bilinear form below picks up the opposite sign of
/// alpha beta; the flipped f-recursion makes the residual vanish identically.
pub fn build_tau(
    alpha: &[Complex64],
    beta: &[Complex64],
    phi: &[Complex64],
    gamma: &[Complex64],
    n1: usize,
    n2: usize,
    f0: Complex64,
    g0: Complex64,
) -> Result<TauField> {
    if alpha.len() != n1 || beta.len() != n2 || phi.len() != n1 + 1 || gamma.len() != n2 + 1 {
        return Err(Error::InvalidPoint(format!(
            "sequence lengths must be alpha:{n1} beta:{n2} phi:{} gamma:{}",
            n1 + 1,
            n2 + 1
        )));
    }
    if phi.iter().any(|p| p.norm() == 0.0) || gamma.iter().any(|g| g.norm() == 0.0) {
        return Err(Error::InvalidPoint("phi and gamma must be nonzero".into()));
    }
    let mut f = vec![f0; n1 + 1];
    for x1 in 0..n1 {
        f[x1 + 1] = f[x1] - alpha[x1] * phi[x1] * phi[x1 + 1];
    }
    let mut g = vec![g0; n2 + 1];
    for x2 in 0..n2 {
        g[x2 + 1] = g[x2] + beta[x2] * gamma[x2] * gamma[x2 + 1];
    }
    let mut field = TauField {
        n1,
        n2,
        tau: vec![c(0.0, 0.0); (n1 + 1) * (n2 + 1)],
        alpha: alpha.to_vec(),
        beta: beta.to_vec(),
        phi: phi.to_vec(),
        gamma: gamma.to_vec(),
    };
    for x1 in 0..=n1 {
        for x2 in 0..=n2 {
            let t = (1.0 + f[x1] * g[x2]) / (phi[x1] * gamma[x2]);
            if t.norm() == 0.0 {
                return Err(Error::DegenerateSolution {
                    x1,
                    x2,
                    what: "tau vanishes at this grid point".into(),
                });
            }
            field.set_tau(x1, x2, t);
        }
    }
    Ok(field)
}

/// Max over interior cells of
/// |tau_{x+e1} tau_{x+e2} - tau_x tau_{x+e1+e2} - alpha_{x1} beta_{x2}|.
pub fn liouville_residual(field: &TauField) -> f64 {
    let mut worst: f64 = 0.0;
    for x1 in 0..field.n1 {
        for x2 in 0..field.n2 {
            let r = field.tau_at(x1 + 1, x2) * field.tau_at(x1, x2 + 1)
                - field.tau_at(x1, x2) * field.tau_at(x1 + 1, x2 + 1)
                - field.alpha[x1] * field.beta[x2];
            worst = worst.max(r.norm());
        }
    }
    worst
}

/// Lattice variables of one light-cone cell.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct UvCell {
    pub u1: Complex64,
    pub u2: Complex64,
    pub v1: Complex64,
    pub v2: Complex64,
}

/// The (u, v) variables obtained from a tau field, one cell per light-cone
/// point of {0..n1-1} x {0..n2-1}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UvLattice {
    pub n1: usize,
    pub n2: usize,
    pub z1: Complex64,
    pub z2: Complex64,
    /// Row-major in x1: cells[x1 * n2 + x2].
    pub cells: Vec<UvCell>,
}

impl UvLattice {
    pub fn cell(&self, x1: usize, x2: usize) -> &UvCell {
        &self.cells[x1 * self.n2 + x2]
    }
}

/// Reads the lattice variables off a tau field:
/// u1 = tau_{x+e2}/tau_x, u2 = tau_x/tau_{x+e1},
/// v1 = beta_{x2}/(z1 tau_x - tau_{x+e2}), v2 = (z2 tau_x - tau_{x+e1})/(z2 alpha_{x1}).
pub fn uv_from_tau(field: &TauField, z1: Complex64, z2: Complex64) -> Result<UvLattice> {
    let mut cells = Vec::with_capacity(field.n1 * field.n2);
    for x1 in 0..field.n1 {
        for x2 in 0..field.n2 {
            let t = field.tau_at(x1, x2);
            let te1 = field.tau_at(x1 + 1, x2);
            let te2 = field.tau_at(x1, x2 + 1);
            let d1 = z1 * t - te2;
            let d2 = z2 * t - te1;
            if d1.norm() == 0.0 || d2.norm() == 0.0 || field.alpha[x1].norm() == 0.0 {
                return Err(Error::DegenerateSolution {
                    x1,
                    x2,
                    what: "pole of the v-variables at this cell".into(),
                });
            }
            cells.push(UvCell {
                u1: te2 / t,
                u2: t / te1,
                v1: field.beta[x2] / d1,
                v2: d2 / (z2 * field.alpha[x1]),
            });
        }
    }
    Ok(UvLattice {
        n1: field.n1,
        n2: field.n2,
        z1,
        z2,
        cells,
    })
}

/// Residual of the four per-cell relations expressing the momenta u in terms
/// of the coordinates v on adjacent cells (Hamiltonian form of the lattice
/// equations of motion, in light-cone labels).
pub fn uv_relations_residual(lat: &UvLattice) -> f64 {
    let (z1, z2) = (lat.z1, lat.z2);
    let mut worst: f64 = 0.0;
    for x1 in 0..lat.n1.saturating_sub(1) {
        for x2 in 0..lat.n2.saturating_sub(1) {
            let x = lat.cell(x1, x2);
            let xe1 = lat.cell(x1 + 1, x2);
            let xe2 = lat.cell(x1, x2 + 1);
            let r1 = x.u1 - z1 * (1.0 - z2 / z1 * xe2.v2 / x.v1) / (1.0 - z2 * x.v2 / x.v1);
            let r2 = x.u2 - (1.0 - z2 * x.v2 / x.v1) / (z2 * (1.0 - x.v2 / xe1.v1));
            let r3 = xe1.u1 - z1 * (1.0 - xe2.v2 / (z1 * xe1.v1)) / (1.0 - x.v2 / xe1.v1);
            let r4 = xe2.u2
                - (1.0 - z2 / z1 * xe2.v2 / x.v1) / (z2 * (1.0 - xe2.v2 / (z1 * xe1.v1)));
            for r in [r1, r2, r3, r4] {
                worst = worst.max(r.norm());
            }
        }
    }
    worst
}

/// Residual of the Lagrangian equations of motion written in the coordinate
/// variables alone. The star around an odd site (v1-type) couples it to four
/// v2 neighbours, and vice versa around an even site. Each star is scored
/// relative to the size of the products being compared: the factors grow
/// with the local v-ratios, and an absolute difference would just measure
/// roundoff amplified by those ratios.
pub fn eom_residual_v(lat: &UvLattice) -> f64 {
    let (z1, z2) = (lat.z1, lat.z2);
    let rel = |lhs: Complex64, rhs: Complex64| {
        (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0)
    };
    let mut worst: f64 = 0.0;
    // Odd central site: v = v1(x); up v2(x+e2), down v2(x-e1),
    // left v2(x-e1+e2), right v2(x).
    for x1 in 1..lat.n1 {
        for x2 in 0..lat.n2.saturating_sub(1) {
            let v = lat.cell(x1, x2).v1;
            let vu = lat.cell(x1, x2 + 1).v2;
            let vd = lat.cell(x1 - 1, x2).v2;
            let vl = lat.cell(x1 - 1, x2 + 1).v2;
            let vr = lat.cell(x1, x2).v2;
            let lhs = (1.0 - vl / (z1 * v)) * (1.0 - z2 * vr / v);
            let rhs = (1.0 - z2 * vu / (z1 * v)) * (1.0 - vd / v);
            worst = worst.max(rel(lhs, rhs));
        }
    }
    // Even central site: v = v2(x); up v1(x+e1), down v1(x-e2),
    // left v1(x), right v1(x+e1-e2).
    for x1 in 0..lat.n1.saturating_sub(1) {
        for x2 in 1..lat.n2 {
            let v = lat.cell(x1, x2).v2;
            let vu = lat.cell(x1 + 1, x2).v1;
            let vd = lat.cell(x1, x2 - 1).v1;
            let vl = lat.cell(x1, x2).v1;
            let vr = lat.cell(x1 + 1, x2 - 1).v1;
            let lhs = (1.0 - v / (z1 * vr)) * (1.0 - z2 * v / vl);
            let rhs = (1.0 - z2 * v / (z1 * vd)) * (1.0 - v / vu);
            worst = worst.max(rel(lhs, rhs));
        }
    }
    worst
}

/// Random smooth solution data on an n1 x n2 grid: sequences near 1 with
/// small inhomogeneities, so tau stays away from zero.
pub fn random_tau_field<R: Rng>(n1: usize, n2: usize, rng: &mut R) -> TauField {
    let mut small = |scale: f64| -> Complex64 {
        c(
            scale * (rng.gen::<f64>() - 0.5),
            scale * (rng.gen::<f64>() - 0.5),
        )
    };
    // Scale the sources down with the extent so the f, g accumulators (and
    // with them tau) stay O(1) on large grids; residuals are absolute.
    let s1 = 1.0 / (n1 as f64).max(4.0);
    let s2 = 1.0 / (n2 as f64).max(4.0);
    loop {
        let alpha: Vec<_> = (0..n1).map(|_| s1 * (c(0.8, 0.0) + small(0.8))).collect();
        let beta: Vec<_> = (0..n2).map(|_| s2 * (c(0.8, 0.0) + small(0.8))).collect();
        let phi: Vec<_> = (0..=n1).map(|_| (small(0.4)).exp()).collect();
        let gamma: Vec<_> = (0..=n2).map(|_| (small(0.4)).exp()).collect();
        if let Ok(field) = build_tau(
            &alpha,
            &beta,
            &phi,
            &gamma,
            n1,
            n2,
            small(0.2),
            small(0.2),
        ) {
            return field;
        }
    }
}

//! Periodic-chain discrete evolution, classical Lax matrices, monodromy
//! traces, conserved coefficients, involutivity and classical r-matrix checks.
//!
//! Square roots of k enter only through a single overall factor
//! (prod_i k_i)^{-1/2} of each monodromy trace; all identity checks are done
//! on the sqrt-free "m-form" matrices m^+ = k^{1/2} l^+, m^- = k^{1/2} l^-,
//! which keeps every residual branch-independent.

use crate::classical::map::{
    sample_weyl, weyl_embed, yb_map_kef, ClassicalTriple, Direction, WeylTriple,
    PIVOT_GUARD,
};
use crate::error::{Error, Result};
use crate::mat::ComplexMatrix;
use crate::numeric::{fd_gradient, fit_poly_lambda2, GradientConfig};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Which Lax matrix to build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LaxKind {
    Plus,
    Minus,
    /// The spectral combination l(lambda) = lambda l^+ - lambda^{-1} l^-.
    Lambda(Complex64),
}

/// A 2x2 Lax matrix sample.
#[derive(Debug, Clone)]
pub struct LaxSample {
    pub kind: LaxKind,
    pub matrix: ComplexMatrix,
}

/// l^+ / l^- / l(lambda) with the principal branch of k^{1/2}.
pub fn lax_matrix(x: &ClassicalTriple, kind: LaxKind) -> Result<LaxSample> {
    if x.k.norm() == 0.0 {
        return Err(Error::InvalidPoint("k must be nonzero for a Lax matrix".into()));
    }
    let s = x.k.sqrt();
    let zero = c(0.0, 0.0);
    let matrix = match kind {
        LaxKind::Plus => {
            ComplexMatrix::from_rows(2, 2, &[s, s * x.f, zero, 1.0 / s]).unwrap()
        }
        LaxKind::Minus => {
            ComplexMatrix::from_rows(2, 2, &[1.0 / s, zero, -x.e / s, s]).unwrap()
        }
        LaxKind::Lambda(l) => {
            if l.norm() == 0.0 {
                return Err(Error::InvalidPoint("lambda must be nonzero".into()));
            }
            let p = lax_matrix(x, LaxKind::Plus)?.matrix;
            let m = lax_matrix(x, LaxKind::Minus)?.matrix;
            p.scale(l).sub(&m.scale(1.0 / l))
        }
    };
    Ok(LaxSample { kind, matrix })
}

/// Sqrt-free form m^+ = k^{1/2} l^+ = [[k, k f],[0, 1]].
pub fn m_plus(x: &ClassicalTriple) -> ComplexMatrix {
    ComplexMatrix::from_rows(2, 2, &[x.k, x.k * x.f, c(0.0, 0.0), c(1.0, 0.0)]).unwrap()
}

/// Sqrt-free form m^- = k^{1/2} l^- = [[1, 0],[-e, k]].
pub fn m_minus(x: &ClassicalTriple) -> ComplexMatrix {
    ComplexMatrix::from_rows(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), -x.e, x.k]).unwrap()
}

/// m(lambda) = lambda m^+ - lambda^{-1} m^- (= k^{1/2} l(lambda)).
pub fn m_lambda(x: &ClassicalTriple, l: Complex64) -> ComplexMatrix {
    m_plus(x).scale(l).sub(&m_minus(x).scale(1.0 / l))
}

/// Classical r-matrix blocks on C^2 (x) C^2 (basis 11,12,21,22).
pub fn r_plus_matrix() -> ComplexMatrix {
    let mut r = ComplexMatrix::zeros(4, 4);
    r[(1, 1)] = c(-0.5, 0.0);
    r[(2, 2)] = c(-0.5, 0.0);
    r[(1, 2)] = c(1.0, 0.0);
    r
}

pub fn r_minus_matrix() -> ComplexMatrix {
    let mut r = ComplexMatrix::zeros(4, 4);
    r[(1, 1)] = c(0.5, 0.0);
    r[(2, 2)] = c(0.5, 0.0);
    r[(2, 1)] = c(-1.0, 0.0);
    r
}

/// r(lambda) = lambda r^+ - lambda^{-1} r^-.
pub fn r_lambda(l: Complex64) -> ComplexMatrix {
    r_plus_matrix().scale(l).sub(&r_minus_matrix().scale(1.0 / l))
}

/// Embed a 4x4 two-slot operator into slots (i,j) of a chain of `slots`
/// 2-dimensional spaces (i < j, 0-based).
pub fn embed_pair_2dim(op: &ComplexMatrix, i: usize, j: usize, slots: usize) -> ComplexMatrix {
    assert!(i < j && j < slots);
    let dim = 1usize << slots;
    ComplexMatrix::from_fn(dim, dim, |row, col| {
        // Decompose indices into per-slot bits (slot 0 is the leftmost factor).
        let bit = |idx: usize, s: usize| (idx >> (slots - 1 - s)) & 1;
        for s in 0..slots {
            if s != i && s != j && bit(row, s) != bit(col, s) {
                return c(0.0, 0.0);
            }
        }
        let r = bit(row, i) * 2 + bit(row, j);
        let q = bit(col, i) * 2 + bit(col, j);
        op[(r, q)]
    })
}

/// Periodic chain of 2N Weyl sites; odd sites carry z1, even sites z2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub n_pairs: usize,
    pub z1: Complex64,
    pub z2: Complex64,
    /// u_1..u_{2N} (0-based storage, 1-based site numbering in formulas).
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

impl ChainState {
    pub fn new(z1: Complex64, z2: Complex64, u: Vec<Complex64>, v: Vec<Complex64>) -> Result<Self> {
        if u.len() != v.len() || u.len() % 2 != 0 || u.is_empty() {
            return Err(Error::InvalidPoint(format!(
                "chain needs matching even-length u,v; got {} and {}",
                u.len(),
                v.len()
            )));
        }
        if u.iter().chain(v.iter()).any(|x| x.norm() == 0.0) || z1.norm() == 0.0 || z2.norm() == 0.0
        {
            return Err(Error::InvalidPoint("chain coordinates must be nonzero".into()));
        }
        Ok(Self { n_pairs: u.len() / 2, z1, z2, u, v })
    }

    pub fn sites(&self) -> usize {
        2 * self.n_pairs
    }

    /// z parameter of 0-based site index (site 1,3,... odd carries z1).
    pub fn site_z(&self, idx: usize) -> Complex64 {
        if idx % 2 == 0 {
            self.z1
        } else {
            self.z2
        }
    }

    /// Algebra triple at a 0-based site index through the Weyl chart.
    pub fn site_triple(&self, idx: usize) -> Result<ClassicalTriple> {
        weyl_embed(&WeylTriple::new(self.u[idx], self.v[idx], self.site_z(idx)))
    }

    /// Random generic chain state.
    pub fn sample<R: Rng>(n_pairs: usize, rng: &mut R) -> Self {
        loop {
            let z1 = sample_weyl(rng).z;
            let z2 = sample_weyl(rng).z;
            let u: Vec<_> = (0..2 * n_pairs).map(|_| sample_weyl(rng).u).collect();
            let v: Vec<_> = (0..2 * n_pairs).map(|_| sample_weyl(rng).u).collect();
            if let Ok(state) = Self::new(z1, z2, u, v) {
                if evolve_step(&state).is_ok() {
                    return state;
                }
            }
        }
    }
}

/// One step of the discrete time evolution (periodic boundary).
pub fn evolve_step(state: &ChainState) -> Result<ChainState> {
    let nn = state.sites();
    let (z1, z2) = (state.z1, state.z2);
    let mut u = vec![c(0.0, 0.0); nn];
    let mut v = vec![c(0.0, 0.0); nn];
    for n in 1..=state.n_pairs {
        let o = 2 * n - 2; // site 2n-1
        let e = 2 * n - 1; // site 2n
        let (uo, vo, ue, ve) = (state.u[o], state.v[o], state.u[e], state.v[e]);
        let g = 1.0 - vo * (z1 - uo) * (ue - 1.0 / z2) / (uo * ve);
        if g.norm() < PIVOT_GUARD {
            return Err(Error::EvolutionSingularity { cell: n, g });
        }
        let next_odd = (o + 2) % nn; // site 2n+1 with wrap-around
        u[next_odd] = uo * g;
        let vden = 1.0 / ve + (1.0 / vo - 1.0 / (z2 * ve)) / ue;
        if vden.norm() < PIVOT_GUARD {
            return Err(Error::EvolutionSingularity { cell: n, g: vden });
        }
        v[next_odd] = 1.0 / vden;
        u[e] = ue / g;
        v[e] = z1 * vo / z2 + (ve - vo / z2) * uo;
    }
    ChainState::new(z1, z2, u, v)
}

/// Which monodromy trace to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    /// t(lambda) = tr prod_n l_{2n-1}(lambda) l^+_{2n}
    T,
    /// tbar(lambda) = tr prod_n l^-_{2n-1} l_{2n}(lambda)
    TBar,
}

/// Product of all site k's; conserved by the evolution (cellwise k1'k2'=k1k2).
fn total_k(state: &ChainState) -> Result<Complex64> {
    let mut p = c(1.0, 0.0);
    for i in 0..state.sites() {
        p *= state.site_triple(i)?.k;
    }
    Ok(p)
}

/// Monodromy trace; the common (prod k)^{-1/2} prefactor is taken as one
/// principal square root of the conserved product, so the value is exactly
/// invariant under `evolve_step` at fixed branch.
pub fn monodromy_trace(state: &ChainState, lambda: Complex64, which: TraceKind) -> Result<Complex64> {
    if lambda.norm() == 0.0 {
        return Err(Error::InvalidPoint("lambda must be nonzero".into()));
    }
    let mut prod = ComplexMatrix::identity(2);
    for n in 1..=state.n_pairs {
        let xo = state.site_triple(2 * n - 2)?;
        let xe = state.site_triple(2 * n - 1)?;
        let (a, b) = match which {
            TraceKind::T => (m_lambda(&xo, lambda), m_plus(&xe)),
            TraceKind::TBar => (m_minus(&xo), m_lambda(&xe, lambda)),
        };
        prod = prod.mul(&a).mul(&b);
    }
    Ok(prod.trace() / total_k(state)?.sqrt())
}

/// Spectral sample grid shared by the classical and quantum fits.
pub fn lambda_grid(n: usize) -> Vec<Complex64> {
    (0..=n)
        .map(|k| c(2f64.powf(k as f64 / (n as f64 + 1.0)), 0.0))
        .collect()
}

/// Coefficients of t(lambda) = lambda^N sum_n c_n lambda^{-2n} and
/// tbar(lambda) = lambda^{-N} sum_n cbar_n lambda^{2n}.
pub fn im_coefficients(state: &ChainState) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = state.n_pairs;
    let grid = lambda_grid(n);
    let t_samples: Vec<_> = grid
        .iter()
        .map(|&l| Ok((l, monodromy_trace(state, l, TraceKind::T)?)))
        .collect::<Result<_>>()?;
    // tbar's expansion in lambda^{+2} becomes a lambda^{-2} expansion in 1/lambda.
    let tbar_samples: Vec<_> = grid
        .iter()
        .map(|&l| Ok((1.0 / l, monodromy_trace(state, l, TraceKind::TBar)?)))
        .collect::<Result<_>>()?;
    Ok((
        fit_poly_lambda2(&t_samples, n, n as i32)?,
        fit_poly_lambda2(&tbar_samples, n, n as i32)?,
    ))
}

/// Poisson bracket of two chain observables induced by the canonical site
/// brackets {log u_i, log v_i} = 1.
pub fn chain_poisson_bracket<F, G>(
    f: F,
    g: G,
    state: &ChainState,
    cfg: GradientConfig,
) -> Result<Complex64>
where
    F: Fn(&ChainState) -> Result<Complex64>,
    G: Fn(&ChainState) -> Result<Complex64>,
{
    let nn = state.sites();
    let mut coords = Vec::with_capacity(2 * nn);
    coords.extend_from_slice(&state.u);
    coords.extend_from_slice(&state.v);
    let rebuild = |x: &[Complex64]| {
        ChainState::new(state.z1, state.z2, x[..nn].to_vec(), x[nn..].to_vec())
    };
    let grad_f = fd_gradient(|x| f(&rebuild(x)?), &coords, cfg)?;
    let grad_g = fd_gradient(|x| g(&rebuild(x)?), &coords, cfg)?;
    let mut bracket = c(0.0, 0.0);
    for i in 0..nn {
        bracket += coords[i]
            * coords[nn + i]
            * (grad_f[i] * grad_g[nn + i] - grad_f[nn + i] * grad_g[i]);
    }
    Ok(bracket)
}

/// Max residual of J Pi J^T = Pi for a holomorphic map given in log
/// coordinates (first half "positions" log u, second half log v).
pub fn symplectic_residual<M>(map: M, logs: &[Complex64], cfg: GradientConfig) -> Result<f64>
where
    M: Fn(&[Complex64]) -> Result<Vec<Complex64>>,
{
    let dim = logs.len();
    assert!(dim % 2 == 0);
    let half = dim / 2;
    // Jacobian column by column via central differences.
    let mut jac = ComplexMatrix::zeros(dim, dim);
    let h = cfg.step;
    let mut probe = logs.to_vec();
    for b in 0..dim {
        probe[b] = logs[b] + c(h, 0.0);
        let fp = map(&probe)?;
        probe[b] = logs[b] - c(h, 0.0);
        let fm = map(&probe)?;
        probe[b] = logs[b];
        for a in 0..dim {
            jac[(a, b)] = (fp[a] - fm[a]) / c(2.0 * h, 0.0);
        }
    }
    // Poisson tensor Pi = [[0, I],[-I, 0]] in (log u | log v) layout.
    let mut pi = ComplexMatrix::zeros(dim, dim);
    for i in 0..half {
        pi[(i, half + i)] = c(1.0, 0.0);
        pi[(half + i, i)] = c(-1.0, 0.0);
    }
    let jt = ComplexMatrix::from_fn(dim, dim, |i, j| jac[(j, i)]);
    Ok(jac.mul(&pi).mul(&jt).sub(&pi).norm_max())
}

/// Symplecticity residual of one evolution step in log coordinates.
pub fn evolve_symplectic_residual(state: &ChainState, cfg: GradientConfig) -> Result<f64> {
    let nn = state.sites();
    let mut logs = Vec::with_capacity(2 * nn);
    logs.extend(state.u.iter().map(|x| x.ln()));
    logs.extend(state.v.iter().map(|x| x.ln()));
    symplectic_residual(
        |x: &[Complex64]| {
            let u: Vec<_> = x[..nn].iter().map(|w| w.exp()).collect();
            let v: Vec<_> = x[nn..].iter().map(|w| w.exp()).collect();
            let next = evolve_step(&ChainState::new(state.z1, state.z2, u, v)?)?;
            let mut out = Vec::with_capacity(2 * nn);
            out.extend(next.u.iter().map(|w| w.ln()));
            out.extend(next.v.iter().map(|w| w.ln()));
            Ok(out)
        },
        &logs,
        cfg,
    )
}

/// Residuals of the zero-curvature identities for a mapped pair, the
/// Sklyanin bracket relation, and the classical Yang-Baxter equation for
/// r(lambda). Keys: zcr_pp, zcr_mp, zcr_mm, zcr2_lp, zcr2_ml, sklyanin, cybe.
pub fn residual_suite<R: Rng>(
    x1: &ClassicalTriple,
    x2: &ClassicalTriple,
    lambdas: &[Complex64],
    rng: &mut R,
) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    let (y1, y2) = yb_map_kef(x1, x2, Direction::Forward)?;

    // Zero curvature: m1+ m2+ = m2'+ m1'+ and friends (common scalar
    // prefactors cancel because k1 k2 is preserved by the map).
    let res = |a: &ComplexMatrix, b: &ComplexMatrix| a.sub(b).norm_max();
    out.insert(
        "zcr_pp".into(),
        res(&m_plus(x1).mul(&m_plus(x2)), &m_plus(&y2).mul(&m_plus(&y1))),
    );
    out.insert(
        "zcr_mp".into(),
        res(&m_minus(x1).mul(&m_plus(x2)), &m_plus(&y2).mul(&m_minus(&y1))),
    );
    out.insert(
        "zcr_mm".into(),
        res(&m_minus(x1).mul(&m_minus(x2)), &m_minus(&y2).mul(&m_minus(&y1))),
    );
    let mut zcr2_lp: f64 = 0.0;
    let mut zcr2_ml: f64 = 0.0;
    for &l in lambdas {
        zcr2_lp = zcr2_lp.max(res(
            &m_lambda(x1, l).mul(&m_plus(x2)),
            &m_plus(&y2).mul(&m_lambda(&y1, l)),
        ));
        zcr2_ml = zcr2_ml.max(res(
            &m_minus(x1).mul(&m_lambda(x2, l)),
            &m_lambda(&y2, l).mul(&m_minus(&y1)),
        ));
    }
    out.insert("zcr2_lp".into(), zcr2_lp);
    out.insert("zcr2_ml".into(), zcr2_ml);

    // Sklyanin bracket {l(lambda) (x), l(mu)} = [r(lambda/mu), l(lambda) (x) l(mu)]
    // for one site, with brackets through the Weyl chart.
    let w = sample_weyl(rng);
    let mut sk: f64 = 0.0;
    for &(l, m) in &[(lambdas[0], lambdas[lambdas.len() - 1]), (lambdas[1 % lambdas.len()], lambdas[0])] {
        sk = sk.max(sklyanin_residual(&w, l, m, GradientConfig::default())?);
    }
    out.insert("sklyanin".into(), sk);

    // Classical Yang-Baxter equation for r(lambda) on three 2-dim slots.
    let mut cy: f64 = 0.0;
    for &(l, m) in &[(lambdas[0], lambdas[lambdas.len() - 1]), (c(1.3, 0.4), c(0.8, -0.2))] {
        cy = cy.max(cybe_residual(l, m));
    }
    out.insert("cybe".into(), cy);
    Ok(out)
}

/// [r12(l), r13(lm)] + [r12(l), r23(m)] + [r13(lm), r23(m)] on C^2 x C^2 x C^2.
///
/// The identity is exact for the normalized matrix r(lambda)/(lambda -
/// lambda^{-1}); the bare r(lambda) satisfies it only modulo that scalar
/// factor (which also drops out of the Sklyanin commutator, where the bare
/// form is the right one). Requires lambda*mu != 1 (pole of the
/// normalization).
pub fn cybe_residual(l: Complex64, m: Complex64) -> f64 {
    let norm = |s: Complex64| r_lambda(s).scale(1.0 / (s - 1.0 / s));
    let r12 = embed_pair_2dim(&norm(l), 0, 1, 3);
    let r13 = embed_pair_2dim(&norm(l * m), 0, 2, 3);
    let r23 = embed_pair_2dim(&norm(m), 1, 2, 3);
    r12.commutator(&r13)
        .add(&r12.commutator(&r23))
        .add(&r13.commutator(&r23))
        .norm_max()
}

/// Single-site Sklyanin relation residual at spectral parameters (l, m).
pub fn sklyanin_residual(
    w: &WeylTriple,
    l: Complex64,
    m: Complex64,
    cfg: GradientConfig,
) -> Result<f64> {
    let entry = |coords: &[Complex64], spectral: Complex64, i: usize, j: usize| -> Result<Complex64> {
        let x = weyl_embed(&WeylTriple::new(coords[0], coords[1], w.z))?;
        Ok(lax_matrix(&x, LaxKind::Lambda(spectral))?.matrix[(i, j)])
    };
    let point = [w.u, w.v];
    // Gradients of all four entries of l(lambda) and l(mu).
    let mut grads_l = Vec::new();
    let mut grads_m = Vec::new();
    let mut val_l = ComplexMatrix::zeros(2, 2);
    let mut val_m = ComplexMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            grads_l.push(fd_gradient(|x| entry(x, l, i, j), &point, cfg)?);
            grads_m.push(fd_gradient(|x| entry(x, m, i, j), &point, cfg)?);
            val_l[(i, j)] = entry(&point, l, i, j)?;
            val_m[(i, j)] = entry(&point, m, i, j)?;
        }
    }
    let uv = w.u * w.v;
    // {A_ij, B_kl} = u v (dA/du dB/dv - dA/dv dB/du).
    let lhs = ComplexMatrix::from_fn(4, 4, |row, colidx| {
        let (i, k) = (row / 2, row % 2);
        let (j, lcol) = (colidx / 2, colidx % 2);
        let ga = &grads_l[i * 2 + j];
        let gb = &grads_m[k * 2 + lcol];
        uv * (ga[0] * gb[1] - ga[1] * gb[0])
    });
    let tensor = val_l.kron(&val_m);
    // The relation closes with the normalized matrix r(s) / (s - 1/s), the
    // same normalization under which r satisfies the Yang-Baxter equation.
    let s = l / m;
    let r = r_lambda(s).scale(c(1.0, 0.0) / (s - s.inv()));
    let rhs = tensor.commutator(&r);
    Ok(lhs.sub(&rhs).norm_max())
}

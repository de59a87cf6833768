//! Dilogarithm Lagrangian of the lattice model: density on one plaquette,
//! total action on a space-time field, stationarity checks, and the
//! generating-function characterization of the map.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::map::{yb_map_uv, Direction, WeylTriple};
use crate::error::{Error, Result};
use crate::liouville::UvLattice;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const PI: f64 = std::f64::consts::PI;

/// Even-index Bernoulli numbers B_2..B_30 for the log-series of the
/// dilogarithm.
const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Euler dilogarithm on the principal branch (cut along [1, inf)).
///
/// Arguments are first mapped into |x| <= 1, Re x <= 1/2 by the inversion
/// and reflection identities; there the series in w = -log(1 - x) converges
/// to double precision in at most fifteen even-order terms.
pub fn li2(x: Complex64) -> Result<Complex64> {
    if x.im == 0.0 && x.re > 1.0 {
        return Err(Error::BranchAmbiguity(x));
    }
    if x == c(1.0, 0.0) || x == c(1.0, -0.0) {
        return Ok(c(PI * PI / 6.0, 0.0));
    }
    let mut shift = c(0.0, 0.0);
    let mut sign = 1.0;
    let mut z = x;
    if z.norm() > 1.0 {
        // Li2(x) = -Li2(1/x) - pi^2/6 - log^2(-x)/2.
        shift -= c(PI * PI / 6.0, 0.0) + (-z).ln().powi(2) / 2.0;
        sign = -sign;
        z = z.inv();
    }
    if z.re > 0.5 {
        // Li2(z) = pi^2/6 - log(z) log(1-z) - Li2(1-z).
        shift += sign * (c(PI * PI / 6.0, 0.0) - z.ln() * (1.0 - z).ln());
        sign = -sign;
        z = 1.0 - z;
    }
    let w = -(1.0 - z).ln();
    let mut sum = w - w * w / 4.0;
    let mut w_pow = w; // w^(2k-1)
    let mut fact = 1.0; // (2k+1)!
    let w2 = w * w;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let n = 2 * (k + 1);
        w_pow *= w2;
        fact *= (n * (n + 1)) as f64;
        let term = b * w_pow / fact;
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1.0) {
            break;
        }
    }
    Ok(shift + sign * sum)
}

/// The pair lambda_a(s) = -s^2/2 - Li2(-e^{-s-a}) and
/// lambdabar_a(s) = s^2/2 + Li2(e^{-s-a}) together with their closed-form
/// derivatives -log(e^s + e^{-a}) and log(e^s - e^{-a}).
pub fn lambda_pair(a: Complex64, s: Complex64) -> Result<(Complex64, Complex64, Complex64, Complex64)> {
    let e = (-s - a).exp();
    let lam = -s * s / 2.0 - li2(-e)?;
    let lam_bar = s * s / 2.0 + li2(e)?;
    let dlam = -(s.exp() + (-a).exp()).ln();
    let dlam_bar = (s.exp() - (-a).exp()).ln();
    Ok((lam, lam_bar, dlam, dlam_bar))
}

/// Symmetrized variant used by the three-point kernels:
/// s^2/2 + Li2(e^{-s-a}) + Li2(e^{s-a}).
pub fn lambda_bar_sym(a: Complex64, s: Complex64) -> Result<Complex64> {
    Ok(s * s / 2.0 + li2((-s - a).exp())? + li2((s - a).exp())?)
}

/// Derivative of [`lambda_bar_sym`] in s: log(e^s - e^{-a}) - log(1 - e^{s-a}).
pub fn lambda_bar_sym_deriv(a: Complex64, s: Complex64) -> Complex64 {
    (s.exp() - (-a).exp()).ln() - (1.0 - (s - a).exp()).ln()
}

/// Quasiclassical spectral parameters. The lattice z's they induce are
/// z_i = -e^{b_i - a_i}.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LagrangianParams {
    pub a1: Complex64,
    pub a2: Complex64,
    pub b1: Complex64,
    pub b2: Complex64,
}

impl LagrangianParams {
    pub fn z1(&self) -> Complex64 {
        -(self.b1 - self.a1).exp()
    }

    pub fn z2(&self) -> Complex64 {
        -(self.b2 - self.a2).exp()
    }

    /// Parameters reproducing given lattice z's, with the residual gauge in
    /// the b's fixed to small constants.
    pub fn for_z(z1: Complex64, z2: Complex64) -> Result<Self> {
        if z1.norm() == 0.0 || z2.norm() == 0.0 {
            return Err(Error::InvalidPoint("z parameters must be nonzero".into()));
        }
        let (b1, b2) = (c(0.1, 0.0), c(-0.2, 0.0));
        Ok(Self {
            a1: b1 - (-z1).ln(),
            a2: b2 - (-z2).ln(),
            b1,
            b2,
        })
    }
}

/// Lagrangian density on one plaquette:
/// L = lambda_{b1-a2}(s2-s1) + lambda_{a1-b2}(s2'-s1')
///   + lambdabar_{a1-a2}(s2'-s1) + lambdabar_{b1-b2}(s2-s1').
pub fn lagrangian_density(
    s1: Complex64,
    s2: Complex64,
    s1p: Complex64,
    s2p: Complex64,
    p: &LagrangianParams,
) -> Result<Complex64> {
    let (l1, _, _, _) = lambda_pair(p.b1 - p.a2, s2 - s1)?;
    let (l2, _, _, _) = lambda_pair(p.a1 - p.b2, s2p - s1p)?;
    let (_, l3, _, _) = lambda_pair(p.a1 - p.a2, s2p - s1)?;
    let (_, l4, _, _) = lambda_pair(p.b1 - p.b2, s2 - s1p)?;
    Ok(l1 + l2 + l3 + l4)
}

/// Partial derivatives of the density in its four slot variables, via the
/// closed-form lambda derivatives.
pub fn lagrangian_density_grad(
    s1: Complex64,
    s2: Complex64,
    s1p: Complex64,
    s2p: Complex64,
    p: &LagrangianParams,
) -> Result<[Complex64; 4]> {
    let (_, _, d1, _) = lambda_pair(p.b1 - p.a2, s2 - s1)?;
    let (_, _, d2, _) = lambda_pair(p.a1 - p.b2, s2p - s1p)?;
    let (_, _, _, d3) = lambda_pair(p.a1 - p.a2, s2p - s1)?;
    let (_, _, _, d4) = lambda_pair(p.b1 - p.b2, s2 - s1p)?;
    Ok([-d1 - d3, d1 + d4, -d2 - d4, d2 + d3])
}

/// Coordinate field sigma_{k,t} on sites k = 1..2N, t = 0..T. Rows t = 0
/// and t = T are boundary data; stationarity is asked only at the interior.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmaField {
    /// Number of site pairs N; the spatial extent is 2N.
    pub n_pairs: usize,
    /// Largest time index T.
    pub t_max: usize,
    /// Whether the k-direction really closes. Fields read off an open
    /// tau-function solution keep the flag false: the wrap-around plaquette
    /// is still summed, but sites it touches carry no stationarity claim.
    pub periodic_k: bool,
    /// Row-major by time: sigma[t * 2N + (k - 1)].
    pub sigma: Vec<Complex64>,
}

impl SigmaField {
    pub fn at(&self, k: usize, t: usize) -> Complex64 {
        self.sigma[t * 2 * self.n_pairs + (k - 1)]
    }

    /// Site index with spatial wrap-around, 1-based.
    fn wrap_k(&self, k: usize) -> usize {
        (k - 1) % (2 * self.n_pairs) + 1
    }
}

/// Reads a sigma field off the coordinate half of a solution lattice using
/// sigma = b + log v. Pair n at time t sits at light-cone cell
/// (n-1, t + N - n); the caller picks t_max small enough for the extents.
pub fn sigma_from_uv(lat: &UvLattice, t_max: usize, p: &LagrangianParams) -> Result<SigmaField> {
    let n = lat.n1;
    if n == 0 || t_max + n > lat.n2 + 1 {
        return Err(Error::InvalidPoint(format!(
            "need t_max + n1 <= n2 + 1, got t_max {t_max} for {}x{} lattice",
            lat.n1, lat.n2
        )));
    }
    let mut sigma = Vec::with_capacity((t_max + 1) * 2 * n);
    for t in 0..=t_max {
        for pair in 1..=n {
            let cell = lat.cell(pair - 1, t + n - pair);
            sigma.push(p.b1 + cell.v1.ln());
            sigma.push(p.b2 + cell.v2.ln());
        }
    }
    Ok(SigmaField {
        n_pairs: n,
        t_max,
        periodic_k: false,
        sigma,
    })
}

/// Reduces a value to its nearest 2 pi i translate, returning the remainder
/// and the winding integer that was removed.
pub fn reduce_mod_2pii(x: Complex64) -> (Complex64, i64) {
    let winding = (x.im / (2.0 * PI)).round() as i64;
    (x - c(0.0, 2.0 * PI * winding as f64), winding)
}

/// Total action sum_{n,t} L(s_{2n-1,t}, s_{2n,t}, s_{2n+1,t+1}, s_{2n,t+1})
/// and its analytic gradient over the interior rows t = 1..T-1. Gradient
/// entries are reduced mod 2 pi i (log branch alignment); for open fields
/// the entries at the seam sites k = 1, 2N-1, 2N are not meaningful.
pub fn action_and_gradient(
    field: &SigmaField,
    p: &LagrangianParams,
) -> Result<(Complex64, Vec<Complex64>)> {
    let nn = 2 * field.n_pairs;
    let mut action = c(0.0, 0.0);
    let mut grad = vec![c(0.0, 0.0); (field.t_max + 1) * nn];
    for t in 0..field.t_max {
        for n in 1..=field.n_pairs {
            let (k1, k2, k3) = (2 * n - 1, 2 * n, field.wrap_k(2 * n + 1));
            let s1 = field.at(k1, t);
            let s2 = field.at(k2, t);
            let s1p = field.at(k3, t + 1);
            let s2p = field.at(k2, t + 1);
            action += lagrangian_density(s1, s2, s1p, s2p, p)?;
            let g = lagrangian_density_grad(s1, s2, s1p, s2p, p)?;
            grad[t * nn + k1 - 1] += g[0];
            grad[t * nn + k2 - 1] += g[1];
            grad[(t + 1) * nn + k3 - 1] += g[2];
            grad[(t + 1) * nn + k2 - 1] += g[3];
        }
    }
    let interior: Vec<Complex64> = (1..field.t_max)
        .flat_map(|t| (0..nn).map(move |k| (t, k)))
        .map(|(t, k)| reduce_mod_2pii(grad[t * nn + k]).0)
        .collect();
    Ok((action, interior))
}

/// Max-norm of the interior gradient, excluding the spatial seam sites when
/// the field does not close periodically.
pub fn interior_gradient_max(field: &SigmaField, interior: &[Complex64]) -> f64 {
    let nn = 2 * field.n_pairs;
    let mut worst: f64 = 0.0;
    for (idx, g) in interior.iter().enumerate() {
        let k = idx % nn + 1;
        if !field.periodic_k && (k == 1 || k == nn - 1 || k == nn) {
            continue;
        }
        worst = worst.max(g.norm());
    }
    worst
}

/// Checks that the density generates the map: with v_i = e^{s_i - b_i},
/// the slot derivatives must equal -log u_i and +log u_i' modulo 2 pi i.
/// Returns the four reduced residual magnitudes and their windings.
pub fn generating_check(
    w1: &WeylTriple,
    w2: &WeylTriple,
    p: &LagrangianParams,
) -> Result<([f64; 4], [i64; 4])> {
    for (z, pz) in [(w1.z, p.z1()), (w2.z, p.z2())] {
        if (z - pz).norm() > 1e-10 {
            return Err(Error::InvalidPoint(format!(
                "params imply z = {pz} but the map point carries z = {z}"
            )));
        }
    }
    let (w1p, w2p) = yb_map_uv(w1, w2, Direction::Forward)?;
    let s1 = p.b1 + w1.v.ln();
    let s2 = p.b2 + w2.v.ln();
    let s1p = p.b1 + w1p.v.ln();
    let s2p = p.b2 + w2p.v.ln();
    let g = lagrangian_density_grad(s1, s2, s1p, s2p, p)?;
    let targets = [-w1.u.ln(), -w2.u.ln(), w1p.u.ln(), w2p.u.ln()];
    let mut res = [0.0; 4];
    let mut winds = [0i64; 4];
    for i in 0..4 {
        let (r, w) = reduce_mod_2pii(g[i] - targets[i]);
        res[i] = r.norm();
        winds[i] = w;
    }
    Ok((res, winds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::map::sample_weyl_pair;
    use crate::liouville::{random_tau_field, uv_from_tau};
    use crate::numeric::{fd_gradient, GradientConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn li2_small_values() {
        assert_eq!(li2(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let x = c(1e-4, 0.0);
        let approx = x + x * x / 4.0;
        assert!((li2(x).unwrap() - approx).norm() < 1e-12);
    }

    #[test]
    fn li2_known_points() {
        // Partial-sum oracle for Li2(x) = sum x^k / k^2 inside the disk,
        // plus the limit value at x -> 1 from the zeta series.
        let zeta2: f64 = (1..200000).map(|k| 1.0 / (k as f64 * k as f64)).sum();
        let near_one = li2(c(1.0 - 1e-12, 1e-12)).unwrap();
        assert!((near_one.re - zeta2).abs() < 1e-4);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let x = c(
                0.9 * (rng.gen::<f64>() - 0.5),
                0.9 * (rng.gen::<f64>() - 0.5),
            );
            let series: Complex64 = (1..400).rev().map(|k| x.powi(k) / ((k * k) as f64)).sum();
            assert!((li2(x).unwrap() - series).norm() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn lambda_bar_sym_deriv_matches_difference_quotient() {
        let a = c(0.5, 0.1);
        let s = c(0.3, -0.05);
        let h = 1e-6;
        let fd = (lambda_bar_sym(a, s + c(h, 0.0)).unwrap()
            - lambda_bar_sym(a, s - c(h, 0.0)).unwrap())
            / (2.0 * h);
        assert!((fd - lambda_bar_sym_deriv(a, s)).norm() < 1e-8);
    }

    #[test]
    fn li2_branch_cut_rejected() {
        assert!(matches!(li2(c(2.0, 0.0)), Err(Error::BranchAmbiguity(_))));
        assert!((li2(c(1.0, 0.0)).unwrap() - c(PI * PI / 6.0, 0.0)).norm() < 1e-14);
        assert!(li2(c(2.0, 1e-9)).is_ok());
    }

    #[test]
    fn li2_large_and_mid_arguments() {
        // The inversion identity itself, checked against the defining
        // integral evaluated by simple quadrature along a straight path.
        let quad = |x: Complex64| -> Complex64 {
            let n = 400_000;
            let mut sum = c(0.0, 0.0);
            for i in 0..n {
                let t = x * ((i as f64 + 0.5) / n as f64);
                sum += -(1.0 - t).ln() / t * (x / n as f64);
            }
            sum
        };
        for x in [c(-3.0, 0.5), c(0.4, 0.8), c(1.5, 1.5), c(-0.2, -1.9)] {
            assert!((li2(x).unwrap() - quad(x)).norm() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn lambda_derivatives_match_fd() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let cfg = GradientConfig::default();
        for _ in 0..200 {
            let a = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let s = c(
                2.0 * (rng.gen::<f64>() - 0.5),
                2.0 * (rng.gen::<f64>() - 0.5),
            );
            let (_, _, dl, dlb) = lambda_pair(a, s).unwrap();
            let g1 = fd_gradient(
                |x| Ok(lambda_pair(a, x[0])?.0),
                &[s],
                cfg,
            )
            .unwrap();
            let g2 = fd_gradient(
                |x| Ok(lambda_pair(a, x[0])?.1),
                &[s],
                cfg,
            )
            .unwrap();
            // The closed forms recombine sigma into one log, which can land
            // on the other side of the cut; compare up to winding.
            assert!(reduce_mod_2pii(g1[0] - dl).0.norm() < 1e-7);
            assert!(reduce_mod_2pii(g2[0] - dlb).0.norm() < 1e-7);
        }
        let (_, _, d0, _) = lambda_pair(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((d0 + 2f64.ln()).norm() < 1e-14);
    }

    #[test]
    fn density_at_coincident_points() {
        let p = LagrangianParams {
            a1: c(0.3, 0.1),
            a2: c(-0.2, 0.4),
            b1: c(0.3, 0.1),
            b2: c(-0.2, 0.4),
        };
        let s = c(0.7, -0.3);
        let direct = lagrangian_density(s, s, s, s, &p).unwrap();
        let expect = lambda_pair(p.b1 - p.a2, c(0.0, 0.0)).unwrap().0
            + lambda_pair(p.a1 - p.b2, c(0.0, 0.0)).unwrap().0
            + lambda_pair(p.a1 - p.a2, c(0.0, 0.0)).unwrap().1
            + lambda_pair(p.b1 - p.b2, c(0.0, 0.0)).unwrap().1;
        assert!((direct - expect).norm() < 1e-13);
    }

    #[test]
    fn generating_function_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let mut checked = 0;
        while checked < 20 {
            let (w1, w2) = sample_weyl_pair(&mut rng);
            let p = LagrangianParams::for_z(w1.z, w2.z).unwrap();
            match generating_check(&w1, &w2, &p) {
                Ok((res, _winds)) => {
                    for r in res {
                        assert!(r < 1e-8, "residual {r:.3e}");
                    }
                    checked += 1;
                }
                Err(Error::BranchAmbiguity(_)) => continue,
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn generating_function_trivial_cell() {
        // u1 = z1 makes the map pivot equal one; the generating relations
        // must still close there.
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let (w1, w2) = sample_weyl_pair(&mut rng);
        let w1 = WeylTriple::new(w1.z, w1.v, w1.z);
        let p = LagrangianParams::for_z(w1.z, w2.z).unwrap();
        let (res, _) = generating_check(&w1, &w2, &p).unwrap();
        for r in res {
            assert!(r < 1e-8, "residual {r:.3e}");
        }
    }

    #[test]
    fn stationarity_of_tau_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let f = random_tau_field(4, 10, &mut rng);
        let p = LagrangianParams::for_z(c(1.4, 0.3), c(0.7, -0.2)).unwrap();
        let lat = uv_from_tau(&f, p.z1(), p.z2()).unwrap();
        let field = sigma_from_uv(&lat, 5, &p).unwrap();
        let (_, interior) = action_and_gradient(&field, &p).unwrap();
        let worst = interior_gradient_max(&field, &interior);
        assert!(worst < 1e-8, "gradient {worst:.3e}");
        // A perturbed field is no longer stationary.
        let mut bad = field.clone();
        let idx = 2 * bad.n_pairs + 3;
        bad.sigma[idx] += c(0.05, 0.0);
        let (_, interior) = action_and_gradient(&bad, &p).unwrap();
        assert!(interior_gradient_max(&bad, &interior) > 1e-3);
    }

    #[test]
    fn analytic_gradient_matches_fd() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let f = random_tau_field(3, 8, &mut rng);
        let p = LagrangianParams::for_z(c(1.4, 0.3), c(0.7, -0.2)).unwrap();
        let lat = uv_from_tau(&f, p.z1(), p.z2()).unwrap();
        let mut field = sigma_from_uv(&lat, 4, &p).unwrap();
        // Random detuning so the fd oracle probes a generic, non-stationary
        // configuration.
        for s in &mut field.sigma {
            *s += c(
                0.1 * (rng.gen::<f64>() - 0.5),
                0.1 * (rng.gen::<f64>() - 0.5),
            );
        }
        let (_, interior) = action_and_gradient(&field, &p).unwrap();
        let nn = 2 * field.n_pairs;
        for probe in [(1usize, 2usize), (2, 5), (3, 4)] {
            let (t, k) = probe;
            let g = fd_gradient(
                |x| {
                    let mut f2 = field.clone();
                    f2.sigma[t * nn + (k - 1)] = x[0];
                    Ok(action_and_gradient(&f2, &p)?.0)
                },
                &[field.at(k, t)],
                GradientConfig::default(),
            )
            .unwrap();
            let analytic = interior[(t - 1) * nn + (k - 1)];
            let (diff, _) = reduce_mod_2pii(g[0] - analytic);
            assert!(diff.norm() < 1e-6, "site ({k},{t}): {:.3e}", diff.norm());
        }
    }

    #[test]
    fn single_plaquette_action() {
        let p = LagrangianParams::for_z(c(1.2, 0.1), c(0.8, -0.3)).unwrap();
        let field = SigmaField {
            n_pairs: 1,
            t_max: 1,
            periodic_k: true,
            sigma: vec![c(0.1, 0.0), c(0.2, 0.1), c(-0.1, 0.2), c(0.3, -0.1)],
        };
        let (action, interior) = action_and_gradient(&field, &p).unwrap();
        // One pair over one step: a single plaquette, whose third slot wraps
        // to site 1 of the next row.
        let expect = lagrangian_density(
            field.at(1, 0),
            field.at(2, 0),
            field.at(1, 1),
            field.at(2, 1),
            &p,
        )
        .unwrap();
        assert!((action - expect).norm() < 1e-14);
        assert!(interior.is_empty());
    }
}

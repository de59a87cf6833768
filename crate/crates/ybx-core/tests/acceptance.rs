//! End-to-end acceptance suite: one test per criterion, each printing a
//! single verdict line with its worst residual and the tolerance it is held
//! to. Stretch quadratures report an explicit SKIP when their tails cannot
//! be certified; they never pass silently.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ybx_core::action::{
    action_and_gradient, interior_gradient_max, sigma_from_uv, LagrangianParams,
};
use ybx_core::classical::lattice::{
    chain_poisson_bracket, cybe_residual, evolve_step, evolve_symplectic_residual,
    im_coefficients, lambda_grid, monodromy_trace, symplectic_residual, ChainState, TraceKind,
};
use ybx_core::classical::map::{
    casimir, sample_kef, sample_weyl_pair, weyl_embed, yb_map_kef, yb_map_uv, ClassicalTriple,
    Direction, WeylTriple,
};
use ybx_core::liouville::{
    eom_residual_v, liouville_residual, random_tau_field, uv_from_tau, uv_relations_residual,
};
use ybx_core::numeric::GradientConfig;
use ybx_core::qdilog::{
    default_b_sequence, fourier_duality_residual, functional_equation_residual,
    inversion_residual, quasiclassical_residual, random_three_leg_params, recurrence_residuals,
    three_leg_residual, DilogParams, KernelPoint, ScaledPoint, StarTriangleKind,
    StarTriangleOutcome, StarTriangleParams,
};
use ybx_core::qdilog::aux_inversion_residual;
use ybx_core::quantum::lattice::{evolution_invariance, im_residuals, ChainSpace};
use ybx_core::quantum::rep::swap_matrix;
use ybx_core::quantum::{
    hopf_residual_suite, quantum_map_residual, r_lambda_q, r_plus, rll_ybe_residual, spin_rep,
    universal_r, QParams,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Prints the verdict line for a criterion and enforces it.
fn verdict(label: &str, worst: f64, tol: f64) {
    let ok = worst.is_finite() && worst < tol;
    println!(
        "{label}: {} (worst {worst:.3e}, tol {tol:.1e})",
        if ok { "pass" } else { "FAIL" }
    );
    assert!(ok, "{label}: worst {worst:.3e} exceeds {tol:.1e}");
}

#[test]
fn criterion_01_classical_yang_baxter() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let l = c(rng.gen_range(0.5..2.0), rng.gen_range(-0.5..0.5));
        let m = c(rng.gen_range(0.5..2.0), rng.gen_range(-0.5..0.5));
        if (l * m - 1.0).norm() < 0.05 {
            continue;
        }
        worst = worst.max(cybe_residual(l, m));
    }
    verdict("criterion 01 classical set-theoretic YBE", worst, 1e-9);
}

fn triple_distance(a: &ClassicalTriple, b: &ClassicalTriple) -> f64 {
    let scale = 1.0f64.max(a.k.norm()).max(a.e.norm()).max(a.f.norm());
    (a.k - b.k).norm().max((a.e - b.e).norm()).max((a.f - b.f).norm()) / scale
}

#[test]
fn criterion_02_round_trip_and_chart() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (x1, x2) = (sample_kef(&mut rng), sample_kef(&mut rng));
        let (y1, y2) = yb_map_kef(&x1, &x2, Direction::Forward).unwrap();
        let (r1, r2) = yb_map_kef(&y1, &y2, Direction::Inverse).unwrap();
        worst = worst.max(triple_distance(&x1, &r1)).max(triple_distance(&x2, &r2));

        let (w1, w2) = sample_weyl_pair(&mut rng);
        let (wy1, wy2) = yb_map_uv(&w1, &w2, Direction::Forward).unwrap();
        let (ey1, ey2) = yb_map_kef(
            &weyl_embed(&w1).unwrap(),
            &weyl_embed(&w2).unwrap(),
            Direction::Forward,
        )
        .unwrap();
        worst = worst
            .max(triple_distance(&weyl_embed(&wy1).unwrap(), &ey1))
            .max(triple_distance(&weyl_embed(&wy2).unwrap(), &ey2));
    }
    verdict("criterion 02 classical round-trip and chart", worst, 1e-10);
}

#[test]
fn criterion_03_symplecticity() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let cfg = GradientConfig::default();
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let (w1, w2) = sample_weyl_pair(&mut rng);
        let (z1, z2) = (w1.z, w2.z);
        let logs = [w1.u.ln(), w2.u.ln(), w1.v.ln(), w2.v.ln()];
        let res = symplectic_residual(
            |x: &[Complex64]| {
                let a = WeylTriple::new(x[0].exp(), x[2].exp(), z1);
                let b = WeylTriple::new(x[1].exp(), x[3].exp(), z2);
                let (ya, yb) = yb_map_uv(&a, &b, Direction::Forward)?;
                Ok(vec![ya.u.ln(), yb.u.ln(), ya.v.ln(), yb.v.ln()])
            },
            &logs,
            cfg,
        )
        .unwrap();
        worst = worst.max(res);
        let state = ChainState::sample(2, &mut rng);
        worst = worst.max(evolve_symplectic_residual(&state, cfg).unwrap());
    }
    verdict("criterion 03 symplecticity of map and evolution", worst, 1e-6);
}

#[test]
fn criterion_04_conservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let state0 = ChainState::sample(4, &mut rng);
    let lambdas = lambda_grid(7);
    let traces = |st: &ChainState| -> Vec<Complex64> {
        let mut out = Vec::new();
        for &l in &lambdas {
            out.push(monodromy_trace(st, l, TraceKind::T).unwrap());
            out.push(monodromy_trace(st, l, TraceKind::TBar).unwrap());
        }
        out
    };
    let casimirs = |st: &ChainState| -> Vec<Complex64> {
        (0..st.sites())
            .map(|k| casimir(&st.site_triple(k).unwrap()).unwrap())
            .collect()
    };
    let (t0, c0) = (traces(&state0), casimirs(&state0));
    let mut drift: f64 = 0.0;
    let mut cas: f64 = 0.0;
    let mut st = state0.clone();
    for _ in 0..100 {
        st = evolve_step(&st).unwrap();
        assert_eq!(st.z1, state0.z1);
        assert_eq!(st.z2, state0.z2);
        for (a, b) in traces(&st).iter().zip(&t0) {
            drift = drift.max((a - b).norm() / b.norm().max(1.0));
        }
        for (a, b) in casimirs(&st).iter().zip(&c0) {
            cas = cas.max((a - b).norm() / b.norm().max(1.0));
        }
    }
    verdict("criterion 04a monodromy trace drift over 100 steps", drift, 1e-8);
    verdict("criterion 04b casimir conservation", cas, 1e-12);
}

#[test]
fn criterion_05_involutivity() {
    let cfg = GradientConfig::default();
    let mut worst: f64 = 0.0;
    for (seed, n_pairs) in [(105u64, 2usize), (205, 3)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = ChainState::sample(n_pairs, &mut rng);
        let coeffs = n_pairs + 1;
        // Observable i < coeffs is the i-th t coefficient, the rest are tbar.
        let observable = |i: usize| {
            move |st: &ChainState| {
                let (ct, cb) = im_coefficients(st)?;
                Ok(if i < ct.len() { ct[i] } else { cb[i - ct.len()] })
            }
        };
        let scale = |i: usize| observable(i)(&state).unwrap().norm();
        // Brackets are scored relative to the observable magnitudes; the fd
        // noise floor scales with them.
        for i in 0..2 * coeffs {
            for j in i + 1..2 * coeffs {
                let b =
                    chain_poisson_bracket(observable(i), observable(j), &state, cfg).unwrap();
                worst = worst.max(b.norm() / (scale(i) * scale(j)).max(1.0));
            }
        }
    }
    verdict("criterion 05 involutivity of integrals of motion", worst, 1e-6);
}

#[test]
fn criterion_06_liouville_lattice_and_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let field = random_tau_field(16, 16, &mut rng);
    verdict("criterion 06a bilinear residual on 16x16", liouville_residual(&field), 1e-12);
    let (z1, z2) = (c(1.4, 0.3), c(0.7, -0.2));
    let lat = uv_from_tau(&field, z1, z2).unwrap();
    verdict("criterion 06b coordinate map relations", uv_relations_residual(&lat), 1e-10);
    verdict("criterion 06c lagrangian equations of motion", eom_residual_v(&lat), 1e-10);
    // Stationarity needs interior time rows, hence a taller grid.
    let tall = random_tau_field(4, 10, &mut rng);
    let p = LagrangianParams::for_z(z1, z2).unwrap();
    let lat = uv_from_tau(&tall, p.z1(), p.z2()).unwrap();
    let sigma = sigma_from_uv(&lat, 5, &p).unwrap();
    let (_, interior) = action_and_gradient(&sigma, &p).unwrap();
    verdict(
        "criterion 06d interior action gradient",
        interior_gradient_max(&sigma, &interior),
        1e-8,
    );
}

#[test]
fn criterion_07_spin_half_r_matrix() {
    let p = QParams::default();
    let rep = spin_rep(1, p).unwrap();
    let r = universal_r(&rep, &rep).unwrap();
    let upper = r.sub(&r_plus(p)).norm_max();
    verdict("criterion 07a universal R at spin 1/2 equals R+", upper, 1e-12);
    let perm = r_lambda_q(p, p.q_half)
        .sub(&swap_matrix(2, 2).scale(p.qq()))
        .norm_max();
    verdict("criterion 07b R(q^1/2) is (q - 1/q) x swap", perm, 1e-12);
}

#[test]
fn criterion_08_quantum_yang_baxter() {
    let mut worst: f64 = 0.0;
    for j2 in [1usize, 2] {
        let rep = spin_rep(j2, QParams::default()).unwrap();
        let res = rll_ybe_residual(&rep, &lambda_grid(3)).unwrap();
        for key in ["ybe", "ybe_star", "mixed"] {
            worst = worst.max(res[key]);
        }
    }
    verdict("criterion 08 quantum YBE and mixed relations", worst, 1e-10);
}

#[test]
fn criterion_09_quantum_map_and_hopf() {
    let mut worst: f64 = 0.0;
    for j2 in [1usize, 2, 3] {
        for v in quantum_map_residual(&spin_rep(j2, QParams::default()).unwrap())
            .unwrap()
            .values()
        {
            worst = worst.max(*v);
        }
    }
    verdict("criterion 09a quantum map conjugation, spins 1/2 to 3/2", worst, 1e-10);
    let hopf = hopf_residual_suite(&spin_rep(1, QParams::default()).unwrap()).unwrap();
    let worst = hopf.values().fold(0.0f64, |a, v| a.max(*v));
    verdict("criterion 09b Hopf identity suite at spin 1/2", worst, 1e-11);
}

#[test]
fn criterion_10_rll_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let rep = spin_rep(1, QParams::default()).unwrap();
    let lambdas: Vec<Complex64> = (0..5)
        .map(|_| c(rng.gen_range(0.6..1.6), rng.gen_range(-0.4..0.4)))
        .collect();
    let res = rll_ybe_residual(&rep, &lambdas).unwrap();
    let worst = ["rform_same", "rform_pm", "rform_mp_pattern", "rform_mp_indexed", "six_vertex_ybe"]
        .iter()
        .fold(0.0f64, |a, k| a.max(res[*k]));
    verdict("criterion 10 RLL exchange relations", worst, 1e-11);
}

#[test]
fn criterion_11_quantum_chain() {
    let space = ChainSpace::new(2, spin_rep(1, QParams::default()).unwrap()).unwrap();
    let im = im_residuals(&space).unwrap();
    verdict("criterion 11a transfer matrices commute", im["im_commute"], 1e-12);
    let ev = evolution_invariance(&space).unwrap();
    let inv = ev["t_invariance"].max(ev["tbar_invariance"]);
    verdict("criterion 11b evolution invariance of T and Tbar", inv, 1e-10);
    let closed = im["g0_endpoint"]
        .max(im["gn_endpoint"])
        .max(im["g1_closed"])
        .max(im["g1_bar_closed"]);
    verdict("criterion 11c endpoint and G1 closed forms", closed, 1e-10);
}

#[test]
fn criterion_12_quantum_dilogarithm() {
    let p = DilogParams::default_b();
    let mut functional: f64 = 0.0;
    for k in -4..=4 {
        let z = c(0.5 * k as f64, 0.03 * k as f64);
        functional = functional.max(functional_equation_residual(z, &p).unwrap());
    }
    verdict("criterion 12a functional equation", functional, 1e-6);
    let mut inv: f64 = 0.0;
    for z in [c(0.3, 0.1), c(-0.7, -0.2), c(1.1, 0.05)] {
        inv = inv.max(inversion_residual(z, &p).unwrap());
        inv = inv.max(aux_inversion_residual(z, &p).unwrap());
    }
    verdict("criterion 12b inversion relations", inv, 1e-8);
    let mut fourier: f64 = 0.0;
    for x in [0.4, 0.8, 1.3] {
        fourier = fourier.max(fourier_duality_residual(c(0.15, 0.1), x, &p).unwrap());
    }
    verdict("criterion 12c fourier duality", fourier, 1e-4);
    let mut rng = ChaCha8Rng::seed_from_u64(0x9d1c);
    let strip = 0.05 * p.b.re;
    let mut rec: f64 = 0.0;
    for _ in 0..50 {
        let s = |rng: &mut ChaCha8Rng| c(rng.gen_range(-0.8..0.8), rng.gen_range(-strip..strip));
        let a = |rng: &mut ChaCha8Rng| c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.05..0.05));
        let pt = KernelPoint {
            s1: s(&mut rng),
            s2: s(&mut rng),
            s1p: s(&mut rng),
            s2p: s(&mut rng),
            alpha1: a(&mut rng),
            alpha2: a(&mut rng),
            beta1: a(&mut rng),
            beta2: a(&mut rng),
        };
        for r in recurrence_residuals(&pt, &p).unwrap() {
            rec = rec.max(r);
        }
    }
    verdict("criterion 12d kernel recurrences at 50 points", rec, 1e-5);
    let rows = quasiclassical_residual(&default_b_sequence(), &ScaledPoint::default()).unwrap();
    let monotone = rows.windows(2).all(|w| {
        w[1].v_err < w[0].v_err
            && w[1].vbar_err < w[0].vbar_err
            && w[1].kernel_err < w[0].kernel_err
    });
    println!(
        "criterion 12e quasiclassical errors strictly decreasing: {}",
        if monotone { "pass" } else { "FAIL" }
    );
    assert!(monotone, "quasiclassical error columns must decrease: {rows:?}");
}

#[test]
fn criterion_13_three_leg_and_star_triangle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3313);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let prm = random_three_leg_params(&mut rng);
        worst = worst.max(three_leg_residual(&prm).unwrap());
    }
    verdict("criterion 13a three-leg stationarity", worst, 1e-8);
    // Stretch quadratures: a certified tail failure is reported as an
    // explicit SKIP, anything else is held to the ratio tolerance.
    let p = DilogParams::default_b();
    let prm = StarTriangleParams::default();
    for (kind, label) in [
        (StarTriangleKind::Fvstr, "full weights"),
        (StarTriangleKind::Str1, "first degeneration"),
        (StarTriangleKind::Str2, "second degeneration"),
    ] {
        match ybx_core::qdilog::star_triangle_residual(kind, &prm, &p).unwrap() {
            StarTriangleOutcome::Residual(r) => {
                verdict(&format!("criterion 13b star-triangle {label} (stretch)"), r, 1e-3);
            }
            StarTriangleOutcome::Skipped(reason) => {
                println!("criterion 13b star-triangle {label} (stretch): SKIP ({reason})");
            }
        }
    }
}

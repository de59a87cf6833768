//! Command-line front end: verification suites, chain simulation, Liouville
//! lattice solutions, and action checks. Every command writes a JSON report
//! `{suite, residuals, tolerances, pass}` and exits 0 when all residuals are
//! within tolerance, 2 when any residual fails (report still written), 1 on
//! usage or configuration errors.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use ybx_core::action::{
    action_and_gradient, interior_gradient_max, sigma_from_uv, LagrangianParams, SigmaField,
};
use ybx_core::classical::lattice::{
    evolve_step, evolve_symplectic_residual, lambda_grid, monodromy_trace, residual_suite,
    symplectic_residual, ChainState, TraceKind,
};
use ybx_core::classical::map::{
    casimir, sample_kef, sample_weyl_pair, weyl_embed, yb_map_kef, yb_map_uv, Direction,
    WeylTriple,
};
use ybx_core::liouville::{
    build_tau, eom_residual_v, liouville_residual, uv_from_tau, uv_relations_residual,
};
use ybx_core::numeric::GradientConfig;
use ybx_core::qdilog::{
    aux_inversion_residual, default_b_sequence, fourier_duality_residual,
    functional_equation_residual, inversion_residual, quasiclassical_residual,
    random_three_leg_params, recurrence_residuals, three_leg_residual, DilogParams, KernelPoint,
    ScaledPoint,
};
use ybx_core::quantum::lattice::{evolution_invariance, im_residuals, ChainSpace};
use ybx_core::quantum::{
    hopf_residual_suite, quantum_map_residual, rll_ybe_residual, spin_rep, QParams,
};

const DEFAULT_SEED: u64 = 17;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Parser)]
#[command(name = "ybx", version, about = "Yang-Baxter map and lattice verification toolkit")]
struct Cli {
    /// Path for the JSON report.
    #[arg(long, global = true, default_value = "report.json")]
    output: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite and report its residuals.
    Check {
        #[command(subcommand)]
        suite: CheckCmd,
    },
    /// Evolve a periodic classical chain, logging state and conserved traces.
    Evolve(EvolveArgs),
    /// Build or verify a bilinear lattice solution.
    Liouville {
        #[command(subcommand)]
        cmd: LiouvilleCmd,
    },
    /// Stationarity checks for the discrete action.
    Action {
        #[command(subcommand)]
        cmd: ActionCmd,
    },
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Classical map: Yang-Baxter property, charts, brackets, symplecticity.
    Classical {
        /// Number of random trials per identity.
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// RNG seed; falls back to YB_SEED, then a fixed default.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Quantum map, Hopf structure, RLL relations, and (at spin 1/2) chains.
    Quantum {
        /// Spin of the representation: 1/2, 1, 3/2, ...
        #[arg(long, default_value = "1/2")]
        spin: String,
        /// Chain length (even); the chain suite runs only at spin 1/2.
        #[arg(long, default_value_t = 4)]
        sites: usize,
    },
    /// Noncompact quantum dilogarithm: function identities and kernels.
    Qdilog,
}

#[derive(Args)]
struct EvolveArgs {
    /// Number of chain sites (even).
    #[arg(long)]
    sites: usize,
    /// Number of evolution steps.
    #[arg(long)]
    steps: usize,
    /// Odd-site parameter as RE,IM.
    #[arg(long, value_parser = parse_complex)]
    z1: Complex64,
    /// Even-site parameter as RE,IM.
    #[arg(long, value_parser = parse_complex)]
    z2: Complex64,
    /// Initial state file (JSON); otherwise a seeded random state is drawn.
    #[arg(long)]
    state: Option<PathBuf>,
    /// RNG seed for the random initial state.
    #[arg(long)]
    seed: Option<u64>,
    /// Per-step coordinate CSV: t, site, Re u, Im u, Re v, Im v.
    #[arg(long, default_value = "evolution.csv")]
    csv: PathBuf,
    /// Conserved-quantity CSV: t, lambda index, Re t, Im t.
    #[arg(long, default_value = "conserved.csv")]
    conserved: PathBuf,
    /// Where to write the final state.
    #[arg(long, default_value = "state_out.json")]
    state_out: PathBuf,
}

#[derive(Subcommand)]
enum LiouvilleCmd {
    /// Draw (or reload) solution data, build tau, and export it.
    Build {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        /// Solution file; created here, consumed by verify.
        #[arg(long, default_value = "liouville.json")]
        params: PathBuf,
        /// Tau values on the grid, for external plotting.
        #[arg(long, default_value = "tau.csv")]
        tau_csv: PathBuf,
        /// Coordinate field export for `action verify` (needs n2 >= n1 + 2).
        #[arg(long, default_value = "field.json")]
        field: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-derive tau from a solution file and check every lattice identity.
    Verify {
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
        #[arg(long, default_value = "liouville.json")]
        params: PathBuf,
    },
}

#[derive(Subcommand)]
enum ActionCmd {
    /// Check interior stationarity of a stored coordinate field.
    Verify {
        #[arg(long)]
        field: PathBuf,
    },
}

/// Complex flag syntax: "RE,IM".
fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected RE,IM, got {s:?}"));
    }
    let re: f64 = parts[0].trim().parse().map_err(|e| format!("bad RE: {e}"))?;
    let im: f64 = parts[1].trim().parse().map_err(|e| format!("bad IM: {e}"))?;
    Ok(c(re, im))
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("YB_SEED") {
        Ok(v) => v
            .parse()
            .with_context(|| format!("YB_SEED must be an unsigned integer, got {v:?}")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

#[derive(Serialize)]
struct Report {
    suite: String,
    residuals: BTreeMap<String, f64>,
    tolerances: BTreeMap<String, f64>,
    pass: bool,
}

/// Accumulates named residuals, each with the tolerance it is judged by.
#[derive(Default)]
struct Suite {
    residuals: BTreeMap<String, f64>,
    tolerances: BTreeMap<String, f64>,
}

impl Suite {
    fn push(&mut self, name: &str, value: f64, tol: f64) {
        let worst = self.residuals.entry(name.to_string()).or_insert(0.0);
        *worst = worst.max(value);
        self.tolerances.insert(name.to_string(), tol);
    }

    fn extend(&mut self, map: BTreeMap<String, f64>, tol: f64) {
        for (k, v) in map {
            self.push(&k, v, tol);
        }
    }

    fn into_report(self, suite: &str) -> Report {
        let pass = self
            .residuals
            .iter()
            .all(|(k, v)| v.is_finite() && *v <= self.tolerances[k]);
        Report {
            suite: suite.to_string(),
            residuals: self.residuals,
            tolerances: self.tolerances,
            pass,
        }
    }
}

fn write_report(report: &Report, path: &PathBuf) -> Result<()> {
    for (name, r) in &report.residuals {
        let tol = report.tolerances[name];
        let verdict = if r.is_finite() && *r <= tol { "pass" } else { "FAIL" };
        println!("{name:<28} {r:>12.3e}  (tol {tol:.1e})  {verdict}");
    }
    println!("suite {}: {}", report.suite, if report.pass { "pass" } else { "FAIL" });
    let text = serde_json::to_string_pretty(report)?;
    fs::write(path, text).with_context(|| format!("writing report to {}", path.display()))?;
    Ok(())
}

// --- file schemas; complex values are stored as [re, im] ---

fn pack(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpack(a: [f64; 2]) -> Complex64 {
    c(a[0], a[1])
}

fn pack_vec(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().copied().map(pack).collect()
}

fn unpack_vec(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().copied().map(unpack).collect()
}

/// Chain state on disk, shared by `evolve` input and output.
#[derive(Serialize, Deserialize)]
struct StateFile {
    sites: usize,
    z1: [f64; 2],
    z2: [f64; 2],
    u: Vec<[f64; 2]>,
    v: Vec<[f64; 2]>,
}

impl StateFile {
    fn from_state(s: &ChainState) -> Self {
        Self {
            sites: s.sites(),
            z1: pack(s.z1),
            z2: pack(s.z2),
            u: pack_vec(&s.u),
            v: pack_vec(&s.v),
        }
    }

    fn to_state(&self) -> Result<ChainState> {
        let state = ChainState::new(
            unpack(self.z1),
            unpack(self.z2),
            unpack_vec(&self.u),
            unpack_vec(&self.v),
        )?;
        if state.sites() != self.sites {
            bail!(
                "state file claims {} sites but carries {} coordinates",
                self.sites,
                state.sites()
            );
        }
        Ok(state)
    }
}

/// Input data of a bilinear lattice solution; tau is rebuilt on load.
#[derive(Serialize, Deserialize)]
struct SolutionFile {
    n1: usize,
    n2: usize,
    alpha: Vec<[f64; 2]>,
    beta: Vec<[f64; 2]>,
    phi: Vec<[f64; 2]>,
    gamma: Vec<[f64; 2]>,
    f0: [f64; 2],
    g0: [f64; 2],
    z1: [f64; 2],
    z2: [f64; 2],
}

/// Coordinate field plus the spectral parameters its action depends on.
#[derive(Serialize, Deserialize)]
struct FieldFile {
    n_pairs: usize,
    t_max: usize,
    periodic_k: bool,
    sigma: Vec<[f64; 2]>,
    a1: [f64; 2],
    a2: [f64; 2],
    b1: [f64; 2],
    b2: [f64; 2],
}

impl FieldFile {
    fn from_parts(field: &SigmaField, p: &LagrangianParams) -> Self {
        Self {
            n_pairs: field.n_pairs,
            t_max: field.t_max,
            periodic_k: field.periodic_k,
            sigma: pack_vec(&field.sigma),
            a1: pack(p.a1),
            a2: pack(p.a2),
            b1: pack(p.b1),
            b2: pack(p.b2),
        }
    }

    fn to_parts(&self) -> Result<(SigmaField, LagrangianParams)> {
        let expect = (self.t_max + 1) * 2 * self.n_pairs;
        if self.sigma.len() != expect {
            bail!("field file needs {expect} sigma values, got {}", self.sigma.len());
        }
        let field = SigmaField {
            n_pairs: self.n_pairs,
            t_max: self.t_max,
            periodic_k: self.periodic_k,
            sigma: unpack_vec(&self.sigma),
        };
        let p = LagrangianParams {
            a1: unpack(self.a1),
            a2: unpack(self.a2),
            b1: unpack(self.b1),
            b2: unpack(self.b2),
        };
        Ok((field, p))
    }
}

fn load_json<T: for<'de> Deserialize<'de>>(path: &PathBuf) -> Result<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn save_json<T: Serialize>(value: &T, path: &PathBuf) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)
        .with_context(|| format!("writing {}", path.display()))
}

// --- suites ---

fn triple_distance(a: &ybx_core::classical::map::ClassicalTriple, b: &ybx_core::classical::map::ClassicalTriple) -> f64 {
    let scale = 1.0f64
        .max(a.k.norm())
        .max(a.e.norm())
        .max(a.f.norm());
    ((a.k - b.k).norm().max((a.e - b.e).norm()).max((a.f - b.f).norm())) / scale
}

fn check_classical(trials: usize, seed: Option<u64>) -> Result<Suite> {
    if trials == 0 {
        bail!("--trials must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(seed)?);
    let mut suite = Suite::default();
    let lambdas = lambda_grid(4);
    let cfg = GradientConfig::default();
    for _ in 0..trials {
        let x1 = sample_kef(&mut rng);
        let x2 = sample_kef(&mut rng);
        suite.extend(residual_suite(&x1, &x2, &lambdas, &mut rng)?, 1e-9);

        // Forward then inverse map must return the original pair.
        let (y1, y2) = yb_map_kef(&x1, &x2, Direction::Forward)?;
        let (r1, r2) = yb_map_kef(&y1, &y2, Direction::Inverse)?;
        suite.push(
            "round_trip",
            triple_distance(&x1, &r1).max(triple_distance(&x2, &r2)),
            1e-10,
        );

        // The Weyl-chart map must agree with the algebra map under embedding.
        let (w1, w2) = sample_weyl_pair(&mut rng);
        let (wy1, wy2) = yb_map_uv(&w1, &w2, Direction::Forward)?;
        let (ey1, ey2) = yb_map_kef(&weyl_embed(&w1)?, &weyl_embed(&w2)?, Direction::Forward)?;
        suite.push(
            "chart",
            triple_distance(&weyl_embed(&wy1)?, &ey1).max(triple_distance(&weyl_embed(&wy2)?, &ey2)),
            1e-10,
        );

        // Symplecticity of the chart map in log coordinates (u1 u2 | v1 v2).
        let (z1, z2) = (w1.z, w2.z);
        let logs = [w1.u.ln(), w2.u.ln(), w1.v.ln(), w2.v.ln()];
        let map = |x: &[Complex64]| -> ybx_core::Result<Vec<Complex64>> {
            let a = WeylTriple::new(x[0].exp(), x[2].exp(), z1);
            let b = WeylTriple::new(x[1].exp(), x[3].exp(), z2);
            let (ya, yb) = yb_map_uv(&a, &b, Direction::Forward)?;
            Ok(vec![ya.u.ln(), yb.u.ln(), ya.v.ln(), yb.v.ln()])
        };
        suite.push("symplectic_map", symplectic_residual(map, &logs, cfg)?, 1e-6);
    }
    let state = ChainState::sample(2, &mut rng);
    suite.push(
        "symplectic_evolve",
        evolve_symplectic_residual(&state, cfg)?,
        1e-6,
    );
    suite.tolerances.insert("sklyanin".into(), 1e-6);
    Ok(suite)
}

fn parse_spin(s: &str) -> Result<usize> {
    let j2 = if let Some(num) = s.strip_suffix("/2") {
        num.trim().parse::<usize>().context("bad spin numerator")?
    } else if let Ok(j) = s.trim().parse::<usize>() {
        2 * j
    } else {
        let j: f64 = s.trim().parse().context("spin must look like 1/2, 1, 3/2 or 0.5")?;
        let j2 = (2.0 * j).round();
        if (2.0 * j - j2).abs() > 1e-9 {
            bail!("spin must be a half-integer, got {s}");
        }
        j2 as usize
    };
    if j2 == 0 {
        bail!("spin must be positive");
    }
    Ok(j2)
}

fn check_quantum(spin: &str, sites: usize) -> Result<Suite> {
    let j2 = parse_spin(spin)?;
    let rep = spin_rep(j2, QParams::default())?;
    let mut suite = Suite::default();
    suite.extend(quantum_map_residual(&rep)?, 1e-10);
    suite.extend(hopf_residual_suite(&rep)?, 1e-11);
    let lambdas = [c(1.3, 0.4), c(0.8, -0.2), c(0.5, 0.9), c(1.7, 0.1), c(0.9, -0.6)];
    suite.extend(rll_ybe_residual(&rep, &lambdas)?, 1e-11);
    if j2 == 1 {
        if sites == 0 || sites % 2 != 0 {
            bail!("--sites must be a positive even number");
        }
        let space = ChainSpace::new(sites / 2, spin_rep(1, QParams::default())?)?;
        suite.extend(im_residuals(&space)?, 1e-10);
        suite.extend(evolution_invariance(&space)?, 1e-10);
    }
    Ok(suite)
}

fn check_qdilog() -> Result<Suite> {
    let p = DilogParams::default_b();
    let mut suite = Suite::default();
    for k in -4..=4 {
        let z = c(0.5 * k as f64, 0.04 * k as f64);
        suite.push("functional_equation", functional_equation_residual(z, &p)?, 1e-6);
    }
    for z in [c(0.3, 0.1), c(-0.7, -0.2), c(1.1, 0.05)] {
        suite.push("inversion", inversion_residual(z, &p)?, 1e-8);
        suite.push("aux_inversion", aux_inversion_residual(z, &p)?, 1e-8);
    }
    for x in [0.4, 0.8, 1.3] {
        suite.push("fourier_duality", fourier_duality_residual(c(0.15, 0.1), x, &p)?, 1e-4);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x9d1c);
    let strip = 0.2 * p.b.re;
    let draw = |rng: &mut ChaCha8Rng| {
        c(rng.gen_range(-0.8..0.8), rng.gen_range(-strip..strip) / 4.0)
    };
    for _ in 0..10 {
        let pt = KernelPoint {
            s1: draw(&mut rng),
            s2: draw(&mut rng),
            s1p: draw(&mut rng),
            s2p: draw(&mut rng),
            alpha1: c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.05..0.05)),
            alpha2: c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.05..0.05)),
            beta1: c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.05..0.05)),
            beta2: c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.05..0.05)),
        };
        for r in recurrence_residuals(&pt, &p)? {
            suite.push("kernel_recurrence", r, 1e-5);
        }
    }
    let mut leg_rng = ChaCha8Rng::seed_from_u64(0x3313);
    for _ in 0..3 {
        let prm = random_three_leg_params(&mut leg_rng);
        suite.push("three_leg", three_leg_residual(&prm)?, 1e-8);
    }
    // Semiclassical limit: the three error columns must shrink as |b| does.
    let rows = quasiclassical_residual(&default_b_sequence(), &ScaledPoint::default())?;
    let monotone = rows.windows(2).all(|w| {
        w[1].v_err < w[0].v_err && w[1].vbar_err < w[0].vbar_err && w[1].kernel_err < w[0].kernel_err
    });
    suite.push("quasiclassical_monotone", if monotone { 0.0 } else { 1.0 }, 0.5);
    Ok(suite)
}

fn run_evolve(args: &EvolveArgs) -> Result<Suite> {
    if args.sites == 0 || args.sites % 2 != 0 {
        bail!("--sites must be a positive even number");
    }
    let state0 = match &args.state {
        Some(path) => {
            let file: StateFile = load_json(path)?;
            let st = file.to_state()?;
            if st.sites() != args.sites {
                bail!("--sites {} does not match state file ({})", args.sites, st.sites());
            }
            st
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(args.seed)?);
            // Redraw coordinates until the requested z's give a regular step.
            let mut tries = 0;
            loop {
                let draw = ChainState::sample(args.sites / 2, &mut rng);
                if let Ok(st) = ChainState::new(args.z1, args.z2, draw.u, draw.v) {
                    if evolve_step(&st).is_ok() {
                        break st;
                    }
                }
                tries += 1;
                if tries > 100 {
                    bail!("could not draw a regular initial state for these z's");
                }
            }
        }
    };

    // Eight spectral samples (the grid is inclusive of both ends).
    let lambdas = lambda_grid(7);
    let traces = |st: &ChainState| -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(2 * lambdas.len());
        for &l in &lambdas {
            out.push(monodromy_trace(st, l, TraceKind::T)?);
        }
        for &l in &lambdas {
            out.push(monodromy_trace(st, l, TraceKind::TBar)?);
        }
        Ok(out)
    };
    let casimirs = |st: &ChainState| -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(st.sites());
        for k in 0..st.sites() {
            out.push(casimir(&st.site_triple(k)?)?);
        }
        Ok(out)
    };

    let mut csv = String::from("t,site,re_u,im_u,re_v,im_v\n");
    let mut cons = String::from("t,lambda_index,re_t,im_t\n");
    let t0 = traces(&state0)?;
    let c0 = casimirs(&state0)?;
    let mut drift: f64 = 0.0;
    let mut cas_drift: f64 = 0.0;
    let mut state = state0;
    for t in 0..=args.steps {
        for k in 0..state.sites() {
            csv.push_str(&format!(
                "{t},{k},{},{},{},{}\n",
                state.u[k].re, state.u[k].im, state.v[k].re, state.v[k].im
            ));
        }
        let tr = traces(&state)?;
        for (i, v) in tr.iter().enumerate() {
            cons.push_str(&format!("{t},{i},{},{}\n", v.re, v.im));
        }
        for (a, b) in tr.iter().zip(&t0) {
            drift = drift.max((a - b).norm() / b.norm().max(1.0));
        }
        for (a, b) in casimirs(&state)?.iter().zip(&c0) {
            cas_drift = cas_drift.max((a - b).norm() / b.norm().max(1.0));
        }
        if t < args.steps {
            state = evolve_step(&state)?;
        }
    }
    fs::write(&args.csv, csv).with_context(|| format!("writing {}", args.csv.display()))?;
    fs::write(&args.conserved, cons)
        .with_context(|| format!("writing {}", args.conserved.display()))?;
    save_json(&StateFile::from_state(&state), &args.state_out)?;

    let mut suite = Suite::default();
    suite.push("monodromy_drift", drift, 1e-8);
    suite.push("casimir_drift", cas_drift, 1e-12);
    Ok(suite)
}

fn build_solution(file: &SolutionFile) -> Result<ybx_core::liouville::TauField> {
    Ok(build_tau(
        &unpack_vec(&file.alpha),
        &unpack_vec(&file.beta),
        &unpack_vec(&file.phi),
        &unpack_vec(&file.gamma),
        file.n1,
        file.n2,
        unpack(file.f0),
        unpack(file.g0),
    )?)
}

fn random_solution(n1: usize, n2: usize, rng: &mut ChaCha8Rng) -> Result<SolutionFile> {
    let small = |rng: &mut ChaCha8Rng, scale: f64| {
        c(scale * (rng.gen::<f64>() - 0.5), scale * (rng.gen::<f64>() - 0.5))
    };
    // Sources well below the extent scale keep the v-ratios entering the
    // equations of motion near 1, so absolute residuals stay at roundoff.
    let s1 = 0.5 / (n1 as f64).max(4.0);
    let s2 = 0.5 / (n2 as f64).max(4.0);
    for _ in 0..100 {
        let file = SolutionFile {
            n1,
            n2,
            alpha: (0..n1).map(|_| pack(s1 * (c(0.8, 0.0) + small(rng, 0.5)))).collect(),
            beta: (0..n2).map(|_| pack(s2 * (c(0.8, 0.0) + small(rng, 0.5)))).collect(),
            phi: (0..=n1).map(|_| pack(small(rng, 0.3).exp())).collect(),
            gamma: (0..=n2).map(|_| pack(small(rng, 0.3).exp())).collect(),
            f0: pack(small(rng, 0.2)),
            g0: pack(small(rng, 0.2)),
            z1: pack(c(1.4, 0.3)),
            z2: pack(c(0.7, -0.2)),
        };
        if build_solution(&file).is_ok() {
            return Ok(file);
        }
    }
    bail!("could not draw a nondegenerate solution")
}

fn solution_residuals(file: &SolutionFile) -> Result<(Suite, ybx_core::liouville::TauField)> {
    let field = build_solution(file)?;
    let mut suite = Suite::default();
    suite.push("bilinear", liouville_residual(&field), 1e-12);
    let lat = uv_from_tau(&field, unpack(file.z1), unpack(file.z2))?;
    suite.push("uv_relations", uv_relations_residual(&lat), 1e-10);
    suite.push("eom_v", eom_residual_v(&lat), 1e-10);
    Ok((suite, field))
}

fn liouville_build(
    n1: usize,
    n2: usize,
    params: &PathBuf,
    tau_csv: &PathBuf,
    field_path: &PathBuf,
    seed: Option<u64>,
) -> Result<Suite> {
    if n1 == 0 || n2 == 0 {
        bail!("--n1 and --n2 must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(seed)?);
    let file = random_solution(n1, n2, &mut rng)?;
    let (suite, field) = solution_residuals(&file)?;
    save_json(&file, params)?;
    fs::write(tau_csv, field.to_csv())
        .with_context(|| format!("writing {}", tau_csv.display()))?;
    // The coordinate field needs interior time rows: t_max >= 2 within
    // t_max + n1 <= n2 + 1.
    if n2 >= n1 + 2 {
        let t_max = (n2 + 1 - n1).min(5);
        let p = LagrangianParams::for_z(unpack(file.z1), unpack(file.z2))?;
        let lat = uv_from_tau(&field, p.z1(), p.z2())?;
        let sigma = sigma_from_uv(&lat, t_max, &p)?;
        save_json(&FieldFile::from_parts(&sigma, &p), field_path)?;
    } else {
        println!("field export skipped: needs n2 >= n1 + 2 for interior rows");
    }
    Ok(suite)
}

fn liouville_verify(n1: Option<usize>, n2: Option<usize>, params: &PathBuf) -> Result<Suite> {
    let file: SolutionFile = load_json(params)?;
    if let Some(n) = n1 {
        if n != file.n1 {
            bail!("--n1 {n} does not match solution file ({})", file.n1);
        }
    }
    if let Some(n) = n2 {
        if n != file.n2 {
            bail!("--n2 {n} does not match solution file ({})", file.n2);
        }
    }
    Ok(solution_residuals(&file)?.0)
}

fn action_verify(path: &PathBuf) -> Result<Suite> {
    let file: FieldFile = load_json(path)?;
    let (field, p) = file.to_parts()?;
    let (_, interior) = action_and_gradient(&field, &p)?;
    let mut suite = Suite::default();
    suite.push("action_gradient", interior_gradient_max(&field, &interior), 1e-8);
    Ok(suite)
}

fn run(cli: &Cli) -> Result<Report> {
    let (name, suite) = match &cli.cmd {
        Cmd::Check { suite } => match suite {
            CheckCmd::Classical { trials, seed } => {
                ("check classical", check_classical(*trials, *seed)?)
            }
            CheckCmd::Quantum { spin, sites } => ("check quantum", check_quantum(spin, *sites)?),
            CheckCmd::Qdilog => ("check qdilog", check_qdilog()?),
        },
        Cmd::Evolve(args) => ("evolve", run_evolve(args)?),
        Cmd::Liouville { cmd } => match cmd {
            LiouvilleCmd::Build { n1, n2, params, tau_csv, field, seed } => (
                "liouville build",
                liouville_build(*n1, *n2, params, tau_csv, field, *seed)?,
            ),
            LiouvilleCmd::Verify { n1, n2, params } => {
                ("liouville verify", liouville_verify(*n1, *n2, params)?)
            }
        },
        Cmd::Action { cmd } => match cmd {
            ActionCmd::Verify { field } => ("action verify", action_verify(field)?),
        },
    };
    Ok(suite.into_report(name))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(report) => {
            if let Err(e) = write_report(&report, &cli.output) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

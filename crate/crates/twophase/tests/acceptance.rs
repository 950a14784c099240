//! Acceptance campaign: one PASS/FAIL line per criterion, with the measured
//! numbers alongside. Exits nonzero on a failing criterion only when
//! `ACCEPTANCE_STRICT=1`, so that the suite records rather than hides a
//! miss.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use twophase::convolve::{self, ConvSpec, SampleGrid};
use twophase::evolve::{self, Amplitudes, InitialDataSpec, RunConfig, SimState, Solver, SolverOptions};
use twophase::green::{self, periodize_axis, radial_oracle, Block, FieldSpec, FrequencyGrid, GreenBlockSelector, SymbolCache};
use twophase::linalg::{identity, max_abs, max_abs_diff, CMat, C64};
use twophase::quad::{integrate_pieces, integrate_to_infinity, QuadOptions};
use twophase::spectral::{self, log_grid, Which};
use twophase::waves::{self, FrontMethod};
use twophase::{asymptotics, derive, DerivedParams, ModelParams};

struct Outcome {
    pass: bool,
    summary: String,
    info: Vec<String>,
}

fn report(id: usize, name: &str, started: Instant, outcome: Outcome) -> bool {
    let status = if outcome.pass { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} {status} {name}: {} [{:.1} s]", outcome.summary, started.elapsed().as_secs_f64());
    for line in &outcome.info {
        println!("    {line}");
    }
    outcome.pass
}

fn canonical() -> DerivedParams {
    DerivedParams::canonical()
}

fn random_params(rng: &mut ChaCha8Rng) -> DerivedParams {
    let mu = 10f64.powf(rng.random_range(-1.0..0.5));
    let p = ModelParams {
        rho_bar: 10f64.powf(rng.random_range(-1.0..1.0)),
        n_bar: 10f64.powf(rng.random_range(-1.0..1.0)),
        a_coef: 10f64.powf(rng.random_range(-0.5..0.5)),
        gamma: rng.random_range(1.0..3.0),
        mu,
        lambda: rng.random_range(0.0..1.0) * mu,
    };
    derive(p).expect("sampled parameters are admissible")
}

/// Elementary symmetric functions of the roots, with the sum of the
/// magnitudes of their terms as the rounding scale.
fn elementary(r: &[C64]) -> Vec<(C64, f64)> {
    let n = r.len();
    let mut out = Vec::new();
    for k in 1..=n {
        let (mut e, mut scale) = (C64::new(0.0, 0.0), 0.0);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == k {
                let term: C64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| r[i]).product();
                e += term;
                scale += term.norm();
            }
        }
        out.push((e, scale));
    }
    out
}

fn vieta_error(roots: &[C64], expected: &[f64]) -> f64 {
    elementary(roots)
        .iter()
        .zip(expected)
        .map(|((e, scale), want)| (e - C64::new(*want, 0.0)).norm() / scale.max(want.abs()))
        .fold(0.0, f64::max)
}

/// Relative eigenvalue separation below which a frequency counts as a collision.
const SEPARATED: f64 = 1e-2;

fn criterion1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_241);
    let grid = log_grid(1e-3, 1e3, 500);
    let (mut vieta, mut completeness, mut idempotence) = (0.0f64, 0.0f64, 0.0f64);
    let (mut checked, mut skipped) = (0usize, 0usize);
    for set in 0..20 {
        let dp = if set == 0 { canonical() } else { random_params(&mut rng) };
        let (a1, a2, nu, mub) = (dp.alpha1, dp.alpha2, dp.nu, dp.mu_bar);
        for &s in &grid {
            let s2 = s * s;
            let roots = spectral::roots_compressible(&dp, s);
            // signs alternate: e1 = -c3, e2 = c2, e3 = -c1, e4 = c0
            let want = [-(nu * s2 + a2 + 1.0), (nu + a1 + 1.0) * s2, -(nu * s2 * s2 + (a1 + a2) * s2), a1 * s2 * s2];
            vieta = vieta.max(vieta_error(&roots, &want));
            let k = spectral::spectrum_incompressible(&dp, s);
            vieta = vieta.max(vieta_error(&k.as_array(), &[-(mub * s2 + a2 + 1.0), mub * s2]));
            let pairs = [
                (twophase::linalg::from_real(&spectral::symbol_compressible(&dp, s)), roots.to_vec()),
                (twophase::linalg::from_real(&spectral::symbol_incompressible(&dp, s)), k.as_array().to_vec()),
            ];
            for (a, r) in &pairs {
                if spectral::scaled_gap(r) < SEPARATED {
                    skipped += 1;
                    continue;
                }
                let projectors = spectral::projectors_from(a, r, s, spectral::COLLISION_TOL).expect("separated eigenvalues");
                let dim = a.nrows();
                let sum = projectors.iter().fold(CMat::zeros(dim, dim), |acc, p| acc + p);
                completeness = completeness.max(max_abs_diff(&sum, &identity(dim)));
                for p in &projectors {
                    let e = max_abs_diff(&(p * p), p) / max_abs(p).max(1.0);
                    idempotence = idempotence.max(e);
                }
                checked += 1;
            }
        }
    }
    let pass = vieta <= 1e-10 && completeness <= 1e-8 && idempotence <= 1e-8;
    Outcome {
        pass,
        summary: format!(
            "Vieta {vieta:.2e} (<= 1e-10), completeness {completeness:.2e}, idempotence {idempotence:.2e} (<= 1e-8)"
        ),
        info: vec![format!("500 frequencies x 20 parameter sets; {checked} projector sets checked, {skipped} with relative gap below {SEPARATED:e} skipped")],
    }
}

fn criterion2() -> Outcome {
    let dp = canonical();
    let mut pass = true;
    let mut info = Vec::new();
    let mut worst = f64::INFINITY;
    for spec in asymptotics::catalog() {
        let c = asymptotics::remainder_order_check(&spec, &dp, &asymptotics::default_sequence(spec.regime)).expect("exact values");
        // a remainder decaying faster than claimed still satisfies the O(.) bound
        let margin = if c.degenerate { 0.0 } else { c.fitted - c.claimed };
        let ok = c.pass && (c.degenerate || margin >= -0.3);
        pass &= ok;
        worst = worst.min(margin);
        info.push(format!(
            "{} {:?} {:?}: claimed {} fitted {:.3}{}",
            spec.branch.name(),
            spec.regime,
            spec.part,
            c.claimed,
            c.fitted,
            if ok { "" } else { "  <-- miss" }
        ));
    }
    let seq: Vec<f64> = (0..4).map(|k| 0.05 / 2f64.powi(k)).collect();
    let proj = asymptotics::projector_leading_check(&dp, &seq).expect("projectors at small frequency");
    pass &= proj.pass;
    let pslopes: Vec<String> = proj.names.iter().zip(&proj.fitted).map(|(n, f)| format!("{n} {f:.2}")).collect();
    info.push(format!("projector leading-term deviation slopes: {}", pslopes.join(", ")));
    Outcome { pass, summary: format!("all remainder orders at least claimed - 0.3 (worst margin {worst:+.3}); projector terms O(s)"), info }
}

fn rk4(a: &CMat, u0: &CMat, t: f64) -> CMat {
    let steps = ((t * twophase::linalg::norm1(a)) * 40.0).ceil().max(200.0) as usize;
    let h = C64::new(t / steps as f64, 0.0);
    let half = C64::new(0.5, 0.0);
    let mut u = u0.clone();
    for _ in 0..steps {
        let k1 = a * &u;
        let k2 = a * (&u + &k1 * (h * half));
        let k3 = a * (&u + &k2 * (h * half));
        let k4 = a * (&u + &k3 * h);
        u += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * (h / C64::new(6.0, 0.0));
    }
    u
}

fn criterion3() -> Outcome {
    let dp = canonical();
    let (mut agree, mut semigroup, mut ode) = (0.0f64, 0.0f64, 0.0f64);
    let mut skipped = 0;
    for &s in &log_grid(1e-2, 1e2, 60) {
        for which in [Which::Compressible, Which::Incompressible] {
            for &t in &[0.1, 1.0, 5.0] {
                let e = spectral::propagator_expm(&dp, s, t, which);
                let scale = max_abs(&e).max(1.0);
                match spectral::propagator_spectral(&dp, s, t, which) {
                    Ok(p) => agree = agree.max(max_abs_diff(&p, &e) / scale),
                    Err(_) => skipped += 1,
                }
                let half = spectral::propagator(&dp, s, 0.5 * t, which);
                let whole = spectral::propagator(&dp, s, t, which);
                semigroup = semigroup.max(max_abs_diff(&(&half * &half), &whole) / scale);
            }
        }
    }
    for &s in &[0.05, 0.3, 1.0, 2.0, 4.0] {
        for which in [Which::Compressible, Which::Incompressible] {
            let a = match which {
                Which::Compressible => twophase::linalg::from_real(&spectral::symbol_compressible(&dp, s)),
                Which::Incompressible => twophase::linalg::from_real(&spectral::symbol_incompressible(&dp, s)),
            };
            let dim = a.nrows();
            let t = 1.5;
            let oracle = rk4(&a, &identity(dim), t);
            let e = spectral::propagator(&dp, s, t, which);
            ode = ode.max(max_abs_diff(&oracle, &e) / max_abs(&oracle).max(1.0));
        }
    }
    Outcome {
        pass: agree <= 1e-8 && semigroup <= 1e-8 && ode <= 1e-6,
        summary: format!("spectral vs expm {agree:.2e}, semigroup {semigroup:.2e} (<= 1e-8), RK4 oracle {ode:.2e} (<= 1e-6)"),
        info: vec![format!("{skipped} spectral-formula evaluations declined near collisions")],
    }
}

fn criterion4() -> Outcome {
    let dp = canonical();
    let grid = FrequencyGrid::new(128, 32.0).unwrap();
    let sigma = 1.0;
    let opts = QuadOptions::with_tol(1e-13, 1e-10);
    let h = grid.spacing();
    let radii: Vec<f64> = (1..=20).map(|k| 3.0 * k as f64 * h).collect();
    let entries = [(0usize, 0usize), (0, 2), (2, 0), (2, 2)];
    let (mut worst, mut unperiodized) = (0.0f64, 0.0f64);
    let mut info = Vec::new();
    for &t in &[5.0, 10.0, 20.0] {
        let cache = SymbolCache::new(&dp, grid, t, sigma);
        let specs: Vec<FieldSpec> = entries
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (4 * (i / 2), 4 * (j / 2));
                FieldSpec { tag: green::entry_tag(a, b), terms: vec![(a, b, C64::new(1.0, 0.0))] }
            })
            .collect();
        let syn = green::synthesize_combinations(&cache, &specs, &dp);
        for (field, &comp) in syn.fields.iter().zip(&entries) {
            let c = grid.n / 2;
            let synth: Vec<f64> = radii.iter().map(|r| field.at(c + (r / h).round() as usize, c, c)).collect();
            let reference = periodize_axis(grid, &radii, |rs| radial_oracle(&dp, comp, rs, t, sigma, opts)).unwrap();
            let direct = radial_oracle(&dp, comp, &radii, t, sigma, opts).unwrap();
            let scale = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let err = synth.iter().zip(&reference).fold(0.0f64, |m, (a, b)| m.max((a - b).abs() / scale));
            let raw = synth.iter().zip(&direct).fold(0.0f64, |m, (a, b)| m.max((a - b).abs() / scale));
            worst = worst.max(err);
            unperiodized = unperiodized.max(raw);
            info.push(format!("t = {t:>4}: {} max relative error {err:.2e} (whole-space oracle {raw:.2e})", field.tag));
        }
    }
    Outcome {
        pass: worst <= 1e-3,
        summary: format!("DFT synthesis vs periodized radial oracle: {worst:.2e} (<= 1e-3) at 20 radii, n = 128, L = 32, sigma = 1"),
        info,
    }
}

struct FrontRun {
    fit: waves::FrontFit,
    exponent: f64,
}

fn front_run(dp: &DerivedParams, grid: FrequencyGrid, sigma: f64, times: &[f64], row: Block, col: Block, method: FrontMethod) -> Result<FrontRun, String> {
    let profiles: Vec<waves::RadialProfile> = times
        .iter()
        .map(|&t| waves::radial_profile(&waves::longitudinal_response(dp, grid, t, sigma, row, col).unwrap()))
        .collect();
    let fit = waves::front_speed(&profiles, dp.c, 2.0, method).map_err(|e| e.to_string())?;
    let amps: Vec<f64> = fit.snapshots.iter().map(|s| s.amplitude).collect();
    let exponent = waves::amplitude_exponent(times, &amps).map_err(|e| e.to_string())?;
    Ok(FrontRun { fit, exponent })
}

const WAVE_TIMES: [f64; 4] = [12.0, 20.0, 30.0, 48.0];

fn wave_grid() -> FrequencyGrid {
    FrequencyGrid::new(160, 80.0).unwrap()
}

fn criterion5() -> Outcome {
    let dp = canonical();
    let mut info = Vec::new();
    let g12 = front_run(&dp, wave_grid(), 2.0, &WAVE_TIMES, Block::Rho, Block::M, FrontMethod::Potential);
    let (speed_ok, exp_ok, speed_msg) = match &g12 {
        Ok(r) => {
            let rel = r.fit.c_est / dp.c - 1.0;
            for s in &r.fit.snapshots {
                info.push(format!("G12 t = {:>4}: front {:.3}, amplitude {:.4e}", s.t, s.radius, s.amplitude));
            }
            (rel.abs() <= 0.03, (r.exponent + 2.0).abs() <= 0.15, format!("speed {:.4} (c = {:.4}, {:+.2}%), exponent {:.3}", r.fit.c_est, dp.c, 100.0 * rel, r.exponent))
        }
        Err(e) => (false, false, format!("front fit failed: {e}")),
    };
    let early = FrequencyGrid::new(128, 32.0).unwrap();
    match front_run(&dp, early, 1.0, &[5.0, 10.0, 15.0, 20.0], Block::Rho, Block::M, FrontMethod::WeightedPeak) {
        Ok(r) => info.push(format!("weighted-peak method, n = 128, L = 32, t in [5, 20]: speed {:.4}, exponent {:.3}", r.fit.c_est, r.exponent)),
        Err(e) => info.push(format!("weighted-peak method on [5, 20]: {e}")),
    }
    let envs = waves::standard_envelopes(dp.c);
    let sigma = 0.5;
    let mut drift = 0.0f64;
    for &t in &[5.0, 10.0, 20.0] {
        let ratio = |n: usize| {
            let grid = FrequencyGrid::new(n, 32.0).unwrap();
            let f = green::synthesize(&dp, grid, t, sigma, GreenBlockSelector { row: Block::Rho, col: Block::Rho });
            waves::bound_ratio(&f.fields[0], &envs, waves::exclusion_radius(sigma, 32.0 / 64.0), None).ratio
        };
        let (coarse, fine) = (ratio(128), ratio(256));
        drift = drift.max((fine / coarse - 1.0).abs());
        info.push(format!("G11 bound ratio t = {t:>4}: n = 128 {coarse:.5}, n = 256 {fine:.5}"));
    }
    Outcome {
        pass: speed_ok && exp_ok && drift <= 0.1,
        summary: format!("G12 {speed_msg} (target -2 +- 0.15); G11 ratio change under doubling {:.3}% (<= 10%)", 100.0 * drift),
        info,
    }
}

fn cancelled_exponent(dp: &DerivedParams) -> (f64, Vec<f64>) {
    let amps: Vec<f64> = WAVE_TIMES
        .iter()
        .map(|&t| waves::front_amplitude(&waves::radial_profile(&waves::cancelled_response(dp, wave_grid(), t, 2.0)), dp.c))
        .collect();
    (waves::amplitude_exponent(&WAVE_TIMES, &amps).unwrap_or(f64::NAN), amps)
}

fn criterion6() -> Outcome {
    let dp = canonical();
    let (e_cancel, amps) = cancelled_exponent(&dp);
    let e12 = front_run(&dp, wave_grid(), 2.0, &WAVE_TIMES, Block::Rho, Block::M, FrontMethod::Potential).map(|r| r.exponent).unwrap_or(f64::NAN);
    let gain = e12 - e_cancel;
    Outcome {
        pass: (e_cancel + 2.5).abs() <= 0.15 && gain >= 0.3,
        summary: format!("G12 - G14 exponent {e_cancel:.3} (target -2.5 +- 0.15), steeper than G12 ({e12:.3}) by {gain:.3} (>= 0.3)"),
        info: WAVE_TIMES.iter().zip(&amps).map(|(t, a)| format!("t = {t:>4}: amplitude {a:.4e}")).collect(),
    }
}

/// `∫₀^∞ ‖g_s‖₁ ds` for the inner Huygens kernel of K2, the limit of its
/// ratio at the origin.
fn k2_ceiling(c: f64) -> f64 {
    let opts = QuadOptions::with_tol(1e-12, 1e-9);
    let norm = |s: f64| {
        let w = (1.0 + s).sqrt();
        let g = |r: f64| 4.0 * std::f64::consts::PI * r * r * (1.0 + s).powi(-4) * (1.0 + (r - c * s).powi(2) / (1.0 + s)).powi(-3);
        let center = c * s;
        let breaks = [0.0, (center - 30.0 * w).max(0.0), center.max(1e-9), center + 30.0 * w, center + 3000.0 * w];
        let mut b: Vec<f64> = breaks.to_vec();
        b.dedup();
        integrate_pieces(g, &b, opts).map(|r| r.value).unwrap_or(f64::NAN)
    };
    integrate_to_infinity(norm, 0.0, opts).map(|r| r.value).unwrap_or(f64::NAN)
}

fn criterion7() -> Outcome {
    let dp = canonical();
    let grid = SampleGrid::default();
    let loose = QuadOptions::with_tol(1e-9, 1e-6);
    let tight = QuadOptions::with_tol(1e-10, 1e-7);
    let mut pass = true;
    let mut info = Vec::new();
    let mut worst = 0.0f64;
    for which in convolve::Which::ALL {
        let spec = ConvSpec::new(which, dp.c).unwrap();
        let a = convolve::constant_estimate(&spec, &grid, loose);
        let b = convolve::constant_estimate(&spec, &grid, tight);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let change = (b.c_max / a.c_max - 1.0).abs();
                worst = worst.max(change);
                let ok = a.c_max.is_finite() && b.c_max.is_finite() && change <= 0.05;
                pass &= ok;
                let per_t: Vec<String> = b.per_time_max().iter().map(|(t, m)| format!("{t}:{m:.3}")).collect();
                info.push(format!(
                    "{}: C_max {:.4} -> {:.4} at x = {:.2}, t = {}; per-time max {}",
                    which.name(),
                    a.c_max,
                    b.c_max,
                    b.at_x,
                    b.at_t,
                    per_t.join(" ")
                ));
            }
            (a, b) => {
                pass = false;
                info.push(format!("{}: evaluation failed: {:?} / {:?}", which.name(), a.err(), b.err()));
            }
        }
    }
    info.push(format!("K2 ratio at the origin tends to its ceiling {:.3}", k2_ceiling(dp.c)));
    Outcome { pass, summary: format!("all five constants finite; largest change under x10 tightening {:.3}% (<= 5%)", 100.0 * worst), info }
}

/// Relative density plus a common momentum, the same data as the CLI default.
fn evolve_data(eps0: f64) -> InitialDataSpec {
    InitialDataSpec { amplitudes: Amplitudes::Fixed(twophase::cli::EVOLVE_AMPLITUDES), ..InitialDataSpec::localized(eps0, 2.2) }
}

fn solver_grid() -> FrequencyGrid {
    FrequencyGrid::new(64, 32.0).unwrap()
}

fn run_to(dp: &DerivedParams, initial: &SimState, t_end: f64, dt: f64, nonlinear: bool, every: f64) -> evolve::RunOutput {
    let count = (t_end / every).round() as usize;
    let config = RunConfig {
        t_end,
        dt,
        snapshots: (0..=count).map(|k| k as f64 * every).collect(),
        options: SolverOptions { nonlinear, ..SolverOptions::default() },
        keep_states: false,
    };
    evolve::run(dp, initial.clone(), &config).expect("valid run configuration")
}

fn criterion8() -> Outcome {
    let dp = canonical();
    let grid = solver_grid();
    let initial = evolve::init_localized(&dp, &evolve_data(1e-3), grid).unwrap();
    let linear = run_to(&dp, &initial, 10.0, 0.7, false, 10.0);
    let exact = evolve::linear_reference(&dp, &initial, 10.0);
    let lin_err = evolve::relative_l2(&linear.final_state, &exact);

    let mut solver = Solver::new(&dp, grid, SolverOptions::default());
    let mut state = initial.clone();
    let (mut mass, mut momentum) = (0.0f64, 0.0f64);
    let dt = 0.1;
    let steps = 20;
    let mut prev = state.integrals();
    let start = prev;
    for _ in 0..steps {
        solver.step(&mut state, dt).unwrap();
        let now = state.integrals();
        mass = mass.max((now[0] - prev[0]).abs()).max((now[4] - prev[4]).abs());
        prev = now;
    }
    for c in 0..3 {
        let total = |v: &[f64; 8]| v[1 + c] + v[5 + c];
        momentum = momentum.max((total(&prev) - total(&start)).abs() / (steps as f64 * dt));
    }

    let correction = |eps0: f64| {
        let init = evolve::init_localized(&dp, &evolve_data(eps0), grid).unwrap();
        let nl = run_to(&dp, &init, 1.0, 0.1, true, 1.0);
        evolve::l2_distance(&nl.final_state, &evolve::linear_reference(&dp, &init, 1.0))
    };
    let (c1, c2) = (correction(1e-3), correction(2e-3));
    let ratio = c2 / c1;
    Outcome {
        pass: lin_err <= 1e-10 && mass < 1e-12 && momentum < 1e-10 && (3.5..=4.5).contains(&ratio),
        summary: format!(
            "linear run vs exact {lin_err:.2e} (<= 1e-10); mass drift {mass:.1e}/step (< 1e-12); total momentum drift {momentum:.1e}/time (< 1e-10); quadratic ratio {ratio:.3} in [3.5, 4.5]"
        ),
        info: vec![format!("n = 64, L = 32, localized algebraic data r = 2.2, eps0 = 1e-3; nonlinear corrections at t = 1: {c1:.3e}, {c2:.3e}")],
    }
}

const NAMES: [&str; 4] = ["rho", "m", "n", "w"];

fn slopes(out: &evolve::RunOutput, window: (f64, f64)) -> [[f64; 2]; 4] {
    std::array::from_fn(|b| {
        let l2: Vec<(f64, f64)> = out.diagnostics.iter().map(|d| (d.t, d.l2[b])).collect();
        let li: Vec<(f64, f64)> = out.diagnostics.iter().map(|d| (d.t, d.linf[b])).collect();
        [evolve::decay_slope(&l2, window).unwrap_or(f64::NAN), evolve::decay_slope(&li, window).unwrap_or(f64::NAN)]
    })
}

fn slope_line(label: &str, s: &[[f64; 2]; 4]) -> String {
    let parts: Vec<String> = NAMES.iter().zip(s).map(|(n, v)| format!("{n} {:.3}/{:.3}", v[0], v[1])).collect();
    format!("{label} L2/Linf slopes: {}", parts.join(", "))
}

fn criterion9() -> Outcome {
    let dp = canonical();
    let grid = solver_grid();
    let window = (5.0, 20.0);
    let initial = evolve::init_localized(&dp, &evolve_data(1e-3), grid).unwrap();
    let linear = slopes(&run_to(&dp, &initial, 20.0, 1.0, false, 1.0), window);
    let nonlinear_run = run_to(&dp, &initial, 20.0, 0.1, true, 1.0);
    let nonlinear = slopes(&nonlinear_run, window);
    let targets = [-0.75, -1.5];
    let tol_lin = [0.1, 0.15];
    let mut misses = Vec::new();
    for b in 0..4 {
        for k in 0..2 {
            let norm = if k == 0 { "L2" } else { "Linf" };
            if !((linear[b][k] - targets[k]).abs() <= tol_lin[k]) {
                misses.push(format!("linear {} {norm}", NAMES[b]));
            }
            if !((nonlinear[b][k] - targets[k]).abs() <= 0.2) {
                misses.push(format!("nonlinear {} {norm}", NAMES[b]));
            }
        }
    }
    let table = waves::rate_table(&[1.25, 1.5, 2.0, 4.0]);
    let p2 = table.iter().find(|r| r.p == 2.0).unwrap();
    let coincide = (p2.huygens - p2.diffusion).abs() < 1e-12 && (p2.huygens - 0.75).abs() < 1e-12;
    let mut info = vec![
        slope_line("linear    n = 64, L = 32, t in [5, 20]", &linear),
        slope_line("nonlinear eps0 = 1e-3, dt = 0.1", &nonlinear),
        format!("rate table at p = 2: Huygens {} diffusion {}", p2.huygens, p2.diffusion),
    ];
    if let Some(abort) = &nonlinear_run.abort {
        misses.push(format!("nonlinear run aborted: {abort}"));
    }
    let late_grid = FrequencyGrid::new(128, 64.0).unwrap();
    let late_init = evolve::init_localized(&dp, &evolve_data(1e-3), late_grid).unwrap();
    let late = slopes(&run_to(&dp, &late_init, 50.0, 1.0, false, 1.0), (20.0, 50.0));
    info.push(slope_line("linear    n = 128, L = 64, t in [20, 50] (for reference)", &late));
    let pass = misses.is_empty() && coincide;
    let summary = if pass {
        "all eight linear slopes within -0.75 +- 0.1 / -1.5 +- 0.15, nonlinear within 0.2; p = 2 branches coincide".to_string()
    } else {
        format!("outside tolerance: {}", misses.join(", "))
    };
    Outcome { pass, summary, info }
}

fn criterion10() -> Outcome {
    let base = ModelParams::canonical();
    let target = base.pressure_prime(base.n_bar).sqrt();
    let mut gaps = Vec::new();
    let mut info = Vec::new();
    for &rho_bar in &[1.0, 0.1, 0.01] {
        let dp = derive(ModelParams { rho_bar, ..base }).unwrap();
        match front_run(&dp, wave_grid(), 2.0, &WAVE_TIMES, Block::N, Block::W, FrontMethod::Potential) {
            Ok(r) => {
                gaps.push((r.fit.c_est / target - 1.0).abs());
                info.push(format!(
                    "rho_bar = {rho_bar:>5}: front speed {:.4} (base speed {:.4}), {:.2}% from sqrt(P'(n_bar)) = {target:.4}",
                    r.fit.c_est,
                    dp.c,
                    100.0 * (r.fit.c_est / target - 1.0)
                ));
            }
            Err(e) => {
                gaps.push(f64::NAN);
                info.push(format!("rho_bar = {rho_bar}: {e}"));
            }
        }
    }
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    let last = *gaps.last().unwrap();
    Outcome {
        pass: monotone && last <= 0.03,
        summary: format!("G34 front speed approaches sqrt(P'(n_bar)) monotonically: {}; gap at rho_bar = 0.01 {:.2}% (<= 3%)", monotone, 100.0 * last),
        info,
    }
}

fn main() {
    // cargo passes harness flags such as --quiet; selection goes through ACCEPTANCE_ONLY=1,4,...
    let only: Option<Vec<usize>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("spectral identities", criterion1),
        ("expansion remainder orders", criterion2),
        ("propagator correctness", criterion3),
        ("Green's function cross-validation", criterion4),
        ("generalized Huygens structure", criterion5),
        ("cancellation gain", criterion6),
        ("convolution constants", criterion7),
        ("nonlinear solver invariants", criterion8),
        ("decay rates", criterion9),
        ("single-phase speed limit", criterion10),
    ];
    let mut passed = 0;
    let mut ran = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(i + 1))) {
            continue;
        }
        ran += 1;
        let started = Instant::now();
        if report(i + 1, name, started, f()) {
            passed += 1;
        }
    }
    println!("acceptance: {passed}/{ran} criteria pass");
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && passed < ran {
        std::process::exit(1);
    }
}

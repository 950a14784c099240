//! Pseudospectral solver for the nonlinear perturbation system on a periodic
//! cube. The linear part is propagated exactly per Fourier mode; the
//! remaining terms enter through an explicit exponential integrator.

use crate::error::{Error, Result};
use crate::fft3::Fft3;
use crate::fit::ordered_sum;
use crate::green::{FrequencyGrid, SpatialField, SymbolCache};
use crate::linalg::C64;
use crate::model::DerivedParams;
use crate::spectral::{RadialPropagator, M, N, RHO, W};
use crate::waves::decay_exponent;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::Arc;

/// Names of the four unknowns, in state order.
pub const COMPONENTS: [&str; 4] = ["rho", "m", "n", "w"];
/// Offset and width of each unknown in the 8-vector.
const BLOCKS: [(usize, usize); 4] = [(RHO, 1), (M, 3), (N, 1), (W, 3)];

type Mode = [C64; 8];
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Perturbation `(ρ, m, n, w)` about `(ρ̄, 0, n̄, 0)`, stored as unnormalized
/// FFT coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub grid: FrequencyGrid,
    pub t: f64,
    pub hat: Vec<Mode>,
}

impl SimState {
    pub fn zero(grid: FrequencyGrid) -> Self {
        Self { grid, t: 0.0, hat: vec![[ZERO; 8]; grid.len()] }
    }

    /// The eight real fields on the lattice.
    pub fn fields(&self) -> Vec<Vec<f64>> {
        Transforms::new(self.grid).to_physical(&self.hat)
    }

    /// Cube integral of each of the eight fields.
    pub fn integrals(&self) -> [f64; 8] {
        let cell = self.grid.spacing().powi(3);
        std::array::from_fn(|c| self.hat[0][c].re * cell)
    }

    /// Fields as tagged dumps in the Green's-function binary layout.
    pub fn spatial_fields(&self) -> Vec<SpatialField> {
        let names = ["rho", "m1", "m2", "m3", "n", "w1", "w2", "w3"];
        self.fields()
            .into_iter()
            .zip(names)
            .map(|(values, tag)| SpatialField { grid: self.grid, t: self.t, sigma: 0.0, tag: tag.to_string(), values })
            .collect()
    }
}

/// Packs pairs of real fields into single complex transforms.
#[derive(Debug)]
struct Transforms {
    grid: FrequencyGrid,
    fft: Fft3,
    neg: Vec<usize>,
}

impl Transforms {
    fn new(grid: FrequencyGrid) -> Self {
        let n = grid.n;
        let neg = (0..grid.len())
            .map(|idx| {
                let (i, j, k) = (idx / (n * n), (idx / n) % n, idx % n);
                (((n - i) % n) * n + (n - j) % n) * n + (n - k) % n
            })
            .collect();
        Self { grid, fft: Fft3::new(n), neg }
    }

    fn to_physical(&self, hat: &[Mode]) -> Vec<Vec<f64>> {
        let scale = 1.0 / self.grid.len() as f64;
        let mut out = Vec::with_capacity(8);
        for pair in 0..4 {
            let (a, b) = (2 * pair, 2 * pair + 1);
            let mut buf: Vec<C64> = hat.par_iter().map(|u| u[a] + C64::new(0.0, 1.0) * u[b]).collect();
            self.fft.inverse(&mut buf);
            out.push(buf.par_iter().map(|z| z.re * scale).collect());
            out.push(buf.par_iter().map(|z| z.im * scale).collect());
        }
        out
    }

    fn to_spectral(&self, fields: &[Vec<f64>]) -> Vec<Vec<C64>> {
        let mut out = Vec::with_capacity(fields.len());
        for pair in fields.chunks(2) {
            let second = pair.get(1);
            let mut buf: Vec<C64> = (0..self.grid.len())
                .into_par_iter()
                .map(|i| C64::new(pair[0][i], second.map_or(0.0, |s| s[i])))
                .collect();
            self.fft.forward(&mut buf);
            if second.is_none() {
                out.push(buf);
                continue;
            }
            let (a, b): (Vec<C64>, Vec<C64>) = (0..buf.len())
                .into_par_iter()
                .map(|i| {
                    let (f, g) = (buf[i], buf[self.neg[i]].conj());
                    (0.5 * (f + g), C64::new(0.0, -0.5) * (f - g))
                })
                .unzip();
            out.push(a);
            out.push(b);
        }
        out
    }

    /// Two-thirds dealiasing mask.
    fn keeps(&self, k: [i64; 3]) -> bool {
        let n = self.grid.n as i64;
        k.iter().all(|&kd| 3 * kd.abs() < n)
    }
}

/// Spatial profile of localized initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileFamily {
    /// `(1 + |x|²)^{-r}`
    Algebraic { r: f64 },
    /// `exp(-|x|²/width²)`
    Gaussian { width: f64 },
}

impl ProfileFamily {
    pub fn eval(&self, r2: f64) -> f64 {
        match *self {
            ProfileFamily::Algebraic { r } => (1.0 + r2).powf(-r),
            ProfileFamily::Gaussian { width } => (-r2 / (width * width)).exp(),
        }
    }
}

/// Per-component weights multiplying the common profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Amplitudes {
    /// All ones.
    Uniform,
    /// Uniform random draws in `[-1, 1]`.
    Seeded(u64),
    Fixed([f64; 8]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialDataSpec {
    pub eps0: f64,
    pub profile: ProfileFamily,
    pub amplitudes: Amplitudes,
    pub zero_mean_momentum: bool,
}

impl InitialDataSpec {
    pub fn localized(eps0: f64, r: f64) -> Self {
        Self { eps0, profile: ProfileFamily::Algebraic { r }, amplitudes: Amplitudes::Uniform, zero_mean_momentum: false }
    }

    pub fn validate(&self, dp: &DerivedParams) -> Result<()> {
        if !(self.eps0 >= 0.0 && self.eps0.is_finite()) {
            return Err(Error::InvalidParams(format!("eps0 must be nonnegative, got {}", self.eps0)));
        }
        match self.profile {
            ProfileFamily::Algebraic { r } if !(r > 2.1) => {
                return Err(Error::InvalidParams(format!("decay exponent must exceed 21/10, got {r}")))
            }
            ProfileFamily::Gaussian { width } if !(width > 0.0) => {
                return Err(Error::InvalidParams(format!("width must be positive, got {width}")))
            }
            _ => {}
        }
        if let Amplitudes::Fixed(a) = self.amplitudes {
            if a.iter().any(|v| !(v.abs() <= 1.0)) {
                return Err(Error::InvalidParams(format!("fixed amplitudes must lie in [-1, 1], got {a:?}")));
            }
        }
        let limit = 0.25 * dp.params.rho_bar.min(dp.params.n_bar);
        if self.eps0 > limit {
            return Err(Error::InvalidParams(format!(
                "eps0 = {} breaks the positivity margin (must be <= {limit})",
                self.eps0
            )));
        }
        Ok(())
    }

    pub fn amplitudes(&self) -> [f64; 8] {
        match self.amplitudes {
            Amplitudes::Uniform => [1.0; 8],
            Amplitudes::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                std::array::from_fn(|_| rng.random_range(-1.0..=1.0))
            }
            Amplitudes::Fixed(a) => a,
        }
    }
}

/// Localized data `a_c·ε₀·φ(x)` in every component.
pub fn init_localized(dp: &DerivedParams, spec: &InitialDataSpec, grid: FrequencyGrid) -> Result<SimState> {
    spec.validate(dp)?;
    let tf = Transforms::new(grid);
    let n = grid.n;
    let amps = spec.amplitudes();
    let phi: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let x = [grid.position(idx / (n * n)), grid.position((idx / n) % n), grid.position(idx % n)];
            spec.eps0 * spec.profile.eval(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])
        })
        .collect();
    let fields: Vec<Vec<f64>> = amps.iter().map(|a| phi.iter().map(|p| a * p).collect()).collect();
    let spectral = tf.to_spectral(&fields);
    let mut hat: Vec<Mode> = (0..grid.len()).map(|i| std::array::from_fn(|c| spectral[c][i])).collect();
    if spec.zero_mean_momentum {
        for c in 0..3 {
            hat[0][M + c] = ZERO;
            hat[0][W + c] = ZERO;
        }
    }
    Ok(SimState { grid, t: 0.0, hat })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// `Û ← E(Û + dt·N̂(U))`, first order.
    LawsonEuler,
    /// Two-stage Lawson–Heun, second order.
    LawsonHeun,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub nonlinear: bool,
    pub scheme: Scheme,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { nonlinear: true, scheme: Scheme::LawsonEuler }
    }
}

pub struct Solver {
    dp: DerivedParams,
    grid: FrequencyGrid,
    tf: Transforms,
    pub options: SolverOptions,
    tables: HashMap<u64, Arc<Vec<RadialPropagator>>>,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver").field("grid", &self.grid).field("options", &self.options).finish()
    }
}

impl Solver {
    pub fn new(dp: &DerivedParams, grid: FrequencyGrid, options: SolverOptions) -> Self {
        Self { dp: *dp, grid, tf: Transforms::new(grid), options, tables: HashMap::new() }
    }

    /// Reduced propagators at `dt` for every integer |k|².
    fn table(&mut self, dt: f64) -> Arc<Vec<RadialPropagator>> {
        let (dp, grid) = (self.dp, self.grid);
        self.tables
            .entry(dt.to_bits())
            .or_insert_with(|| {
                let half = grid.n / 2;
                let dk = grid.dk();
                Arc::new(
                    (0..=3 * half * half)
                        .into_par_iter()
                        .map(|k2| RadialPropagator::new(&dp, dk * (k2 as f64).sqrt(), dt))
                        .collect(),
                )
            })
            .clone()
    }

    fn propagate(&mut self, hat: &mut [Mode], dt: f64) {
        let table = self.table(dt);
        let grid = self.grid;
        hat.par_iter_mut().enumerate().for_each(|(idx, u)| {
            let k = reduced_index(grid, idx);
            let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as usize;
            let norm = (k2 as f64).sqrt();
            let dir = if k2 == 0 { [1.0, 0.0, 0.0] } else { [k[0] as f64 / norm, k[1] as f64 / norm, k[2] as f64 / norm] };
            table[k2].apply(&dir, u);
        });
    }

    /// Nonlinear forcing `(0, F₁, 0, F₂)` in Fourier space, dealiased.
    pub fn forcing(&self, hat: &[Mode], t: f64) -> Result<Vec<Mode>> {
        let f = self.tf.to_physical(hat);
        let dp = &self.dp;
        let (rb, nb) = (dp.params.rho_bar, dp.params.n_bar);
        let grid = self.grid;
        let n = grid.n;
        if let Some(idx) = (0..grid.len()).into_par_iter().find_any(|&i| f.iter().any(|c| !c[i].is_finite())) {
            let x = [grid.position(idx / (n * n)), grid.position((idx / n) % n), grid.position(idx % n)];
            return Err(Error::Numerical(format!("non-finite state at t = {t}, x = {x:?}")));
        }
        if let Some(idx) =
            (0..grid.len()).into_par_iter().find_any(|&i| f[RHO][i] + rb <= 0.5 * rb || f[N][i] + nb <= 0.5 * nb)
        {
            let x = [grid.position(idx / (n * n)), grid.position((idx / n) % n), grid.position(idx % n)];
            return Err(Error::Numerical(format!(
                "positivity guard violated at t = {t}, x = {x:?} (rho = {}, n = {})",
                f[RHO][idx] + rb,
                f[N][idx] + nb
            )));
        }
        let point = |g: &(dyn Fn(usize) -> f64 + Sync)| -> Vec<f64> { (0..grid.len()).into_par_iter().map(g).collect() };
        let mut products = Vec::with_capacity(19);
        for (a, b) in SYM_PAIRS {
            products.push(point(&|i| f[M + a][i] * f[M + b][i] / (f[RHO][i] + rb)));
        }
        for (a, b) in SYM_PAIRS {
            products.push(point(&|i| f[W + a][i] * f[W + b][i] / (f[N][i] + nb)));
        }
        for a in 0..3 {
            products.push(point(&|i| f[N][i] * f[W + a][i] / (f[N][i] + nb)));
        }
        let p = &dp.params;
        let p0 = p.pressure(nb);
        products.push(point(&|i| p.pressure(f[N][i] + nb) - p0 - dp.alpha1 * f[N][i]));
        for a in 0..3 {
            products.push(point(&|i| damping_factor(dp, f[RHO][i], f[N][i]) * f[W + a][i]));
        }
        let s = self.tf.to_spectral(&products);
        let dk = grid.dk();
        let visc = dp.mu_bar + dp.lambda_bar;
        let out = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let k = grid.wave_index(idx);
                let mut u = [ZERO; 8];
                if !self.tf.keeps(k) {
                    return u;
                }
                let xi = [dk * k[0] as f64, dk * k[1] as f64, dk * k[2] as f64];
                let s2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                let i = C64::new(0.0, 1.0);
                let sym = |base: usize, a: usize, b: usize| s[base + SYM_INDEX[a][b]][idx];
                let xb: C64 = (0..3).map(|b| xi[b] * s[12 + b][idx]).sum();
                for a in 0..3 {
                    let div_a: C64 = (0..3).map(|b| xi[b] * sym(0, a, b)).sum();
                    let div_w: C64 = (0..3).map(|b| xi[b] * sym(6, a, b)).sum();
                    let damp = s[16 + a][idx];
                    u[M + a] = -i * div_a + damp;
                    u[W + a] = -i * div_w + dp.mu_bar * s2 * s[12 + a][idx] + visc * xi[a] * xb - i * xi[a] * s[15][idx] - damp;
                }
                u
            })
            .collect();
        Ok(out)
    }

    /// One step of the configured exponential integrator.
    pub fn step(&mut self, state: &mut SimState, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("time step must be positive, got {dt}")));
        }
        if !self.options.nonlinear {
            self.propagate(&mut state.hat, dt);
            state.t += dt;
            return Ok(());
        }
        let k1 = self.forcing(&state.hat, state.t)?;
        match self.options.scheme {
            Scheme::LawsonEuler => {
                axpy(&mut state.hat, dt, &k1);
                self.propagate(&mut state.hat, dt);
            }
            Scheme::LawsonHeun => {
                let mut base = state.hat.clone();
                axpy(&mut base, 0.5 * dt, &k1);
                let mut predictor = state.hat.clone();
                axpy(&mut predictor, dt, &k1);
                self.propagate(&mut predictor, dt);
                let k2 = self.forcing(&predictor, state.t + dt)?;
                self.propagate(&mut base, dt);
                axpy(&mut base, 0.5 * dt, &k2);
                state.hat = base;
            }
        }
        state.t += dt;
        Ok(())
    }
}

/// Wavevector with Nyquist components set to zero: the unpaired Nyquist
/// column carries no odd derivative, which keeps real fields real and the
/// linear update a semigroup.
fn reduced_index(grid: FrequencyGrid, idx: usize) -> [i64; 3] {
    let nyq = -(grid.n as i64 / 2);
    grid.wave_index(idx).map(|kd| if kd == nyq { 0 } else { kd })
}

const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
const SYM_INDEX: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];

fn axpy(y: &mut [Mode], a: f64, x: &[Mode]) {
    y.par_iter_mut().zip(x.par_iter()).for_each(|(u, v)| {
        for c in 0..8 {
            u[c] += v[c] * a;
        }
    });
}

/// `(ρ+ρ̄)/(n+n̄) - ρ̄/n̄`, the coefficient of the drag exchange term.
pub fn damping_factor(dp: &DerivedParams, rho: f64, n: f64) -> f64 {
    let (rb, nb) = (dp.params.rho_bar, dp.params.n_bar);
    (rho + rb) / (n + nb) - rb / nb
}

/// Drag exchange terms of the two momentum equations at every lattice point;
/// they enter with opposite signs.
pub fn damping_exchange(dp: &DerivedParams, fields: &[Vec<f64>]) -> ([Vec<f64>; 3], [Vec<f64>; 3]) {
    let f1 = std::array::from_fn(|a| {
        fields[W + a].iter().enumerate().map(|(i, w)| damping_factor(dp, fields[RHO][i], fields[N][i]) * w).collect()
    });
    let f2 = std::array::from_fn(|a| {
        fields[W + a].iter().enumerate().map(|(i, w)| -(damping_factor(dp, fields[RHO][i], fields[N][i]) * w)).collect()
    });
    (f1, f2)
}

/// Physical `(F₁, F₂)` for a state.
pub fn nonlinear_rhs(dp: &DerivedParams, state: &SimState) -> Result<([Vec<f64>; 3], [Vec<f64>; 3])> {
    let solver = Solver::new(dp, state.grid, SolverOptions::default());
    let forcing = solver.forcing(&state.hat, state.t)?;
    let f = solver.tf.to_physical(&forcing);
    Ok((std::array::from_fn(|a| f[M + a].clone()), std::array::from_fn(|a| f[W + a].clone())))
}

/// Exact linear evolution through the full-symbol Green's matrix.
pub fn linear_reference(dp: &DerivedParams, initial: &SimState, t: f64) -> SimState {
    let cache = SymbolCache::new(dp, initial.grid, t, 0.0);
    let grid = initial.grid;
    let hat = initial.hat.par_iter().enumerate().map(|(idx, u)| cache.apply(reduced_index(grid, idx), u)).collect();
    SimState { grid, t: initial.t + t, hat }
}

/// Lattice `‖a - b‖₂` over all eight fields.
pub fn l2_distance(a: &SimState, b: &SimState) -> f64 {
    let pairs: Vec<(&Mode, &Mode)> = a.hat.iter().zip(&b.hat).collect();
    let sum = ordered_sum(&pairs, |(u, v)| (0..8).map(|c| (u[c] - v[c]).norm_sqr()).sum());
    (sum * a.grid.spacing().powi(3) / a.grid.len() as f64).sqrt()
}

/// `‖a - b‖₂ / ‖b‖₂` over all eight fields.
pub fn relative_l2(a: &SimState, b: &SimState) -> f64 {
    let pairs: Vec<(&Mode, &Mode)> = a.hat.iter().zip(&b.hat).collect();
    let num = ordered_sum(&pairs, |(u, v)| (0..8).map(|c| (u[c] - v[c]).norm_sqr()).sum());
    let den = ordered_sum(&b.hat, |v| v.iter().map(|z| z.norm_sqr()).sum());
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// Snapshot diagnostics. Norms are taken of the fluctuation about the cube
/// mean, since mean modes on a periodic box never decay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub mass_rho: f64,
    pub mass_n: f64,
    pub momentum: [f64; 3],
    /// `(ρ, m, n, w)`; vector unknowns use the Euclidean magnitude.
    pub l2: [f64; 4],
    pub linf: [f64; 4],
    pub max_abs: [f64; 4],
}

pub fn diagnostics(state: &SimState) -> Diagnostics {
    let cell = state.grid.spacing().powi(3);
    let integrals = state.integrals();
    let npts = state.grid.len() as f64;
    let mut l2 = [0.0; 4];
    for (b, (off, width)) in BLOCKS.iter().enumerate() {
        let sum = ordered_sum(&state.hat[1..], |u| (0..*width).map(|c| u[off + c].norm_sqr()).sum());
        l2[b] = (sum * cell / npts).sqrt();
    }
    let fields = state.fields();
    let mut linf = [0.0; 4];
    let mut max_abs = [0.0; 4];
    for (b, (off, width)) in BLOCKS.iter().enumerate() {
        let means: Vec<f64> = (0..*width).map(|c| fields[off + c].iter().sum::<f64>() / npts).collect();
        let (fl, full) = (0..state.grid.len())
            .into_par_iter()
            .map(|i| {
                let (mut a, mut f) = (0.0, 0.0);
                for c in 0..*width {
                    let v = fields[off + c][i];
                    a += (v - means[c]).powi(2);
                    f += v * v;
                }
                (a.sqrt(), f.sqrt())
            })
            .reduce(|| (0.0, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)));
        linf[b] = fl;
        max_abs[b] = full;
    }
    Diagnostics {
        t: state.t,
        mass_rho: integrals[RHO],
        mass_n: integrals[N],
        momentum: std::array::from_fn(|c| integrals[M + c] + integrals[W + c]),
        l2,
        linf,
        max_abs,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub t_end: f64,
    pub dt: f64,
    pub snapshots: Vec<f64>,
    pub options: SolverOptions,
    /// Keep full states at snapshot times.
    pub keep_states: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub diagnostics: Vec<Diagnostics>,
    pub states: Vec<SimState>,
    pub final_state: SimState,
    pub warnings: Vec<String>,
    /// Guard or NaN failure with its time stamp; the run stops there.
    pub abort: Option<String>,
    pub steps: usize,
}

/// Integrates from `initial` to `t_end`, recording diagnostics at each snapshot.
pub fn run(dp: &DerivedParams, initial: SimState, config: &RunConfig) -> Result<RunOutput> {
    if !(config.dt > 0.0) || !(config.t_end >= initial.t) {
        return Err(Error::Config(format!("need dt > 0 and t_end >= t0 (dt = {}, t_end = {})", config.dt, config.t_end)));
    }
    let grid = initial.grid;
    let mut warnings = Vec::new();
    if grid.l < dp.c * config.t_end {
        warnings.push(format!(
            "wrap hazard: fronts reach c*t_end = {:.3} beyond half-width {}; decay is only meaningful before wrap",
            dp.c * config.t_end,
            grid.l
        ));
    }
    let mut targets: Vec<f64> = config.snapshots.iter().copied().filter(|t| *t >= initial.t && *t <= config.t_end).collect();
    targets.push(config.t_end);
    targets.sort_by(|a, b| a.partial_cmp(b).expect("finite snapshot times"));
    targets.dedup();
    let mut solver = Solver::new(dp, grid, config.options);
    let mut state = initial;
    let mut out = RunOutput {
        diagnostics: Vec::new(),
        states: Vec::new(),
        final_state: state.clone(),
        warnings,
        abort: None,
        steps: 0,
    };
    let tol = 1e-9 * config.dt;
    'outer: for target in targets {
        while state.t < target - tol {
            let remaining = target - state.t;
            // equal sub-steps reuse one propagator table per segment
            let count = (remaining / config.dt - 1e-9).ceil().max(1.0);
            let h = remaining / count;
            for _ in 0..count as usize {
                if let Err(e) = solver.step(&mut state, h) {
                    out.abort = Some(format!("t = {:.6}: {e}", state.t));
                    break 'outer;
                }
                out.steps += 1;
            }
            state.t = target;
        }
        if config.snapshots.iter().any(|t| (t - target).abs() <= tol) {
            out.diagnostics.push(diagnostics(&state));
            if config.keep_states {
                out.states.push(state.clone());
            }
        }
    }
    out.final_state = state;
    Ok(out)
}

/// Slope of `log(norm)` against `log(1+t)` over samples with `t` in `window`.
pub fn decay_slope(series: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    let (ts, vs): (Vec<f64>, Vec<f64>) = series.iter().filter(|(t, _)| *t >= window.0 && *t <= window.1).copied().unzip();
    decay_exponent(&ts, &vs, 4, 1.0)
}

//! Command-line campaigns. Each subcommand writes CSV or binary artifacts
//! into the output directory together with `manifest.toml`, which records
//! inputs, settings, tolerances, check outcomes and artifact hashes.
//!
//! Exit status: 0 when every check passes, 1 when a check fails or a
//! computation aborts, 2 on a configuration error.

use crate::asymptotics::{self, catalog, default_sequence, remainder_order_check};
use crate::convolve::{self, ConvSpec, SampleGrid};
use crate::error::{Error, Result};
use crate::evolve::{self, Amplitudes, InitialDataSpec, RunConfig, SolverOptions};
use crate::green::{self, periodize_axis, periodize_axis_longitudinal, radial_oracle, radial_oracle_longitudinal, Block, FrequencyGrid, GreenBlockSelector};
use crate::model::{derive, DerivedParams, ModelParams};
use crate::quad::QuadOptions;
use crate::spectral::{log_grid, spectrum_path, stability_scan};
use crate::waves::{self, FrontMethod};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Version tag written into every CSV header comment.
pub const CSV_SCHEMA: u32 = 1;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "TWOPHASE_OUT";

#[derive(Debug, Parser)]
#[command(name = "twophase", version, about = "Linear and nonlinear decay campaigns for a damped Euler / Navier-Stokes two-phase model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// TOML file with rho_bar, n_bar, a_coef, gamma, mu, lambda.
    #[arg(long, global = true, value_name = "FILE")]
    pub params: Option<PathBuf>,
    /// Overrides one model parameter, e.g. `--set mu=2`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output directory (default: $TWOPHASE_OUT, else ./twophase-out).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Grid points per axis.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Half-width of the periodic cube.
    #[arg(long = "L", global = true, value_name = "L")]
    pub l: Option<f64>,
    /// Gaussian mollification width.
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    /// Comma-separated times (the last one is the end time for `evolve`).
    #[arg(long, global = true, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    /// Time step for `evolve`.
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Initial-data amplitude for `evolve`.
    #[arg(long, global = true)]
    pub eps0: Option<f64>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seeds random per-component amplitudes of the `evolve` initial data.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Relative quadrature tolerance.
    #[arg(long = "tol-quad", global = true)]
    pub tol_quad: Option<f64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Eigenvalue scan of the compressible and transverse symbols.
    Spectrum {
        #[arg(long, default_value_t = 1e-3)]
        s_min: f64,
        #[arg(long, default_value_t = 1e3)]
        s_max: f64,
        #[arg(long, default_value_t = 500)]
        points: usize,
    },
    /// Remainder orders of the small- and large-frequency expansions.
    ExpansionCheck,
    /// Synthesizes one block of the mollified Green's matrix.
    Green {
        /// Block as two one-based digits, e.g. 11 or 12 (optionally prefixed by G).
        #[arg(long, default_value = "11")]
        block: String,
        /// Number of axis radii compared against the quadrature oracle.
        #[arg(long, default_value_t = 20)]
        radii: usize,
    },
    /// Envelope ratios, front speed and front-amplitude exponents.
    Waves,
    /// Constants of the convolution inequalities over the sample grid.
    Convolve {
        /// One of diffusion-pair, huygens-algebraic, K1, K2, K3, or all.
        #[arg(long, default_value = "all")]
        which: String,
    },
    /// Pseudospectral run from localized data.
    Evolve {
        /// Drop the nonlinear terms and compare with exact propagation.
        #[arg(long)]
        linear: bool,
        /// Diagnostic interval.
        #[arg(long, default_value_t = 1.0)]
        every: f64,
        /// Decay exponent of the algebraic initial profile.
        #[arg(long, default_value_t = 2.2)]
        decay: f64,
        /// Write the final fields in the binary field layout.
        #[arg(long)]
        dump: bool,
    },
    /// Every campaign in sequence with default settings.
    All,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::ExpansionCheck => "expansion-check",
            Command::Green { .. } => "green",
            Command::Waves => "waves",
            Command::Convolve { .. } => "convolve",
            Command::Evolve { .. } => "evolve",
            Command::All => "all",
        }
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
struct ArtifactRecord {
    path: String,
    sha256: String,
}

#[derive(Debug, Clone, Serialize)]
struct CampaignRecord {
    name: String,
    settings: BTreeMap<String, String>,
}

#[derive(Debug, Serialize)]
struct Manifest {
    tool: String,
    version: String,
    subcommand: String,
    status: String,
    csv_schema: u32,
    params: ModelParams,
    campaigns: Vec<CampaignRecord>,
    checks: Vec<Check>,
    artifacts: Vec<ArtifactRecord>,
    notes: Vec<String>,
}

/// Collects artifacts, checks and notes for one invocation.
struct Session {
    dir: PathBuf,
    dp: DerivedParams,
    common: Common,
    campaigns: Vec<CampaignRecord>,
    checks: Vec<Check>,
    artifacts: Vec<ArtifactRecord>,
    notes: Vec<String>,
}

impl Session {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        std::fs::write(self.dir.join(name), bytes)?;
        self.artifacts.push(ArtifactRecord { path: name.to_string(), sha256: hex_digest(bytes) });
        Ok(())
    }

    fn record(&mut self, name: &str, settings: &[(&str, String)]) {
        let settings = settings.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        self.campaigns.push(CampaignRecord { name: name.to_string(), settings });
    }

    fn quad(&self, default_rel: f64) -> QuadOptions {
        let rel = self.common.tol_quad.unwrap_or(default_rel);
        QuadOptions::with_tol(1e-3 * rel, rel)
    }

    fn grid(&self, n: usize, l: f64) -> Result<FrequencyGrid> {
        FrequencyGrid::new(self.common.n.unwrap_or(n), self.common.l.unwrap_or(l))
    }

    fn times(&self, default: &[f64]) -> Result<Vec<f64>> {
        let ts = self.common.t.clone().unwrap_or_else(|| default.to_vec());
        if ts.is_empty() || ts.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::Config(format!("times must be finite and nonnegative, got {ts:?}")));
        }
        Ok(ts)
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// CSV text with a versioned header comment.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(kind: &str, columns: &[&str]) -> Self {
        Self { text: format!("# twophase {kind} schema v{CSV_SCHEMA}\n{}\n", columns.join(",")) }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        let line: Vec<&str> = cells.iter().map(|c| c.as_ref()).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(",")
}

fn file_tag(tag: &str) -> String {
    tag.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect::<String>().trim_matches('_').to_string()
}

fn parse_block(s: &str) -> Result<GreenBlockSelector> {
    let digits = s.trim_start_matches(['G', 'g']);
    let mut it = digits.chars().map(|c| c.to_digit(10));
    match (it.next(), it.next(), it.next()) {
        (Some(Some(r)), Some(Some(c)), None) => GreenBlockSelector::from_one_based(r as usize, c as usize),
        _ => Err(Error::Config(format!("block must look like 12 or G12, got {s:?}"))),
    }
}

fn load_params(common: &Common) -> Result<ModelParams> {
    let mut params = match &common.params {
        None => ModelParams::canonical(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            ModelParams::from_toml_str(&text)?
        }
    };
    for item in &common.set {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {item:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("--set {key}: {value:?} is not a number")))?;
        let slot = match key.trim() {
            "rho_bar" => &mut params.rho_bar,
            "n_bar" => &mut params.n_bar,
            "a_coef" => &mut params.a_coef,
            "gamma" => &mut params.gamma,
            "mu" => &mut params.mu,
            "lambda" => &mut params.lambda,
            other => return Err(Error::Config(format!("--set: unknown parameter {other:?}"))),
        };
        *slot = value;
    }
    params.validate()?;
    Ok(params)
}

fn output_dir(common: &Common) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("twophase-out"))
}

fn spectrum(s: &mut Session, s_min: f64, s_max: f64, points: usize) -> Result<()> {
    if !(s_min > 0.0 && s_max > s_min) || points < 2 {
        return Err(Error::Config(format!("need 0 < s_min < s_max and points >= 2, got {s_min}, {s_max}, {points}")));
    }
    let grid = log_grid(s_min, s_max, points);
    let path = spectrum_path(&s.dp, &grid);
    let stab = stability_scan(&s.dp, &grid);
    let mut csv = Csv::new(
        "spectrum",
        &["s", "r1_re", "r1_im", "r2_re", "r2_im", "r3_re", "r3_im", "r4_re", "r4_im", "kappa1", "kappa2", "gap", "max_re", "labeled"],
    );
    let mut worst = f64::NEG_INFINITY;
    for (sp, row) in path.iter().zip(&stab) {
        let max_re = row.max_re_compressible.max(row.max_re_incompressible);
        worst = worst.max(max_re);
        let mut cells = vec![num(sp.s)];
        for r in &sp.r {
            cells.push(num(r.re));
            cells.push(num(r.im));
        }
        let k = crate::spectral::spectrum_incompressible(&s.dp, sp.s);
        cells.extend([num(k.kappa1), num(k.kappa2), num(sp.gap), num(max_re), (sp.labeled as u8).to_string()]);
        csv.row(&cells);
    }
    s.write("spectrum.csv", &csv.into_bytes())?;
    s.checks.push(Check::new("spectrum.stable", worst < 0.0, format!("largest real part {worst:e} over {points} frequencies")));
    s.record("spectrum", &[("s_min", num(s_min)), ("s_max", num(s_max)), ("points", points.to_string())]);
    Ok(())
}

fn expansion_check(s: &mut Session) -> Result<()> {
    let mut csv = Csv::new("expansion", &["branch", "regime", "part", "claimed", "fitted", "pass"]);
    for spec in catalog() {
        let check = remainder_order_check(&spec, &s.dp, &default_sequence(spec.regime))?;
        let regime = format!("{:?}", spec.regime).to_lowercase();
        let part = format!("{:?}", spec.part).to_lowercase();
        let fitted = if check.degenerate { "floor".to_string() } else { num(check.fitted) };
        csv.row(&[spec.branch.name().to_string(), regime.clone(), part.clone(), num(check.claimed), fitted.clone(), check.pass.to_string()]);
        s.checks.push(Check::new(
            format!("expansion.{}.{regime}.{part}", spec.branch.name()),
            check.pass,
            format!("claimed {} fitted {fitted}", check.claimed),
        ));
    }
    let seq: Vec<f64> = (0..4).map(|k| 0.05 / 2f64.powi(k)).collect();
    let proj = asymptotics::projector_leading_check(&s.dp, &seq)?;
    for (name, fitted) in proj.names.iter().zip(&proj.fitted) {
        let pass = *fitted >= asymptotics::PROJECTOR_MIN_SLOPE;
        csv.row(&[format!("projector {name}"), "low".into(), "full".into(), "1".into(), num(*fitted), pass.to_string()]);
        s.checks.push(Check::new(format!("projector.{name}"), pass, format!("deviation slope {fitted}")));
    }
    s.write("expansion.csv", &csv.into_bytes())?;
    s.record("expansion-check", &[("projector_s", list(&seq))]);
    Ok(())
}

/// Axis radii every third grid point from the center.
fn axis_radii(grid: FrequencyGrid, count: usize) -> Vec<f64> {
    (1..=count).map(|k| 3.0 * k as f64 * grid.spacing()).filter(|r| *r < grid.l).collect()
}

fn axis_values(field: &green::SpatialField, radii: &[f64]) -> Vec<f64> {
    let h = field.grid.spacing();
    let c = field.grid.n / 2;
    radii.iter().map(|r| field.at(c + (r / h).round() as usize, c, c)).collect()
}

fn max_relative(num: &[f64], reference: &[f64]) -> f64 {
    let scale = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    num.iter().zip(reference).fold(0.0f64, |m, (a, b)| m.max((a - b).abs() / scale))
}

fn green_campaign(s: &mut Session, block: &str, count: usize) -> Result<()> {
    let sel = parse_block(block)?;
    let grid = s.grid(128, 32.0)?;
    let sigma = s.common.sigma.unwrap_or(1.0);
    if !(sigma > 0.0) {
        return Err(Error::Config(format!("sigma must be positive, got {sigma}")));
    }
    let times = s.times(&[10.0])?;
    let opts = s.quad(1e-10);
    let radii = axis_radii(grid, count);
    let tag = format!("G{}{}", sel.row.index() + 1, sel.col.index() + 1);
    for &t in &times {
        if t <= 0.0 {
            return Err(Error::Config("Green's function times must be positive".into()));
        }
        let syn = green::synthesize(&s.dp, grid, t, sigma, sel);
        s.notes.extend(syn.warnings.iter().map(|w| format!("{tag} t={t}: {w}")));
        for field in &syn.fields {
            let stem = format!("green_{}_t{}", file_tag(&field.tag), num(t));
            let mut bin = Vec::new();
            field.write_binary(&mut bin)?;
            s.write(&format!("{stem}.bin"), &bin)?;
            let prof = waves::radial_profile(field);
            let mut csv = Csv::new("green-radial", &["r", "value"]);
            for (r, v) in prof.r.iter().zip(&prof.mean) {
                csv.row(&[num(*r), num(*v)]);
            }
            s.write(&format!("{stem}.csv"), &csv.into_bytes())?;
        }
        let scalar = |b: Block| matches!(b, Block::Rho | Block::N);
        let oracle = if scalar(sel.row) && scalar(sel.col) {
            let comp = (sel.row.index(), sel.col.index());
            let field = &syn.fields[0];
            let reference = periodize_axis(grid, &radii, |rs| radial_oracle(&s.dp, comp, rs, t, sigma, opts))?;
            Some((axis_values(field, &radii), reference))
        } else if scalar(sel.row) {
            let comp = (sel.row.index(), sel.col.index());
            let arr: [green::SpatialField; 3] = syn.fields.clone().try_into().expect("vector column has three entries");
            let radial = waves::radial_component(&arr, "radial");
            let reference =
                periodize_axis_longitudinal(grid, &radii, |rs| radial_oracle_longitudinal(&s.dp, comp, rs, t, sigma, opts))?;
            Some((axis_values(&radial, &radii), reference))
        } else {
            None
        };
        if let Some((synth, reference)) = oracle {
            let err = max_relative(&synth, &reference);
            let mut csv = Csv::new("green-oracle", &["r", "synthesized", "oracle"]);
            for ((r, a), b) in radii.iter().zip(&synth).zip(&reference) {
                csv.row(&[num(*r), num(*a), num(*b)]);
            }
            s.write(&format!("green_{tag}_oracle_t{}.csv", num(t)), &csv.into_bytes())?;
            s.checks.push(Check::new(
                format!("green.{tag}.oracle.t{}", num(t)),
                err <= 1e-3,
                format!("max relative error {err:e} at {} radii", radii.len()),
            ));
        }
    }
    s.record(
        "green",
        &[("block", tag), ("n", grid.n.to_string()), ("L", num(grid.l)), ("sigma", num(sigma)), ("t", list(&times)), ("tol_quad", num(opts.rel))],
    );
    Ok(())
}

fn waves_campaign(s: &mut Session) -> Result<()> {
    let grid = s.grid(160, 80.0)?;
    let sigma = s.common.sigma.unwrap_or(2.0);
    let times = s.times(&[12.0, 20.0, 30.0, 48.0])?;
    if times.iter().any(|t| *t <= 0.0) {
        return Err(Error::Config("wave times must be positive".into()));
    }
    let dp = s.dp;
    let c = dp.c;
    let envs = waves::standard_envelopes(c);
    let r_min = waves::exclusion_radius(sigma, grid.spacing());
    let mut ratio_csv = Csv::new("waves-ratio", &["t", "ratio", "radius"]);
    let mut g12 = Vec::new();
    let mut cancelled = Vec::new();
    for &t in &times {
        let g11 = green::synthesize(&dp, grid, t, sigma, GreenBlockSelector { row: Block::Rho, col: Block::Rho });
        let br = waves::bound_ratio(&g11.fields[0], &envs, r_min, None);
        ratio_csv.row(&[num(t), num(br.ratio), num(br.radius)]);
        g12.push(waves::radial_profile(&waves::momentum_response(&dp, grid, t, sigma)));
        cancelled.push(waves::radial_profile(&waves::cancelled_response(&dp, grid, t, sigma)));
    }
    s.write("waves_ratio.csv", &ratio_csv.into_bytes())?;
    let fit = waves::front_speed(&g12, c, 2.0, FrontMethod::Potential)?;
    let mut front_csv = Csv::new("waves-front", &["t", "r_front", "amplitude", "cancelled_amplitude"]);
    let cancelled_amps: Vec<f64> = cancelled.iter().map(|p| waves::front_amplitude(p, c)).collect();
    for (snap, ca) in fit.snapshots.iter().zip(&cancelled_amps) {
        front_csv.row(&[num(snap.t), num(snap.radius), num(snap.amplitude), num(*ca)]);
    }
    s.write("waves_front.csv", &front_csv.into_bytes())?;
    let amps: Vec<f64> = fit.snapshots.iter().map(|p| p.amplitude).collect();
    let e12 = waves::amplitude_exponent(&times, &amps)?;
    let e_cancel = waves::amplitude_exponent(&times, &cancelled_amps)?;
    let speed_err = (fit.c_est / c - 1.0).abs();
    let mut summary = Csv::new("waves-summary", &["quantity", "value", "target", "tolerance", "pass"]);
    let rows = [
        ("front_speed", fit.c_est, c, 0.03 * c, speed_err <= 0.03),
        ("g12_amplitude_exponent", e12, -2.0, 0.15, (e12 + 2.0).abs() <= 0.15),
        ("g12_minus_g14_amplitude_exponent", e_cancel, -2.5, 0.15, (e_cancel + 2.5).abs() <= 0.15),
    ];
    for (name, value, target, tol, pass) in rows {
        summary.row(&[name.to_string(), num(value), num(target), num(tol), pass.to_string()]);
        s.checks.push(Check::new(format!("waves.{name}"), pass, format!("{value} vs {target} +- {tol}")));
    }
    s.write("waves_exponents.csv", &summary.into_bytes())?;
    let mut rates = Csv::new("rate-table", &["p", "huygens", "diffusion", "governing"]);
    let ps = [1.1, 1.25, 1.5, 1.75, 2.0, 3.0, 4.0, 8.0];
    for row in waves::rate_table(&ps) {
        rates.row(&[num(row.p), num(row.huygens), num(row.diffusion), num(row.governing())]);
    }
    s.write("rate_table.csv", &rates.into_bytes())?;
    s.notes.push("rate table is generated for documentation; only the p = 2 coincidence is asserted".into());
    s.record(
        "waves",
        &[("n", grid.n.to_string()), ("L", num(grid.l)), ("sigma", num(sigma)), ("t", list(&times)), ("front_method", "potential".into())],
    );
    Ok(())
}

fn convolve_campaign(s: &mut Session, which: &str) -> Result<()> {
    let specs: Vec<convolve::Which> = if which.eq_ignore_ascii_case("all") {
        convolve::Which::ALL.to_vec()
    } else {
        vec![convolve::Which::parse(which).ok_or_else(|| Error::Config(format!("unknown convolution {which:?}")))?]
    };
    let mut grid = SampleGrid::default();
    if let Some(ts) = &s.common.t {
        grid.times = s.times(ts)?;
    }
    let opts = s.quad(1e-6);
    let mut csv = Csv::new("convolve", &["spec", "x", "t", "lhs", "rhs", "ratio"]);
    for w in specs {
        let spec = ConvSpec::new(w, s.dp.c)?;
        let est = convolve::constant_estimate(&spec, &grid, opts)?;
        for e in &est.samples {
            csv.row(&[w.name().to_string(), num(e.x), num(e.t), num(e.lhs), num(e.rhs), num(e.ratio)]);
        }
        csv.row(&[format!("{}:C_max", w.name()), num(est.at_x), num(est.at_t), String::new(), String::new(), num(est.c_max)]);
        s.checks.push(Check::new(
            format!("convolve.{}", w.name()),
            est.c_max.is_finite() && est.c_max > 0.0,
            format!("C_max {} at x = {}, t = {}", est.c_max, est.at_x, est.at_t),
        ));
    }
    s.write("convolve.csv", &csv.into_bytes())?;
    s.record(
        "convolve",
        &[("which", which.to_string()), ("times", list(&grid.times)), ("front_fractions", list(&grid.front_fractions)), ("tol_quad", num(opts.rel))],
    );
    Ok(())
}

/// Relative density plus a common momentum: excites the diffusive
/// compressible branch, both acoustic branches and the transverse modes.
pub const EVOLVE_AMPLITUDES: [f64; 8] = [1.0, 1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 1.0];

fn evolve_campaign(s: &mut Session, linear: bool, every: f64, decay: f64, dump: bool) -> Result<()> {
    let grid = s.grid(64, 32.0)?;
    let dt = s.common.dt.unwrap_or(0.1);
    let eps0 = s.common.eps0.unwrap_or(1e-3);
    let t_end = s.times(&[20.0])?.into_iter().fold(0.0, f64::max);
    if !(every > 0.0) {
        return Err(Error::Config(format!("diagnostic interval must be positive, got {every}")));
    }
    let amplitudes = s.common.seed.map_or(Amplitudes::Fixed(EVOLVE_AMPLITUDES), Amplitudes::Seeded);
    let spec = InitialDataSpec { eps0, amplitudes, ..InitialDataSpec::localized(eps0, decay) };
    let initial = evolve::init_localized(&s.dp, &spec, grid)?;
    let count = (t_end / every).floor() as usize;
    let mut snapshots: Vec<f64> = (0..=count).map(|k| k as f64 * every).collect();
    if snapshots.last().is_some_and(|t| *t < t_end) {
        snapshots.push(t_end);
    }
    let config = RunConfig {
        t_end,
        dt,
        snapshots,
        options: SolverOptions { nonlinear: !linear, ..SolverOptions::default() },
        keep_states: false,
    };
    let out = evolve::run(&s.dp, initial.clone(), &config)?;
    s.notes.extend(out.warnings.iter().map(|w| format!("evolve: {w}")));
    let mut cols = vec!["t", "mass_rho", "mass_n", "momentum_total_x", "momentum_total_y", "momentum_total_z"];
    let names = ["rho", "m", "n", "w"];
    let l2_names: Vec<String> = names.iter().map(|n| format!("l2_{n}")).collect();
    let linf_names: Vec<String> = names.iter().map(|n| format!("linf_{n}")).collect();
    cols.extend(l2_names.iter().map(String::as_str));
    cols.extend(linf_names.iter().map(String::as_str));
    let mut csv = Csv::new("evolve-diagnostics", &cols);
    for d in &out.diagnostics {
        let mut cells = vec![num(d.t), num(d.mass_rho), num(d.mass_n)];
        cells.extend(d.momentum.iter().map(|v| num(*v)));
        cells.extend(d.l2.iter().map(|v| num(*v)));
        cells.extend(d.linf.iter().map(|v| num(*v)));
        csv.row(&cells);
    }
    s.write("evolve_diagnostics.csv", &csv.into_bytes())?;
    if let Some(abort) = &out.abort {
        s.checks.push(Check::new("evolve.completed", false, abort.clone()));
    }
    if let (Some(first), Some(last)) = (out.diagnostics.first(), out.diagnostics.last()) {
        let steps = out.steps.max(1) as f64;
        let mass = (last.mass_rho - first.mass_rho).abs().max((last.mass_n - first.mass_n).abs()) / steps;
        s.checks.push(Check::new("evolve.mass_drift_per_step", mass < 1e-12, format!("{mass:e}")));
        let span = (last.t - first.t).max(f64::MIN_POSITIVE);
        let mom = (0..3).map(|c| (last.momentum[c] - first.momentum[c]).abs()).fold(0.0, f64::max) / span;
        s.checks.push(Check::new("evolve.momentum_drift_per_time", mom < 1e-10, format!("{mom:e}")));
        let mut slopes = Csv::new("evolve-slopes", &["component", "norm", "slope", "window_start", "window_end"]);
        let window = (5.0f64.min(0.25 * t_end), t_end);
        for (b, name) in names.iter().enumerate() {
            for (norm, pick) in [("l2", 0usize), ("linf", 1)] {
                let series: Vec<(f64, f64)> =
                    out.diagnostics.iter().map(|d| (d.t, if pick == 0 { d.l2[b] } else { d.linf[b] })).collect();
                let slope = evolve::decay_slope(&series, window).map(num).unwrap_or_else(|e| format!("\"{e}\""));
                slopes.row(&[name.to_string(), norm.to_string(), slope, num(window.0), num(window.1)]);
            }
        }
        s.write("evolve_slopes.csv", &slopes.into_bytes())?;
    }
    if linear && out.abort.is_none() {
        let reference = evolve::linear_reference(&s.dp, &initial, out.final_state.t - initial.t);
        let err = evolve::relative_l2(&out.final_state, &reference);
        s.checks.push(Check::new("evolve.linear_reference", err <= 1e-8, format!("relative L2 {err:e}")));
    }
    if dump {
        for field in out.final_state.spatial_fields() {
            let mut bin = Vec::new();
            field.write_binary(&mut bin)?;
            s.write(&format!("evolve_{}_t{}.bin", file_tag(&field.tag), num(out.final_state.t)), &bin)?;
        }
    }
    s.record(
        "evolve",
        &[
            ("n", grid.n.to_string()),
            ("L", num(grid.l)),
            ("dt", num(dt)),
            ("eps0", num(eps0)),
            ("t_end", num(t_end)),
            ("every", num(every)),
            ("decay", num(decay)),
            ("amplitudes", format!("{:?}", spec.amplitudes())),
            ("nonlinear", (!linear).to_string()),
            ("steps", out.steps.to_string()),
        ],
    );
    Ok(())
}

fn dispatch(s: &mut Session, command: &Command) -> Result<()> {
    match command {
        Command::Spectrum { s_min, s_max, points } => spectrum(s, *s_min, *s_max, *points),
        Command::ExpansionCheck => expansion_check(s),
        Command::Green { block, radii } => green_campaign(s, block, *radii),
        Command::Waves => waves_campaign(s),
        Command::Convolve { which } => convolve_campaign(s, which),
        Command::Evolve { linear, every, decay, dump } => evolve_campaign(s, *linear, *every, *decay, *dump),
        Command::All => {
            spectrum(s, 1e-3, 1e3, 500)?;
            expansion_check(s)?;
            green_campaign(s, "11", 20)?;
            waves_campaign(s)?;
            convolve_campaign(s, "all")?;
            evolve_campaign(s, false, 1.0, 2.2, false)
        }
    }
}

/// Runs a parsed command and writes its manifest. Returns the checks.
pub fn execute(cli: &Cli) -> Result<Vec<Check>> {
    let params = load_params(&cli.common)?;
    let dp = derive(params)?;
    if let Some(t) = cli.common.threads {
        if t == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let dir = output_dir(&cli.common);
    std::fs::create_dir_all(&dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    let mut session = Session {
        dir,
        dp,
        common: cli.common.clone(),
        campaigns: Vec::new(),
        checks: Vec::new(),
        artifacts: Vec::new(),
        notes: Vec::new(),
    };
    let outcome = dispatch(&mut session, &cli.command);
    if let Err(e) = outcome {
        match e {
            Error::Config(_) => return Err(e),
            Error::InvalidParams(_) => return Err(Error::Config(e.to_string())),
            _ => {}
        }
        session.checks.push(Check::new(format!("{}.aborted", cli.command.name()), false, e.to_string()));
    }
    let status = if session.checks.iter().all(|c| c.pass) { "pass" } else { "fail" };
    let manifest = Manifest {
        tool: "twophase".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: cli.command.name().into(),
        status: status.into(),
        csv_schema: CSV_SCHEMA,
        params,
        campaigns: session.campaigns.clone(),
        checks: session.checks.clone(),
        artifacts: session.artifacts.clone(),
        notes: session.notes.clone(),
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::Numerical(format!("manifest serialization: {e}")))?;
    write_file(&session.dir.join("manifest.toml"), text.as_bytes())?;
    Ok(session.checks)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(checks) => {
            let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
            for c in &checks {
                println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if failed.is_empty() {
                0
            } else {
                let names: Vec<&str> = failed.iter().map(|c| c.name.as_str()).collect();
                eprintln!("failing checks: {}", names.join(", "));
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

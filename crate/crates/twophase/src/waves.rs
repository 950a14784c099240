//! Diffusion and Huygens wave envelopes, and measurements on synthesized
//! fields: envelope ratios, front speed, front-amplitude decay and Lᵖ norms.

use crate::error::{Error, Result};
use crate::fit::{linear_fit, ordered_sum};
use crate::green::{column_difference, synthesize, Block, FrequencyGrid, GreenBlockSelector, SpatialField};
use crate::model::DerivedParams;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeKind {
    /// `(1+t)^{-a}(1+r²/(1+t))^{-N}`, centered at the origin.
    Diffusion,
    /// `(1+t)^{-a}(1+(r-ct)²/(1+t))^{-N}`, an expanding shell.
    Huygens,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveEnvelope {
    pub kind: EnvelopeKind,
    pub a: f64,
    pub n: f64,
    pub c: f64,
}

impl WaveEnvelope {
    pub fn diffusion(a: f64, n: f64) -> Result<Self> {
        Self::checked(EnvelopeKind::Diffusion, a, n, 1.0)
    }

    pub fn huygens(a: f64, n: f64, c: f64) -> Result<Self> {
        Self::checked(EnvelopeKind::Huygens, a, n, c)
    }

    fn checked(kind: EnvelopeKind, a: f64, n: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && n > 0.0 && c > 0.0) {
            return Err(Error::InvalidParams(format!("envelope needs a, N, c > 0 (got {a}, {n}, {c})")));
        }
        Ok(Self { kind, a, n, c })
    }

    pub fn eval(&self, r: f64, t: f64) -> f64 {
        envelope_eval(self, r, t)
    }
}

pub fn envelope_eval(env: &WaveEnvelope, r: f64, t: f64) -> f64 {
    let phase = match env.kind {
        EnvelopeKind::Diffusion => r,
        EnvelopeKind::Huygens => r - env.c * t,
    };
    (1.0 + t).powf(-env.a) * (1.0 + phase * phase / (1.0 + t)).powf(-env.n)
}

/// The envelope pair a generic entry is compared against: D(3/2, 3/2) + H(2, 3/2).
pub fn standard_envelopes(c: f64) -> [WaveEnvelope; 2] {
    [
        WaveEnvelope { kind: EnvelopeKind::Diffusion, a: 1.5, n: 1.5, c },
        WaveEnvelope { kind: EnvelopeKind::Huygens, a: 2.0, n: 1.5, c },
    ]
}

/// Exclusion radius around the origin where mollified singular parts live.
pub fn exclusion_radius(sigma: f64, spacing: f64) -> f64 {
    (4.0 * sigma).max(2.0 * spacing)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRatio {
    pub ratio: f64,
    /// Radius where the supremum is attained.
    pub radius: f64,
}

/// `sup |field| / Σ envelopes` over lattice points with `r_min ≤ r ≤ r_max`.
/// `r_max` defaults to the inscribed radius `L`, beyond which periodic
/// images dominate.
pub fn bound_ratio(field: &SpatialField, envs: &[WaveEnvelope], r_min: f64, r_max: Option<f64>) -> BoundRatio {
    let r_max = r_max.unwrap_or(field.grid.l);
    let t = field.t;
    (0..field.values.len())
        .into_par_iter()
        .filter_map(|idx| {
            let r = field.radius(idx);
            if r < r_min || r > r_max {
                return None;
            }
            let bound: f64 = envs.iter().map(|e| e.eval(r, t)).sum();
            Some(BoundRatio { ratio: field.values[idx].abs() / bound, radius: r })
        })
        .reduce(|| BoundRatio { ratio: 0.0, radius: 0.0 }, |a, b| if b.ratio > a.ratio { b } else { a })
}

/// Angular average on shells of width one lattice spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub t: f64,
    pub r: Vec<f64>,
    pub mean: Vec<f64>,
}

impl RadialProfile {
    pub fn spacing(&self) -> f64 {
        if self.r.len() > 1 {
            self.r[1] - self.r[0]
        } else {
            1.0
        }
    }

    /// `Φ(r) = -∫_r^{R} v`, by the trapezoid rule from the outermost shell.
    pub fn potential(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut phi = vec![0.0; self.mean.len()];
        for i in (0..self.mean.len().saturating_sub(1)).rev() {
            phi[i] = phi[i + 1] - 0.5 * h * (self.mean[i] + self.mean[i + 1]);
        }
        phi
    }
}

/// Bins `field` by radius up to the inscribed radius `L`.
pub fn radial_profile(field: &SpatialField) -> RadialProfile {
    let h = field.grid.spacing();
    let bins = (field.grid.l / h).floor() as usize + 1;
    let mut sum = vec![0.0; bins];
    let mut count = vec![0usize; bins];
    for (idx, v) in field.values.iter().enumerate() {
        let b = (field.radius(idx) / h).round() as usize;
        if b < bins {
            sum[b] += v;
            count[b] += 1;
        }
    }
    let r = (0..bins).map(|b| b as f64 * h).collect();
    let mean = sum.iter().zip(&count).map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 }).collect();
    RadialProfile { t: field.t, r, mean }
}

/// `x̂·v` for a vector field given by its three Cartesian components.
pub fn radial_component(components: &[SpatialField; 3], tag: &str) -> SpatialField {
    let grid = components[0].grid;
    let n = grid.n;
    let values = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let x = [grid.position(idx / (n * n)), grid.position((idx / n) % n), grid.position(idx % n)];
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            if r == 0.0 {
                0.0
            } else {
                (0..3).map(|k| x[k] / r * components[k].values[idx]).sum()
            }
        })
        .collect();
    SpatialField { grid, t: components[0].t, sigma: components[0].sigma, tag: tag.to_string(), values }
}

/// Radial component of a scalar-row, vector-column block, e.g. `x̂·G₁₂`,
/// the density response to a momentum impulse in the damped phase.
pub fn longitudinal_response(dp: &DerivedParams, grid: FrequencyGrid, t: f64, sigma: f64, row: Block, col: Block) -> Result<SpatialField> {
    if row.width() != 1 || col.width() != 3 {
        return Err(Error::Config(format!("need a scalar row and a vector column, got {} and {}", row.name(), col.name())));
    }
    let syn = synthesize(dp, grid, t, sigma, GreenBlockSelector { row, col });
    let [a, b, c]: [SpatialField; 3] = syn.fields.try_into().expect("vector column has three entries");
    let tag = format!("x.G[{},{}]", row.name(), col.name());
    Ok(radial_component(&[a, b, c], &tag))
}

/// `x̂·G₁₂`.
pub fn momentum_response(dp: &DerivedParams, grid: FrequencyGrid, t: f64, sigma: f64) -> SpatialField {
    longitudinal_response(dp, grid, t, sigma, Block::Rho, Block::M).expect("rho row, m column")
}

/// Density response to opposite longitudinal impulses in the two phases,
/// the combination `G₁₂ − G₁₄`.
pub fn cancelled_response(dp: &DerivedParams, grid: FrequencyGrid, t: f64, sigma: f64) -> SpatialField {
    let mut syn = column_difference(dp, grid, t, sigma, &[Block::Rho]);
    syn.fields.swap_remove(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontMethod {
    /// Peak of `r·|profile|`.
    WeightedPeak,
    /// Peak of `r·|Φ|` with `Φ` the radially integrated profile; for the
    /// radial component of a gradient-like field this tracks the shell of
    /// the underlying scalar potential rather than its trailing lobe.
    Potential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontSnapshot {
    pub t: f64,
    pub radius: f64,
    /// Largest `|profile|` on `|r - ct| ≤ √(1+t)`.
    pub amplitude: f64,
}

/// Locates the front in one profile, searching `r > c_guess·t/2`.
pub fn front_radius(profile: &RadialProfile, c_guess: f64, r_min: f64, method: FrontMethod) -> Result<f64> {
    let t = profile.t;
    let signal: Vec<f64> = match method {
        FrontMethod::WeightedPeak => profile.mean.iter().zip(&profile.r).map(|(v, r)| (v * r).abs()).collect(),
        FrontMethod::Potential => profile.potential().iter().zip(&profile.r).map(|(v, r)| (v * r).abs()).collect(),
    };
    let start = 0.5 * c_guess * t;
    let (mut best, mut peak) = (None, 0.0);
    for (i, &r) in profile.r.iter().enumerate() {
        if r > start && r >= r_min && signal[i] > peak {
            peak = signal[i];
            best = Some(i);
        }
    }
    let no_front = |why: &str| Error::Numerical(format!("no front at t = {t}: {why}"));
    let i = best.ok_or_else(|| no_front("empty search window"))?;
    if i == 0 || i + 1 == profile.r.len() {
        return Err(no_front("peak on the box boundary"));
    }
    let valley = profile
        .r
        .iter()
        .zip(&signal)
        .filter(|(r, _)| **r >= r_min && **r < profile.r[i])
        .fold(f64::INFINITY, |m, (_, s)| m.min(*s));
    if !(valley <= 0.5 * peak) {
        return Err(no_front("front not separated from the origin bump by a factor 2"));
    }
    let (a, b, c) = (signal[i - 1], signal[i], signal[i + 1]);
    let curv = a - 2.0 * b + c;
    let shift = if curv < 0.0 { (0.5 * (a - c) / curv).clamp(-0.5, 0.5) } else { 0.0 };
    Ok(profile.r[i] + shift * profile.spacing())
}

/// Largest `|profile|` within one diffusion width of `r = ct`.
pub fn front_amplitude(profile: &RadialProfile, c: f64) -> f64 {
    let t = profile.t;
    let width = (1.0 + t).sqrt();
    profile
        .r
        .iter()
        .zip(&profile.mean)
        .filter(|(r, _)| (**r - c * t).abs() <= width)
        .fold(0.0, |m, (_, v)| m.max(v.abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontFit {
    pub c_est: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the radius fit.
    pub residual: f64,
    pub snapshots: Vec<FrontSnapshot>,
}

/// Least-squares speed of the front radius over the given profiles.
pub fn front_speed(profiles: &[RadialProfile], c_guess: f64, r_min: f64, method: FrontMethod) -> Result<FrontFit> {
    if profiles.len() < 3 {
        return Err(Error::Config("front speed needs at least three times".into()));
    }
    let snapshots = profiles
        .iter()
        .map(|p| {
            Ok(FrontSnapshot { t: p.t, radius: front_radius(p, c_guess, r_min, method)?, amplitude: front_amplitude(p, c_guess) })
        })
        .collect::<Result<Vec<_>>>()?;
    let ts: Vec<f64> = snapshots.iter().map(|s| s.t).collect();
    let rs: Vec<f64> = snapshots.iter().map(|s| s.radius).collect();
    let (c_est, intercept) = linear_fit(&ts, &rs);
    let residual =
        (ts.iter().zip(&rs).map(|(t, r)| (r - c_est * t - intercept).powi(2)).sum::<f64>() / ts.len() as f64).sqrt();
    Ok(FrontFit { c_est, intercept, residual, snapshots })
}

/// Slope of `log(amplitude)` against `log(1+t)`.
pub fn amplitude_exponent(times: &[f64], amplitudes: &[f64]) -> Result<f64> {
    decay_exponent(times, amplitudes, 4, 4.0)
}

/// Slope of `log(value)` against `log(1+t)` with at least `min_points`
/// positive samples at times spanning a factor `min_span`.
pub fn decay_exponent(times: &[f64], values: &[f64], min_points: usize, min_span: f64) -> Result<f64> {
    if times.len() != values.len() || times.len() < min_points {
        return Err(Error::Numerical(format!("degenerate fit: need {min_points} samples, got {}", times.len())));
    }
    if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Numerical("degenerate fit: non-positive sample".into()));
    }
    let lo = times.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(lo > 0.0) || hi < min_span * lo {
        return Err(Error::Numerical(format!("degenerate fit: times span less than a factor {min_span}")));
    }
    let x: Vec<f64> = times.iter().map(|t| (1.0 + t).ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    Ok(linear_fit(&x, &y).0)
}

/// Lattice Lᵖ norm; `p = ∞` gives the maximum.
pub fn lp_norm(field: &SpatialField, p: f64) -> f64 {
    if p.is_infinite() {
        return field.max_abs();
    }
    let cell = field.grid.spacing().powi(3);
    (ordered_sum(&field.values, |v| v.abs().powf(p)) * cell).powf(1.0 / p)
}

/// Lᵖ decay rates of the two wave families; the governing rate is the
/// slower one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub p: f64,
    /// `2 - 5/(2p)`, Huygens-dominated for `p ≤ 2`.
    pub huygens: f64,
    /// `(3/2)(1 - 1/p)`, diffusion-dominated for `p ≥ 2`.
    pub diffusion: f64,
}

impl RateRow {
    pub fn governing(&self) -> f64 {
        if self.p <= 2.0 {
            self.huygens
        } else {
            self.diffusion
        }
    }
}

pub fn rate_table(ps: &[f64]) -> Vec<RateRow> {
    let row = |p: f64| RateRow {
        p,
        huygens: 2.0 - 5.0 / (2.0 * p),
        diffusion: if p.is_infinite() { 1.5 } else { 1.5 * (1.0 - 1.0 / p) },
    };
    let at2 = row(2.0);
    assert!((at2.huygens - at2.diffusion).abs() < 1e-15 && (at2.huygens - 0.75).abs() < 1e-15);
    ps.iter().map(|&p| row(p)).collect()
}

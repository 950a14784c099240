//! Radial convolution integrals in three dimensions and sampled constants for
//! the initial-propagation and nonlinear-coupling inequalities.

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_pieces, integrate_to_infinity, QuadOptions};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Nonnegative radial profile with closed-form first moment where available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `amp·(1 + ((ρ - center)/width)²)^{-power}`
    Algebraic { amp: f64, center: f64, width: f64, power: f64 },
    /// `amp·exp(-ρ²/width²)`
    Gaussian { amp: f64, width: f64 },
    /// Indicator of `[0, radius]`.
    Indicator { radius: f64 },
}

impl Profile {
    pub fn algebraic(amp: f64, center: f64, width: f64, power: f64) -> Self {
        Profile::Algebraic { amp, center, width, power }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Profile::Algebraic { amp, center, width, power } => {
                let u = (r - center) / width;
                amp * (1.0 + u * u).powf(-power)
            }
            Profile::Gaussian { amp, width } => amp * (-(r / width).powi(2)).exp(),
            Profile::Indicator { radius } => {
                if r <= radius {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Radii where the profile changes character, for quadrature breakpoints.
    pub fn features(&self) -> Vec<f64> {
        match *self {
            Profile::Algebraic { center, width, .. } => {
                let mut f = vec![center];
                for k in [1.0, 4.0, 16.0] {
                    f.push(center - k * width);
                    f.push(center + k * width);
                }
                f
            }
            Profile::Gaussian { width, .. } => vec![width, 3.0 * width, 6.0 * width],
            Profile::Indicator { radius } => vec![radius],
        }
    }

    /// `∫_a^b s·f(s) ds`.
    pub fn moment(&self, a: f64, b: f64, opts: QuadOptions) -> Result<f64> {
        match *self {
            Profile::Algebraic { amp, center, width, power } => {
                let w = width;
                let part = |s: f64| {
                    let v = (s - center) / w;
                    if (power - 1.0).abs() < 1e-14 {
                        0.5 * w * w * (1.0 + v * v).ln()
                    } else {
                        w * w / (2.0 * (1.0 - power)) * (1.0 + v * v).powf(1.0 - power)
                    }
                };
                let base = part(b) - part(a);
                let shifted = if center == 0.0 {
                    0.0
                } else if let Some(j) = half_integer_antiderivative(power) {
                    center * w * (j((b - center) / w) - j((a - center) / w))
                } else {
                    let g = |s: f64| (1.0 + ((s - center) / w).powi(2)).powf(-power);
                    center * integrate(g, a, b, opts)?.value
                };
                Ok(amp * (base + shifted))
            }
            Profile::Gaussian { amp, width } => {
                let w2 = width * width;
                Ok(amp * 0.5 * w2 * ((-a * a / w2).exp() - (-b * b / w2).exp()))
            }
            Profile::Indicator { radius } => {
                let (lo, hi) = (a.min(radius), b.min(radius));
                Ok(0.5 * (hi * hi - lo * lo))
            }
        }
    }

    fn has_closed_moment(&self) -> bool {
        match *self {
            Profile::Algebraic { center, power, .. } => center == 0.0 || half_integer_antiderivative(power).is_some(),
            _ => true,
        }
    }
}

/// Antiderivative of `(1+v²)^{-p}` for positive integer or half-integer `p`.
fn half_integer_antiderivative(p: f64) -> Option<impl Fn(f64) -> f64> {
    let twice = 2.0 * p;
    if !(p > 0.0) || (twice - twice.round()).abs() > 1e-12 || twice.round() > 40.0 {
        return None;
    }
    let twice = twice.round() as u32;
    Some(move |v: f64| {
        let q = 1.0 + v * v;
        // ladder I_{k+1} = v/(2k q^k) + (2k-1)/(2k) I_k from I_1 = atan or I_{1/2} = asinh
        let (mut k, mut acc) = if twice.is_multiple_of(2) { (1.0, v.atan()) } else { (0.5, v.asinh()) };
        while 2.0 * k < twice as f64 - 0.5 {
            acc = v / (2.0 * k * q.powf(k)) + (2.0 * k - 1.0) / (2.0 * k) * acc;
            k += 1.0;
        }
        acc
    })
}

fn sorted_breaks(mut pts: Vec<f64>) -> Vec<f64> {
    pts.retain(|p| p.is_finite() && *p >= 0.0);
    pts.push(0.0);
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * (1.0 + b.abs()));
    pts
}

/// `∫_{ℝ³} f(|x-y|) g(|y|) dy` at `|x| = r0`, reduced to a double integral in
/// bipolar coordinates.
pub fn radial_product_integral(f: &Profile, g: &Profile, r0: f64, opts: QuadOptions) -> Result<f64> {
    if !(r0 >= 0.0) {
        return Err(Error::Config(format!("radius must be nonnegative, got {r0}")));
    }
    if r0 == 0.0 {
        let pts = sorted_breaks(f.features().into_iter().chain(g.features()).collect());
        let integrand = |r: f64| f.eval(r) * g.eval(r) * r * r;
        let last = *pts.last().expect("non-empty");
        let body = integrate_pieces(integrand, &pts, opts)?;
        let tail = integrate_to_infinity(integrand, last, opts)?;
        return Ok(4.0 * PI * (body.value + tail.value));
    }
    // the inner integral runs over the profile with a closed-form moment
    let (inner, outer) = if f.has_closed_moment() || !g.has_closed_moment() { (f, g) } else { (g, f) };
    let mut pts = outer.features();
    pts.push(r0);
    for x in inner.features() {
        pts.push(r0 + x);
        pts.push((r0 - x).abs());
    }
    let pts = sorted_breaks(pts);
    let mut failure = None;
    let mut integrand = |r: f64| {
        let w = outer.eval(r);
        if w == 0.0 {
            return 0.0;
        }
        match inner.moment((r - r0).abs(), r + r0, opts) {
            Ok(m) => r * w * m,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let last = *pts.last().expect("non-empty");
    let body = integrate_pieces(&mut integrand, &pts, opts)?;
    let tail = integrate_to_infinity(&mut integrand, last, opts)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(2.0 * PI / r0 * (body.value + tail.value))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    /// Two diffusion profiles.
    DiffusionPair,
    /// A Huygens shell against algebraically decaying initial data.
    HuygensAlgebraic,
    /// Diffusion kernel against a diffusion source.
    K1,
    /// Diffusion kernel against a Huygens source.
    K2,
    /// Huygens kernel against a Huygens source.
    K3,
}

impl Which {
    pub const ALL: [Which; 5] = [Which::DiffusionPair, Which::HuygensAlgebraic, Which::K1, Which::K2, Which::K3];

    pub fn name(&self) -> &'static str {
        match self {
            Which::DiffusionPair => "diffusion-pair",
            Which::HuygensAlgebraic => "huygens-algebraic",
            Which::K1 => "K1",
            Which::K2 => "K2",
            Which::K3 => "K3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|w| w.name().eq_ignore_ascii_case(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvSpec {
    pub which: Which,
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
    /// Spatial exponent of the Huygens kernel (HuygensAlgebraic, K3).
    pub big_n: f64,
    pub r1: f64,
    pub c: f64,
}

impl ConvSpec {
    /// Default exponents: `n1 = n2 = 2`, `N = r1 = 2.2` for HuygensAlgebraic and `N = 3` for K3.
    pub fn new(which: Which, c: f64) -> Result<Self> {
        let big_n = if which == Which::K3 { 3.0 } else { 2.2 };
        Self { which, n1: 2.0, n2: 2.0, n3: 2.0, big_n, r1: 2.2, c }.validated()
    }

    pub fn validated(mut self) -> Result<Self> {
        self.n3 = self.n1.min(self.n2);
        let bad = |m: String| Err(Error::InvalidParams(m));
        if !(self.c > 0.0) {
            return bad(format!("front speed must be positive, got {}", self.c));
        }
        match self.which {
            Which::DiffusionPair if !(self.n1 > 1.5 && self.n2 > 1.5) => bad(format!("need n1, n2 > 3/2, got {}, {}", self.n1, self.n2)),
            Which::HuygensAlgebraic if !(self.big_n >= self.r1 && self.r1 > 2.1) => {
                bad(format!("need N >= r1 > 21/10, got N = {}, r1 = {}", self.big_n, self.r1))
            }
            Which::K3 if !(self.big_n > 0.0) => bad(format!("need N > 0, got {}", self.big_n)),
            _ => Ok(self),
        }
    }

    fn diffusion(a: f64, t: f64, power: f64) -> Profile {
        Profile::algebraic((1.0 + t).powf(-a), 0.0, (1.0 + t).sqrt(), power)
    }

    fn huygens(&self, a: f64, t: f64, power: f64) -> Profile {
        Profile::algebraic((1.0 + t).powf(-a), self.c * t, (1.0 + t).sqrt(), power)
    }

    /// Kernel pair `(f(t-s), g(s))` integrated against each other.
    fn kernels(&self, tau: f64, s: f64) -> (Profile, Profile) {
        match self.which {
            Which::DiffusionPair => (Self::diffusion(0.0, tau, self.n1), Profile::algebraic(1.0, 0.0, 1.0, self.n2)),
            Which::HuygensAlgebraic => (self.huygens(0.0, tau, self.big_n), Profile::algebraic(1.0, 0.0, 1.0, self.r1)),
            Which::K1 => (Self::diffusion(2.0, tau, 2.0), Self::diffusion(3.0, s, 3.0)),
            Which::K2 => (Self::diffusion(2.0, tau, 2.0), self.huygens(4.0, s, 3.0)),
            Which::K3 => (self.huygens(2.5, tau, self.big_n), self.huygens(4.0, s, 3.0)),
        }
    }

    /// Right side with unit constant.
    pub fn rhs(&self, x: f64, t: f64) -> f64 {
        let d = |p: f64| (1.0 + x * x / (1.0 + t)).powf(-p);
        let h = || (1.0 + (x - self.c * t).powi(2) / (1.0 + t)).powf(-1.5);
        match self.which {
            Which::DiffusionPair => d(self.n3),
            Which::HuygensAlgebraic => h(),
            Which::K1 => (1.0 + t).powf(-2.0) * d(1.5),
            Which::K2 | Which::K3 => (1.0 + t).powf(-2.0) * (d(1.5) + h()),
        }
    }

    pub fn is_time_integral(&self) -> bool {
        matches!(self.which, Which::K1 | Which::K2 | Which::K3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub x: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Tolerances for the inner integrals, relative to the size of the bound.
fn scaled(opts: QuadOptions, scale: f64) -> QuadOptions {
    QuadOptions { abs: opts.abs * scale, ..opts }
}

/// Left side, right side and ratio of an initial-propagation inequality.
pub fn pair_bound_eval(spec: &ConvSpec, x: f64, t: f64, opts: QuadOptions) -> Result<Evaluation> {
    if spec.is_time_integral() {
        return Err(Error::Config(format!("{} is a space-time convolution", spec.which.name())));
    }
    let (f, g) = spec.kernels(t, t);
    let rhs = spec.rhs(x, t);
    let lhs = radial_product_integral(&f, &g, x, scaled(opts, rhs))?;
    Ok(Evaluation { x, t, lhs, rhs, ratio: lhs / rhs })
}

/// Left side, right side and ratio of a nonlinear-coupling inequality; the
/// time integral is split at `t/2`.
pub fn k_eval(spec: &ConvSpec, x: f64, t: f64, opts: QuadOptions) -> Result<Evaluation> {
    if !spec.is_time_integral() {
        return Err(Error::Config(format!("{} has no time integral", spec.which.name())));
    }
    if !(t >= 0.0) {
        return Err(Error::Config(format!("time must be nonnegative, got {t}")));
    }
    let rhs = spec.rhs(x, t);
    if t == 0.0 {
        return Ok(Evaluation { x, t, lhs: 0.0, rhs, ratio: 0.0 });
    }
    let inner = scaled(opts, rhs);
    let outer = scaled(opts, rhs * (1.0 + t));
    let mut failure = None;
    let mut integrand = |s: f64| {
        let (f, g) = spec.kernels(t - s, s);
        match radial_product_integral(&f, &g, x, inner) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let lhs = integrate_pieces(&mut integrand, &[0.0, 0.5 * t, t], outer)?.value;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Evaluation { x, t, lhs, rhs, ratio: lhs / rhs })
}

pub fn evaluate(spec: &ConvSpec, x: f64, t: f64, opts: QuadOptions) -> Result<Evaluation> {
    if spec.is_time_integral() {
        k_eval(spec, x, t, opts)
    } else {
        pair_bound_eval(spec, x, t, opts)
    }
}

/// Sample points as multiples of the front radius `ct` and times.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub front_fractions: Vec<f64>,
    pub times: Vec<f64>,
}

impl Default for SampleGrid {
    fn default() -> Self {
        Self {
            front_fractions: vec![0.0, 0.25, 0.5, 0.9, 1.0, 1.1, 1.5, 2.0],
            times: vec![1.0, 4.0, 16.0, 64.0, 256.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantEstimate {
    pub which: Which,
    pub c_max: f64,
    pub at_x: f64,
    pub at_t: f64,
    pub samples: Vec<Evaluation>,
}

impl ConstantEstimate {
    /// Largest ratio at each sampled time, in grid order.
    pub fn per_time_max(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for s in &self.samples {
            match out.iter_mut().find(|(t, _)| *t == s.t) {
                Some(entry) => entry.1 = entry.1.max(s.ratio),
                None => out.push((s.t, s.ratio)),
            }
        }
        out
    }
}

/// Largest sampled ratio and where it is attained.
pub fn constant_estimate(spec: &ConvSpec, grid: &SampleGrid, opts: QuadOptions) -> Result<ConstantEstimate> {
    let points: Vec<(f64, f64)> =
        grid.times.iter().flat_map(|&t| grid.front_fractions.iter().map(move |&q| (q * spec.c * t, t))).collect();
    if points.is_empty() {
        return Err(Error::Config("empty sample grid".into()));
    }
    let samples = points.par_iter().map(|&(x, t)| evaluate(spec, x, t, opts)).collect::<Result<Vec<_>>>()?;
    let best = samples.iter().fold(samples[0], |b, s| if s.ratio > b.ratio { *s } else { b });
    Ok(ConstantEstimate { which: spec.which, c_max: best.ratio, at_x: best.x, at_t: best.t, samples })
}

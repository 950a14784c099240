//! Mollified Green's matrix of the linearized system on a periodic cube,
//! synthesized by inverse FFT of the exact propagator, plus a radial
//! quadrature oracle for rotationally symmetric entries.

use crate::error::{Error, Result};
use crate::fft3::{signed_index, Fft3};
use crate::linalg::{expm, CMat, C64};
use crate::model::DerivedParams;
use crate::quad::{integrate, QuadOptions};
use crate::spectral::{self, symbol_full, FrequencyPoint, Which};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

/// Periodic cube `[-L, L)³` with `n` points per axis and wavenumbers `π k / L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub n: usize,
    pub l: f64,
}

impl FrequencyGrid {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 32 || !n.is_multiple_of(2) {
            return Err(Error::Config(format!("grid size must be even and >= 32, got {n}")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Config(format!("half-width must be positive, got {l}")));
        }
        Ok(Self { n, l })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn dk(&self) -> f64 {
        PI / self.l
    }

    pub fn nyquist(&self) -> f64 {
        PI * self.n as f64 / (2.0 * self.l)
    }

    pub fn position(&self, j: usize) -> f64 {
        -self.l + j as f64 * self.spacing()
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Signed integer wavevector of flat FFT index `idx`.
    pub fn wave_index(&self, idx: usize) -> [i64; 3] {
        let n = self.n;
        [signed_index(idx / (n * n), n), signed_index((idx / n) % n, n), signed_index(idx % n, n)]
    }

    /// Problems with using this grid up to `t_max` with mollifier `sigma`.
    pub fn warnings(&self, dp: &DerivedParams, t_max: f64, sigma: f64, support: f64) -> Vec<String> {
        let mut w = Vec::new();
        if dp.c * t_max + 6.0 * sigma + support > self.l {
            w.push(format!(
                "wrap hazard: c*t + 6*sigma + support = {:.3} exceeds half-width {}",
                dp.c * t_max + 6.0 * sigma + support,
                self.l
            ));
        }
        if self.nyquist() < crate::asymptotics::ETA_HIGH {
            w.push(format!(
                "Nyquist wavenumber {:.3} lies below the large-frequency regime {}",
                self.nyquist(),
                crate::asymptotics::ETA_HIGH
            ));
        }
        if t_max < 1.0 && sigma < 2.0 * self.spacing() {
            w.push(format!("sigma {sigma} under-resolves singular parts at spacing {:.3}", self.spacing()));
        }
        w
    }
}

/// Row or column block of the 8×8 Green's matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Rho,
    M,
    N,
    W,
}

impl Block {
    pub fn offset(&self) -> usize {
        match self {
            Block::Rho => spectral::RHO,
            Block::M => spectral::M,
            Block::N => spectral::N,
            Block::W => spectral::W,
        }
    }

    pub fn width(&self) -> usize {
        match self {
            Block::Rho | Block::N => 1,
            Block::M | Block::W => 3,
        }
    }

    /// Position in the 4-block ordering (ρ, m, n, w), zero-based.
    pub fn index(&self) -> usize {
        match self {
            Block::Rho => 0,
            Block::M => 1,
            Block::N => 2,
            Block::W => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        [Block::Rho, Block::M, Block::N, Block::W].get(i).copied()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Block::Rho => "rho",
            Block::M => "m",
            Block::N => "n",
            Block::W => "w",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreenBlockSelector {
    pub row: Block,
    pub col: Block,
}

impl GreenBlockSelector {
    /// One-based block indices as in `G12`.
    pub fn from_one_based(row: usize, col: usize) -> Result<Self> {
        match (Block::from_index(row.wrapping_sub(1)), Block::from_index(col.wrapping_sub(1))) {
            (Some(row), Some(col)) => Ok(Self { row, col }),
            _ => Err(Error::Config(format!("block indices must be in 1..=4, got ({row}, {col})"))),
        }
    }

    /// Entries of the 8×8 matrix covered by this block, row-major.
    pub fn entries(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.row.width() {
            for b in 0..self.col.width() {
                out.push((self.row.offset() + a, self.col.offset() + b));
            }
        }
        out
    }
}

/// `e^{tA(ξ)} e^{-σ²|ξ|²/2}` from the full 8×8 symbol.
pub fn green_symbol(dp: &DerivedParams, xi: &FrequencyPoint, t: f64, sigma: f64) -> CMat {
    assert!(t >= 0.0 && sigma >= 0.0);
    let damp = (-0.5 * sigma * sigma * xi.magnitude * xi.magnitude).exp();
    expm(&(symbol_full(dp, xi) * C64::new(t, 0.0))) * C64::new(damp, 0.0)
}

/// Full-symbol propagator at ξ = s e₃, from which the value at any ξ with
/// |ξ| = s follows by rotation.
#[derive(Debug, Clone)]
pub struct AxialSymbol(pub [[C64; 8]; 8]);

impl AxialSymbol {
    pub fn new(dp: &DerivedParams, s: f64, t: f64, sigma: f64) -> Self {
        let m = green_symbol(dp, &FrequencyPoint::new([0.0, 0.0, s]), t, sigma);
        let mut out = [[C64::new(0.0, 0.0); 8]; 8];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = m[(i, j)];
            }
        }
        Self(out)
    }

    /// Entry `(a, b)` of the symbol at direction `d`.
    #[inline]
    pub fn entry(&self, d: &[f64; 3], a: usize, b: usize) -> C64 {
        let (ba, ka) = split(a);
        let (bb, kb) = split(b);
        let e = &self.0;
        match (ka, kb) {
            (None, None) => e[a][b],
            (None, Some(k)) => e[a][bb + 2] * d[k],
            (Some(k), None) => e[ba + 2][b] * d[k],
            (Some(k), Some(l)) => {
                let dd = d[k] * d[l];
                let delta = if k == l { 1.0 } else { 0.0 };
                e[ba + 2][bb + 2] * dd + e[ba][bb] * (delta - dd)
            }
        }
    }
}

/// Splits a state index into (block offset, vector component).
#[inline]
fn split(i: usize) -> (usize, Option<usize>) {
    match i {
        spectral::RHO | spectral::N => (i, None),
        1..=3 => (spectral::M, Some(i - spectral::M)),
        _ => (spectral::W, Some(i - spectral::W)),
    }
}

/// Axial symbols for every distinct |k|² on a grid.
#[derive(Debug, Clone)]
pub struct SymbolCache {
    pub grid: FrequencyGrid,
    pub t: f64,
    pub sigma: f64,
    table: Vec<AxialSymbol>,
}

impl SymbolCache {
    pub fn new(dp: &DerivedParams, grid: FrequencyGrid, t: f64, sigma: f64) -> Self {
        let half = grid.n / 2;
        let max_k2 = 3 * half * half;
        let mut present = vec![false; max_k2 + 1];
        let h = half as i64;
        for a in -h..h {
            for b in -h..h {
                for c in -h..h {
                    present[(a * a + b * b + c * c) as usize] = true;
                }
            }
        }
        let dk = grid.dk();
        let table = (0..=max_k2)
            .into_par_iter()
            .map(|k2| {
                if present[k2] {
                    AxialSymbol::new(dp, dk * (k2 as f64).sqrt(), t, sigma)
                } else {
                    AxialSymbol([[C64::new(0.0, 0.0); 8]; 8])
                }
            })
            .collect();
        Self { grid, t, sigma, table }
    }

    /// Linear combination `Σ coef·G[a][b]` at integer wavevector `k`,
    /// symmetrized over sign flips of Nyquist components so that real
    /// combinations yield real fields.
    pub fn combination(&self, k: [i64; 3], terms: &[(usize, usize, C64)]) -> C64 {
        let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as usize;
        let ax = &self.table[k2];
        let norm = (k2 as f64).sqrt();
        let d0 = if k2 == 0 { [1.0, 0.0, 0.0] } else { [k[0] as f64 / norm, k[1] as f64 / norm, k[2] as f64 / norm] };
        let nyq = -(self.grid.n as i64 / 2);
        let flips: Vec<usize> = (0..3).filter(|&i| k[i] == nyq).collect();
        let mut acc = C64::new(0.0, 0.0);
        let count = 1usize << flips.len();
        for mask in 0..count {
            let mut d = d0;
            for (bit, &axis) in flips.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    d[axis] = -d[axis];
                }
            }
            for &(a, b, coef) in terms {
                acc += ax.entry(&d, a, b) * coef;
            }
        }
        acc / count as f64
    }

    /// Propagates one Fourier coefficient vector of the full state.
    pub fn apply(&self, k: [i64; 3], u: &[C64; 8]) -> [C64; 8] {
        let mut out = [C64::new(0.0, 0.0); 8];
        for (a, o) in out.iter_mut().enumerate() {
            let terms: [(usize, usize, C64); 8] = std::array::from_fn(|b| (a, b, u[b]));
            *o = self.combination(k, &terms);
        }
        out
    }
}

/// Real field on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialField {
    pub grid: FrequencyGrid,
    pub t: f64,
    pub sigma: f64,
    pub tag: String,
    pub values: Vec<f64>,
}

impl SpatialField {
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.grid.n;
        self.values[(i * n + j) * n + k]
    }

    /// Riemann sum over the cube.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.spacing().powi(3)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Values along the positive first axis through the origin, as `(r, value)`.
    pub fn axis_profile(&self) -> Vec<(f64, f64)> {
        let n = self.grid.n;
        let h = self.grid.spacing();
        (n / 2..n).map(|i| ((i - n / 2) as f64 * h, self.at(i, n / 2, n / 2))).collect()
    }

    const MAGIC: &'static [u8; 4] = b"TPGF";
    const VERSION: u32 = 1;

    /// Little-endian dump: magic `TPGF`, u32 version, u64 n, f64 L, f64 t,
    /// f64 σ, u32 tag length, tag bytes, then n³ f64 values in row-major order.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(Self::MAGIC)?;
        w.write_all(&Self::VERSION.to_le_bytes())?;
        w.write_all(&(self.grid.n as u64).to_le_bytes())?;
        for v in [self.grid.l, self.t, self.sigma] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&(self.tag.len() as u32).to_le_bytes())?;
        w.write_all(self.tag.as_bytes())?;
        let mut buf = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != Self::MAGIC {
            return Err(Error::Config("not a field dump".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        if u32::from_le_bytes(b4) != Self::VERSION {
            return Err(Error::Config("unsupported field dump version".into()));
        }
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        let mut f = [0.0; 3];
        for v in f.iter_mut() {
            r.read_exact(&mut b8)?;
            *v = f64::from_le_bytes(b8);
        }
        r.read_exact(&mut b4)?;
        let mut tag = vec![0u8; u32::from_le_bytes(b4) as usize];
        r.read_exact(&mut tag)?;
        let mut raw = vec![0u8; n * n * n * 8];
        r.read_exact(&mut raw)?;
        let values = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
        Ok(Self {
            grid: FrequencyGrid::new(n, f[0])?,
            t: f[1],
            sigma: f[2],
            tag: String::from_utf8(tag).map_err(|e| Error::Config(e.to_string()))?,
            values,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_binary(std::io::BufWriter::new(file))
    }
}

/// Output of a synthesis.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub fields: Vec<SpatialField>,
    /// Largest imaginary part relative to the largest real value.
    pub imag_residual: f64,
    pub warnings: Vec<String>,
}

/// One real output field as a linear combination of Green's matrix entries.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    pub tag: String,
    pub terms: Vec<(usize, usize, C64)>,
}

/// Synthesizes each requested combination by inverse FFT, two fields per transform.
pub fn synthesize_combinations(cache: &SymbolCache, specs: &[FieldSpec], dp: &DerivedParams) -> Synthesis {
    let grid = cache.grid;
    let n = grid.n;
    let fft = Fft3::new(n);
    let scale = 1.0 / (2.0 * grid.l).powi(3);
    let mut fields = Vec::new();
    let mut imag = 0.0f64;
    for pair in specs.chunks(2) {
        let mut buf = vec![C64::new(0.0, 0.0); grid.len()];
        buf.par_iter_mut().enumerate().for_each(|(idx, v)| {
            let k = grid.wave_index(idx);
            let sign = if (k[0] + k[1] + k[2]).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let mut z = cache.combination(k, &pair[0].terms);
            if let Some(second) = pair.get(1) {
                z += C64::new(0.0, 1.0) * cache.combination(k, &second.terms);
            }
            *v = z * (sign * scale);
        });
        fft.inverse(&mut buf);
        let re: Vec<f64> = buf.iter().map(|z| z.re).collect();
        let im: Vec<f64> = buf.iter().map(|z| z.im).collect();
        if pair.len() == 1 {
            let m = re.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let mi = im.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            imag = imag.max(if m > 0.0 { mi / m } else { mi });
        }
        let mut make = |spec: &FieldSpec, values: Vec<f64>| {
            fields.push(SpatialField { grid, t: cache.t, sigma: cache.sigma, tag: spec.tag.clone(), values });
        };
        make(&pair[0], re);
        if let Some(second) = pair.get(1) {
            make(second, im);
        }
    }
    Synthesis { fields, imag_residual: imag, warnings: grid.warnings(dp, cache.t, cache.sigma, 0.0) }
}

/// Every entry of one block of the Green's matrix, row-major.
pub fn synthesize(dp: &DerivedParams, grid: FrequencyGrid, t: f64, sigma: f64, sel: GreenBlockSelector) -> Synthesis {
    let cache = SymbolCache::new(dp, grid, t, sigma);
    let specs: Vec<FieldSpec> = sel
        .entries()
        .into_iter()
        .map(|(a, b)| FieldSpec { tag: entry_tag(a, b), terms: vec![(a, b, C64::new(1.0, 0.0))] })
        .collect();
    synthesize_combinations(&cache, &specs, dp)
}

pub fn entry_tag(a: usize, b: usize) -> String {
    let name = |i: usize| match split(i) {
        (spectral::RHO, None) => "rho".to_string(),
        (spectral::N, None) => "n".to_string(),
        (off, Some(k)) => format!("{}{}", if off == spectral::M { "m" } else { "w" }, k + 1),
        _ => unreachable!(),
    };
    format!("G[{},{}]", name(a), name(b))
}

/// Response to initial data `(0, i ξ̂, 0, -i ξ̂)`: the longitudinal second
/// column minus the fourth, for each requested row block.
pub fn column_difference(dp: &DerivedParams, grid: FrequencyGrid, t: f64, sigma: f64, rows: &[Block]) -> Synthesis {
    let cache = SymbolCache::new(dp, grid, t, sigma);
    let n = grid.n;
    let fft = Fft3::new(n);
    let scale = 1.0 / (2.0 * grid.l).powi(3);
    let mut fields = Vec::new();
    let mut imag = 0.0f64;
    for row in rows {
        for a in row.offset()..row.offset() + row.width() {
            let mut buf = vec![C64::new(0.0, 0.0); grid.len()];
            buf.par_iter_mut().enumerate().for_each(|(idx, v)| {
                let k = grid.wave_index(idx);
                if k == [0, 0, 0] {
                    return;
                }
                let norm = ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt();
                let mut terms = Vec::with_capacity(6);
                for c in 0..3 {
                    let dc = C64::new(0.0, k[c] as f64 / norm);
                    terms.push((a, spectral::M + c, dc));
                    terms.push((a, spectral::W + c, -dc));
                }
                let sign = if (k[0] + k[1] + k[2]).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                *v = cache.combination(k, &terms) * (sign * scale);
            });
            fft.inverse(&mut buf);
            let m = buf.iter().fold(0.0f64, |x, z| x.max(z.re.abs()));
            let mi = buf.iter().fold(0.0f64, |x, z| x.max(z.im.abs()));
            imag = imag.max(if m > 0.0 { mi / m } else { mi });
            let tag = format!("G[{},m-w]", entry_tag(a, a).trim_start_matches("G[").split(',').next().unwrap_or("?"));
            fields.push(SpatialField { grid, t, sigma, tag, values: buf.iter().map(|z| z.re).collect() });
        }
    }
    Synthesis { fields, imag_residual: imag, warnings: grid.warnings(dp, t, sigma, 0.0) }
}

/// Synthesizes a rotation-invariant scalar symbol `f(|ξ|)` times the mollifier.
pub fn synthesize_radial_symbol<F>(grid: FrequencyGrid, t: f64, sigma: f64, tag: &str, f: F) -> SpatialField
where
    F: Fn(f64) -> f64 + Sync,
{
    let n = grid.n;
    let fft = Fft3::new(n);
    let scale = 1.0 / (2.0 * grid.l).powi(3);
    let dk = grid.dk();
    let mut buf = vec![C64::new(0.0, 0.0); grid.len()];
    buf.par_iter_mut().enumerate().for_each(|(idx, v)| {
        let k = grid.wave_index(idx);
        let s = dk * ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt();
        let sign = if (k[0] + k[1] + k[2]).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        *v = C64::new(f(s) * (-0.5 * sigma * sigma * s * s).exp() * sign * scale, 0.0);
    });
    fft.inverse(&mut buf);
    SpatialField { grid, t, sigma, tag: tag.to_string(), values: buf.iter().map(|z| z.re).collect() }
}

impl SpatialField {
    /// Samples `f(x, y, z)` on the lattice.
    pub fn from_fn<F>(grid: FrequencyGrid, t: f64, tag: &str, f: F) -> Self
    where
        F: Fn(f64, f64, f64) -> f64 + Sync,
    {
        let n = grid.n;
        let values = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(grid.position(idx / (n * n)), grid.position((idx / n) % n), grid.position(idx % n)))
            .collect();
        Self { grid, t, sigma: 0.0, tag: tag.to_string(), values }
    }

    /// Distance of flat index `idx` from the origin.
    pub fn radius(&self, idx: usize) -> f64 {
        let n = self.grid.n;
        let (x, y, z) = (self.grid.position(idx / (n * n)), self.grid.position((idx / n) % n), self.grid.position(idx % n));
        (x * x + y * y + z * z).sqrt()
    }
}

/// Sum of a radial function over the periodic images in the 27 nearest cells,
/// evaluated at points on the positive first axis. This is the object a DFT
/// synthesis on `grid` represents once the symbol is resolved.
pub fn periodize_axis<F>(grid: FrequencyGrid, radii: &[f64], radial: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    periodize_with(grid, radii, radial, |_, _| 1.0)
}

/// As [`periodize_axis`] for a field `g(|x|) x̂`, returning its first
/// component on the positive first axis.
pub fn periodize_axis_longitudinal<F>(grid: FrequencyGrid, radii: &[f64], radial: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    periodize_with(grid, radii, radial, |px, d| if d > 0.0 { px / d } else { 0.0 })
}

fn periodize_with<F, W>(grid: FrequencyGrid, radii: &[f64], radial: F, weight: W) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
    W: Fn(f64, f64) -> f64,
{
    let period = 2.0 * grid.l;
    let mut total = vec![0.0; radii.len()];
    for a in -1i32..=1 {
        for b in -1i32..=1 {
            for c in -1i32..=1 {
                let points: Vec<(f64, f64)> = radii
                    .iter()
                    .map(|&x| {
                        let (px, py, pz) = (x + period * a as f64, period * b as f64, period * c as f64);
                        (px, (px * px + py * py + pz * pz).sqrt())
                    })
                    .collect();
                let dist: Vec<f64> = points.iter().map(|p| p.1).collect();
                for ((acc, v), (px, d)) in total.iter_mut().zip(radial(&dist)?).zip(&points) {
                    *acc += weight(*px, *d) * v;
                }
            }
        }
    }
    Ok(total)
}

/// Frequency beyond which the mollifier makes the integrand negligible.
fn cutoff(sigma: f64, rel: f64) -> f64 {
    (2.0 * (1.0 / rel).ln()).sqrt() / sigma
}

fn check_oracle_args(t: f64, sigma: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::Config("radial oracle needs t > 0".into()));
    }
    if !(sigma > 0.0) {
        return Err(Error::Config("radial oracle needs sigma > 0".into()));
    }
    Ok(())
}

/// Scalar entry `(i, j)` of the compressible propagator (0 = ρ, 2 = n) as a
/// radial function, by the sine transform
/// `g(r) = (1/(2π² r)) ∫ sin(ρ r) ρ ĝ(ρ) e^{-σ²ρ²/2} dρ`.
pub fn radial_oracle(
    dp: &DerivedParams,
    component: (usize, usize),
    radii: &[f64],
    t: f64,
    sigma: f64,
    opts: QuadOptions,
) -> Result<Vec<f64>> {
    check_oracle_args(t, sigma)?;
    let (i, j) = component;
    if !matches!(i, 0 | 2) || !matches!(j, 0 | 2) {
        return Err(Error::Config("radial oracle covers the (rho, n) scalar entries only".into()));
    }
    let cut = cutoff(sigma, 1e-18);
    let ghat = |s: f64| spectral::propagator(dp, s, t, Which::Compressible)[(i, j)].re * (-0.5 * sigma * sigma * s * s).exp();
    radii
        .par_iter()
        .map(|&r| {
            let res = if r == 0.0 {
                integrate(|s| s * s * ghat(s), 0.0, cut, opts)?
            } else {
                let v = integrate(|s| (s * r).sin() * s * ghat(s), 0.0, cut, opts)?;
                crate::quad::QuadResult { value: v.value / r, ..v }
            };
            Ok(res.value / (2.0 * PI * PI))
        })
        .collect()
}

fn j1(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x / 3.0 * (1.0 - x2 / 10.0 + x2 * x2 / 280.0)
    } else {
        x.sin() / (x * x) - x.cos() / x
    }
}

/// Radial component `x̂·G(x)` of a scalar-row, vector-column block
/// (row 0 = ρ or 2 = n, longitudinal column 1 = m or 3 = w) by the
/// first-order spherical Bessel transform.
pub fn radial_oracle_longitudinal(
    dp: &DerivedParams,
    component: (usize, usize),
    radii: &[f64],
    t: f64,
    sigma: f64,
    opts: QuadOptions,
) -> Result<Vec<f64>> {
    check_oracle_args(t, sigma)?;
    let (i, j) = component;
    if !matches!(i, 0 | 2) || !matches!(j, 1 | 3) {
        return Err(Error::Config("longitudinal oracle needs a scalar row and a vector column".into()));
    }
    let cut = cutoff(sigma, 1e-18);
    let ghat = |s: f64| spectral::propagator(dp, s, t, Which::Compressible)[(i, j)].re * (-0.5 * sigma * sigma * s * s).exp();
    radii
        .par_iter()
        .map(|&r| {
            if r == 0.0 {
                return Ok(0.0);
            }
            let v = integrate(|s| -j1(s * r) * s * s * ghat(s), 0.0, cut, opts)?;
            Ok(v.value / (2.0 * PI * PI))
        })
        .collect()
}

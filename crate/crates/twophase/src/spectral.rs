//! Fourier symbols of the linearized system, their spectra, spectral
//! projectors and propagators.
//!
//! Compressible coordinates at frequency ξ with s = |ξ| are
//! `(ρ̂, i ξ̂·m̂, n̂, i ξ̂·ŵ)`, in which the 4×4 symbol is real. Transverse
//! coordinates are the components of m̂ and ŵ orthogonal to ξ.

use crate::error::{Error, Result};
use crate::linalg::{expm, from_real, identity, max_abs, CMat, C64};
use crate::model::DerivedParams;
use nalgebra::{DMatrix, DVector, Matrix4};

/// Default collision tolerance, relative to max(1, |r|).
pub const COLLISION_TOL: f64 = 1e-4;

/// Below this frequency branches are labeled directly from the small-|ξ| expansion.
const LABEL_START: f64 = 1e-2;
const TRACK_RATIO: f64 = 1.03;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Compressible,
    Incompressible,
}

/// A wavevector with its cached magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPoint {
    pub xi: [f64; 3],
    pub magnitude: f64,
}

impl FrequencyPoint {
    pub fn new(xi: [f64; 3]) -> Self {
        let magnitude = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        Self { xi, magnitude }
    }

    /// Unit direction; the first axis when ξ = 0.
    pub fn direction(&self) -> [f64; 3] {
        if self.magnitude == 0.0 {
            [1.0, 0.0, 0.0]
        } else {
            self.xi.map(|v| v / self.magnitude)
        }
    }
}

pub fn symbol_compressible(dp: &DerivedParams, s: f64) -> DMatrix<f64> {
    let (a1, a2, nu) = (dp.alpha1, dp.alpha2, dp.nu);
    DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, -s, 0.0, 0.0, //
            s, -1.0, 0.0, a2, //
            0.0, 0.0, 0.0, -s, //
            0.0, 1.0, a1 * s, -nu * s * s - a2,
        ],
    )
}

pub fn symbol_incompressible(dp: &DerivedParams, s: f64) -> DMatrix<f64> {
    let a2 = dp.alpha2;
    DMatrix::from_row_slice(2, 2, &[-1.0, a2, 1.0, -a2 - dp.mu_bar * s * s])
}

/// Index of ρ, m, n, w in the 8-component state.
pub const RHO: usize = 0;
pub const M: usize = 1;
pub const N: usize = 4;
pub const W: usize = 5;

/// Full 8×8 symbol on `(ρ, m₁, m₂, m₃, n, w₁, w₂, w₃)`.
pub fn symbol_full(dp: &DerivedParams, xi: &FrequencyPoint) -> CMat {
    let mut a = CMat::zeros(8, 8);
    let i = C64::new(0.0, 1.0);
    let s2 = xi.magnitude * xi.magnitude;
    let visc = dp.mu_bar + dp.lambda_bar;
    for k in 0..3 {
        let ik = i * xi.xi[k];
        a[(RHO, M + k)] = -ik;
        a[(M + k, RHO)] = -ik;
        a[(M + k, M + k)] = C64::new(-1.0, 0.0);
        a[(M + k, W + k)] = C64::new(dp.alpha2, 0.0);
        a[(N, W + k)] = -ik;
        a[(W + k, M + k)] = C64::new(1.0, 0.0);
        a[(W + k, N)] = -ik * dp.alpha1;
        for l in 0..3 {
            let mut v = -visc * xi.xi[k] * xi.xi[l];
            if k == l {
                v -= dp.mu_bar * s2 + dp.alpha2;
            }
            a[(W + k, W + l)] = C64::new(v, 0.0);
        }
    }
    a
}

/// Monic characteristic polynomial of the compressible symbol,
/// coefficients `[c0, c1, c2, c3]` of `r⁴ + c3 r³ + c2 r² + c1 r + c0`.
pub fn char_poly_compressible(dp: &DerivedParams, s: f64) -> [f64; 4] {
    let s2 = s * s;
    let (a1, a2, nu) = (dp.alpha1, dp.alpha2, dp.nu);
    [a1 * s2 * s2, nu * s2 * s2 + (a1 + a2) * s2, (nu + a1 + 1.0) * s2, nu * s2 + a2 + 1.0]
}

/// `[c0, c1]` of `κ² + c1 κ + c0`.
pub fn char_poly_incompressible(dp: &DerivedParams, s: f64) -> [f64; 2] {
    let b = dp.mu_bar * s * s;
    [b, dp.alpha2 + 1.0 + b]
}

fn poly_eval(c: &[f64; 4], r: C64) -> (C64, C64) {
    let mut p = C64::new(1.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for k in (0..4).rev() {
        dp = dp * r + p;
        p = p * r + c[k];
    }
    (p, dp)
}

/// Unordered roots of the compressible characteristic polynomial:
/// companion-matrix eigenvalues refined by Newton steps.
pub fn roots_compressible(dp: &DerivedParams, s: f64) -> [C64; 4] {
    let c = char_poly_compressible(dp, s);
    let comp = Matrix4::new(
        0.0, 0.0, 0.0, -c[0], //
        1.0, 0.0, 0.0, -c[1], //
        0.0, 1.0, 0.0, -c[2], //
        0.0, 0.0, 1.0, -c[3],
    );
    let ev = comp.complex_eigenvalues();
    let mut out = [C64::new(0.0, 0.0); 4];
    for (k, z0) in ev.iter().enumerate() {
        let mut z = *z0;
        let (mut p, _) = poly_eval(&c, z);
        for _ in 0..6 {
            let (_, d) = poly_eval(&c, z);
            if d.norm() == 0.0 {
                break;
            }
            let cand = z - p / d;
            let (pc, _) = poly_eval(&c, cand);
            if pc.norm() < p.norm() {
                z = cand;
                p = pc;
            } else {
                break;
            }
        }
        out[k] = z;
    }
    out
}

/// Minimum pairwise distance scaled by max(1, |r|).
pub fn scaled_gap(r: &[C64]) -> f64 {
    let mut g = f64::INFINITY;
    for i in 0..r.len() {
        for j in i + 1..r.len() {
            let scale = 1f64.max(r[i].norm()).max(r[j].norm());
            g = g.min((r[i] - r[j]).norm() / scale);
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressibleSpectrum {
    pub s: f64,
    /// `r[0..4]` are r1..r4 when `labeled`, otherwise an arbitrary order.
    pub r: [C64; 4],
    /// Minimum pairwise distance relative to max(1, |r|).
    pub gap: f64,
    pub labeled: bool,
    /// Frequency at which continuation became ambiguous, if it did.
    pub tracking_failure: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncompressibleSpectrum {
    pub s: f64,
    pub kappa1: f64,
    /// The branch vanishing as s → 0.
    pub kappa2: f64,
}

impl IncompressibleSpectrum {
    pub fn as_array(&self) -> [C64; 2] {
        [C64::new(self.kappa1, 0.0), C64::new(self.kappa2, 0.0)]
    }
}

pub fn spectrum_incompressible(dp: &DerivedParams, s: f64) -> IncompressibleSpectrum {
    let [c0, c1] = char_poly_incompressible(dp, s);
    // discriminant is (1 - μ̄s²)² + positive terms, never negative
    let disc = (c1 * c1 - 4.0 * c0).max(0.0).sqrt();
    let kappa1 = -(c1 + disc) / 2.0;
    let kappa2 = if kappa1 == 0.0 { 0.0 } else { c0 / kappa1 };
    IncompressibleSpectrum { s, kappa1, kappa2 }
}

/// Small-frequency predictions used to seed the labels.
fn low_frequency_guess(dp: &DerivedParams, s: f64) -> [C64; 4] {
    let (a1, a2) = (dp.alpha1, dp.alpha2);
    let s2 = s * s;
    let r2 = -a1 / (a1 + a2) * s2;
    let damp = -(dp.nu * (a1 + a2) * (a2 + 1.0) + a2 * (a1 - 1.0).powi(2))
        / (2.0 * (a1 + a2) * (a2 + 1.0).powi(2))
        * s2;
    [
        C64::new(-(a2 + 1.0), 0.0),
        C64::new(r2, 0.0),
        C64::new(damp, dp.c * s),
        C64::new(damp, -dp.c * s),
    ]
}

const PERMS: [[usize; 4]; 24] = {
    let mut out = [[0usize; 4]; 24];
    let mut k = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                let mut d = 0;
                while d < 4 {
                    if a != b && a != c && a != d && b != c && b != d && c != d {
                        out[k] = [a, b, c, d];
                        k += 1;
                    }
                    d += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
};

/// Assigns `roots` to the reference labels; `None` when the best matching
/// is not clearly better than the runner-up.
fn match_roots(reference: &[C64; 4], roots: &[C64; 4]) -> Option<[C64; 4]> {
    let mut best = (f64::INFINITY, 0usize);
    let mut second = f64::INFINITY;
    for (k, p) in PERMS.iter().enumerate() {
        let cost: f64 = (0..4).map(|i| (roots[p[i]] - reference[i]).norm()).sum();
        if cost < best.0 {
            second = best.0;
            best = (cost, k);
        } else if cost < second {
            second = cost;
        }
    }
    if !(2.0 * best.0 < second) {
        return None;
    }
    let p = PERMS[best.1];
    let mut out = [roots[p[0]], roots[p[1]], roots[p[2]], roots[p[3]]];
    orient_pair(&mut out);
    Some(out)
}

fn orient_pair(r: &mut [C64; 4]) {
    let conj_pair = (r[2] - r[3].conj()).norm() <= 1e-8 * r[2].norm().max(1.0);
    if conj_pair && r[2].im < 0.0 {
        r.swap(2, 3);
    }
}

/// Tracks labeled roots along increasing frequencies.
#[derive(Debug, Clone)]
pub struct BranchTracker<'a> {
    dp: &'a DerivedParams,
    s: f64,
    r: [C64; 4],
    tol: f64,
    failed_at: Option<f64>,
}

impl<'a> BranchTracker<'a> {
    pub fn new(dp: &'a DerivedParams) -> Self {
        Self::with_tolerance(dp, COLLISION_TOL)
    }

    pub fn with_tolerance(dp: &'a DerivedParams, tol: f64) -> Self {
        let s = LABEL_START;
        let guess = low_frequency_guess(dp, s);
        let r = match_roots(&guess, &roots_compressible(dp, s)).expect("branches are separated at the starting frequency");
        Self { dp, s, r, tol, failed_at: None }
    }

    fn advance_to(&mut self, target: f64) {
        if self.failed_at.is_some() {
            return;
        }
        while self.s < target {
            let mut next = (self.s * TRACK_RATIO).min(target);
            let mut ok = false;
            for _ in 0..40 {
                let roots = roots_compressible(self.dp, next);
                if scaled_gap(&roots) > self.tol {
                    if let Some(m) = match_roots(&self.r, &roots) {
                        self.r = m;
                        self.s = next;
                        ok = true;
                        break;
                    }
                }
                next = self.s + 0.5 * (next - self.s);
                if next - self.s <= 1e-12 * self.s {
                    break;
                }
            }
            if !ok {
                self.failed_at = Some(next);
                return;
            }
        }
    }

    /// Labeled spectrum at `s`, which must not decrease between calls.
    pub fn spectrum(&mut self, s: f64) -> CompressibleSpectrum {
        let roots = roots_compressible(self.dp, s);
        let gap = scaled_gap(&roots);
        if s == 0.0 {
            let mut r = [C64::new(0.0, 0.0); 4];
            r[0] = C64::new(-(self.dp.alpha2 + 1.0), 0.0);
            return CompressibleSpectrum { s, r, gap, labeled: true, tracking_failure: None };
        }
        if s <= LABEL_START {
            let labeled = match_roots(&low_frequency_guess(self.dp, s), &roots);
            let ok = labeled.is_some() && gap > self.tol;
            return CompressibleSpectrum {
                s,
                r: labeled.unwrap_or(roots),
                gap,
                labeled: ok,
                tracking_failure: if ok { None } else { Some(s) },
            };
        }
        assert!(s >= self.s, "tracker frequencies must be non-decreasing");
        self.advance_to(s);
        match self.failed_at {
            None => CompressibleSpectrum { s, r: self.r, gap, labeled: true, tracking_failure: None },
            Some(f) => CompressibleSpectrum { s, r: roots, gap, labeled: false, tracking_failure: Some(f) },
        }
    }
}

/// Labeled compressible spectrum at one frequency.
pub fn spectrum_compressible(dp: &DerivedParams, s: f64) -> CompressibleSpectrum {
    BranchTracker::new(dp).spectrum(s)
}

/// Labeled spectra along a grid, sorted internally; results follow input order.
pub fn spectrum_path(dp: &DerivedParams, s_grid: &[f64]) -> Vec<CompressibleSpectrum> {
    let mut order: Vec<usize> = (0..s_grid.len()).collect();
    order.sort_by(|&a, &b| s_grid[a].total_cmp(&s_grid[b]));
    let mut tracker = BranchTracker::new(dp);
    let mut out = vec![None; s_grid.len()];
    for k in order {
        out[k] = Some(tracker.spectrum(s_grid[k]));
    }
    out.into_iter().map(|x| x.expect("every index visited")).collect()
}

/// Spectral projectors `v_i w_iᵀ` for distinct eigenvalues, from right
/// eigenvectors `V` by inverse iteration and `W = V⁻¹`. Falls back to the
/// product `Π_{j≠i}(A - r_j)/(r_i - r_j)` if an eigenvector solve fails.
pub fn projectors_from(a: &CMat, r: &[C64], s: f64, tol: f64) -> Result<Vec<CMat>> {
    let gap = scaled_gap(r);
    if !(gap > tol) {
        return Err(Error::Collision { s, gap, tol });
    }
    Ok(eigenvector_projectors(a, r).unwrap_or_else(|| lagrange_projectors(a, r)))
}

fn lagrange_projectors(a: &CMat, r: &[C64]) -> Vec<CMat> {
    let n = a.nrows();
    let id = identity(n);
    (0..r.len())
        .map(|i| {
            let mut p = id.clone();
            for (j, &rj) in r.iter().enumerate() {
                if j != i {
                    p *= (a - &id * rj) / (r[i] - rj);
                }
            }
            p
        })
        .collect()
}

fn eigenvector_projectors(a: &CMat, r: &[C64]) -> Option<Vec<CMat>> {
    let n = a.nrows();
    let id = identity(n);
    let mut v = CMat::zeros(n, n);
    for (i, &ri) in r.iter().enumerate() {
        let shift = ri + C64::new(1e-10 * ri.norm().max(1.0), 0.0);
        let lu = (a - &id * shift).lu();
        let mut x = DVector::from_fn(n, |k, _| C64::new(1.0 + 0.1 * k as f64, 0.05 * k as f64));
        for _ in 0..3 {
            x = lu.solve(&x)?;
            let norm = x.norm();
            if !(norm.is_finite() && norm > 0.0) {
                return None;
            }
            x /= C64::new(norm, 0.0);
        }
        v.set_column(i, &x);
    }
    let w = v.clone().try_inverse()?;
    let out: Vec<CMat> = (0..n).map(|i| v.column(i) * w.row(i)).collect();
    out.iter().all(|p| p.iter().all(|z| z.is_finite())).then_some(out)
}

/// Labeled spectrum with its projectors.
#[derive(Debug, Clone)]
pub struct ProjectorSet {
    pub eigenvalues: Vec<C64>,
    pub projectors: Vec<CMat>,
}

pub fn projectors(dp: &DerivedParams, s: f64, which: Which) -> Result<ProjectorSet> {
    match which {
        Which::Compressible => {
            let sp = spectrum_compressible(dp, s);
            let a = from_real(&symbol_compressible(dp, s));
            let p = projectors_from(&a, &sp.r, s, COLLISION_TOL)?;
            if !sp.labeled {
                return Err(Error::BranchTracking { s: sp.tracking_failure.unwrap_or(s) });
            }
            Ok(ProjectorSet { eigenvalues: sp.r.to_vec(), projectors: p })
        }
        Which::Incompressible => {
            let sp = spectrum_incompressible(dp, s);
            let a = from_real(&symbol_incompressible(dp, s));
            let r = sp.as_array();
            let p = projectors_from(&a, &r, s, COLLISION_TOL)?;
            Ok(ProjectorSet { eigenvalues: r.to_vec(), projectors: p })
        }
    }
}

impl ProjectorSet {
    /// `Σ e^{r_i t} P_i`.
    pub fn exp(&self, t: f64) -> CMat {
        let n = self.projectors[0].nrows();
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(CMat::zeros(n, n), |acc, (r, p)| acc + p * (r * t).exp())
    }

    /// `Σ r_i P_i`, which reconstructs the symbol.
    pub fn reconstruct(&self) -> CMat {
        let n = self.projectors[0].nrows();
        self.eigenvalues.iter().zip(&self.projectors).fold(CMat::zeros(n, n), |acc, (r, p)| acc + p * *r)
    }
}

fn symbol(dp: &DerivedParams, s: f64, which: Which) -> CMat {
    match which {
        Which::Compressible => from_real(&symbol_compressible(dp, s)),
        Which::Incompressible => from_real(&symbol_incompressible(dp, s)),
    }
}

/// Exponential of `t` times the reduced symbol through the spectral formula.
pub fn propagator_spectral(dp: &DerivedParams, s: f64, t: f64, which: Which) -> Result<CMat> {
    let a = symbol(dp, s, which);
    let r: Vec<C64> = match which {
        Which::Compressible => roots_compressible(dp, s).to_vec(),
        Which::Incompressible => spectrum_incompressible(dp, s).as_array().to_vec(),
    };
    let p = projectors_from(&a, &r, s, COLLISION_TOL)?;
    Ok(ProjectorSet { eigenvalues: r, projectors: p }.exp(t))
}

/// Exponential of `t` times the reduced symbol through scaling and squaring.
pub fn propagator_expm(dp: &DerivedParams, s: f64, t: f64, which: Which) -> CMat {
    expm(&(symbol(dp, s, which) * C64::new(t, 0.0)))
}

/// `e^{tA}` for the reduced symbol: spectral formula when eigenvalues are
/// well separated and the result is well conditioned, scaling and squaring otherwise.
pub fn propagator(dp: &DerivedParams, s: f64, t: f64, which: Which) -> CMat {
    assert!(t >= 0.0, "propagator needs t >= 0");
    if t == 0.0 {
        return identity(if which == Which::Compressible { 4 } else { 2 });
    }
    let a = symbol(dp, s, which);
    let r: Vec<C64> = match which {
        Which::Compressible => roots_compressible(dp, s).to_vec(),
        Which::Incompressible => spectrum_incompressible(dp, s).as_array().to_vec(),
    };
    if let Ok(p) = projectors_from(&a, &r, s, COLLISION_TOL) {
        let growth = p.iter().map(max_abs).fold(0.0, f64::max);
        if growth < 1e4 {
            return ProjectorSet { eigenvalues: r, projectors: p }.exp(t);
        }
    }
    expm(&(a * C64::new(t, 0.0)))
}

/// Exponential of `t` times the full 8×8 symbol by scaling and squaring.
pub fn propagator_full_expm(dp: &DerivedParams, xi: &FrequencyPoint, t: f64) -> CMat {
    expm(&(symbol_full(dp, xi) * C64::new(t, 0.0)))
}

/// Reduced propagators at one |ξ|, enough to act on any ξ of that length.
#[derive(Debug, Clone)]
pub struct RadialPropagator {
    /// 4×4 compressible block.
    pub comp: [[C64; 4]; 4],
    /// 2×2 transverse block.
    pub trans: [[C64; 2]; 2],
}

impl RadialPropagator {
    pub fn new(dp: &DerivedParams, s: f64, t: f64) -> Self {
        let e1 = propagator(dp, s, t, Which::Compressible);
        let e2 = propagator(dp, s, t, Which::Incompressible);
        Self::from_blocks(&e1, &e2)
    }

    pub fn from_blocks(e1: &CMat, e2: &CMat) -> Self {
        let mut comp = [[C64::new(0.0, 0.0); 4]; 4];
        let mut trans = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..4 {
            for j in 0..4 {
                comp[i][j] = e1[(i, j)];
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                trans[i][j] = e2[(i, j)];
            }
        }
        Self { comp, trans }
    }

    /// Applies the propagator at direction `dir` (unit vector) to
    /// `(ρ̂, m̂, n̂, ŵ)` in place.
    #[inline]
    pub fn apply(&self, dir: &[f64; 3], u: &mut [C64; 8]) {
        let i = C64::new(0.0, 1.0);
        let dot = |off: usize| (0..3).fold(C64::new(0.0, 0.0), |a, k| a + u[off + k] * dir[k]);
        let ml = i * dot(M);
        let wl = i * dot(W);
        let mut mt = [C64::new(0.0, 0.0); 3];
        let mut wt = [C64::new(0.0, 0.0); 3];
        for k in 0..3 {
            mt[k] = u[M + k] + i * ml * dir[k];
            wt[k] = u[W + k] + i * wl * dir[k];
        }
        let x = [u[RHO], ml, u[N], wl];
        let mut y = [C64::new(0.0, 0.0); 4];
        for a in 0..4 {
            for b in 0..4 {
                y[a] += self.comp[a][b] * x[b];
            }
        }
        let tr = &self.trans;
        u[RHO] = y[0];
        u[N] = y[2];
        for k in 0..3 {
            let mtk = tr[0][0] * mt[k] + tr[0][1] * wt[k];
            let wtk = tr[1][0] * mt[k] + tr[1][1] * wt[k];
            u[M + k] = mtk - i * y[1] * dir[k];
            u[W + k] = wtk - i * y[3] * dir[k];
        }
    }

    /// Full 8×8 matrix at direction `dir`.
    pub fn matrix(&self, dir: &[f64; 3]) -> CMat {
        let mut out = CMat::zeros(8, 8);
        for col in 0..8 {
            let mut e = [C64::new(0.0, 0.0); 8];
            e[col] = C64::new(1.0, 0.0);
            self.apply(dir, &mut e);
            for row in 0..8 {
                out[(row, col)] = e[row];
            }
        }
        out
    }
}

/// Full propagator assembled from the compressible and transverse blocks.
pub fn propagator_full(dp: &DerivedParams, xi: &FrequencyPoint, t: f64) -> CMat {
    RadialPropagator::new(dp, xi.magnitude, t).matrix(&xi.direction())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityRow {
    pub s: f64,
    pub max_re_compressible: f64,
    pub max_re_incompressible: f64,
}

impl StabilityRow {
    pub fn unstable(&self) -> bool {
        self.s > 0.0 && (self.max_re_compressible >= 0.0 || self.max_re_incompressible >= 0.0)
    }
}

pub fn stability_scan(dp: &DerivedParams, s_grid: &[f64]) -> Vec<StabilityRow> {
    s_grid
        .iter()
        .map(|&s| {
            let r = roots_compressible(dp, s);
            let k = spectrum_incompressible(dp, s);
            StabilityRow {
                s,
                max_re_compressible: r.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max),
                max_re_incompressible: k.kappa1.max(k.kappa2),
            }
        })
        .collect()
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::model::{derive, ModelParams};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn compressible_symbol_entries() {
        let dp = DerivedParams::canonical();
        let a0 = symbol_compressible(&dp, 0.0);
        let nz: Vec<_> = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|&(i, j)| a0[(i, j)] != 0.0).collect();
        assert_eq!(nz, vec![(1, 1), (1, 3), (3, 1), (3, 3)]);
        assert_eq!(a0[(1, 1)], -1.0);
        assert_eq!(a0[(1, 3)], dp.alpha2);
        assert_eq!(a0[(3, 1)], 1.0);
        assert_eq!(a0[(3, 3)], -dp.alpha2);
        assert_eq!(symbol_compressible(&dp, 1.0)[(3, 3)], -3.0);
        for s in [0.0, 0.3, 2.0, 17.0] {
            assert!((symbol_compressible(&dp, s).trace() + dp.nu * s * s + dp.alpha2 + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn incompressible_symbol_entries() {
        let dp = DerivedParams::canonical();
        assert_eq!(symbol_incompressible(&dp, 0.0), DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, -1.0]));
        let a = symbol_incompressible(&dp, 1.0);
        assert_eq!(a[(1, 1)], -2.0);
        assert!((a.determinant() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn full_symbol_at_zero_and_trace() {
        let dp = derive(ModelParams { lambda: 0.3, ..ModelParams::canonical() }).unwrap();
        let a = symbol_full(&dp, &FrequencyPoint::new([0.0; 3]));
        for j in 0..8 {
            assert_eq!(a[(RHO, j)], c(0.0, 0.0));
            assert_eq!(a[(N, j)], c(0.0, 0.0));
        }
        for k in 0..3 {
            assert_eq!(a[(M + k, M + k)], c(-1.0, 0.0));
            assert_eq!(a[(M + k, W + k)], c(dp.alpha2, 0.0));
            assert_eq!(a[(W + k, M + k)], c(1.0, 0.0));
            assert_eq!(a[(W + k, W + k)], c(-dp.alpha2, 0.0));
        }
        let xi = FrequencyPoint::new([0.3, -1.2, 0.7]);
        let s2 = xi.magnitude.powi(2);
        let expected = -3.0 * (dp.mu_bar * s2 + dp.alpha2) - (dp.mu_bar + dp.lambda_bar) * s2 - 3.0;
        assert!((symbol_full(&dp, &xi).trace() - c(expected, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn spectrum_examples() {
        let dp = DerivedParams::canonical();
        let sp0 = spectrum_compressible(&dp, 0.0);
        assert!((sp0.r[0] - c(-2.0, 0.0)).norm() < 1e-12);
        for k in 1..4 {
            assert!(sp0.r[k].norm() < 1e-5);
        }
        let sp = spectrum_compressible(&dp, 1.0);
        assert!(sp.labeled);
        let sum: C64 = sp.r.iter().sum();
        let prod: C64 = sp.r.iter().product();
        assert!((sum - c(-4.0, 0.0)).norm() < 1e-12);
        assert!((prod - c(2.0, 0.0)).norm() < 1e-12);
        let k = spectrum_incompressible(&dp, 1.0);
        assert!((k.kappa1 - (-3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!((k.kappa2 - (-3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!((k.kappa1 + 2.618_034_0).abs() < 1e-7);
    }

    #[test]
    fn labels_follow_branches() {
        let dp = DerivedParams::canonical();
        let sp = spectrum_compressible(&dp, 0.05);
        assert!((sp.r[0].re + 2.0).abs() < 0.01);
        assert!(sp.r[1].im.abs() < 1e-12 && sp.r[1].re < 0.0);
        assert!(sp.r[2].im > 0.0);
        assert!((sp.r[2] - sp.r[3].conj()).norm() < 1e-12);
        let hi = spectrum_compressible(&dp, 200.0);
        assert!(hi.labeled);
        // the branch starting at -(α2+1) becomes the strongly damped one
        assert!((hi.r[0].re / (-dp.nu * 200.0 * 200.0) - 1.0).abs() < 1e-3);
        assert!((hi.r[1].re + dp.alpha1 / dp.nu).abs() < 1e-3);
        assert!((hi.r[2] - c(-0.5, 200.0)).norm() < 0.05);
    }

    #[test]
    fn path_matches_pointwise() {
        let dp = DerivedParams::canonical();
        let grid = log_grid(1e-3, 50.0, 60);
        let path = spectrum_path(&dp, &grid);
        for (s, sp) in grid.iter().zip(&path) {
            let single = spectrum_compressible(&dp, *s);
            for k in 0..4 {
                assert!((single.r[k] - sp.r[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn projector_algebra() {
        let dp = DerivedParams::canonical();
        let ps = projectors(&dp, 0.5, Which::Compressible).unwrap();
        let sum = ps.projectors.iter().fold(CMat::zeros(4, 4), |a, p| a + p);
        assert!(max_abs_diff(&sum, &identity(4)) < 1e-10);
        let a = from_real(&symbol_compressible(&dp, 0.5));
        assert!(max_abs_diff(&ps.reconstruct(), &a) < 1e-10);
        for i in 0..4 {
            for j in 0..4 {
                let pp = &ps.projectors[i] * &ps.projectors[j];
                let target = if i == j { ps.projectors[i].clone() } else { CMat::zeros(4, 4) };
                assert!(max_abs_diff(&pp, &target) < 1e-9);
            }
        }
    }

    #[test]
    fn projector_low_frequency_limits() {
        let dp = DerivedParams::canonical();
        let (a1, a2) = (dp.alpha1, dp.alpha2);
        let ps = projectors(&dp, 1e-3, Which::Compressible).unwrap();
        let row = [a1, 0.0, -a1 * a2, 0.0].map(|v| v / (a1 + a2));
        for j in 0..4 {
            assert!((ps.projectors[1][(0, j)] - c(row[j], 0.0)).norm() < 1e-2);
        }
        let q = projectors(&dp, 1e-4, Which::Incompressible).unwrap();
        let q2 = [[a2, a2], [1.0, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((q.projectors[1][(i, j)] - c(q2[i][j] / (a2 + 1.0), 0.0)).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn collision_is_reported() {
        let dp = DerivedParams::canonical();
        assert!(matches!(projectors(&dp, 0.0, Which::Compressible), Err(Error::Collision { .. })));
    }

    #[test]
    fn propagator_at_zero_time_and_frequency() {
        let dp = DerivedParams::canonical();
        assert_eq!(propagator(&dp, 0.7, 0.0, Which::Compressible), identity(4));
        for t in [0.1, 1.0, 3.0] {
            let e = propagator(&dp, 0.0, t, Which::Compressible);
            let d = (-2.0 * t).exp();
            let expected = [[(1.0 + d) / 2.0, (1.0 - d) / 2.0], [(1.0 - d) / 2.0, (1.0 + d) / 2.0]];
            for (i, ii) in [1usize, 3].iter().enumerate() {
                for (j, jj) in [1usize, 3].iter().enumerate() {
                    assert!((e[(*ii, *jj)] - c(expected[i][j], 0.0)).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn paths_agree_and_compose() {
        let dp = DerivedParams::canonical();
        for s in [0.05, 0.4, 1.0, 3.0, 12.0] {
            for which in [Which::Compressible, Which::Incompressible] {
                let a = propagator_spectral(&dp, s, 1.3, which).unwrap();
                let b = propagator_expm(&dp, s, 1.3, which);
                assert!(max_abs_diff(&a, &b) < 1e-10, "s={s}");
                let ab = propagator(&dp, s, 0.5, which) * propagator(&dp, s, 0.8, which);
                assert!(max_abs_diff(&ab, &b) < 1e-10);
            }
        }
    }

    #[test]
    fn hodge_assembly_matches_full_exponential() {
        let dp = derive(ModelParams { lambda: 0.5, rho_bar: 0.7, ..ModelParams::canonical() }).unwrap();
        for xi in [[0.0, 0.0, 0.0], [0.3, -0.4, 1.1], [2.0, 0.5, -1.0], [0.0, 0.0, 4.0]] {
            let f = FrequencyPoint::new(xi);
            let a = propagator_full(&dp, &f, 0.9);
            let b = propagator_full_expm(&dp, &f, 0.9);
            assert!(max_abs_diff(&a, &b) < 1e-10, "{xi:?}");
        }
    }

    #[test]
    fn stability_canonical() {
        let dp = DerivedParams::canonical();
        let rows = stability_scan(&dp, &log_grid(1e-3, 50.0, 500));
        assert!(rows.iter().all(|r| !r.unstable()));
        assert!(rows[0].max_re_compressible > -1e-5);
        let s = 1e-3;
        let k = spectrum_incompressible(&dp, s);
        assert!((k.kappa2 / (-dp.mu_bar * s * s / (dp.alpha2 + 1.0)) - 1.0).abs() < 1e-5);
    }
}

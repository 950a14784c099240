//! Three-dimensional complex FFT on an n³ cube, built from 1-D transforms
//! along each axis. Index `(i, j, k)` lives at `(i * n + j) * n + k`.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

#[derive(Clone, Copy)]
struct SharedPtr(*mut Complex64);
unsafe impl Send for SharedPtr {}
unsafe impl Sync for SharedPtr {}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Unnormalized forward transform, kernel `e^{-2πi jk/n}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Unnormalized inverse transform, kernel `e^{+2πi jk/n}`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
    }

    fn run(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "field size does not match the transform");
        let scratch_len = plan.get_inplace_scratch_len();
        data.par_chunks_mut(n).for_each_init(
            || vec![Complex64::new(0.0, 0.0); scratch_len],
            |scratch, line| plan.process_with_scratch(line, scratch),
        );
        // axis 1: each slab of fixed i is independent
        data.par_chunks_mut(n * n).for_each_init(
            || (vec![Complex64::new(0.0, 0.0); n * n], vec![Complex64::new(0.0, 0.0); scratch_len]),
            |(buf, scratch), slab| {
                for j in 0..n {
                    for k in 0..n {
                        buf[k * n + j] = slab[j * n + k];
                    }
                }
                for line in buf.chunks_mut(n) {
                    plan.process_with_scratch(line, scratch);
                }
                for j in 0..n {
                    for k in 0..n {
                        slab[j * n + k] = buf[k * n + j];
                    }
                }
            },
        );
        // axis 0: lines with stride n², grouped by j; writes are disjoint across j
        let ptr = SharedPtr(data.as_mut_ptr());
        (0..n).into_par_iter().for_each_init(
            || (vec![Complex64::new(0.0, 0.0); n * n], vec![Complex64::new(0.0, 0.0); scratch_len]),
            move |(buf, scratch), j| {
                let p = ptr;
                for i in 0..n {
                    for k in 0..n {
                        // SAFETY: index (i, j, k) is touched only by the task owning j
                        buf[k * n + i] = unsafe { *p.0.add((i * n + j) * n + k) };
                    }
                }
                for line in buf.chunks_mut(n) {
                    plan.process_with_scratch(line, scratch);
                }
                for i in 0..n {
                    for k in 0..n {
                        unsafe { *p.0.add((i * n + j) * n + k) = buf[k * n + i] };
                    }
                }
            },
        );
    }
}

/// Signed integer wavenumber of FFT index `idx`, in `[-n/2, n/2)`.
#[inline]
pub fn signed_index(idx: usize, n: usize) -> i64 {
    if idx < n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(data: &[Complex64], n: usize, sign: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); n * n * n];
        let w = |a: usize, b: usize| Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * (a * b % n) as f64 / n as f64);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..n {
                        for j in 0..n {
                            for k in 0..n {
                                acc += data[(i * n + j) * n + k] * w(a, i) * w(b, j) * w(c, k);
                            }
                        }
                    }
                    out[(a * n + b) * n + c] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_transform() {
        let n = 6;
        let data: Vec<Complex64> = (0..n * n * n).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
        let plan = Fft3::new(n);
        let mut f = data.clone();
        plan.forward(&mut f);
        let r = naive_dft(&data, n, -1.0);
        for (a, b) in f.iter().zip(&r) {
            assert!((a - b).norm() < 1e-11);
        }
        plan.inverse(&mut f);
        for (a, b) in f.iter().zip(&data) {
            assert!((a / (n * n * n) as f64 - b).norm() < 1e-13);
        }
    }

    #[test]
    fn signed_indices() {
        assert_eq!(signed_index(0, 8), 0);
        assert_eq!(signed_index(3, 8), 3);
        assert_eq!(signed_index(4, 8), -4);
        assert_eq!(signed_index(7, 8), -1);
    }
}

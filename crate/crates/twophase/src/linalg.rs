//! Dense complex matrices and the matrix exponential.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn from_real(m: &DMatrix<f64>) -> CMat {
    m.map(|v| C64::new(v, 0.0))
}

/// Maximum absolute column sum.
pub fn norm1(m: &CMat) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a - b))
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068),
];
const THETA13: f64 = 5.371920351148152;

fn pade_coeffs(m: usize) -> &'static [f64] {
    const P3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
    const P5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
    const P7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
    const P9: [f64; 10] = [
        17643225600.0,
        8821612800.0,
        2075673600.0,
        302702400.0,
        30270240.0,
        2162160.0,
        110880.0,
        3960.0,
        90.0,
        1.0,
    ];
    match m {
        3 => &P3,
        5 => &P5,
        7 => &P7,
        9 => &P9,
        _ => &PADE13,
    }
}

fn solve_pade(u: CMat, v: CMat) -> CMat {
    let p = &v + &u;
    let q = &v - &u;
    q.lu().solve(&p).expect("Pade denominator is nonsingular for scaled arguments")
}

/// Matrix exponential by scaling and squaring with a Padé approximant of
/// degree 3 to 13 chosen from the 1-norm.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let id = identity(n);
    let nrm = norm1(a);
    if nrm == 0.0 {
        return id;
    }
    let a2 = a * a;
    for &(m, theta) in &THETA {
        if nrm <= theta {
            let b = pade_coeffs(m);
            let mut pows = vec![id.clone(), a2.clone()];
            for k in 2..=m / 2 {
                let next = &pows[k - 1] * &a2;
                pows.push(next);
            }
            let mut u = CMat::zeros(n, n);
            let mut v = CMat::zeros(n, n);
            for k in 0..=m / 2 {
                u += &pows[k] * C64::new(b[2 * k + 1], 0.0);
                v += &pows[k] * C64::new(b[2 * k], 0.0);
            }
            return solve_pade(a * u, v);
        }
    }
    let s = ((nrm / THETA13).log2().ceil()).max(0.0) as i32;
    let scale = C64::new(2f64.powi(-s), 0.0);
    let a1 = a * scale;
    let a2 = &a1 * &a1;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let inner_u = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u = &a1 * (&a6 * inner_u + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1));
    let inner_v = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = &a6 * inner_v + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);
    let mut r = solve_pade(u, v);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Product of `(a - z_j I)` over the listed shifts.
pub fn shifted_product(a: &CMat, shifts: &[C64]) -> CMat {
    let n = a.nrows();
    let id = identity(n);
    shifts.iter().fold(id.clone(), |acc, &z| acc * (a - &id * z))
}

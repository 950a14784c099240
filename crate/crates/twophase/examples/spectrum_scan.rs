//! Tracks the four compressible eigenvalues over a log-spaced frequency
//! range and reports where the branches come closest to each other.

use twophase::spectral::{log_grid, spectrum_path, stability_scan};
use twophase::DerivedParams;

fn main() {
    let dp = DerivedParams::canonical();
    println!("alpha1 = {}, alpha2 = {}, nu = {}, c = {:.6}", dp.alpha1, dp.alpha2, dp.nu, dp.c);
    let grid = log_grid(1e-3, 1e3, 25);
    println!("{:>10} {:>24} {:>24} {:>28} {:>10}", "s", "r1", "r2", "r3", "gap");
    for sp in spectrum_path(&dp, &grid) {
        let r3 = format!("{:.4e} {:+.4e}i", sp.r[2].re, sp.r[2].im);
        println!("{:>10.3e} {:>24.6e} {:>24.6e} {:>28} {:>10.3e}", sp.s, sp.r[0].re, sp.r[1].re, r3, sp.gap);
    }
    let worst = stability_scan(&dp, &log_grid(1e-3, 1e3, 500))
        .into_iter()
        .map(|row| row.max_re_compressible.max(row.max_re_incompressible))
        .fold(f64::NEG_INFINITY, f64::max);
    println!("largest real part over 500 frequencies: {worst:e}");
}

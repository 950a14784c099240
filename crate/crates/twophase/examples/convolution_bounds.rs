//! Estimates the constant in each space-time convolution bound by sampling
//! the ratio of the convolution to its claimed majorant.

use twophase::convolve::{constant_estimate, ConvSpec, SampleGrid, Which};
use twophase::quad::QuadOptions;
use twophase::DerivedParams;

fn main() -> twophase::Result<()> {
    let dp = DerivedParams::canonical();
    let grid = SampleGrid { front_fractions: vec![0.0, 0.5, 1.0, 1.5], times: vec![1.0, 8.0, 64.0] };
    let opts = QuadOptions::with_tol(1e-10, 1e-6);
    for which in Which::ALL {
        let est = constant_estimate(&ConvSpec::new(which, dp.c)?, &grid, opts)?;
        println!("{:<17} C_max = {:>8.4} at x = {:>8.3}, t = {:>5}", which.name(), est.c_max, est.at_x, est.at_t);
        for (t, m) in est.per_time_max() {
            println!("        t = {t:>5}: {m:.4}");
        }
    }
    Ok(())
}

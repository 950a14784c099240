//! Synthesizes the density response to a density source and compares it
//! on the x axis with the periodized radial quadrature.

use twophase::green::{periodize_axis, radial_oracle, synthesize, Block, FrequencyGrid, GreenBlockSelector};
use twophase::quad::QuadOptions;
use twophase::DerivedParams;

fn main() -> twophase::Result<()> {
    let dp = DerivedParams::canonical();
    let grid = FrequencyGrid::new(96, 24.0)?;
    let (t, sigma) = (4.0, 1.0);
    let syn = synthesize(&dp, grid, t, sigma, GreenBlockSelector { row: Block::Rho, col: Block::Rho });
    let field = &syn.fields[0];
    println!("{}: integral {:.6}, max |G| {:.4e}, imaginary residual {:.1e}", field.tag, field.integral(), field.max_abs(), syn.imag_residual);
    for w in &syn.warnings {
        println!("warning: {w}");
    }
    let h = grid.spacing();
    let radii: Vec<f64> = (1..=6).map(|k| 6.0 * k as f64 * h).collect();
    let opts = QuadOptions::with_tol(1e-11, 1e-8);
    let reference = periodize_axis(grid, &radii, |r| radial_oracle(&dp, (0, 0), r, t, sigma, opts))?;
    let c = grid.n / 2;
    println!("{:>6} {:>14} {:>14}", "r", "synthesized", "quadrature");
    for (r, q) in radii.iter().zip(&reference) {
        let v = field.at(c + (r / h).round() as usize, c, c);
        println!("{r:>6.2} {v:>14.6e} {q:>14.6e}");
    }
    Ok(())
}

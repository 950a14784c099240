//! Runs the nonlinear solver from small localized data and prints the
//! fluctuation norms together with their fitted decay rates.

use twophase::evolve::{self, Amplitudes, InitialDataSpec, RunConfig, SolverOptions, COMPONENTS};
use twophase::green::FrequencyGrid;
use twophase::DerivedParams;

fn main() -> twophase::Result<()> {
    let dp = DerivedParams::canonical();
    let grid = FrequencyGrid::new(32, 16.0)?;
    let spec = InitialDataSpec {
        amplitudes: Amplitudes::Fixed([1.0, 1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 1.0]),
        ..InitialDataSpec::localized(1e-3, 2.2)
    };
    let initial = evolve::init_localized(&dp, &spec, grid)?;
    let config = RunConfig {
        t_end: 8.0,
        dt: 0.1,
        snapshots: (0..=8).map(f64::from).collect(),
        options: SolverOptions { nonlinear: true, ..SolverOptions::default() },
        keep_states: false,
    };
    let out = evolve::run(&dp, initial, &config)?;
    println!("{:>5} {:>11} {:>11} {:>11} {:>11}", "t", "rho", "m", "n", "w");
    for d in &out.diagnostics {
        println!("{:>5.1} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e}", d.t, d.l2[0], d.l2[1], d.l2[2], d.l2[3]);
    }
    for (b, name) in COMPONENTS.iter().enumerate() {
        let series: Vec<(f64, f64)> = out.diagnostics.iter().map(|d| (d.t, d.l2[b])).collect();
        println!("{name}: L2 slope on [2, 8] = {:.3}", evolve::decay_slope(&series, (2.0, 8.0))?);
    }
    if let Some(abort) = out.abort {
        println!("aborted: {abort}");
    }
    Ok(())
}

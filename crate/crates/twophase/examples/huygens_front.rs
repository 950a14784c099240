//! Follows the momentum response front outward and fits its speed and
//! amplitude decay.

use twophase::green::FrequencyGrid;
use twophase::waves::{amplitude_exponent, front_speed, momentum_response, radial_profile, FrontMethod};
use twophase::DerivedParams;

fn main() -> twophase::Result<()> {
    let dp = DerivedParams::canonical();
    let grid = FrequencyGrid::new(160, 80.0)?;
    let sigma = 2.0;
    let times = [8.0, 14.0, 22.0, 32.0];
    let profiles: Vec<_> = times.iter().map(|&t| radial_profile(&momentum_response(&dp, grid, t, sigma))).collect();
    let fit = front_speed(&profiles, dp.c, 2.0, FrontMethod::Potential)?;
    for snap in &fit.snapshots {
        println!("t = {:>5.1}  front at r = {:>7.3}  amplitude {:.4e}", snap.t, snap.radius, snap.amplitude);
    }
    let amps: Vec<f64> = fit.snapshots.iter().map(|s| s.amplitude).collect();
    println!("front speed {:.4} (sound speed {:.4}), residual {:.2e}", fit.c_est, dp.c, fit.residual);
    println!("amplitude exponent {:.3}", amplitude_exponent(&times, &amps)?);
    Ok(())
}

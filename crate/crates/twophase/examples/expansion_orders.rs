//! Fits the remainder order of every catalogued eigenvalue expansion.

use twophase::asymptotics::{catalog, default_sequence, remainder_order_check};
use twophase::DerivedParams;

fn main() -> twophase::Result<()> {
    let dp = DerivedParams::canonical();
    println!("{:<8} {:<5} {:<5} {:>8} {:>8}  status", "branch", "reg", "part", "claimed", "fitted");
    for spec in catalog() {
        let check = remainder_order_check(&spec, &dp, &default_sequence(spec.regime))?;
        let fitted = if check.degenerate { "floor".into() } else { format!("{:.3}", check.fitted) };
        println!(
            "{:<8} {:<5} {:<5} {:>8} {:>8}  {}",
            spec.branch.name(),
            format!("{:?}", spec.regime),
            format!("{:?}", spec.part),
            check.claimed,
            fitted,
            if check.pass { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}

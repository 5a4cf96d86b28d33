//! Spherical photon orbits on Kerr across spins, for both branches.

use horizon_lab::geodesic::{find_trapped, OrbitSelector, OrbitSense};
use horizon_lab::geometry::SpacetimeChart;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>6} {:>6} {:>11} {:>11} {:>11} {:>10}", "a", "eta", "r_pro", "r_retro", "xi_pro", "|R|");
    for a in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
        let chart = SpacetimeChart::kerr(1.0, a)?;
        for eta in [0.0, 5.0] {
            let pro = find_trapped(&chart, None, OrbitSelector { sense: OrbitSense::Prograde, eta })?;
            let retro = find_trapped(&chart, None, OrbitSelector { sense: OrbitSense::Retrograde, eta })?;
            println!(
                "{a:>6} {eta:>6} {:>11.6} {:>11.6} {:>11.6} {:>10.2e}",
                pro.r,
                retro.r,
                pro.xi(),
                pro.residual.max(retro.residual)
            );
        }
    }
    Ok(())
}

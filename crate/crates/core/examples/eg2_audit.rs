//! Compares the change of `e_X` along a geodesic with the integrated
//! deformation contraction, for a non-Killing generator, and shows the
//! second-order shrinkage of the quadrature residual.

use std::f64::consts::FRAC_PI_2;

use horizon_lab::geodesic::{eg2_audit, integrate_null, make_null_initial, IntegratorConfig};
use horizon_lab::geometry::{GeneratorField, SpacetimeChart};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chart = SpacetimeChart::schwarzschild(1.0)?;
    let gen = GeneratorField::photon_sphere(1.0);
    let start = make_null_initial(&chart, [0.0, 12.0, FRAC_PI_2, 0.0], [-1.0, 0.0, 0.05])?;
    let mut last = None;
    for h in [0.04, 0.02, 0.01, 0.005] {
        let cfg = IntegratorConfig { sample_spacing: Some(h), ..Default::default() };
        let traj = integrate_null(&start, &chart, 40.0, &cfg)?;
        let a = eg2_audit(&traj, &gen)?;
        let ratio = last.map_or(String::new(), |r: f64| format!("ratio {:.3}", r / a.residual));
        println!("h = {h:<6} delta = {:+.10}  integral = {:+.10}  residual = {:.3e}  {ratio}", a.delta, a.integral, a.residual);
        last = Some(a.residual);
    }
    Ok(())
}

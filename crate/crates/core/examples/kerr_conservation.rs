//! Integrates a batch of random null geodesics on Kerr and reports how well
//! `e_T`, `e_Φ` and the Carter invariant are conserved.

use horizon_lab::geodesic::{
    generator_energy, integrate_null, quadratic_invariant, random_null_states, IntegratorConfig, RandomNullSpec,
};
use horizon_lab::geometry::{GeneratorField, KillingTensor, SpacetimeChart};

fn drift(v: &[f64], scale: f64) -> f64 {
    v.iter().map(|x| (x - v[0]).abs()).fold(0.0, f64::max) / scale
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chart = SpacetimeChart::kerr(1.0, 0.7)?;
    let k = KillingTensor::for_chart(&chart);
    let states = random_null_states(&chart, &RandomNullSpec::new(8, 42, 5.0, 25.0))?;
    println!("{:>3} {:>9} {:>12} {:>12} {:>12} {:>12}", "#", "span", "e_T", "drift e_T", "drift e_Phi", "drift K");
    for (i, s) in states.iter().enumerate() {
        let traj = integrate_null(s, &chart, 150.0, &IntegratorConfig::default())?;
        let et = generator_energy(&traj, &GeneratorField::Time)?;
        let ep = generator_energy(&traj, &GeneratorField::Rotation)?;
        let kk = quadratic_invariant(&traj, &k)?;
        let (et, ep, kk) = (et.column("e").unwrap(), ep.column("e").unwrap(), kk.column("K").unwrap());
        println!(
            "{i:>3} {:>9.2} {:>12.6} {:>12.3e} {:>12.3e} {:>12.3e}",
            traj.span(),
            et[0],
            drift(et, et[0].abs()),
            drift(ep, ep[0].abs().max(et[0].abs())),
            drift(kk, kk[0].abs().max(et[0] * et[0])),
        );
    }
    Ok(())
}

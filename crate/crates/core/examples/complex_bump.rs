//! A small imaginary bump at the photon sphere: energy is no longer
//! conserved, but it changes exactly by the flux through the bump.

use horizon_lab::modewave::{evolve, BoundaryRule, Grid, LedgerOptions, ModeState, Motion, PotentialSpec, WavePacket};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let packet = WavePacket::new(-40.0, 5.0, 1.0, Motion::Outgoing);
    for eps in [0.0, 0.01, 0.02, 0.04] {
        let spec = PotentialSpec::real(0, 2, 1.0).with_bump(eps, 1.0);
        let grid = Grid::symmetric(200.0, 0.05)?;
        let mut s = ModeState::new(spec, grid, BoundaryRule::Outgoing, 0.9, &[packet])?;
        let n = s.steps_to(100.0);
        let l = evolve(&mut s, n, &LedgerOptions::default())?;
        let e = l.column("E").unwrap();
        let sup = e.iter().copied().fold(f64::MIN, f64::max);
        let res = l.column("balance_residual").unwrap().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let c = if eps > 0.0 { (sup / e[0] - 1.0) / eps } else { 0.0 };
        println!(
            "eps = {eps:<5} int F = {:+.6e}  sup E / E0 = {:.8}  C = {c:.4}  balance residual = {res:.2e}",
            l.column("int_F").unwrap().last().unwrap(),
            sup / e[0]
        );
    }
    Ok(())
}

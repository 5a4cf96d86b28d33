//! Multiplier current for the photon-sphere profile: the identity residual
//! at three resolutions and the signed parts of the bulk term.

use horizon_lab::modewave::{
    evolve, BoundaryRule, Grid, LedgerOptions, ModeState, Motion, MultiplierProfile, PotentialSpec, WavePacket,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let packet = WavePacket::new(60.0, 8.0, 0.5, Motion::Ingoing);
    let opts = LedgerOptions { stride: 50, multiplier: Some(MultiplierProfile::PhotonSphere), ..Default::default() };
    let mut prev: Option<f64> = None;
    for h in [0.1, 0.05, 0.025] {
        let grid = Grid::symmetric(300.0, h)?;
        let mut s = ModeState::new(PotentialSpec::real(0, 2, 1.0), grid, BoundaryRule::Outgoing, 0.9, &[packet])?;
        let n = s.steps_to(150.0);
        let l = evolve(&mut s, n, &opts)?;
        let res = l.column("morawetz_residual").unwrap().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let e0 = l.column("E").unwrap()[0];
        let last = |c: &str| *l.column(c).unwrap().last().unwrap();
        print!("h = {h:<6} sup|residual| = {res:.3e}");
        if let Some(p) = prev {
            print!("  ratio {:.3}", p / res);
        }
        println!(
            "\n    int B = {:.6}  (gradient part {:.6}, potential part {:.6}), int B / E0 = {:.4}",
            last("int_B"),
            last("int_B_pos"),
            last("int_B") - last("int_B_pos"),
            last("int_B_pos") / e0
        );
        prev = Some(res);
    }
    Ok(())
}

//! Evolves one Regge-Wheeler mode and prints the energy ledger at a few
//! times, including what has left through the grid ends.

use horizon_lab::modewave::{evolve, BoundaryRule, Grid, LedgerOptions, ModeState, Motion, PotentialSpec, WavePacket};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let packet = WavePacket::new(30.0, 4.0, 0.8, Motion::Ingoing);
    let grid = Grid::symmetric(150.0, 0.05)?;
    let mut state = ModeState::new(PotentialSpec::real(2, 2, 1.0), grid, BoundaryRule::Outgoing, 0.9, &[packet])?;
    let n = state.steps_to(250.0);
    let ledger = evolve(&mut state, n, &LedgerOptions { stride: 500, ..Default::default() })?;
    let (t, e, out, res) = (
        ledger.column("time").unwrap(),
        ledger.column("E").unwrap(),
        ledger.column("int_bflux_E").unwrap(),
        ledger.column("balance_residual").unwrap(),
    );
    println!("{:>8} {:>14} {:>14} {:>12}", "t", "E", "radiated", "residual");
    for i in 0..t.len() {
        println!("{:>8.2} {:>14.10} {:>14.10} {:>12.3e}", t[i], e[i], -out[i], res[i]);
    }
    Ok(())
}

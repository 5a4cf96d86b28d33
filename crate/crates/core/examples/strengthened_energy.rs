//! Order-n energies `Σ (l(l+1))ⁿ E_l` over a collection of modes evolved in
//! parallel.

use horizon_lab::modewave::{
    evolve_collection, order_n_series, BoundaryRule, Grid, LedgerOptions, ModeState, Motion, PotentialSpec,
    WavePacket,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let packet = WavePacket::new(60.0, 8.0, 0.5, Motion::Ingoing);
    let grid = Grid::symmetric(280.0, 0.05)?;
    let mut modes: Vec<ModeState> = (1..=4)
        .map(|l| ModeState::new(PotentialSpec::real(0, l, 1.0), grid, BoundaryRule::Outgoing, 0.9, &[packet]))
        .collect::<Result<_, _>>()?;
    let n = modes[0].steps_to(180.0);
    let ledgers = evolve_collection(&mut modes, n, &LedgerOptions { stride: 200, ..Default::default() })?;
    let refs: Vec<(u32, _)> = (1..=4).zip(ledgers.iter()).collect();
    for order in 0..=2 {
        let series = order_n_series(&refs, order)?;
        let drift = series.iter().map(|v| (v - series[0]).abs()).fold(0.0, f64::max) / series[0];
        println!("n = {order}: E(0) = {:.6}  E(T) = {:.6}  relative drift = {drift:.3e}", series[0], series.last().unwrap());
    }
    Ok(())
}

//! Mode equations `ψ_tt = ψ_{r*r*} - V ψ` on a uniform tortoise grid.
//!
//! Each spherical-harmonic mode of a field on Schwarzschild reduces to this
//! 1+1 equation. The module evolves it with a leapfrog scheme and keeps
//! ledgers of the energy, a multiplier (Morawetz) current and its bulk, the
//! flux through an imaginary part of the potential, and windowed energies.

mod evolve;
mod functionals;
mod multiplier;
mod potential;
mod state;
mod tortoise;

pub use evolve::{evolve, evolve_collection, LedgerOptions};
pub use functionals::{
    angular_weight, boundary_flux, energy, im_flux, local_energy, morawetz, order_n_energy, order_n_series,
    weighted_energy, MorawetzParts,
};
pub use multiplier::MultiplierProfile;
pub use potential::{effective_potential, PotentialSpec};
pub use state::{BoundaryRule, Grid, ModeState, Motion, WavePacket, DEFAULT_COURANT};
pub use tortoise::{r_of_rstar, radius_and_lapse, tortoise};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum WaveError {
    #[error("invalid mode specification: {0}")]
    InvalidSpec(String),
    #[error("r = {r} is not outside r = 2M for M = {mass}")]
    OutOfRange { r: f64, mass: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("Courant number {courant} outside (0, 1]")]
    CflViolation { courant: f64 },
    #[error("non-finite field at t = {time}, node {index}")]
    NonFiniteField { time: f64, index: usize, snapshot: Box<ModeState> },
    #[error("multiplier profile undefined: {0}")]
    ProfileUndefined(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("window [{lo}, {hi}] not inside grid [{grid_lo}, {grid_hi}]")]
    WindowOutsideGrid { lo: f64, hi: f64, grid_lo: f64, grid_hi: f64 },
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn flat_line(h: f64) -> ModeState {
        // M = 0, l = 0 on a grid far from r = 0 is the free 1+1 wave equation
        let grid = Grid::with_spacing(20.0, 60.0, h).unwrap();
        let p = WavePacket::new(40.0, std::f64::consts::FRAC_1_SQRT_2, 0.0, Motion::Static);
        ModeState::new(PotentialSpec::real(0, 0, 0.0), grid, BoundaryRule::Outgoing, 0.5, &[p]).unwrap()
    }

    #[test]
    fn dalembert_split() {
        let mut errs = vec![];
        for h in [0.04, 0.02] {
            let mut s = flat_line(h);
            let n = s.steps_to(5.0);
            evolve(&mut s, n, &LedgerOptions::default()).unwrap();
            assert!((s.time() - 5.0).abs() < 1e-12);
            let mut err = 0.0_f64;
            for (i, x) in s.grid().nodes().enumerate() {
                let exact = 0.5 * ((-(x - 45.0_f64).powi(2)).exp() + (-(x - 35.0_f64).powi(2)).exp());
                err = err.max((s.psi()[i].re - exact).abs());
            }
            errs.push(err);
        }
        assert!(errs[0] < 5e-3, "{errs:?}");
        let ratio = errs[0] / errs[1];
        assert!(ratio > 3.5 && ratio < 4.5, "{errs:?}");
    }

    #[test]
    fn zero_field_has_zero_ledgers() {
        let grid = Grid::symmetric(30.0, 0.1).unwrap();
        let mut s = ModeState::new(PotentialSpec::real(0, 2, 1.0).with_bump(0.01, 1.0), grid, BoundaryRule::Outgoing, 0.9, &[]).unwrap();
        let opts = LedgerOptions {
            multiplier: Some(MultiplierProfile::PhotonSphere),
            window: Some((-20.0, 20.0)),
            ..Default::default()
        };
        let l = evolve(&mut s, 20, &opts).unwrap();
        for c in &l.columns {
            if c.name != "time" {
                assert!(c.values.iter().all(|&v| v == 0.0), "{}", c.name);
            }
        }
    }

    #[test]
    fn full_window_equals_energy() {
        let grid = Grid::symmetric(30.0, 0.1).unwrap();
        let p = WavePacket::new(3.0, 2.0, 0.7, Motion::Ingoing);
        let s = ModeState::new(PotentialSpec::real(1, 2, 1.0), grid, BoundaryRule::Outgoing, 0.9, &[p]).unwrap();
        let e = energy(&s);
        assert!((local_energy(&s, (-30.0, 30.0)).unwrap() - e).abs() < 1e-14 * e);
        assert!(local_energy(&s, (-40.0, 0.0)).is_err());
        assert!(local_energy(&s, (-5.0, 5.0)).unwrap() < e);
    }

    #[test]
    fn linearity() {
        let grid = Grid::symmetric(40.0, 0.1).unwrap();
        let spec = PotentialSpec::real(0, 2, 1.0).with_bump(0.05, 1.0);
        let a = ModeState::new(spec, grid, BoundaryRule::Outgoing, 0.9, &[WavePacket::new(5.0, 2.0, 0.3, Motion::Ingoing)]).unwrap();
        let b = ModeState::new(spec, grid, BoundaryRule::Outgoing, 0.9, &[WavePacket::new(-8.0, 3.0, -0.2, Motion::Static)]).unwrap();
        let (ca, cb) = (Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.25));
        let mut sum = a.combine(ca, &b, cb).unwrap();
        let (mut a, mut b) = (a, b);
        let opts = LedgerOptions { stride: 1000, ..Default::default() };
        for s in [&mut a, &mut b, &mut sum] {
            evolve(s, 300, &opts).unwrap();
        }
        let expect = a.combine(ca, &b, cb).unwrap();
        let scale = expect.psi().iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        for (x, y) in sum.psi().iter().zip(expect.psi()) {
            assert!((x - y).norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn determinism() {
        let run = || {
            let grid = Grid::symmetric(40.0, 0.1).unwrap();
            let mut s = ModeState::new(PotentialSpec::real(0, 2, 1.0), grid, BoundaryRule::Outgoing, 0.9, &[WavePacket::new(0.0, 2.0, 0.0, Motion::Static)]).unwrap();
            evolve(&mut s, 200, &LedgerOptions::default()).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn real_data_has_zero_initial_flux() {
        let grid = Grid::symmetric(30.0, 0.1).unwrap();
        let s = ModeState::new(PotentialSpec::real(0, 2, 1.0).with_bump(0.01, 1.0), grid, BoundaryRule::Outgoing, 0.9, &[WavePacket::new(1.0, 2.0, 0.0, Motion::Static)]).unwrap();
        assert_eq!(im_flux(&s), 0.0);
    }

    #[test]
    fn translation_multiplier_in_flat_space() {
        let mut s = flat_line(0.05);
        let opts = LedgerOptions { multiplier: Some(MultiplierProfile::Constant { value: 1.0 }), stride: 1, ..Default::default() };
        let l = evolve(&mut s, 100, &opts).unwrap();
        assert!(l.column("B").unwrap().iter().all(|&b| b == 0.0));
        assert!(l.drift("I", 1.0).unwrap() < 1e-12);
    }

    #[test]
    fn order_n_weights() {
        let grid = Grid::symmetric(30.0, 0.1).unwrap();
        let p = [WavePacket::new(0.0, 2.0, 0.0, Motion::Static)];
        let modes: Vec<ModeState> = (1..=2)
            .map(|l| ModeState::new(PotentialSpec::real(0, l, 1.0), grid, BoundaryRule::Outgoing, 0.9, &p).unwrap())
            .collect();
        let e: Vec<f64> = modes.iter().map(energy).collect();
        assert_eq!(order_n_energy(&modes[..1], 0).unwrap(), e[0]);
        let o1 = order_n_energy(&modes, 1).unwrap();
        assert!((o1 - (2.0 * e[0] + 6.0 * e[1])).abs() < 1e-14 * o1);
        let other = ModeState::new(PotentialSpec::real(0, 3, 1.0), Grid::symmetric(31.0, 0.1).unwrap(), BoundaryRule::Outgoing, 0.9, &p).unwrap();
        assert!(matches!(order_n_energy(&[modes[0].clone(), other], 1), Err(WaveError::GridMismatch(_))));
    }

    #[test]
    fn reflecting_wall_keeps_energy_in_flat_space() {
        let grid = Grid::with_spacing(0.5, 200.0, 0.05).unwrap();
        let p = WavePacket::new(20.0, 2.0, 0.0, Motion::Ingoing);
        let mut s = ModeState::new(PotentialSpec::real(0, 1, 0.0), grid, BoundaryRule::ReflectingInner, 0.9, &[p]).unwrap();
        let n = s.steps_to(60.0);
        let l = evolve(&mut s, n, &LedgerOptions::default()).unwrap();
        assert!(l.drift("E", energy(&s).max(1e-300)).unwrap() < 1e-3);
        // reflected and heading out again
        let peak = s.psi().iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap().0;
        assert!(s.grid().x(peak) > 20.0);
    }
}

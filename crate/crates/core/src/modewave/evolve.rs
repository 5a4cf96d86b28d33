use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functionals::{local_energy, measure, ProfileArrays, Snapshot};
use super::multiplier::MultiplierProfile;
use super::state::{BoundaryRule, ModeState};
use super::WaveError;
use crate::ledger::Ledger;

/// What [`evolve`] records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LedgerOptions {
    /// A row is written every `stride` steps, and always after the last one.
    pub stride: usize,
    pub multiplier: Option<MultiplierProfile>,
    /// Window for the `local_E` column.
    pub window: Option<(f64, f64)>,
    /// Adds an `E_weighted` column with the `H^{-1/2}` weight.
    pub weighted: bool,
}

impl Default for LedgerOptions {
    fn default() -> Self {
        LedgerOptions { stride: 10, multiplier: None, window: None, weighted: false }
    }
}

struct Running {
    last: Snapshot,
    int_bflux: f64,
    int_f: f64,
    int_b: f64,
    int_b_grad: f64,
    int_j: f64,
    int_phi: f64,
}

impl Running {
    fn advance(&mut self, next: Snapshot, dt: f64) {
        let a = &self.last;
        self.int_bflux += 0.5 * dt * (a.boundary_flux + next.boundary_flux);
        self.int_f += 0.5 * dt * (a.im_flux + next.im_flux);
        if let (Some(p), Some(q)) = (a.morawetz, next.morawetz) {
            self.int_b += 0.5 * dt * (p.bulk() + q.bulk());
            self.int_b_grad += 0.5 * dt * (p.bulk_gradient + q.bulk_gradient);
            self.int_j += 0.5 * dt * (p.source + q.source);
            self.int_phi += 0.5 * dt * (p.boundary + q.boundary);
        }
        self.last = next;
    }
}

fn ledger_for(state: &ModeState, opts: &LedgerOptions) -> Ledger {
    let s = &state.spec;
    let mut l = Ledger::new(format!("mode_s{}_l{}_m{}", s.spin, s.l, s.m))
        .meta("spin", s.spin)
        .meta("l", s.l)
        .meta("m", s.m)
        .meta("mass", s.mass)
        .meta("epsilon", s.epsilon)
        .meta("bump_width", s.width)
        .meta("spacing", state.grid.spacing())
        .meta("time_step", state.time_step())
        .meta("nodes", state.grid.n)
        .meta("boundary", format!("{:?}", state.boundary))
        .meta("flux_sign", -1)
        .with_column("time", "M")
        .with_column("E", "1")
        .with_column("int_bflux_E", "1")
        .with_column("F", "1/M")
        .with_column("int_F", "1")
        .with_column("balance_residual", "1");
    if opts.window.is_some() {
        l = l.with_column("local_E", "1");
    }
    if opts.weighted {
        l = l.with_column("E_weighted", "1");
    }
    if opts.multiplier.is_some() {
        for c in ["I", "B", "B_pos", "B_signed", "J", "int_B", "int_B_pos", "int_J", "int_bflux_I", "morawetz_residual"] {
            l = l.with_column(c, "1");
        }
    }
    l
}

fn push_row(
    ledger: &mut Ledger,
    state: &ModeState,
    opts: &LedgerOptions,
    run: &Running,
    first: &Snapshot,
) -> Result<(), WaveError> {
    let s = &run.last;
    let mut row = vec![
        state.time,
        s.energy,
        run.int_bflux,
        s.im_flux,
        run.int_f,
        s.energy - first.energy + run.int_f - run.int_bflux,
    ];
    if let Some(w) = opts.window {
        row.push(local_energy(state, w)?);
    }
    if opts.weighted {
        row.push(s.weighted_energy);
    }
    if let (Some(m), Some(m0)) = (s.morawetz, first.morawetz) {
        row.extend([
            m.current,
            m.bulk(),
            m.bulk_gradient,
            m.bulk_potential,
            m.source,
            run.int_b,
            run.int_b_grad,
            run.int_j,
            run.int_phi,
            m.current - m0.current + run.int_b - run.int_j - run.int_phi,
        ]);
    }
    ledger.push_row(&row);
    Ok(())
}

/// Advances `state` by `n_steps` leapfrog steps and returns the ledger.
///
/// Each step is the kick-drift-kick form of the staggered leapfrog for
/// `ψ_tt = ψ'' - Vψ` with second-order central differences. The boundary
/// nodes follow the first-order upwind Sommerfeld condition (or stay at
/// zero at a reflecting wall), and `π` there is the matching one-step
/// difference quotient.
///
/// Time integrals in the ledger (`int_*`) use the trapezoid rule over every
/// step, not only over recorded rows. `balance_residual` is
/// `E - E₀ + ∫F - ∫boundary flux`, and `morawetz_residual` is
/// `I - I₀ + ∫B - ∫J - ∫[Φ]`.
pub fn evolve(state: &mut ModeState, n_steps: usize, opts: &LedgerOptions) -> Result<Ledger, WaveError> {
    if n_steps == 0 {
        return Err(WaveError::InvalidSpec("n_steps must be at least 1".into()));
    }
    if opts.stride == 0 {
        return Err(WaveError::InvalidSpec("ledger stride must be at least 1".into()));
    }
    if !(state.courant > 0.0 && state.courant <= 1.0) {
        return Err(WaveError::CflViolation { courant: state.courant });
    }
    if let Some(w) = opts.window {
        local_energy(state, w)?;
    }
    let profile = match &opts.multiplier {
        Some(p) => Some(ProfileArrays::new(state, p)?),
        None => None,
    };
    let dt = state.time_step();
    let first = measure(state, profile.as_ref(), opts.weighted);
    let mut run = Running { last: first, int_bflux: 0.0, int_f: 0.0, int_b: 0.0, int_b_grad: 0.0, int_j: 0.0, int_phi: 0.0 };
    let mut ledger = ledger_for(state, opts);
    push_row(&mut ledger, state, opts, &run, &first)?;

    let n = state.grid.n;
    let ratio = dt / state.grid.spacing();
    let mut next = vec![Complex64::new(0.0, 0.0); n];
    let t0 = state.time;
    let s0 = state.steps;
    for k in 1..=n_steps {
        let old_left = state.psi[0];
        let old_right = state.psi[n - 1];
        for i in 0..n {
            state.pi[i] += state.acc[i] * (0.5 * dt);
            next[i] = state.psi[i] + state.pi[i] * dt;
        }
        next[n - 1] = old_right - (old_right - state.psi[n - 2]) * ratio;
        next[0] = match state.boundary {
            BoundaryRule::Outgoing => old_left + (state.psi[1] - old_left) * ratio,
            BoundaryRule::ReflectingInner => Complex64::new(0.0, 0.0),
        };
        std::mem::swap(&mut state.psi, &mut next);
        let mut acc = std::mem::take(&mut state.acc);
        state.acceleration(&state.psi, &mut acc);
        state.acc = acc;
        for i in 1..n - 1 {
            state.pi[i] += state.acc[i] * (0.5 * dt);
        }
        state.pi[0] = (state.psi[0] - old_left) / dt;
        state.pi[n - 1] = (state.psi[n - 1] - old_right) / dt;
        state.steps = s0 + k as u64;
        state.time = t0 + k as f64 * dt;

        let snap = measure(state, profile.as_ref(), opts.weighted);
        if !snap.energy.is_finite() {
            let index = state
                .psi
                .iter()
                .chain(state.pi.iter())
                .position(|z| !(z.re.is_finite() && z.im.is_finite()))
                .map_or(0, |i| i % n);
            return Err(WaveError::NonFiniteField { time: state.time, index, snapshot: Box::new(state.clone()) });
        }
        run.advance(snap, dt);
        if k % opts.stride == 0 || k == n_steps {
            push_row(&mut ledger, state, opts, &run, &first)?;
        }
    }
    Ok(ledger)
}

/// Evolves independent modes concurrently; ledgers come back in input order.
pub fn evolve_collection(
    states: &mut [ModeState],
    n_steps: usize,
    opts: &LedgerOptions,
) -> Result<Vec<Ledger>, WaveError> {
    states.par_iter_mut().map(|s| evolve(s, n_steps, opts)).collect()
}

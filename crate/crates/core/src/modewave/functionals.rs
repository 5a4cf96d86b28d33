use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::multiplier::MultiplierProfile;
use super::state::ModeState;
use super::WaveError;
use crate::ledger::Ledger;

/// Pieces of the multiplier identity `dI/dt + B = J + [Φ]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MorawetzParts {
    /// `I = ∫ Re(π̄ (f ψ' + ½ f' ψ))`.
    pub current: f64,
    /// `∫ f' |ψ'|²`.
    pub bulk_gradient: f64,
    /// `-∫ (¼ f''' + ½ f V_R') |ψ|²`, signed.
    pub bulk_potential: f64,
    /// `J = -∫ V_I f Im(ψ̄ ψ')`, zero for real potentials.
    pub source: f64,
    /// `Φ(right) - Φ(left)` with
    /// `Φ = ½ f (|π|² + |ψ'|² - V_R |ψ|²) + ½ f' Re(ψ̄ ψ') - ¼ f'' |ψ|²`.
    pub boundary: f64,
}

impl MorawetzParts {
    pub fn bulk(&self) -> f64 {
        self.bulk_gradient + self.bulk_potential
    }
}

/// Profile values `[f, f', f'', f''']` at every node.
pub(crate) struct ProfileArrays(Vec<[f64; 4]>);

impl ProfileArrays {
    pub(crate) fn new(state: &ModeState, profile: &MultiplierProfile) -> Result<Self, WaveError> {
        profile.check(state.spec.mass)?;
        let g = &state.grid;
        Ok(ProfileArrays(
            (0..g.n).map(|i| profile.eval(state.spec.mass, state.r[i], state.lapse[i], g.x(i))).collect(),
        ))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Snapshot {
    pub energy: f64,
    pub weighted_energy: f64,
    pub boundary_flux: f64,
    pub im_flux: f64,
    pub morawetz: Option<MorawetzParts>,
}

/// Second-order `ψ'`: central inside, one-sided at the ends.
fn derivative(psi: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = psi.len();
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let inv = 0.5 / h;
    for i in 1..n - 1 {
        d[i] = (psi[i + 1] - psi[i - 1]) * inv;
    }
    d[0] = (psi[0] * -3.0 + psi[1] * 4.0 - psi[2]) * inv;
    d[n - 1] = (psi[n - 1] * 3.0 - psi[n - 2] * 4.0 + psi[n - 3]) * inv;
    d
}

fn trap_weight(i: usize, n: usize, h: f64) -> f64 {
    if i == 0 || i + 1 == n {
        0.5 * h
    } else {
        h
    }
}

/// `½ Σ_cells |Δψ|²/h` over cells `[a, b)`.
fn gradient_energy(psi: &[Complex64], h: f64, a: usize, b: usize) -> f64 {
    let mut s = 0.0;
    for i in a..b {
        s += (psi[i + 1] - psi[i]).norm_sqr();
    }
    0.5 * s / h
}

pub(crate) fn measure(state: &ModeState, profile: Option<&ProfileArrays>, weighted: bool) -> Snapshot {
    let n = state.grid.n;
    let h = state.grid.spacing();
    let (psi, pi) = (&state.psi, &state.pi);
    let dpsi = derivative(psi, h);
    let mut node = 0.0;
    let mut wsum = 0.0;
    let mut flux = 0.0;
    let mut mp = MorawetzParts::default();
    for i in 0..n {
        let w = trap_weight(i, n, h);
        let (p, q, d) = (psi[i], pi[i], dpsi[i]);
        let p2 = p.norm_sqr();
        node += w * (q.norm_sqr() + state.v_re[i] * p2);
        if state.v_im[i] != 0.0 {
            flux += w * state.v_im[i] * (p.conj() * q).im;
        }
        if weighted {
            wsum += w * (q.norm_sqr() + d.norm_sqr() + state.v_re[i] * p2) / state.lapse[i].sqrt();
        }
        if let Some(pa) = profile {
            let [f, f1, _, f3] = pa.0[i];
            mp.current += w * (q.conj() * (d * f + p * (0.5 * f1))).re;
            mp.bulk_gradient += w * f1 * d.norm_sqr();
            mp.bulk_potential -= w * (0.25 * f3 + 0.5 * f * state.v_re_prime[i]) * p2;
            if state.v_im[i] != 0.0 {
                mp.source -= w * state.v_im[i] * f * (p.conj() * d).im;
            }
        }
    }
    let ends = [0, n - 1];
    let end_flux = |i: usize| (pi[i].conj() * dpsi[i]).re;
    let mut snap = Snapshot {
        energy: 0.5 * node + gradient_energy(psi, h, 0, n - 1),
        weighted_energy: 0.5 * wsum,
        boundary_flux: end_flux(ends[1]) - end_flux(ends[0]),
        im_flux: flux,
        morawetz: None,
    };
    if let Some(pa) = profile {
        let phi = |i: usize| {
            let [f, f1, f2, _] = pa.0[i];
            let (p, q, d) = (psi[i], pi[i], dpsi[i]);
            0.5 * f * (q.norm_sqr() + d.norm_sqr() - state.v_re[i] * p.norm_sqr()) + 0.5 * f1 * (p.conj() * d).re
                - 0.25 * f2 * p.norm_sqr()
        };
        mp.boundary = phi(ends[1]) - phi(ends[0]);
        snap.morawetz = Some(mp);
    }
    snap
}

/// `E = ½ ∫ (|π|² + |ψ'|² + V_R |ψ|²) dr*`.
///
/// Node terms use the trapezoid rule and the gradient term uses cell
/// differences, which is the combination the time stepper conserves.
pub fn energy(state: &ModeState) -> f64 {
    measure(state, None, false).energy
}

/// Energy with the extra weight `H^{-1/2}` on the integrand.
pub fn weighted_energy(state: &ModeState) -> f64 {
    measure(state, None, true).weighted_energy
}

/// `[Re(π̄ ψ')]` between the grid ends, the rate at which energy crosses them.
pub fn boundary_flux(state: &ModeState) -> f64 {
    measure(state, None, false).boundary_flux
}

/// `F = ∫ V_I Im(ψ̄ π) dr*`. The energy obeys `dE/dt = -F + boundary flux`.
pub fn im_flux(state: &ModeState) -> f64 {
    measure(state, None, false).im_flux
}

pub fn morawetz(state: &ModeState, profile: &MultiplierProfile) -> Result<MorawetzParts, WaveError> {
    let pa = ProfileArrays::new(state, profile)?;
    Ok(measure(state, Some(&pa), false).morawetz.unwrap_or_default())
}

/// The energy integrand restricted to `r* ∈ [w₁, w₂]`: nodes inside the
/// window by the trapezoid rule and cells with both ends inside.
pub fn local_energy(state: &ModeState, window: (f64, f64)) -> Result<f64, WaveError> {
    let g = &state.grid;
    let (w1, w2) = window;
    if !(w1 >= g.lo && w2 <= g.hi && w1 <= w2) {
        return Err(WaveError::WindowOutsideGrid { lo: w1, hi: w2, grid_lo: g.lo, grid_hi: g.hi });
    }
    let h = g.spacing();
    let eps = 1e-9;
    let a = (((w1 - g.lo) / h) - eps).ceil().max(0.0) as usize;
    let b = ((((w2 - g.lo) / h) + eps).floor() as usize).min(g.n - 1);
    if a >= b {
        return Ok(0.0);
    }
    let mut node = 0.0;
    for i in a..=b {
        let w = if i == a || i == b { 0.5 * h } else { h };
        node += w * (state.pi[i].norm_sqr() + state.v_re[i] * state.psi[i].norm_sqr());
    }
    Ok(0.5 * node + gradient_energy(&state.psi, h, a, b))
}

/// `Σ_l (l(l+1))ⁿ E_l` over a set of modes sharing grid, time and background mass.
pub fn order_n_energy(modes: &[ModeState], n: u32) -> Result<f64, WaveError> {
    let Some(first) = modes.first() else {
        return Ok(0.0);
    };
    let mut total = 0.0;
    for m in modes {
        if m.grid != first.grid || m.time != first.time || m.spec.mass != first.spec.mass {
            return Err(WaveError::GridMismatch(format!(
                "mode l={} differs from l={} in grid, time or mass",
                m.spec.l, first.spec.l
            )));
        }
        total += angular_weight(m.spec.l, n) * energy(m);
    }
    Ok(total)
}

/// `(l(l+1))ⁿ`.
pub fn angular_weight(l: u32, n: u32) -> f64 {
    ((l * (l + 1)) as f64).powi(n as i32)
}

/// Order-`n` energy series from per-mode ledgers that share a `time` column.
pub fn order_n_series(modes: &[(u32, &Ledger)], n: u32) -> Result<Vec<f64>, WaveError> {
    let Some((_, first)) = modes.first() else {
        return Ok(Vec::new());
    };
    let t0 = first.column("time").ok_or_else(|| WaveError::GridMismatch("ledger has no time column".into()))?;
    let mut out = vec![0.0; t0.len()];
    for (l, ledger) in modes {
        let (Some(t), Some(e)) = (ledger.column("time"), ledger.column("E")) else {
            return Err(WaveError::GridMismatch(format!("ledger for l={l} lacks time or E")));
        };
        if t != t0 {
            return Err(WaveError::GridMismatch(format!("ledger for l={l} is sampled at different times")));
        }
        let w = angular_weight(*l, n);
        for (o, v) in out.iter_mut().zip(e) {
            *o += w * v;
        }
    }
    Ok(out)
}

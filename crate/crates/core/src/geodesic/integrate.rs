use serde::{Deserialize, Serialize};

use super::{relative_norm, GeodesicError, NullGeodesicState};
use crate::geometry::{SpacetimeChart, R, THETA};

/// Step-control settings for [`integrate_null`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    /// Per-step relative tolerance.
    pub rtol: f64,
    /// Absolute floor added to the error scale of each component.
    pub atol: f64,
    /// Uniform output spacing in `λ`. `None` records every accepted step.
    pub sample_spacing: Option<f64>,
    pub initial_step: f64,
    pub max_step: f64,
    /// Error-control rejections below `min_step (1 + |λ|)` abort the run.
    pub min_step: f64,
    /// Steps that keep leaving the chart below this size end the run.
    pub boundary_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-12,
            sample_spacing: None,
            initial_step: 1e-2,
            max_step: f64::INFINITY,
            min_step: 1e-14,
            boundary_step: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    SpanReached,
    OutOfChart,
    StepUnderflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub state: NullGeodesicState,
    pub null_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub chart: SpacetimeChart,
    pub samples: Vec<TrajectorySample>,
    pub termination: Termination,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn lambdas(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.state.lambda)
    }

    pub fn max_null_residual(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, s| m.max(s.null_residual))
    }

    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory always holds its initial sample")
    }

    /// Affine length covered.
    pub fn span(&self) -> f64 {
        self.last().state.lambda - self.samples[0].state.lambda
    }
}

type Y = [f64; 8];

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

struct OutOfChart;

fn rhs(chart: &SpacetimeChart, y: &Y) -> Result<Y, OutOfChart> {
    let x = [y[0], y[1], y[2], y[3]];
    chart.check_point(&x).map_err(|_| OutOfChart)?;
    let v = [y[4], y[5], y[6], y[7]];
    let acc = chart.christoffel_unchecked(&x).acceleration(&v);
    Ok([v[0], v[1], v[2], v[3], acc[0], acc[1], acc[2], acc[3]])
}

/// One Dormand–Prince step. Returns the fifth-order solution, its
/// derivative (first-same-as-last) and the scaled error norm.
fn dp_step(
    chart: &SpacetimeChart,
    y: &Y,
    k1: &Y,
    h: f64,
    rtol: f64,
    atol: f64,
) -> Result<(Y, Y, f64), OutOfChart> {
    let mut k = [[0.0; 8]; 7];
    k[0] = *k1;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..8 {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = rhs(chart, &ys)?;
        let _ = C[s];
    }
    // stage 7 was evaluated at the fifth-order solution
    let mut ynew = *y;
    for (j, kj) in k.iter().enumerate().take(6) {
        for i in 0..8 {
            ynew[i] += h * A[6][j] * kj[i];
        }
    }
    let mut err = 0.0_f64;
    for i in 0..8 {
        let e: f64 = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
        let sc = atol + rtol * y[i].abs().max(ynew[i].abs());
        err = err.max((e / sc).abs());
    }
    Ok((ynew, k[6], err))
}

fn sample(chart: &SpacetimeChart, lambda: f64, y: &Y) -> TrajectorySample {
    let position = [y[0], y[1], y[2], y[3]];
    let velocity = [y[4], y[5], y[6], y[7]];
    let g = chart.metric_unchecked(&position);
    TrajectorySample {
        state: NullGeodesicState { position, velocity, lambda },
        null_residual: relative_norm(&g.0, &velocity),
    }
}

/// Integrates the geodesic equation `ẍ^α = -Γ^α_{βγ} ẋ^β ẋ^γ` over an affine
/// span with an embedded Dormand–Prince 5(4) pair.
///
/// The null constraint is monitored at each sample but never projected.
/// Leaving the chart ends the run with [`Termination::OutOfChart`]; an
/// error-control step underflow returns [`GeodesicError::StepUnderflow`]
/// carrying the partial trajectory.
pub fn integrate_null(
    state: &NullGeodesicState,
    chart: &SpacetimeChart,
    span: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, GeodesicError> {
    if !(span.is_finite() && span > 0.0) {
        return Err(GeodesicError::InvalidSpan(span));
    }
    if let Some(s) = cfg.sample_spacing {
        if !(s.is_finite() && s > 0.0) {
            return Err(GeodesicError::InvalidSpan(s));
        }
    }
    chart.check_point(&state.position)?;

    let mut y: Y = [0.0; 8];
    y[..4].copy_from_slice(&state.position);
    y[4..].copy_from_slice(&state.velocity);
    let start = state.lambda;
    let end = start + span;
    let mut lam = start;
    let mut traj = Trajectory {
        chart: *chart,
        samples: vec![sample(chart, lam, &y)],
        termination: Termination::SpanReached,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let mut k1 = rhs(chart, &y).map_err(|_| {
        GeodesicError::Geometry(crate::geometry::GeometryError::OutOfChart {
            r: y[R],
            theta: y[THETA],
            reason: "initial state",
        })
    })?;
    let mut next_index: u64 = 1;
    let out_at = |k: u64| -> f64 {
        match cfg.sample_spacing {
            Some(s) => (start + s * k as f64).min(end),
            None => end,
        }
    };
    let mut h = cfg.initial_step.min(span).min(cfg.max_step);
    let mut last_recorded = true;

    while lam < end {
        let target = out_at(next_index);
        let remaining = target - lam;
        let clamped = h >= remaining;
        let h_try = if clamped { remaining } else { h };
        match dp_step(chart, &y, &k1, h_try, cfg.rtol, cfg.atol) {
            Err(OutOfChart) => {
                traj.rejected_steps += 1;
                h = h_try * 0.25;
                if h < cfg.boundary_step * (1.0 + lam.abs()) {
                    traj.termination = Termination::OutOfChart;
                    break;
                }
            }
            Ok((ynew, knew, err)) => {
                if err <= 1.0 {
                    traj.accepted_steps += 1;
                    lam = if clamped { target } else { lam + h_try };
                    y = ynew;
                    k1 = knew;
                    last_recorded = false;
                    if cfg.sample_spacing.is_none() || clamped {
                        traj.samples.push(sample(chart, lam, &y));
                        last_recorded = true;
                        if clamped {
                            next_index += 1;
                        }
                    }
                    let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    let grown = (h_try * factor).min(cfg.max_step);
                    h = if clamped { h.max(grown) } else { grown };
                } else {
                    traj.rejected_steps += 1;
                    h = h_try * (0.9 * err.powf(-0.2)).max(0.2);
                    if h < cfg.min_step * (1.0 + lam.abs()) {
                        traj.termination = Termination::StepUnderflow;
                        if !last_recorded {
                            traj.samples.push(sample(chart, lam, &y));
                        }
                        return Err(GeodesicError::StepUnderflow { lambda: lam, partial: Box::new(traj) });
                    }
                }
            }
        }
    }
    if !last_recorded {
        traj.samples.push(sample(chart, lam, &y));
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::make_null_initial;
    use crate::geometry::{PHI, T};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn tableau_rows_sum_to_nodes() {
        for s in 0..7 {
            let sum: f64 = A[s].iter().sum();
            assert!((sum - C[s]).abs() < 1e-15, "row {s}");
        }
        let esum: f64 = E.iter().sum();
        assert!(esum.abs() < 1e-15);
    }

    #[test]
    fn minkowski_radial_line() {
        let chart = SpacetimeChart::minkowski();
        let s = make_null_initial(&chart, [0.0, 5.0, FRAC_PI_2, 0.0], [1.0, 0.0, 0.0]).unwrap();
        let cfg = IntegratorConfig { sample_spacing: Some(1.0), ..Default::default() };
        let traj = integrate_null(&s, &chart, 30.0, &cfg).unwrap();
        assert_eq!(traj.termination, Termination::SpanReached);
        assert_eq!(traj.samples.len(), 31);
        for smp in &traj.samples {
            let st = smp.state;
            assert!((st.position[R] - (5.0 + st.lambda)).abs() < 1e-12);
            assert!((st.position[T] - st.lambda).abs() < 1e-12);
        }
    }

    #[test]
    fn samples_strictly_increasing() {
        let chart = SpacetimeChart::kerr(1.0, 0.6).unwrap();
        let s = make_null_initial(&chart, [0.0, 8.0, 1.2, 0.0], [-0.4, 0.02, 0.05]).unwrap();
        for spacing in [None, Some(0.37)] {
            let cfg = IntegratorConfig { sample_spacing: spacing, ..Default::default() };
            let traj = integrate_null(&s, &chart, 50.0, &cfg).unwrap();
            let l: Vec<f64> = traj.lambdas().collect();
            assert!(l.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn plunge_terminates_at_floor() {
        let chart = SpacetimeChart::schwarzschild(1.0).unwrap();
        let s = make_null_initial(&chart, [0.0, 6.0, FRAC_PI_2, 0.0], [-1.0, 0.0, 0.0]).unwrap();
        let traj = integrate_null(&s, &chart, 100.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(traj.termination, Termination::OutOfChart);
        let last = traj.last().state;
        assert!(last.position[R] < 2.01 && last.position[R] > chart.r_min());
        // radial null ray: r decreases at unit rate in λ when E = 1
        assert!((last.lambda - (6.0 - last.position[R])).abs() < 1e-8);
    }

    #[test]
    fn photon_orbit_holds_radius() {
        let chart = SpacetimeChart::schwarzschild(1.0).unwrap();
        let s = make_null_initial(&chart, [0.0, 3.0, FRAC_PI_2, 0.0], [0.0, 0.0, 1.0 / 3.0]).unwrap();
        let cfg = IntegratorConfig { sample_spacing: Some(0.1), ..Default::default() };
        let traj = integrate_null(&s, &chart, 20.0, &cfg).unwrap();
        for smp in &traj.samples {
            assert!((smp.state.position[R] - 3.0).abs() < 1e-3);
        }
        assert!(traj.last().state.position[PHI] > 6.0);
    }

    #[test]
    fn invalid_span() {
        let chart = SpacetimeChart::minkowski();
        let s = make_null_initial(&chart, [0.0, 5.0, 1.0, 0.0], [1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            integrate_null(&s, &chart, -1.0, &IntegratorConfig::default()),
            Err(GeodesicError::InvalidSpan(_))
        ));
    }

    #[test]
    fn fifth_order_convergence_on_minkowski_bending() {
        // A non-radial straight line in spherical coordinates has a nontrivial
        // r(λ) = sqrt(b² + λ²); fixed-step errors must fall ~32× per halving.
        let chart = SpacetimeChart::minkowski();
        let s = make_null_initial(&chart, [0.0, 2.0, FRAC_PI_2, 0.0], [0.0, 0.0, 0.5]).unwrap();
        let exact = (4.0_f64 + 4.0).sqrt();
        let mut errs = vec![];
        for n in [40, 80, 160] {
            let h = 2.0 / n as f64;
            let mut y: Y = [0.0, 2.0, FRAC_PI_2, 0.0, s.velocity[0], 0.0, 0.0, 0.5];
            let mut k1 = rhs(&chart, &y).ok().unwrap();
            for _ in 0..n {
                let (yn, kn, _) = dp_step(&chart, &y, &k1, h, 1e-10, 1e-12).ok().unwrap();
                y = yn;
                k1 = kn;
            }
            errs.push((y[1] - exact).abs());
        }
        let r1 = errs[0] / errs[1];
        let r2 = errs[1] / errs[2];
        assert!(r1 > 24.0 && r2 > 24.0, "{errs:?}");
    }
}

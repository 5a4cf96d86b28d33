use serde::{Deserialize, Serialize};

use super::{GeodesicError, NullGeodesicState, Trajectory};
use crate::geometry::{
    deformation_unchecked, GeneratorField, GeometryError, KillingTensor, RadialProfile,
    SpacetimeChart, R, T,
};
use crate::ledger::Ledger;

fn base_ledger(name: String, traj: &Trajectory) -> Ledger {
    let mut l = Ledger::new(name)
        .meta("family", format!("{:?}", traj.chart.family()))
        .meta("mass", traj.chart.mass())
        .meta("spin", traj.chart.spin());
    l.set_column("lambda", "M", traj.lambdas().collect());
    l.set_column("t", "M", traj.samples.iter().map(|s| s.state.position[T]).collect());
    l
}

/// `e_X(λ) = -γ̇_α X^α` at every sample, lowered with the metric at that sample.
pub fn generator_energy(traj: &Trajectory, gen: &GeneratorField) -> Result<Ledger, GeodesicError> {
    gen.check_family(&traj.chart)?;
    let values = traj
        .samples
        .iter()
        .map(|s| energy_at(&traj.chart, gen, &s.state))
        .collect();
    let mut l = base_ledger(format!("e_{}", gen.name()), traj);
    l.set_column("e", "1", values);
    Ok(l)
}

fn energy_at(chart: &SpacetimeChart, gen: &GeneratorField, s: &NullGeodesicState) -> f64 {
    let g = chart.metric_unchecked(&s.position);
    let x = gen.components(s.position[R]).0;
    -g.contract(&s.velocity, &x)
}

/// `K_{αβ} γ̇^α γ̇^β` at every sample.
pub fn quadratic_invariant(traj: &Trajectory, k: &KillingTensor) -> Result<Ledger, GeodesicError> {
    let kc = k.chart();
    if kc.family() != traj.chart.family() || kc.mass() != traj.chart.mass() || kc.spin() != traj.chart.spin() {
        return Err(GeometryError::FamilyMismatch { generator: "K", family: traj.chart.family() }.into());
    }
    let values = traj
        .samples
        .iter()
        .map(|s| k.components_unchecked(&s.state.position).contract(&s.state.velocity, &s.state.velocity))
        .collect();
    let mut l = base_ledger("K".into(), traj);
    l.set_column("K", "M^2", values);
    Ok(l)
}

/// `γ̇_α γ̇_β · 2∇^{(α}X^{β)}` at a state.
///
/// With `e_X = -γ̇_α X^α` and the geodesic equation, the affine rate is
/// `de_X/dλ = -½ · eg2_kernel`.
pub fn eg2_kernel(
    chart: &SpacetimeChart,
    gen: &GeneratorField,
    s: &NullGeodesicState,
) -> Result<f64, GeodesicError> {
    gen.check_family(chart)?;
    chart.check_point(&s.position)?;
    let g = chart.metric_unchecked(&s.position);
    let low = g.apply(&s.velocity);
    Ok(2.0 * deformation_unchecked(gen, chart, &s.position).contract(&low, &low))
}

/// `de_X/dλ` by differentiating `-g_{αβ} γ̇^β X^α` along the flow,
/// with `γ̈` taken from the geodesic equation.
///
/// This never touches the deformation tensor, so it is an independent check
/// of [`eg2_kernel`].
pub fn energy_rate(
    chart: &SpacetimeChart,
    gen: &GeneratorField,
    s: &NullGeodesicState,
) -> Result<f64, GeodesicError> {
    gen.check_family(chart)?;
    chart.check_point(&s.position)?;
    let x = &s.position;
    let v = &s.velocity;
    let g = chart.metric_unchecked(x);
    let dg = chart.metric_derivatives_unchecked(x);
    let acc = chart.christoffel_unchecked(x).acceleration(v);
    let (xv, dxv) = gen.components(x[R]);
    let dxv_dl: [f64; 4] = dxv.map(|c| c * v[R]);
    let mut rate = 0.0;
    for (mu, dgm) in dg.iter().enumerate() {
        if v[mu] != 0.0 {
            rate += v[mu] * dgm.contract(v, &xv);
        }
    }
    rate += g.contract(&acc, &xv) + g.contract(v, &dxv_dl);
    Ok(-rate)
}

/// Result of comparing `Δe_X` with the integrated rate along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eg2Audit {
    pub initial: f64,
    pub final_value: f64,
    pub delta: f64,
    /// Trapezoid integral of `-½ · eg2_kernel` over `λ`.
    pub integral: f64,
    /// Trapezoid integral of `eg2_kernel` itself.
    pub kernel_integral: f64,
    pub residual: f64,
    pub samples: usize,
}

/// Compares `e_X(λ_end) - e_X(λ_0)` with the trapezoid-rule integral of the
/// deformation contraction over the recorded samples.
///
/// The trapezoid rule is second order, so halving a uniform sample spacing
/// should cut the residual by about four whenever `X` is not Killing.
pub fn eg2_audit(traj: &Trajectory, gen: &GeneratorField) -> Result<Eg2Audit, GeodesicError> {
    gen.check_family(&traj.chart)?;
    let n = traj.samples.len();
    if n < 2 {
        return Err(GeodesicError::TooFewSamples { needed: 2, have: n });
    }
    let chart = &traj.chart;
    let kernel: Vec<f64> = traj
        .samples
        .iter()
        .map(|s| {
            let g = chart.metric_unchecked(&s.state.position);
            let low = g.apply(&s.state.velocity);
            2.0 * deformation_unchecked(gen, chart, &s.state.position).contract(&low, &low)
        })
        .collect();
    let mut kernel_integral = 0.0;
    for i in 1..n {
        let h = traj.samples[i].state.lambda - traj.samples[i - 1].state.lambda;
        kernel_integral += 0.5 * h * (kernel[i] + kernel[i - 1]);
    }
    let initial = energy_at(chart, gen, &traj.samples[0].state);
    let final_value = energy_at(chart, gen, &traj.samples[n - 1].state);
    let delta = final_value - initial;
    let integral = -0.5 * kernel_integral;
    Ok(Eg2Audit {
        initial,
        final_value,
        delta,
        integral,
        kernel_integral,
        residual: (delta - integral).abs(),
        samples: n,
    })
}

/// Ledger of `f(r) γ̇^r` along a trajectory.
///
/// On Schwarzschild with `f = 1 - 3M/r` this is non-decreasing along every
/// null geodesic.
pub fn radial_momentum(traj: &Trajectory, profile: &RadialProfile) -> Ledger {
    let values = traj
        .samples
        .iter()
        .map(|s| profile.eval(s.state.position[R]).0 * s.state.velocity[R])
        .collect();
    let mut l = base_ledger("f_vr".into(), traj);
    l.set_column("f_vr", "1", values);
    l
}

//! Null geodesics: initial data, adaptive integration, generator energies,
//! quadratic invariants and trapping diagnostics.
//!
//! Geodesics are parameterized by an affine parameter `λ`. Energies
//! `e_X = -γ̇_α X^α` are recomputed from the metric at every sample, so their
//! conservation is a measured output rather than something built in.

mod energy;
mod integrate;
mod radial;
mod sampling;

pub use energy::{
    energy_rate, eg2_audit, eg2_kernel, generator_energy, quadratic_invariant, radial_momentum, Eg2Audit,
};
pub use integrate::{integrate_null, IntegratorConfig, Termination, Trajectory, TrajectorySample};
pub use radial::{
    find_trapped, OrbitSense, OrbitSelector, RadialPotential, RadialPotentialSpec, RadialRoot,
    TrappedOrbit,
};
pub use sampling::{random_null_states, RandomNullSpec};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, Point, SpacetimeChart, Vec4, PHI, R, T, THETA};

#[derive(Debug, Error)]
pub enum GeodesicError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("spatial direction {0:?} does not complete to a future-directed null vector")]
    DegenerateDirection([f64; 3]),
    #[error("step size underflow at lambda = {lambda}")]
    StepUnderflow { lambda: f64, partial: Box<Trajectory> },
    #[error("invalid span {0}; must be finite and > 0")]
    InvalidSpan(f64),
    #[error("trajectory needs at least {needed} samples, has {have}")]
    TooFewSamples { needed: usize, have: usize },
    #[error("invalid radial potential: {0}")]
    InvalidSpec(String),
    #[error("radial potential has no real roots outside the horizon")]
    NoExteriorRoots,
    #[error("no trapped orbit in ({lo}, {hi})")]
    NoTrappedOrbit { lo: f64, hi: f64 },
    #[error("{0}")]
    UnsupportedChart(String),
}

/// Position, tangent and affine parameter of a null geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullGeodesicState {
    pub position: Point,
    pub velocity: Vec4,
    pub lambda: f64,
}

impl NullGeodesicState {
    /// Same point, tangent scaled by `c` (an affine reparameterization).
    pub fn scaled(&self, c: f64) -> Self {
        let mut s = *self;
        s.velocity.iter_mut().for_each(|v| *v *= c);
        s
    }
}

/// `|g(v, v)|` divided by the sum of the absolute values of its terms.
pub fn null_residual(chart: &SpacetimeChart, x: &Point, v: &Vec4) -> Result<f64, GeometryError> {
    let g = chart.metric(x)?;
    Ok(relative_norm(&g.0, v))
}

pub(crate) fn relative_norm(g: &[[f64; 4]; 4], v: &Vec4) -> f64 {
    let mut sum = 0.0;
    let mut abs = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let t = g[i][j] * v[i] * v[j];
            sum += t;
            abs += t.abs();
        }
    }
    if abs == 0.0 {
        0.0
    } else {
        sum.abs() / abs
    }
}

/// Completes a spatial direction `(v^r, v^θ, v^φ)` to a future-directed null
/// tangent by solving `g(v, v) = 0` for `v^t > 0`.
///
/// The direction is taken as given (no normalization), so scaling it by
/// `c > 0` scales the returned tangent by `c`.
pub fn make_null_initial(
    chart: &SpacetimeChart,
    position: Point,
    direction: [f64; 3],
) -> Result<NullGeodesicState, GeodesicError> {
    let g = chart.metric(&position)?;
    if direction.iter().any(|d| !d.is_finite()) || direction.iter().all(|&d| d == 0.0) {
        return Err(GeodesicError::DegenerateDirection(direction));
    }
    let [vr, vth, vph] = direction;
    let a = g.get(T, T);
    let b = 2.0 * g.get(T, PHI) * vph;
    let c = g.get(R, R) * vr * vr + g.get(THETA, THETA) * vth * vth + g.get(PHI, PHI) * vph * vph;
    let vt = if a == 0.0 {
        if b == 0.0 {
            return Err(GeodesicError::DegenerateDirection(direction));
        }
        -c / b
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Err(GeodesicError::DegenerateDirection(direction));
        }
        // stable roots q/a and c/q
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let roots = if q == 0.0 { [0.0, 0.0] } else { [q / a, c / q] };
        roots[0].max(roots[1])
    };
    if !(vt > 0.0 && vt.is_finite()) {
        return Err(GeodesicError::DegenerateDirection(direction));
    }
    Ok(NullGeodesicState { position, velocity: [vt, vr, vth, vph], lambda: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn minkowski_radial_outgoing() {
        let chart = SpacetimeChart::minkowski();
        let s = make_null_initial(&chart, [0.0, 5.0, FRAC_PI_2, 0.0], [1.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.velocity, [1.0, 1.0, 0.0, 0.0]);
        assert_eq!(null_residual(&chart, &s.position, &s.velocity).unwrap(), 0.0);
    }

    #[test]
    fn photon_orbit_initial_data() {
        let chart = SpacetimeChart::schwarzschild(1.0).unwrap();
        let s = make_null_initial(&chart, [0.0, 3.0, FRAC_PI_2, 0.0], [0.0, 0.0, 0.2]).unwrap();
        assert_eq!(s.velocity[R], 0.0);
        let ratio = (s.velocity[T] / s.velocity[PHI]).powi(2);
        assert!((ratio - 27.0).abs() < 1e-12, "{ratio}");
    }

    #[test]
    fn kerr_initial_data_is_null() {
        let chart = SpacetimeChart::kerr(1.0, 0.9).unwrap();
        for &(r, th, d) in &[
            (1.6, 1.2, [0.01, -0.02, 0.5]),
            (3.0, 0.4, [-1.0, 0.0, 0.05]),
            (40.0, 2.0, [0.0, 0.01, 0.001]),
        ] {
            let s = make_null_initial(&chart, [0.0, r, th, 0.0], d).unwrap();
            assert!(s.velocity[T] > 0.0);
            assert!(null_residual(&chart, &s.position, &s.velocity).unwrap() < 1e-14);
        }
    }

    #[test]
    fn scaling_direction_scales_tangent() {
        let chart = SpacetimeChart::kerr(1.0, 0.5).unwrap();
        let x = [0.0, 6.0, 1.0, 0.0];
        let d = [0.3, -0.1, 0.07];
        let s1 = make_null_initial(&chart, x, d).unwrap();
        let s2 = make_null_initial(&chart, x, d.map(|v| 2.5 * v)).unwrap();
        for i in 0..4 {
            assert!((s2.velocity[i] - 2.5 * s1.velocity[i]).abs() < 1e-14 * s2.velocity[i].abs().max(1.0));
        }
    }

    #[test]
    fn zero_direction_rejected() {
        let chart = SpacetimeChart::minkowski();
        assert!(matches!(
            make_null_initial(&chart, [0.0, 1.0, 1.0, 0.0], [0.0; 3]),
            Err(GeodesicError::DegenerateDirection(_))
        ));
        assert!(matches!(
            make_null_initial(&chart, [0.0, -1.0, 1.0, 0.0], [1.0, 0.0, 0.0]),
            Err(GeodesicError::Geometry(GeometryError::OutOfChart { .. }))
        ));
    }
}

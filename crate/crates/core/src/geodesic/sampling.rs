use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{make_null_initial, GeodesicError, NullGeodesicState};
use crate::geometry::SpacetimeChart;

/// Recipe for a reproducible batch of null initial data.
///
/// Positions are drawn uniformly in `r ∈ [r_lo, r_hi]` and in `cos θ` over
/// `[θ_margin, π - θ_margin]`. Directions are uniform on the unit sphere of
/// the static observer's orthonormal frame, rejecting draws with
/// `|n_φ| < min_azimuthal` so that every ray carries angular momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomNullSpec {
    pub count: usize,
    pub seed: u64,
    pub r_lo: f64,
    pub r_hi: f64,
    #[serde(default = "default_theta_margin")]
    pub theta_margin: f64,
    #[serde(default)]
    pub min_azimuthal: f64,
}

fn default_theta_margin() -> f64 {
    0.2
}

impl RandomNullSpec {
    pub fn new(count: usize, seed: u64, r_lo: f64, r_hi: f64) -> Self {
        RandomNullSpec { count, seed, r_lo, r_hi, theta_margin: default_theta_margin(), min_azimuthal: 0.0 }
    }
}

pub fn random_null_states(
    chart: &SpacetimeChart,
    spec: &RandomNullSpec,
) -> Result<Vec<NullGeodesicState>, GeodesicError> {
    let m = spec.theta_margin;
    if !(spec.r_lo > chart.r_min() && spec.r_hi >= spec.r_lo && spec.r_hi.is_finite()) {
        return Err(GeodesicError::InvalidSpec(format!(
            "radius range [{}, {}] must lie above the chart floor {}",
            spec.r_lo,
            spec.r_hi,
            chart.r_min()
        )));
    }
    if !(m >= chart.axis_margin() && m < std::f64::consts::FRAC_PI_2) || !(0.0..1.0).contains(&spec.min_azimuthal) {
        return Err(GeodesicError::InvalidSpec("theta_margin or min_azimuthal out of range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let cos_hi = m.cos();
    let mut out = Vec::with_capacity(spec.count);
    let mut attempts = 0usize;
    while out.len() < spec.count {
        attempts += 1;
        if attempts > 100 * spec.count + 100 {
            return Err(GeodesicError::InvalidSpec("could not draw enough admissible directions".into()));
        }
        let r = rng.random_range(spec.r_lo..=spec.r_hi);
        let theta = rng.random_range(-cos_hi..=cos_hi).acos();
        let nz: f64 = rng.random_range(-1.0..=1.0);
        let az: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let s = (1.0 - nz * nz).sqrt();
        let n = [nz, s * az.cos(), s * az.sin()];
        if n[2].abs() < spec.min_azimuthal {
            continue;
        }
        let x = [0.0, r, theta, 0.0];
        let g = chart.metric(&x)?;
        let dir = [n[0] / g.0[1][1].sqrt(), n[1] / g.0[2][2].sqrt(), n[2] / g.0[3][3].sqrt()];
        match make_null_initial(chart, x, dir) {
            Ok(st) => out.push(st),
            Err(GeodesicError::DegenerateDirection(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

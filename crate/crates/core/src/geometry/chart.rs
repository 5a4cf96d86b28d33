use serde::{Deserialize, Serialize};

use super::{GeometryError, Point, Tensor2, Vec4, PHI, R, T, THETA};

/// Default exterior floor: `r_min = r_+ (1 + 1e-3)`.
pub const DEFAULT_FLOOR_FACTOR: f64 = 1.0e-3;
/// Default distance kept from the polar axis, in radians.
pub const DEFAULT_AXIS_MARGIN: f64 = 1.0e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Minkowski,
    Schwarzschild,
    Kerr,
}

/// Metric family plus parameters, restricted to an exterior region.
///
/// All lengths are in geometrized units (`G = c = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeChart {
    family: Family,
    mass: f64,
    spin: f64,
    r_min: f64,
    axis_margin: f64,
}

/// Connection coefficients `Γ^α_{βγ}` stored as `gamma[α][β][γ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel(pub [[[f64; 4]; 4]; 4]);

impl Christoffel {
    #[inline]
    pub fn get(&self, upper: usize, a: usize, b: usize) -> f64 {
        self.0[upper][a][b]
    }

    /// `-Γ^α_{βγ} v^β v^γ`, the geodesic acceleration.
    pub fn acceleration(&self, v: &Vec4) -> Vec4 {
        let mut acc = [0.0; 4];
        for (alpha, out) in acc.iter_mut().enumerate() {
            let g = &self.0[alpha];
            let mut s = 0.0;
            for b in 0..4 {
                let mut row = 0.0;
                for c in 0..4 {
                    row += g[b][c] * v[c];
                }
                s += row * v[b];
            }
            *out = -s;
        }
        acc
    }
}

impl SpacetimeChart {
    pub fn minkowski() -> Self {
        SpacetimeChart {
            family: Family::Minkowski,
            mass: 0.0,
            spin: 0.0,
            r_min: 0.0,
            axis_margin: DEFAULT_AXIS_MARGIN,
        }
    }

    pub fn schwarzschild(mass: f64) -> Result<Self, GeometryError> {
        Self::new(Family::Schwarzschild, mass, 0.0)
    }

    pub fn kerr(mass: f64, spin: f64) -> Result<Self, GeometryError> {
        Self::new(Family::Kerr, mass, spin)
    }

    /// Builds a chart with the default exterior floor and axis margin.
    pub fn new(family: Family, mass: f64, spin: f64) -> Result<Self, GeometryError> {
        let mut chart = SpacetimeChart {
            family,
            mass,
            spin,
            r_min: 0.0,
            axis_margin: DEFAULT_AXIS_MARGIN,
        };
        match family {
            Family::Minkowski => {
                if mass != 0.0 || spin != 0.0 {
                    return Err(GeometryError::InvalidChart(
                        "Minkowski takes no mass or spin".into(),
                    ));
                }
            }
            Family::Schwarzschild => {
                if !(mass.is_finite() && mass > 0.0) {
                    return Err(GeometryError::InvalidChart(format!("mass must be > 0, got {mass}")));
                }
                if spin != 0.0 {
                    return Err(GeometryError::InvalidChart("Schwarzschild has zero spin".into()));
                }
            }
            Family::Kerr => {
                if !(mass.is_finite() && mass > 0.0) {
                    return Err(GeometryError::InvalidChart(format!("mass must be > 0, got {mass}")));
                }
                if !(spin.is_finite() && spin.abs() < mass) {
                    return Err(GeometryError::InvalidChart(format!(
                        "Kerr requires |a| < M, got a = {spin}, M = {mass}"
                    )));
                }
            }
        }
        chart.r_min = chart.horizon_radius() * (1.0 + DEFAULT_FLOOR_FACTOR);
        Ok(chart)
    }

    /// Replaces the exterior floor. Must stay strictly above the horizon.
    pub fn with_floor(mut self, r_min: f64) -> Result<Self, GeometryError> {
        let rp = self.horizon_radius();
        let ok = match self.family {
            Family::Minkowski => r_min >= 0.0,
            _ => r_min > rp,
        };
        if !ok || !r_min.is_finite() {
            return Err(GeometryError::InvalidChart(format!(
                "floor r_min = {r_min} must exceed the horizon radius {rp}"
            )));
        }
        self.r_min = r_min;
        Ok(self)
    }

    pub fn with_axis_margin(mut self, margin: f64) -> Result<Self, GeometryError> {
        if !(margin > 0.0 && margin < std::f64::consts::FRAC_PI_2) {
            return Err(GeometryError::InvalidChart(format!("axis margin {margin} out of range")));
        }
        self.axis_margin = margin;
        Ok(self)
    }

    pub fn family(&self) -> Family {
        self.family
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn spin(&self) -> f64 {
        self.spin
    }
    pub fn r_min(&self) -> f64 {
        self.r_min
    }
    pub fn axis_margin(&self) -> f64 {
        self.axis_margin
    }

    /// Outer horizon `r_+`; zero for Minkowski.
    pub fn horizon_radius(&self) -> f64 {
        match self.family {
            Family::Minkowski => 0.0,
            Family::Schwarzschild => 2.0 * self.mass,
            Family::Kerr => self.mass + (self.mass * self.mass - self.spin * self.spin).sqrt(),
        }
    }

    /// Horizon angular velocity `a / (r_+^2 + a^2)`.
    pub fn horizon_angular_velocity(&self) -> f64 {
        let rp = self.horizon_radius();
        match self.family {
            Family::Kerr => self.spin / (rp * rp + self.spin * self.spin),
            _ => 0.0,
        }
    }

    pub fn check_point(&self, x: &Point) -> Result<(), GeometryError> {
        let (r, theta) = (x[R], x[THETA]);
        if !(r.is_finite() && theta.is_finite()) {
            return Err(GeometryError::OutOfChart { r, theta, reason: "non-finite coordinate" });
        }
        if r <= self.r_min {
            return Err(GeometryError::OutOfChart { r, theta, reason: "r at or below chart floor" });
        }
        if theta < self.axis_margin || theta > std::f64::consts::PI - self.axis_margin {
            return Err(GeometryError::OutOfChart { r, theta, reason: "too close to the polar axis" });
        }
        Ok(())
    }

    /// Covariant metric components `g_{αβ}`.
    pub fn metric(&self, x: &Point) -> Result<Tensor2, GeometryError> {
        self.check_point(x)?;
        Ok(self.metric_unchecked(x))
    }

    /// Contravariant metric `g^{αβ}`.
    pub fn inverse_metric(&self, x: &Point) -> Result<Tensor2, GeometryError> {
        self.check_point(x)?;
        Ok(invert_stationary(&self.metric_unchecked(x)))
    }

    /// Analytic partial derivatives `∂_μ g_{αβ}`; the `t` and `phi` slots are zero.
    pub fn metric_derivatives(&self, x: &Point) -> Result<[Tensor2; 4], GeometryError> {
        self.check_point(x)?;
        Ok(self.metric_derivatives_unchecked(x))
    }

    pub fn christoffel(&self, x: &Point) -> Result<Christoffel, GeometryError> {
        self.check_point(x)?;
        Ok(self.christoffel_unchecked(x))
    }

    pub(crate) fn metric_unchecked(&self, x: &Point) -> Tensor2 {
        let (r, theta) = (x[R], x[THETA]);
        let (s, c) = theta.sin_cos();
        let s2 = s * s;
        match self.family {
            Family::Minkowski | Family::Schwarzschild => {
                let h = 1.0 - 2.0 * self.mass / r;
                Tensor2::diagonal([-h, 1.0 / h, r * r, r * r * s2])
            }
            Family::Kerr => {
                let (m, a) = (self.mass, self.spin);
                let sigma = r * r + a * a * c * c;
                let delta = r * r - 2.0 * m * r + a * a;
                let mut g = [[0.0; 4]; 4];
                g[T][T] = -(1.0 - 2.0 * m * r / sigma);
                g[T][PHI] = -2.0 * m * a * r * s2 / sigma;
                g[PHI][T] = g[T][PHI];
                g[R][R] = sigma / delta;
                g[THETA][THETA] = sigma;
                g[PHI][PHI] = (r * r + a * a + 2.0 * m * a * a * r * s2 / sigma) * s2;
                Tensor2(g)
            }
        }
    }

    pub(crate) fn metric_derivatives_unchecked(&self, x: &Point) -> [Tensor2; 4] {
        let (r, theta) = (x[R], x[THETA]);
        let (s, c) = theta.sin_cos();
        let s2 = s * s;
        let mut dr = [[0.0; 4]; 4];
        let mut dth = [[0.0; 4]; 4];
        match self.family {
            Family::Minkowski | Family::Schwarzschild => {
                let m = self.mass;
                let h = 1.0 - 2.0 * m / r;
                let hp = 2.0 * m / (r * r);
                dr[T][T] = -hp;
                dr[R][R] = -hp / (h * h);
                dr[THETA][THETA] = 2.0 * r;
                dr[PHI][PHI] = 2.0 * r * s2;
                dth[PHI][PHI] = 2.0 * r * r * s * c;
            }
            Family::Kerr => {
                let (m, a) = (self.mass, self.spin);
                let a2 = a * a;
                let sigma = r * r + a2 * c * c;
                let sig2 = sigma * sigma;
                let dsig_r = 2.0 * r;
                let dsig_th = -2.0 * a2 * c * s;
                let delta = r * r - 2.0 * m * r + a2;
                let ddelta_r = 2.0 * r - 2.0 * m;

                dr[T][T] = 2.0 * m * (sigma - r * dsig_r) / sig2;
                dth[T][T] = -2.0 * m * r * dsig_th / sig2;

                dr[T][PHI] = -2.0 * m * a * s2 * (sigma - r * dsig_r) / sig2;
                dth[T][PHI] = -2.0 * m * a * r * (2.0 * s * c * sigma - s2 * dsig_th) / sig2;
                dr[PHI][T] = dr[T][PHI];
                dth[PHI][T] = dth[T][PHI];

                dr[R][R] = (dsig_r * delta - sigma * ddelta_r) / (delta * delta);
                dth[R][R] = dsig_th / delta;

                dr[THETA][THETA] = dsig_r;
                dth[THETA][THETA] = dsig_th;

                let w = 2.0 * m * a2 * r * s2 / sigma;
                let dw_r = 2.0 * m * a2 * s2 * (sigma - r * dsig_r) / sig2;
                let dw_th = 2.0 * m * a2 * r * (2.0 * s * c * sigma - s2 * dsig_th) / sig2;
                dr[PHI][PHI] = (2.0 * r + dw_r) * s2;
                dth[PHI][PHI] = dw_th * s2 + (r * r + a2 + w) * 2.0 * s * c;
            }
        }
        [Tensor2::ZERO, Tensor2(dr), Tensor2(dth), Tensor2::ZERO]
    }

    pub(crate) fn christoffel_unchecked(&self, x: &Point) -> Christoffel {
        let g = self.metric_unchecked(x);
        let gi = invert_stationary(&g);
        let dg = self.metric_derivatives_unchecked(x);
        // first kind: [βγ, δ] = ½(∂_β g_{δγ} + ∂_γ g_{δβ} − ∂_δ g_{βγ})
        let mut first = [[[0.0; 4]; 4]; 4];
        for d in 0..4 {
            for b in 0..4 {
                for c in b..4 {
                    let v = 0.5 * (dg[b].0[d][c] + dg[c].0[d][b] - dg[d].0[b][c]);
                    first[d][b][c] = v;
                    first[d][c][b] = v;
                }
            }
        }
        let mut gamma = [[[0.0; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for c in b..4 {
                    let v: f64 = (0..4).map(|d| gi.0[a][d] * first[d][b][c]).sum();
                    gamma[a][b][c] = v;
                    gamma[a][c][b] = v;
                }
            }
        }
        Christoffel(gamma)
    }

    /// `g_{αβ} v^β`.
    pub fn lower(&self, x: &Point, v: &Vec4) -> Result<Vec4, GeometryError> {
        Ok(self.metric(x)?.apply(v))
    }

    /// `g_{αβ} u^α v^β`.
    pub fn inner(&self, x: &Point, u: &Vec4, v: &Vec4) -> Result<f64, GeometryError> {
        Ok(self.metric(x)?.contract(u, v))
    }
}

/// Inverse of a metric whose only off-diagonal block is `(t, phi)`.
pub(crate) fn invert_stationary(g: &Tensor2) -> Tensor2 {
    let g = &g.0;
    let det = g[T][T] * g[PHI][PHI] - g[T][PHI] * g[T][PHI];
    let mut inv = [[0.0; 4]; 4];
    inv[T][T] = g[PHI][PHI] / det;
    inv[PHI][PHI] = g[T][T] / det;
    inv[T][PHI] = -g[T][PHI] / det;
    inv[PHI][T] = inv[T][PHI];
    inv[R][R] = 1.0 / g[R][R];
    inv[THETA][THETA] = 1.0 / g[THETA][THETA];
    Tensor2(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn minkowski_is_flat_spherical() {
        let chart = SpacetimeChart::minkowski();
        let th = 0.7;
        let g = chart.metric(&[0.0, 2.0, th, 1.0]).unwrap();
        let expect = Tensor2::diagonal([-1.0, 1.0, 4.0, 4.0 * th.sin().powi(2)]);
        assert_eq!(g, expect);
    }

    #[test]
    fn schwarzschild_components_at_r4() {
        let chart = SpacetimeChart::schwarzschild(1.0).unwrap();
        let g = chart.metric(&[0.0, 4.0, FRAC_PI_2, 0.0]).unwrap();
        assert!((g.get(T, T) + 0.5).abs() < 1e-15);
        assert!((g.get(R, R) - 2.0).abs() < 1e-15);
        assert!((g.get(THETA, THETA) - 16.0).abs() < 1e-15);
    }

    #[test]
    fn kerr_without_spin_matches_schwarzschild() {
        let k = SpacetimeChart::kerr(1.0, 0.0).unwrap();
        let s = SpacetimeChart::schwarzschild(1.0).unwrap();
        for &(r, th) in &[(2.5, 0.3), (4.0, 1.2), (17.0, 2.9)] {
            let x = [0.0, r, th, 0.4];
            let gk = k.metric(&x).unwrap();
            let gs = s.metric(&x).unwrap();
            assert!(gk.sub(&gs).max_abs() < 1e-14 * gs.max_abs());
        }
    }

    #[test]
    fn inverse_metric_is_inverse() {
        let k = SpacetimeChart::kerr(1.0, 0.7).unwrap();
        let x = [0.0, 3.1, 1.0, 0.0];
        let g = k.metric(&x).unwrap();
        let gi = k.inverse_metric(&x).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let v: f64 = (0..4).map(|m| g.get(i, m) * gi.get(m, j)).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((v - e).abs() < 1e-13, "{i}{j}: {v}");
            }
        }
    }

    #[test]
    fn signature_is_lorentzian() {
        // det < 0 and the spatial block is positive definite outside the ergoregion
        let k = SpacetimeChart::kerr(1.0, 0.9).unwrap();
        let g = k.metric(&[0.0, 6.0, 0.9, 0.0]).unwrap();
        let det_tp = g.get(T, T) * g.get(PHI, PHI) - g.get(T, PHI).powi(2);
        assert!(det_tp < 0.0);
        assert!(g.get(R, R) > 0.0 && g.get(THETA, THETA) > 0.0 && g.get(PHI, PHI) > 0.0);
    }

    #[test]
    fn chart_rejects_bad_parameters() {
        assert!(SpacetimeChart::kerr(1.0, 1.2).is_err());
        assert!(SpacetimeChart::kerr(1.0, -1.0).is_err());
        assert!(SpacetimeChart::schwarzschild(0.0).is_err());
        let s = SpacetimeChart::schwarzschild(1.0).unwrap();
        assert!(s.with_floor(2.0).is_err());
        assert!(s.with_floor(2.01).is_ok());
    }

    #[test]
    fn out_of_chart_points() {
        let s = SpacetimeChart::schwarzschild(1.0).unwrap();
        assert!(matches!(
            s.metric(&[0.0, 2.0, 1.0, 0.0]),
            Err(GeometryError::OutOfChart { .. })
        ));
        assert!(matches!(
            s.metric(&[0.0, 5.0, 1e-9, 0.0]),
            Err(GeometryError::OutOfChart { .. })
        ));
        assert!(s.metric(&[0.0, 2.0 * 1.0011, 1.0, 0.0]).is_ok());
    }

    #[test]
    fn default_floor() {
        let k = SpacetimeChart::kerr(1.0, 0.6).unwrap();
        assert!((k.r_min() - 1.8 * 1.001).abs() < 1e-15);
    }
}

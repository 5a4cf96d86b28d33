use serde::{Deserialize, Serialize};

use super::{GeodesicError, NullGeodesicState};
use crate::geometry::{Family, SpacetimeChart, PHI, T, THETA};

/// Conserved triple of a Kerr null geodesic together with the chart parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialPotentialSpec {
    pub energy: f64,
    pub lz: f64,
    pub carter_q: f64,
    pub mass: f64,
    pub spin: f64,
}

impl RadialPotentialSpec {
    /// Reads `E = -γ̇_t`, `L_z = γ̇_φ` and
    /// `Q = γ̇_θ² + cos²θ (L_z² / sin²θ - a² E²)` off a state.
    pub fn from_state(chart: &SpacetimeChart, s: &NullGeodesicState) -> Result<Self, GeodesicError> {
        let low = chart.lower(&s.position, &s.velocity)?;
        let a = chart.spin();
        let (e, l) = (-low[T], low[PHI]);
        let (sn, cs) = s.position[THETA].sin_cos();
        Ok(RadialPotentialSpec {
            energy: e,
            lz: l,
            carter_q: low[THETA].powi(2) + cs * cs * (l * l / (sn * sn) - a * a * e * e),
            mass: chart.mass(),
            spin: a,
        })
    }

    /// `Q + (L_z - aE)²`.
    pub fn total_k(&self) -> f64 {
        self.carter_q + (self.lz - self.spin * self.energy).powi(2)
    }
}

/// `R(r) = [E(r² + a²) - a L_z]² - Δ (Q + (L_z - aE)²)` stored as
/// polynomial coefficients in `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialPotential {
    pub spec: RadialPotentialSpec,
    /// `c[i]` multiplies `r^i`.
    pub coeffs: [f64; 5],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialRoot {
    pub r: f64,
    /// 1 for a turning point, 2 for a circular orbit.
    pub multiplicity: u8,
    pub residual: f64,
}

impl RadialPotential {
    pub fn new(spec: RadialPotentialSpec) -> Result<Self, GeodesicError> {
        let RadialPotentialSpec { energy: e, lz: l, mass: m, spin: a, .. } = spec;
        let all = [e, l, spec.carter_q, m, a];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(GeodesicError::InvalidSpec("non-finite parameter".into()));
        }
        if m <= 0.0 || a.abs() >= m {
            return Err(GeodesicError::InvalidSpec(format!("need M > 0 and |a| < M, got M={m}, a={a}")));
        }
        let k = spec.total_k();
        if k < 0.0 {
            return Err(GeodesicError::InvalidSpec(format!("Q + (L - aE)^2 = {k} is negative")));
        }
        let p = e * a * a - a * l;
        Ok(RadialPotential {
            spec,
            coeffs: [p * p - a * a * k, 2.0 * m * k, 2.0 * e * p - k, 0.0, e * e],
        })
    }

    /// `(R, R', R'')` at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        let c = &self.coeffs;
        let v = (((c[4] * r + c[3]) * r + c[2]) * r + c[1]) * r + c[0];
        let d1 = ((4.0 * c[4] * r + 3.0 * c[3]) * r + 2.0 * c[2]) * r + c[1];
        let d2 = (12.0 * c[4] * r + 6.0 * c[3]) * r + 2.0 * c[2];
        (v, d1, d2)
    }

    /// Sum of the absolute values of the terms of `R(r)`.
    pub fn magnitude(&self, r: f64) -> f64 {
        self.coeffs.iter().enumerate().map(|(i, c)| (c * r.powi(i as i32)).abs()).sum()
    }

    pub fn horizon(&self) -> f64 {
        let s = &self.spec;
        s.mass + (s.mass * s.mass - s.spin * s.spin).sqrt()
    }

    /// Real roots of `R` on `(r₊, ∞)` in increasing order.
    ///
    /// Simple roots come from sign changes on a logarithmic scan, refined by
    /// bisection and Newton. Double roots are critical points of `R` where
    /// `|R|` is negligible against its terms.
    pub fn exterior_roots(&self) -> Result<Vec<RadialRoot>, GeodesicError> {
        let lo = self.horizon() * (1.0 + 1e-9);
        let lead = self.coeffs.iter().rposition(|&c| c != 0.0);
        let Some(deg) = lead else {
            return Err(GeodesicError::NoExteriorRoots);
        };
        let cauchy = 1.0
            + self.coeffs[..deg].iter().fold(0.0_f64, |m, c| m.max((c / self.coeffs[deg]).abs()));
        let hi = cauchy.max(2.0 * lo);
        let n = 4000;
        let grid: Vec<f64> = (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect();

        let mut roots: Vec<RadialRoot> = Vec::new();
        let value = |r: f64| self.eval(r).0;
        let slope = |r: f64| self.eval(r).1;
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (value(a), value(b));
            if fa == 0.0 {
                self.push_root(&mut roots, a);
            } else if fa * fb < 0.0 {
                let r = refine(value, slope, a, b);
                self.push_root(&mut roots, r);
            }
        }
        if value(hi) == 0.0 {
            self.push_root(&mut roots, hi);
        }
        // touching roots: R' changes sign where R is tiny
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (da, db) = (slope(a), slope(b));
            if da * db < 0.0 {
                let r = refine(slope, |x| self.eval(x).2, a, b);
                if self.eval(r).0.abs() <= 1e-9 * self.magnitude(r) {
                    self.push_root(&mut roots, r);
                }
            }
        }
        roots.sort_by(|x, y| x.r.total_cmp(&y.r));
        if roots.is_empty() {
            return Err(GeodesicError::NoExteriorRoots);
        }
        Ok(roots)
    }

    fn push_root(&self, roots: &mut Vec<RadialRoot>, r: f64) {
        if roots.iter().any(|x| (x.r - r).abs() <= 1e-7 * r) {
            return;
        }
        let (v, d, _) = self.eval(r);
        let scale = self.magnitude(r) / r;
        let multiplicity = if d.abs() <= 1e-6 * scale { 2 } else { 1 };
        roots.push(RadialRoot { r, multiplicity, residual: v.abs() });
    }
}

/// Bisection down to a short bracket, then Newton while it stays inside.
fn refine(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a) <= 1e-10 * m {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    let mut r = 0.5 * (a + b);
    for _ in 0..8 {
        let d = df(r);
        if d == 0.0 {
            break;
        }
        let next = r - f(r) / d;
        if !(next > a - (b - a) && next < b + (b - a)) {
            break;
        }
        if next == r {
            break;
        }
        r = next;
    }
    r
}

/// Which branch of spherical photon orbits to look on.
///
/// `Prograde` is the inner branch, where `L_z - aE > 0`; `Retrograde` the
/// outer one. For `a > 0` equatorial orbits this is the usual co- and
/// counter-rotating split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitSense {
    Prograde,
    Retrograde,
}

/// Target orbit: branch plus the Carter ratio `η = Q / E²` (0 is equatorial).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSelector {
    pub sense: OrbitSense,
    pub eta: f64,
}

impl OrbitSelector {
    pub fn equatorial(sense: OrbitSense) -> Self {
        OrbitSelector { sense, eta: 0.0 }
    }
}

/// A spherical photon orbit, normalized to `E = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrappedOrbit {
    pub r: f64,
    pub spec: RadialPotentialSpec,
    pub sense: OrbitSense,
    /// `|R(r)|`.
    pub residual: f64,
    /// `|R'(r)|`.
    pub slope_residual: f64,
}

impl TrappedOrbit {
    /// `L_z / E`.
    pub fn xi(&self) -> f64 {
        self.spec.lz / self.spec.energy
    }

    /// `Q / E²`.
    pub fn eta(&self) -> f64 {
        self.spec.carter_q / self.spec.energy.powi(2)
    }
}

/// Locates the orbit with `R(r) = R'(r) = 0` on the selected branch inside
/// `seed`.
///
/// With `E = 1` and `η` fixed, eliminating `L_z` from `R = R' = 0` leaves a
/// single equation in `r` that is bracketed on the branch. A final
/// two-dimensional Newton step in `(r, L_z)` polishes both residuals.
/// `seed = None` uses `(r₊(1 + 10⁻³), 10M)`.
pub fn find_trapped(
    chart: &SpacetimeChart,
    seed: Option<(f64, f64)>,
    selector: OrbitSelector,
) -> Result<TrappedOrbit, GeodesicError> {
    if chart.family() == Family::Minkowski {
        return Err(GeodesicError::UnsupportedChart("flat space has no trapped null geodesics".into()));
    }
    let (m, a) = (chart.mass(), chart.spin());
    let rp = chart.horizon_radius();
    let (lo, hi) = seed.unwrap_or((rp * (1.0 + 1e-3), 10.0 * m));
    let eta = selector.eta;
    if !(lo < hi && lo > rp && eta.is_finite() && eta >= 0.0) {
        return Err(GeodesicError::InvalidSpec(format!("seed ({lo}, {hi}) with eta {eta}")));
    }
    let sgn = match selector.sense {
        OrbitSense::Prograde => 1.0,
        OrbitSense::Retrograde => -1.0,
    };

    let (r0, xi0) = if a == 0.0 {
        let r = 3.0 * m;
        let l2 = 27.0 * m * m - eta;
        if !(lo < r && r < hi) || l2 < 0.0 {
            return Err(GeodesicError::NoTrappedOrbit { lo, hi });
        }
        (r, sgn * l2.sqrt())
    } else {
        let g = |r: f64| {
            let delta = r * r - 2.0 * m * r + a * a;
            let q = r * r - 3.0 * m * r + 2.0 * a * a;
            a * a * (4.0 * r * r * delta - eta * (r - m).powi(2)) - r * r * q * q
        };
        let r_mid = 0.5 * (3.0 * m + (9.0 * m * m - 8.0 * a * a).sqrt());
        let (blo, bhi) = match selector.sense {
            OrbitSense::Prograde => (lo, hi.min(r_mid)),
            OrbitSense::Retrograde => (lo.max(r_mid), hi),
        };
        if !(blo < bhi) || g(blo) * g(bhi) >= 0.0 {
            return Err(GeodesicError::NoTrappedOrbit { lo, hi });
        }
        let r = bisect(g, blo, bhi);
        let u = -r * (r * r - 3.0 * m * r + 2.0 * a * a) / (a * (r - m));
        (r, a + u)
    };

    let make = |xi: f64| {
        RadialPotential::new(RadialPotentialSpec { energy: 1.0, lz: xi, carter_q: eta, mass: m, spin: a })
    };
    let (mut r, mut xi) = (r0, xi0);
    for _ in 0..6 {
        let pot = make(xi)?;
        let (v, d1, d2) = pot.eval(r);
        // ∂/∂L_z of R and R' at E = 1
        let dv = -2.0 * xi * r * r + 4.0 * m * (xi - a) * r;
        let dd = -4.0 * xi * r + 4.0 * m * (xi - a);
        let det = d1 * dd - dv * d2;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dr = (v * dd - dv * d1) / det;
        let dxi = (d1 * d1 - d2 * v) / det;
        if !(dr.is_finite() && dxi.is_finite()) {
            break;
        }
        r -= dr;
        xi -= dxi;
        if dr.abs() <= 1e-16 * r && dxi.abs() <= 1e-16 * xi.abs().max(m) {
            break;
        }
    }
    let pot = make(xi)?;
    let (v, d1, _) = pot.eval(r);
    if !(lo < r && r < hi) {
        return Err(GeodesicError::NoTrappedOrbit { lo, hi });
    }
    Ok(TrappedOrbit {
        r,
        spec: pot.spec,
        sense: selector.sense,
        residual: v.abs(),
        slope_residual: d1.abs(),
    })
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    while b - a > 4.0 * f64::EPSILON * b {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

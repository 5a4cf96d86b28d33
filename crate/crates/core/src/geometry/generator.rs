use serde::{Deserialize, Serialize};

use super::{Family, GeometryError, Point, SpacetimeChart, Tensor2, Vec4, R, THETA};

/// Radial weight `f(r)` for the generator `A_f = f(r) ∂_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RadialProfile {
    /// `f = 1 - 3M/r`, vanishing on the photon sphere.
    PhotonSphere { mass: f64 },
    Constant { value: f64 },
    /// `f = atan((r - center) / width)`.
    Arctan { center: f64, width: f64 },
}

impl RadialProfile {
    /// Returns `(f, f', f'')` with derivatives in `r`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        match *self {
            RadialProfile::PhotonSphere { mass } => {
                (1.0 - 3.0 * mass / r, 3.0 * mass / (r * r), -6.0 * mass / (r * r * r))
            }
            RadialProfile::Constant { value } => (value, 0.0, 0.0),
            RadialProfile::Arctan { center, width } => {
                let z = (r - center) / width;
                let d = 1.0 / (1.0 + z * z);
                (z.atan(), d / width, -2.0 * z * d * d / (width * width))
            }
        }
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let ok = match *self {
            RadialProfile::PhotonSphere { mass } => mass.is_finite() && mass >= 0.0,
            RadialProfile::Constant { value } => value.is_finite(),
            RadialProfile::Arctan { center, width } => center.is_finite() && width > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(GeometryError::InvalidGenerator(format!("bad radial profile {self:?}")))
        }
    }
}

/// `T_χ = ∂_t + ω₀ χ(r) ∂_φ`: corotating with the horizon inside `r₁`,
/// static outside `r₂`, with a C² quintic blend in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorotatingBlend {
    pub inner: f64,
    pub outer: f64,
    pub omega: f64,
}

impl CorotatingBlend {
    /// Window `(5M, 6M)` and `ω₀` equal to the horizon angular velocity.
    pub fn for_chart(chart: &SpacetimeChart) -> Result<Self, GeometryError> {
        if chart.family() != Family::Kerr {
            return Err(GeometryError::FamilyMismatch { generator: "T_chi", family: chart.family() });
        }
        let m = chart.mass();
        Ok(CorotatingBlend {
            inner: 5.0 * m,
            outer: 6.0 * m,
            omega: chart.horizon_angular_velocity(),
        })
    }

    /// `(χ, χ')`.
    pub fn cutoff(&self, r: f64) -> (f64, f64) {
        if r <= self.inner {
            return (1.0, 0.0);
        }
        if r >= self.outer {
            return (0.0, 0.0);
        }
        let w = self.outer - self.inner;
        let x = (r - self.inner) / w;
        let step = x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
        let dstep = 30.0 * x * x * (1.0 - x) * (1.0 - x) / w;
        (1.0 - step, -dstep)
    }

    fn validate(&self, chart: &SpacetimeChart) -> Result<(), GeometryError> {
        if !(self.inner > chart.r_min() && self.outer > self.inner && self.omega.is_finite()) {
            return Err(GeometryError::InvalidGenerator(format!(
                "blend window ({}, {}) must lie in the exterior with finite omega",
                self.inner, self.outer
            )));
        }
        Ok(())
    }
}

/// The vector fields used to generate energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorField {
    /// `T = ∂_t`.
    Time,
    /// `Φ = ∂_φ`.
    Rotation,
    /// `R = ∂_r`.
    Radial,
    /// `A_f = f(r) ∂_r`.
    Profiled { profile: RadialProfile },
    /// `T_χ`, Kerr only.
    Corotating { blend: CorotatingBlend },
}

impl GeneratorField {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorField::Time => "T",
            GeneratorField::Rotation => "Phi",
            GeneratorField::Radial => "R",
            GeneratorField::Profiled { .. } => "A_f",
            GeneratorField::Corotating { .. } => "T_chi",
        }
    }

    /// `A = (1 - 3M/r) ∂_r` for the given chart mass.
    pub fn photon_sphere(mass: f64) -> Self {
        GeneratorField::Profiled { profile: RadialProfile::PhotonSphere { mass } }
    }

    pub fn corotating(chart: &SpacetimeChart) -> Result<Self, GeometryError> {
        Ok(GeneratorField::Corotating { blend: CorotatingBlend::for_chart(chart)? })
    }

    pub fn check_family(&self, chart: &SpacetimeChart) -> Result<(), GeometryError> {
        match self {
            GeneratorField::Corotating { blend } => {
                if chart.family() != Family::Kerr {
                    return Err(GeometryError::FamilyMismatch {
                        generator: self.name(),
                        family: chart.family(),
                    });
                }
                blend.validate(chart)
            }
            GeneratorField::Profiled { profile } => profile.validate(),
            _ => Ok(()),
        }
    }

    /// Contravariant components `X^α` at `x`.
    pub fn eval(&self, chart: &SpacetimeChart, x: &Point) -> Result<Vec4, GeometryError> {
        self.check_family(chart)?;
        chart.check_point(x)?;
        Ok(self.components(x[R]).0)
    }

    /// `(X, ∂_r X)`; every generator here depends on `r` only.
    pub(crate) fn components(&self, r: f64) -> (Vec4, Vec4) {
        match *self {
            GeneratorField::Time => ([1.0, 0.0, 0.0, 0.0], [0.0; 4]),
            GeneratorField::Rotation => ([0.0, 0.0, 0.0, 1.0], [0.0; 4]),
            GeneratorField::Radial => ([0.0, 1.0, 0.0, 0.0], [0.0; 4]),
            GeneratorField::Profiled { profile } => {
                let (f, fp, _) = profile.eval(r);
                ([0.0, f, 0.0, 0.0], [0.0, fp, 0.0, 0.0])
            }
            GeneratorField::Corotating { blend } => {
                let (chi, dchi) = blend.cutoff(r);
                ([1.0, 0.0, 0.0, blend.omega * chi], [0.0, 0.0, 0.0, blend.omega * dchi])
            }
        }
    }
}

/// Symmetrized covariant derivative with both indices raised,
/// `∇^{(α}X^{β)} = ½ g^{αμ} g^{βν} (L_X g)_{μν}`.
///
/// The Lie-derivative form is used because every generator here has
/// components depending on `r` alone, and the metric is independent of
/// `t` and `φ`. For `T` and `Φ` it therefore vanishes identically.
pub fn deformation_tensor(
    gen: &GeneratorField,
    chart: &SpacetimeChart,
    x: &Point,
) -> Result<Tensor2, GeometryError> {
    gen.check_family(chart)?;
    chart.check_point(x)?;
    Ok(deformation_unchecked(gen, chart, x))
}

pub(crate) fn deformation_unchecked(gen: &GeneratorField, chart: &SpacetimeChart, x: &Point) -> Tensor2 {
    let g = chart.metric_unchecked(x);
    let dg = chart.metric_derivatives_unchecked(x);
    let (v, dv_r) = gen.components(x[R]);
    // (L_X g)_{μν} = X^λ ∂_λ g_{μν} + g_{λν} ∂_μ X^λ + g_{μλ} ∂_ν X^λ
    let mut lie = [[0.0; 4]; 4];
    let g_dx = g.apply(&dv_r); // g_{μλ} ∂_r X^λ
    for mu in 0..4 {
        for nu in 0..4 {
            let mut s = v[R] * dg[R].0[mu][nu] + v[THETA] * dg[THETA].0[mu][nu];
            if mu == R {
                s += g_dx[nu];
            }
            if nu == R {
                s += g_dx[mu];
            }
            lie[mu][nu] = 0.5 * s;
        }
    }
    let gi = super::chart::invert_stationary(&g);
    Tensor2(lie).congruent(&gi)
}

/// Grid of `(r, theta)` samples; `t` and `phi` are irrelevant for these charts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionGrid {
    pub radii: Vec<f64>,
    pub polar: Vec<f64>,
}

impl RegionGrid {
    /// `nr` radii uniform in `[r_lo, r_hi]` and `nth` polar angles spanning
    /// the chart interior with the given margin.
    pub fn uniform(r_lo: f64, r_hi: f64, nr: usize, nth: usize, axis_margin: f64) -> Self {
        let lin = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            match n {
                0 => vec![],
                1 => vec![0.5 * (lo + hi)],
                _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
            }
        };
        RegionGrid {
            radii: lin(r_lo, r_hi, nr),
            polar: lin(axis_margin, std::f64::consts::PI - axis_margin, nth),
        }
    }

    /// Radii from the chart floor outward.
    pub fn exterior(chart: &SpacetimeChart, r_hi: f64, nr: usize, nth: usize) -> Self {
        let lo = chart.r_min() * (1.0 + 1e-12);
        Self::uniform(lo, r_hi, nr, nth, 2.0 * chart.axis_margin())
    }

    fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.radii
            .iter()
            .flat_map(move |&r| self.polar.iter().map(move |&th| [0.0, r, th, 0.0]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelikeReport {
    /// `min -g(X, X)` over the grid.
    pub min_margin: f64,
    pub worst_point: Point,
    /// Every sample where `-g(X, X) <= 0`.
    pub violations: Vec<Point>,
    pub samples: usize,
}

impl TimelikeReport {
    pub fn is_timelike(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn timelike_scan(
    gen: &GeneratorField,
    chart: &SpacetimeChart,
    grid: &RegionGrid,
) -> Result<TimelikeReport, GeometryError> {
    gen.check_family(chart)?;
    if grid.radii.is_empty() || grid.polar.is_empty() {
        return Err(GeometryError::EmptyGrid);
    }
    let mut report = TimelikeReport {
        min_margin: f64::INFINITY,
        worst_point: [0.0; 4],
        violations: Vec::new(),
        samples: 0,
    };
    for x in grid.points() {
        let g = chart.metric(&x)?;
        let v = gen.components(x[R]).0;
        let margin = -g.contract(&v, &v);
        if margin < report.min_margin {
            report.min_margin = margin;
            report.worst_point = x;
        }
        if margin <= 0.0 {
            report.violations.push(x);
        }
        report.samples += 1;
    }
    Ok(report)
}

/// `sup` over the grid of the largest deformation-tensor component.
pub fn deformation_sup(
    gen: &GeneratorField,
    chart: &SpacetimeChart,
    grid: &RegionGrid,
) -> Result<f64, GeometryError> {
    gen.check_family(chart)?;
    let mut sup = 0.0_f64;
    for x in grid.points() {
        chart.check_point(&x)?;
        sup = sup.max(deformation_unchecked(gen, chart, &x).max_abs());
    }
    Ok(sup)
}

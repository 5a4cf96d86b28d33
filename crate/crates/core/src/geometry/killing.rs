use super::{Family, GeometryError, Point, SpacetimeChart, Tensor2, Vec4, PHI, R, T, THETA};

/// Irreducible Killing 2-tensor of the chart, in covariant components.
///
/// Kerr carries the Carter tensor
/// `K^{μν} = δ_θ^μ δ_θ^ν + sin⁻²θ ξ^μ ξ^ν − a² cos²θ g^{μν}` with
/// `ξ = a sin²θ ∂_t + ∂_φ`. At `a = 0` and in Minkowski this reduces to the
/// sum of squared rotation generators, whose contraction with a null
/// tangent is the total angular momentum squared in lowered components,
/// `γ̇_θ² + sin⁻²θ γ̇_φ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KillingTensor {
    chart: SpacetimeChart,
}

impl KillingTensor {
    pub fn for_chart(chart: &SpacetimeChart) -> Self {
        KillingTensor { chart: *chart }
    }

    pub fn chart(&self) -> &SpacetimeChart {
        &self.chart
    }

    /// `K_{αβ}` at `x`.
    pub fn components(&self, x: &Point) -> Result<Tensor2, GeometryError> {
        self.chart.check_point(x)?;
        Ok(self.components_unchecked(x))
    }

    pub(crate) fn components_unchecked(&self, x: &Point) -> Tensor2 {
        let g = self.chart.metric_unchecked(x);
        let (s, c) = x[THETA].sin_cos();
        let s2 = s * s;
        let a = match self.chart.family() {
            Family::Kerr => self.chart.spin(),
            _ => 0.0,
        };
        // contravariant form first, then lower both indices
        let mut up = [[0.0; 4]; 4];
        up[THETA][THETA] = 1.0;
        let xi: Vec4 = [a * s2, 0.0, 0.0, 1.0];
        for i in [T, PHI] {
            for j in [T, PHI] {
                up[i][j] += xi[i] * xi[j] / s2;
            }
        }
        if a != 0.0 {
            let gi = super::chart::invert_stationary(&g);
            let w = a * a * c * c;
            for i in 0..4 {
                for j in 0..4 {
                    up[i][j] -= w * gi.0[i][j];
                }
            }
        }
        Tensor2(up).congruent(&g)
    }

    /// `K_{αβ} v^α v^β`.
    pub fn contract(&self, x: &Point, v: &Vec4) -> Result<f64, GeometryError> {
        Ok(self.components(x)?.contract(v, v))
    }
}

/// Finite-difference audit of `∇_{(γ}K_{αβ)}` at `x`.
///
/// Returns the largest component of the fully symmetrized covariant
/// derivative, normalized by `max|K| / r`. The tensor components do not
/// depend on `t` or `φ`, so only `r` and `θ` are differenced (central, with
/// the given step scaled by `r` and by 1 respectively).
pub fn killing_residual(chart: &SpacetimeChart, x: &Point, step: f64) -> Result<f64, GeometryError> {
    let k = KillingTensor::for_chart(chart);
    let k0 = k.components(x)?;
    let gamma = chart.christoffel(x)?;
    let mut dk = [Tensor2::ZERO; 4];
    for (dir, h) in [(R, step * x[R]), (THETA, step)] {
        let mut xp = *x;
        let mut xm = *x;
        xp[dir] += h;
        xm[dir] -= h;
        let kp = k.components(&xp)?;
        let km = k.components(&xm)?;
        dk[dir] = kp.sub(&km).scaled(0.5 / h);
    }
    // ∇_c K_ab = ∂_c K_ab − Γ^l_{ca} K_lb − Γ^l_{cb} K_al
    let nabla = |c: usize, a: usize, b: usize| -> f64 {
        let mut v = dk[c].0[a][b];
        for l in 0..4 {
            v -= gamma.0[l][c][a] * k0.0[l][b] + gamma.0[l][c][b] * k0.0[a][l];
        }
        v
    };
    let scale = k0.max_abs() / x[R];
    let mut worst = 0.0_f64;
    for c in 0..4 {
        for a in c..4 {
            for b in a..4 {
                let sym = (nabla(c, a, b) + nabla(a, b, c) + nabla(b, c, a)) / 3.0;
                worst = worst.max(sym.abs());
            }
        }
    }
    Ok(worst / scale)
}

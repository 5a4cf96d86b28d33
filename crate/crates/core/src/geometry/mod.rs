//! Exterior spacetime charts and the tensors evaluated on them.
//!
//! Coordinates are always `(t, r, theta, phi)`: Boyer–Lindquist for Kerr and
//! the standard spherical chart for Schwarzschild and Minkowski. Every
//! tensor is returned in the coordinate basis with the index placement
//! stated on the function; raising and lowering is left to the caller.

mod chart;
mod generator;
mod killing;

pub use chart::{Christoffel, Family, SpacetimeChart, DEFAULT_AXIS_MARGIN, DEFAULT_FLOOR_FACTOR};
pub use generator::{
    deformation_sup, deformation_tensor, timelike_scan, CorotatingBlend, GeneratorField, RadialProfile, RegionGrid,
    TimelikeReport,
};
pub use killing::{killing_residual, KillingTensor};
pub(crate) use generator::deformation_unchecked;

use thiserror::Error;

/// A contravariant or covariant 4-vector in chart components.
pub type Vec4 = [f64; 4];

/// Chart point `(t, r, theta, phi)`.
pub type Point = [f64; 4];

pub const T: usize = 0;
pub const R: usize = 1;
pub const THETA: usize = 2;
pub const PHI: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point r = {r}, theta = {theta} lies outside the exterior chart ({reason})")]
    OutOfChart { r: f64, theta: f64, reason: &'static str },
    #[error("generator {generator} is not defined on a {family:?} chart")]
    FamilyMismatch { generator: &'static str, family: Family },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("scan grid is empty")]
    EmptyGrid,
}

/// Two-index tensor in chart components. Index placement is fixed by
/// whichever function produced it.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tensor2(pub [[f64; 4]; 4]);

impl Tensor2 {
    pub const ZERO: Tensor2 = Tensor2([[0.0; 4]; 4]);

    pub fn diagonal(d: [f64; 4]) -> Self {
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            m[i][i] = d[i];
        }
        Tensor2(m)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    /// `T_{ij} u^i v^j` (or the contravariant analogue).
    pub fn contract(&self, u: &Vec4, v: &Vec4) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            if u[i] == 0.0 {
                continue;
            }
            for j in 0..4 {
                s += self.0[i][j] * u[i] * v[j];
            }
        }
        s
    }

    /// `T_{ij} v^j`.
    pub fn apply(&self, v: &Vec4) -> Vec4 {
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    /// `A T A^T` for symmetric `T`; the result is exactly symmetric.
    pub fn congruent(&self, a: &Tensor2) -> Tensor2 {
        let mut tmp = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                tmp[i][j] = (0..4).map(|k| a.0[i][k] * self.0[k][j]).sum();
            }
        }
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in i..4 {
                let v = (0..4).map(|k| tmp[i][k] * a.0[j][k]).sum();
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        Tensor2(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest `|T_{ij} - T_{ji}|`.
    pub fn asymmetry(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..4 {
            for j in 0..i {
                m = m.max((self.0[i][j] - self.0[j][i]).abs());
            }
        }
        m
    }

    pub fn scaled(&self, c: f64) -> Tensor2 {
        let mut out = self.0;
        out.iter_mut().flatten().for_each(|v| *v *= c);
        Tensor2(out)
    }

    pub fn sub(&self, other: &Tensor2) -> Tensor2 {
        let mut out = self.0;
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] -= other.0[i][j];
            }
        }
        Tensor2(out)
    }
}

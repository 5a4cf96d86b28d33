use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::tortoise::tortoise;
use super::WaveError;

/// Mode labels and potential for `ψ_tt = ψ_{r*r*} - (V_R + i V_I) ψ`.
///
/// `V_R = H (l(l+1)/r² + (1 - s²) 2M/r³)` with `H = 1 - 2M/r`, and the
/// optional imaginary bump `V_I = ε exp(-(r* - r*₃)² / 2w²)` sits at the
/// tortoise radius of `r = 3M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub spin: u8,
    pub l: u32,
    #[serde(default)]
    pub m: i32,
    pub mass: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_width")]
    pub width: f64,
}

fn default_width() -> f64 {
    1.0
}

impl PotentialSpec {
    /// Real potential on a Schwarzschild background of mass `mass`.
    pub fn real(spin: u8, l: u32, mass: f64) -> Self {
        PotentialSpec { spin, l, m: 0, mass, epsilon: 0.0, width: default_width() }
    }

    pub fn with_bump(mut self, epsilon: f64, width: f64) -> Self {
        self.epsilon = epsilon;
        self.width = width;
        self
    }

    pub fn validate(&self) -> Result<(), WaveError> {
        let bad = |msg: String| Err(WaveError::InvalidSpec(msg));
        if self.spin > 2 {
            return bad(format!("spin {} not in {{0, 1, 2}}", self.spin));
        }
        if self.l < self.spin as u32 {
            return bad(format!("l = {} is below spin {}", self.l, self.spin));
        }
        if self.m.unsigned_abs() > self.l {
            return bad(format!("|m| = {} exceeds l = {}", self.m.abs(), self.l));
        }
        if !(self.mass.is_finite() && self.mass >= 0.0) {
            return bad(format!("mass {} must be finite and >= 0", self.mass));
        }
        if !self.epsilon.is_finite() || !(self.width.is_finite() && self.width > 0.0) {
            return bad("bump amplitude must be finite and width > 0".into());
        }
        if self.epsilon != 0.0 && self.mass == 0.0 {
            return bad("the imaginary bump needs M > 0 to locate r = 3M".into());
        }
        Ok(())
    }

    /// Tortoise radius of the photon sphere, the bump center.
    pub fn trapping_rstar(&self) -> f64 {
        tortoise(3.0 * self.mass, self.mass)
    }

    /// `(V_R, dV_R/dr)`. Callers guarantee `r` is in range.
    pub fn real_part(&self, r: f64) -> (f64, f64) {
        let m = self.mass;
        let ll = (self.l * (self.l + 1)) as f64;
        let curv = (1.0 - (self.spin as f64).powi(2)) * 2.0 * m;
        let h = 1.0 - 2.0 * m / r;
        let w = ll / (r * r) + curv / (r * r * r);
        let dw = -2.0 * ll / (r * r * r) - 3.0 * curv / (r * r * r * r);
        (h * w, 2.0 * m / (r * r) * w + h * dw)
    }

    /// `V_I` at tortoise coordinate `x`.
    pub fn imag_part(&self, x: f64) -> f64 {
        if self.epsilon == 0.0 {
            return 0.0;
        }
        let d = (x - self.trapping_rstar()) / self.width;
        self.epsilon * (-0.5 * d * d).exp()
    }
}

/// `V_R(r) + i V_I(r*(r))`.
pub fn effective_potential(spec: &PotentialSpec, r: f64) -> Result<Complex64, WaveError> {
    spec.validate()?;
    if !(r > 2.0 * spec.mass && r.is_finite()) {
        return Err(WaveError::OutOfRange { r, mass: spec.mass });
    }
    let im = spec.imag_part(tortoise(r, spec.mass));
    Ok(Complex64::new(spec.real_part(r).0, im))
}

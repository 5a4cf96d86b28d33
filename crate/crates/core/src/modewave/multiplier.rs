use serde::{Deserialize, Serialize};

use super::WaveError;

/// Radial weight `f` of the multiplier `f ∂_{r*}`, with derivatives taken in `r*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MultiplierProfile {
    Constant { value: f64 },
    /// `f = 1 - 3M/r`, differentiated through `dr/dr* = H`.
    PhotonSphere,
    /// `f = atan((r* - center) / width)`.
    Arctan { center: f64, width: f64 },
}

impl MultiplierProfile {
    pub fn check(&self, mass: f64) -> Result<(), WaveError> {
        match *self {
            MultiplierProfile::PhotonSphere if mass <= 0.0 => Err(WaveError::ProfileUndefined(
                "1 - 3M/r needs a black-hole background (M > 0)".into(),
            )),
            MultiplierProfile::Constant { value } if !value.is_finite() => {
                Err(WaveError::ProfileUndefined(format!("constant {value}")))
            }
            MultiplierProfile::Arctan { center, width } if !(center.is_finite() && width > 0.0) => {
                Err(WaveError::ProfileUndefined(format!("arctan center {center}, width {width}")))
            }
            _ => Ok(()),
        }
    }

    /// `[f, f', f'', f''']` in `r*` at a node with radius `r`, lapse `h`
    /// and tortoise coordinate `x`.
    pub fn eval(&self, mass: f64, r: f64, h: f64, x: f64) -> [f64; 4] {
        match *self {
            MultiplierProfile::Constant { value } => [value, 0.0, 0.0, 0.0],
            MultiplierProfile::PhotonSphere => {
                let m = mass;
                let (r2, r3, r4) = (r * r, r * r * r, r * r * r * r);
                let (f1, f2, f3) = (3.0 * m / r2, -6.0 * m / r3, 18.0 * m / r4);
                let (h1, h2) = (2.0 * m / r2, -4.0 * m / r3);
                [
                    1.0 - 3.0 * m / r,
                    f1 * h,
                    f2 * h * h + f1 * h1 * h,
                    f3 * h * h * h + 3.0 * f2 * h1 * h * h + f1 * (h2 * h * h + h1 * h1 * h),
                ]
            }
            MultiplierProfile::Arctan { center, width } => {
                let z = (x - center) / width;
                let d = 1.0 / (1.0 + z * z);
                [
                    z.atan(),
                    d / width,
                    -2.0 * z * d * d / (width * width),
                    (6.0 * z * z - 2.0) * d * d * d / (width * width * width),
                ]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modewave::tortoise::{radius_and_lapse, tortoise};

    #[test]
    fn vanishes_at_photon_sphere() {
        let x = tortoise(3.0, 1.0);
        let (r, h) = radius_and_lapse(x, 1.0);
        assert!(MultiplierProfile::PhotonSphere.eval(1.0, r, h, x)[0].abs() < 1e-14);
    }

    #[test]
    fn chain_rule_against_differences() {
        let eval = |p: &MultiplierProfile, x: f64| {
            let (r, h) = radius_and_lapse(x, 1.0);
            p.eval(1.0, r, h, x)
        };
        for p in [MultiplierProfile::PhotonSphere, MultiplierProfile::Arctan { center: 1.0, width: 3.0 }] {
            for x in [-10.0, 0.0, 1.6, 12.0] {
                let d = 1e-4;
                let (fp, fm, f0) = (eval(&p, x + d), eval(&p, x - d), eval(&p, x));
                for k in 0..3 {
                    let fd = (fp[k] - fm[k]) / (2.0 * d);
                    assert!((fd - f0[k + 1]).abs() < 1e-7, "{p:?} x={x} k={k}: {fd} {}", f0[k + 1]);
                }
            }
        }
    }

    #[test]
    fn flat_background_rejected() {
        assert!(matches!(MultiplierProfile::PhotonSphere.check(0.0), Err(WaveError::ProfileUndefined(_))));
        assert!(MultiplierProfile::Constant { value: 1.0 }.check(0.0).is_ok());
    }
}

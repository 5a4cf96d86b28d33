/// Tortoise coordinate `r* = r + 2M ln(r/2M - 1)`; `r* = r` when `M = 0`.
pub fn tortoise(r: f64, mass: f64) -> f64 {
    if mass == 0.0 {
        return r;
    }
    r + 2.0 * mass * (r / (2.0 * mass) - 1.0).ln()
}

/// Inverse of [`tortoise`]: returns `r`.
pub fn r_of_rstar(x: f64, mass: f64) -> f64 {
    radius_and_lapse(x, mass).0
}

/// `(r, H)` with `H = 1 - 2M/r`, both accurate deep toward the horizon.
///
/// Writing `u = r/2M - 1 = e^z`, the relation becomes `e^z + z = x/2M - 1`,
/// which is solved by Newton's method kept inside a sign-change bracket.
/// `H = u / (1 + u)` then never suffers cancellation.
pub fn radius_and_lapse(x: f64, mass: f64) -> (f64, f64) {
    if mass == 0.0 {
        return (x, 1.0);
    }
    let c = x / (2.0 * mass) - 1.0;
    let (mut lo, mut hi) = if c <= 1.0 { (c - std::f64::consts::E, c) } else { (0.0, c.ln()) };
    let mut z = if c <= 1.0 { c - c.exp().min(1.0) * 0.5 } else { c.ln() - c.ln() / (1.0 + c) };
    for _ in 0..100 {
        let ez = z.exp();
        let phi = ez + z - c;
        if phi == 0.0 {
            break;
        }
        if phi < 0.0 {
            lo = z;
        } else {
            hi = z;
        }
        let mut next = z - phi / (ez + 1.0);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - z).abs() <= 1e-16 * (1.0 + z.abs());
        z = next;
        if done || hi - lo <= 1e-16 * (1.0 + z.abs()) {
            break;
        }
    }
    let u = z.exp();
    (2.0 * mass * (1.0 + u), u / (1.0 + u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(tortoise(4.0, 1.0), 4.0);
        assert!((r_of_rstar(4.0, 1.0) - 4.0).abs() < 1e-13);
        assert!((tortoise(3.0, 1.0) - 1.6137056388801094).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        for m in [0.5, 1.0, 3.0] {
            for k in 0..200 {
                let r = 2.0 * m * (1.0 + 10f64.powf(-8.0 + 12.0 * k as f64 / 199.0));
                let back = r_of_rstar(tortoise(r, m), m);
                assert!((back - r).abs() <= 1e-12 * r, "m={m} r={r} back={back}");
            }
        }
    }

    #[test]
    fn lapse_near_horizon() {
        let (r, h) = radius_and_lapse(-40.0, 1.0);
        assert!(r > 2.0);
        assert!((h - (1.0 - 2.0 / r)).abs() < 1e-15);
        // r rounds to 2M here, but H ≈ e^{x/2M - 1} is still resolved
        let (r, h) = radius_and_lapse(-200.0, 1.0);
        assert_eq!(r, 2.0);
        assert!((h / (-101.0_f64).exp() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn flat_space_identity() {
        assert_eq!(radius_and_lapse(7.5, 0.0), (7.5, 1.0));
    }
}

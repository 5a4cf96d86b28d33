use std::f64::consts::FRAC_PI_2;

use horizon_lab::geodesic::{
    find_trapped, generator_energy, integrate_null, make_null_initial, quadratic_invariant, random_null_states,
    GeodesicError, IntegratorConfig, OrbitSelector, OrbitSense, RadialPotential, RadialPotentialSpec, RandomNullSpec,
    Termination,
};
use horizon_lab::geometry::{GeneratorField, KillingTensor, SpacetimeChart, R};
use proptest::prelude::*;

/// Equatorial circular photon radius, `r = 2M(1 + cos(2/3 arccos(∓a/M)))`.
fn equatorial_radius(m: f64, a: f64, prograde: bool) -> f64 {
    let s = if prograde { -1.0 } else { 1.0 };
    2.0 * m * (1.0 + ((2.0 / 3.0) * (s * a / m).acos()).cos())
}

/// Constants of a spherical photon orbit at radius `r`, with `E = 1`.
fn orbit_constants(m: f64, a: f64, r: f64) -> (f64, f64) {
    let xi = (r * r * (3.0 * m - r) - a * a * (r + m)) / (a * (r - m));
    let eta = r.powi(3) * (4.0 * a * a * m - r * (r - 3.0 * m).powi(2)) / (a * a * (r - m).powi(2));
    (xi, eta)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn equatorial_orbits_match_closed_form() {
    for a in [0.05, 0.3, 0.5, 0.8, 0.95] {
        let chart = SpacetimeChart::kerr(1.0, a).unwrap();
        for (sense, pro) in [(OrbitSense::Prograde, true), (OrbitSense::Retrograde, false)] {
            let t = find_trapped(&chart, None, OrbitSelector::equatorial(sense)).unwrap();
            let expect = equatorial_radius(1.0, a, pro);
            assert!((t.r - expect).abs() < 1e-10, "a={a} {sense:?}: {} vs {expect}", t.r);
            let (xi, _) = orbit_constants(1.0, a, expect);
            assert!((t.xi() - xi).abs() < 1e-8 * xi.abs().max(1.0), "xi {} vs {xi}", t.xi());
            assert!(t.residual < 1e-10 && t.slope_residual < 1e-10);
        }
    }
}

#[test]
fn non_equatorial_orbits_match_bisection_oracle() {
    let (m, a) = (1.0, 0.5);
    let chart = SpacetimeChart::kerr(m, a).unwrap();
    let r_mid = 0.5 * (3.0 * m + (9.0 * m * m - 8.0 * a * a).sqrt());
    let (r_pro, r_retro) = (equatorial_radius(m, a, true), equatorial_radius(m, a, false));
    for eta in [0.5, 3.0, 10.0, 20.0] {
        let f = |r: f64| orbit_constants(m, a, r).1 - eta;
        for (sense, lo, hi) in [(OrbitSense::Prograde, r_pro, r_mid), (OrbitSense::Retrograde, r_mid, r_retro)] {
            let expect = bisect(f, lo, hi);
            let t = find_trapped(&chart, None, OrbitSelector { sense, eta }).unwrap();
            assert!((t.r - expect).abs() < 1e-9, "eta={eta} {sense:?}: {} vs {expect}", t.r);
            assert!((t.eta() - eta).abs() < 1e-12);
            let (xi, _) = orbit_constants(m, a, expect);
            assert!((t.xi() - xi).abs() < 1e-7, "xi {} vs {xi}", t.xi());
            assert!(t.residual < 1e-10 && t.slope_residual < 1e-10, "{t:?}");
        }
    }
}

#[test]
fn small_spin_is_continuous() {
    let chart = SpacetimeChart::kerr(1.0, 1e-6).unwrap();
    for sense in [OrbitSense::Prograde, OrbitSense::Retrograde] {
        let t = find_trapped(&chart, None, OrbitSelector::equatorial(sense)).unwrap();
        assert!((t.r - 3.0).abs() < 1e-5, "{sense:?}: {}", t.r);
    }
    let schw = SpacetimeChart::schwarzschild(2.0).unwrap();
    let t = find_trapped(&schw, None, OrbitSelector { sense: OrbitSense::Retrograde, eta: 50.0 }).unwrap();
    assert_eq!(t.r, 6.0);
    assert!((t.xi() + (108.0_f64 - 50.0).sqrt()).abs() < 1e-12);
}

#[test]
fn trapping_needs_a_black_hole() {
    let flat = SpacetimeChart::minkowski();
    let err = find_trapped(&flat, None, OrbitSelector::equatorial(OrbitSense::Prograde)).unwrap_err();
    assert!(matches!(err, GeodesicError::UnsupportedChart(_)));
    let chart = SpacetimeChart::kerr(1.0, 0.3).unwrap();
    let err = find_trapped(&chart, Some((5.0, 8.0)), OrbitSelector::equatorial(OrbitSense::Prograde)).unwrap_err();
    assert!(matches!(err, GeodesicError::NoTrappedOrbit { .. }));
}

#[test]
fn turning_point_matches_radial_root() {
    let chart = SpacetimeChart::kerr(1.0, 0.4).unwrap();
    let s = make_null_initial(&chart, [0.0, 15.0, 1.3, 0.0], [-1.0, 0.01, 0.07]).unwrap();
    let traj =
        integrate_null(&s, &chart, 60.0, &IntegratorConfig { sample_spacing: Some(0.01), ..Default::default() })
            .unwrap();
    let r_min = traj.samples.iter().map(|x| x.state.position[R]).fold(f64::INFINITY, f64::min);
    let pot = RadialPotential::new(RadialPotentialSpec::from_state(&chart, &s).unwrap()).unwrap();
    let roots = pot.exterior_roots().unwrap();
    let outer = roots.iter().map(|x| x.r).fold(f64::NEG_INFINITY, f64::max);
    // sampled minimum sits within one sample of the true turning point
    assert!(r_min >= outer - 1e-9 && r_min - outer < 1e-4, "{r_min} vs {outer}");
}

#[test]
fn random_batch_keeps_null_constraint() {
    let chart = SpacetimeChart::kerr(1.0, 0.9).unwrap();
    let cfg = IntegratorConfig::default();
    for s in random_null_states(&chart, &RandomNullSpec::new(10, 99, 4.0, 30.0)).unwrap() {
        let traj = integrate_null(&s, &chart, 100.0, &cfg).unwrap();
        let per_span = 10.0 * cfg.rtol * traj.span().max(1.0);
        assert!(traj.max_null_residual() < per_span, "{} >= {per_span}", traj.max_null_residual());
        assert!(traj.lambdas().collect::<Vec<_>>().windows(2).all(|w| w[1] > w[0]));
        assert!(matches!(traj.termination, Termination::SpanReached | Termination::OutOfChart));
    }
}

#[test]
fn photon_orbit_keeps_radius() {
    let chart = SpacetimeChart::schwarzschild(1.0).unwrap();
    let s = make_null_initial(&chart, [0.0, 3.0, FRAC_PI_2, 0.0], [0.0, 0.0, 0.2]).unwrap();
    let traj = integrate_null(&s, &chart, 20.0, &IntegratorConfig::default()).unwrap();
    for smp in &traj.samples {
        assert!((smp.state.position[R] - 3.0).abs() < 1e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_the_tangent_scales_the_invariants(
        c in 0.05f64..20.0,
        r in 3.0f64..40.0,
        th in 0.3f64..2.8,
        vr in -1.0f64..1.0,
        vth in -0.1f64..0.1,
        vph in 0.01f64..0.1,
    ) {
        let chart = SpacetimeChart::kerr(1.0, 0.6).unwrap();
        let x = [0.0, r, th, 0.0];
        let base = make_null_initial(&chart, x, [vr, vth, vph]);
        prop_assume!(base.is_ok());
        let base = base.unwrap();
        let scaled = make_null_initial(&chart, x, [c * vr, c * vth, c * vph]).unwrap();
        let k = KillingTensor::for_chart(&chart);
        let cfg = IntegratorConfig { sample_spacing: Some(1.0), ..Default::default() };
        let one = integrate_null(&base, &chart, 2.0, &cfg).unwrap();
        let two = integrate_null(&scaled, &chart, 2.0 / c, &IntegratorConfig { sample_spacing: Some(1.0 / c), ..cfg }).unwrap();
        for gen in [GeneratorField::Time, GeneratorField::Rotation] {
            let e1 = generator_energy(&one, &gen).unwrap().column("e").unwrap()[0];
            let e2 = generator_energy(&two, &gen).unwrap().column("e").unwrap()[0];
            prop_assert!((e2 - c * e1).abs() <= 1e-13 * (c * e1).abs().max(1e-300) + 1e-15);
        }
        let k1 = quadratic_invariant(&one, &k).unwrap().column("K").unwrap()[0];
        let k2 = quadratic_invariant(&two, &k).unwrap().column("K").unwrap()[0];
        prop_assert!((k2 - c * c * k1).abs() <= 1e-12 * (c * c * k1).abs());
        // same curve: positions agree at matching affine times
        let p1 = one.last().state.position;
        let p2 = two.last().state.position;
        prop_assert!((p1[R] - p2[R]).abs() < 1e-7 * p1[R]);
    }
}

use std::f64::consts::PI;

use horizon_lab::geometry::{
    deformation_tensor, killing_residual, GeneratorField, KillingTensor, SpacetimeChart, PHI, R, T, THETA,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

type M4 = [[f64; 4]; 4];

/// Boyer-Lindquist metric written out directly.
fn kerr_metric(m: f64, a: f64, r: f64, th: f64) -> M4 {
    let (s, c) = th.sin_cos();
    let sigma = r * r + a * a * c * c;
    let delta = r * r - 2.0 * m * r + a * a;
    let mut g = [[0.0; 4]; 4];
    g[0][0] = -(1.0 - 2.0 * m * r / sigma);
    g[0][3] = -2.0 * m * a * r * s * s / sigma;
    g[3][0] = g[0][3];
    g[1][1] = sigma / delta;
    g[2][2] = sigma;
    g[3][3] = (r * r + a * a + 2.0 * m * a * a * r * s * s / sigma) * s * s;
    g
}

fn invert(mut a: M4) -> M4 {
    let mut inv = [[0.0; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..4 {
        let p = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, p);
        inv.swap(col, p);
        let d = a[col][col];
        for k in 0..4 {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for row in 0..4 {
            if row != col {
                let f = a[row][col];
                for k in 0..4 {
                    a[row][k] -= f * a[col][k];
                    inv[row][k] -= f * inv[col][k];
                }
            }
        }
    }
    inv
}

/// `Γ^a_{bc}` from central differences of the closed-form metric.
fn fd_christoffel(m: f64, a: f64, r: f64, th: f64) -> [[[f64; 4]; 4]; 4] {
    let mut dg = [[[0.0; 4]; 4]; 4];
    let hr = 1e-5 * r;
    let ht = 1e-5;
    let gp = kerr_metric(m, a, r + hr, th);
    let gm = kerr_metric(m, a, r - hr, th);
    let tp = kerr_metric(m, a, r, th + ht);
    let tm = kerr_metric(m, a, r, th - ht);
    for i in 0..4 {
        for j in 0..4 {
            dg[R][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * hr);
            dg[THETA][i][j] = (tp[i][j] - tm[i][j]) / (2.0 * ht);
        }
    }
    let gi = invert(kerr_metric(m, a, r, th));
    let mut gam = [[[0.0; 4]; 4]; 4];
    for up in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let mut s = 0.0;
                for l in 0..4 {
                    s += 0.5 * gi[up][l] * (dg[b][l][c] + dg[c][l][b] - dg[l][b][c]);
                }
                gam[up][b][c] = s;
            }
        }
    }
    gam
}

fn random_points(chart: &SpacetimeChart, n: usize, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = rng.random_range(chart.r_min() * 1.05..50.0);
            let th = rng.random_range(0.05..PI - 0.05);
            [rng.random_range(-10.0..10.0), r, th, rng.random_range(0.0..2.0 * PI)]
        })
        .collect()
}

#[test]
fn metric_matches_closed_form() {
    for (m, a) in [(1.0, 0.0), (1.0, 0.3), (2.0, 1.7), (0.5, -0.45)] {
        let chart = SpacetimeChart::new(horizon_lab::geometry::Family::Kerr, m, a).unwrap();
        for x in random_points(&chart, 200, 11) {
            let g = chart.metric(&x).unwrap();
            let o = kerr_metric(m, a, x[R], x[THETA]);
            for i in 0..4 {
                for j in 0..4 {
                    let scale = o[i][j].abs().max(1.0);
                    assert!((g.get(i, j) - o[i][j]).abs() < 1e-13 * scale, "m={m} a={a} x={x:?} ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn christoffels_match_finite_differences_on_1000_points() {
    let chart = SpacetimeChart::kerr(1.0, 0.7).unwrap();
    let mut worst = 0.0_f64;
    for x in random_points(&chart, 1000, 7) {
        let exact = chart.christoffel(&x).unwrap();
        let fd = fd_christoffel(1.0, 0.7, x[R], x[THETA]);
        let scale = fd.iter().flatten().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
        for up in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    worst = worst.max((exact.get(up, b, c) - fd[up][b][c]).abs() / scale);
                }
            }
        }
    }
    assert!(worst < 1e-7, "worst relative deviation {worst:e}");
}

#[test]
fn christoffels_are_symmetric_in_lower_indices() {
    let chart = SpacetimeChart::kerr(1.0, 0.9).unwrap();
    for x in random_points(&chart, 100, 3) {
        let g = chart.christoffel(&x).unwrap();
        for up in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    assert_eq!(g.get(up, b, c), g.get(up, c, b));
                }
            }
        }
    }
}

#[test]
fn kerr_tends_to_schwarzschild() {
    let schw = SpacetimeChart::schwarzschild(1.0).unwrap();
    let kerr = SpacetimeChart::kerr(1.0, 1e-6).unwrap();
    for x in random_points(&schw, 300, 5) {
        let (gs, gk) = (schw.christoffel(&x).unwrap(), kerr.christoffel(&x).unwrap());
        let (ms, mk) = (schw.metric(&x).unwrap(), kerr.metric(&x).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                assert!((ms.get(i, j) - mk.get(i, j)).abs() <= 1e-5 * ms.get(i, j).abs().max(1.0));
                for k in 0..4 {
                    assert!((gs.get(i, j, k) - gk.get(i, j, k)).abs() <= 1e-5 * gs.get(i, j, k).abs().max(1.0));
                }
            }
        }
    }
}

#[test]
fn schwarzschild_christoffels_closed_form() {
    let m = 1.3;
    let chart = SpacetimeChart::schwarzschild(m).unwrap();
    for x in random_points(&chart, 100, 9) {
        let (r, th) = (x[R], x[THETA]);
        let f = 1.0 - 2.0 * m / r;
        let g = chart.christoffel(&x).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-13 * b.abs().max(1.0);
        assert!(close(g.get(T, T, R), m / (r * r * f)));
        assert!(close(g.get(R, T, T), m * f / (r * r)));
        assert!(close(g.get(R, R, R), -m / (r * r * f)));
        assert!(close(g.get(R, THETA, THETA), -r * f));
        assert!(close(g.get(THETA, R, THETA), 1.0 / r));
        assert!(close(g.get(PHI, THETA, PHI), th.cos() / th.sin()));
        assert!(close(g.get(THETA, PHI, PHI), -th.sin() * th.cos()));
    }
}

#[test]
fn carter_tensor_is_killing() {
    for a in [0.0, 0.3, 0.8] {
        let chart = SpacetimeChart::kerr(1.0, a).unwrap();
        for x in random_points(&chart, 50, 13) {
            let res = killing_residual(&chart, &x, 1e-5).unwrap();
            assert!(res < 1e-7, "a={a} x={x:?} residual {res:e}");
        }
    }
}

#[test]
fn carter_contraction_matches_constants_of_motion() {
    let (m, a) = (1.0, 0.6);
    let chart = SpacetimeChart::kerr(m, a).unwrap();
    let k = KillingTensor::for_chart(&chart);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for x in random_points(&chart, 100, 17) {
        let v = horizon_lab::geodesic::make_null_initial(
            &chart,
            x,
            [rng.random_range(-1.0..1.0), rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1)],
        );
        let Ok(v) = v else { continue };
        let g = kerr_metric(m, a, x[R], x[THETA]);
        let low: Vec<f64> = (0..4).map(|i| (0..4).map(|j| g[i][j] * v.velocity[j]).sum()).collect();
        let (e, l) = (-low[T], low[PHI]);
        let (s, c) = x[THETA].sin_cos();
        let q = low[THETA].powi(2) + c * c * (l * l / (s * s) - a * a * e * e);
        let expect = q + (l - a * e).powi(2);
        let got = k.contract(&x, &v.velocity).unwrap();
        assert!((got - expect).abs() < 1e-10 * expect.abs().max(1.0), "{got} vs {expect}");
    }
}

#[test]
fn killing_generators_have_zero_deformation() {
    let chart = SpacetimeChart::kerr(1.0, 0.5).unwrap();
    for x in random_points(&chart, 200, 19) {
        for gen in [GeneratorField::Time, GeneratorField::Rotation] {
            let d = deformation_tensor(&gen, &chart, &x).unwrap();
            assert!(d.max_abs() < 1e-12, "{} at {x:?}", gen.name());
        }
    }
}

#[test]
fn radial_field_deformation_in_flat_space() {
    // ∂_r in flat space: π^{θθ} = 1/r³, π^{φφ} = 1/(r³ sin²θ), rest zero
    let chart = SpacetimeChart::minkowski();
    for x in random_points(&SpacetimeChart::schwarzschild(1.0).unwrap(), 100, 23) {
        let d = deformation_tensor(&GeneratorField::Radial, &chart, &x).unwrap();
        let (r, s) = (x[R], x[THETA].sin());
        assert!((d.get(THETA, THETA) - 1.0 / r.powi(3)).abs() < 1e-12 / r.powi(3));
        assert!((d.get(PHI, PHI) - 1.0 / (r.powi(3) * s * s)).abs() < 1e-12 * (1.0 / (r.powi(3) * s * s)));
        assert_eq!(d.get(T, T), 0.0);
        assert_eq!(d.get(R, R), 0.0);
    }
}

#[test]
fn rejects_invalid_charts() {
    assert!(SpacetimeChart::kerr(1.0, 1.0).is_err());
    assert!(SpacetimeChart::kerr(1.0, -1.2).is_err());
    assert!(SpacetimeChart::schwarzschild(0.0).is_err());
    let chart = SpacetimeChart::kerr(1.0, 0.5).unwrap();
    assert!(chart.metric(&[0.0, chart.horizon_radius(), 1.0, 0.0]).is_err());
    assert!(chart.metric(&[0.0, 5.0, 0.0, 0.0]).is_err());
}

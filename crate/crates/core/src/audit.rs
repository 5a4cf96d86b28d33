//! Built-in acceptance presets.
//!
//! Each criterion runs a fixed scenario, records the numbers it measured and
//! compares them with the tolerances below. The same code backs the `audit`
//! subcommand and the acceptance test target.

use std::f64::consts::FRAC_PI_2;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::geodesic::{
    eg2_audit, eg2_kernel, energy_rate, find_trapped, generator_energy, integrate_null, make_null_initial,
    quadratic_invariant, radial_momentum, random_null_states, IntegratorConfig, NullGeodesicState, OrbitSense,
    OrbitSelector, RandomNullSpec, Trajectory,
};
use crate::geometry::{
    deformation_tensor, timelike_scan, GeneratorField, KillingTensor, RadialProfile, RegionGrid, SpacetimeChart, PHI,
    R, THETA,
};
use crate::modewave::{
    evolve, order_n_series, BoundaryRule, Grid, LedgerOptions, ModeState, Motion, MultiplierProfile, PotentialSpec,
    WavePacket, DEFAULT_COURANT,
};

pub const CONSERVATION_TOL: f64 = 1e-8;
pub const EG2_TOL: f64 = 1e-6;
pub const RATIO_RANGE: (f64, f64) = (3.0, 5.0);
pub const MULTIPLIER_TOL: f64 = 1e-6;
pub const ORBIT_RADIUS_TOL: f64 = 1e-3;
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;
pub const SMALL_SPIN_TOL: f64 = 1e-5;
pub const MONOTONE_SLACK: f64 = 1e-8;
pub const MODE_DRIFT_TOL: f64 = 1e-6;
pub const STABILITY_TOL: f64 = 0.2;
pub const DEFORMATION_ZERO_TOL: f64 = 1e-12;
pub const LINEARITY_TOL: f64 = 0.15;
pub const DECAY_THRESHOLD: f64 = 0.1;

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "kerr conservation"),
    (2, "energy change identity"),
    (3, "minkowski radial multiplier"),
    (4, "trapping"),
    (5, "radial momentum monotonicity"),
    (6, "mode energy conservation"),
    (7, "multiplier identity for modes"),
    (8, "integrated bulk bound"),
    (9, "complex potential balance"),
    (10, "corotating generator"),
    (11, "strengthened energies"),
    (12, "local energy decay"),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub measurements: Vec<Measurement>,
    /// Reasons for failure, empty when passed.
    pub failures: Vec<String>,
}

impl CriterionReport {
    fn new(id: u8) -> Self {
        let title = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
        CriterionReport { id, title: title.into(), passed: true, measurements: vec![], failures: vec![] }
    }

    fn record(&mut self, name: impl Into<String>, value: f64) {
        self.measurements.push(Measurement { name: name.into(), value });
    }

    /// Records `value` and fails the criterion unless `ok(value)`.
    fn check(&mut self, name: impl Into<String>, value: f64, ok: bool, rule: &str) {
        let name = name.into();
        if !ok {
            self.passed = false;
            self.failures.push(format!("{name} = {value:e} violates {rule}"));
        }
        self.record(name, value);
    }

    fn below(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.check(name, value, value < limit, &format!("< {limit:e}"));
    }

    fn ratio(&mut self, name: impl Into<String>, value: f64) {
        let (lo, hi) = RATIO_RANGE;
        self.check(name, value, (lo..=hi).contains(&value), &format!("in [{lo}, {hi}]"));
    }

    fn fail(&mut self, why: String) {
        self.passed = false;
        self.failures.push(why);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.measurements.iter().find(|m| m.name == name).map(|m| m.value)
    }

    /// One-line summary.
    pub fn line(&self) -> String {
        let worst: Vec<String> = self.measurements.iter().take(4).map(|m| format!("{}={:.3e}", m.name, m.value)).collect();
        format!(
            "[{}] criterion {:>2} {:<30} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            worst.join(" ")
        )
    }
}

pub fn run(id: u8) -> Option<CriterionReport> {
    let r = match id {
        1 => kerr_conservation(),
        2 => energy_change_identity(),
        3 => minkowski_multiplier(),
        4 => trapping(),
        5 => monotonicity(),
        6 => mode_energy(),
        7 => mode_multiplier(),
        8 => bulk_bound(),
        9 => complex_balance(),
        10 => corotating(),
        11 => strengthened(),
        12 => local_decay(),
        _ => return None,
    };
    Some(r)
}

fn span_config(spacing: Option<f64>) -> IntegratorConfig {
    IntegratorConfig { sample_spacing: spacing, ..Default::default() }
}

fn max_abs_dev(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max((x - v[0]).abs()))
}

fn kerr_conservation() -> CriterionReport {
    let mut rep = CriterionReport::new(1);
    let chart = SpacetimeChart::kerr(1.0, 0.3).expect("valid chart");
    let states = random_null_states(&chart, &RandomNullSpec::new(20, 1, 6.0, 30.0)).expect("sampling");
    let k = KillingTensor::for_chart(&chart);
    let (mut de_t, mut de_phi, mut dk, mut null, mut span) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, f64::INFINITY);
    for s in &states {
        let traj = match integrate_null(s, &chart, 200.0, &span_config(None)) {
            Ok(t) => t,
            Err(e) => {
                rep.fail(format!("integration failed: {e}"));
                continue;
            }
        };
        span = span.min(traj.span());
        let et = generator_energy(&traj, &GeneratorField::Time).expect("T on Kerr");
        let ep = generator_energy(&traj, &GeneratorField::Rotation).expect("Phi on Kerr");
        let kk = quadratic_invariant(&traj, &k).expect("same chart");
        let (et, ep, kk) = (et.column("e").unwrap(), ep.column("e").unwrap(), kk.column("K").unwrap());
        let e0 = et[0].abs();
        de_t = de_t.max(max_abs_dev(et) / e0);
        de_phi = de_phi.max(max_abs_dev(ep) / ep[0].abs().max(chart.mass() * e0));
        dk = dk.max(max_abs_dev(kk) / kk[0].abs().max((chart.mass() * e0).powi(2)));
        null = null.max(traj.max_null_residual());
    }
    rep.below("drift_e_T", de_t, CONSERVATION_TOL);
    rep.below("drift_e_Phi", de_phi, CONSERVATION_TOL);
    rep.below("drift_carter", dk, CONSERVATION_TOL);
    rep.below("null_residual", null, CONSERVATION_TOL);
    rep.record("shortest_span", span);
    rep
}

fn eg2_pair(
    rep: &mut CriterionReport,
    label: &str,
    state: &NullGeodesicState,
    chart: &SpacetimeChart,
    gen: &GeneratorField,
    span: f64,
    spacing: f64,
    killing: bool,
) {
    let mut residuals = vec![];
    for h in [spacing, 0.5 * spacing] {
        let traj = integrate_null(state, chart, span, &span_config(Some(h))).expect("integration");
        let a = eg2_audit(&traj, gen).expect("samples");
        let scale = a.initial.abs().max(1.0);
        rep.below(format!("{label}_residual_h{h}"), a.residual / scale, EG2_TOL);
        if killing {
            rep.below(format!("{label}_kernel_integral_h{h}"), a.kernel_integral.abs(), EG2_TOL);
        }
        residuals.push(a.residual);
    }
    if !killing {
        rep.ratio(format!("{label}_refinement_ratio"), residuals[0] / residuals[1]);
    }
}

fn energy_change_identity() -> CriterionReport {
    let mut rep = CriterionReport::new(2);
    let kerr = SpacetimeChart::kerr(1.0, 0.3).unwrap();
    let s = make_null_initial(&kerr, [0.0, 12.0, 1.2, 0.0], [-1.0, 0.01, 0.02]).unwrap();
    eg2_pair(&mut rep, "T_kerr", &s, &kerr, &GeneratorField::Time, 40.0, 0.01, true);

    let flat = SpacetimeChart::minkowski();
    let s = make_null_initial(&flat, [0.0, 10.0, 1.0, 0.0], [-1.0, 0.02, 0.03]).unwrap();
    eg2_pair(&mut rep, "R_minkowski", &s, &flat, &GeneratorField::Radial, 40.0, 0.01, false);

    let schw = SpacetimeChart::schwarzschild(1.0).unwrap();
    let s = make_null_initial(&schw, [0.0, 12.0, FRAC_PI_2, 0.0], [-1.0, 0.0, 0.05]).unwrap();
    eg2_pair(&mut rep, "A_schwarzschild", &s, &schw, &GeneratorField::photon_sphere(1.0), 40.0, 0.01, false);
    rep
}

fn angular_quadratic(chart: &SpacetimeChart, s: &NullGeodesicState) -> f64 {
    let low = chart.lower(&s.position, &s.velocity).unwrap();
    low[THETA].powi(2) + low[PHI].powi(2) / s.position[THETA].sin().powi(2)
}

fn minkowski_multiplier() -> CriterionReport {
    let mut rep = CriterionReport::new(3);
    let chart = SpacetimeChart::minkowski();
    let spec = RandomNullSpec { min_azimuthal: 0.1, ..RandomNullSpec::new(20, 3, 2.0, 20.0) };
    let states = random_null_states(&chart, &spec).expect("sampling");
    let (mut kernel_err, mut rate_err, mut n) = (0.0_f64, 0.0_f64, 0usize);
    for s in &states {
        let traj = integrate_null(s, &chart, 60.0, &span_config(Some(0.5))).expect("integration");
        for smp in &traj.samples {
            let st = smp.state;
            let expect = 2.0 * angular_quadratic(&chart, &st) / st.position[R].powi(3);
            let k = eg2_kernel(&chart, &GeneratorField::Radial, &st).unwrap();
            let rate = energy_rate(&chart, &GeneratorField::Radial, &st).unwrap();
            kernel_err = kernel_err.max((k - expect).abs() / expect);
            rate_err = rate_err.max((rate + 0.5 * expect).abs() / (0.5 * expect));
            n += 1;
        }
    }
    rep.below("kernel_rel_err", kernel_err, MULTIPLIER_TOL);
    rep.below("rate_rel_err", rate_err, MULTIPLIER_TOL);
    rep.record("samples", n as f64);
    rep
}

fn trapping() -> CriterionReport {
    let mut rep = CriterionReport::new(4);
    let schw = SpacetimeChart::schwarzschild(1.0).unwrap();
    let s = make_null_initial(&schw, [0.0, 3.0, FRAC_PI_2, 0.0], [0.0, 0.0, 1.0 / 27.0_f64.sqrt()]).unwrap();
    let traj = integrate_null(&s, &schw, 20.0, &span_config(Some(0.05))).expect("integration");
    let dev = traj.samples.iter().fold(0.0_f64, |m, x| m.max((x.state.position[R] - 3.0).abs()));
    rep.below("orbit_deviation", dev, ORBIT_RADIUS_TOL);

    let mut worst = 0.0_f64;
    let mut orbits = vec![];
    for (a, sense) in [
        (0.0, OrbitSense::Prograde),
        (0.3, OrbitSense::Prograde),
        (0.3, OrbitSense::Retrograde),
        (1e-6, OrbitSense::Prograde),
    ] {
        let chart = if a == 0.0 { schw } else { SpacetimeChart::kerr(1.0, a).unwrap() };
        match find_trapped(&chart, None, OrbitSelector::equatorial(sense)) {
            Ok(t) => {
                worst = worst.max(t.residual).max(t.slope_residual);
                orbits.push(t.r);
            }
            Err(e) => rep.fail(format!("find_trapped a={a}: {e}")),
        }
    }
    rep.below("root_residual", worst, ROOT_RESIDUAL_TOL);
    if orbits.len() == 4 {
        rep.below("small_spin_offset", (orbits[3] - 3.0).abs(), SMALL_SPIN_TOL);
        rep.check("prograde_r", orbits[1], orbits[1] < 3.0, "< 3M");
        rep.check("retrograde_r", orbits[2], orbits[2] > 3.0, "> 3M");
    }
    rep
}

fn monotonicity() -> CriterionReport {
    let mut rep = CriterionReport::new(5);
    let chart = SpacetimeChart::schwarzschild(1.0).unwrap();
    let states = random_null_states(&chart, &RandomNullSpec::new(100, 5, 2.5, 20.0)).expect("sampling");
    let profile = RadialProfile::PhotonSphere { mass: 1.0 };
    let mut worst_drop = 0.0_f64;
    let mut total = 0usize;
    for s in &states {
        let traj: Trajectory = match integrate_null(s, &chart, 200.0, &span_config(Some(0.25))) {
            Ok(t) => t,
            Err(e) => {
                rep.fail(format!("integration failed: {e}"));
                continue;
            }
        };
        let l = radial_momentum(&traj, &profile);
        let v = l.column("f_vr").unwrap();
        for w in v.windows(2) {
            worst_drop = worst_drop.max(w[0] - w[1]);
        }
        total += v.len();
    }
    rep.check("largest_decrease", worst_drop, worst_drop <= MONOTONE_SLACK, &format!("<= {MONOTONE_SLACK:e}"));
    rep.record("samples", total as f64);
    rep
}

/// Left-moving packet used for the conservation audits.
pub fn ingoing_packet() -> WavePacket {
    WavePacket::new(80.0, 10.0, 0.5, Motion::Ingoing)
}

/// Grid half-width that keeps a packet and everything it radiates off the
/// boundaries until `t_final`.
pub fn sized_half_width(p: &WavePacket, t_final: f64) -> f64 {
    p.center.abs() + 6.0 * p.width + t_final + 20.0
}

fn mode_run(
    spec: PotentialSpec,
    h: f64,
    packet: &WavePacket,
    t_final: f64,
    opts: &LedgerOptions,
) -> (ModeState, crate::ledger::Ledger) {
    let grid = Grid::symmetric(sized_half_width(packet, t_final), h).expect("grid");
    let mut s = ModeState::new(spec, grid, BoundaryRule::Outgoing, DEFAULT_COURANT, &[*packet]).expect("state");
    let n = s.steps_to(t_final);
    let l = evolve(&mut s, n, opts).expect("evolution");
    (s, l)
}

fn rel_drift(v: &[f64]) -> f64 {
    max_abs_dev(v) / v[0].abs()
}

fn mode_energy() -> CriterionReport {
    let mut rep = CriterionReport::new(6);
    let p = ingoing_packet();
    let opts = LedgerOptions { stride: 5, ..Default::default() };
    let mut d = vec![];
    for h in [0.05, 0.025] {
        let (_, l) = mode_run(PotentialSpec::real(0, 2, 1.0), h, &p, 200.0, &opts);
        d.push(rel_drift(l.column("E").unwrap()));
        let flux = l.column("int_bflux_E").unwrap().last().copied().unwrap_or(0.0);
        rep.record(format!("boundary_energy_h{h}"), flux.abs());
    }
    rep.below("drift_h0.05", d[0], MODE_DRIFT_TOL);
    rep.record("drift_h0.025", d[1]);
    rep.ratio("refinement_ratio", d[0] / d[1]);
    rep
}

fn mode_multiplier() -> CriterionReport {
    let mut rep = CriterionReport::new(7);
    let p = ingoing_packet();
    let opts = LedgerOptions { stride: 5, multiplier: Some(MultiplierProfile::PhotonSphere), ..Default::default() };
    let mut res = vec![];
    for h in [0.1, 0.05, 0.025] {
        let (_, l) = mode_run(PotentialSpec::real(0, 2, 1.0), h, &p, 200.0, &opts);
        let r = l.column("morawetz_residual").unwrap().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let scale = l.column("I").unwrap().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        rep.record(format!("residual_h{h}"), r);
        rep.record(format!("I_scale_h{h}"), scale);
        res.push(r);
    }
    rep.ratio("ratio_coarse", res[0] / res[1]);
    rep.ratio("ratio_fine", res[1] / res[2]);
    rep
}

/// Reproducible random packets for the bulk-bound study.
pub fn random_packets(seed: u64, count: usize) -> Vec<WavePacket> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let motion = match rng.random_range(0..3) {
                0 => Motion::Static,
                1 => Motion::Ingoing,
                _ => Motion::Outgoing,
            };
            WavePacket::new(
                rng.random_range(-30.0..30.0),
                rng.random_range(3.0..8.0),
                rng.random_range(0.0..1.0),
                motion,
            )
        })
        .collect()
}

fn stability(values: &[f64]) -> f64 {
    let reference = *values.last().unwrap();
    values.iter().fold(0.0_f64, |m, v| m.max((v - reference).abs() / reference.abs()))
}

fn bulk_bound() -> CriterionReport {
    let mut rep = CriterionReport::new(8);
    let packets = random_packets(8, 5);
    let t_final = 150.0;
    let opts = LedgerOptions { stride: 50, multiplier: Some(MultiplierProfile::PhotonSphere), ..Default::default() };
    for spin in [0u8, 1] {
        for l in [2u32, 3] {
            let mut c_per_res = vec![];
            for h in [0.2, 0.1, 0.05] {
                let mut c = 0.0_f64;
                for p in &packets {
                    let (_, ledger) = mode_run(PotentialSpec::real(spin, l, 1.0), h, p, t_final, &opts);
                    let bulk = *ledger.column("int_B_pos").unwrap().last().unwrap();
                    let e0 = ledger.column("E").unwrap()[0];
                    c = c.max(bulk / e0);
                }
                c_per_res.push(c);
            }
            rep.record(format!("C_s{spin}_l{l}"), *c_per_res.last().unwrap());
            rep.below(format!("spread_s{spin}_l{l}"), stability(&c_per_res), STABILITY_TOL);
        }
    }
    rep
}

/// Right-moving positive-frequency packet that crosses the bump.
pub fn bump_packet() -> WavePacket {
    WavePacket::new(-40.0, 5.0, 1.0, Motion::Outgoing)
}

pub const BUMP_EPSILON: f64 = 0.01;
pub const BUMP_WIDTH: f64 = 1.0;

fn complex_balance() -> CriterionReport {
    let mut rep = CriterionReport::new(9);
    let p = bump_packet();
    let spec = PotentialSpec::real(0, 2, 1.0).with_bump(BUMP_EPSILON, BUMP_WIDTH);
    let opts = LedgerOptions { stride: 5, ..Default::default() };
    let (mut res, mut growth) = (vec![], vec![]);
    for h in [0.1, 0.05, 0.025] {
        let (_, l) = mode_run(spec, h, &p, 100.0, &opts);
        let r = l.column("balance_residual").unwrap().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let e = l.column("E").unwrap();
        let sup = e.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        let c = (sup / e[0] - 1.0) / BUMP_EPSILON;
        rep.record(format!("residual_h{h}"), r);
        rep.record(format!("C_h{h}"), c);
        res.push(r);
        growth.push(c);
    }
    rep.ratio("ratio_coarse", res[0] / res[1]);
    rep.ratio("ratio_fine", res[1] / res[2]);
    rep.below("C_spread", stability(&growth), STABILITY_TOL);
    rep
}

fn corotating() -> CriterionReport {
    let mut rep = CriterionReport::new(10);
    let chart = SpacetimeChart::kerr(1.0, 0.1).unwrap();
    let gen = GeneratorField::corotating(&chart).unwrap();
    let grid = RegionGrid::exterior(&chart, 60.0, 600, 61);
    let scan = timelike_scan(&gen, &chart, &grid).expect("scan");
    rep.check("min_timelike_margin", scan.min_margin, scan.min_margin > 0.0, "> 0");

    let mut outside = 0.0_f64;
    for &r in &grid.radii {
        if r > 5.0 && r < 6.0 {
            continue;
        }
        for &th in &grid.polar {
            let d = deformation_tensor(&gen, &chart, &[0.0, r, th, 0.0]).unwrap();
            outside = outside.max(d.max_abs());
        }
    }
    rep.below("deformation_outside_window", outside, DEFORMATION_ZERO_TOL);

    let window = RegionGrid::uniform(5.0, 6.0, 201, 31, 0.05);
    let sups: Vec<f64> = [0.05, 0.1, 0.2]
        .iter()
        .map(|&a| {
            let c = SpacetimeChart::kerr(1.0, a).unwrap();
            let g = GeneratorField::corotating(&c).unwrap();
            crate::geometry::deformation_sup(&g, &c, &window).unwrap() / a
        })
        .collect();
    rep.record("sup_per_a_0.1", sups[1]);
    let spread = sups.iter().fold(0.0_f64, |m, s| m.max((s / sups[1] - 1.0).abs()));
    rep.below("linearity_spread", spread, LINEARITY_TOL);
    rep
}

fn strengthened() -> CriterionReport {
    let mut rep = CriterionReport::new(11);
    let p = ingoing_packet();
    let opts = LedgerOptions { stride: 5, ..Default::default() };
    let mut drifts = [[0.0; 2]; 2];
    for (k, h) in [0.05, 0.025].into_iter().enumerate() {
        let ledgers: Vec<(u32, crate::ledger::Ledger)> =
            (1..=4).map(|l| (l, mode_run(PotentialSpec::real(0, l, 1.0), h, &p, 200.0, &opts).1)).collect();
        let refs: Vec<(u32, &crate::ledger::Ledger)> = ledgers.iter().map(|(l, g)| (*l, g)).collect();
        for n in 1..=2u32 {
            let series = order_n_series(&refs, n).expect("aligned ledgers");
            drifts[(n - 1) as usize][k] = rel_drift(&series);
        }
    }
    for n in 1..=2 {
        let d = drifts[n - 1];
        rep.below(format!("order{n}_drift"), d[0], MODE_DRIFT_TOL);
        rep.ratio(format!("order{n}_ratio"), d[0] / d[1]);
    }
    rep
}

fn local_decay() -> CriterionReport {
    let mut rep = CriterionReport::new(12);
    let p = WavePacket::new(0.0, 3.0, 0.0, Motion::Static);
    let window = (-20.0, 20.0);
    let t_final = 150.0;
    let grid = Grid::symmetric(window.1 + 2.0 * t_final + 10.0, 0.05).unwrap();
    // largest step below the default Courant number that lands on t_final exactly
    let n = (t_final / (DEFAULT_COURANT * grid.spacing())).ceil();
    let courant = t_final / (n * grid.spacing());
    let mut s = ModeState::new(PotentialSpec::real(0, 2, 1.0), grid, BoundaryRule::Outgoing, courant, &[p]).unwrap();
    let n = n as usize;
    let l = evolve(&mut s, n, &LedgerOptions { stride: 100, window: Some(window), ..Default::default() }).unwrap();
    let local = l.column("local_E").unwrap();
    let frac = local.last().unwrap() / local[0];
    rep.below("local_fraction", frac, DECAY_THRESHOLD);
    rep.record("final_time", s.time());
    rep
}

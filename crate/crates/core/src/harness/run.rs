use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{GeneratorName, GeodesicPreset, ScenarioConfig, ScenarioKind};
use super::output::{emit_series, trajectory_ledger, write_atomic};
use super::HarnessError;
use crate::audit::{DEFORMATION_ZERO_TOL, ROOT_RESIDUAL_TOL};
use crate::geodesic::{
    eg2_audit, find_trapped, generator_energy, integrate_null, make_null_initial, quadratic_invariant,
    random_null_states, IntegratorConfig, NullGeodesicState, OrbitSelector, RadialPotential,
};
use crate::geometry::{
    deformation_sup, timelike_scan, Family, GeneratorField, KillingTensor, RegionGrid, SpacetimeChart,
};
use crate::ledger::Ledger;
use crate::modewave::{
    angular_weight, evolve, order_n_series, BoundaryRule, Grid, LedgerOptions, ModeState, PotentialSpec,
};

pub const MANIFEST_FILE: &str = "manifest.json";
/// Environment variable that overrides the output root.
pub const OUT_ENV: &str = "HORIZON_LAB_OUT";
const DEFAULT_OUT: &str = "horizon-lab-out";
const STAGING: &str = ".staging";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Output root; [`resolve_out_dir`] is used when `None`.
    pub out: Option<PathBuf>,
    /// Worker threads; `None` lets the pool pick.
    pub jobs: Option<usize>,
}

/// Output root: command line, then `HORIZON_LAB_OUT`, then the config, then
/// `./horizon-lab-out`.
pub fn resolve_out_dir(cli: Option<&Path>, configured: Option<&Path>) -> PathBuf {
    if let Some(p) = cli {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    configured.map_or_else(|| PathBuf::from(DEFAULT_OUT), Path::to_path_buf)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub name: String,
    pub value: f64,
    /// Rule the value has to satisfy, e.g. `< 1e-8`.
    pub rule: String,
    pub passed: bool,
}

impl AuditEntry {
    fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        AuditEntry { name: name.into(), value, rule: format!("< {limit:.3e}"), passed: value < limit }
    }

    fn above(name: impl Into<String>, value: f64, limit: f64) -> Self {
        AuditEntry { name: name.into(), value, rule: format!("> {limit:.3e}"), passed: value > limit }
    }
}

/// One CSV file written by a run, with the path relative to the output root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub path: String,
    pub rows: usize,
    pub columns: Vec<String>,
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "kebab-case")]
pub enum JobStatus {
    Completed,
    Failed { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub index: usize,
    pub name: String,
    pub status: JobStatus,
    pub files: Vec<SeriesRecord>,
    pub audits: Vec<AuditEntry>,
    /// Scalar results that are reported but not audited.
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub kind: ScenarioKind,
    pub seed: u64,
    pub config: ScenarioConfig,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub jobs: Vec<JobRecord>,
    /// Files built from several jobs, such as order-n energies.
    pub collection: Vec<SeriesRecord>,
    pub passed: bool,
}

impl RunManifest {
    /// `job/audit = value (rule)` for every failed audit and failed job.
    pub fn failures(&self) -> Vec<String> {
        let mut out = vec![];
        for j in &self.jobs {
            if let JobStatus::Failed { error } = &j.status {
                out.push(format!("{}: {error}", j.name));
            }
            for a in j.audits.iter().filter(|a| !a.passed) {
                out.push(format!("{}/{} = {:e} ({})", j.name, a.name, a.value, a.rule));
            }
        }
        out
    }

    /// Every file the manifest names, relative to the output root.
    pub fn files(&self) -> impl Iterator<Item = &SeriesRecord> {
        self.jobs.iter().flat_map(|j| j.files.iter()).chain(self.collection.iter())
    }
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

#[derive(Default)]
struct JobOutput {
    files: Vec<(String, Ledger)>,
    audits: Vec<AuditEntry>,
    values: BTreeMap<String, f64>,
}

type JobFn<'a> = Box<dyn Fn() -> Result<JobOutput, String> + Send + Sync + 'a>;

struct Job<'a> {
    name: String,
    work: JobFn<'a>,
}

/// Runs every job of a validated scenario and writes the manifest.
///
/// Jobs write into `<out>/.staging/<job>/` and are moved to `<out>/<job>/`
/// once all of them have finished. `manifest.json` is written last, through
/// a temporary file and a rename. If any job fails or any audit is out of
/// tolerance the manifest is still written and [`HarnessError::Audit`] is
/// returned.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunManifest, HarnessError> {
    let mut cfg = cfg.clone();
    cfg.normalize()?;
    let out = opts.out.clone().unwrap_or_else(|| resolve_out_dir(None, cfg.out.as_deref()));
    let staging = out.join(STAGING);
    fs::create_dir_all(&staging).map_err(|e| HarnessError::io(&staging, e))?;
    let started = now_ms();

    let jobs = plan(&cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::constraint("jobs", e.to_string()))?;
    let results: Vec<Result<JobRecord, HarnessError>> = pool.install(|| {
        jobs.par_iter()
            .enumerate()
            .map(|(index, job)| execute(index, job, &staging))
            .collect()
    });
    drop(jobs);
    let mut records = vec![];
    for r in results {
        records.push(r?);
    }

    for rec in &records {
        let from = staging.join(&rec.name);
        if !from.exists() {
            continue;
        }
        let to = out.join(&rec.name);
        if to.exists() {
            fs::remove_dir_all(&to).map_err(|e| HarnessError::io(&to, e))?;
        }
        fs::rename(&from, &to).map_err(|e| HarnessError::io(&to, e))?;
    }
    let _ = fs::remove_dir(&staging);

    let collection = collect(&cfg, &records, &out)?;
    let mut manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").into(),
        kind: cfg.kind,
        seed: cfg.seed,
        config: cfg,
        started_unix_ms: started,
        finished_unix_ms: 0,
        jobs: records,
        collection,
        passed: false,
    };
    let failures = manifest.failures();
    manifest.passed = failures.is_empty();
    manifest.finished_unix_ms = now_ms();
    let path = out.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_atomic(&path, text.as_bytes())?;
    if failures.is_empty() {
        Ok(manifest)
    } else {
        Err(HarnessError::Audit { manifest: path, failures })
    }
}

fn execute(index: usize, job: &Job<'_>, staging: &Path) -> Result<JobRecord, HarnessError> {
    let mut rec = JobRecord {
        index,
        name: job.name.clone(),
        status: JobStatus::Completed,
        files: vec![],
        audits: vec![],
        values: BTreeMap::new(),
    };
    match (job.work)() {
        Ok(o) => {
            let dir = staging.join(&job.name);
            if dir.exists() {
                fs::remove_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
            }
            fs::create_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
            for (file, ledger) in &o.files {
                emit_series(ledger, &dir.join(file))?;
                rec.files.push(series_record(format!("{}/{file}", job.name), ledger));
            }
            rec.audits = o.audits;
            rec.values = o.values;
        }
        Err(error) => rec.status = JobStatus::Failed { error },
    }
    Ok(rec)
}

fn series_record(path: String, l: &Ledger) -> SeriesRecord {
    SeriesRecord {
        path,
        rows: l.len(),
        columns: l.columns.iter().map(|c| format!("{}[{}]", c.name, c.unit)).collect(),
        metadata: l.metadata.clone(),
    }
}

fn plan(cfg: &ScenarioConfig) -> Result<Vec<Job<'_>>, HarnessError> {
    let chart = cfg.chart.build()?;
    Ok(match cfg.kind {
        ScenarioKind::Geodesic => geodesic_jobs(cfg, chart)?,
        ScenarioKind::Wave => wave_jobs(cfg),
        ScenarioKind::Trapped => {
            let t = cfg.trapped.expect("normalized");
            t.selected()
                .into_iter()
                .map(|sense| Job {
                    name: format!("{sense:?}").to_lowercase(),
                    work: Box::new(move || trapped_job(&chart, t.seed_interval, OrbitSelector { sense, eta: t.eta })),
                })
                .collect()
        }
        ScenarioKind::ScanTchi => {
            let s = cfg.scan.expect("normalized");
            vec![Job { name: "tchi".into(), work: Box::new(move || scan_job(&chart, s.r_hi, s.nr, s.nth)) }]
        }
    })
}

fn geodesic_jobs(cfg: &ScenarioConfig, chart: SpacetimeChart) -> Result<Vec<Job<'_>>, HarnessError> {
    let g = cfg.geodesic.as_ref().expect("normalized");
    let u = cfg.chart.length_unit();
    let bad = |e: crate::geodesic::GeodesicError| HarnessError::constraint("geodesic", e.to_string());
    let states: Vec<NullGeodesicState> = if let Some(spec) = cfg.random_spec() {
        random_null_states(&chart, &spec).map_err(bad)?
    } else if let (Some(x), Some(d)) = (g.position, g.direction) {
        vec![make_null_initial(&chart, x, d).map_err(bad)?]
    } else {
        match g.preset.expect("normalized") {
            GeodesicPreset::PhotonOrbit => {
                let m = chart.mass();
                let x = [0.0, 3.0 * m, std::f64::consts::FRAC_PI_2, 0.0];
                vec![make_null_initial(&chart, x, [0.0, 0.0, 1.0 / (27.0_f64.sqrt() * m)]).map_err(bad)?]
            }
        }
    };
    let gens: Vec<(GeneratorName, GeneratorField)> =
        g.generators.iter().map(|n| Ok((*n, n.build(&chart)?))).collect::<Result<_, HarnessError>>()?;
    let icfg = IntegratorConfig {
        rtol: g.tol,
        atol: g.tol * 1e-2,
        sample_spacing: g.sample_spacing.map(|h| h * u),
        ..Default::default()
    };
    let span = g.span * u;
    Ok(states
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let gens = gens.clone();
            Job {
                name: format!("geodesic_{i:03}"),
                work: Box::new(move || geodesic_job(&chart, &s, span, &icfg, &gens, u)),
            }
        })
        .collect())
}

fn max_dev(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max((x - v[0]).abs()))
}

fn geodesic_job(
    chart: &SpacetimeChart,
    s: &NullGeodesicState,
    span: f64,
    icfg: &IntegratorConfig,
    gens: &[(GeneratorName, GeneratorField)],
    unit: f64,
) -> Result<JobOutput, String> {
    let traj = integrate_null(s, chart, span, icfg).map_err(|e| e.to_string())?;
    let mut o = JobOutput::default();
    let tol = icfg.rtol;
    o.values.insert("span".into(), traj.span());
    o.values.insert("samples".into(), traj.samples.len() as f64);
    o.audits.push(AuditEntry::below(
        "null_residual",
        traj.max_null_residual(),
        10.0 * tol * (traj.span() / unit).max(1.0),
    ));

    let e_t = generator_energy(&traj, &GeneratorField::Time).map_err(|e| e.to_string())?;
    let e_t0 = e_t.column("e").expect("e column")[0].abs();
    let mut energies = Ledger::new("energies");
    energies.set_column("lambda", "M", e_t.column("lambda").expect("lambda").to_vec());
    energies.set_column("t", "M", e_t.column("t").expect("t").to_vec());
    for (name, gen) in gens {
        let l = generator_energy(&traj, gen).map_err(|e| e.to_string())?;
        let e = l.column("e").expect("e column").to_vec();
        let label = gen.name();
        if matches!(name, GeneratorName::T | GeneratorName::Phi) {
            let scale = match name {
                GeneratorName::T => e_t0,
                _ => e[0].abs().max(unit * e_t0),
            };
            o.audits.push(AuditEntry::below(format!("drift_e_{label}"), max_dev(&e) / scale, 100.0 * tol));
        }
        if traj.samples.len() >= 2 {
            let a = eg2_audit(&traj, gen).map_err(|e| e.to_string())?;
            let size = a.initial.abs().max(a.final_value.abs()).max(1.0);
            o.audits.push(AuditEntry::below(format!("eg2_{label}"), a.residual / size, 1e-6));
            o.values.insert(format!("delta_e_{label}"), a.delta);
            o.values.insert(format!("eg2_integral_{label}"), a.integral);
        }
        energies.set_column(&format!("e_{label}"), "1", e);
    }
    if chart.family() == Family::Kerr {
        let k = quadratic_invariant(&traj, &KillingTensor::for_chart(chart)).map_err(|e| e.to_string())?;
        let kv = k.column("K").expect("K column").to_vec();
        let scale = kv[0].abs().max((unit * e_t0).powi(2));
        o.audits.push(AuditEntry::below("drift_carter", max_dev(&kv) / scale, 100.0 * tol));
        energies.set_column("K", "M^2", kv);
    }
    o.files.push(("trajectory.csv".into(), trajectory_ledger(&traj)));
    o.files.push(("energies.csv".into(), energies));
    Ok(o)
}

fn wave_jobs(cfg: &ScenarioConfig) -> Vec<Job<'_>> {
    let w = cfg.wave.as_ref().expect("normalized");
    let m = cfg.chart.mass;
    w.modes
        .iter()
        .map(|&l| Job {
            name: format!("mode_l{l}"),
            work: Box::new(move || {
                let spec = PotentialSpec::real(w.spin, l, m).with_bump(w.epsilon, w.bump_width);
                let err = |e: crate::modewave::WaveError| e.to_string();
                let grid = Grid::symmetric(w.half_width.expect("normalized"), w.spacing).map_err(err)?;
                let mut s = ModeState::new(spec, grid, BoundaryRule::Outgoing, w.courant, &[w.packet]).map_err(err)?;
                let opts =
                    LedgerOptions { stride: w.stride, multiplier: w.multiplier, window: w.window, weighted: w.weighted };
                let n = s.steps_to(w.t_final);
                let ledger = evolve(&mut s, n, &opts).map_err(err)?;
                let mut o = JobOutput::default();
                let e = ledger.column("E").expect("E column");
                let e0 = if e[0] > 0.0 { e[0] } else { 1.0 };
                let peak = |c: &str| ledger.column(c).map(|v| v.iter().fold(0.0_f64, |a, x| a.max(x.abs())));
                o.audits.push(AuditEntry::below("balance", peak("balance_residual").unwrap_or(0.0) / e0, w.balance_tol));
                if let Some(r) = peak("morawetz_residual") {
                    o.audits.push(AuditEntry::below("morawetz", r / e0, w.morawetz_tol));
                }
                o.values.insert("E0".into(), e[0]);
                o.values.insert("E_final".into(), *e.last().expect("rows"));
                o.values.insert("sup_E_over_E0".into(), e.iter().fold(0.0_f64, |a, &x| a.max(x)) / e0);
                if let Some(v) = ledger.column("int_B_pos") {
                    o.values.insert("int_B_pos_over_E0".into(), v.last().copied().unwrap_or(0.0) / e0);
                }
                if let Some(v) = ledger.column("local_E") {
                    o.values.insert("local_E_final_over_E0".into(), v.last().copied().unwrap_or(0.0) / e0);
                }
                o.files.push((format!("mode_l{l}.csv"), ledger));
                Ok(o)
            }),
        })
        .collect()
}

fn trapped_job(
    chart: &SpacetimeChart,
    seed: Option<(f64, f64)>,
    selector: OrbitSelector,
) -> Result<JobOutput, String> {
    let m = chart.mass();
    let orbit = find_trapped(chart, seed.map(|(lo, hi)| (lo * m, hi * m)), selector).map_err(|e| e.to_string())?;
    let mut o = JobOutput::default();
    o.audits.push(AuditEntry::below("residual", orbit.residual, ROOT_RESIDUAL_TOL));
    o.audits.push(AuditEntry::below("slope_residual", orbit.slope_residual, ROOT_RESIDUAL_TOL));
    o.values.insert("r".into(), orbit.r);
    o.values.insert("xi".into(), orbit.xi());
    o.values.insert("eta".into(), orbit.eta());

    let mut row = Ledger::new("orbit")
        .with_column("r", "M")
        .with_column("L_z", "M")
        .with_column("Q", "M^2")
        .with_column("residual", "1")
        .with_column("slope_residual", "1");
    row.push_row(&[orbit.r, orbit.spec.lz, orbit.spec.carter_q, orbit.residual, orbit.slope_residual]);

    let pot = RadialPotential::new(orbit.spec).map_err(|e| e.to_string())?;
    let mut prof = Ledger::new("radial_potential").with_column("r", "M").with_column("R", "M^4").with_column("dR", "M^3");
    let (lo, hi) = (chart.horizon_radius(), 10.0 * m);
    for i in 1..=400 {
        let r = lo + (hi - lo) * i as f64 / 400.0;
        let (v, d, _) = pot.eval(r);
        prof.push_row(&[r, v, d]);
    }
    o.files.push(("orbit.csv".into(), row));
    o.files.push(("radial_potential.csv".into(), prof));
    Ok(o)
}

fn scan_job(chart: &SpacetimeChart, r_hi: f64, nr: usize, nth: usize) -> Result<JobOutput, String> {
    let m = chart.mass();
    let gen = GeneratorField::corotating(chart).map_err(|e| e.to_string())?;
    let full = RegionGrid::exterior(chart, r_hi * m, nr, nth);
    let mut l = Ledger::new("tchi_scan")
        .with_column("r", "M")
        .with_column("min_margin", "1")
        .with_column("deformation_sup", "1/M");
    let (mut margin, mut outside) = (f64::INFINITY, 0.0_f64);
    let (mut support_lo, mut support_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &r in &full.radii {
        let ring = RegionGrid { radii: vec![r], polar: full.polar.clone() };
        let t = timelike_scan(&gen, chart, &ring).map_err(|e| e.to_string())?;
        let d = deformation_sup(&gen, chart, &ring).map_err(|e| e.to_string())?;
        margin = margin.min(t.min_margin);
        if r <= 5.0 * m || r >= 6.0 * m {
            outside = outside.max(d);
        }
        if d > DEFORMATION_ZERO_TOL {
            support_lo = support_lo.min(r);
            support_hi = support_hi.max(r);
        }
        l.push_row(&[r, t.min_margin, d]);
    }
    let mut o = JobOutput::default();
    o.audits.push(AuditEntry::above("min_margin", margin, 0.0));
    o.audits.push(AuditEntry::below("deformation_outside_blend", outside, DEFORMATION_ZERO_TOL));
    o.values.insert("support_lo".into(), support_lo / m);
    o.values.insert("support_hi".into(), support_hi / m);
    o.values.insert("horizon_angular_velocity".into(), chart.horizon_angular_velocity());
    o.files.push(("scan.csv".into(), l));
    Ok(o)
}

/// Order-n energies across all modes of a wave run.
fn collect(cfg: &ScenarioConfig, records: &[JobRecord], out: &Path) -> Result<Vec<SeriesRecord>, HarnessError> {
    let Some(w) = cfg.wave.as_ref().filter(|_| cfg.kind == ScenarioKind::Wave) else {
        return Ok(vec![]);
    };
    if records.iter().any(|r| r.status != JobStatus::Completed) {
        return Ok(vec![]);
    }
    let mut ledgers = vec![];
    for (l, rec) in w.modes.iter().zip(records) {
        let path = out.join(&rec.files[0].path);
        ledgers.push((*l, read_series(&path)?));
    }
    let refs: Vec<(u32, &Ledger)> = ledgers.iter().map(|(l, g)| (*l, g)).collect();
    let mut table = Ledger::new("order_n");
    table.set_column("time", "M", ledgers[0].1.column("time").expect("time").to_vec());
    for n in 0..=2u32 {
        let v = order_n_series(&refs, n).map_err(|e| HarnessError::constraint("wave.modes", e.to_string()))?;
        table.set_column(&format!("E_order{n}"), "1", v);
        for l in &w.modes {
            table.metadata.insert(format!("weight_n{n}_l{l}"), angular_weight(*l, n).to_string());
        }
    }
    let name = "order_n.csv";
    emit_series(&table, &out.join(name))?;
    Ok(vec![series_record(name.into(), &table)])
}

/// Reads back a CSV written by [`emit_series`].
fn read_series(path: &Path) -> Result<Ledger, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let bad = |what: &str| HarnessError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, what.to_string()));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("missing header"))?;
    let mut l = Ledger::new(path.display().to_string());
    for h in header.split(',') {
        let (name, unit) = h.strip_suffix(']').and_then(|s| s.split_once('[')).ok_or_else(|| bad("bad header"))?;
        l = l.with_column(name, unit);
    }
    for line in lines {
        let row: Vec<f64> = line.split(',').map(|v| v.parse().map_err(|_| bad("bad number"))).collect::<Result<_, _>>()?;
        if row.len() != l.columns.len() {
            return Err(bad("ragged row"));
        }
        l.push_row(&row);
    }
    Ok(l)
}

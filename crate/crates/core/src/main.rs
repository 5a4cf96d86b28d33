use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use horizon_lab::audit::{self, CriterionReport, CRITERIA};
use horizon_lab::harness::{
    preset, resolve_out_dir, run_scenario, validate_config, write_atomic, HarnessError, RunOptions, ScenarioKind,
};

#[derive(Parser)]
#[command(name = "horizon-lab", version, about = "Geodesic and mode-wave energy audits on black-hole backgrounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML). Built-in presets are used without it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output root; overrides HORIZON_LAB_OUT and the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate null geodesics and audit their energies.
    Geodesic,
    /// Evolve mode equations and record energy, multiplier and flux ledgers.
    Wave,
    /// Locate spherical photon orbits.
    Trapped,
    /// Scan the corotating generator for timelikeness and deformation support.
    ScanTchi,
    /// Run the built-in acceptance presets.
    Audit {
        /// Criterion numbers; all of them when empty.
        ids: Vec<u8>,
    },
}

fn scenario(kind: ScenarioKind, cli: &Cli) -> Result<(), HarnessError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let raw = std::fs::read_to_string(path).map_err(|e| HarnessError::Io { path: path.clone(), source: e })?;
            validate_config(&raw)?
        }
        None => preset(kind),
    };
    if cfg.kind != kind {
        return Err(HarnessError::Constraint {
            key: "kind".into(),
            constraint: format!("expected \"{}\", file says \"{}\"", kind.name(), cfg.kind.name()),
        });
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = resolve_out_dir(cli.out.as_deref(), cfg.out.as_deref());
    let manifest = run_scenario(&cfg, &RunOptions { out: Some(out.clone()), jobs: cli.jobs })?;
    for job in &manifest.jobs {
        let worst = job.audits.iter().map(|a| format!("{}={:.3e}", a.name, a.value)).collect::<Vec<_>>().join(" ");
        println!("{:<16} ok  {worst}", job.name);
    }
    println!("manifest: {}", out.join(horizon_lab::harness::MANIFEST_FILE).display());
    Ok(())
}

fn run_audit(ids: &[u8], cli: &Cli) -> Result<(), HarnessError> {
    let ids: Vec<u8> = if ids.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { ids.to_vec() };
    if let Some(bad) = ids.iter().find(|i| !CRITERIA.iter().any(|c| c.0 == **i)) {
        return Err(HarnessError::Constraint { key: "ids".into(), constraint: format!("no criterion {bad}") });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Constraint { key: "jobs".into(), constraint: e.to_string() })?;
    let reports: Vec<CriterionReport> =
        pool.install(|| ids.par_iter().map(|&i| audit::run(i).expect("known id")).collect());
    for r in &reports {
        println!("{}", r.line());
        for f in &r.failures {
            println!("    {f}");
        }
    }
    let out = resolve_out_dir(cli.out.as_deref(), None);
    std::fs::create_dir_all(&out).map_err(|e| HarnessError::Io { path: out.clone(), source: e })?;
    let path = out.join("audit.json");
    write_atomic(&path, serde_json::to_string_pretty(&reports).expect("reports serialize").as_bytes())?;
    let failures: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| r.line()).collect();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(HarnessError::Audit { manifest: path, failures })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Geodesic => scenario(ScenarioKind::Geodesic, &cli),
        Command::Wave => scenario(ScenarioKind::Wave, &cli),
        Command::Trapped => scenario(ScenarioKind::Trapped, &cli),
        Command::ScanTchi => scenario(ScenarioKind::ScanTchi, &cli),
        Command::Audit { ids } => run_audit(ids, &cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let HarnessError::Audit { failures, .. } = &e {
                for f in failures {
                    eprintln!("  {f}");
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

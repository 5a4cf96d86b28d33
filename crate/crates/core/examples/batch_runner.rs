//! Runs a scenario from TOML through the batch harness and lists what it wrote.

use horizon_lab::harness::{run_scenario, validate_config, RunOptions};

const SCENARIO: &str = r#"
kind = "geodesic"
seed = 7

[chart]
family = "kerr"
mass = 1.0
spin = 0.5

[geodesic]
span = 100.0
sample_spacing = 0.02
generators = ["T", "Phi", "T_chi"]

[geodesic.random]
count = 6
r_lo = 8.0
r_hi = 20.0
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = validate_config(SCENARIO)?;
    let out = std::env::temp_dir().join("horizon-lab-batch-example");
    let manifest = run_scenario(&cfg, &RunOptions { out: Some(out.clone()), jobs: Some(2) })?;
    println!("wrote {} (passed: {})", out.join("manifest.json").display(), manifest.passed);
    for job in &manifest.jobs {
        let files: Vec<&str> = job.files.iter().map(|f| f.path.as_str()).collect();
        println!("  {:<14} {:?}", job.name, files);
        for a in &job.audits {
            println!("      {:<22} {:>11.3e}  {}", a.name, a.value, a.rule);
        }
    }
    Ok(())
}

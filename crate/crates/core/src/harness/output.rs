use std::fs;
use std::io::Write;
use std::path::Path;

use super::HarnessError;
use crate::geodesic::Trajectory;
use crate::ledger::Ledger;

/// Writes a ledger as CSV: a `name[unit]` header, then one row per sample.
///
/// Floats use Rust's shortest round-trip formatting, so parsing the file
/// gives back the exact values.
pub fn emit_series(ledger: &Ledger, path: &Path) -> Result<(), HarnessError> {
    if ledger.is_empty() {
        return Err(HarnessError::EmptyLedger(ledger.name.clone()));
    }
    let mut out = String::new();
    let header: Vec<String> = ledger.columns.iter().map(|c| format!("{}[{}]", c.name, c.unit)).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..ledger.len() {
        for (j, c) in ledger.columns.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&c.values[i].to_string());
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| HarnessError::io(path, e))
}

/// Writes to a sibling temporary file, syncs it and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(|e| HarnessError::io(&tmp, e))?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(|e| HarnessError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))
}

/// Positions, tangents and null residuals of every sample.
pub fn trajectory_ledger(traj: &Trajectory) -> Ledger {
    let mut l = Ledger::new("trajectory")
        .meta("termination", format!("{:?}", traj.termination))
        .meta("accepted_steps", traj.accepted_steps)
        .meta("rejected_steps", traj.rejected_steps);
    let col = |f: &dyn Fn(usize) -> f64| traj.samples.iter().enumerate().map(|(i, _)| f(i)).collect::<Vec<_>>();
    let s = &traj.samples;
    l.set_column("lambda", "M", col(&|i| s[i].state.lambda));
    for (k, name) in ["t", "r", "theta", "phi"].iter().enumerate() {
        let unit = if k < 2 { "M" } else { "rad" };
        l.set_column(name, unit, col(&|i| s[i].state.position[k]));
    }
    for (k, name) in ["v_t", "v_r", "v_theta", "v_phi"].iter().enumerate() {
        let unit = if k < 2 { "1" } else { "1/M" };
        l.set_column(name, unit, col(&|i| s[i].state.velocity[k]));
    }
    l.set_column("null_residual", "1", col(&|i| s[i].null_residual));
    l
}

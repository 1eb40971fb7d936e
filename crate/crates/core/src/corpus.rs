//! Machine files on disk and the golden report battery.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::classical::{ptm_evolve_exact, tm_run, DEFAULT_MAX_SUPPORT};
use crate::error::{Error, Result};
use crate::machine::{encode_machine, parse_machine, MachineDesc, MachineKind};
use crate::quantum::{check_wellformed_local, run, MeasurementSchedule};
use crate::report;

pub const EXTENSIONS: [&str; 3] = ["tm", "ptm", "qtm"];

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Machine { path: PathBuf, source: Error },
}

pub fn load_machine(path: &Path) -> Result<MachineDesc, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.into(), source })?;
    let m = parse_machine(&text).map_err(|e| LoadError::Machine { path: path.into(), source: e.into() })?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    match MachineKind::from_keyword(ext) {
        Some(k) if k != m.kind() => Err(LoadError::Machine {
            path: path.into(),
            source: Error::KindMismatch { expected: k, found: m.kind() },
        }),
        _ => Ok(m),
    }
}

/// Every `*.tm`, `*.ptm`, `*.qtm` file in `dir`, sorted by file name.
pub fn load_corpus(dir: &Path) -> Result<Vec<(PathBuf, MachineDesc)>, LoadError> {
    let entries = fs::read_dir(dir).map_err(|source| LoadError::Io { path: dir.into(), source })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()).is_some_and(|e| EXTENSIONS.contains(&e)))
        .collect();
    paths.sort();
    paths.into_iter().map(|p| load_machine(&p).map(|m| (p, m))).collect()
}

/// Inputs and horizon used for golden reports.
pub const GOLDEN_INPUTS: [&str; 3] = ["", "1", "0110"];
pub const GOLDEN_HORIZON: u64 = 12;

/// The report a corpus file is pinned to: its code, its well-formedness
/// (quantum machines) and its runs on [`GOLDEN_INPUTS`].
pub fn golden_report(m: &MachineDesc) -> Result<Value> {
    let mut runs = serde_json::Map::new();
    let mut wf = Value::Null;
    let mut well_formed = true;
    if m.kind() == MachineKind::Qtm {
        let r = check_wellformed_local(m)?;
        well_formed = r.is_well_formed();
        wf = report::wellformed(&r, m);
    }
    for input in GOLDEN_INPUTS {
        let v = match m.kind() {
            MachineKind::Tm => report::classical_outcome(&tm_run(m, input, GOLDEN_HORIZON)?),
            MachineKind::Ptm => {
                report::classical_dist(&ptm_evolve_exact(m, input, GOLDEN_HORIZON, DEFAULT_MAX_SUPPORT)?)
            }
            MachineKind::Qtm if well_formed => {
                let s = MeasurementSchedule::every(GOLDEN_HORIZON);
                report::outcome_dist(&run(m, input, &s, GOLDEN_HORIZON, DEFAULT_MAX_SUPPORT)?, s.steps())
            }
            MachineKind::Qtm => Value::Null,
        };
        runs.insert(format!("input:{input}"), v);
    }
    Ok(json!({
        "machine": report::machine(m),
        "code": encode_machine(m).to_string(),
        "wellformed": wf,
        "runs": runs,
    }))
}

pub fn golden_path(dir: &Path, machine_file: &Path) -> PathBuf {
    let name = machine_file.file_name().and_then(|n| n.to_str()).unwrap_or("machine");
    dir.join("golden").join(format!("{name}.json"))
}

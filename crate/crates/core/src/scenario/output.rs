//! Result files: one table per run plus a timing sidecar.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use super::{Format, RunRecord, ScenarioError, Timing};

#[derive(Debug, Clone, PartialEq)]
pub struct WrittenFiles {
    pub results: PathBuf,
    pub timing: PathBuf,
}

fn io(path: &Path, e: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Runtime(format!("{}: {e}", path.display()))
}

/// Writes `<id>.csv` or `<id>.json` and `<id>.timing.json` into `dir`.
///
/// The results file depends only on the scenario and the seed; wall-clock
/// times go to the sidecar so reruns compare byte for byte.
pub fn write_outputs(
    record: &RunRecord,
    timing: &Timing,
    dir: &Path,
    format: Format,
) -> Result<WrittenFiles, ScenarioError> {
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let results = dir.join(format!(
        "{}.{}",
        record.id,
        match format {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    ));
    let body = match format {
        Format::Csv => to_csv(record)?,
        Format::Json => {
            // Non-finite numbers become `null`.
            let mut s = serde_json::to_string_pretty(record).map_err(|e| io(&results, e))?;
            s.push('\n');
            s
        }
    };
    fs::write(&results, body).map_err(|e| io(&results, e))?;
    let timing_path = dir.join(format!("{}.timing.json", record.id));
    let t = serde_json::to_string_pretty(timing).map_err(|e| io(&timing_path, e))?;
    fs::write(&timing_path, t + "\n").map_err(|e| io(&timing_path, e))?;
    Ok(WrittenFiles {
        results,
        timing: timing_path,
    })
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Columns: `cell`, `seed`, `stream`, the swept parameters, then every row
/// key in sorted order. Advisories are not part of the table.
fn to_csv(record: &RunRecord) -> Result<String, ScenarioError> {
    let params: BTreeSet<&String> = record.cells.iter().flat_map(|c| c.parameters.keys()).collect();
    let keys: BTreeSet<&String> = record
        .cells
        .iter()
        .flat_map(|c| c.rows.iter().flat_map(|r| r.keys()))
        .filter(|k| !params.contains(k))
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| ScenarioError::Runtime(e.to_string());
    let mut header = vec!["cell".to_string(), "seed".into(), "stream".into()];
    header.extend(params.iter().map(|p| p.to_string()));
    header.extend(keys.iter().map(|k| k.to_string()));
    w.write_record(&header).map_err(err)?;
    for c in &record.cells {
        for r in &c.rows {
            let mut line = vec![
                c.cell.to_string(),
                c.seed.map(|s| s.to_string()).unwrap_or_default(),
                c.stream.map(|s| s.to_string()).unwrap_or_default(),
            ];
            line.extend(
                params
                    .iter()
                    .map(|p| c.parameters.get(*p).map(cell_text).unwrap_or_default()),
            );
            line.extend(keys.iter().map(|k| r.get(*k).map(cell_text).unwrap_or_default()));
            w.write_record(&line).map_err(err)?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| ScenarioError::Runtime(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| ScenarioError::Runtime(e.to_string()))
}

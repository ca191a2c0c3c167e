//! Declarative scenario files: parse, validate, expand sweeps, run, write.
//!
//! A scenario is a TOML document
//!
//! ```toml
//! id = "steady_state_z2.5"
//! seed = 7                      # required by stochastic kinds
//!
//! [scenario]
//! kind = "dissipative_steady_state"
//! z = 2.5
//!
//! [[sweep]]
//! name = "z"
//! values = [1.1, 2.5, 10.0]
//!
//! [output]
//! format = "csv"
//! ```
//!
//! Sweep axes name parameters of `[scenario]` by dotted path
//! (`rates.pump`, `sensor.tau`); the cells are the Cartesian product of all
//! axes in file order, the last axis varying fastest.

mod kinds;
mod output;
mod registry;

pub use kinds::*;
pub use output::{write_outputs, WrittenFiles};
pub use registry::{shipped, shipped_by_id, ShippedScenario};

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Environment variable naming the output directory used when neither the
/// command line nor the scenario file sets one.
pub const OUTPUT_DIR_ENV: &str = "FARADAY_CV_OUT";

/// Output directory of last resort.
pub const DEFAULT_OUTPUT_DIR: &str = "results";

/// One output table row; keys are column names.
pub type Row = Map<String, Value>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub name: String,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    pub scenario: Scenario,
    #[serde(default)]
    pub sweep: Vec<SweepAxis>,
    #[serde(default)]
    pub output: OutputSpec,
    /// Directory that relative paths inside the scenario resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// A precondition that failed, with the path of the offending field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug)]
pub enum ScenarioError {
    Parse(String),
    Validation(Vec<Violation>),
    Runtime(String),
}

impl ScenarioError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Parse(_) => 2,
            ScenarioError::Validation(_) => 3,
            ScenarioError::Runtime(_) => 4,
        }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Parse(m) => write!(f, "parse error: {m}"),
            ScenarioError::Validation(v) => {
                write!(f, "validation failed:")?;
                for x in v {
                    write!(f, "\n  {x}")?;
                }
                Ok(())
            }
            ScenarioError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl From<crate::Error> for ScenarioError {
    fn from(e: crate::Error) -> Self {
        ScenarioError::Runtime(e.to_string())
    }
}

/// Violation for a library error raised while checking `prefix`.
pub(crate) fn violation_from(prefix: &str, e: crate::Error) -> Violation {
    match e {
        crate::Error::InvalidParameter { name, reason } => Violation {
            path: format!("{prefix}.{name}"),
            message: reason,
        },
        other => Violation {
            path: prefix.to_string(),
            message: other.to_string(),
        },
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Parse(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Parameter values of every sweep cell, in execution order.
    pub fn cells(&self) -> Result<Vec<Cell>, ScenarioError> {
        let base = serde_json::to_value(&self.scenario).map_err(|e| ScenarioError::Runtime(e.to_string()))?;
        let mut combos: Vec<Vec<(String, Value)>> = vec![Vec::new()];
        for axis in &self.sweep {
            let mut next = Vec::with_capacity(combos.len() * axis.values.len());
            for c in &combos {
                for v in &axis.values {
                    let mut c = c.clone();
                    c.push((axis.name.clone(), v.clone()));
                    next.push(c);
                }
            }
            combos = next;
        }
        let mut violations = Vec::new();
        let mut cells = Vec::with_capacity(combos.len());
        for (index, combo) in combos.into_iter().enumerate() {
            let mut value = base.clone();
            let mut ok = true;
            for (name, v) in &combo {
                if let Err(msg) = set_path(&mut value, name, v.clone()) {
                    violations.push(Violation {
                        path: format!("sweep.{name}"),
                        message: msg,
                    });
                    ok = false;
                }
            }
            if !ok {
                continue;
            }
            match serde_json::from_value::<Scenario>(value) {
                Ok(scenario) => cells.push(Cell {
                    index,
                    parameters: combo.into_iter().collect(),
                    scenario,
                }),
                Err(e) => violations.push(Violation {
                    path: "sweep".into(),
                    message: format!("cell {index}: {e}"),
                }),
            }
        }
        if violations.is_empty() {
            Ok(cells)
        } else {
            violations.dedup();
            Err(ScenarioError::Validation(violations))
        }
    }

    /// Schema and physics preconditions of every cell, without running.
    pub fn validate(&self) -> Result<Vec<Cell>, ScenarioError> {
        let mut violations = Vec::new();
        if self.id.trim().is_empty() {
            violations.push(Violation {
                path: "id".into(),
                message: "must not be empty".into(),
            });
        }
        for (i, axis) in self.sweep.iter().enumerate() {
            if axis.values.is_empty() {
                violations.push(Violation {
                    path: format!("sweep[{i}].values"),
                    message: "needs at least one value".into(),
                });
            }
        }
        let cells = match self.cells() {
            Ok(c) => c,
            Err(ScenarioError::Validation(v)) => {
                violations.extend(v);
                Vec::new()
            }
            Err(e) => return Err(e),
        };
        let stochastic = cells.iter().any(|c| c.scenario.is_stochastic());
        if stochastic && self.seed.is_none() {
            violations.push(Violation {
                path: "seed".into(),
                message: "required for a stochastic scenario".into(),
            });
        }
        for cell in &cells {
            for mut v in cell.scenario.check(self.base_dir.as_deref()) {
                if !self.sweep.is_empty() {
                    v.message = format!("{} (sweep cell {})", v.message, cell.index);
                }
                if !violations.contains(&v) {
                    violations.push(v);
                }
            }
        }
        if violations.is_empty() {
            Ok(cells)
        } else {
            Err(ScenarioError::Validation(violations))
        }
    }
}

/// Writes `value` at the dotted `path` of a JSON object; the key must exist.
fn set_path(root: &mut Value, path: &str, value: Value) -> Result<(), String> {
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| format!("`{}` is not a parameter table", parts[..i].join(".")))?;
        if *part == "kind" && i == 0 {
            return Err("the scenario kind cannot be swept".into());
        }
        let entry = obj
            .get_mut(*part)
            .ok_or_else(|| format!("unknown sweep axis `{path}`"))?;
        if i + 1 == parts.len() {
            *entry = value;
            return Ok(());
        }
        node = entry;
    }
    unreachable!("split yields at least one part")
}

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub parameters: BTreeMap<String, Value>,
    pub scenario: Scenario,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRecord {
    pub cell: usize,
    /// Root seed and stream index of the cell's random source, when it has one.
    pub seed: Option<u64>,
    pub stream: Option<u64>,
    pub parameters: BTreeMap<String, Value>,
    pub rows: Vec<Row>,
    pub advisories: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub id: String,
    pub kind: String,
    pub seed: Option<u64>,
    pub cells: Vec<CellRecord>,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
}

/// Wall-clock cost of a run; written beside the results, never inside them.
#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub cell_seconds: Vec<f64>,
}

/// Random source of one cell: ChaCha8 seeded from the root seed, on the
/// stream numbered by the cell index.
pub fn cell_rng(root: u64, cell: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(cell as u64);
    rng
}

/// Validates and runs every cell on a pool of `jobs` workers. Results come
/// back in cell order whatever the scheduling.
pub fn run(config: &ScenarioConfig, options: &RunOptions) -> Result<(RunRecord, Timing), ScenarioError> {
    let mut config = config.clone();
    if options.seed.is_some() {
        config.seed = options.seed;
    }
    let cells = config.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.unwrap_or(0))
        .build()
        .map_err(|e| ScenarioError::Runtime(e.to_string()))?;
    let base = config.base_dir.clone();
    let seed = config.seed;
    let results: Vec<Result<(CellRecord, f64), ScenarioError>> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let t0 = Instant::now();
                let stochastic = cell.scenario.is_stochastic();
                let mut rng = seed.filter(|_| stochastic).map(|s| cell_rng(s, cell.index));
                let ctx = RunContext {
                    base_dir: base.as_deref(),
                    rng: rng.as_mut(),
                };
                let out = cell.scenario.execute(ctx).map_err(|e| match e {
                    ScenarioError::Runtime(m) => ScenarioError::Runtime(format!("cell {}: {m}", cell.index)),
                    other => other,
                })?;
                Ok((
                    CellRecord {
                        cell: cell.index,
                        seed: seed.filter(|_| stochastic),
                        stream: stochastic.then_some(cell.index as u64),
                        parameters: cell.parameters.clone(),
                        rows: out.rows,
                        advisories: out.advisories,
                    },
                    t0.elapsed().as_secs_f64(),
                ))
            })
            .collect()
    });
    let mut records = Vec::with_capacity(results.len());
    let mut cell_seconds = Vec::with_capacity(results.len());
    for r in results {
        let (rec, secs) = r?;
        records.push(rec);
        cell_seconds.push(secs);
    }
    Ok((
        RunRecord {
            id: config.id.clone(),
            kind: config.scenario.kind().to_string(),
            seed,
            cells: records,
        },
        Timing {
            total_seconds: start.elapsed().as_secs_f64(),
            cell_seconds,
        },
    ))
}

/// Output directory: explicit choice, then the scenario file, then
/// [`OUTPUT_DIR_ENV`], then [`DEFAULT_OUTPUT_DIR`].
pub fn resolve_output_dir(cli: Option<&Path>, config: &ScenarioConfig) -> PathBuf {
    if let Some(p) = cli {
        return p.to_path_buf();
    }
    if let Some(p) = &config.output.dir {
        return match (&config.base_dir, p.is_relative()) {
            (Some(base), true) => base.join(p),
            _ => p.clone(),
        };
    }
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

#[cfg(test)]
mod tests {
    use super::*;

    const STEADY: &str = r#"
id = "t"
[scenario]
kind = "dissipative_steady_state"
z = 2.5
[[sweep]]
name = "z"
values = [1.1, 2.5, 10.0]
"#;

    #[test]
    fn sweep_expands_in_order() {
        let cfg = ScenarioConfig::from_toml_str(STEADY).unwrap();
        let cells = cfg.validate().unwrap();
        assert_eq!(cells.len(), 3);
        assert_eq!(cells[2].parameters["z"], serde_json::json!(10.0));
    }

    #[test]
    fn unknown_axis_is_a_violation() {
        let text = STEADY.replace("name = \"z\"", "name = \"zz\"");
        match ScenarioConfig::from_toml_str(&text).unwrap().validate() {
            Err(ScenarioError::Validation(v)) => assert!(v[0].message.contains("unknown sweep axis")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_are_distinguished() {
        let e = ScenarioConfig::from_toml_str("id = ").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = ScenarioConfig::from_toml_str("id = \"a\"\n[scenario]\nkind = \"nope\"\n").unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn eta_out_of_range_names_the_field() {
        let text = "id = \"s\"\n[scenario]\nkind = \"squeezing_scan\"\neta = 1.2\n";
        match ScenarioConfig::from_toml_str(text).unwrap().validate() {
            Err(ScenarioError::Validation(v)) => assert_eq!(v[0].path, "scenario.eta"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn streams_differ_and_repeat() {
        use rand::RngCore;
        let a = cell_rng(5, 0).next_u64();
        assert_eq!(a, cell_rng(5, 0).next_u64());
        assert_ne!(a, cell_rng(5, 1).next_u64());
    }
}

//! Running a scenario from the library: parse, sweep, write results.

use faraday_cv::scenario::{run, write_outputs, Format, RunOptions, ScenarioConfig};

const TEXT: &str = r#"
id = "noise_sweep"

[scenario]
kind = "dissipative_steady_state"
z = 2.5
noise = [{ kind = "single_atom_decay", rate = 0.0 }]

[[sweep]]
name = "z"
values = [1.5, 2.5, 5.0]

[[sweep]]
name = "noise"
values = [[], [{ kind = "single_atom_decay", rate = 0.5 }], [{ kind = "dephasing", rate = 0.5 }]]
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ScenarioConfig::from_toml_str(TEXT)?;
    let (record, timing) = run(
        &config,
        &RunOptions {
            seed: None,
            jobs: None,
        },
    )?;
    for c in &record.cells {
        let r = &c.rows[0];
        println!(
            "{}: EPR {}",
            serde_json::to_string(&c.parameters)?,
            r["epr_variance"]
        );
    }
    let dir = std::env::temp_dir().join("faraday-cv-example");
    let files = write_outputs(&record, &timing, &dir, Format::Json)?;
    println!("wrote {}", files.results.display());
    Ok(())
}

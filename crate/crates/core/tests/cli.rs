use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_faraday-cv");

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("FARADAY_CV_OUT")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SQUEEZING: &str = r#"
id = "sq"
[scenario]
kind = "squeezing_scan"
d_reference = 50.0
points = 3
"#;

#[test]
fn list_shows_every_shipped_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["list"], dir.path());
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let rows = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with("results"))
        .count();
    assert!(rows >= 7, "{text}");
    assert!(text.contains("steady_state_z2.5"));
}

#[test]
fn run_writes_results_and_timing_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "sq.toml", SQUEEZING);
    let o = cli(&["run", &file, "--out", "o", "--format", "json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("o/sq.json")).unwrap()).unwrap();
    assert_eq!(v["kind"], "squeezing_scan");
    assert_eq!(v["cells"][0]["rows"].as_array().unwrap().len(), 3);
    assert!(dir.path().join("o/sq.timing.json").exists());
}

#[test]
fn output_dir_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "sq.toml", SQUEEZING);
    // Neither flag nor config: the environment variable.
    let o = Command::new(BIN)
        .args(["run", &file])
        .current_dir(dir.path())
        .env("FARADAY_CV_OUT", dir.path().join("from_env"))
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("from_env/sq.csv").exists());
    // Nothing at all: ./results.
    assert!(cli(&["run", &file], dir.path()).status.success());
    assert!(dir.path().join("results/sq.csv").exists());
    // The config beats the environment, relative to the scenario file.
    let with_dir = write(
        dir.path(),
        "sq2.toml",
        &format!("{SQUEEZING}\n[output]\ndir = \"cfg\"\n"),
    );
    let o = Command::new(BIN)
        .args(["run", &with_dir])
        .current_dir(dir.path())
        .env("FARADAY_CV_OUT", dir.path().join("from_env2"))
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("cfg/sq.csv").exists());
    assert!(!dir.path().join("from_env2").exists());
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_toml = write(dir.path(), "a.toml", "id = \n");
    let bad_kind = write(
        dir.path(),
        "b.toml",
        "id = \"b\"\n[scenario]\nkind = \"teleport\"\n",
    );
    let unknown_field = write(
        dir.path(),
        "c.toml",
        "id = \"c\"\n[scenario]\nkind = \"memory\"\nkapa = 1.0\n",
    );
    for f in [
        bad_toml.as_str(),
        bad_kind.as_str(),
        unknown_field.as_str(),
        "no_such_scenario",
    ] {
        let o = cli(&["validate", f], dir.path());
        assert_eq!(o.status.code(), Some(2), "{f}: {}", stderr(&o));
    }
    assert_eq!(
        cli(&["run", "x", "--jobs", "many"], dir.path()).status.code(),
        Some(2)
    );
}

#[test]
fn validation_errors_exit_3_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            SQUEEZING.replace("points = 3", "points = 3\neta = 1.2"),
            "scenario.eta",
        ),
        (
            format!("{SQUEEZING}\n[[sweep]]\nname = \"dd\"\nvalues = [1.0]\n"),
            "sweep.dd",
        ),
        (
            "id = \"m\"\n[scenario]\nkind = \"memory\"\nrandom_inputs = 3\n".to_string(),
            "seed",
        ),
        (
            "id = \"s\"\n[scenario]\nkind = \"dissipative_steady_state\"\nz = -1.0\n".to_string(),
            "scenario.z",
        ),
    ];
    for (i, (text, path)) in cases.iter().enumerate() {
        let f = write(dir.path(), &format!("v{i}.toml"), text);
        for cmd in ["validate", "run"] {
            let o = cli(&[cmd, &f], dir.path());
            assert_eq!(o.status.code(), Some(3), "{cmd} {path}: {}", stderr(&o));
            assert!(stderr(&o).contains(path), "{}", stderr(&o));
        }
    }
}

#[test]
fn runtime_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "sq.toml", SQUEEZING);
    // The output location is an existing file.
    write(dir.path(), "blocked", "");
    let o = cli(&["run", &file, "--out", "blocked"], dir.path());
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn seed_flag_overrides_and_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    for seed in ["1", "2"] {
        let o = cli(
            &[
                "run",
                "map_check",
                "--seed",
                seed,
                "--out",
                seed,
                "--format",
                "json",
            ],
            dir.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let read = |s: &str| -> serde_json::Value {
        serde_json::from_slice(&std::fs::read(dir.path().join(s).join("map_check.json")).unwrap()).unwrap()
    };
    let (a, b) = (read("1"), read("2"));
    assert_eq!(a["seed"], 1);
    assert_eq!(b["seed"], 2);
    assert_ne!(a["cells"][0]["rows"], b["cells"][0]["rows"]);
}

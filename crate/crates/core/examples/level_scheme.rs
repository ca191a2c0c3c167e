//! Interaction asymmetry Z of the Cs D2 line versus drive detuning.
//!
//! `cargo run --example level_scheme -- [out.toml]` also writes the 850 MHz
//! scheme as a level-scheme file that `z_parameter` scenarios can load.

use faraday_cv::levels::{cesium_d2_tables, z_from_scheme, DrivePolarization};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:>10} {:>4} {:>8} {:>8} {:>8}",
        "Δ (MHz)", "pol", "r", "Z", "ν/μ"
    );
    for pol in [DrivePolarization::Y, DrivePolarization::X] {
        for mhz in [300.0, 500.0, 850.0, 1500.0, 3000.0, 10_000.0] {
            let b = z_from_scheme(&cesium_d2_tables(mhz * 1e6, pol)?)?;
            println!(
                "{mhz:>10.0} {:>4?} {:>8.4} {:>8.4} {:>8.4}",
                pol,
                b.r,
                b.z,
                b.nu / b.mu
            );
        }
    }

    if let Some(path) = std::env::args().nth(1) {
        let scheme = cesium_d2_tables(850e6, DrivePolarization::Y)?;
        std::fs::write(&path, scheme.to_toml_string()?)?;
        println!("wrote {path}");
    }
    Ok(())
}

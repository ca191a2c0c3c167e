use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::angular::{clebsch_gordan, hyperfine_strength};
use super::scheme::{DipolePath, ExcitedLevel, GroundLevel, LevelScheme};
use crate::error::{invalid, Result};

const CS_D2_DATA: &str = include_str!("../../data/cs_d2.toml");

/// Line constants of the Cs D₂ transition, read from the bundled data file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CsD2Data {
    pub nuclear_spin: f64,
    pub j_ground: f64,
    pub j_excited: f64,
    pub wavelength_m: f64,
    pub natural_linewidth_hz: f64,
    pub interval_f5_f4_hz: f64,
    pub interval_f4_f3_hz: f64,
    pub interval_f3_f2_hz: f64,
}

pub fn cs_d2_data() -> CsD2Data {
    toml::from_str(CS_D2_DATA).expect("bundled Cs D2 data parses")
}

/// Polarisation of the strong classical drive relative to the spin
/// orientation `x̂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrivePolarization {
    /// Classical field drives `σ` (diagonal) legs, quantum field `π`.
    Y,
    /// Classical field drives `π` (vertical) legs, quantum field `σ`.
    X,
}

/// Two-level encoding `|↑⟩ = |F=4, m=4⟩`, `|↓⟩ = |F=4, m=3⟩` in the Cs ground
/// state, probed off-resonantly on the D₂ line through `F' = 3, 4, 5`.
///
/// `detuning_hz` is the laser detuning from `F' = 5` (positive is blue).
/// Each leg carries `√S_{4F'}·⟨4 m | F' m'; 1 q⟩`, so that the product over a
/// path is proportional to the Raman matrix element through `F'`.
pub fn cesium_d2_tables(detuning_hz: f64, polarization: DrivePolarization) -> Result<LevelScheme> {
    if !detuning_hz.is_finite() {
        return Err(invalid("detuning", "must be finite"));
    }
    let data = cs_d2_data();
    let gamma = TAU * data.natural_linewidth_hz;
    let detuning_of = |f_exc: i32| -> f64 {
        let mut d = detuning_hz;
        if f_exc <= 4 {
            d += data.interval_f5_f4_hz;
        }
        if f_exc <= 3 {
            d += data.interval_f4_f3_hz;
        }
        TAU * d
    };

    let up = GroundLevel {
        label: "up".into(),
        f: 4.0,
        m: 4.0,
    };
    let down = GroundLevel {
        label: "down".into(),
        f: 4.0,
        m: 3.0,
    };

    let mut excited = Vec::new();
    for f_exc in [3, 4, 5] {
        for m in [3, 4] {
            if m <= f_exc {
                excited.push(ExcitedLevel {
                    label: excited_label(f_exc, m),
                    f: f_exc as f64,
                    m: m as f64,
                    detuning: detuning_of(f_exc),
                    linewidth: gamma,
                });
            }
        }
    }

    // Leg amplitude between ground (4, m) and excited (F', m').
    let leg = |m: f64, f_exc: i32, m_exc: f64| -> Result<f64> {
        let s = hyperfine_strength(
            data.j_ground,
            data.j_excited,
            data.nuclear_spin,
            4.0,
            f_exc as f64,
        )?;
        Ok(s.sqrt() * clebsch_gordan(f_exc as f64, m_exc, 1.0, m - m_exc, 4.0, m)?)
    };

    let mut paths = Vec::new();
    for (from, to) in [(&up, &down), (&down, &up)] {
        // The classical leg changes m for a ŷ drive and keeps it for x̂; the
        // quantum leg does the opposite.
        let m_exc = match polarization {
            DrivePolarization::Y => to.m,
            DrivePolarization::X => from.m,
        };
        for f_exc in [3, 4, 5] {
            if m_exc > f_exc as f64 {
                continue;
            }
            let c_in = leg(from.m, f_exc, m_exc)?;
            let c_out = leg(to.m, f_exc, m_exc)?;
            if c_in != 0.0 && c_out != 0.0 {
                paths.push(DipolePath {
                    from: from.label.clone(),
                    via: excited_label(f_exc, m_exc as i32),
                    to: to.label.clone(),
                    c_in,
                    c_out,
                });
            }
        }
    }

    let scheme = LevelScheme {
        name: format!(
            "Cs D2, {:?} drive, {:.1} MHz from F'=5",
            polarization,
            detuning_hz / 1e6
        ),
        up: "up".into(),
        down: "down".into(),
        rabi_frequency: TAU * 1e6,
        ground_levels: vec![up, down],
        excited_levels: excited,
        dipole_paths: paths,
    };
    scheme.validate()?;
    Ok(scheme)
}

fn excited_label(f_exc: i32, m: i32) -> String {
    format!("F'={f_exc},m={m}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levels::{z_from_scheme, Regime};

    fn fs(scheme: &LevelScheme, from: &str, to: &str) -> Vec<f64> {
        let mut v: Vec<f64> = scheme.levels_on_paths(from, to).iter().map(|e| e.f).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn path_membership() {
        let y = cesium_d2_tables(850e6, DrivePolarization::Y).unwrap();
        assert_eq!(fs(&y, "down", "up"), vec![4.0, 5.0]);
        assert_eq!(fs(&y, "up", "down"), vec![3.0, 4.0, 5.0]);
        let x = cesium_d2_tables(850e6, DrivePolarization::X).unwrap();
        assert_eq!(fs(&x, "down", "up"), vec![3.0, 4.0, 5.0]);
        assert_eq!(fs(&x, "up", "down"), vec![4.0, 5.0]);
    }

    #[test]
    fn blue_detuning_gives_z_near_two_and_a_half() {
        let b = z_from_scheme(&cesium_d2_tables(850e6, DrivePolarization::Y).unwrap()).unwrap();
        assert_eq!(b.regime, Regime::PassiveDominated);
        assert!((b.z - 2.5318).abs() < 1e-3, "Z = {}", b.z);
    }

    #[test]
    fn x_drive_inverts_r() {
        let y = z_from_scheme(&cesium_d2_tables(850e6, DrivePolarization::Y).unwrap()).unwrap();
        let x = z_from_scheme(&cesium_d2_tables(850e6, DrivePolarization::X).unwrap()).unwrap();
        assert!((x.r * y.r - 1.0).abs() < 1e-12);
        assert_eq!(x.regime, Regime::ActiveDominated);
        assert!((x.z * y.z - 1.0).abs() < 1e-12);
    }

    #[test]
    fn red_detuning_flips_dominance() {
        let b = z_from_scheme(&cesium_d2_tables(-850e6, DrivePolarization::Y).unwrap()).unwrap();
        assert_eq!(b.regime, Regime::ActiveDominated);
        assert!(b.z < 1.0);
    }

    #[test]
    fn far_detuning_approaches_qnd() {
        let mut last = 0.0;
        for d in [1e9, 1e10, 1e11] {
            let b = z_from_scheme(&cesium_d2_tables(d, DrivePolarization::Y).unwrap()).unwrap();
            assert!(b.r > 1.0 && b.z > last);
            last = b.z;
        }
        // r - 1 ∝ 1/Δ, so Z grows like √Δ.
        assert!(last > 20.0);
    }
}

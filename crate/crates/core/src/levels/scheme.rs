use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::DETUNING_ADVISORY_RATIO;
use crate::error::{invalid, Error, Result};
use crate::maps::mu_nu;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundLevel {
    pub label: String,
    pub f: f64,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitedLevel {
    pub label: String,
    pub f: f64,
    pub m: f64,
    /// Laser detuning from this level, rad/s; positive is blue.
    pub detuning: f64,
    /// Natural linewidth, rad/s.
    pub linewidth: f64,
}

/// Two-photon Raman path `from → via → to`. The coefficients are the dipole
/// matrix elements of each leg relative to the reduced line element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipolePath {
    pub from: String,
    pub via: String,
    pub to: String,
    pub c_in: f64,
    pub c_out: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelScheme {
    pub name: String,
    /// Label of the ground level all atoms start in.
    pub up: String,
    /// Label of the ground level one quantum away.
    pub down: String,
    /// Rabi frequency of the classical drive, rad/s.
    pub rabi_frequency: f64,
    pub ground_levels: Vec<GroundLevel>,
    pub excited_levels: Vec<ExcitedLevel>,
    pub dipole_paths: Vec<DipolePath>,
}

impl LevelScheme {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let scheme: Self = toml::from_str(text).map_err(|e| invalid("level_scheme", e.to_string()))?;
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid("level_scheme", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Numerical(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let mut ground = HashSet::new();
        for g in &self.ground_levels {
            if !ground.insert(g.label.as_str()) {
                return Err(Error::DuplicateMode(g.label.clone()));
            }
        }
        let mut excited = HashSet::new();
        for e in &self.excited_levels {
            if !excited.insert(e.label.as_str()) || ground.contains(e.label.as_str()) {
                return Err(Error::DuplicateMode(e.label.clone()));
            }
            if !(e.linewidth >= 0.0) {
                return Err(invalid("linewidth", format!("negative for {}", e.label)));
            }
        }
        for lbl in [&self.up, &self.down] {
            if !ground.contains(lbl.as_str()) {
                return Err(invalid("up/down", format!("`{lbl}` is not a ground level")));
            }
        }
        for p in &self.dipole_paths {
            if !ground.contains(p.from.as_str()) || !ground.contains(p.to.as_str()) {
                return Err(invalid(
                    "dipole_paths",
                    format!("{} → {}: unknown ground level", p.from, p.to),
                ));
            }
            if !excited.contains(p.via.as_str()) {
                return Err(invalid(
                    "dipole_paths",
                    format!("unknown excited level `{}`", p.via),
                ));
            }
            if p.c_in.abs() > 1.0 + 1e-12 || p.c_out.abs() > 1.0 + 1e-12 {
                return Err(invalid("dipole_paths", "coefficients must satisfy |c| ≤ 1"));
            }
        }
        Ok(())
    }

    fn excited(&self, label: &str) -> Option<&ExcitedLevel> {
        self.excited_levels.iter().find(|e| e.label == label)
    }

    /// Excited levels used on paths between the two ground levels, in
    /// either direction.
    pub fn levels_on_paths(&self, from: &str, to: &str) -> Vec<&ExcitedLevel> {
        self.dipole_paths
            .iter()
            .filter(|p| p.from == from && p.to == to)
            .filter_map(|p| self.excited(&p.via))
            .collect()
    }

    /// Levels where the adiabatic-elimination assumption `|Δ| ≫ γ` is weak.
    pub fn advisories(&self) -> Vec<String> {
        self.excited_levels
            .iter()
            .filter(|e| e.linewidth > 0.0 && e.detuning.abs() / e.linewidth < DETUNING_ADVISORY_RATIO)
            .map(|e| {
                format!(
                    "{}: |Δ|/γ = {:.2} < {DETUNING_ADVISORY_RATIO}",
                    e.label,
                    e.detuning.abs() / e.linewidth
                )
            })
            .collect()
    }
}

/// Off-resonant Raman rate `Ω_R² |Σ_l c_al c_lb / Δ_l|² γ`, with the
/// amplitudes of all excited levels interfering and `γ` the mean linewidth
/// of the levels involved.
pub fn path_rate(scheme: &LevelScheme, from: &str, to: &str) -> Result<f64> {
    let mut amplitude = 0.0;
    let mut gamma = 0.0;
    let mut count = 0usize;
    for p in scheme
        .dipole_paths
        .iter()
        .filter(|p| p.from == from && p.to == to)
    {
        let level = scheme
            .excited(&p.via)
            .ok_or_else(|| invalid("dipole_paths", format!("unknown excited level `{}`", p.via)))?;
        if level.detuning == 0.0 {
            return Err(invalid("detuning", format!("resonant with {}", level.label)));
        }
        amplitude += p.c_in * p.c_out / level.detuning;
        gamma += level.linewidth;
        count += 1;
    }
    if count == 0 {
        return Err(Error::NoPath {
            from: from.to_string(),
            to: to.to_string(),
        });
    }
    gamma /= count as f64;
    Ok(scheme.rabi_frequency.powi(2) * amplitude * amplitude * gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `r > 1`, `Z > 1`: the beamsplitter part dominates.
    PassiveDominated,
    /// `r < 1`, reported on the `Z < 1` branch.
    ActiveDominated,
    /// `r = 1`: balanced, QND-like; `Z` is infinite.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchingResult {
    pub gamma_up_down: f64,
    pub gamma_down_up: f64,
    /// `√(Γ_{↓→↑}/Γ_{↑→↓})`.
    pub r: f64,
    pub z: f64,
    pub mu: f64,
    pub nu: f64,
    pub regime: Regime,
}

/// Interaction asymmetry `Z` from the ratio of the passive (`↓ → ↑`) and
/// active (`↑ → ↓`) Raman rates: `r² = Γ_{↓→↑}/Γ_{↑→↓} = μ²/ν²`, hence
/// `Z² = (r + 1)/(r - 1)`. For `r < 1` the roles of `μ` and `ν` swap and the
/// result lies on the `Z < 1` branch, `Z² = (1 - r)/(1 + r)`.
pub fn z_from_scheme(scheme: &LevelScheme) -> Result<BranchingResult> {
    scheme.validate()?;
    let gamma_up_down = path_rate(scheme, &scheme.up, &scheme.down)?;
    let gamma_down_up = path_rate(scheme, &scheme.down, &scheme.up)?;
    if !(gamma_up_down > 0.0 && gamma_down_up > 0.0) {
        return Err(invalid(
            "level_scheme",
            "both transition directions need a nonzero rate",
        ));
    }
    z_from_rates(gamma_up_down, gamma_down_up)
}

/// [`z_from_scheme`] given the two rates directly.
pub fn z_from_rates(gamma_up_down: f64, gamma_down_up: f64) -> Result<BranchingResult> {
    if !(gamma_up_down > 0.0 && gamma_down_up > 0.0) {
        return Err(invalid("rates", "must be positive"));
    }
    let r = (gamma_down_up / gamma_up_down).sqrt();
    let (z, regime) = if (r - 1.0).abs() <= 1e-12 {
        (f64::INFINITY, Regime::Degenerate)
    } else if r > 1.0 {
        (((r + 1.0) / (r - 1.0)).sqrt(), Regime::PassiveDominated)
    } else {
        (((1.0 - r) / (1.0 + r)).sqrt(), Regime::ActiveDominated)
    };
    let (mu, nu) = if regime == Regime::Degenerate {
        (f64::INFINITY, f64::INFINITY)
    } else {
        mu_nu(z)
    };
    Ok(BranchingResult {
        gamma_up_down,
        gamma_down_up,
        r,
        z,
        mu,
        nu,
        regime,
    })
}

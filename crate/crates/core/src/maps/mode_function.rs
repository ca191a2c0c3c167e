use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeFunctionKind {
    Flat,
    CosModulated,
    SinModulated,
    ExpRising,
    ExpFalling,
}

/// Temporal envelope of a light mode over a pulse `[0, T]`, normalised so
/// that `(1/T)∫₀ᵀ f(t)² dt = 1`.
///
/// Modulated kinds carry the Larmor carrier, `f(t) ∝ √2 cos(Ωt)` or
/// `√2 sin(Ωt)`. Exponential kinds are `√(2γT) e^{±γt}/N±` with
/// `N₊ = √(e^{2γT} - 1)` and `N₋ = √(1 - e^{-2γT})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeFunctionSpec {
    pub kind: ModeFunctionKind,
    /// `γ` for exponential kinds, 1/s.
    pub rate: f64,
    /// `Ω` for modulated kinds, rad/s.
    pub omega: f64,
    /// Pulse duration `T`, s.
    pub duration: f64,
}

impl ModeFunctionSpec {
    pub fn new(kind: ModeFunctionKind, rate: f64, omega: f64, duration: f64) -> Result<Self> {
        if !(duration > 0.0) {
            return Err(invalid("T", "must be positive"));
        }
        if matches!(
            kind,
            ModeFunctionKind::CosModulated | ModeFunctionKind::SinModulated
        ) && !(omega != 0.0 && omega.is_finite())
        {
            return Err(invalid(
                "omega",
                "modulated modes need a nonzero Larmor frequency",
            ));
        }
        if matches!(kind, ModeFunctionKind::ExpRising | ModeFunctionKind::ExpFalling) && !(rate > 0.0) {
            return Err(invalid("rate", "exponential modes need a positive rate"));
        }
        Ok(Self {
            kind,
            rate,
            omega,
            duration,
        })
    }

    /// Constant prefactor applied to the raw shape.
    pub fn normalization(&self) -> f64 {
        let t = self.duration;
        match self.kind {
            ModeFunctionKind::Flat => 1.0,
            ModeFunctionKind::CosModulated | ModeFunctionKind::SinModulated => {
                let wt = self.omega * t;
                let s = if wt == 0.0 {
                    1.0
                } else {
                    (2.0 * wt).sin() / (2.0 * wt)
                };
                let sign = if self.kind == ModeFunctionKind::CosModulated {
                    1.0
                } else {
                    -1.0
                };
                (2.0 / (1.0 + sign * s)).sqrt()
            }
            ModeFunctionKind::ExpRising => {
                let gt = self.rate * t;
                (2.0 * gt).sqrt() / (2.0 * gt).exp_m1().sqrt()
            }
            ModeFunctionKind::ExpFalling => {
                let gt = self.rate * t;
                (2.0 * gt).sqrt() / (-(-2.0 * gt).exp_m1()).sqrt()
            }
        }
    }
}

pub fn mode_function(spec: &ModeFunctionSpec, t: f64) -> Result<f64> {
    if !(0.0..=spec.duration).contains(&t) {
        return Err(invalid("t", format!("{t} outside [0, {}]", spec.duration)));
    }
    let shape = match spec.kind {
        ModeFunctionKind::Flat => 1.0,
        ModeFunctionKind::CosModulated => (spec.omega * t).cos(),
        ModeFunctionKind::SinModulated => (spec.omega * t).sin(),
        ModeFunctionKind::ExpRising => (spec.rate * t).exp(),
        ModeFunctionKind::ExpFalling => (-spec.rate * t).exp(),
    };
    Ok(spec.normalization() * shape)
}

/// `(1/T)∫₀ᵀ f g dt` by composite Simpson quadrature on `2·panels` intervals.
pub fn mode_overlap(f: &ModeFunctionSpec, g: &ModeFunctionSpec, panels: usize) -> Result<f64> {
    if (f.duration - g.duration).abs() > 1e-12 * f.duration {
        return Err(invalid("T", "mode functions must share the pulse duration"));
    }
    let n = 2 * panels.max(1);
    let t_end = f.duration;
    let h = t_end / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let t = (i as f64 * h).min(t_end);
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * mode_function(f, t)? * mode_function(g, t)?;
    }
    Ok(acc * h / 3.0 / t_end)
}

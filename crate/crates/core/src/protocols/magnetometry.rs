//! RF magnetometry with an oriented ensemble.
//!
//! A resonant RF field of amplitude `B` tips the macroscopic spin `J_x = 4N_A`
//! (one `F=4` atom contributes 4) at the rate `c·γ·B·J_x`, where `γ` is the
//! gyromagnetic ratio and `c` a geometry calibration (1/2 for a linearly
//! polarised field in the rotating frame). The transverse spin decays with
//! `T₂`, so after a pulse of length `τ` the displacement is
//!
//! `δJ = c·γ·B·J_x·T₂·(1 - e^{-τ/T₂})`.
//!
//! The readout adds the coherent-state projection noise `var J_z = J_x/2 =
//! 2N_A`, light shot noise `PN/κ²` and an optional technical floor.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::constants::{CS_F4_GYROMAGNETIC, VACUUM_VARIANCE};
use crate::error::{invalid, Result};
use crate::gaussian::{homodyne_condition, GaussianState, ModeId, ModeKind, Outcome, Quadrature};
use crate::maps::qnd_single_pass;

/// Spin length per oriented atom.
pub const SPIN_PER_ATOM: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MagnetometryConfig {
    pub n_atoms: f64,
    /// RF amplitude (T).
    pub b_rf: f64,
    /// RF pulse length (s).
    pub tau: f64,
    /// Transverse spin lifetime (s).
    pub t2: f64,
    /// Larmor frequency (rad/s); the RF is tuned to it.
    pub omega: f64,
    /// rad/(s·T).
    pub gyromagnetic: f64,
    /// Field-to-rotation calibration.
    pub rf_coupling: f64,
    /// Readout coupling.
    pub probe_kappa: f64,
    /// Additive noise floor in units of the projection noise.
    pub technical_noise: f64,
}

impl Default for MagnetometryConfig {
    fn default() -> Self {
        Self {
            n_atoms: 1.5e12,
            b_rf: 0.0,
            tau: 22e-3,
            t2: 30e-3,
            omega: 2.0 * std::f64::consts::PI * 322e3,
            gyromagnetic: CS_F4_GYROMAGNETIC,
            rf_coupling: 0.5,
            probe_kappa: 1.0,
            technical_noise: 0.0,
        }
    }
}

impl MagnetometryConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n_atoms", self.n_atoms),
            ("tau", self.tau),
            ("t2", self.t2),
            ("gyromagnetic", self.gyromagnetic),
            ("rf_coupling", self.rf_coupling),
            ("probe_kappa", self.probe_kappa),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.b_rf >= 0.0 && self.b_rf.is_finite()) {
            return Err(invalid("b_rf", "must be non-negative"));
        }
        if !(self.technical_noise >= 0.0) {
            return Err(invalid("technical_noise", "must be non-negative"));
        }
        Ok(())
    }

    pub fn advisories(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.tau > 5.0 * self.t2 {
            out.push(format!(
                "τ = {:.3e} s exceeds 5·T₂; the signal has saturated",
                self.tau
            ));
        }
        out
    }

    pub fn j_x(&self) -> f64 {
        SPIN_PER_ATOM * self.n_atoms
    }

    /// `T₂(1 - e^{-τ/T₂})`, the effective integration time.
    pub fn effective_time(&self) -> f64 {
        -self.t2 * (-self.tau / self.t2).exp_m1()
    }

    /// Spin displacement per tesla of RF amplitude.
    pub fn response(&self) -> f64 {
        self.rf_coupling * self.gyromagnetic * self.j_x() * self.effective_time()
    }

    /// `var J_z = J_x/2` of the coherent spin state.
    pub fn projection_noise(&self) -> f64 {
        0.5 * self.j_x()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MagnetometryResult {
    pub j_x: f64,
    pub mean_displacement: f64,
    pub pn_variance: f64,
    pub shot_noise_variance: f64,
    pub total_variance: f64,
    pub snr: f64,
    /// Field giving unit SNR in one pulse (T).
    pub min_field: f64,
    /// `min_field·√τ` (T/√Hz).
    pub sensitivity: f64,
}

pub fn magnetometry_run(config: &MagnetometryConfig) -> Result<MagnetometryResult> {
    config.validate()?;
    let pn = config.projection_noise();
    let sn = pn / (config.probe_kappa * config.probe_kappa);
    let total = pn + sn + config.technical_noise * pn;
    let disp = config.response() * config.b_rf;
    let min_field = total.sqrt() / config.response();
    Ok(MagnetometryResult {
        j_x: config.j_x(),
        mean_displacement: disp,
        pn_variance: pn,
        shot_noise_variance: sn,
        total_variance: total,
        snr: disp * disp / total,
        min_field,
        sensitivity: min_field * config.tau.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnrPoint {
    pub tau: f64,
    pub snr_coherent: f64,
    pub snr_conditioned: f64,
    pub ratio: f64,
}

/// SNR with and without a conditioning probe of strength `pre_probe_kappa`
/// ahead of the RF pulse, for each pulse length in `taus`.
///
/// Each run is a one-mode Gaussian pipeline in Holstein-Primakoff units:
/// conditioning probe and homodyne, relaxation of the atomic covariance
/// towards the coherent state with `squeezing_lifetime` (none if `None`),
/// the RF displacement of `p_A`, and a QND readout at `probe_kappa`.
pub fn entanglement_assisted_snr(
    config: &MagnetometryConfig,
    pre_probe_kappa: f64,
    squeezing_lifetime: Option<f64>,
    taus: &[f64],
) -> Result<Vec<SnrPoint>> {
    config.validate()?;
    if !(pre_probe_kappa >= 0.0 && pre_probe_kappa.is_finite()) {
        return Err(invalid("pre_probe_kappa", "must be non-negative"));
    }
    if let Some(l) = squeezing_lifetime {
        if !(l > 0.0) {
            return Err(invalid("squeezing_lifetime", "must be positive"));
        }
    }
    let b = if config.b_rf > 0.0 { config.b_rf } else { 1e-15 };
    taus.iter()
        .map(|&tau| {
            if !(tau > 0.0) {
                return Err(invalid("tau", "must be positive"));
            }
            let cfg = MagnetometryConfig {
                tau,
                b_rf: b,
                ..*config
            };
            let coherent = pulse_snr(&cfg, 0.0, squeezing_lifetime)?;
            let conditioned = pulse_snr(&cfg, pre_probe_kappa, squeezing_lifetime)?;
            Ok(SnrPoint {
                tau,
                snr_coherent: coherent,
                snr_conditioned: conditioned,
                ratio: conditioned / coherent,
            })
        })
        .collect()
}

fn pulse_snr(config: &MagnetometryConfig, pre_probe_kappa: f64, lifetime: Option<f64>) -> Result<f64> {
    let atom = ModeId::atomic("A");
    let probe = ModeId::new("probe", ModeKind::LightCos);
    let readout = ModeId::new("readout", ModeKind::LightCos);

    let mut state = GaussianState::vacuum(vec![atom.clone(), probe.clone()])?;
    state = state.apply_map(&qnd_single_pass(pre_probe_kappa, atom.clone(), probe.clone())?)?;
    let (mut state, _) = homodyne_condition(&state, &probe.label, Quadrature::X, Outcome::Value(0.0))?;

    if let Some(l) = lifetime {
        let keep = (-config.tau / l).exp();
        let cov = state.cov() * keep + DMatrix::identity(2, 2) * (VACUUM_VARIANCE * (1.0 - keep));
        state = GaussianState::new(state.modes().to_vec(), state.mean().clone(), cov)?;
    }

    let shift = config.response() * config.b_rf / config.j_x().sqrt();
    state = state.displace(&atom.label, 0.0, shift)?;

    state = state.tensor(&GaussianState::vacuum(vec![readout.clone()])?)?;
    state = state.apply_map(&qnd_single_pass(config.probe_kappa, atom, readout.clone())?)?;
    let signal = state.linear_mean(&[(&readout.label, Quadrature::X, 1.0)])?;
    let k2 = config.probe_kappa * config.probe_kappa;
    let noise = state.quadrature_variance(&readout.label, Quadrature::X)?
        + config.technical_noise * VACUUM_VARIANCE * k2;
    Ok(signal * signal / noise)
}

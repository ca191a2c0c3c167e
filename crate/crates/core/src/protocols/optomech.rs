//! Hybrid interface between a mechanical oscillator and an atomic ensemble.
//!
//! A long pulse that meets the optomechanical cavity and then an ensemble
//! with inverted Larmor frequency `-ω_m` realises the two-sector QND map on
//! the hybrid EPR modes
//!
//! `x_cos = (x_A + p_m)/√2`, `p_cos = (p_A - x_m)/√2`,
//! `x_sin = (x_A - p_m)/√2`, `p_sin = (p_A + x_m)/√2`.
//!
//! Each system couples to light with strength `κ`, so light reads each hybrid
//! `p` with strength `√2·κ`. The reduction of the cavity to a QND map (bad
//! cavity limit) is taken as given.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::constants::{CS_D2_WAVELENGTH, EPR_ENTANGLEMENT_BOUND, HBAR, K_B};
use crate::error::{invalid, Result};
use crate::gaussian::{
    homodyne_condition, GaussianState, ModeId, ModeKind, Outcome, Quadrature, SymplecticMap,
};
use crate::maps::{qnd_two_cell, SectorModes, TwoCellModes};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptomechParams {
    /// Optical wavenumber (1/m).
    pub k: f64,
    /// Effective mass (kg).
    pub mass: f64,
    /// Mechanical frequency (rad/s).
    pub omega_m: f64,
    pub finesse: f64,
    /// Photons per pulse.
    pub n_photons: f64,
    /// Mechanical quality factor `ω_m/γ_m`.
    pub q: f64,
    /// Bath temperature (K).
    pub t0: f64,
}

impl OptomechParams {
    /// A 10 pg membrane at 1 MHz in a finesse-1000 cavity probed at the Cs D2
    /// wavelength, at room temperature.
    ///
    /// `x_ZPF = √(ħ/2mω_m) ≈ 2.90e-14 m` and `2k·x_ZPF·F ≈ 4.27e-4`, so
    /// `κ_OM = 1` needs `√N_ph ≈ 2342`, i.e. `N_ph ≈ 5.49e6` photons.
    pub fn desk_preset() -> Self {
        Self {
            k: 2.0 * std::f64::consts::PI / CS_D2_WAVELENGTH,
            mass: 1e-14,
            omega_m: 2.0 * std::f64::consts::PI * 1e6,
            finesse: 1000.0,
            n_photons: 5.49e6,
            q: 1e6,
            t0: 300.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("k", self.k),
            ("mass", self.mass),
            ("omega_m", self.omega_m),
            ("finesse", self.finesse),
            ("n_photons", self.n_photons),
            ("q", self.q),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.t0 >= 0.0 && self.t0.is_finite()) {
            return Err(invalid("t0", "must be non-negative"));
        }
        Ok(())
    }

    /// `√(ħ/2mω_m)`.
    pub fn x_zpf(&self) -> f64 {
        (HBAR / (2.0 * self.mass * self.omega_m)).sqrt()
    }

    /// `k_B T₀/ħω_m`.
    pub fn n_bar(&self) -> f64 {
        K_B * self.t0 / (HBAR * self.omega_m)
    }

    /// Mechanical linewidth `ω_m/Q`.
    pub fn gamma_m(&self) -> f64 {
        self.omega_m / self.q
    }
}

/// `κ_OM = 2k·x_ZPF·√N_ph·F`.
pub fn optomech_kappa(params: &OptomechParams) -> Result<f64> {
    params.validate()?;
    Ok(2.0 * params.k * params.x_zpf() * params.n_photons.sqrt() * params.finesse)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HybridEpr {
    pub n_bar: f64,
    pub kappa: f64,
    /// `[1/(1 + n̄) + 2κ²]⁻¹`.
    pub closed_form: f64,
    /// Each sector conditioned on its own light quadrature.
    pub pipeline: f64,
    /// Both sectors conditioned on both outcomes. Lower than `pipeline` for
    /// `n̄ > 0`, where the thermal mirror correlates `p_cos` with `p_sin`.
    pub joint: f64,
    pub entangled: bool,
}

pub fn hybrid_closed_form(n_bar: f64, kappa: f64) -> f64 {
    1.0 / (1.0 / (1.0 + n_bar) + 2.0 * kappa * kappa)
}

/// `(x_A, p_A, x_m, p_m) ↦ (x_cos, p_cos, x_sin, p_sin)`.
pub fn hybrid_epr_map(atom: ModeId, mech: ModeId, modes: &TwoCellModes) -> Result<SymplecticMap> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = DMatrix::from_row_slice(
        4,
        4,
        &[
            h, 0.0, 0.0, h, //
            0.0, h, -h, 0.0, //
            h, 0.0, 0.0, -h, //
            0.0, h, h, 0.0,
        ],
    );
    SymplecticMap::new(
        s,
        DVector::zeros(4),
        vec![atom, mech],
        vec![modes.cos.atom.clone(), modes.sin.atom.clone()],
    )
}

/// Hybrid EPR variance after the QND pulse and homodyne detection of both
/// outgoing `x_L`, starting from a thermal mirror (`n̄`) and atomic vacuum.
pub fn hybrid_epr(n_bar: f64, kappa: f64) -> Result<HybridEpr> {
    if !(n_bar >= 0.0 && n_bar.is_finite()) {
        return Err(invalid("n_bar", "must be non-negative"));
    }
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(invalid("kappa", "must be non-negative"));
    }
    let modes = TwoCellModes::standard();
    let atom = ModeId::atomic("A");
    let mech = ModeId::new("m", ModeKind::Mechanical);
    let start =
        GaussianState::vacuum(vec![atom.clone()])?.tensor(&GaussianState::thermal(mech.clone(), n_bar)?)?;
    let hybrid = start.apply_map(&hybrid_epr_map(atom, mech, &modes)?)?;
    let light = GaussianState::vacuum(vec![modes.cos.light_in.clone(), modes.sin.light_in.clone()])?;
    let after = hybrid
        .tensor(&light)?
        .apply_map(&qnd_two_cell(std::f64::consts::SQRT_2 * kappa, &modes)?)?;

    let own = |s: &SectorModes| -> Result<f64> {
        let sector = after.reduce(&[&s.atom.label, &s.light_out.label])?;
        let (c, _) = homodyne_condition(&sector, &s.light_out.label, Quadrature::X, Outcome::Value(0.0))?;
        c.quadrature_variance(&s.atom.label, Quadrature::P)
    };
    let pipeline = own(&modes.cos)? + own(&modes.sin)?;

    let (c, _) = homodyne_condition(
        &after,
        &modes.cos.light_out.label,
        Quadrature::X,
        Outcome::Value(0.0),
    )?;
    let (c, _) = homodyne_condition(&c, &modes.sin.light_out.label, Quadrature::X, Outcome::Value(0.0))?;
    let joint = c.quadrature_variance(&modes.cos.atom.label, Quadrature::P)?
        + c.quadrature_variance(&modes.sin.atom.label, Quadrature::P)?;

    Ok(HybridEpr {
        n_bar,
        kappa,
        closed_form: hybrid_closed_form(n_bar, kappa),
        pipeline,
        joint,
        entangled: pipeline < EPR_ENTANGLEMENT_BOUND,
    })
}

/// [`hybrid_epr`] at the thermal occupation of `params`.
pub fn hybrid_epr_protocol(params: &OptomechParams, kappa: f64) -> Result<HybridEpr> {
    params.validate()?;
    hybrid_epr(params.n_bar(), kappa)
}

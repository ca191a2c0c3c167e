//! Population bookkeeping for the driven two-ensemble experiment.
//!
//! Each ensemble's atoms sit in the oriented state `|4,4⟩` (fraction `P`), in
//! other `F=4` sublevels (`Q`), or in `F=3` (`R`). Spontaneous scattering
//! empties `P` at rate `loss`, a fraction `f4` landing back in `F=4`; an
//! optical pump returns `Q` to `P`; a repump returns `R` to `F=4`.
//!
//! The oscillator modes only see the oriented fraction. The collective swap
//! rate is scaled by `P`, coherences are damped by scattering and by the
//! incoherent refill from the pump, and atoms outside `|4,4⟩` add projection
//! noise. An unpolarised `F=4` atom has `var(J_y) = 20/3` against `|J_x| = 4`
//! for an oriented one, which adds `(5/3)·Q/P` to each normalised quadrature
//! variance. All rates and times are in units of `γ_s`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{evolve, ideal_model_for_z, steady_state, NoiseKind, ENSEMBLE_I, ENSEMBLE_II};
use crate::constants::EPR_ENTANGLEMENT_BOUND;
use crate::error::{invalid, Result};
use crate::gaussian::{homodyne_condition, GaussianState, ModeId, Outcome, Quadrature};
use crate::linalg::drift_diffusion_propagator;
use crate::maps::{epr_basis, qnd_two_cell, TwoCellModes};

/// Extra normalised variance per quadrature from one unoriented `F=4` atom,
/// relative to one oriented atom.
const UNORIENTED_NOISE: f64 = 5.0 / 3.0;

/// Longest step over which populations are frozen while evolving the modes.
const MAX_STEP: f64 = 0.02;

/// Rates in units of `γ_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PopulationRates {
    pub loss: f64,
    pub pump: f64,
    pub repump: f64,
    /// Share of scattered atoms that stay in `F=4`.
    pub f4_fraction: f64,
}

impl Default for PopulationRates {
    fn default() -> Self {
        Self {
            loss: 0.1,
            pump: 0.2,
            repump: 0.5,
            f4_fraction: 0.5,
        }
    }
}

impl PopulationRates {
    pub fn decay_only(loss: f64) -> Self {
        Self {
            loss,
            pump: 0.0,
            repump: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("loss", self.loss), ("pump", self.pump), ("repump", self.repump)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("rate must be non-negative, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.f4_fraction) {
            return Err(invalid("f4_fraction", "must lie in [0, 1]"));
        }
        Ok(())
    }

    fn generator(&self) -> DMatrix<f64> {
        let f = self.f4_fraction;
        DMatrix::from_row_slice(
            3,
            3,
            &[
                -self.loss,
                self.pump,
                0.0, //
                self.loss * f,
                -self.pump,
                self.repump, //
                self.loss * (1.0 - f),
                0.0,
                -self.repump,
            ],
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Populations {
    pub oriented: f64,
    pub other_f4: f64,
    pub f3: f64,
}

impl Populations {
    pub fn oriented() -> Self {
        Self {
            oriented: 1.0,
            other_f4: 0.0,
            f3: 0.0,
        }
    }

    pub fn advance(&self, rates: &PopulationRates, t: f64) -> Self {
        let (phi, _) = drift_diffusion_propagator(&rates.generator(), &DMatrix::zeros(3, 3), t);
        let v = phi * DVector::from_column_slice(&[self.oriented, self.other_f4, self.f3]);
        Self {
            oriented: v[0],
            other_f4: v[1],
            f3: v[2],
        }
    }

    /// Stationary populations; `None` when the oriented state is eventually
    /// emptied.
    pub fn stationary(rates: &PopulationRates) -> Option<Self> {
        let mut m = rates.generator();
        for c in 0..3 {
            m[(2, c)] = 1.0;
        }
        let v = m.lu().solve(&DVector::from_column_slice(&[0.0, 0.0, 1.0]))?;
        (v.iter().all(|x| x.is_finite() && *x >= -1e-12) && v[0] > 1e-9).then(|| Self {
            oriented: v[0],
            other_f4: v[1],
            f3: v[2],
        })
    }

    /// Added variance per normalised quadrature from unoriented `F=4` atoms.
    pub fn background_noise(&self) -> f64 {
        UNORIENTED_NOISE * self.other_f4 / self.oriented
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phenomenology {
    pub z: f64,
    pub rates: PopulationRates,
    /// Coupling of the verifying QND probe used for the conditioned readout.
    pub readout_kappa: f64,
}

impl Phenomenology {
    pub fn new(z: f64, rates: PopulationRates, readout_kappa: f64) -> Result<Self> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(invalid("Z", "must be positive"));
        }
        if !(readout_kappa >= 0.0 && readout_kappa.is_finite()) {
            return Err(invalid("readout_kappa", "must be non-negative"));
        }
        rates.validate()?;
        Ok(Self {
            z,
            rates,
            readout_kappa,
        })
    }

    /// Oscillator-mode dynamics with the populations frozen at `pop`.
    fn model(&self, pop: &Populations) -> Result<super::LindbladModel> {
        let damping = self.rates.loss + self.rates.pump * pop.other_f4 / pop.oriented;
        ideal_model_for_z(self.z, pop.oriented)?.add_noise_channel(NoiseKind::SingleAtomDecay, damping)
    }

    fn snapshot(&self, t: f64, pop: Populations, modes: &GaussianState) -> Result<Snapshot> {
        let b = pop.background_noise();
        let mut cov = modes.cov().clone();
        for k in 0..cov.nrows() {
            cov[(k, k)] += b;
        }
        let total = GaussianState::new(modes.modes().to_vec(), modes.mean().clone(), cov)?;
        let unconditioned = crate::gaussian::epr_variance(&total, ENSEMBLE_I, ENSEMBLE_II)?;
        let conditioned = conditioned_epr_variance(&total, self.readout_kappa)?;
        Ok(Snapshot {
            t,
            populations: pop,
            epr_unconditioned: unconditioned,
            epr_conditioned: conditioned,
            entangled_unconditioned: unconditioned < EPR_ENTANGLEMENT_BOUND,
            entangled_conditioned: conditioned < EPR_ENTANGLEMENT_BOUND,
        })
    }

    /// Starts from oriented ensembles in the vacuum of the oscillator modes
    /// and reports at each of the ascending `times`.
    pub fn timecourse(&self, times: &[f64]) -> Result<Vec<Snapshot>> {
        if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|t| *t < 0.0) {
            return Err(invalid("times", "must be non-negative and ascending"));
        }
        let mut pop = Populations::oriented();
        let mut state = GaussianState::vacuum(vec![ModeId::atomic(ENSEMBLE_I), ModeId::atomic(ENSEMBLE_II)])?;
        let mut now = 0.0;
        let mut out = Vec::with_capacity(times.len());
        for &target in times {
            let span = target - now;
            let steps = (span / MAX_STEP).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            for _ in 0..steps {
                if dt == 0.0 {
                    break;
                }
                let mid = pop.advance(&self.rates, 0.5 * dt);
                state = evolve(&self.model(&mid)?, &state, dt)?;
                pop = pop.advance(&self.rates, dt);
            }
            now = target;
            out.push(self.snapshot(now, pop, &state)?);
        }
        Ok(out)
    }

    /// Long-time state once populations and modes have both settled.
    pub fn steady(&self) -> Result<Snapshot> {
        let pop = Populations::stationary(&self.rates)
            .ok_or_else(|| invalid("rates", "without pumping the oriented population decays to zero"))?;
        let state = steady_state(&self.model(&pop)?)?;
        self.snapshot(f64::INFINITY, pop, &state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub populations: Populations,
    pub epr_unconditioned: f64,
    pub epr_conditioned: f64,
    pub entangled_unconditioned: bool,
    pub entangled_conditioned: bool,
}

/// EPR variance of `(I, II)` after a QND probe of both EPR sectors and
/// homodyne detection of both light outputs. The conditional covariance does
/// not depend on the recorded values.
pub fn conditioned_epr_variance(state: &GaussianState, kappa: f64) -> Result<f64> {
    let modes = TwoCellModes::standard();
    let basis = epr_basis(
        ModeId::atomic(ENSEMBLE_I),
        ModeId::atomic(ENSEMBLE_II),
        modes.cos.atom.clone(),
        modes.sin.atom.clone(),
    )?;
    let light = GaussianState::vacuum(vec![modes.cos.light_in.clone(), modes.sin.light_in.clone()])?;
    let s = state
        .reduce(&[ENSEMBLE_I, ENSEMBLE_II])?
        .apply_map(&basis)?
        .tensor(&light)?
        .apply_map(&qnd_two_cell(kappa, &modes)?)?;
    let (s, _) = homodyne_condition(&s, &modes.cos.light_out.label, Quadrature::X, Outcome::Value(0.0))?;
    let (s, _) = homodyne_condition(&s, &modes.sin.light_out.label, Quadrature::X, Outcome::Value(0.0))?;
    Ok(s.quadrature_variance(&modes.cos.atom.label, Quadrature::P)?
        + s.quadrature_variance(&modes.sin.atom.label, Quadrature::P)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn populations_conserve_total() {
        let r = PopulationRates::default();
        let p = Populations::oriented().advance(&r, 3.7);
        assert!((p.oriented + p.other_f4 + p.f3 - 1.0).abs() < 1e-12);
        let s = Populations::stationary(&r).unwrap();
        assert!((s.oriented - 1.0 / 1.6).abs() < 1e-12);
        assert!((s.other_f4 - 0.5 / 1.6).abs() < 1e-12);
        assert!(Populations::stationary(&PopulationRates::decay_only(0.1)).is_none());
    }

    #[test]
    fn decay_only_loses_entanglement() {
        let ph = Phenomenology::new(2.5, PopulationRates::decay_only(0.1), 1.0).unwrap();
        let times: Vec<f64> = (0..=40).map(|k| 0.25 * k as f64).collect();
        let run = ph.timecourse(&times).unwrap();
        let first = run.iter().position(|s| s.entangled_unconditioned).unwrap();
        let lost = run[first..]
            .iter()
            .position(|s| !s.entangled_unconditioned)
            .unwrap()
            + first;
        assert!(run[lost..].iter().all(|s| !s.entangled_unconditioned));
        let t = run[lost].t;
        assert!(t > 2.0 && t < 6.0, "lost at {t}");
    }

    #[test]
    fn pumping_extends_entanglement() {
        let times: Vec<f64> = (0..=40).map(|k| 0.25 * k as f64).collect();
        let count = |rates| {
            let ph = Phenomenology::new(2.5, rates, 1.0).unwrap();
            ph.timecourse(&times)
                .unwrap()
                .iter()
                .filter(|s| s.entangled_unconditioned)
                .count()
        };
        let pumped = PopulationRates {
            repump: 0.0,
            ..PopulationRates::default()
        };
        assert!(count(pumped) > count(PopulationRates::decay_only(0.1)));
    }

    #[test]
    fn steady_state_needs_conditioning() {
        let ph = Phenomenology::new(2.5, PopulationRates::default(), 1.0).unwrap();
        let s = ph.steady().unwrap();
        assert!(!s.entangled_unconditioned, "{s:?}");
        assert!(s.entangled_conditioned, "{s:?}");
        assert!(s.epr_conditioned < s.epr_unconditioned);
    }

    #[test]
    fn conditioning_never_hurts() {
        let st = GaussianState::thermal(ModeId::atomic("I"), 0.7)
            .unwrap()
            .tensor(&GaussianState::thermal(ModeId::atomic("II"), 0.2).unwrap())
            .unwrap();
        let plain = crate::gaussian::epr_variance(&st, "I", "II").unwrap();
        assert!((conditioned_epr_variance(&st, 0.0).unwrap() - plain).abs() < 1e-12);
        let mut last = plain;
        for k in [0.3, 1.0, 3.0] {
            let v = conditioned_epr_variance(&st, k).unwrap();
            assert!(v < last);
            last = v;
        }
    }
}

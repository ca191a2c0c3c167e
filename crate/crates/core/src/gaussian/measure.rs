use nalgebra::{DMatrix, DVector};
use rand::RngCore;
use rand_distr::{Distribution, Normal};

use super::{quadrature_indices, GaussianState, Quadrature};
use crate::constants::SINGULAR_CONDITIONING;
use crate::error::{Error, Result};
use crate::linalg::symmetrize;

/// How the homodyne outcome is chosen.
pub enum Outcome<'a> {
    /// Condition on a given measured value.
    Value(f64),
    /// Draw the value from the Born distribution.
    Sample(&'a mut dyn RngCore),
}

/// Classical feed-forward of a homodyne result: `target.quadrature += gain·y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Feedback {
    pub target: String,
    pub quadrature: Quadrature,
    pub gain: f64,
}

impl Feedback {
    pub fn new(target: impl Into<String>, quadrature: Quadrature, gain: f64) -> Self {
        Self {
            target: target.into(),
            quadrature,
            gain,
        }
    }
}

struct Split {
    keep: Vec<usize>,
    k: usize,
    var: f64,
}

fn split(state: &GaussianState, label: &str, q: Quadrature) -> Result<Split> {
    let j = state.index_of(label)?;
    let k = 2 * j + q.offset();
    let var = state.cov[(k, k)];
    if !(var > SINGULAR_CONDITIONING) {
        return Err(Error::SingularConditioning(var));
    }
    let others: Vec<usize> = (0..state.n_modes()).filter(|&i| i != j).collect();
    if others.is_empty() {
        return Err(Error::EmptyModes);
    }
    Ok(Split {
        keep: quadrature_indices(&others),
        k,
        var,
    })
}

/// Homodyne detection of `quadrature` on mode `label`.
///
/// Returns the conditional state of the remaining modes (the measured mode is
/// removed) together with the outcome that was conditioned on.
pub fn homodyne_condition(
    state: &GaussianState,
    label: &str,
    quadrature: Quadrature,
    outcome: Outcome<'_>,
) -> Result<(GaussianState, f64)> {
    let sp = split(state, label, quadrature)?;
    let mk = state.mean[sp.k];
    let y = match outcome {
        Outcome::Value(y) => y,
        Outcome::Sample(rng) => Normal::new(mk, sp.var.sqrt())
            .map_err(|e| Error::Numerical(e.to_string()))?
            .sample(rng),
    };
    let sbk = cross_column(state, &sp);
    let mean = state.mean.select_rows(&sp.keep) + &sbk * ((y - mk) / sp.var);
    let cov = conditional_cov(state, &sp, &sbk);
    let modes = remaining_modes(state, label);
    Ok((GaussianState::from_parts_unchecked(modes, mean, cov), y))
}

/// Homodyne detection followed by linear feed-forward of the outcome,
/// averaged over all outcomes. The result is the unconditional state of the
/// remaining modes; the measured mode is removed.
pub fn homodyne_feedback(
    state: &GaussianState,
    label: &str,
    quadrature: Quadrature,
    feedback: &[Feedback],
) -> Result<GaussianState> {
    let sp = split(state, label, quadrature)?;
    let modes = remaining_modes(state, label);
    let sbk = cross_column(state, &sp);

    // Displacement per unit outcome, on the kept quadratures.
    let mut g = DVector::<f64>::zeros(sp.keep.len());
    for fb in feedback {
        let j = modes
            .iter()
            .position(|m| m.label == fb.target)
            .ok_or_else(|| Error::UnknownMode(fb.target.clone()))?;
        g[2 * j + fb.quadrature.offset()] += fb.gain;
    }

    // r_B ↦ r_B|y + g·y with y ~ N(m_k, σ²): the conditional spread plus the
    // outcome-driven spread along v = Σ_Bk/σ² + g.
    let v = &sbk / sp.var + &g;
    let mut cov = conditional_cov(state, &sp, &sbk) + &v * v.transpose() * sp.var;
    symmetrize(&mut cov);
    let mean = state.mean.select_rows(&sp.keep) + &g * state.mean[sp.k];
    Ok(GaussianState::from_parts_unchecked(modes, mean, cov))
}

fn cross_column(state: &GaussianState, sp: &Split) -> DVector<f64> {
    DVector::from_iterator(sp.keep.len(), sp.keep.iter().map(|&r| state.cov[(r, sp.k)]))
}

fn conditional_cov(state: &GaussianState, sp: &Split, sbk: &DVector<f64>) -> DMatrix<f64> {
    let sbb = state.cov.select_rows(&sp.keep).select_columns(&sp.keep);
    let mut cov = sbb - sbk * sbk.transpose() / sp.var;
    symmetrize(&mut cov);
    cov
}

fn remaining_modes(state: &GaussianState, label: &str) -> Vec<super::ModeId> {
    state.modes.iter().filter(|m| m.label != label).cloned().collect()
}

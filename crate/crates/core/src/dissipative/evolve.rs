use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::{JumpOperator, LindbladModel};
use crate::constants::EPR_ENTANGLEMENT_BOUND;
use crate::error::{invalid, Error, Result};
use crate::gaussian::{epr_variance, quadrature_indices, GaussianState};
use crate::linalg::{drift_diffusion_propagator, omega, solve_lyapunov, symmetrize};

/// Positions of the model's modes inside `state`.
fn embedding(model: &LindbladModel, state: &GaussianState) -> Result<Vec<usize>> {
    let idx: Vec<usize> = model
        .modes()
        .iter()
        .map(|m| state.index_of(&m.label))
        .collect::<Result<_>>()?;
    Ok(quadrature_indices(&idx))
}

/// Evolves `state` for time `t` (in the units of the model's rates). Modes not
/// named by the model are left untouched.
pub fn evolve(model: &LindbladModel, state: &GaussianState, t: f64) -> Result<GaussianState> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("must be non-negative, got {t}")));
    }
    let rows = embedding(model, state)?;
    let (phi, q) = drift_diffusion_propagator(model.drift(), model.diffusion(), t);
    let dim = 2 * state.n_modes();
    let mut phi_full = DMatrix::<f64>::identity(dim, dim);
    let mut q_full = DMatrix::<f64>::zeros(dim, dim);
    for (a, &ra) in rows.iter().enumerate() {
        for (b, &rb) in rows.iter().enumerate() {
            phi_full[(ra, rb)] = phi[(a, b)];
            q_full[(ra, rb)] = q[(a, b)];
        }
    }
    let mean = &phi_full * state.mean();
    let mut cov = &phi_full * state.cov() * phi_full.transpose() + q_full;
    symmetrize(&mut cov);
    GaussianState::new(state.modes().to_vec(), mean, cov)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub unique: bool,
    /// Largest real part among the drift eigenvalues.
    pub max_real_part: f64,
    /// Drift eigenvalues as `(re, im)`.
    pub eigenvalues: Vec<(f64, f64)>,
}

/// The steady state is unique iff the drift is Hurwitz.
pub fn is_unique(model: &LindbladModel) -> UniquenessReport {
    let eig = model.drift().complex_eigenvalues();
    let eigenvalues: Vec<(f64, f64)> = eig.iter().map(|z| (z.re, z.im)).collect();
    let max_real_part = eigenvalues.iter().map(|z| z.0).fold(f64::NEG_INFINITY, f64::max);
    let scale = model.drift().amax().max(1e-300);
    UniquenessReport {
        unique: max_real_part < -1e-12 * scale.max(1.0) && model.drift().amax() > 0.0,
        max_real_part,
        eigenvalues,
    }
}

/// Solves `AΣ + ΣAᵀ + D = 0` for the unique steady state; the mean is zero.
pub fn steady_state(model: &LindbladModel) -> Result<GaussianState> {
    let report = is_unique(model);
    if !report.unique {
        return Err(Error::NoUniqueSteadyState(report.max_real_part));
    }
    let cov = solve_lyapunov(model.drift(), model.diffusion())?;
    let dim = cov.nrows();
    GaussianState::new(model.modes().to_vec(), DVector::zeros(dim), cov)
}

/// `⟨L†L⟩` for a jump over the model's modes, evaluated in `state`:
/// `c̄ᵀ(Σ + iΩ/2 + m mᵀ)c`. Zero iff the state is annihilated by `L`.
pub fn jump_expectation(model: &LindbladModel, state: &GaussianState, jump: &JumpOperator) -> Result<f64> {
    let sub = state.reduce(&model.modes().iter().map(|m| m.label.as_str()).collect::<Vec<_>>())?;
    let n = sub.n_modes();
    if jump.alpha.len() != n {
        return Err(Error::ModeMismatch("jump length".into()));
    }
    let c = jump.quadrature_coeffs();
    let w = omega(n);
    let mm = sub.mean() * sub.mean().transpose();
    let second: DMatrix<Complex64> =
        (sub.cov() + mm).map(|v| Complex64::new(v, 0.0)) + w.map(|v| Complex64::new(0.0, 0.5 * v));
    let v = (c.conjugate().transpose() * second * &c)[(0, 0)];
    Ok(v.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub epr_variance: f64,
    pub entangled: bool,
}

/// EPR variance of the pair and whether it beats the separable bound of 1.
pub fn entanglement_report(state: &GaussianState, a: &str, b: &str) -> Result<EntanglementReport> {
    let v = epr_variance(state, a, b)?;
    Ok(EntanglementReport {
        epr_variance: v,
        entangled: v < EPR_ENTANGLEMENT_BOUND,
    })
}

//! Gaussian Lindblad dynamics of two oppositely polarised ensembles.
//!
//! A jump operator linear in the mode operators, `L = Σ_k (α_k a_k + β_k a_k†)`,
//! is written as `L = cᵀ r` over the quadrature vector. For a set of jumps with
//! rates `γ_j` and `M = Σ_j γ_j c̄_j c_jᵀ`, the moments obey
//!
//! `dm/dt = A m`, `dΣ/dt = AΣ + ΣAᵀ + D`, with `A = Ω Im M`, `D = Ω Re M Ωᵀ`.
//!
//! Ensemble `II` is polarised along `-x`, so under Holstein-Primakoff its
//! lowering spin operator becomes a creation operator. The ideal jumps are
//! then `A = μ a_I - ν a_II†` and `B = μ a_II - ν a_I†`, whose common dark
//! state is a two-mode squeezed vacuum with `tanh r = ν/μ`.

mod evolve;
pub mod phenomenology;

pub use evolve::{
    entanglement_report, evolve, is_unique, jump_expectation, steady_state, EntanglementReport,
    UniquenessReport,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{dissipator_rate, DIFFUSION_PSD_TOL};
use crate::error::{invalid, Error, Result};
use crate::gaussian::{check_unique, ModeId};
use crate::linalg::{min_eigenvalue, omega};

/// `L = Σ_k (α_k a_k + β_k a_k†)` applied at `rate`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpOperator {
    pub label: String,
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    pub rate: f64,
}

impl JumpOperator {
    /// Coefficients over `(x₁, p₁, …)`: `c_x = (α+β)/√2`, `c_p = i(α-β)/√2`.
    pub fn quadrature_coeffs(&self) -> DVector<Complex64> {
        let n = self.alpha.len();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let i = Complex64::i();
        let mut c = DVector::zeros(2 * n);
        for k in 0..n {
            c[2 * k] = (self.alpha[k] + self.beta[k]) * s;
            c[2 * k + 1] = i * (self.alpha[k] - self.beta[k]) * s;
        }
        c
    }

    fn single(
        label: impl Into<String>,
        n: usize,
        k: usize,
        alpha: Complex64,
        beta: Complex64,
        rate: f64,
    ) -> Self {
        let mut a = vec![Complex64::new(0.0, 0.0); n];
        let mut b = a.clone();
        a[k] = alpha;
        b[k] = beta;
        Self {
            label: label.into(),
            alpha: a,
            beta: b,
            rate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Spontaneous decay out of the oriented state: damping `L = a_k`.
    SingleAtomDecay,
    /// Optical pumping back into the oriented state: damping `L = a_k`.
    Pump,
    /// Repumping from the other hyperfine manifold: damping towards a
    /// slightly excited state, `L = a_k` at `γ(1+n)` and `L = a_k†` at `γn`
    /// with `n =` [`REPUMP_OCCUPATION`].
    Repump,
    /// Random phase kicks: `L = x_k` and `L = p_k`, each at `γ/2`.
    Dephasing,
}

/// Residual excitation left by the repump channel.
pub const REPUMP_OCCUPATION: f64 = 0.05;

/// Drift and diffusion of a Gaussian Lindblad process, with the jump list it
/// was assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    modes: Vec<ModeId>,
    jumps: Vec<JumpOperator>,
    drift: DMatrix<f64>,
    diffusion: DMatrix<f64>,
    gamma_s: f64,
}

impl LindbladModel {
    pub fn from_jumps(modes: Vec<ModeId>, jumps: Vec<JumpOperator>, gamma_s: f64) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptyModes);
        }
        check_unique(&modes)?;
        for j in &jumps {
            if j.alpha.len() != modes.len() || j.beta.len() != modes.len() {
                return Err(Error::ModeMismatch(format!(
                    "jump `{}` has wrong length",
                    j.label
                )));
            }
            if !(j.rate >= 0.0 && j.rate.is_finite()) {
                return Err(invalid("rate", format!("jump `{}` has rate {}", j.label, j.rate)));
            }
        }
        let (drift, diffusion) = assemble(modes.len(), &jumps);
        let scale = diffusion.amax().max(1.0);
        let min_eig = min_eigenvalue(&diffusion);
        if min_eig < -DIFFUSION_PSD_TOL * scale {
            return Err(Error::Numerical(format!(
                "diffusion not PSD (λ_min = {min_eig:.3e})"
            )));
        }
        Ok(Self {
            modes,
            jumps,
            drift,
            diffusion,
            gamma_s,
        })
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn jumps(&self) -> &[JumpOperator] {
        &self.jumps
    }

    pub fn drift(&self) -> &DMatrix<f64> {
        &self.drift
    }

    pub fn diffusion(&self) -> &DMatrix<f64> {
        &self.diffusion
    }

    /// Collective swap rate `γ_s = dΓ` of the ideal channels.
    pub fn gamma_s(&self) -> f64 {
        self.gamma_s
    }

    /// Largest discrepancy between the stored drift/diffusion and a rebuild
    /// from the jump list.
    pub fn rebuild_defect(&self) -> f64 {
        let (a, d) = assemble(self.modes.len(), &self.jumps);
        (a - &self.drift).amax().max((d - &self.diffusion).amax())
    }

    pub fn with_jump(&self, jump: JumpOperator) -> Result<Self> {
        let mut jumps = self.jumps.clone();
        jumps.push(jump);
        Self::from_jumps(self.modes.clone(), jumps, self.gamma_s)
    }

    /// Appends a local channel of the given kind on every mode.
    pub fn add_noise_channel(&self, kind: NoiseKind, rate: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(invalid(
                "rate",
                format!("noise rate must be non-negative, got {rate}"),
            ));
        }
        if rate == 0.0 {
            return Ok(self.clone());
        }
        let n = self.modes.len();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let i = Complex64::i();
        let mut jumps = self.jumps.clone();
        for (k, m) in self.modes.iter().enumerate() {
            let tag = |what: &str| format!("{what}[{}]", m.label);
            match kind {
                NoiseKind::SingleAtomDecay => {
                    jumps.push(JumpOperator::single(tag("decay"), n, k, one, zero, rate))
                }
                NoiseKind::Pump => jumps.push(JumpOperator::single(tag("pump"), n, k, one, zero, rate)),
                NoiseKind::Repump => {
                    let nb = REPUMP_OCCUPATION;
                    jumps.push(JumpOperator::single(
                        tag("repump-"),
                        n,
                        k,
                        one,
                        zero,
                        rate * (1.0 + nb),
                    ));
                    jumps.push(JumpOperator::single(tag("repump+"), n, k, zero, one, rate * nb));
                }
                NoiseKind::Dephasing => {
                    jumps.push(JumpOperator::single(
                        tag("dephase-x"),
                        n,
                        k,
                        one * s,
                        one * s,
                        0.5 * rate,
                    ));
                    jumps.push(JumpOperator::single(
                        tag("dephase-p"),
                        n,
                        k,
                        -i * s,
                        i * s,
                        0.5 * rate,
                    ));
                }
            }
        }
        Self::from_jumps(self.modes.clone(), jumps, self.gamma_s)
    }
}

fn assemble(n: usize, jumps: &[JumpOperator]) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut m = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for j in jumps {
        let c = j.quadrature_coeffs();
        m += c.conjugate() * c.transpose() * Complex64::new(j.rate, 0.0);
    }
    let w = omega(n);
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    let drift = &w * im;
    let mut diffusion = &w * re * w.transpose();
    crate::linalg::symmetrize(&mut diffusion);
    (drift, diffusion)
}

/// Mode labels of the two ensembles in the ideal model.
pub const ENSEMBLE_I: &str = "I";
pub const ENSEMBLE_II: &str = "II";

/// The two nonlocal jumps `A = μ a_I - ν a_II†`, `B = μ a_II - ν a_I†`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpOperators {
    pub a: JumpOperator,
    pub b: JumpOperator,
}

impl JumpOperators {
    pub fn new(mu: f64, nu: f64, rate: f64) -> Self {
        let c = |v: f64| Complex64::new(v, 0.0);
        let z = c(0.0);
        Self {
            a: JumpOperator {
                label: "A".into(),
                alpha: vec![c(mu), z],
                beta: vec![z, c(-nu)],
                rate,
            },
            b: JumpOperator {
                label: "B".into(),
                alpha: vec![z, c(mu)],
                beta: vec![c(-nu), z],
                rate,
            },
        }
    }
}

/// Ideal two-ensemble model with swap rate `γ_s = dΓ`.
///
/// Requires `μ² - ν² = 1`, `d > 0`, `Γ > 0`.
pub fn build_ideal_model(mu: f64, nu: f64, d: f64, gamma: f64) -> Result<LindbladModel> {
    if !((mu * mu - nu * nu - 1.0).abs() < 1e-9) {
        return Err(invalid(
            "mu/nu",
            format!("need μ² - ν² = 1, got {}", mu * mu - nu * nu),
        ));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(invalid("d", "optical depth must be positive"));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(invalid("Gamma", "decay rate must be positive"));
    }
    ideal_model_unchecked(mu, nu, d * gamma)
}

/// Ideal model from the asymmetry `Z` and swap rate `γ_s`.
pub fn ideal_model_for_z(z: f64, gamma_s: f64) -> Result<LindbladModel> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(invalid("Z", "must be positive"));
    }
    let (mu, nu) = crate::maps::mu_nu(z);
    build_ideal_model(mu, nu, gamma_s, 1.0)
}

/// The ideal model without the `μ² - ν² = 1` check, for probing degenerate
/// surrogates such as `μ = ν`. `gamma_s` may be zero.
pub fn ideal_model_unchecked(mu: f64, nu: f64, gamma_s: f64) -> Result<LindbladModel> {
    let j = JumpOperators::new(mu, nu, dissipator_rate(gamma_s));
    LindbladModel::from_jumps(
        vec![ModeId::atomic(ENSEMBLE_I), ModeId::atomic(ENSEMBLE_II)],
        vec![j.a, j.b],
        gamma_s,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn damping_reduction() {
        let m = LindbladModel::from_jumps(
            vec![ModeId::atomic("a")],
            vec![JumpOperator::single(
                "L",
                1,
                0,
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                0.6,
            )],
            0.0,
        )
        .unwrap();
        assert!((m.drift() + DMatrix::identity(2, 2) * 0.3).amax() < 1e-15);
        assert!((m.diffusion() - DMatrix::identity(2, 2) * 0.3).amax() < 1e-15);
    }

    #[test]
    fn ideal_drift_is_uniform_damping() {
        let (mu, nu) = crate::maps::mu_nu(2.5);
        let m = build_ideal_model(mu, nu, 30.0, 1.0).unwrap();
        assert!((m.drift() + DMatrix::identity(4, 4) * 30.0).amax() < 1e-12);
        assert_eq!(m.gamma_s(), 30.0);
        assert!(m.rebuild_defect() == 0.0);
    }

    #[test]
    fn z_one_is_plain_damping() {
        let m = build_ideal_model(1.0, 0.0, 2.0, 1.5).unwrap();
        assert!((m.drift() + DMatrix::identity(4, 4) * 3.0).amax() < 1e-14);
        assert!((m.diffusion() - DMatrix::identity(4, 4) * 3.0).amax() < 1e-14);
    }

    #[test]
    fn preconditions() {
        assert!(build_ideal_model(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(build_ideal_model(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(build_ideal_model(1.0, 0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn noise_channels() {
        let base = ideal_model_for_z(2.5, 1.0).unwrap();
        assert_eq!(base.add_noise_channel(NoiseKind::Pump, 0.0).unwrap(), base);
        assert!(base.add_noise_channel(NoiseKind::Pump, -1.0).is_err());
        let deph = base.add_noise_channel(NoiseKind::Dephasing, 0.4).unwrap();
        assert!((deph.drift() - base.drift()).amax() < 1e-15);
        assert!((deph.diffusion() - base.diffusion() - DMatrix::identity(4, 4) * 0.2).amax() < 1e-15);
        for kind in [NoiseKind::SingleAtomDecay, NoiseKind::Pump, NoiseKind::Repump] {
            let m = base.add_noise_channel(kind, 0.3).unwrap();
            assert!(min_eigenvalue(m.diffusion()) >= 0.0);
            assert!(m.rebuild_defect() == 0.0);
        }
    }
}

//! Brute-force density-matrix oracle on a truncated Fock space.
//!
//! Everything here works with explicit ladder operators and makes no use of
//! the covariance-matrix machinery, so it serves as an independent check on
//! the Gaussian engine. It is limited to three modes and
//! [`FOCK_MAX_DIM`](crate::constants::FOCK_MAX_DIM) basis states: density
//! matrices are dense, operators sparse.

mod lindblad;
mod ops;
mod unitary;

pub use lindblad::{dark_state, evolve_lindblad, lindblad_residual, model_jumps, FockJump, StepControl};
pub use ops::{FockSpace, SparseOp};
pub use unitary::{apply_generator, Ket};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::constants::FOCK_LEAK_WARNING;
use crate::error::{Error, Result};
use crate::gaussian::{check_physical, GaussianState, ModeId};

type C = Complex64;

/// Largest number of modes the oracle accepts.
pub const FOCK_MAX_MODES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: Vec<ModeId>,
    space: FockSpace,
    rho: DMatrix<C>,
    leaked: f64,
}

/// Outcome of [`FockState::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockCheck {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl FockCheck {
    pub fn ok(&self) -> bool {
        self.trace_error < 1e-10 && self.hermiticity_error < 1e-12 && self.min_eigenvalue > -1e-10
    }
}

impl FockState {
    pub fn new(modes: Vec<ModeId>, space: FockSpace, rho: DMatrix<C>) -> Result<Self> {
        if modes.len() != space.n_modes() {
            return Err(Error::ModeMismatch("one cutoff per mode".into()));
        }
        if modes.len() > FOCK_MAX_MODES {
            return Err(Error::FockTooLarge(space.dim()));
        }
        crate::gaussian::check_unique(&modes)?;
        if rho.nrows() != space.dim() || rho.ncols() != space.dim() {
            return Err(Error::ModeMismatch("density matrix dimension".into()));
        }
        Ok(Self {
            modes,
            space,
            rho,
            leaked: 0.0,
        })
    }

    /// `|0…0⟩⟨0…0|`.
    pub fn vacuum(modes: Vec<ModeId>, cutoff: usize) -> Result<Self> {
        let space = FockSpace::new(vec![cutoff; modes.len()])?;
        let mut rho = DMatrix::zeros(space.dim(), space.dim());
        rho[(0, 0)] = C::new(1.0, 0.0);
        Self::new(modes, space, rho)
    }

    /// Number state with the given occupations.
    pub fn number_state(modes: Vec<ModeId>, cutoff: usize, occupations: &[usize]) -> Result<Self> {
        let mut s = Self::vacuum(modes, cutoff)?;
        if occupations.len() != s.modes.len() || occupations.iter().any(|&n| n > cutoff) {
            return Err(Error::ModeMismatch(
                "occupations outside the truncated space".into(),
            ));
        }
        let i = s.space.index(occupations);
        s.rho[(0, 0)] = C::new(0.0, 0.0);
        s.rho[(i, i)] = C::new(1.0, 0.0);
        Ok(s)
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn rho(&self) -> &DMatrix<C> {
        &self.rho
    }

    /// Probability weight outside the truncated space when the state was
    /// built from a Gaussian.
    pub fn leaked(&self) -> f64 {
        self.leaked
    }

    /// True when the truncation leak exceeds the warning threshold.
    pub fn leak_warning(&self) -> bool {
        self.leaked > FOCK_LEAK_WARNING
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn validate(&self) -> FockCheck {
        let herm = (&self.rho - self.rho.adjoint()).camax();
        let mut h = self.rho.clone();
        hermitize(&mut h);
        let min_eigenvalue = h
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v));
        FockCheck {
            trace_error: (self.trace() - 1.0).abs(),
            hermiticity_error: herm,
            min_eigenvalue,
        }
    }

    pub fn expectation(&self, op: &SparseOp) -> C {
        op.expectation(&self.rho) / self.trace()
    }

    pub fn population(&self, occupations: &[usize]) -> f64 {
        let i = self.space.index(occupations);
        self.rho[(i, i)].re / self.trace()
    }

    /// Quadrature mean and symmetrised covariance, normalised by the trace.
    pub fn moments(&self) -> (DVector<f64>, DMatrix<f64>) {
        let r = self.space.quadratures();
        let n = r.len();
        let mean = DVector::from_fn(n, |i, _| self.expectation(&r[i]).re);
        let mut cov = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                // ½⟨{r_i, r_j}⟩ is the real part of ⟨r_i r_j⟩.
                let v = self.expectation(&r[i].mul(&r[j])).re - mean[i] * mean[j];
                cov[(i, j)] = v;
                cov[(j, i)] = v;
            }
        }
        (mean, cov)
    }

    pub fn to_gaussian(&self) -> Result<GaussianState> {
        let (mean, cov) = self.moments();
        GaussianState::new(self.modes.clone(), mean, cov)
    }

    pub(crate) fn with_rho(&self, mut rho: DMatrix<C>) -> Self {
        hermitize(&mut rho);
        Self {
            modes: self.modes.clone(),
            space: self.space.clone(),
            rho,
            leaked: self.leaked,
        }
    }
}

fn hermitize(m: &mut DMatrix<C>) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in i + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
}

/// Density matrix of a Gaussian state truncated at `cutoff` photons per mode.
///
/// Matrix elements come from the Bargmann generating function
/// `F(z̄, w) = Σ ⟨m|ρ|n⟩ z̄^m w^n/√(m!n!) = T exp(½uᵀAu + bᵀu)`, `u = (z̄, w)`,
/// with `A = (I - σ_Q⁻¹)X`, `b = σ_Q⁻¹ζ₀`, where `σ_Q` is the complex
/// covariance of `(a, a†)` plus `I/2`, `ζ₀ = (⟨a⟩, ⟨a†⟩)` and `X` swaps the
/// two halves. Differentiating gives a recurrence over the matrix elements in
/// row-major order.
pub fn from_gaussian(state: &GaussianState, cutoff: usize) -> Result<FockState> {
    let n = state.n_modes();
    if n > FOCK_MAX_MODES {
        return Err(Error::FockTooLarge(n));
    }
    let report = check_physical(state);
    if !report.physical {
        return Err(Error::Unphysical(format!(
            "symplectic margin {:.3e}",
            report.margin
        )));
    }
    let space = FockSpace::new(vec![cutoff; n])?;
    let dim = space.dim();

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut w = DMatrix::<C>::zeros(2 * n, 2 * n);
    for k in 0..n {
        w[(k, 2 * k)] = C::new(h, 0.0);
        w[(k, 2 * k + 1)] = C::new(0.0, h);
        w[(n + k, 2 * k)] = C::new(h, 0.0);
        w[(n + k, 2 * k + 1)] = C::new(0.0, -h);
    }
    let cov_c = state.cov().map(|v| C::new(v, 0.0));
    let sigma_q = &w * cov_c * w.adjoint() + DMatrix::<C>::identity(2 * n, 2 * n) * C::new(0.5, 0.0);
    let inv = sigma_q
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("Husimi covariance is singular".into()))?;
    let mut x = DMatrix::<C>::zeros(2 * n, 2 * n);
    for k in 0..n {
        x[(k, n + k)] = C::new(1.0, 0.0);
        x[(n + k, k)] = C::new(1.0, 0.0);
    }
    let a = (DMatrix::<C>::identity(2 * n, 2 * n) - &inv) * &x;
    let zeta = &w * state.mean().map(|v| C::new(v, 0.0));
    let b = &inv * &zeta;
    let det = sigma_q.determinant().re;
    let t = (-0.5 * (zeta.adjoint() * &inv * &zeta)[(0, 0)]).exp() / det.sqrt();

    // The first n components of the multi-index belong to the bra (row),
    // the rest to the ket (col).
    let mut rho = DMatrix::<C>::zeros(dim, dim);
    rho[(0, 0)] = t;
    for col in 0..dim {
        let cn = space.occupations(col);
        for row in 0..dim {
            if row == 0 && col == 0 {
                continue;
            }
            let rn = space.occupations(row);
            let k: Vec<usize> = rn.iter().chain(&cn).copied().collect();
            let i = k.iter().position(|&v| v > 0).expect("nonzero multi-index");
            let mut prev = k.clone();
            prev[i] -= 1;
            let at = |kk: &[usize]| -> C {
                let r = space.index(&kk[..n]);
                let c = space.index(&kk[n..]);
                rho[(r, c)]
            };
            let mut v = b[i] * at(&prev);
            for j in 0..2 * n {
                if prev[j] > 0 && a[(i, j)] != C::new(0.0, 0.0) {
                    let mut pp = prev.clone();
                    pp[j] -= 1;
                    v += a[(i, j)] * (prev[j] as f64).sqrt() * at(&pp);
                }
            }
            rho[(row, col)] = v / ((prev[i] + 1) as f64).sqrt();
        }
    }
    let mut s = FockState::new(state.modes().to_vec(), space, rho)?;
    hermitize(&mut s.rho);
    s.leaked = (1.0 - s.trace()).max(0.0);
    Ok(s)
}

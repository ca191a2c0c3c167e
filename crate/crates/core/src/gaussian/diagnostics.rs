use nalgebra::DMatrix;
use serde::Serialize;

use super::GaussianState;
use crate::constants::{PHYSICALITY_TOL, SYMMETRY_TOL, VACUUM_VARIANCE};
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, omega, symplectic_eigenvalues};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhysicalityReport {
    /// Ascending.
    pub symplectic_eigenvalues: Vec<f64>,
    pub min_symplectic_eigenvalue: f64,
    /// `min ν - 1/2`; negative values violate the uncertainty principle.
    pub margin: f64,
    pub min_eigenvalue: f64,
    pub symmetry_defect: f64,
    pub physical: bool,
}

/// Uncertainty-principle check `Σ + iΩ/2 ≥ 0`, expressed through the
/// symplectic spectrum.
pub fn check_physical(state: &GaussianState) -> PhysicalityReport {
    let cov = state.cov();
    let symmetry_defect = (cov - cov.transpose()).amax();
    let nu = symplectic_eigenvalues(cov);
    let min_nu = nu.iter().copied().fold(f64::INFINITY, f64::min);
    let min_eig = min_eigenvalue(cov);
    let margin = min_nu - VACUUM_VARIANCE;
    let physical =
        symmetry_defect <= SYMMETRY_TOL * cov.amax().max(1.0) && min_eig > 0.0 && margin >= -PHYSICALITY_TOL;
    PhysicalityReport {
        symplectic_eigenvalues: nu,
        min_symplectic_eigenvalue: min_nu,
        margin,
        min_eigenvalue: min_eig,
        symmetry_defect,
        physical,
    }
}

/// [`check_physical`] as a fallible guard.
pub fn ensure_physical(state: &GaussianState) -> Result<PhysicalityReport> {
    let r = check_physical(state);
    if r.physical {
        Ok(r)
    } else {
        Err(Error::Unphysical(format!(
            "min symplectic eigenvalue {:.6e} (margin {:.3e})",
            r.min_symplectic_eigenvalue, r.margin
        )))
    }
}

/// `var((x_a - x_b)/√2) + var((p_a + p_b)/√2)`; equals 1 for the vacuum and
/// values below 1 certify entanglement.
pub fn epr_variance(state: &GaussianState, a: &str, b: &str) -> Result<f64> {
    use super::Quadrature::{P, X};
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let vx = state.linear_variance(&[(a, X, h), (b, X, -h)])?;
    let vp = state.linear_variance(&[(a, P, h), (b, P, h)])?;
    Ok(vx + vp)
}

/// Purity `Tr ρ² = 1/√det(2Σ)`.
pub fn purity(state: &GaussianState) -> f64 {
    1.0 / (state.cov() * 2.0).determinant().sqrt()
}

/// Uhlmann fidelity `(Tr√(√ρ σ √ρ))²` of two Gaussian states on the same
/// labelled modes (order may differ). Coherent states give `e^{-|α-β|²}`.
pub fn fidelity(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    if a.n_modes() != b.n_modes() {
        return Err(Error::ModeMismatch("fidelity needs the same modes".into()));
    }
    let b = b.reorder(&a.labels())?;
    let n = a.n_modes();
    let w = omega(n);
    let s1 = a.cov();
    let s2 = b.cov();
    let sum = s1 + s2;
    let inv = sum
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("Σ₁+Σ₂ is singular".into()))?;
    let delta = b.mean() - a.mean();
    let gauss = (-0.5 * (delta.transpose() * &inv * &delta)[(0, 0)]).exp();

    let v_aux: DMatrix<f64> = w.transpose() * &inv * (&w * 0.25 + s2 * &w * s1);
    let eig = (&v_aux * &w).complex_eigenvalues();
    let mut f_tot4 = (&v_aux * 2.0).determinant();
    for z in eig.iter() {
        let v = z.norm();
        f_tot4 *= 1.0 + (1.0 - 1.0 / (4.0 * v * v)).max(0.0).sqrt();
    }
    let det_sum = sum.determinant();
    let f = (f_tot4 / det_sum).sqrt() * gauss;
    Ok(f.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::ModeId;
    use nalgebra::DVector;

    fn m(l: &str) -> ModeId {
        ModeId::atomic(l)
    }

    #[test]
    fn vacuum_is_physical_and_tight() {
        let r = check_physical(&GaussianState::vacuum(vec![m("a"), m("b")]).unwrap());
        assert!(r.physical);
        assert!(r.margin.abs() < 1e-14);
    }

    #[test]
    fn sub_vacuum_is_unphysical() {
        let st = GaussianState::new(
            vec![m("a")],
            DVector::zeros(2),
            DMatrix::from_diagonal(&DVector::from_vec(vec![0.2, 0.5])),
        )
        .unwrap();
        let r = check_physical(&st);
        assert!(!r.physical);
        assert!(ensure_physical(&st).is_err());
    }

    #[test]
    fn epr_of_vacuum_and_tmsv() {
        let v = GaussianState::vacuum(vec![m("a"), m("b")]).unwrap();
        assert!((epr_variance(&v, "a", "b").unwrap() - 1.0).abs() < 1e-15);
        let r = 0.9;
        let t = GaussianState::two_mode_squeezed(m("a"), m("b"), r).unwrap();
        assert!((epr_variance(&t, "a", "b").unwrap() - (-2.0 * r).exp()).abs() < 1e-12);
    }

    #[test]
    fn fidelity_known_values() {
        let v = GaussianState::vacuum(vec![m("a")]).unwrap();
        let th = GaussianState::thermal(m("a"), 1.0).unwrap();
        assert!((fidelity(&v, &th).unwrap() - 0.5).abs() < 1e-12);
        assert!((fidelity(&th, &th).unwrap() - 1.0).abs() < 1e-12);
        let beta = 0.8;
        let coh = v.displace("a", beta * 2f64.sqrt(), 0.0).unwrap();
        assert!((fidelity(&v, &coh).unwrap() - (-beta * beta).exp()).abs() < 1e-12);
        // Two thermal states: 1/(√((1+n₁)(1+n₂)) - √(n₁n₂))².
        let (n1, n2) = (0.3f64, 2.0f64);
        let a = GaussianState::thermal(m("a"), n1).unwrap();
        let b = GaussianState::thermal(m("a"), n2).unwrap();
        let expect = 1.0 / (((1.0 + n1) * (1.0 + n2)).sqrt() - (n1 * n2).sqrt()).powi(2);
        assert!((fidelity(&a, &b).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn purity_values() {
        assert!((purity(&GaussianState::thermal(m("a"), 1.0).unwrap()) - 1.0 / 3.0).abs() < 1e-14);
        let t = GaussianState::two_mode_squeezed(m("a"), m("b"), 1.1).unwrap();
        assert!((purity(&t) - 1.0).abs() < 1e-9);
    }
}

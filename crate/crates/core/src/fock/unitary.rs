use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{FockSpace, FockState, SparseOp};
use crate::error::{Error, Result};
use crate::gaussian::ModeId;

type C = Complex64;

/// Pure state vector on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    modes: Vec<ModeId>,
    space: FockSpace,
    psi: DVector<C>,
}

impl Ket {
    /// Extracts the state vector of a pure density matrix.
    pub fn from_state(state: &FockState) -> Result<Self> {
        let rho = state.rho();
        let (j, _) = rho
            .diagonal()
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.re))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        // tr ρ² = Σ|ρ_ij|² for Hermitian ρ.
        let purity = rho.iter().map(|c| c.norm_sqr()).sum::<f64>() / state.trace().powi(2);
        if (purity - 1.0).abs() > 1e-8 {
            return Err(Error::Unphysical(format!("state is mixed (purity {purity:.6})")));
        }
        let mut psi = rho.column(j).clone_owned() / C::new(rho[(j, j)].re.sqrt(), 0.0);
        let norm = psi.norm();
        psi /= C::new(norm, 0.0);
        Ok(Self {
            modes: state.modes().to_vec(),
            space: state.space().clone(),
            psi,
        })
    }

    pub fn psi(&self) -> &DVector<C> {
        &self.psi
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn expectation(&self, op: &SparseOp) -> C {
        self.psi.dotc(&op.apply_vector(&self.psi)) / self.psi.norm_squared()
    }

    pub fn moments(&self) -> (DVector<f64>, DMatrix<f64>) {
        let r = self.space.quadratures();
        let rpsi: Vec<DVector<C>> = r.iter().map(|op| op.apply_vector(&self.psi)).collect();
        let norm = self.psi.norm_squared();
        let n = r.len();
        let mean = DVector::from_fn(n, |i, _| self.psi.dotc(&rpsi[i]).re / norm);
        // ⟨r_i r_j⟩ = (r_i ψ)† (r_j ψ) for Hermitian r_i.
        let cov = DMatrix::from_fn(n, n, |i, j| rpsi[i].dotc(&rpsi[j]).re / norm - mean[i] * mean[j]);
        (mean, cov)
    }

    /// `exp(-iĤ)|ψ⟩` with `Ĥ = ½ rᵀ H r`, whose Heisenberg action on the
    /// quadratures is `exp(ΩH)`.
    pub fn apply_generator(&self, h: &DMatrix<f64>) -> Result<Self> {
        let op = generator_op(&self.space, h)?;
        let mut out = self.clone();
        out.psi = taylor_propagate(&op, self.psi.clone(), |op, v| op.apply_vector(v));
        Ok(out)
    }
}

fn generator_op(space: &FockSpace, h: &DMatrix<f64>) -> Result<SparseOp> {
    if h.nrows() != 2 * space.n_modes() || h.ncols() != h.nrows() {
        return Err(Error::ModeMismatch("generator dimension".into()));
    }
    if (h - h.transpose()).amax() > 1e-12 * h.amax().max(1.0) {
        return Err(Error::Numerical("generator must be symmetric".into()));
    }
    Ok(space.quadratic(h))
}

/// `exp(-iĤ) x` by a Taylor series on short enough substeps.
fn taylor_propagate<T>(op: &SparseOp, mut x: T, apply: impl Fn(&SparseOp, &T) -> T) -> T
where
    T: Clone + std::ops::AddAssign<T> + std::ops::Mul<C, Output = T> + AbsMax,
{
    let substeps = (op.norm_bound() / 0.5).ceil().max(1.0) as usize;
    let dt = 1.0 / substeps as f64;
    for _ in 0..substeps {
        let mut term = x.clone();
        let mut sum = x.clone();
        for k in 1..80 {
            term = apply(op, &term) * C::new(0.0, -dt / k as f64);
            sum += term.clone();
            if term.abs_max() < 1e-18 * sum.abs_max() {
                break;
            }
        }
        x = sum;
    }
    x
}

trait AbsMax {
    fn abs_max(&self) -> f64;
}

impl AbsMax for DVector<C> {
    fn abs_max(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

impl AbsMax for DMatrix<C> {
    fn abs_max(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// `exp(-iĤ) ρ exp(iĤ)` for the quadratic Hamiltonian with Hessian `h` over
/// the state's quadratures.
pub fn apply_generator(state: &FockState, h: &DMatrix<f64>) -> Result<FockState> {
    let op = generator_op(state.space(), h)?;
    let half = taylor_propagate(&op, state.rho().clone(), |op, m| op.apply_left(m));
    let full = taylor_propagate(&op, half.adjoint(), |op, m| op.apply_left(m));
    Ok(state.with_rho(full))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::from_gaussian;
    use crate::gaussian::{GaussianState, SymplecticMap};
    use crate::maps::qnd_generator;

    fn m(l: &str) -> ModeId {
        ModeId::atomic(l)
    }

    #[test]
    fn rotation_generator_matches_map() {
        let g = GaussianState::squeezed(m("a"), 0.3, 0.0, 0.5, 0.2).unwrap();
        let theta = 0.6;
        let h = DMatrix::identity(2, 2) * theta;
        let f = from_gaussian(&g, 30).unwrap();
        let out = apply_generator(&f, &h).unwrap();
        let map = SymplecticMap::from_generator(&h, vec![m("a")], vec![m("a")]).unwrap();
        let expect = g.apply_map(&map).unwrap();
        let (mean, cov) = out.moments();
        assert!((mean - expect.mean()).amax() < 1e-9);
        assert!((cov - expect.cov()).amax() < 1e-9);
    }

    #[test]
    fn ket_and_density_routes_agree() {
        let g = GaussianState::vacuum(vec![m("a"), m("b")])
            .unwrap()
            .displace("a", 0.4, 0.0)
            .unwrap();
        let f = from_gaussian(&g, 12).unwrap();
        let h = qnd_generator(0.5);
        let via_rho = apply_generator(&f, &h).unwrap().moments();
        let via_ket = Ket::from_state(&f)
            .unwrap()
            .apply_generator(&h)
            .unwrap()
            .moments();
        assert!((via_rho.0 - via_ket.0).amax() < 1e-10);
        assert!((via_rho.1 - via_ket.1).amax() < 1e-10);
    }

    #[test]
    fn mixed_state_has_no_ket() {
        let f = from_gaussian(&GaussianState::thermal(m("a"), 0.5).unwrap(), 10).unwrap();
        assert!(Ket::from_state(&f).is_err());
    }
}

use nalgebra::{DMatrix, DVector};

use super::{check_unique, ModeId};
use crate::constants::SYMPLECTIC_TOL;
use crate::error::{Error, Result};
use crate::linalg::{omega, symplectic_defect};

/// An affine symplectic map `r ↦ S r + d` from `input_modes` to
/// `output_modes` (same count; the output labels replace the input labels
/// when the map is applied).
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMap {
    s: DMatrix<f64>,
    d: DVector<f64>,
    input_modes: Vec<ModeId>,
    output_modes: Vec<ModeId>,
}

impl SymplecticMap {
    pub fn new(
        s: DMatrix<f64>,
        d: DVector<f64>,
        input_modes: Vec<ModeId>,
        output_modes: Vec<ModeId>,
    ) -> Result<Self> {
        let n = input_modes.len();
        if n == 0 {
            return Err(Error::EmptyModes);
        }
        if output_modes.len() != n || s.shape() != (2 * n, 2 * n) || d.len() != 2 * n {
            return Err(Error::ModeMismatch(format!(
                "map over {n} modes has matrix {:?}, {} outputs",
                s.shape(),
                output_modes.len()
            )));
        }
        check_unique(&input_modes)?;
        check_unique(&output_modes)?;
        let defect = symplectic_defect(&s);
        if !(defect < SYMPLECTIC_TOL) {
            return Err(Error::NotSymplectic(defect));
        }
        Ok(Self {
            s,
            d,
            input_modes,
            output_modes,
        })
    }

    /// Linear map acting in place on `modes`.
    pub fn linear(s: DMatrix<f64>, modes: Vec<ModeId>) -> Result<Self> {
        let dim = s.nrows();
        Self::new(s, DVector::zeros(dim), modes.clone(), modes)
    }

    pub fn identity(modes: Vec<ModeId>) -> Result<Self> {
        let dim = 2 * modes.len();
        Self::linear(DMatrix::identity(dim, dim), modes)
    }

    /// `S = exp(Ω H)` for the quadratic Hamiltonian `½ rᵀ H r` applied for
    /// unit time.
    pub fn from_generator(
        h: &DMatrix<f64>,
        input_modes: Vec<ModeId>,
        output_modes: Vec<ModeId>,
    ) -> Result<Self> {
        let n = input_modes.len();
        let s = (omega(n) * h).exp();
        Self::new(s, DVector::zeros(2 * n), input_modes, output_modes)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.d
    }

    pub fn input_modes(&self) -> &[ModeId] {
        &self.input_modes
    }

    pub fn output_modes(&self) -> &[ModeId] {
        &self.output_modes
    }

    pub fn defect(&self) -> f64 {
        symplectic_defect(&self.s)
    }

    pub fn with_displacement(mut self, d: DVector<f64>) -> Result<Self> {
        if d.len() != self.d.len() {
            return Err(Error::ModeMismatch("displacement length".into()));
        }
        self.d = d;
        Ok(self)
    }

    /// `next ∘ self`: first `self`, then `next`. `next`'s inputs must be
    /// exactly `self`'s outputs (as a set); `next`'s ordering is respected.
    pub fn then(&self, next: &SymplecticMap) -> Result<Self> {
        let n = self.output_modes.len();
        if next.input_modes.len() != n {
            return Err(Error::ModeMismatch("composition needs equal mode counts".into()));
        }
        // Permutation from self's output order to next's input order.
        let mut perm = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for (j, m) in next.input_modes.iter().enumerate() {
            let i = self
                .output_modes
                .iter()
                .position(|o| o.label == m.label)
                .ok_or_else(|| Error::UnknownMode(m.label.clone()))?;
            perm[(2 * j, 2 * i)] = 1.0;
            perm[(2 * j + 1, 2 * i + 1)] = 1.0;
        }
        let s = &next.s * &perm * &self.s;
        let d = &next.s * &perm * &self.d + &next.d;
        Self::new(s, d, self.input_modes.clone(), next.output_modes.clone())
    }

    /// Direct sum acting on disjoint mode sets.
    pub fn direct_sum(&self, other: &SymplecticMap) -> Result<Self> {
        let (a, b) = (self.s.nrows(), other.s.nrows());
        let mut s = DMatrix::zeros(a + b, a + b);
        s.view_mut((0, 0), (a, a)).copy_from(&self.s);
        s.view_mut((a, a), (b, b)).copy_from(&other.s);
        let mut d = DVector::zeros(a + b);
        d.rows_mut(0, a).copy_from(&self.d);
        d.rows_mut(a, b).copy_from(&other.d);
        let mut inputs = self.input_modes.clone();
        inputs.extend(other.input_modes.iter().cloned());
        let mut outputs = self.output_modes.clone();
        outputs.extend(other.output_modes.iter().cloned());
        Self::new(s, d, inputs, outputs)
    }

    /// Phase-space rotation by `theta` on a single mode: `x' = cos θ x - sin θ p`.
    pub fn rotation(mode: ModeId, theta: f64) -> Result<Self> {
        let (c, s) = (theta.cos(), theta.sin());
        Self::linear(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]), vec![mode])
    }

    /// Single-mode squeezer: `x' = e^{-r} x`, `p' = e^{r} p`.
    pub fn squeeze(mode: ModeId, r: f64) -> Result<Self> {
        Self::linear(
            DMatrix::from_row_slice(2, 2, &[(-r).exp(), 0.0, 0.0, r.exp()]),
            vec![mode],
        )
    }

    /// Beamsplitter with transmissivity `cos²θ`:
    /// `a' = cos θ a + sin θ b`, `b' = -sin θ a + cos θ b`.
    pub fn beamsplitter(a: ModeId, b: ModeId, theta: f64) -> Result<Self> {
        let (c, s) = (theta.cos(), theta.sin());
        let s4 = DMatrix::from_row_slice(
            4,
            4,
            &[
                c, 0.0, s, 0.0, //
                0.0, c, 0.0, s, //
                -s, 0.0, c, 0.0, //
                0.0, -s, 0.0, c,
            ],
        );
        Self::linear(s4, vec![a, b])
    }
}

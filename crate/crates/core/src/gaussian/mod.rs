//! Gaussian states over labelled bosonic modes.
//!
//! A state is a mean vector and covariance matrix in the interleaved ordering
//! `(x₁, p₁, …, xₙ, pₙ)` with vacuum covariance `I/2`. States and maps are
//! plain values; every operation returns a new value.

mod diagnostics;
mod measure;
mod symplectic;

pub use diagnostics::{check_physical, ensure_physical, epr_variance, fidelity, purity, PhysicalityReport};
pub use measure::{homodyne_condition, homodyne_feedback, Feedback, Outcome};
pub use symplectic::SymplecticMap;

use std::collections::HashSet;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::constants::{SYMMETRY_TOL, VACUUM_VARIANCE};
use crate::error::{Error, Result};

/// What physical degree of freedom a mode stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Atomic,
    LightSin,
    LightCos,
    LightSidebandUpper,
    LightSidebandLower,
    Mechanical,
    ReadingMode,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeId {
    pub label: String,
    pub kind: ModeKind,
}

impl ModeId {
    pub fn new(label: impl Into<String>, kind: ModeKind) -> Self {
        Self {
            label: label.into(),
            kind,
        }
    }

    pub fn atomic(label: impl Into<String>) -> Self {
        Self::new(label, ModeKind::Atomic)
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    pub(crate) fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }
}

pub(crate) fn check_unique(modes: &[ModeId]) -> Result<()> {
    let mut seen = HashSet::new();
    for m in modes {
        if !seen.insert(m.label.as_str()) {
            return Err(Error::DuplicateMode(m.label.clone()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    modes: Vec<ModeId>,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state after checking dimensions, label uniqueness and
    /// covariance symmetry. Physicality is *not* enforced here; see
    /// [`check_physical`].
    pub fn new(modes: Vec<ModeId>, mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptyModes);
        }
        check_unique(&modes)?;
        let dim = 2 * modes.len();
        if mean.len() != dim || cov.shape() != (dim, dim) {
            return Err(Error::ModeMismatch(format!(
                "{} modes need a {dim}-vector and {dim}x{dim} covariance",
                modes.len()
            )));
        }
        let scale = cov.amax().max(1.0);
        let asym = (&cov - cov.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::Unphysical(format!("covariance asymmetric by {asym:.3e}")));
        }
        Ok(Self { modes, mean, cov })
    }

    pub fn vacuum(modes: Vec<ModeId>) -> Result<Self> {
        let dim = 2 * modes.len();
        Self::new(
            modes,
            DVector::zeros(dim),
            DMatrix::identity(dim, dim) * VACUUM_VARIANCE,
        )
    }

    /// Thermal state with mean occupation `nbar`.
    pub fn thermal(mode: ModeId, nbar: f64) -> Result<Self> {
        if nbar < 0.0 {
            return Err(crate::error::invalid("nbar", "must be non-negative"));
        }
        Self::new(
            vec![mode],
            DVector::zeros(2),
            DMatrix::identity(2, 2) * (nbar + VACUUM_VARIANCE),
        )
    }

    /// Displaced squeezed vacuum: squeezing `r` along the quadrature rotated by
    /// `phase` from `x` (so `phase = 0` squeezes `x`), mean `(x, p)`.
    pub fn squeezed(mode: ModeId, r: f64, phase: f64, x: f64, p: f64) -> Result<Self> {
        let (c, s) = (phase.cos(), phase.sin());
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![
            VACUUM_VARIANCE * (-2.0 * r).exp(),
            VACUUM_VARIANCE * (2.0 * r).exp(),
        ]));
        let mut cov = &rot * diag * rot.transpose();
        crate::linalg::symmetrize(&mut cov);
        Self::new(vec![mode], DVector::from_vec(vec![x, p]), cov)
    }

    /// Two-mode squeezed vacuum with `cosh r = μ`: `x_a - x_b` and `p_a + p_b`
    /// are squeezed.
    pub fn two_mode_squeezed(a: ModeId, b: ModeId, r: f64) -> Result<Self> {
        let c = VACUUM_VARIANCE * (2.0 * r).cosh();
        let s = VACUUM_VARIANCE * (2.0 * r).sinh();
        let cov = DMatrix::from_row_slice(
            4,
            4,
            &[
                c, 0.0, s, 0.0, //
                0.0, c, 0.0, -s, //
                s, 0.0, c, 0.0, //
                0.0, -s, 0.0, c,
            ],
        );
        Self::new(vec![a, b], DVector::zeros(4), cov)
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m.label == label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    pub fn labels(&self) -> Vec<&str> {
        self.modes.iter().map(|m| m.label.as_str()).collect()
    }

    /// Variance of `Σ cᵢ rᵢ` for the listed quadratures.
    pub fn linear_variance(&self, terms: &[(&str, Quadrature, f64)]) -> Result<f64> {
        let c = self.coefficient_vector(terms)?;
        Ok((c.transpose() * &self.cov * &c)[(0, 0)])
    }

    /// Mean of `Σ cᵢ rᵢ`.
    pub fn linear_mean(&self, terms: &[(&str, Quadrature, f64)]) -> Result<f64> {
        let c = self.coefficient_vector(terms)?;
        Ok(c.dot(&self.mean))
    }

    fn coefficient_vector(&self, terms: &[(&str, Quadrature, f64)]) -> Result<DVector<f64>> {
        let mut c = DVector::zeros(2 * self.n_modes());
        for &(label, q, w) in terms {
            c[2 * self.index_of(label)? + q.offset()] += w;
        }
        Ok(c)
    }

    pub fn quadrature_variance(&self, label: &str, q: Quadrature) -> Result<f64> {
        let i = 2 * self.index_of(label)? + q.offset();
        Ok(self.cov[(i, i)])
    }

    pub fn displace(&self, label: &str, dx: f64, dp: f64) -> Result<Self> {
        let i = self.index_of(label)?;
        let mut out = self.clone();
        out.mean[2 * i] += dx;
        out.mean[2 * i + 1] += dp;
        Ok(out)
    }

    /// Tensor product; the result lists `self`'s modes first.
    pub fn tensor(&self, other: &GaussianState) -> Result<Self> {
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().cloned());
        check_unique(&modes)?;
        let (na, nb) = (2 * self.n_modes(), 2 * other.n_modes());
        let mut mean = DVector::zeros(na + nb);
        mean.rows_mut(0, na).copy_from(&self.mean);
        mean.rows_mut(na, nb).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(na + nb, na + nb);
        cov.view_mut((0, 0), (na, na)).copy_from(&self.cov);
        cov.view_mut((na, na), (nb, nb)).copy_from(&other.cov);
        Ok(Self { modes, mean, cov })
    }

    /// Partial trace onto `keep`, in the order given.
    pub fn reduce(&self, keep: &[&str]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyModes);
        }
        let idx: Vec<usize> = keep.iter().map(|l| self.index_of(l)).collect::<Result<_>>()?;
        let modes: Vec<ModeId> = idx.iter().map(|&i| self.modes[i].clone()).collect();
        check_unique(&modes)?;
        let rows = quadrature_indices(&idx);
        Ok(Self {
            modes,
            mean: DVector::from_iterator(rows.len(), rows.iter().map(|&r| self.mean[r])),
            cov: self.cov.select_rows(&rows).select_columns(&rows),
        })
    }

    /// Drops the listed modes.
    pub fn trace_out(&self, drop: &[&str]) -> Result<Self> {
        for l in drop {
            self.index_of(l)?;
        }
        let keep: Vec<&str> = self
            .modes
            .iter()
            .map(|m| m.label.as_str())
            .filter(|l| !drop.contains(l))
            .collect();
        self.reduce(&keep)
    }

    /// Applies a symplectic map to the modes it names, relabelling them to the
    /// map's output modes. Other modes are untouched.
    pub fn apply_map(&self, map: &SymplecticMap) -> Result<Self> {
        let idx: Vec<usize> = map
            .input_modes()
            .iter()
            .map(|m| self.index_of(&m.label))
            .collect::<Result<_>>()?;
        let rows = quadrature_indices(&idx);
        let dim = 2 * self.n_modes();
        let mut s_full = DMatrix::<f64>::identity(dim, dim);
        let mut d_full = DVector::<f64>::zeros(dim);
        for (a, &ra) in rows.iter().enumerate() {
            d_full[ra] = map.displacement()[a];
            for (b, &rb) in rows.iter().enumerate() {
                s_full[(ra, rb)] = map.matrix()[(a, b)];
            }
        }
        let mean = &s_full * &self.mean + d_full;
        let mut cov = &s_full * &self.cov * s_full.transpose();
        crate::linalg::symmetrize(&mut cov);
        let mut modes = self.modes.clone();
        for (k, &i) in idx.iter().enumerate() {
            modes[i] = map.output_modes()[k].clone();
        }
        check_unique(&modes)?;
        Ok(Self { modes, mean, cov })
    }

    /// Same state with modes renamed according to `(old, new)` pairs.
    pub fn relabel(&self, renames: &[(&str, ModeId)]) -> Result<Self> {
        let mut modes = self.modes.clone();
        for (old, new) in renames {
            let i = self.index_of(old)?;
            modes[i] = new.clone();
        }
        check_unique(&modes)?;
        Ok(Self {
            modes,
            mean: self.mean.clone(),
            cov: self.cov.clone(),
        })
    }

    /// Reorders modes to the given label order (which must be a permutation).
    pub fn reorder(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.n_modes() {
            return Err(Error::ModeMismatch(
                "reorder needs every mode exactly once".into(),
            ));
        }
        self.reduce(order)
    }

    pub(crate) fn from_parts_unchecked(modes: Vec<ModeId>, mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        Self { modes, mean, cov }
    }
}

pub(crate) fn quadrature_indices(mode_idx: &[usize]) -> Vec<usize> {
    mode_idx.iter().flat_map(|&i| [2 * i, 2 * i + 1]).collect()
}

//! Sparse operators on a truncated multi-mode Fock space.
//!
//! Basis states are ordered row-major over modes: the first mode is the most
//! significant digit, each digit running over `0..=cutoff`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

type C = Complex64;

/// Compressed-row sparse complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C>,
}

impl SparseOp {
    /// Builds from `(row, col, value)` entries; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(dim: usize, mut entries: Vec<(usize, usize, C)>) -> Self {
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; dim + 1];
        let mut indices = Vec::with_capacity(entries.len());
        let mut values: Vec<C> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            debug_assert!(r < dim && c < dim);
            if last == Some((r, c)) {
                *values.last_mut().expect("entry pushed") += v;
                continue;
            }
            indices.push(c);
            values.push(v);
            indptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..dim {
            indptr[r + 1] += indptr[r];
        }
        Self {
            dim,
            indptr,
            indices,
            values,
        }
        .pruned()
    }

    fn pruned(self) -> Self {
        let mut entries = Vec::with_capacity(self.values.len());
        for r in 0..self.dim {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.values[k] != C::new(0.0, 0.0) {
                    entries.push((r, self.indices[k], self.values[k]));
                }
            }
        }
        if entries.len() == self.values.len() {
            return self;
        }
        let mut indptr = vec![0; self.dim + 1];
        for &(r, _, _) in &entries {
            indptr[r + 1] += 1;
        }
        for r in 0..self.dim {
            indptr[r + 1] += indptr[r];
        }
        Self {
            dim: self.dim,
            indptr,
            indices: entries.iter().map(|e| e.1).collect(),
            values: entries.iter().map(|e| e.2).collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_triplets(dim, Vec::new())
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, C::new(1.0, 0.0))).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn triplets(&self) -> impl Iterator<Item = (usize, usize, C)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.indptr[r]..self.indptr[r + 1]).map(move |k| (r, self.indices[k], self.values[k]))
        })
    }

    pub fn scale(&self, s: C) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out.pruned()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets()).collect())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.dim,
            self.triplets().map(|(r, c, v)| (c, r, v.conj())).collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        let mut acc = vec![C::new(0.0, 0.0); self.dim];
        let mut touched = Vec::new();
        let mut mark = vec![false; self.dim];
        let mut entries = Vec::new();
        for r in 0..self.dim {
            for k in self.indptr[r]..self.indptr[r + 1] {
                let (mid, a) = (self.indices[k], self.values[k]);
                for l in other.indptr[mid]..other.indptr[mid + 1] {
                    let c = other.indices[l];
                    if !mark[c] {
                        mark[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * other.values[l];
                }
            }
            for &c in &touched {
                entries.push((r, c, acc[c]));
                acc[c] = C::new(0.0, 0.0);
                mark[c] = false;
            }
            touched.clear();
        }
        Self::from_triplets(self.dim, entries)
    }

    pub fn to_dense(&self) -> DMatrix<C> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    /// Upper bound on the spectral norm, `√(‖·‖₁ ‖·‖_∞)`.
    pub fn norm_bound(&self) -> f64 {
        let mut rows = vec![0.0; self.dim];
        let mut cols = vec![0.0; self.dim];
        for (r, c, v) in self.triplets() {
            rows[r] += v.norm();
            cols[c] += v.norm();
        }
        let m = |v: Vec<f64>| v.into_iter().fold(0.0, f64::max);
        (m(rows) * m(cols)).sqrt()
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        (0..self.dim)
            .map(|r| {
                (self.indptr[r]..self.indptr[r + 1])
                    .map(|k| self.values[k] * v[self.indices[k]])
                    .sum()
            })
            .collect()
    }

    pub fn apply_vector(&self, v: &DVector<C>) -> DVector<C> {
        DVector::from_vec(self.apply(v.as_slice()))
    }

    /// `self · m` for a dense square matrix, columns in parallel.
    pub fn apply_left(&self, m: &DMatrix<C>) -> DMatrix<C> {
        assert_eq!(m.nrows(), self.dim, "operator dimensions differ");
        let mut out = DMatrix::zeros(self.dim, m.ncols());
        out.as_mut_slice()
            .par_chunks_mut(self.dim)
            .zip(m.as_slice().par_chunks(self.dim))
            .for_each(|(dst, src)| {
                for (r, d) in dst.iter_mut().enumerate() {
                    let mut s = C::new(0.0, 0.0);
                    for k in self.indptr[r]..self.indptr[r + 1] {
                        s += self.values[k] * src[self.indices[k]];
                    }
                    *d = s;
                }
            });
        out
    }

    /// Nonzeros of row `r` as `(col, value)`.
    pub(crate) fn row(&self, r: usize) -> impl Iterator<Item = (usize, C)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |k| (self.indices[k], self.values[k]))
    }

    /// `dst += scale · self · src`.
    pub(crate) fn accumulate(&self, src: &[C], dst: &mut [C], scale: C) {
        for (r, d) in dst.iter_mut().enumerate() {
            let mut s = C::new(0.0, 0.0);
            for k in self.indptr[r]..self.indptr[r + 1] {
                s += self.values[k] * src[self.indices[k]];
            }
            *d += scale * s;
        }
    }

    /// `tr(m · self)`, i.e. the expectation of `self` in state `m`.
    pub fn expectation(&self, m: &DMatrix<C>) -> C {
        self.triplets().map(|(r, c, v)| v * m[(c, r)]).sum()
    }
}

/// Truncated Fock space with a cutoff per mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    cutoffs: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl FockSpace {
    pub fn new(cutoffs: Vec<usize>) -> Result<Self> {
        if cutoffs.is_empty() {
            return Err(Error::EmptyModes);
        }
        let mut dim: usize = 1;
        for &c in &cutoffs {
            dim = dim.checked_mul(c + 1).ok_or(Error::FockTooLarge(usize::MAX))?;
        }
        if dim > crate::constants::FOCK_MAX_DIM {
            return Err(Error::FockTooLarge(dim));
        }
        let mut strides = vec![1; cutoffs.len()];
        for k in (0..cutoffs.len() - 1).rev() {
            strides[k] = strides[k + 1] * (cutoffs[k + 1] + 1);
        }
        Ok(Self {
            cutoffs,
            strides,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn index(&self, occupations: &[usize]) -> usize {
        occupations.iter().zip(&self.strides).map(|(n, s)| n * s).sum()
    }

    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % (self.cutoffs[mode] + 1)
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.n_modes()).map(|k| self.occupation(index, k)).collect()
    }

    pub fn annihilation(&self, mode: usize) -> SparseOp {
        let s = self.strides[mode];
        let entries = (0..self.dim)
            .filter_map(|i| {
                let n = self.occupation(i, mode);
                (n > 0).then(|| (i - s, i, C::new((n as f64).sqrt(), 0.0)))
            })
            .collect();
        SparseOp::from_triplets(self.dim, entries)
    }

    pub fn creation(&self, mode: usize) -> SparseOp {
        self.annihilation(mode).adjoint()
    }

    pub fn number(&self, mode: usize) -> SparseOp {
        let entries = (0..self.dim)
            .map(|i| (i, i, C::new(self.occupation(i, mode) as f64, 0.0)))
            .collect();
        SparseOp::from_triplets(self.dim, entries)
    }

    /// Quadrature operators in interleaved order `(x₁, p₁, x₂, p₂, …)`.
    pub fn quadratures(&self) -> Vec<SparseOp> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = Vec::with_capacity(2 * self.n_modes());
        for k in 0..self.n_modes() {
            let a = self.annihilation(k);
            let ad = a.adjoint();
            out.push(a.add(&ad).scale(C::new(h, 0.0)));
            out.push(a.add(&ad.scale(C::new(-1.0, 0.0))).scale(C::new(0.0, -h)));
        }
        out
    }

    /// `Σ_k (α_k a_k + β_k a_k†)`.
    pub fn linear(&self, alpha: &[C], beta: &[C]) -> SparseOp {
        let mut op = SparseOp::zero(self.dim);
        for k in 0..self.n_modes() {
            let a = self.annihilation(k);
            op = op.add(&a.scale(alpha[k])).add(&a.adjoint().scale(beta[k]));
        }
        op
    }

    /// `½ Σ_ij H_ij r_i r_j` for a real symmetric `H` over the quadratures.
    pub fn quadratic(&self, h: &DMatrix<f64>) -> SparseOp {
        let r = self.quadratures();
        let mut op = SparseOp::zero(self.dim);
        for i in 0..r.len() {
            for j in 0..r.len() {
                if h[(i, j)] != 0.0 {
                    op = op.add(&r[i].mul(&r[j]).scale(C::new(0.5 * h[(i, j)], 0.0)));
                }
            }
        }
        op
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_commutator_below_cutoff() {
        let s = FockSpace::new(vec![4, 3]).unwrap();
        let r = s.quadratures();
        let comm = r[2]
            .mul(&r[3])
            .add(&r[3].mul(&r[2]).scale(C::new(-1.0, 0.0)))
            .to_dense();
        // [x, p] = i except on the top level of the truncated mode.
        for i in 0..s.dim() {
            let expect = if s.occupation(i, 1) < 3 {
                C::new(0.0, 1.0)
            } else {
                C::new(0.0, -3.0)
            };
            assert!((comm[(i, i)] - expect).norm() < 1e-12, "{i}");
        }
    }

    #[test]
    fn sparse_products_match_dense() {
        let s = FockSpace::new(vec![3, 2]).unwrap();
        let a = s.annihilation(0).add(&s.creation(1).scale(C::new(0.3, -0.7)));
        let b = s.number(1).add(&s.annihilation(1).scale(C::new(0.0, 2.0)));
        let dense = a.to_dense() * b.to_dense();
        assert!((a.mul(&b).to_dense() - dense).camax() < 1e-14);
        let m = DMatrix::from_fn(s.dim(), s.dim(), |i, j| C::new(i as f64, j as f64 * 0.5));
        assert!((a.apply_left(&m) - a.to_dense() * &m).camax() < 1e-12);
        assert!((a.adjoint().to_dense() - a.to_dense().adjoint()).camax() < 1e-15);
        assert!(a.norm_bound() >= a.to_dense().norm() / (s.dim() as f64).sqrt());
    }

    #[test]
    fn too_large_is_rejected() {
        assert!(matches!(
            FockSpace::new(vec![40, 40, 40]),
            Err(Error::FockTooLarge(68921))
        ));
    }
}

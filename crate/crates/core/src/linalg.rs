//! Small dense linear-algebra kernels: the symplectic form, symplectic
//! spectra, Lyapunov solves and the Gaussian propagator of a linear
//! drift-diffusion process.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Standard symplectic form for `n` modes in interleaved ordering,
/// `⊕ [[0, 1], [-1, 0]]`.
pub fn omega(n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        w[(2 * k, 2 * k + 1)] = 1.0;
        w[(2 * k + 1, 2 * k)] = -1.0;
    }
    w
}

/// `‖SΩSᵀ - Ω‖_max`.
pub fn symplectic_defect(s: &DMatrix<f64>) -> f64 {
    let n = s.nrows() / 2;
    let w = omega(n);
    (s * &w * s.transpose() - w).amax()
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

pub fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

/// Symplectic eigenvalues of a covariance matrix, ascending.
///
/// These are the moduli of the eigenvalues of `ΩΣ`, which come in `±iν`
/// pairs for a positive-definite `Σ`.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Vec<f64> {
    let n = cov.nrows() / 2;
    let m = omega(n) * cov;
    let mut moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| a.total_cmp(b));
    moduli
        .chunks(2)
        .map(|pair| 0.5 * (pair[0] + pair[pair.len() - 1]))
        .collect()
}

pub fn min_eigenvalue(sym: &DMatrix<f64>) -> f64 {
    sym.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Solve `A X + X Aᵀ + D = 0` by the Bartels-Stewart method: reduce `A` to
/// real Schur form, then back-substitute over its 1×1 and 2×2 diagonal
/// blocks.
pub fn solve_lyapunov(a: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || d.shape() != (n, n) {
        return Err(Error::Numerical("lyapunov: shape mismatch".into()));
    }
    let schur = a
        .clone()
        .try_schur(1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("real Schur decomposition did not converge".into()))?;
    let (q, t) = schur.unpack();
    let f = -(q.transpose() * d * &q);

    let scale = t.amax().max(1.0);
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].abs() > 1e-14 * scale {
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }

    let mut y = DMatrix::<f64>::zeros(n, n);
    for jb in (0..blocks.len()).rev() {
        let (j0, q_sz) = blocks[jb];
        for ib in (0..blocks.len()).rev() {
            let (i0, p_sz) = blocks[ib];
            let mut rhs = f.view((i0, j0), (p_sz, q_sz)).clone_owned();
            for &(k0, k_sz) in &blocks[ib + 1..] {
                rhs -= t.view((i0, k0), (p_sz, k_sz)) * y.view((k0, j0), (k_sz, q_sz));
            }
            for &(l0, l_sz) in &blocks[jb + 1..] {
                rhs -= y.view((i0, l0), (p_sz, l_sz)) * t.view((j0, l0), (q_sz, l_sz)).transpose();
            }
            let tii = t.view((i0, i0), (p_sz, p_sz)).clone_owned();
            let tjj = t.view((j0, j0), (q_sz, q_sz)).clone_owned();
            let block = solve_small_sylvester(&tii, &tjj, &rhs)?;
            y.view_mut((i0, j0), (p_sz, q_sz)).copy_from(&block);
        }
    }
    let mut x = &q * y * q.transpose();
    symmetrize(&mut x);
    Ok(x)
}

/// `T₁ Y + Y T₂ᵀ = R` for blocks of size at most 2.
fn solve_small_sylvester(t1: &DMatrix<f64>, t2: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = t1.nrows();
    let q = t2.nrows();
    let k = kron(&DMatrix::identity(q, q), t1) + kron(t2, &DMatrix::identity(p, p));
    let rhs = DVector::from_column_slice(r.as_slice());
    let sol = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Sylvester block: A and -A share an eigenvalue".into()))?;
    Ok(DMatrix::from_column_slice(p, q, sol.as_slice()))
}

pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// Propagator `(Φ, Q)` of `dΣ/dt = AΣ + ΣAᵀ + D` over time `t`, such that
/// `Σ(t) = Φ Σ(0) Φᵀ + Q` and `m(t) = Φ m(0)`.
///
/// A short step is taken with Van Loan's block exponential and then doubled,
/// which stays bounded for any drift.
pub fn drift_diffusion_propagator(
    a: &DMatrix<f64>,
    d: &DMatrix<f64>,
    t: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    if t == 0.0 {
        return (DMatrix::identity(n, n), DMatrix::zeros(n, n));
    }
    let norm = a.amax() * n as f64 + d.amax();
    let mut doublings = 0u32;
    let mut h = t;
    while norm * h > 0.5 && doublings < 200 {
        h *= 0.5;
        doublings += 1;
    }
    let mut block = DMatrix::<f64>::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(&(-a * h));
    block.view_mut((0, n), (n, n)).copy_from(&(d * h));
    block.view_mut((n, n), (n, n)).copy_from(&(a.transpose() * h));
    let e = block.exp();
    let f22 = e.view((n, n), (n, n)).clone_owned();
    let g1 = e.view((0, n), (n, n)).clone_owned();
    let mut phi = f22.transpose();
    let mut q = &phi * g1;
    symmetrize(&mut q);
    for _ in 0..doublings {
        let q_next = &phi * &q * phi.transpose() + &q;
        phi = &phi * &phi;
        q = q_next;
        symmetrize(&mut q);
    }
    (phi, q)
}

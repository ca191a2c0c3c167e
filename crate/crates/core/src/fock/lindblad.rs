use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{FockState, SparseOp};
use crate::dissipative::LindbladModel;
use crate::error::{invalid, Error, Result};

type C = Complex64;

/// One dissipator `γ D[L]` on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockJump {
    pub op: SparseOp,
    pub rate: f64,
}

/// Tolerances of the adaptive Dormand-Prince stepper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-11,
            max_steps: 200_000,
        }
    }
}

/// Translates the jumps of a Gaussian model into ladder operators on the
/// state's space, matching modes by label.
pub fn model_jumps(model: &LindbladModel, state: &FockState) -> Result<Vec<FockJump>> {
    let n = state.modes().len();
    let pos: Vec<usize> = model
        .modes()
        .iter()
        .map(|m| {
            state
                .modes()
                .iter()
                .position(|s| s.label == m.label)
                .ok_or_else(|| Error::UnknownMode(m.label.clone()))
        })
        .collect::<Result<_>>()?;
    let zero = C::new(0.0, 0.0);
    Ok(model
        .jumps()
        .iter()
        .map(|j| {
            let mut alpha = vec![zero; n];
            let mut beta = vec![zero; n];
            for (k, &p) in pos.iter().enumerate() {
                alpha[p] = j.alpha[k];
                beta[p] = j.beta[k];
            }
            FockJump {
                op: state.space().linear(&alpha, &beta),
                rate: j.rate,
            }
        })
        .collect())
}

struct Generator {
    /// `-iH - ½Σγ L†L`.
    k: SparseOp,
    jumps: Vec<(SparseOp, f64)>,
}

impl Generator {
    fn new(dim: usize, jumps: &[FockJump], hamiltonian: Option<&SparseOp>) -> Result<Self> {
        let mut k = match hamiltonian {
            Some(h) => h.scale(C::new(0.0, -1.0)),
            None => SparseOp::zero(dim),
        };
        for j in jumps {
            if !(j.rate >= 0.0 && j.rate.is_finite()) {
                return Err(invalid(
                    "rate",
                    format!("jump rate must be non-negative, got {}", j.rate),
                ));
            }
            if j.op.dim() != dim {
                return Err(Error::ModeMismatch("jump operator dimension".into()));
            }
            k = k.add(&j.op.adjoint().mul(&j.op).scale(C::new(-0.5 * j.rate, 0.0)));
        }
        Ok(Self {
            k,
            jumps: jumps
                .iter()
                .filter(|j| j.rate > 0.0)
                .map(|j| (j.op.clone(), j.rate))
                .collect(),
        })
    }

    /// `Kρ + ρK† + Σγ LρL†`, one output column at a time. Column `j` of
    /// `ρB†` is `Σ_k conj(B_jk) ρ[:, k]`, so no transposes are formed.
    fn apply(&self, rho: &DMatrix<C>) -> DMatrix<C> {
        let n = rho.nrows();
        let src = rho.as_slice();
        let column = |k: usize| &src[k * n..(k + 1) * n];
        let mut out = DMatrix::<C>::zeros(n, n);
        out.as_mut_slice().par_chunks_mut(n).enumerate().for_each_init(
            || vec![C::new(0.0, 0.0); n],
            |tmp, (j, dst)| {
                let one = C::new(1.0, 0.0);
                self.k.accumulate(column(j), dst, one);
                for (k, v) in self.k.row(j) {
                    axpy(dst, v.conj(), column(k));
                }
                for (l, rate) in &self.jumps {
                    tmp.iter_mut().for_each(|t| *t = C::new(0.0, 0.0));
                    for (k, v) in l.row(j) {
                        axpy(tmp, v.conj(), column(k));
                    }
                    l.accumulate(tmp, dst, C::new(*rate, 0.0));
                }
            },
        );
        out
    }
}

/// `y + Σ c_s k_s` in a single pass.
fn combine(y: &DMatrix<C>, ks: &[DMatrix<C>], coeffs: &[C]) -> DMatrix<C> {
    let mut out = y.clone();
    let slices: Vec<&[C]> = ks.iter().map(|k| k.as_slice()).collect();
    for (i, o) in out.as_mut_slice().iter_mut().enumerate() {
        for (k, c) in slices.iter().zip(coeffs) {
            *o += c * k[i];
        }
    }
    out
}

fn axpy(dst: &mut [C], a: C, x: &[C]) {
    for (d, v) in dst.iter_mut().zip(x) {
        *d += a * v;
    }
}

/// `max |dρ/dt|` under the given master equation; zero for a stationary state.
pub fn lindblad_residual(
    state: &FockState,
    jumps: &[FockJump],
    hamiltonian: Option<&SparseOp>,
) -> Result<f64> {
    let g = Generator::new(state.space().dim(), jumps, hamiltonian)?;
    Ok(g.apply(state.rho()).camax())
}

/// Conservative radius of the stability region of DP5(4).
const STABILITY_RADIUS: f64 = 2.5;

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth- minus fourth-order weights, stages 1..7.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrates `dρ/dt = -i[H, ρ] + Σγ(LρL† - ½{L†L, ρ})` for time `t` with an
/// adaptive Dormand-Prince 5(4) stepper.
pub fn evolve_lindblad(
    state: &FockState,
    jumps: &[FockJump],
    hamiltonian: Option<&SparseOp>,
    t: f64,
    control: StepControl,
) -> Result<FockState> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("must be non-negative, got {t}")));
    }
    let g = Generator::new(state.space().dim(), jumps, hamiltonian)?;
    if t == 0.0 || (g.jumps.is_empty() && g.k.nnz() == 0) {
        return Ok(state.clone());
    }
    // First step from the stability interval of the method against a bound
    // on the generator's norm; the controller takes over from there.
    let bound = 2.0 * g.k.norm_bound()
        + g.jumps
            .iter()
            .map(|(l, r)| r * l.norm_bound().powi(2))
            .sum::<f64>();
    let mut h = (STABILITY_RADIUS / bound.max(1e-300)).min(t);
    let mut y = state.rho().clone();
    let mut now = 0.0;
    let mut k1 = g.apply(&y);
    let mut steps = 0;
    while now < t {
        if steps >= control.max_steps {
            return Err(Error::StepFailure(format!(
                "exceeded {} steps at t = {now}",
                control.max_steps
            )));
        }
        steps += 1;
        h = h.min(t - now);
        let mut ks = vec![k1.clone()];
        let mut y_new = None;
        for (s, row) in A.iter().enumerate() {
            let coeffs: Vec<C> = row[..ks.len()].iter().map(|&a| C::new(h * a, 0.0)).collect();
            let stage = combine(&y, &ks, &coeffs);
            ks.push(g.apply(&stage));
            if s == 5 {
                y_new = Some(stage);
            }
        }
        let y_new = y_new.expect("six stages");
        let mut ratio: f64 = 0.0;
        {
            let e: Vec<C> = E.iter().map(|&e| C::new(h * e, 0.0)).collect();
            let (ya, yb) = (y.as_slice(), y_new.as_slice());
            let slices: Vec<&[C]> = ks.iter().map(|k| k.as_slice()).collect();
            for i in 0..ya.len() {
                let mut err = C::new(0.0, 0.0);
                for (k, c) in slices.iter().zip(&e) {
                    err += c * k[i];
                }
                let tol = control.atol + control.rtol * ya[i].norm().max(yb[i].norm());
                ratio = ratio.max(err.norm() / tol);
            }
        }
        if !ratio.is_finite() {
            return Err(Error::StepFailure(format!(
                "non-finite error estimate at t = {now}"
            )));
        }
        if ratio <= 1.0 {
            now += h;
            y = y_new;
            k1 = ks.pop().expect("seven stages");
        }
        let factor = if ratio == 0.0 {
            5.0
        } else {
            (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < 1e-15 * t.max(1.0) {
            return Err(Error::StepFailure(format!("step size underflow at t = {now}")));
        }
    }
    Ok(state.with_rho(y))
}

/// Pure state annihilated by every jump: the lowest eigenvector of
/// `Σγ L†L`. Returns the state and that eigenvalue, which is zero up to
/// truncation when a common dark state exists.
pub fn dark_state(template: &FockState, jumps: &[FockJump]) -> Result<(FockState, f64)> {
    let dim = template.space().dim();
    let mut k = SparseOp::zero(dim);
    for j in jumps {
        k = k.add(&j.op.adjoint().mul(&j.op).scale(C::new(j.rate, 0.0)));
    }
    let eig = k.to_dense().symmetric_eigen();
    let (idx, &val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Numerical("empty spectrum".into()))?;
    let v = eig.eigenvectors.column(idx).clone_owned();
    let rho = &v * v.adjoint();
    Ok((template.with_rho(rho), val))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipative::{evolve, ideal_model_for_z, NoiseKind};
    use crate::fock::from_gaussian;
    use crate::gaussian::{GaussianState, ModeId};

    fn m(l: &str) -> ModeId {
        ModeId::atomic(l)
    }

    #[test]
    fn single_photon_decays_exponentially() {
        let s = FockState::number_state(vec![m("a")], 5, &[1]).unwrap();
        let jumps = [FockJump {
            op: s.space().annihilation(0),
            rate: 0.7,
        }];
        let out = evolve_lindblad(&s, &jumps, None, 2.0, StepControl::default()).unwrap();
        assert!((out.population(&[1]) - (-1.4f64).exp()).abs() < 1e-8);
        assert!((out.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_rates_are_identity() {
        let s = from_gaussian(&GaussianState::thermal(m("a"), 0.4).unwrap(), 10).unwrap();
        let jumps = [FockJump {
            op: s.space().annihilation(0),
            rate: 0.0,
        }];
        assert_eq!(
            evolve_lindblad(&s, &jumps, None, 3.0, StepControl::default()).unwrap(),
            s
        );
    }

    #[test]
    fn matches_gaussian_evolution_small_cutoff() {
        let model = ideal_model_for_z(1.5, 1.0)
            .unwrap()
            .add_noise_channel(NoiseKind::Dephasing, 0.1)
            .unwrap();
        let g0 = GaussianState::vacuum(vec![m("I"), m("II")])
            .unwrap()
            .displace("I", 0.3, 0.1)
            .unwrap();
        let f0 = from_gaussian(&g0, 14).unwrap();
        let jumps = model_jumps(&model, &f0).unwrap();
        let f = evolve_lindblad(&f0, &jumps, None, 0.5, StepControl::default()).unwrap();
        let g = evolve(&model, &g0, 0.5).unwrap();
        let (mean, cov) = f.moments();
        assert!((mean - g.mean()).amax() < 1e-5);
        assert!((cov - g.cov()).amax() < 1e-4);
    }

    #[test]
    fn dark_state_is_stationary() {
        let model = ideal_model_for_z(1.5, 1.0).unwrap();
        let t = FockState::vacuum(vec![m("I"), m("II")], 16).unwrap();
        let jumps = model_jumps(&model, &t).unwrap();
        let (d, val) = dark_state(&t, &jumps).unwrap();
        assert!(val.abs() < 1e-8);
        assert!(lindblad_residual(&d, &jumps, None).unwrap() < 1e-6);
    }
}

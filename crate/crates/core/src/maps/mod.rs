//! Symplectic input-output relations of the light-atom interface.
//!
//! The effective Hamiltonian mixes a beamsplitter part (weight `μ`) and a
//! two-mode-squeezing part (weight `ν`) with `μ = (Z + 1/Z)/2`,
//! `ν = (Z - 1/Z)/2`. `Z → ∞` at fixed `κ` recovers the QND coupling; `Z = 1`
//! is a pure beamsplitter.
//!
//! Two-cell relations are written in EPR modes of the two ensembles
//! (see [`epr_basis`]), where they split into independent `cos` and `sin`
//! sectors.

mod mode_function;

pub use mode_function::{mode_function, mode_overlap, ModeFunctionKind, ModeFunctionSpec};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::constants::LARMOR_ADVISORY_OMEGA_T;
use crate::error::{invalid, Result};
use crate::gaussian::{ModeId, ModeKind, SymplecticMap};

/// `(Z, γ_s, T, Ω)`: asymmetry, swap rate (1/s), pulse duration (s) and
/// Larmor frequency (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionParams {
    pub z: f64,
    pub gamma_s: f64,
    pub duration: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coupling {
    pub mu: f64,
    pub nu: f64,
    pub kappa: f64,
}

impl InteractionParams {
    pub fn new(z: f64, gamma_s: f64, duration: f64, omega: f64) -> Result<Self> {
        let p = Self {
            z,
            gamma_s,
            duration,
            omega,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters reaching coupling `κ` at asymmetry `Z`, with unit pulse
    /// duration.
    pub fn from_kappa(z: f64, kappa: f64, omega: f64) -> Result<Self> {
        let gt = swap_time_for_kappa(kappa, z)?;
        Self::new(z, gt, 1.0, omega)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z > 0.0 && self.z.is_finite()) {
            return Err(invalid(
                "Z",
                format!("must be positive and finite, got {}", self.z),
            ));
        }
        if !(self.gamma_s >= 0.0 && self.gamma_s.is_finite()) {
            return Err(invalid(
                "gamma_s",
                format!("must be non-negative, got {}", self.gamma_s),
            ));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(invalid("T", format!("must be positive, got {}", self.duration)));
        }
        if !self.omega.is_finite() {
            return Err(invalid("Omega", "must be finite"));
        }
        Ok(())
    }

    /// Dimensionless interaction strength `γ_s T`.
    pub fn gamma_t(&self) -> f64 {
        self.gamma_s * self.duration
    }

    pub fn coupling(&self) -> Coupling {
        let (mu, nu) = mu_nu(self.z);
        Coupling {
            mu,
            nu,
            kappa: kappa(self.z, self.gamma_t()),
        }
    }

    /// Validity warnings that do not stop a computation.
    pub fn advisories(&self) -> Vec<String> {
        let mut out = Vec::new();
        let omega_t = self.omega.abs() * self.duration;
        if omega_t < LARMOR_ADVISORY_OMEGA_T {
            out.push(format!(
                "ΩT = {omega_t:.3} < {LARMOR_ADVISORY_OMEGA_T}: sine and cosine sideband modes are not independent"
            ));
        }
        out
    }
}

pub fn mu_nu(z: f64) -> (f64, f64) {
    (0.5 * (z + 1.0 / z), 0.5 * (z - 1.0 / z))
}

/// `κ = √(1 - e^{-2γ_s T})·Z`.
pub fn kappa(z: f64, gamma_t: f64) -> f64 {
    (-(-2.0 * gamma_t).exp_m1()).sqrt() * z
}

/// Coupling in the QND convention, `κ = √(2γ_s T)·Z`. Agrees with [`kappa`]
/// to first order in `γ_s T`.
pub fn kappa_qnd(z: f64, gamma_t: f64) -> f64 {
    (2.0 * gamma_t).sqrt() * z
}

/// Inverse of [`kappa`]: the `γ_s T` that gives coupling `κ` at asymmetry `Z`.
pub fn swap_time_for_kappa(kappa: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(invalid("Z", "must be positive"));
    }
    if !(kappa >= 0.0 && kappa < z) {
        return Err(invalid("kappa", format!("need 0 ≤ κ < Z, got κ={kappa}, Z={z}")));
    }
    let ratio = kappa / z;
    Ok(-0.5 * (-ratio * ratio).ln_1p())
}

/// `(μ, ν, κ)` for the given `(Z, γ_s, T)`.
pub fn coupling_params(z: f64, gamma_s: f64, duration: f64) -> Result<Coupling> {
    Ok(InteractionParams::new(z, gamma_s, duration, 0.0)?.coupling())
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(invalid("kappa", format!("must be non-negative, got {kappa}")));
    }
    Ok(())
}

/// Zero-field single-cell QND map on `(atom, light)`:
/// `x_A += κ p_L`, `x_L += κ p_A`, `p_A`, `p_L` conserved.
pub fn qnd_single_pass(kappa: f64, atomic: ModeId, light: ModeId) -> Result<SymplecticMap> {
    check_kappa(kappa)?;
    SymplecticMap::linear(qnd_block(kappa), vec![atomic, light])
}

fn qnd_block(k: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            1.0, 0.0, 0.0, k, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, k, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    )
}

/// Modes of one EPR sector of the two-cell setup.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorModes {
    pub atom: ModeId,
    pub light_in: ModeId,
    pub light_out: ModeId,
}

/// Modes of both sectors. Map matrices are ordered
/// `(atom_cos, light_cos, atom_sin, light_sin)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoCellModes {
    pub cos: SectorModes,
    pub sin: SectorModes,
}

impl TwoCellModes {
    /// `A_cos`, `A_sin`, `L_cos`, `L_sin`, with the same light label in and out.
    pub fn standard() -> Self {
        let sector = |name: &str, kind| SectorModes {
            atom: ModeId::atomic(format!("A_{name}")),
            light_in: ModeId::new(format!("L_{name}"), kind),
            light_out: ModeId::new(format!("L_{name}"), kind),
        };
        Self {
            cos: sector("cos", ModeKind::LightCos),
            sin: sector("sin", ModeKind::LightSin),
        }
    }

    /// Rising reading modes `L+_cos/sin` in, falling reading modes
    /// `L-_cos/sin` out.
    pub fn reading() -> Self {
        let sector = |name: &str| SectorModes {
            atom: ModeId::atomic(format!("A_{name}")),
            light_in: ModeId::new(format!("L+_{name}"), ModeKind::ReadingMode),
            light_out: ModeId::new(format!("L-_{name}"), ModeKind::ReadingMode),
        };
        Self {
            cos: sector("cos"),
            sin: sector("sin"),
        }
    }

    fn inputs(&self) -> Vec<ModeId> {
        vec![
            self.cos.atom.clone(),
            self.cos.light_in.clone(),
            self.sin.atom.clone(),
            self.sin.light_in.clone(),
        ]
    }

    fn outputs(&self) -> Vec<ModeId> {
        vec![
            self.cos.atom.clone(),
            self.cos.light_out.clone(),
            self.sin.atom.clone(),
            self.sin.light_out.clone(),
        ]
    }
}

fn sector_sum(block: &DMatrix<f64>) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(8, 8);
    s.view_mut((0, 0), (4, 4)).copy_from(block);
    s.view_mut((4, 4), (4, 4)).copy_from(block);
    s
}

fn two_cell_map(block: &DMatrix<f64>, modes: &TwoCellModes) -> Result<SymplecticMap> {
    SymplecticMap::new(
        sector_sum(block),
        DVector::zeros(8),
        modes.inputs(),
        modes.outputs(),
    )
}

/// Two antiparallel cells in a magnetic field: one QND map per EPR sector.
pub fn qnd_two_cell(kappa: f64, modes: &TwoCellModes) -> Result<SymplecticMap> {
    check_kappa(kappa)?;
    two_cell_map(&qnd_block(kappa), modes)
}

/// One sector of the non-QND two-cell relations on `(x_A, p_A, x_L, p_L)`
/// with `t = e^{-γ_s T}`, `r = √(1 - t²)`:
///
/// `x_A' = t x_A + rZ p_L`, `p_A' = t p_A - (r/Z) x_L`,
/// `x_L' = t x_L + rZ p_A`, `p_L' = t p_L - (r/Z) x_A`.
pub fn nonqnd_sector(z: f64, gamma_t: f64) -> DMatrix<f64> {
    let t = (-gamma_t).exp();
    let r = (-(-2.0 * gamma_t).exp_m1()).sqrt();
    sector_from_tr(z, t, r)
}

fn sector_from_tr(z: f64, t: f64, r: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            t,
            0.0,
            0.0,
            r * z, //
            0.0,
            t,
            -r / z,
            0.0, //
            0.0,
            r * z,
            t,
            0.0, //
            -r / z,
            0.0,
            0.0,
            t,
        ],
    )
}

/// Two antiparallel cells with general `Z`: the atoms decay as `e^{-γ_s T}`
/// while the rising reading mode is written into them through
/// `M_Z = diag(Z, -1/Z)`, and vice versa.
pub fn nonqnd_two_cell(params: &InteractionParams, modes: &TwoCellModes) -> Result<SymplecticMap> {
    params.validate()?;
    two_cell_map(&nonqnd_sector(params.z, params.gamma_t()), modes)
}

/// `γ_s T → ∞` limit of [`nonqnd_two_cell`]: light and atoms swap and each
/// is squeezed by `Z²`.
pub fn long_time_limit(z: f64, modes: &TwoCellModes) -> Result<SymplecticMap> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(invalid("Z", "must be positive and finite"));
    }
    two_cell_map(&sector_from_tr(z, 0.0, 1.0), modes)
}

/// `‖nonqnd_two_cell − qnd_two_cell‖_max` at asymmetry `z`, with the pulse
/// length chosen so both maps have coupling `kappa`.
pub fn qnd_limit_error(z: f64, kappa: f64) -> Result<f64> {
    let params = InteractionParams::from_kappa(z, kappa, 0.0)?;
    let modes = TwoCellModes::standard();
    let a = nonqnd_two_cell(&params, &modes)?;
    let b = qnd_two_cell(params.coupling().kappa, &modes)?;
    Ok((a.matrix() - b.matrix()).amax())
}

/// Quadratic generator `h = θ(Z p_A p_L + x_A x_L / Z)` (as a Hessian on
/// `(x_A, p_A, x_L, p_L)`) whose unit-time flow is [`nonqnd_sector`] with
/// `cos θ = e^{-γ_s T}`.
pub fn nonqnd_sector_generator(z: f64, gamma_t: f64) -> DMatrix<f64> {
    let theta = (-gamma_t).exp().acos();
    let mut h = DMatrix::zeros(4, 4);
    h[(1, 3)] = theta * z;
    h[(3, 1)] = theta * z;
    h[(0, 2)] = theta / z;
    h[(2, 0)] = theta / z;
    h
}

/// Hessian of `κ p_A p_L`, the generator of [`qnd_single_pass`].
pub fn qnd_generator(kappa: f64) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(4, 4);
    h[(1, 3)] = kappa;
    h[(3, 1)] = kappa;
    h
}

/// Modes of the single-cell non-QND map.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleCellModes {
    pub atom: ModeId,
    /// Rising upper-sideband input mode.
    pub upper: ModeId,
    /// Rising lower-sideband input mode.
    pub lower: ModeId,
    /// Falling reading mode leaving the cell.
    pub reading_out: ModeId,
    /// Orthogonal complement of the reading mode within the two sidebands; it
    /// does not interact.
    pub complement: ModeId,
}

impl Default for SingleCellModes {
    fn default() -> Self {
        Self {
            atom: ModeId::atomic("A"),
            upper: ModeId::new("us", ModeKind::LightSidebandUpper),
            lower: ModeId::new("ls", ModeKind::LightSidebandLower),
            reading_out: ModeId::new("r-", ModeKind::ReadingMode),
            complement: ModeId::new("r_perp", ModeKind::ReadingMode),
        }
    }
}

/// Sideband pair `(us, ls)` to `(reading, complement)`:
/// `x_r = μ x_us + ν p_ls`, `p_r = μ p_us + ν x_ls`,
/// `x_c = ν p_us + μ x_ls`, `p_c = ν x_us + μ p_ls`.
pub fn reading_mode_transform(z: f64) -> DMatrix<f64> {
    let (mu, nu) = mu_nu(z);
    DMatrix::from_row_slice(
        4,
        4,
        &[
            mu, 0.0, 0.0, nu, //
            0.0, mu, nu, 0.0, //
            0.0, nu, mu, 0.0, //
            nu, 0.0, 0.0, mu,
        ],
    )
}

/// Single cell in a magnetic field, closed on the atom and its reading
/// modes. Inputs `(atom, upper, lower)`, outputs
/// `(atom, reading_out, complement)`:
///
/// `A' = t A + r R_in`, `R_out = t R_in - r A` with `t = e^{-γ_s T}`,
/// `r = √(1 - t²)`, where `R_in` is the rising reading mode built from the
/// sidebands by [`reading_mode_transform`].
pub fn nonqnd_single_cell(params: &InteractionParams, modes: &SingleCellModes) -> Result<SymplecticMap> {
    params.validate()?;
    let gt = params.gamma_t();
    let t = (-gt).exp();
    let r = (-(-2.0 * gt).exp_m1()).sqrt();
    let mut embed = DMatrix::identity(6, 6);
    embed
        .view_mut((2, 2), (4, 4))
        .copy_from(&reading_mode_transform(params.z));
    let mut bs = DMatrix::identity(6, 6);
    for q in 0..2 {
        bs[(q, q)] = t;
        bs[(q, 2 + q)] = r;
        bs[(2 + q, q)] = -r;
        bs[(2 + q, 2 + q)] = t;
    }
    SymplecticMap::new(
        bs * embed,
        DVector::zeros(6),
        vec![modes.atom.clone(), modes.upper.clone(), modes.lower.clone()],
        vec![
            modes.atom.clone(),
            modes.reading_out.clone(),
            modes.complement.clone(),
        ],
    )
}

/// Quarter-turn phase-space rotation `x → p`, `p → -x` on every mode.
/// Conjugating a `Z` map by it yields the `1/Z` map.
pub fn quarter_turn(n_modes: usize) -> DMatrix<f64> {
    let mut r = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        r[(2 * k, 2 * k + 1)] = 1.0;
        r[(2 * k + 1, 2 * k)] = -1.0;
    }
    r
}

/// Change of variables from two ensembles `(I, II)` to EPR modes:
/// `x_cos = (x_I + x_II)/√2`, `p_cos = (p_I + p_II)/√2`,
/// `x_sin = -(p_I - p_II)/√2`, `p_sin = (x_I - x_II)/√2`.
///
/// With this choice `var(p_cos) + var(p_sin)` is the EPR variance of `(I, II)`.
pub fn epr_basis(first: ModeId, second: ModeId, cos: ModeId, sin: ModeId) -> Result<SymplecticMap> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = DMatrix::from_row_slice(
        4,
        4,
        &[
            h, 0.0, h, 0.0, //
            0.0, h, 0.0, h, //
            0.0, -h, 0.0, h, //
            h, 0.0, -h, 0.0,
        ],
    );
    SymplecticMap::new(s, DVector::zeros(4), vec![first, second], vec![cos, sin])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{GaussianState, Quadrature};
    use crate::linalg::omega;

    #[test]
    fn coupling_examples() {
        let c = coupling_params(2.5, 1.0, 1.0).unwrap();
        assert!((c.mu - 1.45).abs() < 1e-15);
        assert!((c.nu - 1.05).abs() < 1e-15);
        assert!((c.mu * c.mu - c.nu * c.nu - 1.0).abs() < 1e-12);
        let c1 = coupling_params(1.0, 1.0, 1.0).unwrap();
        assert_eq!((c1.mu, c1.nu), (1.0, 0.0));
        let ci = coupling_params(1.0 / 2.5, 1.0, 1.0).unwrap();
        assert!((ci.mu - 1.45).abs() < 1e-14 && (ci.nu + 1.05).abs() < 1e-14);
        assert!(coupling_params(0.0, 1.0, 1.0).is_err());
        assert!(coupling_params(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn kappa_conventions_and_inverse() {
        let (z, gt) = (3.0, 0.01);
        assert!((kappa(z, gt) - kappa_qnd(z, gt)).abs() / kappa_qnd(z, gt) < gt);
        let k = kappa(z, 0.37);
        assert!((swap_time_for_kappa(k, z).unwrap() - 0.37).abs() < 1e-14);
        assert!(swap_time_for_kappa(3.0, 3.0).is_err());
    }

    #[test]
    fn qnd_single_pass_vacuum() {
        let a = ModeId::atomic("A");
        let l = ModeId::new("L", ModeKind::LightCos);
        let v = GaussianState::vacuum(vec![a.clone(), l.clone()]).unwrap();
        let out = v.apply_map(&qnd_single_pass(1.0, a, l).unwrap()).unwrap();
        assert!((out.quadrature_variance("L", Quadrature::X).unwrap() - 1.0).abs() < 1e-15);
        assert!((out.quadrature_variance("L", Quadrature::P).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn qnd_two_cell_is_two_single_passes() {
        let m = TwoCellModes::standard();
        let two = qnd_two_cell(0.8, &m).unwrap();
        let cos = qnd_single_pass(0.8, m.cos.atom.clone(), m.cos.light_in.clone()).unwrap();
        let sin = qnd_single_pass(0.8, m.sin.atom.clone(), m.sin.light_in.clone()).unwrap();
        let sum = cos.direct_sum(&sin).unwrap();
        assert!((two.matrix() - sum.matrix()).amax() < 1e-12);
        let s = two.matrix();
        assert!(s.view((0, 4), (4, 4)).amax() == 0.0 && s.view((4, 0), (4, 4)).amax() == 0.0);
    }

    #[test]
    fn nonqnd_generator_reproduces_sector() {
        for &(z, gt) in &[(2.5, 0.3), (0.4, 1.2), (1.0, 0.05)] {
            let s = (omega(2) * nonqnd_sector_generator(z, gt)).exp();
            assert!((s - nonqnd_sector(z, gt)).amax() < 1e-12, "z={z} gt={gt}");
        }
        let s = (omega(2) * qnd_generator(0.7)).exp();
        assert!((s - qnd_block(0.7)).amax() < 1e-14);
    }

    #[test]
    fn long_time_limit_squeezes_light() {
        let m = TwoCellModes::reading();
        let st = GaussianState::vacuum(m.inputs()).unwrap();
        let out = st.apply_map(&long_time_limit(2.5, &m).unwrap()).unwrap();
        let v = out.quadrature_variance("L-_cos", Quadrature::P).unwrap();
        assert!((v - 0.08).abs() < 1e-15);
        let v = out.quadrature_variance("L-_cos", Quadrature::X).unwrap();
        assert!((v - 3.125).abs() < 1e-14);
    }

    #[test]
    fn z_one_is_a_swap() {
        let s = long_time_limit(1.0, &TwoCellModes::standard()).unwrap();
        // Atom takes (p_L, -x_L): a swap up to a quarter turn, no squeezing.
        let b = s.matrix().view((0, 0), (4, 4)).clone_owned();
        let sv = b.singular_values();
        assert!(sv.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn inverse_z_by_quarter_turn() {
        let r = quarter_turn(2);
        for &(z, gt) in &[(2.5, 0.4), (7.0, 2.0)] {
            let lhs = &r * nonqnd_sector(z, gt) * r.transpose();
            assert!((lhs - nonqnd_sector(1.0 / z, gt)).amax() < 1e-14);
        }
    }

    #[test]
    fn single_cell_limits() {
        let m = SingleCellModes::default();
        let p0 = InteractionParams::new(2.5, 0.0, 1.0, 1e4).unwrap();
        let s0 = nonqnd_single_cell(&p0, &m).unwrap();
        let atom_block = s0.matrix().view((0, 0), (2, 6)).clone_owned();
        let mut expect = DMatrix::zeros(2, 6);
        expect[(0, 0)] = 1.0;
        expect[(1, 1)] = 1.0;
        assert!((atom_block - expect).amax() < 1e-15);

        // Full swap: the atom ends up holding the rising reading mode.
        let p = InteractionParams::new(2.5, 40.0, 1.0, 1e4).unwrap();
        let s = nonqnd_single_cell(&p, &m).unwrap();
        let atom_block = s.matrix().view((0, 2), (2, 4)).clone_owned();
        let reading = reading_mode_transform(2.5).view((0, 0), (2, 4)).clone_owned();
        assert!((atom_block - reading).amax() < 1e-15);
        assert!(s.matrix()[(0, 0)].abs() < 1e-17);
    }

    #[test]
    fn epr_basis_reads_epr_variance() {
        let a = ModeId::atomic("I");
        let b = ModeId::atomic("II");
        let t = GaussianState::two_mode_squeezed(a.clone(), b.clone(), 0.6).unwrap();
        let map = epr_basis(a, b, ModeId::atomic("A_cos"), ModeId::atomic("A_sin")).unwrap();
        let e = t.apply_map(&map).unwrap();
        let v = e.quadrature_variance("A_cos", Quadrature::P).unwrap()
            + e.quadrature_variance("A_sin", Quadrature::P).unwrap();
        let direct = crate::gaussian::epr_variance(&t, "I", "II").unwrap();
        assert!((v - direct).abs() < 1e-14);
    }

    #[test]
    fn advisory_for_slow_larmor() {
        assert_eq!(
            InteractionParams::new(2.0, 1.0, 1.0, 10.0)
                .unwrap()
                .advisories()
                .len(),
            1
        );
        assert!(InteractionParams::new(2.0, 1.0, 1.0, 1e3)
            .unwrap()
            .advisories()
            .is_empty());
    }

    #[test]
    fn large_z_approaches_qnd() {
        let far = qnd_limit_error(1e3, 1.0).unwrap();
        assert!(far < 1e-5, "{far}");
        assert!(qnd_limit_error(10.0, 1.0).unwrap() > far);
    }
}

//! Conventions, tolerances and physical constants shared by every module.
//!
//! Quadratures are `x = (a + a†)/√2`, `p = -i(a - a†)/√2`, so `[x, p] = i`
//! and the vacuum has `var(x) = var(p) = 1/2`. Phase-space vectors are
//! interleaved: `(x₁, p₁, x₂, p₂, …)`.
//!
//! Collective spins map onto bosonic modes through the Holstein-Primakoff
//! substitution `x = J_y/√|⟨J_x⟩|`, `p = ±J_z/√|⟨J_x⟩|`, with the minus sign for
//! an ensemble polarised along `-x`. Under this substitution the spin-space
//! entanglement bound
//!
//! `var(J_yI - J_yII) + var(J_zI - J_zII) < |⟨J_xI⟩| + |⟨J_xII⟩|`
//!
//! becomes `var((x_I - x_II)/√2) + var((p_I + p_II)/√2) < 1`, which is what
//! [`EPR_ENTANGLEMENT_BOUND`] encodes.
//!
//! Dissipative rates: the ideal two-ensemble master equation is written with
//! a prefactor `dΓ/2` on `(AρA† - A†Aρ + h.c.)`, which is `dΓ·D[A]` in the
//! usual dissipator notation. That rate damps `⟨a⟩` at `dΓ/2`, while the pulse
//! input-output relations damp atomic quadratures as `e^{-γ_s T}`. The two
//! agree when each dissipator carries the rate `2γ_s`, and with `γ_s = dΓ`
//! this is the choice made by [`dissipator_rate`]. The drift of the ideal
//! model is then exactly `-γ_s·I`.

/// Variance of either quadrature of the vacuum.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// EPR variance of the two-mode vacuum; strictly smaller values certify
/// entanglement.
pub const EPR_ENTANGLEMENT_BOUND: f64 = 1.0;

/// Relative symmetry tolerance for covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Allowed undershoot of symplectic eigenvalues below 1/2.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Allowed `‖SΩSᵀ - Ω‖_max` for a symplectic matrix.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Measured-quadrature variances below this make conditioning an error.
pub const SINGULAR_CONDITIONING: f64 = 1e-14;

/// Allowed negative eigenvalue of a diffusion matrix.
pub const DIFFUSION_PSD_TOL: f64 = 1e-12;

/// Below this `ΩT` the sine/cosine sideband modes are flagged as not
/// independent.
pub const LARMOR_ADVISORY_OMEGA_T: f64 = 50.0;

/// Below this `|Δ|/γ` the adiabatic elimination of an excited level is flagged.
pub const DETUNING_ADVISORY_RATIO: f64 = 10.0;

/// Fock-space leak above which a truncated state is flagged.
pub const FOCK_LEAK_WARNING: f64 = 1e-3;

/// Default photon-number cutoff per mode for the Fock oracle.
pub const FOCK_DEFAULT_CUTOFF: usize = 30;

/// Largest dense density matrix the Fock oracle will allocate (basis states).
/// A density matrix of dimension `D` needs `16·D²` bytes, so 4000 states is
/// about 256 MB.
pub const FOCK_MAX_DIM: usize = 4000;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Gyromagnetic ratio of the Cs 6S₁/₂ F=4 manifold, `g_F μ_B/ħ`, in rad/(s·T)
/// (`g_F = 1/4`, 350 kHz/G).
pub const CS_F4_GYROMAGNETIC: f64 = 2.0 * std::f64::consts::PI * 3.5e9;

/// Cs D₂ wavelength in metres.
pub const CS_D2_WAVELENGTH: f64 = 852.347_27e-9;

/// Dissipator rate attached to each ideal jump operator for swap rate `γ_s`.
pub fn dissipator_rate(gamma_s: f64) -> f64 {
    2.0 * gamma_s
}

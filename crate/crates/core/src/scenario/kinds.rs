//! Scenario kinds and what each one computes.

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{violation_from, Row, ScenarioError, Violation};
use crate::constants::{FOCK_DEFAULT_CUTOFF, FOCK_MAX_DIM};
use crate::dissipative::phenomenology::{Phenomenology, PopulationRates};
use crate::dissipative::{
    entanglement_report, evolve, ideal_model_for_z, ideal_model_unchecked, is_unique, jump_expectation,
    steady_state, LindbladModel, NoiseKind, ENSEMBLE_I, ENSEMBLE_II,
};
use crate::fock::{
    dark_state, evolve_lindblad, from_gaussian, lindblad_residual, model_jumps, FockState, StepControl,
};
use crate::gaussian::{ensure_physical, epr_variance, GaussianState, ModeId, Quadrature, SymplecticMap};
use crate::levels::{cesium_d2_tables, z_from_scheme, DrivePolarization, LevelScheme};
use crate::linalg::symplectic_defect;
use crate::maps::{
    epr_basis, long_time_limit, mu_nu, nonqnd_single_cell, nonqnd_two_cell, qnd_limit_error, qnd_single_pass,
    qnd_two_cell, quarter_turn, reading_mode_transform, InteractionParams, SingleCellModes, TwoCellModes,
};
use crate::protocols::memory::{pre_probe_kappa_for, InputState};
use crate::protocols::{
    analytic_eta_star, entanglement_assisted_snr, heisenberg_scan, hybrid_epr, magnetometry_run,
    memory_closed_form, memory_fidelity_report, memory_store, optimize_eta, optomech_kappa,
    spin_squeezing_xi, InputSet, MagnetometryConfig, MemoryConfig, OptomechParams, SqueezingBudget,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    ZParameter(ZParams),
    DissipativeSteadyState(SteadyParams),
    DissipativeTimecourse(TimecourseParams),
    Memory(MemoryParams),
    Magnetometry(MagnetometryParams),
    SqueezingScan(SqueezingParams),
    HybridOptomech(HybridParams),
    MapCheck(MapCheckParams),
    FockOracle(FockOracleParams),
}

/// What one cell produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CellOutput {
    pub rows: Vec<Row>,
    pub advisories: Vec<String>,
}

pub struct RunContext<'a> {
    pub base_dir: Option<&'a Path>,
    pub rng: Option<&'a mut ChaCha8Rng>,
}

fn row(v: Value) -> Row {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("rows are built from object literals"),
    }
}

fn one(v: Value) -> CellOutput {
    CellOutput {
        rows: vec![row(v)],
        advisories: Vec::new(),
    }
}

fn need_rng<'a>(ctx: &'a mut RunContext<'_>) -> Result<&'a mut ChaCha8Rng, ScenarioError> {
    ctx.rng
        .as_deref_mut()
        .ok_or_else(|| ScenarioError::Runtime("stochastic scenario run without a seed".into()))
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::ZParameter(_) => "z_parameter",
            Scenario::DissipativeSteadyState(_) => "dissipative_steady_state",
            Scenario::DissipativeTimecourse(_) => "dissipative_timecourse",
            Scenario::Memory(_) => "memory",
            Scenario::Magnetometry(_) => "magnetometry",
            Scenario::SqueezingScan(_) => "squeezing_scan",
            Scenario::HybridOptomech(_) => "hybrid_optomech",
            Scenario::MapCheck(_) => "map_check",
            Scenario::FockOracle(_) => "fock_oracle",
        }
    }

    /// Whether the cell draws random numbers (and therefore needs a seed).
    pub fn is_stochastic(&self) -> bool {
        match self {
            Scenario::Memory(p) => p.random_inputs > 0,
            Scenario::MapCheck(_) => true,
            _ => false,
        }
    }

    /// Physics preconditions; an empty list means the cell can run.
    pub fn check(&self, base_dir: Option<&Path>) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |r: crate::Result<()>| {
            if let Err(e) = r {
                out.push(violation_from("scenario", e));
            }
        };
        match self {
            Scenario::ZParameter(p) => push(p.scheme(base_dir).map(|_| ())),
            Scenario::DissipativeSteadyState(p) => {
                push(p.model().map(|_| ()));
                if let Some(c) = p.fock_cutoff {
                    push(check_cutoff(c));
                    if !p.noise.is_empty() || p.mu_equals_nu || p.gamma_s == 0.0 {
                        push(Err(crate::error::invalid(
                            "fock_cutoff",
                            "the dark-state oracle needs the ideal model",
                        )));
                    }
                }
            }
            Scenario::DissipativeTimecourse(p) => {
                push(Phenomenology::new(p.z, p.rates, p.readout_kappa).map(|_| ()));
                push(positive("t_max", p.t_max));
                if p.points < 2 {
                    push(Err(crate::error::invalid("points", "need at least 2")));
                }
            }
            Scenario::Memory(p) => push(p.config().map(|_| ())),
            Scenario::Magnetometry(p) => {
                push(p.sensor.validate());
                if !(p.pre_probe_kappa >= 0.0) {
                    push(Err(crate::error::invalid(
                        "pre_probe_kappa",
                        "must be non-negative",
                    )));
                }
                if p.squeezing_lifetime.is_some_and(|l| !(l > 0.0)) {
                    push(Err(crate::error::invalid(
                        "squeezing_lifetime",
                        "must be positive",
                    )));
                }
                if p.taus.iter().any(|t| !(*t > 0.0)) {
                    push(Err(crate::error::invalid("taus", "must all be positive")));
                }
            }
            Scenario::SqueezingScan(p) => {
                if let Some(eta) = p.eta {
                    push(SqueezingBudget::new(p.d_reference, eta, p.a).map(|_| ()));
                }
                push(optimize_eta(p.d_reference, p.a).map(|_| ()));
                push(positive("d_per_atom", p.d_per_atom));
                push(positive("n_min", p.n_min));
                if !(p.n_max > p.n_min) || p.points < 2 {
                    push(Err(crate::error::invalid(
                        "n_max",
                        "need n_max > n_min and at least 2 points",
                    )));
                }
            }
            Scenario::HybridOptomech(p) => {
                push(p.optomech.validate());
                if p.n_bar.is_some_and(|n| !(n >= 0.0)) {
                    push(Err(crate::error::invalid("n_bar", "must be non-negative")));
                }
                if !(p.kappa >= 0.0 && p.kappa.is_finite()) {
                    push(Err(crate::error::invalid("kappa", "must be non-negative")));
                }
            }
            Scenario::MapCheck(p) => {
                if p.draws == 0 {
                    push(Err(crate::error::invalid("draws", "need at least one draw")));
                }
                push(positive("kappa", p.kappa));
                if !(p.z_qnd > p.kappa) {
                    push(Err(crate::error::invalid("z_qnd", "must exceed kappa")));
                }
            }
            Scenario::FockOracle(p) => {
                push(p.model().map(|_| ()));
                push(check_cutoff(p.cutoff));
                push(positive("t", p.t));
            }
        }
        out
    }

    pub fn execute(&self, mut ctx: RunContext<'_>) -> Result<CellOutput, ScenarioError> {
        match self {
            Scenario::ZParameter(p) => p.run(ctx.base_dir),
            Scenario::DissipativeSteadyState(p) => p.run(),
            Scenario::DissipativeTimecourse(p) => p.run(),
            Scenario::Memory(p) => {
                let rng = if p.random_inputs > 0 {
                    Some(need_rng(&mut ctx)?)
                } else {
                    None
                };
                p.run(rng)
            }
            Scenario::Magnetometry(p) => p.run(),
            Scenario::SqueezingScan(p) => p.run(),
            Scenario::HybridOptomech(p) => p.run(),
            Scenario::MapCheck(p) => p.run(need_rng(&mut ctx)?),
            Scenario::FockOracle(p) => p.run(),
        }
    }
}

fn positive(name: &'static str, v: f64) -> crate::Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(crate::error::invalid(name, format!("must be positive, got {v}")))
    }
}

fn check_cutoff(cutoff: usize) -> crate::Result<()> {
    let dim = (cutoff + 1).pow(2);
    if cutoff == 0 || dim > FOCK_MAX_DIM {
        return Err(crate::error::invalid(
            "cutoff",
            format!("two modes at cutoff {cutoff} need {dim} basis states (limit {FOCK_MAX_DIM})"),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZParams {
    /// Detuning above `F' = 5` (MHz).
    pub detuning_mhz: f64,
    pub polarization: DrivePolarization,
    /// A level-scheme file to use instead of the built-in Cs D2 tables.
    pub scheme_file: Option<PathBuf>,
}

impl Default for ZParams {
    fn default() -> Self {
        Self {
            detuning_mhz: 850.0,
            polarization: DrivePolarization::Y,
            scheme_file: None,
        }
    }
}

impl ZParams {
    fn scheme(&self, base_dir: Option<&Path>) -> crate::Result<LevelScheme> {
        match &self.scheme_file {
            Some(f) => {
                let path = match base_dir {
                    Some(b) if f.is_relative() => b.join(f),
                    _ => f.clone(),
                };
                LevelScheme::load(&path)
            }
            None => cesium_d2_tables(self.detuning_mhz * 1e6, self.polarization),
        }
    }

    fn run(&self, base_dir: Option<&Path>) -> Result<CellOutput, ScenarioError> {
        let scheme = self.scheme(base_dir)?;
        let r = z_from_scheme(&scheme)?;
        let mut out = one(json!({
            "scheme": scheme.name,
            "gamma_up_down": r.gamma_up_down,
            "gamma_down_up": r.gamma_down_up,
            "r": r.r,
            "z": r.z,
            "mu": r.mu,
            "nu": r.nu,
            "regime": r.regime,
        }));
        out.advisories = scheme.advisories();
        Ok(out)
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub rate: f64,
}

fn with_noise(mut model: LindbladModel, noise: &[NoiseSpec]) -> crate::Result<LindbladModel> {
    for n in noise {
        model = model.add_noise_channel(n.kind, n.rate)?;
    }
    Ok(model)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteadyParams {
    pub z: f64,
    pub gamma_s: f64,
    /// Replace the jumps by the balanced `μ = ν` surrogate of the QND case.
    pub mu_equals_nu: bool,
    pub noise: Vec<NoiseSpec>,
    /// Cross-check against the dark state of the truncated Fock model.
    pub fock_cutoff: Option<usize>,
}

impl Default for SteadyParams {
    fn default() -> Self {
        Self {
            z: 2.5,
            gamma_s: 1.0,
            mu_equals_nu: false,
            noise: Vec::new(),
            fock_cutoff: None,
        }
    }
}

impl SteadyParams {
    fn model(&self) -> crate::Result<LindbladModel> {
        positive("z", self.z)?;
        if !(self.gamma_s >= 0.0 && self.gamma_s.is_finite()) {
            return Err(crate::error::invalid("gamma_s", "must be non-negative"));
        }
        // Degenerate surrogates are built unchecked so that the uniqueness
        // report can say why they fail.
        let (mu, nu) = mu_nu(self.z);
        let base = if self.mu_equals_nu {
            ideal_model_unchecked(mu, mu, self.gamma_s)?
        } else if self.gamma_s == 0.0 {
            ideal_model_unchecked(mu, nu, 0.0)?
        } else {
            ideal_model_for_z(self.z, self.gamma_s)?
        };
        with_noise(base, &self.noise)
    }

    fn run(&self) -> Result<CellOutput, ScenarioError> {
        let model = self.model()?;
        let u = is_unique(&model);
        let mut r = row(json!({
            "unique": u.unique,
            "max_real_part": u.max_real_part,
        }));
        if !u.unique {
            return Ok(CellOutput {
                rows: vec![r],
                advisories: vec!["no unique steady state; nothing further computed".into()],
            });
        }
        let ss = steady_state(&model)?;
        let phys = ensure_physical(&ss)?;
        let ent = entanglement_report(&ss, ENSEMBLE_I, ENSEMBLE_II)?;
        r.insert("epr_variance".into(), json!(ent.epr_variance));
        r.insert("entangled".into(), json!(ent.entangled));
        r.insert("physicality_margin".into(), json!(phys.margin));
        let dark: f64 = model
            .jumps()
            .iter()
            .map(|j| jump_expectation(&model, &ss, j))
            .collect::<crate::Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, |m, v| m.max(v.abs()));
        r.insert("max_jump_occupation".into(), json!(dark));
        if self.noise.is_empty() && !self.mu_equals_nu {
            // Two-mode squeezed vacuum with e^{-2r} = 1/Z².
            let closed = 1.0 / (self.z * self.z);
            r.insert("closed_form".into(), json!(closed));
            r.insert(
                "relative_error".into(),
                json!((ent.epr_variance - closed).abs() / closed),
            );
        }
        if let Some(cutoff) = self.fock_cutoff {
            let template = FockState::vacuum(model.modes().to_vec(), cutoff)?;
            let jumps = model_jumps(&model, &template)?;
            let (fock, eigenvalue) = dark_state(&template, &jumps)?;
            let f_epr = epr_variance(&fock.to_gaussian()?, ENSEMBLE_I, ENSEMBLE_II)?;
            r.insert("fock_cutoff".into(), json!(cutoff));
            r.insert("fock_epr_variance".into(), json!(f_epr));
            r.insert("oracle_delta".into(), json!((f_epr - ent.epr_variance).abs()));
            r.insert("fock_dark_eigenvalue".into(), json!(eigenvalue));
            r.insert(
                "fock_residual".into(),
                json!(lindblad_residual(&fock, &jumps, None)?),
            );
            r.insert("fock_leak".into(), json!(fock.leaked()));
        }
        Ok(CellOutput {
            rows: vec![r],
            advisories: Vec::new(),
        })
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimecourseParams {
    pub z: f64,
    pub rates: PopulationRates,
    pub readout_kappa: f64,
    /// In units of `1/γ_s`.
    pub t_max: f64,
    pub points: usize,
    /// Append the long-time row when the populations have a stationary state.
    pub include_steady: bool,
}

impl Default for TimecourseParams {
    fn default() -> Self {
        Self {
            z: 2.5,
            rates: PopulationRates::default(),
            readout_kappa: 1.0,
            t_max: 10.0,
            points: 21,
            include_steady: true,
        }
    }
}

impl TimecourseParams {
    fn run(&self) -> Result<CellOutput, ScenarioError> {
        let ph = Phenomenology::new(self.z, self.rates, self.readout_kappa)?;
        let times: Vec<f64> = (0..self.points)
            .map(|i| self.t_max * i as f64 / (self.points - 1) as f64)
            .collect();
        let mut snaps = ph.timecourse(&times)?;
        if self.include_steady && self.rates.pump > 0.0 && self.rates.repump > 0.0 {
            snaps.push(ph.steady()?);
        }
        let rows = snaps
            .iter()
            .map(|s| {
                row(json!({
                    "t": if s.t.is_finite() { json!(s.t) } else { json!("steady") },
                    "oriented": s.populations.oriented,
                    "other_f4": s.populations.other_f4,
                    "f3": s.populations.f3,
                    "epr_unconditioned": s.epr_unconditioned,
                    "epr_conditioned": s.epr_conditioned,
                    "entangled_unconditioned": s.entangled_unconditioned,
                    "entangled_conditioned": s.entangled_conditioned,
                }))
            })
            .collect();
        Ok(CellOutput {
            rows,
            advisories: Vec::new(),
        })
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MemoryParams {
    pub z: f64,
    pub kappa: f64,
    /// Larmor phase `ΩT` accumulated over the pulse.
    pub omega_t: f64,
    pub gain: f64,
    pub classical_benchmark: Option<f64>,
    /// Fractional reduction of the atomic `x` variance by a conditioning
    /// probe before storage.
    pub pre_squeezing: f64,
    pub inputs: InputSet,
    /// Random physical input states on which the pipeline is compared with
    /// the closed-form channel.
    pub random_inputs: usize,
}

impl Default for MemoryParams {
    fn default() -> Self {
        Self {
            z: 2.5,
            kappa: 1.0,
            omega_t: 1e3,
            gain: 1.0,
            classical_benchmark: None,
            pre_squeezing: 0.0,
            inputs: InputSet::default(),
            random_inputs: 0,
        }
    }
}

impl MemoryParams {
    fn config(&self) -> crate::Result<MemoryConfig> {
        let cfg = MemoryConfig {
            interaction: InteractionParams::from_kappa(self.z, self.kappa, self.omega_t)?,
            gain: self.gain,
            inputs: self.inputs.clone(),
            classical_benchmark: self.classical_benchmark,
            pre_probe_kappa: pre_probe_kappa_for(self.pre_squeezing)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn run(&self, rng: Option<&mut ChaCha8Rng>) -> Result<CellOutput, ScenarioError> {
        let cfg = self.config()?;
        let modes = TwoCellModes::standard();
        let vacuum = InputState {
            x: 0.0,
            p: 0.0,
            squeezing_db: 0.0,
            phase: 0.0,
        }
        .light_state(&modes)?;
        let stored = memory_store(&cfg, &vacuum)?;
        ensure_physical(&stored)?;
        let report = memory_fidelity_report(&cfg)?;
        let mut r = row(json!({
            "kappa": cfg.kappa(),
            "gamma_t": cfg.interaction.gamma_t(),
            "var_x_fin_vacuum": stored.quadrature_variance("A_cos", Quadrature::X)?,
            "var_p_fin_vacuum": stored.quadrature_variance("A_cos", Quadrature::P)?,
            "n_inputs": report.n_inputs,
            "mean_fidelity": report.mean_fidelity,
            "min_fidelity": report.min_fidelity,
            "max_fidelity": report.max_fidelity,
            "classical_benchmark": report.classical_benchmark,
            "beats_benchmark": report.beats_benchmark,
        }));
        if let Some(rng) = rng {
            let light = [modes.cos.light_in.clone(), modes.sin.light_in.clone()];
            let mut worst = 0.0f64;
            for _ in 0..self.random_inputs {
                let input = random_state(rng, &light)?;
                let a = memory_store(&cfg, &input)?;
                let b = memory_closed_form(&cfg, &input)?;
                worst = worst
                    .max((a.cov() - b.cov()).amax())
                    .max((a.mean() - b.mean()).amax());
            }
            r.insert("random_inputs".into(), json!(self.random_inputs));
            r.insert("closed_form_delta".into(), json!(worst));
        }
        Ok(CellOutput {
            rows: vec![r],
            advisories: cfg.interaction.advisories(),
        })
    }
}

/// A random physical Gaussian state: thermal occupations in `[0, 1)`,
/// a symplectic from a random quadratic generator, and a random mean.
pub fn random_state(rng: &mut ChaCha8Rng, modes: &[ModeId]) -> crate::Result<GaussianState> {
    let n = modes.len();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut h = DMatrix::from_fn(2 * n, 2 * n, |_, _| 0.5 * normal.sample(rng));
    h = (&h + h.transpose()) * 0.5;
    let s = SymplecticMap::from_generator(&h, modes.to_vec(), modes.to_vec())?;
    let nu: Vec<f64> = (0..n).map(|_| 0.5 + rng.random::<f64>()).collect();
    let diag = DMatrix::from_fn(2 * n, 2 * n, |i, j| if i == j { nu[i / 2] } else { 0.0 });
    let mut cov = s.matrix() * diag * s.matrix().transpose();
    crate::linalg::symmetrize(&mut cov);
    let mean = DVector::from_fn(2 * n, |_, _| normal.sample(rng));
    GaussianState::new(modes.to_vec(), mean, cov)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MagnetometryParams {
    pub sensor: MagnetometryConfig,
    pub pre_probe_kappa: f64,
    pub squeezing_lifetime: Option<f64>,
    /// Pulse lengths for the conditioned-vs-coherent SNR curve (s).
    pub taus: Vec<f64>,
}

impl Default for MagnetometryParams {
    fn default() -> Self {
        Self {
            sensor: MagnetometryConfig::default(),
            pre_probe_kappa: 0.0,
            squeezing_lifetime: None,
            taus: Vec::new(),
        }
    }
}

impl MagnetometryParams {
    fn run(&self) -> Result<CellOutput, ScenarioError> {
        let m = magnetometry_run(&self.sensor)?;
        let base = json!({
            "j_x": m.j_x,
            "mean_displacement": m.mean_displacement,
            "pn_variance": m.pn_variance,
            "shot_noise_variance": m.shot_noise_variance,
            "total_variance": m.total_variance,
            "snr": m.snr,
            "min_field": m.min_field,
            "sensitivity": m.sensitivity,
        });
        let rows = if self.taus.is_empty() {
            vec![row(base)]
        } else {
            entanglement_assisted_snr(
                &self.sensor,
                self.pre_probe_kappa,
                self.squeezing_lifetime,
                &self.taus,
            )?
            .into_iter()
            .map(|p| {
                let mut r = row(base.clone());
                r.insert("tau".into(), json!(p.tau));
                r.insert("snr_coherent".into(), json!(p.snr_coherent));
                r.insert("snr_conditioned".into(), json!(p.snr_conditioned));
                r.insert("snr_ratio".into(), json!(p.ratio));
                r
            })
            .collect()
        };
        Ok(CellOutput {
            rows,
            advisories: self.sensor.advisories(),
        })
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SqueezingParams {
    pub a: f64,
    /// Optical depth at which the single-point optimum is reported.
    pub d_reference: f64,
    /// If set, `ξ` is also evaluated at this `η` and `d_reference`.
    pub eta: Option<f64>,
    /// Optical depth per atom in the scan, `d = d_per_atom·N`.
    pub d_per_atom: f64,
    pub n_min: f64,
    pub n_max: f64,
    pub points: usize,
}

impl Default for SqueezingParams {
    fn default() -> Self {
        Self {
            a: 0.0,
            d_reference: 100.0,
            eta: None,
            d_per_atom: 0.1,
            n_min: 1e3,
            n_max: 1e7,
            points: 9,
        }
    }
}

impl SqueezingParams {
    fn run(&self) -> Result<CellOutput, ScenarioError> {
        let opt = optimize_eta(self.d_reference, self.a)?;
        let ratio = (self.n_max / self.n_min).ln();
        let n: Vec<f64> = (0..self.points)
            .map(|i| self.n_min * (ratio * i as f64 / (self.points - 1) as f64).exp())
            .collect();
        let k = self.d_per_atom;
        let scan = heisenberg_scan(|n| k * n, self.a, &n)?;
        let xi_at_eta = match self.eta {
            Some(eta) => json!(spin_squeezing_xi(&SqueezingBudget::new(
                self.d_reference,
                eta,
                self.a
            )?)?),
            None => Value::Null,
        };
        let rows = scan
            .rows
            .iter()
            .map(|s| {
                row(json!({
                    "n_atoms": s.n_atoms,
                    "d": s.d,
                    "eta_star": s.eta_star,
                    "xi_min": s.xi_min,
                    "angular_precision": s.angular_precision,
                    "xi_times_n": s.xi_times_n,
                    "slope": scan.slope,
                    "slope_coherent": scan.slope_coherent,
                    "slope_if_xi_root_n": scan.slope_if_xi_root_n,
                    "reference_eta_star": opt.eta_star,
                    "reference_xi_min": opt.xi_min,
                    "reference_eta_analytic": if self.a == 0.0 { json!(analytic_eta_star(self.d_reference)) } else { Value::Null },
                    "xi_at_eta": xi_at_eta,
                }))
            })
            .collect();
        Ok(CellOutput {
            rows,
            advisories: Vec::new(),
        })
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HybridParams {
    /// Thermal occupation; taken from `optomech` when absent.
    pub n_bar: Option<f64>,
    pub kappa: f64,
    pub optomech: OptomechParams,
}

impl Default for HybridParams {
    fn default() -> Self {
        Self {
            n_bar: None,
            kappa: 1.0,
            optomech: OptomechParams::desk_preset(),
        }
    }
}

impl HybridParams {
    fn run(&self) -> Result<CellOutput, ScenarioError> {
        let n_bar = self.n_bar.unwrap_or_else(|| self.optomech.n_bar());
        let h = hybrid_epr(n_bar, self.kappa)?;
        Ok(one(json!({
            "kappa_om": optomech_kappa(&self.optomech)?,
            "x_zpf": self.optomech.x_zpf(),
            "n_bar": h.n_bar,
            "kappa": h.kappa,
            "closed_form": h.closed_form,
            "pipeline": h.pipeline,
            "joint": h.joint,
            "delta": (h.pipeline - h.closed_form).abs(),
            "entangled": h.entangled,
        })))
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapCheckParams {
    pub draws: usize,
    /// Asymmetry at which the non-QND map is compared with the QND map.
    pub z_qnd: f64,
    pub kappa: f64,
}

impl Default for MapCheckParams {
    fn default() -> Self {
        Self {
            draws: 1000,
            z_qnd: 1e3,
            kappa: 1.0,
        }
    }
}

impl MapCheckParams {
    fn run(&self, rng: &mut ChaCha8Rng) -> Result<CellOutput, ScenarioError> {
        let names = [
            "qnd_single_pass",
            "qnd_two_cell",
            "nonqnd_two_cell",
            "long_time_limit",
            "nonqnd_single_cell",
            "reading_mode_transform",
            "epr_basis",
            "quarter_turn",
        ];
        let mut worst = [0.0f64; 8];
        let two = TwoCellModes::standard();
        let single = SingleCellModes::default();
        for _ in 0..self.draws {
            let z = 10f64.powf(rng.random_range(-1.5..1.5));
            let gt = rng.random_range(0.0..4.0);
            let kappa = rng.random_range(0.0..5.0);
            let omega = rng.random_range(-1e3..1e3);
            let p = InteractionParams::new(z, gt, 1.0, omega)?;
            let a = ModeId::atomic("A");
            let l = ModeId::atomic("L");
            let mats = [
                qnd_single_pass(kappa, a.clone(), l.clone())?.matrix().clone(),
                qnd_two_cell(kappa, &two)?.matrix().clone(),
                nonqnd_two_cell(&p, &two)?.matrix().clone(),
                long_time_limit(z, &two)?.matrix().clone(),
                nonqnd_single_cell(&p, &single)?.matrix().clone(),
                reading_mode_transform(z),
                epr_basis(a, l, ModeId::atomic("c"), ModeId::atomic("s"))?
                    .matrix()
                    .clone(),
                quarter_turn(4),
            ];
            for (w, m) in worst.iter_mut().zip(&mats) {
                *w = w.max(symplectic_defect(m));
            }
        }
        let mut rows: Vec<Row> = names
            .iter()
            .zip(worst)
            .map(|(n, d)| row(json!({ "map": n, "draws": self.draws, "max_symplectic_defect": d })))
            .collect();
        rows.push(row(json!({
            "map": "qnd_limit",
            "z": self.z_qnd,
            "kappa": self.kappa,
            "qnd_limit_error": qnd_limit_error(self.z_qnd, self.kappa)?,
        })));
        Ok(CellOutput {
            rows,
            advisories: Vec::new(),
        })
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FockOracleParams {
    pub z: f64,
    pub gamma_s: f64,
    pub noise: Vec<NoiseSpec>,
    /// Evolution time in units of `1/γ_s`.
    pub t: f64,
    pub cutoff: usize,
    /// Coherent displacement of ensemble I's `x` in the initial state.
    pub initial_x: f64,
}

impl Default for FockOracleParams {
    fn default() -> Self {
        Self {
            z: 1.5,
            gamma_s: 1.0,
            noise: Vec::new(),
            t: 0.5,
            cutoff: FOCK_DEFAULT_CUTOFF,
            initial_x: 0.0,
        }
    }
}

impl FockOracleParams {
    fn model(&self) -> crate::Result<LindbladModel> {
        with_noise(ideal_model_for_z(self.z, self.gamma_s)?, &self.noise)
    }

    fn run(&self) -> Result<CellOutput, ScenarioError> {
        let model = self.model()?;
        let start =
            GaussianState::vacuum(model.modes().to_vec())?.displace(ENSEMBLE_I, self.initial_x, 0.0)?;
        let gauss = evolve(&model, &start, self.t)?;
        let fock0 = from_gaussian(&start, self.cutoff)?;
        let jumps = model_jumps(&model, &fock0)?;
        let fock = evolve_lindblad(&fock0, &jumps, None, self.t, StepControl::default())?;
        let check = fock.validate();
        if !check.ok() {
            return Err(ScenarioError::Runtime(format!(
                "Fock state lost physicality (min eigenvalue {:.3e})",
                check.min_eigenvalue
            )));
        }
        let (mean, cov) = fock.moments();
        let order: Vec<&str> = fock.modes().iter().map(|m| m.label.as_str()).collect();
        let g = gauss.reorder(&order)?;
        let (mu, nu) = mu_nu(self.z);
        let mut out = one(json!({
            "nu_over_mu": nu / mu,
            "cutoff": self.cutoff,
            "cov_delta": (&cov - g.cov()).amax(),
            "mean_delta": (&mean - g.mean()).amax(),
            "epr_gaussian": epr_variance(&g, ENSEMBLE_I, ENSEMBLE_II)?,
            "trace_error": check.trace_error,
            "min_eigenvalue": check.min_eigenvalue,
            "leak": fock.leaked(),
        }));
        if fock.leak_warning() {
            out.advisories
                .push(format!("Fock truncation leak {:.2e}", fock.leaked()));
        }
        Ok(out)
    }
}

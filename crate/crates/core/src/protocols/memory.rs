//! Light-to-atoms memory: one non-QND pass, homodyne detection of the
//! outgoing `x_L` in each sector, and feedback of the result onto `p_A`.
//!
//! In one sector with `t = e^{-γ_s T}` and `κ = √(1 - t²)·Z`, the pass gives
//! `x_L' = t x_L + κ p_A` and `p_A' = t p_A - (κ/Z²) x_L`. Feeding back
//! `p_A' - c·x_L'` with `c = g·t/κ` cancels `p_A` at `g = 1` and leaves
//!
//! `x_fin = t x_A + κ p_L`, `p_fin = -x_L/κ`,
//!
//! which at `κ = 1` stores the light state rotated by a quarter turn, with the
//! atomic `x` noise added on top.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::gaussian::{
    fidelity, homodyne_condition, homodyne_feedback, Feedback, GaussianState, ModeId, Outcome, Quadrature,
    SymplecticMap,
};
use crate::maps::{nonqnd_two_cell, qnd_single_pass, InteractionParams, SectorModes, TwoCellModes};

/// Square grid of displaced squeezed inputs, the same state in both sectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputSet {
    /// Displacements run over `[-max, max]` in both `x` and `p`.
    pub max_displacement: f64,
    /// Points per axis.
    pub grid: usize,
    pub squeezing_db: f64,
    /// Squeezing angles from `x` (rad).
    pub phases: Vec<f64>,
}

impl Default for InputSet {
    fn default() -> Self {
        Self {
            max_displacement: 3.8,
            grid: 9,
            squeezing_db: 6.0,
            phases: vec![0.0, std::f64::consts::FRAC_PI_2],
        }
    }
}

/// One displaced squeezed state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputState {
    pub x: f64,
    pub p: f64,
    pub squeezing_db: f64,
    pub phase: f64,
}

/// Squeezing parameter `r` for a variance reduction of `db` decibels.
pub fn db_to_r(db: f64) -> f64 {
    db * std::f64::consts::LN_10 / 20.0
}

impl InputState {
    pub fn single_mode(&self, mode: ModeId) -> Result<GaussianState> {
        GaussianState::squeezed(mode, db_to_r(self.squeezing_db), self.phase, self.x, self.p)
    }

    /// The state on both incoming light modes.
    pub fn light_state(&self, modes: &TwoCellModes) -> Result<GaussianState> {
        self.single_mode(modes.cos.light_in.clone())?
            .tensor(&self.single_mode(modes.sin.light_in.clone())?)
    }
}

impl InputSet {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_displacement >= 0.0 && self.max_displacement.is_finite()) {
            return Err(invalid("max_displacement", "must be non-negative"));
        }
        if self.grid == 0 {
            return Err(invalid("grid", "needs at least one point per axis"));
        }
        if self.phases.is_empty() {
            return Err(invalid("phases", "needs at least one squeezing phase"));
        }
        if !(self.squeezing_db >= 0.0 && self.squeezing_db.is_finite()) {
            return Err(invalid("squeezing_db", "must be non-negative"));
        }
        Ok(())
    }

    pub fn states(&self) -> Vec<InputState> {
        let axis: Vec<f64> = if self.grid == 1 {
            vec![0.0]
        } else {
            let step = 2.0 * self.max_displacement / (self.grid - 1) as f64;
            (0..self.grid)
                .map(|i| -self.max_displacement + step * i as f64)
                .collect()
        };
        let mut out = Vec::with_capacity(axis.len() * axis.len() * self.phases.len());
        for &phase in &self.phases {
            for &x in &axis {
                for &p in &axis {
                    out.push(InputState {
                        x,
                        p,
                        squeezing_db: self.squeezing_db,
                        phase,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryConfig {
    pub interaction: InteractionParams,
    #[serde(default = "unit_gain")]
    pub gain: f64,
    #[serde(default)]
    pub inputs: InputSet,
    /// Best mean fidelity reachable by a measure-and-prepare strategy on the
    /// same input set; supplied externally.
    #[serde(default)]
    pub classical_benchmark: Option<f64>,
    /// Strength of a QND probe that conditionally squeezes the atomic `x`
    /// before storage; 0 stores into the coherent spin state.
    #[serde(default)]
    pub pre_probe_kappa: f64,
}

fn unit_gain() -> f64 {
    1.0
}

impl MemoryConfig {
    /// Config reaching coupling `κ` at asymmetry `Z` with the default input
    /// set.
    pub fn for_kappa(z: f64, kappa: f64, gain: f64, classical_benchmark: Option<f64>) -> Result<Self> {
        let cfg = Self {
            interaction: InteractionParams::from_kappa(z, kappa, 0.0)?,
            gain,
            inputs: InputSet::default(),
            classical_benchmark,
            pre_probe_kappa: 0.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.interaction.validate()?;
        if !(self.kappa() > 0.0) {
            return Err(invalid("kappa", "memory needs a nonzero coupling"));
        }
        if !(self.gain >= 0.0 && self.gain.is_finite()) {
            return Err(invalid(
                "gain",
                format!("must be non-negative, got {}", self.gain),
            ));
        }
        if let Some(b) = self.classical_benchmark {
            if !(0.0..=1.0).contains(&b) {
                return Err(invalid("classical_benchmark", "must lie in [0, 1]"));
            }
        }
        if !(self.pre_probe_kappa >= 0.0 && self.pre_probe_kappa.is_finite()) {
            return Err(invalid("pre_probe_kappa", "must be non-negative"));
        }
        self.inputs.validate()
    }

    pub fn kappa(&self) -> f64 {
        self.interaction.coupling().kappa
    }

    /// Feedback coefficient `c` applied as `p_A -= c·x_L'`.
    pub fn feedback_coefficient(&self) -> f64 {
        self.gain * (-self.interaction.gamma_t()).exp() / self.kappa()
    }
}

/// Pre-probe strength whose conditioning reduces the atomic variance by the
/// fraction `reduction` (0.14 for a 14 % reduction).
pub fn pre_probe_kappa_for(reduction: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&reduction) {
        return Err(invalid("reduction", "must lie in [0, 1)"));
    }
    Ok((1.0 / (1.0 - reduction) - 1.0).sqrt())
}

/// Atomic input of one sector: vacuum, or conditionally squeezed in `x` by a
/// QND probe of strength `kappa` whose `x` outcome is known (and taken as 0).
fn atomic_input(atom: &ModeId, kappa: f64) -> Result<GaussianState> {
    let vac = GaussianState::vacuum(vec![atom.clone()])?;
    if kappa == 0.0 {
        return Ok(vac);
    }
    let probe = ModeId::new("probe", crate::gaussian::ModeKind::LightCos);
    let joint = vac.tensor(&GaussianState::vacuum(vec![probe.clone()])?)?;
    let after = joint.apply_map(&qnd_single_pass(kappa, atom.clone(), probe.clone())?)?;
    let (cond, _) = homodyne_condition(&after, &probe.label, Quadrature::X, Outcome::Value(0.0))?;
    // The probe squeezes p; a quarter turn moves the squeezing onto x.
    cond.apply_map(&quarter_turn(atom.clone(), atom.clone())?)
}

/// `(x, p) ↦ (p, -x)` from `input` to `output`.
fn quarter_turn(input: ModeId, output: ModeId) -> Result<SymplecticMap> {
    SymplecticMap::new(
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
        DVector::zeros(2),
        vec![input],
        vec![output],
    )
}

fn atoms_and_light(
    config: &MemoryConfig,
    modes: &TwoCellModes,
    light: &GaussianState,
) -> Result<GaussianState> {
    let atoms = atomic_input(&modes.cos.atom, config.pre_probe_kappa)?
        .tensor(&atomic_input(&modes.sin.atom, config.pre_probe_kappa)?)?;
    atoms.tensor(&light.reorder(&[&modes.cos.light_in.label, &modes.sin.light_in.label])?)
}

/// Runs the memory on `input_light` (a state of `L_cos`, `L_sin`) and returns
/// the final atomic state of `A_cos`, `A_sin`, averaged over outcomes.
pub fn memory_store(config: &MemoryConfig, input_light: &GaussianState) -> Result<GaussianState> {
    config.validate()?;
    let modes = TwoCellModes::standard();
    let state = atoms_and_light(config, &modes, input_light)?;
    let after = state.apply_map(&nonqnd_two_cell(&config.interaction, &modes)?)?;
    let c = config.feedback_coefficient();
    let mut out = after;
    for sector in [&modes.cos, &modes.sin] {
        out = homodyne_feedback(
            &out,
            &sector.light_out.label,
            Quadrature::X,
            &[Feedback::new(sector.atom.label.clone(), Quadrature::P, -c)],
        )?;
    }
    out.reorder(&[&modes.cos.atom.label, &modes.sin.atom.label])
}

/// The same channel written as one linear map of `(x_A, p_A, x_L, p_L)` per
/// sector onto `(x_fin, p_fin)`:
///
/// `x_fin = t x_A + κ p_L`, `p_fin = t(1-g) p_A - (κ/Z² + g t²/κ) x_L`.
pub fn memory_closed_form(config: &MemoryConfig, input_light: &GaussianState) -> Result<GaussianState> {
    config.validate()?;
    let modes = TwoCellModes::standard();
    let state = atoms_and_light(config, &modes, input_light)?;
    let z = config.interaction.z;
    let t = (-config.interaction.gamma_t()).exp();
    let k = config.kappa();
    let g = config.gain;
    let block = DMatrix::from_row_slice(
        2,
        4,
        &[
            t,
            0.0,
            0.0,
            k, //
            0.0,
            t * (1.0 - g),
            -(k / (z * z) + g * t * t / k),
            0.0,
        ],
    );
    let mut m = DMatrix::zeros(4, 8);
    m.view_mut((0, 0), (2, 4)).copy_from(&block);
    m.view_mut((2, 4), (2, 4)).copy_from(&block);
    let sectors = [&modes.cos, &modes.sin];
    let order: Vec<&str> = sectors
        .iter()
        .flat_map(|s| [s.atom.label.as_str(), s.light_in.label.as_str()])
        .collect();
    let state = state.reorder(&order)?;
    let mean = &m * state.mean();
    let mut cov = &m * state.cov() * m.transpose();
    crate::linalg::symmetrize(&mut cov);
    GaussianState::new(vec![modes.cos.atom.clone(), modes.sin.atom.clone()], mean, cov)
}

/// What a perfect memory would hold: the input rotated by a quarter turn.
pub fn ideal_stored_state(input: &InputState, sector: &SectorModes) -> Result<GaussianState> {
    input
        .single_mode(sector.light_in.clone())?
        .apply_map(&quarter_turn(sector.light_in.clone(), sector.atom.clone())?)
}

/// Mean of `fidelity(channel(input), target(input))` over a set of inputs.
pub fn mean_fidelity<I>(
    inputs: &[I],
    mut channel: impl FnMut(&I) -> Result<GaussianState>,
    mut target: impl FnMut(&I) -> Result<GaussianState>,
) -> Result<Vec<f64>> {
    inputs
        .iter()
        .map(|i| fidelity(&channel(i)?, &target(i)?))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemoryReport {
    pub n_inputs: usize,
    /// Per-sector fidelity averaged over inputs and over both sectors.
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    pub max_fidelity: f64,
    pub classical_benchmark: Option<f64>,
    pub beats_benchmark: Option<bool>,
}

/// Stores every state of the configured input set and compares each sector
/// with [`ideal_stored_state`].
pub fn memory_fidelity_report(config: &MemoryConfig) -> Result<MemoryReport> {
    config.validate()?;
    let modes = TwoCellModes::standard();
    let inputs = config.inputs.states();
    let mut all = Vec::with_capacity(2 * inputs.len());
    for sector in [&modes.cos, &modes.sin] {
        let f = mean_fidelity(
            &inputs,
            |i| memory_store(config, &i.light_state(&modes)?)?.reduce(&[&sector.atom.label]),
            |i| ideal_stored_state(i, sector),
        )?;
        all.extend(f);
    }
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    Ok(MemoryReport {
        n_inputs: inputs.len(),
        mean_fidelity: mean,
        min_fidelity: all.iter().copied().fold(f64::INFINITY, f64::min),
        max_fidelity: all.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        classical_benchmark: config.classical_benchmark,
        beats_benchmark: config.classical_benchmark.map(|b| mean > b),
    })
}

//! End-to-end acceptance checks. Each check prints one PASS/FAIL line with
//! the measured value and its tolerance; the test fails if any check fails.
//!
//! Reference values are computed here from the defining formulas, not taken
//! from the library routines under test.

#![allow(clippy::type_complexity)]

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use faraday_cv::dissipative::{
    entanglement_report, evolve, ideal_model_for_z, ideal_model_unchecked, is_unique, steady_state,
    NoiseKind, ENSEMBLE_I, ENSEMBLE_II,
};
use faraday_cv::fock::{dark_state, evolve_lindblad, from_gaussian, model_jumps, FockState, StepControl};
use faraday_cv::gaussian::{epr_variance, GaussianState, ModeId, Quadrature, SymplecticMap};
use faraday_cv::levels::{cesium_d2_tables, z_from_scheme, DrivePolarization, LevelScheme};
use faraday_cv::maps::{
    epr_basis, long_time_limit, mu_nu, nonqnd_single_cell, nonqnd_two_cell, qnd_single_pass, qnd_two_cell,
    quarter_turn, reading_mode_transform, InteractionParams, SingleCellModes, TwoCellModes,
};
use faraday_cv::protocols::{
    entanglement_assisted_snr, heisenberg_scan, hybrid_epr, magnetometry_run, memory_store, optimize_eta,
    InputState, MagnetometryConfig, MemoryConfig,
};

// Pinned tolerances.
const Z_WINDOW: (f64, f64) = (2.4, 2.6);
const Z_RUNTIME: Duration = Duration::from_secs(1);
const STEADY_TOL: f64 = 1e-6;
const STEADY_FOCK_TOL: f64 = 1e-3;
const STEADY_RUNTIME: Duration = Duration::from_secs(30);
const MEMORY_TOL: f64 = 1e-10;
const QND_LIMIT_TOL: f64 = 1e-3;
const SYMPLECTIC_TOL: f64 = 1e-10;
const ETA_TOL: f64 = 1e-6;
const XI_TOL: f64 = 1e-9;
const SLOPE_TOL: f64 = 0.02;
const HYBRID_TOL: f64 = 1e-9;
const SENSITIVITY_TARGET: f64 = 4.2e-16;
const SENSITIVITY_FACTOR: f64 = 3.0;
const ORACLE_TOL: f64 = 1e-4;
const ORACLE_RUNTIME: Duration = Duration::from_secs(300);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn manifest(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn omega(n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        w[(2 * k, 2 * k + 1)] = 1.0;
        w[(2 * k + 1, 2 * k)] = -1.0;
    }
    w
}

fn defect(s: &DMatrix<f64>) -> f64 {
    let w = omega(s.nrows() / 2);
    (s * &w * s.transpose() - &w).amax()
}

/// `Z` from the level-scheme file's own Raman amplitudes: with equal
/// linewidths `r² = |Σ c_in c_out/Δ|²_{↓→↑} / |Σ c_in c_out/Δ|²_{↑→↓}` and
/// `Z² = (r+1)/(r-1)`.
fn z_from_file_by_hand(text: &str) -> f64 {
    let v: toml::Value = toml::from_str(text).unwrap();
    let detuning = |label: &str| {
        v["excited_levels"]
            .as_array()
            .unwrap()
            .iter()
            .find(|l| l["label"].as_str() == Some(label))
            .unwrap()["detuning"]
            .as_float()
            .unwrap()
    };
    let amp = |from: &str, to: &str| -> f64 {
        v["dipole_paths"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|p| p["from"].as_str() == Some(from) && p["to"].as_str() == Some(to))
            .map(|p| {
                p["c_in"].as_float().unwrap() * p["c_out"].as_float().unwrap()
                    / detuning(p["via"].as_str().unwrap())
            })
            .sum()
    };
    let up = v["up"].as_str().unwrap();
    let down = v["down"].as_str().unwrap();
    let r = (amp(down, up) / amp(up, down)).abs();
    ((r + 1.0) / (r - 1.0)).sqrt()
}

fn z_parameter() -> Outcome {
    let t0 = Instant::now();
    let z = z_from_scheme(&cesium_d2_tables(850e6, DrivePolarization::Y).unwrap())
        .unwrap()
        .z;
    let elapsed = t0.elapsed();
    let path = manifest("data/cs_d2_850mhz_y.toml");
    let text = std::fs::read_to_string(&path).unwrap();
    let z_file = z_from_scheme(&LevelScheme::load(&path).unwrap()).unwrap().z;
    let z_hand = z_from_file_by_hand(&text);
    let pass = (Z_WINDOW.0..=Z_WINDOW.1).contains(&z)
        && (z - z_file).abs() < 1e-9
        && (z - z_hand).abs() < 1e-9
        && elapsed < Z_RUNTIME;
    outcome(
        pass,
        format!(
            "Z = {z:.4} in [{}, {}]; golden file {z_file:.6}, by hand {z_hand:.6}; {:.1} ms",
            Z_WINDOW.0,
            Z_WINDOW.1,
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn steady_state_z25() -> Outcome {
    let t0 = Instant::now();
    let z = 2.5;
    let model = ideal_model_for_z(z, 1.0).unwrap();
    let epr = entanglement_report(&steady_state(&model).unwrap(), ENSEMBLE_I, ENSEMBLE_II)
        .unwrap()
        .epr_variance;
    let closed = 1.0 / (z * z);
    let template = FockState::vacuum(model.modes().to_vec(), 30).unwrap();
    let jumps = model_jumps(&model, &template).unwrap();
    let (dark, _) = dark_state(&template, &jumps).unwrap();
    let fock = epr_variance(&dark.to_gaussian().unwrap(), ENSEMBLE_I, ENSEMBLE_II).unwrap();
    let elapsed = t0.elapsed();
    let pass =
        (epr - closed).abs() < STEADY_TOL && (fock - epr).abs() < STEADY_FOCK_TOL && elapsed < STEADY_RUNTIME;
    outcome(
        pass,
        format!(
            "EPR {epr:.9} vs 1/Z² {closed:.9} (tol {STEADY_TOL:.0e}); Fock cutoff 30 {fock:.6} (tol {STEADY_FOCK_TOL:.0e}); {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

/// Hurwitz test on the drift, computed here from its eigenvalues.
fn hurwitz(drift: &DMatrix<f64>) -> bool {
    drift.norm() > 0.0 && drift.complex_eigenvalues().iter().all(|l| l.re < -1e-12)
}

fn uniqueness() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for z in [1.1, 2.5, 10.0] {
        let m = ideal_model_for_z(z, 1.0).unwrap();
        let ok = is_unique(&m).unique && hurwitz(m.drift());
        pass &= ok;
        notes.push(format!("Z={z}:{ok}"));
    }
    let (mu, nu) = mu_nu(2.5);
    let balanced = ideal_model_unchecked(mu, mu, 1.0).unwrap();
    let off = ideal_model_unchecked(mu, nu, 0.0).unwrap();
    for (name, m) in [("μ=ν", balanced), ("γ_s=0", off)] {
        let unique = is_unique(&m).unique;
        pass &= !unique && !hurwitz(m.drift());
        notes.push(format!("{name}:{unique}"));
    }
    outcome(pass, format!("unique: {}", notes.join(" ")))
}

/// Random physical state of `modes`: thermal occupations, then a symplectic
/// built here as `exp(Ω H)` for a random symmetric `H`, then a displacement.
fn random_physical(rng: &mut ChaCha8Rng, modes: Vec<ModeId>) -> GaussianState {
    let n = modes.len();
    let mut h = DMatrix::from_fn(2 * n, 2 * n, |_, _| rng.random_range(-0.6..0.6));
    h = (&h + h.transpose()) * 0.5;
    let s = (omega(n) * h).exp();
    let mut d = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        let nu = 0.5 + rng.random_range(0.0..1.0);
        d[(2 * k, 2 * k)] = nu;
        d[(2 * k + 1, 2 * k + 1)] = nu;
    }
    let cov = &s * d * s.transpose();
    let cov = (&cov + cov.transpose()) * 0.5;
    let mean = DVector::from_fn(2 * n, |_, _| rng.random_range(-2.0..2.0));
    GaussianState::new(modes, mean, cov).unwrap()
}

/// Stored state predicted by `x_fin = t x_A + κ p_L`, `p_fin = -x_L/κ` with
/// `t = √(1 - κ²/Z²)` and atoms starting in vacuum.
fn memory_by_hand(light: &GaussianState, z: f64, kappa: f64) -> (DVector<f64>, DMatrix<f64>) {
    let t = (1.0 - kappa * kappa / (z * z)).sqrt();
    // Light-only map onto (x_cos, p_cos, x_sin, p_sin).
    let mut m = DMatrix::zeros(4, 4);
    for s in 0..2 {
        m[(2 * s, 2 * s + 1)] = kappa;
        m[(2 * s + 1, 2 * s)] = -1.0 / kappa;
    }
    let mean = &m * light.mean();
    let cov = &m * light.cov() * m.transpose()
        + DMatrix::from_diagonal(&DVector::from_vec(vec![0.5 * t * t, 0.0, 0.5 * t * t, 0.0]));
    (mean, cov)
}

fn memory_identity() -> Outcome {
    let (z, kappa) = (2.5, 1.0);
    let cfg = MemoryConfig::for_kappa(z, kappa, 1.0, None).unwrap();
    let modes = TwoCellModes::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let light = random_physical(
            &mut rng,
            vec![modes.cos.light_in.clone(), modes.sin.light_in.clone()],
        );
        let out = memory_store(&cfg, &light).unwrap();
        let (mean, cov) = memory_by_hand(&light, z, kappa);
        worst = worst
            .max((out.cov() - cov).amax())
            .max((out.mean() - mean).amax());
    }
    let vacuum = InputState {
        x: 0.0,
        p: 0.0,
        squeezing_db: 0.0,
        phase: 0.0,
    }
    .light_state(&modes)
    .unwrap();
    let var_x = memory_store(&cfg, &vacuum)
        .unwrap()
        .quadrature_variance("A_cos", Quadrature::X)
        .unwrap();
    // t²·½ + κ²·½ with t² = 1 - κ²/Z² = 0.84.
    let expected = (1.0 - kappa * kappa / (z * z)) * 0.5 + kappa * kappa * 0.5;
    let pass = worst < MEMORY_TOL && (var_x - expected).abs() < MEMORY_TOL;
    outcome(
        pass,
        format!(
            "20 random inputs: max |Δ| {worst:.2e} (tol {MEMORY_TOL:.0e}); vacuum var x_fin {var_x:.12} vs {expected:.12} \
             (a quoted 0.96 does not follow from the relations; see notes)"
        ),
    )
}

fn qnd_limit() -> Outcome {
    let z = 1e3;
    let p = InteractionParams::from_kappa(z, 1.0, 1e3).unwrap();
    let modes = TwoCellModes::standard();
    let nonqnd = nonqnd_two_cell(&p, &modes).unwrap();
    let qnd = qnd_two_cell(p.coupling().kappa, &modes).unwrap();
    // The QND sector written out here: x_A += κ p_L, x_L += κ p_A.
    let k = 1.0;
    let by_hand = DMatrix::from_row_slice(
        4,
        4,
        &[
            1.0, 0.0, 0.0, k, 0.0, 1.0, 0.0, 0.0, 0.0, k, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0,
        ],
    );
    let library = (nonqnd.matrix() - qnd.matrix()).amax();
    let hand = (nonqnd.matrix().view((0, 0), (4, 4)) - &by_hand)
        .amax()
        .max((nonqnd.matrix().view((4, 4), (4, 4)) - &by_hand).amax());
    let pass = library < QND_LIMIT_TOL && hand < QND_LIMIT_TOL;
    outcome(
        pass,
        format!("Z = 1e3: ‖non-QND − QND‖ {library:.2e}, vs hand-written QND {hand:.2e} (tol {QND_LIMIT_TOL:.0e})"),
    )
}

fn symplectic_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let two = TwoCellModes::standard();
    let single = SingleCellModes::default();
    let mut worst = [0.0f64; 9];
    for _ in 0..1000 {
        let z = 10f64.powf(rng.random_range(-1.5..1.5));
        let gt = rng.random_range(0.0..4.0);
        let kappa = rng.random_range(0.0..5.0);
        let p = InteractionParams::new(z, gt, 1.0, rng.random_range(-1e3..1e3)).unwrap();
        let a = ModeId::atomic("A");
        let l = ModeId::atomic("L");
        let mats = [
            qnd_single_pass(kappa, a.clone(), l.clone())
                .unwrap()
                .matrix()
                .clone(),
            qnd_two_cell(kappa, &two).unwrap().matrix().clone(),
            nonqnd_two_cell(&p, &two).unwrap().matrix().clone(),
            long_time_limit(z, &two).unwrap().matrix().clone(),
            nonqnd_single_cell(&p, &single).unwrap().matrix().clone(),
            reading_mode_transform(z),
            epr_basis(a, l, ModeId::atomic("c"), ModeId::atomic("s"))
                .unwrap()
                .matrix()
                .clone(),
            quarter_turn(4),
            SymplecticMap::from_generator(
                &faraday_cv::maps::nonqnd_sector_generator(z, gt),
                vec![ModeId::atomic("a"), ModeId::atomic("b")],
                vec![ModeId::atomic("a"), ModeId::atomic("b")],
            )
            .unwrap()
            .matrix()
            .clone(),
        ];
        for (w, m) in worst.iter_mut().zip(&mats) {
            *w = w.max(defect(m));
        }
    }
    let max = worst.iter().cloned().fold(0.0, f64::max);
    outcome(
        max < SYMPLECTIC_TOL,
        format!("9 maps × 1000 draws: max ‖SΩSᵀ−Ω‖ {max:.2e} (tol {SYMPLECTIC_TOL:.0e})"),
    )
}

fn metrology_optimum() -> Outcome {
    let xi = |d: f64, eta: f64| (1.0 / (1.0 + d * eta)) / ((1.0 - eta) * (1.0 - eta));
    let o = optimize_eta(100.0, 0.0).unwrap();
    let eta_exact = 98.0 / 300.0;
    let xi_exact = xi(100.0, eta_exact);
    let far = optimize_eta(1e8, 0.0).unwrap().eta_star;
    let n: Vec<f64> = (0..9).map(|k| 1e3 * 10f64.powf(k as f64 / 2.0)).collect();
    let scan = heisenberg_scan(|n| 0.1 * n, 0.0, &n).unwrap();
    let pass = (o.eta_star - eta_exact).abs() < ETA_TOL
        && (o.xi_min - xi_exact).abs() < XI_TOL
        && (far - 1.0 / 3.0).abs() < ETA_TOL
        && (scan.slope + 1.0).abs() < SLOPE_TOL;
    outcome(
        pass,
        format!(
            "η* {:.9} vs 98/300 (tol {ETA_TOL:.0e}); ξ {:.12} vs {xi_exact:.12} (tol {XI_TOL:.0e}); η*(d=1e8) {far:.9}; \
             slope {:.4} (tol {SLOPE_TOL}); ξ ∝ 1/√N would give {:.2}",
            o.eta_star, o.xi_min, scan.slope, scan.slope_if_xi_root_n
        ),
    )
}

fn hybrid_formula() -> Outcome {
    let grid = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 100.0, 1e3, 1e6];
    let kappas = [0.0, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 5.0, 10.0];
    let mut worst = 0.0f64;
    for &n in &grid {
        for &k in &kappas {
            let expected = 1.0 / (1.0 / (1.0 + n) + 2.0 * k * k);
            worst = worst.max((hybrid_epr(n, k).unwrap().pipeline - expected).abs());
        }
    }
    let point = hybrid_epr(10.0, 1.0).unwrap();
    let expected = 1.0 / (1.0 / 11.0 + 2.0);
    let pass = worst < HYBRID_TOL && (point.pipeline - expected).abs() < HYBRID_TOL && point.pipeline < 1.0;
    outcome(
        pass,
        format!(
            "10×10 grid max |Δ| {worst:.2e} (tol {HYBRID_TOL:.0e}); n̄=10, κ=1: {:.6} (expected {expected:.6}, < 1); \
             conditioning on both outcomes gives {:.6}",
            point.pipeline, point.joint
        ),
    )
}

fn magnetometry() -> Outcome {
    let cfg = MagnetometryConfig {
        n_atoms: 1.5e12,
        tau: 22e-3,
        ..MagnetometryConfig::default()
    };
    let s = magnetometry_run(&cfg).unwrap().sensitivity;
    // Unit SNR: B·½γ·4N·T₂(1-e^{-τ/T₂}) = √(2N + 2N/κ²).
    let n = cfg.n_atoms;
    let response = 0.5 * cfg.gyromagnetic * 4.0 * n * cfg.t2 * (1.0 - (-cfg.tau / cfg.t2).exp());
    let by_hand = (2.0 * n * (1.0 + 1.0 / cfg.probe_kappa.powi(2))).sqrt() / response * cfg.tau.sqrt();
    let ratio = s / SENSITIVITY_TARGET;
    let taus = [1e-4, 1e-3, 1e-2, 1e-1, 1.0];
    let snr_cfg = MagnetometryConfig { b_rf: 1e-15, ..cfg };
    let ideal = entanglement_assisted_snr(&snr_cfg, 1.5, None, &taus).unwrap();
    let decaying = entanglement_assisted_snr(&snr_cfg, 1.5, Some(2e-3), &taus).unwrap();
    let last = decaying.last().unwrap().ratio;
    let pass = (1.0 / SENSITIVITY_FACTOR..=SENSITIVITY_FACTOR).contains(&ratio)
        && (s / by_hand - 1.0).abs() < 1e-12
        && ideal.iter().all(|p| p.ratio > 1.0)
        && decaying[0].ratio > 1.0
        && decaying.windows(2).all(|w| w[1].ratio <= w[0].ratio)
        && (last - 1.0).abs() < 1e-6;
    outcome(
        pass,
        format!(
            "sensitivity {s:.3e} T/√Hz = {ratio:.2}× {SENSITIVITY_TARGET:.1e} (factor {SENSITIVITY_FACTOR}); \
             SNR ratio short τ {:.3}, under decay {:.3} → {last:.6}",
            ideal[0].ratio, decaying[0].ratio
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let t0 = Instant::now();
    // (Z, noise, initial x of ensemble I, t); ν/μ = (Z²-1)/(Z²+1) ≤ 0.5.
    let points: [(f64, Option<(NoiseKind, f64)>, f64, f64); 5] = [
        (1.1, None, 0.5, 0.5),
        (1.3, Some((NoiseKind::SingleAtomDecay, 0.2)), 0.3, 0.5),
        (1.5, None, 0.0, 0.5),
        (1.6, Some((NoiseKind::Dephasing, 0.1)), 0.4, 0.3),
        (1.7, None, -0.5, 0.5),
    ];
    let mut worst = 0.0f64;
    let mut max_ratio = 0.0f64;
    for (z, noise, x0, t) in points {
        let (mu, nu) = mu_nu(z);
        max_ratio = max_ratio.max(nu / mu);
        let mut model = ideal_model_for_z(z, 1.0).unwrap();
        if let Some((kind, rate)) = noise {
            model = model.add_noise_channel(kind, rate).unwrap();
        }
        let start = GaussianState::vacuum(model.modes().to_vec())
            .unwrap()
            .displace(ENSEMBLE_I, x0, 0.0)
            .unwrap();
        let g = evolve(&model, &start, t).unwrap();
        let f0 = from_gaussian(&start, 30).unwrap();
        let jumps = model_jumps(&model, &f0).unwrap();
        let f = evolve_lindblad(&f0, &jumps, None, t, StepControl::default()).unwrap();
        let (mean, cov) = f.moments();
        worst = worst.max((&mean - g.mean()).amax()).max((&cov - g.cov()).amax());
    }
    let elapsed = t0.elapsed();
    outcome(
        worst < ORACLE_TOL && max_ratio <= 0.5 && elapsed < ORACLE_RUNTIME,
        format!(
            "5 points, ν/μ ≤ {max_ratio:.3}, cutoff 30: max moment |Δ| {worst:.2e} (tol {ORACLE_TOL:.0e}); {:.0} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_faraday-cv");
    let dir = tempfile::tempdir().unwrap();
    let mut notes = Vec::new();
    let mut pass = true;
    for (id, format) in [
        ("memory_kappa1", "csv"),
        ("map_check", "json"),
        ("hybrid_grid", "csv"),
    ] {
        let mut outputs = Vec::new();
        for (run, jobs) in [(0, "1"), (1, "1"), (2, "3")] {
            let out = dir.path().join(format!("{id}-{run}"));
            let status = Command::new(bin)
                .args([
                    "run", id, "--seed", "42", "--jobs", jobs, "--format", format, "--out",
                ])
                .arg(&out)
                .output()
                .unwrap();
            pass &= status.status.success();
            outputs.push(std::fs::read(out.join(format!("{id}.{format}"))).unwrap_or_default());
        }
        let same = !outputs[0].is_empty() && outputs.iter().all(|o| o == &outputs[0]);
        pass &= same;
        notes.push(format!(
            "{id}.{format}:{}",
            if same { "identical" } else { "DIFFERENT" }
        ));
    }
    outcome(
        pass,
        format!("3 runs each, seed 42, jobs 1/1/3: {}", notes.join(" ")),
    )
}

#[test]
fn acceptance() {
    let checks: [(&str, fn() -> Outcome); 11] = [
        ("z_parameter", z_parameter),
        ("steady_state_z2.5", steady_state_z25),
        ("uniqueness", uniqueness),
        ("memory_identity", memory_identity),
        ("qnd_limit", qnd_limit),
        ("symplectic_suite", symplectic_suite),
        ("metrology_optimum", metrology_optimum),
        ("hybrid_formula", hybrid_formula),
        ("magnetometry", magnetometry),
        ("oracle_equivalence", oracle_equivalence),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in checks.iter().enumerate() {
        let o = f();
        println!(
            "[{:02}] {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed.push(*name);
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}

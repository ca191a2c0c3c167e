use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use faraday_cv::gaussian::{
    check_physical, epr_variance, homodyne_condition, GaussianState, ModeId, Outcome, Quadrature,
    SymplecticMap,
};
use faraday_cv::levels::z_from_rates;
use faraday_cv::maps::{nonqnd_two_cell, qnd_two_cell, InteractionParams, TwoCellModes};
use faraday_cv::protocols::{
    analytic_eta_star, hybrid_closed_form, hybrid_epr, memory_closed_form, memory_store, optimize_eta,
    spin_squeezing_xi, MemoryConfig, SqueezingBudget,
};
use faraday_cv::scenario::ScenarioConfig;

fn modes(n: usize) -> Vec<ModeId> {
    (0..n).map(|k| ModeId::atomic(format!("m{k}"))).collect()
}

/// A physical state from thermal occupations, a generator and a mean.
fn state(n: usize, occ: &[f64], gen: &[f64], mean: &[f64]) -> GaussianState {
    let mut h = DMatrix::from_row_slice(2 * n, 2 * n, &gen[..4 * n * n]);
    h = (&h + h.transpose()) * 0.5;
    let s = SymplecticMap::from_generator(&h, modes(n), modes(n)).unwrap();
    let d = DMatrix::from_fn(2 * n, 2 * n, |i, j| if i == j { 0.5 + occ[i / 2] } else { 0.0 });
    let cov = s.matrix() * d * s.matrix().transpose();
    let cov = (&cov + cov.transpose()) * 0.5;
    GaussianState::new(modes(n), DVector::from_column_slice(&mean[..2 * n]), cov).unwrap()
}

fn two_mode_state() -> impl Strategy<Value = GaussianState> {
    (
        prop::collection::vec(0.0..2.0f64, 2),
        prop::collection::vec(-0.5..0.5f64, 16),
        prop::collection::vec(-3.0..3.0f64, 4),
    )
        .prop_map(|(o, g, m)| state(2, &o, &g, &m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symplectic_maps_keep_states_physical(s in two_mode_state(), g in prop::collection::vec(-1.0..1.0f64, 16)) {
        let mut h = DMatrix::from_row_slice(4, 4, &g);
        h = (&h + h.transpose()) * 0.5;
        let map = SymplecticMap::from_generator(&h, modes(2), modes(2)).unwrap();
        let out = s.apply_map(&map).unwrap();
        prop_assert!(check_physical(&out).margin > -1e-9);
    }

    #[test]
    fn homodyne_never_increases_conditional_variance(s in two_mode_state(), y in -5.0..5.0f64) {
        let before = s.quadrature_variance("m0", Quadrature::X).unwrap();
        let (c, _) = homodyne_condition(&s, "m1", Quadrature::X, Outcome::Value(y)).unwrap();
        prop_assert!(c.quadrature_variance("m0", Quadrature::X).unwrap() <= before + 1e-12);
        prop_assert!(check_physical(&c).margin > -1e-9);
    }

    #[test]
    fn tmsv_epr_variance_is_exponential(r in 0.0..2.0f64) {
        let s = GaussianState::two_mode_squeezed(ModeId::atomic("a"), ModeId::atomic("b"), r).unwrap();
        prop_assert!((epr_variance(&s, "a", "b").unwrap() - (-2.0 * r).exp()).abs() < 1e-10);
    }

    #[test]
    fn nonqnd_map_tends_to_qnd(kappa in 0.1..2.0f64, z in 50.0..500.0f64) {
        let modes = TwoCellModes::standard();
        let p = InteractionParams::from_kappa(z, kappa, 1e3).unwrap();
        let a = nonqnd_two_cell(&p, &modes).unwrap();
        let b = qnd_two_cell(p.coupling().kappa, &modes).unwrap();
        // Leading correction is κ/Z² in the p-quadrature coupling.
        prop_assert!((a.matrix() - b.matrix()).amax() < 2.0 * kappa.max(1.0).powi(2) / z);
    }

    #[test]
    fn memory_pipeline_matches_closed_form(
        z in 1.2..6.0f64,
        frac in 0.1..0.9f64,
        gain in 0.0..1.5f64,
        light in prop::collection::vec(-0.5..0.5f64, 16),
        occ in prop::collection::vec(0.0..1.0f64, 2),
        mean in prop::collection::vec(-2.0..2.0f64, 4),
    ) {
        let kappa = frac * z;
        let cfg = MemoryConfig::for_kappa(z, kappa, gain, None).unwrap();
        let m = TwoCellModes::standard();
        let input = state(2, &occ, &light, &mean)
            .relabel(&[("m0", m.cos.light_in.clone()), ("m1", m.sin.light_in.clone())])
            .unwrap();
        let a = memory_store(&cfg, &input).unwrap();
        let b = memory_closed_form(&cfg, &input).unwrap();
        prop_assert!((a.cov() - b.cov()).amax() < 1e-9);
        prop_assert!((a.mean() - b.mean()).amax() < 1e-9);
        prop_assert!(check_physical(&a).margin > -1e-9);
    }

    #[test]
    fn hybrid_pipeline_matches_formula(n in 0.0..1e4f64, kappa in 0.0..5.0f64) {
        let h = hybrid_epr(n, kappa).unwrap();
        let f = hybrid_closed_form(n, kappa);
        prop_assert!((h.pipeline - f).abs() < 1e-9 * f.max(1.0));
        prop_assert!(h.joint <= h.pipeline + 1e-12);
    }

    #[test]
    fn eta_optimum_is_stationary(d in 2.5..1e5f64) {
        let o = optimize_eta(d, 0.0).unwrap();
        prop_assert!((o.eta_star - analytic_eta_star(d)).abs() < 1e-6);
        for eta in [o.eta_star * 0.9, (o.eta_star * 1.1).min(0.99)] {
            let xi = spin_squeezing_xi(&SqueezingBudget::new(d, eta, 0.0).unwrap()).unwrap();
            prop_assert!(xi >= o.xi_min - 1e-15);
        }
    }

    #[test]
    fn z_from_rates_inverts_mu_nu(z in 1.01..50.0f64, scale in 1e-6..1e6f64) {
        // Γ_{↓→↑}/Γ_{↑→↓} = μ²/ν².
        let (mu, nu) = faraday_cv::maps::mu_nu(z);
        let b = z_from_rates(scale * nu * nu, scale * mu * mu).unwrap();
        prop_assert!((b.z / z - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sweep_cells_are_the_cartesian_product(a in 1usize..5, b in 1usize..5) {
        let xs: Vec<String> = (0..a).map(|i| format!("{}", 1.5 + i as f64)).collect();
        let ys: Vec<String> = (0..b).map(|i| format!("{}", 0.1 * (i + 1) as f64)).collect();
        let text = format!(
            "id = \"p\"\n[scenario]\nkind = \"hybrid_optomech\"\nn_bar = 1.0\n\
             [[sweep]]\nname = \"n_bar\"\nvalues = [{}]\n[[sweep]]\nname = \"kappa\"\nvalues = [{}]\n",
            xs.join(", "),
            ys.join(", ")
        );
        let cells = ScenarioConfig::from_toml_str(&text).unwrap().validate().unwrap();
        prop_assert_eq!(cells.len(), a * b);
        // Last axis fastest.
        for (i, c) in cells.iter().enumerate() {
            prop_assert_eq!(c.index, i);
            prop_assert_eq!(c.parameters["kappa"].as_f64().unwrap(), ys[i % b].parse::<f64>().unwrap());
        }
    }
}

//! Driven-dissipative entanglement of two ensembles: approach to the steady
//! state, its EPR variance against 1/Z², and the effect of extra noise.

use faraday_cv::dissipative::{
    entanglement_report, evolve, ideal_model_for_z, is_unique, steady_state, NoiseKind, ENSEMBLE_I,
    ENSEMBLE_II,
};
use faraday_cv::gaussian::GaussianState;

fn main() -> faraday_cv::Result<()> {
    let model = ideal_model_for_z(2.5, 1.0)?;
    let vacuum = GaussianState::vacuum(model.modes().to_vec())?;
    println!("γ_s t   EPR variance");
    for t in [0.0, 0.25, 0.5, 1.0, 2.0, 4.0] {
        let s = evolve(&model, &vacuum, t)?;
        println!(
            "{t:>5.2}   {:.5}",
            entanglement_report(&s, ENSEMBLE_I, ENSEMBLE_II)?.epr_variance
        );
    }

    for z in [1.1, 2.5, 10.0] {
        let m = ideal_model_for_z(z, 1.0)?;
        let u = is_unique(&m);
        let epr = entanglement_report(&steady_state(&m)?, ENSEMBLE_I, ENSEMBLE_II)?.epr_variance;
        println!(
            "Z = {z:>4}: unique {}, steady EPR {epr:.6}, 1/Z² = {:.6}",
            u.unique,
            1.0 / (z * z)
        );
    }

    println!("single-atom decay rate   steady EPR");
    for rate in [0.0, 0.1, 1.0, 10.0] {
        let m = model.add_noise_channel(NoiseKind::SingleAtomDecay, rate)?;
        let epr = entanglement_report(&steady_state(&m)?, ENSEMBLE_I, ENSEMBLE_II)?.epr_variance;
        println!("{rate:>22}   {epr:.5}");
    }
    Ok(())
}

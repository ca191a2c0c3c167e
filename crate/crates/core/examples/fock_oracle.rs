//! Gaussian Lindblad evolution checked against the truncated Fock density
//! matrix. Takes tens of seconds at cutoff 30; pass a smaller cutoff as the
//! first argument for a quick look.

use faraday_cv::dissipative::{evolve, ideal_model_for_z, ENSEMBLE_I};
use faraday_cv::fock::{evolve_lindblad, from_gaussian, model_jumps, StepControl};
use faraday_cv::gaussian::GaussianState;

fn main() -> faraday_cv::Result<()> {
    let cutoff: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20);
    let model = ideal_model_for_z(1.5, 1.0)?;
    let start = GaussianState::vacuum(model.modes().to_vec())?.displace(ENSEMBLE_I, 0.5, 0.0)?;
    let fock0 = from_gaussian(&start, cutoff)?;
    let jumps = model_jumps(&model, &fock0)?;
    for t in [0.1, 0.5] {
        let g = evolve(&model, &start, t)?;
        let f = evolve_lindblad(&fock0, &jumps, None, t, StepControl::default())?;
        let (mean, cov) = f.moments();
        println!(
            "t = {t}: |Δmean| {:.2e}, |Δcov| {:.2e}, leak {:.1e}",
            (&mean - g.mean()).amax(),
            (&cov - g.cov()).amax(),
            f.leaked()
        );
    }
    Ok(())
}

//! RF magnetometer: projection-noise-limited sensitivity and the gain from a
//! conditioning probe before the pulse.

use faraday_cv::protocols::{entanglement_assisted_snr, magnetometry_run, MagnetometryConfig};

fn main() -> faraday_cv::Result<()> {
    let cfg = MagnetometryConfig::default();
    let r = magnetometry_run(&cfg)?;
    println!(
        "N = {:.1e}, τ = {} ms: sensitivity {:.2e} T/√Hz",
        cfg.n_atoms,
        cfg.tau * 1e3,
        r.sensitivity
    );

    let taus = [1e-4, 1e-3, 1e-2, 1e-1];
    let cfg = MagnetometryConfig { b_rf: 1e-15, ..cfg };
    for lifetime in [None, Some(2e-3)] {
        println!("squeezing lifetime {lifetime:?}");
        for p in entanglement_assisted_snr(&cfg, 1.5, lifetime, &taus)? {
            println!("  τ = {:.0e} s: SNR ratio {:.3}", p.tau, p.ratio);
        }
    }
    Ok(())
}

//! Storing light in the atomic EPR modes with feedback, and the fidelity
//! over a grid of coherent and squeezed inputs.

use faraday_cv::gaussian::Quadrature;
use faraday_cv::maps::TwoCellModes;
use faraday_cv::protocols::{memory_fidelity_report, memory_store, InputState, MemoryConfig};

fn main() -> faraday_cv::Result<()> {
    let vacuum = InputState {
        x: 0.0,
        p: 0.0,
        squeezing_db: 0.0,
        phase: 0.0,
    }
    .light_state(&TwoCellModes::standard())?;
    println!("  κ   gain  var x  var p  mean F  min F");
    for kappa in [0.5, 1.0, 1.5] {
        for gain in [0.5, 1.0] {
            let cfg = MemoryConfig::for_kappa(2.5, kappa, gain, None)?;
            let stored = memory_store(&cfg, &vacuum)?;
            let r = memory_fidelity_report(&cfg)?;
            println!(
                "{kappa:>4} {gain:>5}  {:.3}  {:.3}  {:.4}  {:.4}",
                stored.quadrature_variance("A_cos", Quadrature::X)?,
                stored.quadrature_variance("A_cos", Quadrature::P)?,
                r.mean_fidelity,
                r.min_fidelity
            );
        }
    }
    Ok(())
}

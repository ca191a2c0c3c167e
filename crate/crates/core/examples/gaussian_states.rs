//! Two-mode squeezing, homodyne conditioning and the EPR criterion.

use faraday_cv::gaussian::{
    check_physical, epr_variance, homodyne_condition, GaussianState, ModeId, Outcome, Quadrature,
};

fn main() -> faraday_cv::Result<()> {
    for r in [0.0, 0.25, 0.5, 1.0] {
        let s = GaussianState::two_mode_squeezed(ModeId::atomic("a"), ModeId::atomic("b"), r)?;
        println!(
            "r = {r:.2}: EPR variance {:.4} (e^(-2r) = {:.4}), margin {:.1e}",
            epr_variance(&s, "a", "b")?,
            (-2.0 * r).exp(),
            check_physical(&s).margin
        );
    }

    // Measuring x_b of a TMSV squeezes x_a; the conditional variance does
    // not depend on the outcome.
    let s = GaussianState::two_mode_squeezed(ModeId::atomic("a"), ModeId::atomic("b"), 0.8)?;
    for y in [-1.0, 0.0, 2.0] {
        let (c, _) = homodyne_condition(&s, "b", Quadrature::X, Outcome::Value(y))?;
        println!(
            "x_b = {y:+.1}: <x_a> = {:+.4}, var x_a = {:.4}",
            c.mean()[0],
            c.quadrature_variance("a", Quadrature::X)?
        );
    }
    Ok(())
}

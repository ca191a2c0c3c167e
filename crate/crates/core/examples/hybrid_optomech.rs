//! Entangling a mechanical oscillator with a negative-mass atomic ensemble.

use faraday_cv::protocols::{hybrid_epr, hybrid_epr_protocol, optomech_kappa, OptomechParams};

fn main() -> faraday_cv::Result<()> {
    let p = OptomechParams::desk_preset();
    println!("preset: κ_OM = {:.3}, n̄ = {:.2e}", optomech_kappa(&p)?, p.n_bar());
    let room = hybrid_epr_protocol(&p, optomech_kappa(&p)?)?;
    println!(
        "room temperature: EPR {:.3e}, entangled {}",
        room.pipeline, room.entangled
    );

    println!("  n̄     κ   closed form  pipeline  joint");
    for n in [0.0, 1.0, 10.0, 100.0] {
        for k in [0.5, 1.0, 3.0] {
            let h = hybrid_epr(n, k)?;
            println!(
                "{n:>5} {k:>5}   {:.5}      {:.5}   {:.5}",
                h.closed_form, h.pipeline, h.joint
            );
        }
    }
    Ok(())
}

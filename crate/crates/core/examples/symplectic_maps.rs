//! Light-atom maps: QND, the Z-dependent two-cell map, its QND limit, and a
//! Fock-space check of one map through its generator.

use faraday_cv::fock::{from_gaussian, Ket};
use faraday_cv::gaussian::{GaussianState, ModeId, ModeKind, SymplecticMap};
use faraday_cv::linalg::symplectic_defect;
use faraday_cv::maps::{
    nonqnd_sector_generator, nonqnd_two_cell, qnd_limit_error, qnd_two_cell, InteractionParams, TwoCellModes,
};

fn main() -> faraday_cv::Result<()> {
    let modes = TwoCellModes::standard();
    let qnd = qnd_two_cell(1.0, &modes)?;
    println!("QND κ=1 defect {:.1e}", symplectic_defect(qnd.matrix()));

    for z in [1.5, 2.5, 10.0, 1e3] {
        let p = InteractionParams::from_kappa(z, 1.0, 1e3)?;
        let m = nonqnd_two_cell(&p, &modes)?;
        println!(
            "Z = {z:>7}: γ_sT = {:.4}, defect {:.1e}, distance to QND {:.2e}",
            p.gamma_t(),
            symplectic_defect(m.matrix()),
            qnd_limit_error(z, 1.0)?
        );
    }

    // One sector of the non-QND map, applied to a displaced vacuum in Fock
    // space and in phase space.
    let h = nonqnd_sector_generator(2.5, 0.2);
    let pair = vec![ModeId::atomic("A"), ModeId::new("L", ModeKind::LightCos)];
    let start = GaussianState::vacuum(pair)?.displace("A", 0.3, -0.2)?;
    let fock = from_gaussian(&start, 25)?;
    let (mean, cov) = Ket::from_state(&fock)?.apply_generator(&h)?.moments();
    let map = SymplecticMap::from_generator(&h, start.modes().to_vec(), start.modes().to_vec())?;
    let g = start.apply_map(&map)?;
    println!(
        "Fock vs Gaussian: mean {:.1e}, cov {:.1e} (leak {:.1e})",
        (&mean - g.mean()).amax(),
        (&cov - g.cov()).amax(),
        fock.leaked()
    );
    Ok(())
}

//! Squeezing budget of a probe with loss η: optimum versus optical depth and
//! the scaling of the squeezing parameter with atom number.

use faraday_cv::protocols::{analytic_eta_star, heisenberg_scan, optimize_eta};

fn main() -> faraday_cv::Result<()> {
    for d in [10.0, 100.0, 1e3, 1e5] {
        let o = optimize_eta(d, 0.0)?;
        println!(
            "d = {d:>8}: η* = {:.6} (analytic {:.6}), ξ = {:.4e}",
            o.eta_star,
            analytic_eta_star(d),
            o.xi_min
        );
    }
    let n: Vec<f64> = (0..9).map(|k| 1e3 * 10f64.powf(k as f64 / 2.0)).collect();
    let scan = heisenberg_scan(|n| 0.1 * n, 0.0, &n)?;
    println!(
        "log-log slope of angular precision: {:.3} (coherent {:.2}, if ξ ∝ 1/√N {:.2})",
        scan.slope, scan.slope_coherent, scan.slope_if_xi_root_n
    );
    Ok(())
}

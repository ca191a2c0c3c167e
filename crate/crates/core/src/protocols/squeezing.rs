//! Measurement-induced spin squeezing limited by spontaneous emission.
//!
//! `ξ(d, η, a) = (1/(1 + dη) + aη)/(1 - η)²` for optical depth `d`,
//! spontaneous-emission probability `η` and level-scheme constant `a`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezingBudget {
    pub d: f64,
    pub eta: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub n_atoms: Option<f64>,
}

impl SqueezingBudget {
    pub fn new(d: f64, eta: f64, a: f64) -> Result<Self> {
        let b = Self {
            d,
            eta,
            a,
            n_atoms: None,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d >= 0.0 && self.d.is_finite()) {
            return Err(invalid("d", format!("must be non-negative, got {}", self.d)));
        }
        if !(0.0..1.0).contains(&self.eta) {
            return Err(invalid("eta", format!("must lie in [0, 1), got {}", self.eta)));
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(invalid("a", format!("must be non-negative, got {}", self.a)));
        }
        Ok(())
    }
}

fn xi(d: f64, eta: f64, a: f64) -> f64 {
    (1.0 / (1.0 + d * eta) + a * eta) / ((1.0 - eta) * (1.0 - eta))
}

pub fn spin_squeezing_xi(budget: &SqueezingBudget) -> Result<f64> {
    budget.validate()?;
    Ok(xi(budget.d, budget.eta, budget.a))
}

/// Stationary point `η* = (d - 2)/(3d)` of `ξ` at `a = 0`.
pub fn analytic_eta_star(d: f64) -> f64 {
    (d - 2.0) / (3.0 * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaOptimum {
    pub eta_star: f64,
    pub xi_min: f64,
}

/// Upper end of the search interval.
const ETA_MAX: f64 = 1.0 - 1e-9;

/// Minimises `ξ` over `η ∈ [0, 1)` by golden-section search. Fails if the
/// minimum sits on the boundary (e.g. `a = 0`, `d ≤ 2`).
pub fn optimize_eta(d: f64, a: f64) -> Result<EtaOptimum> {
    SqueezingBudget::new(d, 0.0, a)?;
    let f = |eta: f64| xi(d, eta, a);
    let eta = golden_section(f, 0.0, ETA_MAX, 1e-12);
    // Anything within the final bracket of an end point counts as that end.
    let edge = 1e-9;
    if eta < edge || eta > ETA_MAX - edge || f(eta) >= f(0.0) {
        return Err(Error::NoInteriorMinimum { lo: 0.0, hi: ETA_MAX });
    }
    Ok(EtaOptimum {
        eta_star: eta,
        xi_min: f(eta),
    })
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub n_atoms: f64,
    pub d: f64,
    pub eta_star: f64,
    pub xi_min: f64,
    /// `δJ_z/J = √(ξ/N)`.
    pub angular_precision: f64,
    /// `ξ·N`, the squeezed noise relative to a single atom's.
    pub xi_times_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeisenbergScan {
    pub rows: Vec<ScanRow>,
    /// Log-log slope of `δJ_z/J` against `N`.
    pub slope: f64,
    /// Slope of the coherent-state limit `ξ = 1`.
    pub slope_coherent: f64,
    /// Slope implied if instead `ξ_min ∝ 1/√N`.
    pub slope_if_xi_root_n: f64,
}

/// Optimal `ξ` and angular precision for each atom number, with `d = d_of_n(N)`.
pub fn heisenberg_scan(d_of_n: impl Fn(f64) -> f64, a: f64, n_values: &[f64]) -> Result<HeisenbergScan> {
    if n_values.len() < 2 {
        return Err(invalid("n_values", "need at least two atom numbers for a slope"));
    }
    let mut rows = Vec::with_capacity(n_values.len());
    let mut last_d = f64::NEG_INFINITY;
    for &n in n_values {
        if !(n > 0.0) {
            return Err(invalid("n_atoms", "must be positive"));
        }
        let d = d_of_n(n);
        if d < last_d {
            return Err(invalid("d_of_n", "optical depth must not decrease with N"));
        }
        last_d = d;
        let opt = optimize_eta(d, a)?;
        rows.push(ScanRow {
            n_atoms: n,
            d,
            eta_star: opt.eta_star,
            xi_min: opt.xi_min,
            angular_precision: (opt.xi_min / n).sqrt(),
            xi_times_n: opt.xi_min * n,
        });
    }
    let logn: Vec<f64> = rows.iter().map(|r| r.n_atoms.ln()).collect();
    let slope = fit_slope(
        &logn,
        &rows.iter().map(|r| r.angular_precision.ln()).collect::<Vec<_>>(),
    );
    let slope_coherent = fit_slope(
        &logn,
        &rows
            .iter()
            .map(|r| (1.0 / r.n_atoms).sqrt().ln())
            .collect::<Vec<_>>(),
    );
    let slope_if_xi_root_n = fit_slope(
        &logn,
        &rows
            .iter()
            .map(|r| (r.n_atoms.powf(-0.5) / r.n_atoms).sqrt().ln())
            .collect::<Vec<_>>(),
    );
    Ok(HeisenbergScan {
        rows,
        slope,
        slope_coherent,
        slope_if_xi_root_n,
    })
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_limits() {
        assert_eq!(
            spin_squeezing_xi(&SqueezingBudget::new(100.0, 0.0, 0.3).unwrap()).unwrap(),
            1.0
        );
        assert!(SqueezingBudget::new(100.0, 1.0, 0.0).is_err());
        assert!(SqueezingBudget::new(100.0, 1.2, 0.0).is_err());
        let near = spin_squeezing_xi(&SqueezingBudget::new(100.0, 1.0 - 1e-6, 0.0).unwrap()).unwrap();
        assert!(near > 1e8);
    }

    #[test]
    fn optimum_matches_stationary_point() {
        for d in [3.0, 10.0, 100.0, 1e4] {
            let opt = optimize_eta(d, 0.0).unwrap();
            assert!((opt.eta_star - analytic_eta_star(d)).abs() < 1e-6, "d={d}");
        }
        assert!(optimize_eta(2.0, 0.0).is_err());
        assert!(optimize_eta(1.0, 0.0).is_err());
    }

    #[test]
    fn level_constant_lowers_optimum() {
        let e: Vec<f64> = [0.0, 0.1, 1.0]
            .iter()
            .map(|&a| optimize_eta(100.0, a).unwrap().eta_star)
            .collect();
        assert!(e[0] > e[1] && e[1] > e[2]);
    }

    #[test]
    fn slopes() {
        let n: Vec<f64> = (0..9).map(|k| 10f64.powf(3.0 + 0.5 * k as f64)).collect();
        let scan = heisenberg_scan(|n| 0.1 * n, 0.0, &n).unwrap();
        assert!((scan.slope + 1.0).abs() < 0.02, "{}", scan.slope);
        assert!((scan.slope_coherent + 0.5).abs() < 1e-12);
        assert!((scan.slope_if_xi_root_n + 0.75).abs() < 1e-12);
        let tail: Vec<f64> = scan.rows.iter().rev().take(3).map(|r| r.xi_times_n).collect();
        assert!((tail[0] / tail[2] - 1.0).abs() < 1e-3);
    }
}

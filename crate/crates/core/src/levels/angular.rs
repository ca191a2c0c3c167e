//! Clebsch-Gordan and Wigner 6j coefficients from the Racah sum formulas.
//!
//! Every intermediate is an exact rational; only the final square root is
//! taken in floating point. This avoids the cancellation between large
//! alternating terms that plagues a direct `f64` evaluation.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A non-negative or signed half-integer, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const fn from_twice(twice: i64) -> Self {
        Self(twice)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl TryFrom<f64> for HalfInt {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        let twice = 2.0 * v;
        if !twice.is_finite() || (twice - twice.round()).abs() > 1e-9 || twice.abs() > 1e6 {
            return Err(Error::NotHalfInteger(format!("{v}")));
        }
        Ok(Self(twice.round() as i64))
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

fn factorial(n: i64) -> BigInt {
    debug_assert!(n >= 0);
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn fact_q(n: i64) -> BigRational {
    BigRational::from_integer(factorial(n))
}

/// `(a + b)/2` style combinations in doubled units that must be integers.
fn half(twice: i64) -> Option<i64> {
    (twice % 2 == 0).then_some(twice / 2)
}

fn signed_sqrt(square: &BigRational, sign_of: &BigRational) -> f64 {
    let v = square.to_f64().unwrap_or(f64::NAN).sqrt();
    if sign_of.is_negative() {
        -v
    } else {
        v
    }
}

fn parse(values: &[f64]) -> Result<Vec<i64>> {
    values
        .iter()
        .map(|&v| HalfInt::try_from(v).map(HalfInt::twice))
        .collect()
}

fn triangle(a: i64, b: i64, c: i64) -> bool {
    // Doubled units.
    c <= a + b && c >= (a - b).abs() && (a + b + c) % 2 == 0
}

/// `⟨j₁ m₁; j₂ m₂ | J M⟩` with the Condon-Shortley phase convention.
///
/// Arguments that are not half-integers, or negative `j`, are errors;
/// selection-rule violations give 0.
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    let v = parse(&[j1, m1, j2, m2, j, m])?;
    clebsch_gordan_twice(v[0], v[1], v[2], v[3], v[4], v[5])
}

/// [`clebsch_gordan`] on doubled arguments.
pub fn clebsch_gordan_twice(j1: i64, m1: i64, j2: i64, m2: i64, j: i64, m: i64) -> Result<f64> {
    if j1 < 0 || j2 < 0 || j < 0 {
        return Err(Error::NotHalfInteger(format!(
            "negative angular momentum ({j1}/2, {j2}/2, {j}/2)"
        )));
    }
    if m != m1 + m2 || !triangle(j1, j2, j) {
        return Ok(0.0);
    }
    for (jj, mm) in [(j1, m1), (j2, m2), (j, m)] {
        if mm.abs() > jj || (jj - mm) % 2 != 0 {
            return Ok(0.0);
        }
    }
    let h = |x: i64| half(x).expect("parity checked above");
    let pre = BigRational::from_integer(BigInt::from(j + 1))
        * fact_q(h(j + j1 - j2))
        * fact_q(h(j - j1 + j2))
        * fact_q(h(j1 + j2 - j))
        / fact_q(h(j1 + j2 + j) + 1)
        * fact_q(h(j + m))
        * fact_q(h(j - m))
        * fact_q(h(j1 - m1))
        * fact_q(h(j1 + m1))
        * fact_q(h(j2 - m2))
        * fact_q(h(j2 + m2));

    let a = h(j1 + j2 - j);
    let b = h(j1 - m1);
    let c = h(j2 + m2);
    let d = h(j - j2 + m1);
    let e = h(j - j1 - m2);
    let k_min = 0.max(-d).max(-e);
    let k_max = a.min(b).min(c);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let denom = factorial(k)
            * factorial(a - k)
            * factorial(b - k)
            * factorial(c - k)
            * factorial(d + k)
            * factorial(e + k);
        let term = BigRational::new(BigInt::one(), denom);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let square = pre * &sum * &sum;
    Ok(signed_sqrt(&square, &sum))
}

fn delta_sq(a: i64, b: i64, c: i64) -> BigRational {
    let h = |x: i64| half(x).expect("triangle parity checked");
    fact_q(h(a + b - c)) * fact_q(h(a - b + c)) * fact_q(h(-a + b + c)) / fact_q(h(a + b + c) + 1)
}

/// Wigner 6j symbol `{j₁ j₂ j₃; j₄ j₅ j₆}`.
pub fn wigner_6j(j1: f64, j2: f64, j3: f64, j4: f64, j5: f64, j6: f64) -> Result<f64> {
    let v = parse(&[j1, j2, j3, j4, j5, j6])?;
    wigner_6j_twice(v[0], v[1], v[2], v[3], v[4], v[5])
}

/// [`wigner_6j`] on doubled arguments.
pub fn wigner_6j_twice(a: i64, b: i64, c: i64, d: i64, e: i64, f: i64) -> Result<f64> {
    if [a, b, c, d, e, f].iter().any(|&x| x < 0) {
        return Err(Error::NotHalfInteger("negative angular momentum in 6j".into()));
    }
    let triads = [(a, b, c), (a, e, f), (d, b, f), (d, e, c)];
    if !triads.iter().all(|&(x, y, z)| triangle(x, y, z)) {
        return Ok(0.0);
    }
    let pre = triads
        .iter()
        .fold(BigRational::one(), |acc, &(x, y, z)| acc * delta_sq(x, y, z));
    let alphas = [(a + b + c) / 2, (a + e + f) / 2, (d + b + f) / 2, (d + e + c) / 2];
    let betas = [(a + b + d + e) / 2, (a + c + d + f) / 2, (b + c + e + f) / 2];
    let t_min = *alphas.iter().max().expect("four triads");
    let t_max = *betas.iter().min().expect("three sums");
    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let mut denom = BigInt::one();
        for &al in &alphas {
            denom *= factorial(t - al);
        }
        for &be in &betas {
            denom *= factorial(be - t);
        }
        let term = BigRational::new(factorial(t + 1), denom);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let square = pre * &sum * &sum;
    Ok(signed_sqrt(&square, &sum))
}

/// Relative strength `S_{FF'} = (2F'+1)(2J+1){J J' 1; F' F I}²` of the
/// hyperfine transition `F → F'` within a fine-structure line `J → J'`.
/// For fixed `F` these sum to 1 over `F'`.
pub fn hyperfine_strength(j: f64, j_exc: f64, nuclear: f64, f: f64, f_exc: f64) -> Result<f64> {
    let six = wigner_6j(j, j_exc, 1.0, f_exc, f, nuclear)?;
    Ok((2.0 * f_exc + 1.0) * (2.0 * j + 1.0) * six * six)
}

//! Asymptotic enumeration of symmetric matrices with given row sums.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exact_count::RowSumSpec;
use crate::numkit::LogValue;

pub const DEFAULT_OMEGA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticCount {
    pub value: LogValue,
    pub lambda: f64,
    /// `(y2, y3, y4)` with `y_k = sum (t_j - lambda (N-1))^k`.
    pub moments: (f64, f64, f64),
    /// Whether every row satisfies `|t_j - lambda(N-1)| <= lambda N^(1/2 + omega)`.
    pub in_window: bool,
}

/// Average matrix entry `x / (N(N-1))`.
pub fn lambda_star(spec: &RowSumSpec) -> Result<f64> {
    let x = spec.x();
    if x == 0 {
        return Err(Error::DegenerateSpectrum);
    }
    let n = spec.n() as f64;
    Ok(x as f64 / (n * (n - 1.0)))
}

pub fn asymptotic_count(spec: &RowSumSpec, lambda: f64) -> Result<AsymptoticCount> {
    asymptotic_count_with_omega(spec, lambda, DEFAULT_OMEGA)
}

pub fn asymptotic_count_with_omega(spec: &RowSumSpec, lambda: f64, omega: f64) -> Result<AsymptoticCount> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    let n = spec.n() as f64;
    let x = spec.x() as f64;
    let l = lambda;
    let l1 = l + 1.0;
    let center = l * (n - 1.0);
    let (mut y2, mut y3, mut y4) = (0.0, 0.0, 0.0);
    let mut in_window = true;
    let window = l * n.powf(0.5 + omega);
    for &t in &spec.t {
        let d = t as f64 - center;
        y2 += d * d;
        y3 += d * d * d;
        y4 += d * d * d * d;
        if d.abs() > window {
            in_window = false;
        }
    }
    let pairs = n * (n - 1.0) / 2.0;
    let ll1 = l * l1;
    let mut ln = 0.5 * 2f64.ln() + pairs * l1.ln() - 0.5 * n * (2.0 * PI * ll1 * n).ln() + 0.5 * x * (1.0 + 1.0 / l).ln()
        + (14.0 * l * l + 14.0 * l - 1.0) / (12.0 * ll1);
    ln += -y2 / (2.0 * ll1 * n);
    ln += -y2 / (ll1 * n * n);
    ln += (2.0 * l + 1.0) * y3 / (6.0 * ll1 * ll1 * n * n);
    ln += -(3.0 * l * l + 3.0 * l + 1.0) * y4 / (12.0 * ll1.powi(3) * n.powi(3));
    ln += y2 * y2 / (4.0 * ll1 * ll1 * n.powi(4));
    Ok(AsymptoticCount { value: LogValue::from_ln(ln), lambda, moments: (y2, y3, y4), in_window })
}

/// Ratio asymptotic / exact, evaluated in log space.
pub fn ratio_to_exact(asym: &AsymptoticCount, exact: &BigUint) -> f64 {
    let ln_exact = ln_biguint(exact);
    (asym.value.log_abs - ln_exact).exp()
}

pub fn ln_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        v.to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        (v >> shift).to_f64().unwrap().ln() + shift as f64 * 2f64.ln()
    }
}

/// The lower threshold `E_alpha` built from per-row parameters `lambda_j`.
pub fn lower_bound(spec: &RowSumSpec, lambda_seq: &[f64], alpha: f64) -> Result<LogValue> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1/2), got {alpha}")));
    }
    if lambda_seq.len() != spec.n() {
        return Err(Error::Dimension { expected: spec.n(), got: lambda_seq.len() });
    }
    if lambda_seq.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Domain("all lambda_j must be positive".into()));
    }
    let n = spec.n() as f64;
    let l = lambda_seq.iter().sum::<f64>() / n;
    let ll1 = l * (l + 1.0);
    let mut ln = -0.5 * n * (2.0 * PI * ll1 * n).ln();
    for (&lj, &tj) in lambda_seq.iter().zip(&spec.t) {
        ln += 0.5 * tj as f64 * (1.0 + 1.0 / lj).ln();
    }
    for k in 0..spec.n() {
        for m in k + 1..spec.n() {
            let a = ((1.0 + lambda_seq[k]) * (1.0 + lambda_seq[m])).sqrt();
            let b = (lambda_seq[k] * lambda_seq[m]).sqrt();
            ln += a.ln() - (a - b).ln();
        }
    }
    ln += (14.0 * l * l + 14.0 * l - 1.0) / (12.0 * ll1);
    ln -= n.powf(1.0 - 2.0 * alpha);
    Ok(LogValue::from_ln(ln))
}

/// Asymptotic fraction `exp(-1/(4 lambda (lambda+1)))` of matrices inside the
/// validity window.
pub fn coverage_fraction(lambda: f64) -> f64 {
    (-1.0 / (4.0 * lambda * (lambda + 1.0))).exp()
}

//! Monic orthogonal polynomials: construction from moments, the recursion for
//! the weight `exp(-x^4)`, and the Gamma-matrix determinant.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::detkit::{det_log, solve_f64};
use crate::error::{Error, Result};
use crate::numkit::{binomial_f64, Fixed, LogValue};

/// Moments `rho_0..rho_{2n}` of a weight.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSeq {
    pub rho: Vec<f64>,
}

impl MomentSeq {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if rho.is_empty() {
            return Err(Error::Domain("moment sequence is empty".into()));
        }
        Ok(MomentSeq { rho })
    }

    /// Moments of `exp(-x^2/2)` up to order `2n`.
    pub fn gaussian(n: usize) -> Self {
        let rho = (0..=2 * n)
            .map(|j| if j % 2 == 1 { 0.0 } else { (2.0 * PI).sqrt() * (1..j).step_by(2).map(|v| v as f64).product::<f64>() })
            .collect();
        MomentSeq { rho }
    }

    /// Moments of the uniform weight on `[0, 1]`.
    pub fn uniform_unit(n: usize) -> Self {
        MomentSeq { rho: (0..=2 * n).map(|j| 1.0 / (j as f64 + 1.0)).collect() }
    }

    /// Moments `Gamma((j+1)/4)/2` (even `j`) of `exp(-x^4)`.
    pub fn quartic(n: usize) -> Self {
        let rho = (0..=2 * n).map(|j| if j % 2 == 1 { 0.0 } else { gamma((j as f64 + 1.0) / 4.0) / 2.0 }).collect();
        MomentSeq { rho }
    }

    /// Largest degree whose norm the sequence determines.
    pub fn max_degree(&self) -> usize {
        (self.rho.len() - 1) / 2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthoTable {
    pub degree: usize,
    /// `alpha_1..alpha_n`.
    pub alpha: Vec<f64>,
    /// `R_1..R_n`, with `R_m = h_m / h_{m-1}`.
    pub r: Vec<f64>,
    /// `h_0..h_n`.
    pub h: Vec<f64>,
    pub weight_id: String,
    /// Ascending coefficients of `P_0..P_n`.
    pub coeffs: Vec<Vec<f64>>,
}

impl OrthoTable {
    /// `R_m` for `1 <= m <= degree`, and `R_0 = 0`.
    pub fn r_at(&self, m: usize) -> f64 {
        if m == 0 {
            0.0
        } else {
            self.r[m - 1]
        }
    }

    /// Evaluates `P_k(x)`.
    pub fn eval(&self, k: usize, x: f64) -> f64 {
        self.coeffs[k].iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

fn inner(p: &[f64], q: &[f64], rho: &[f64]) -> (f64, f64) {
    let mut v = 0.0;
    let mut scale = 0.0;
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            let t = a * b * rho[i + j];
            v += t;
            scale += t.abs();
        }
    }
    (v, scale)
}

/// Three-term recursion with inner products taken from the moments.
pub fn ops_from_moments(m: &MomentSeq, n: usize) -> Result<OrthoTable> {
    if m.max_degree() < n {
        return Err(Error::Dimension { expected: 2 * n + 1, got: m.rho.len() });
    }
    let rho = &m.rho;
    if rho[0] == 0.0 {
        return Err(Error::NotQuasiDefinite(0));
    }
    let mut coeffs: Vec<Vec<f64>> = vec![vec![1.0]];
    let mut h = vec![rho[0]];
    let mut alpha = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    for k in 1..=n {
        let prev = &coeffs[k - 1];
        let mut shifted = vec![0.0];
        shifted.extend_from_slice(prev);
        let (num, _) = inner(&shifted, prev, rho);
        let a = num / h[k - 1];
        let mut next = shifted;
        for (i, c) in prev.iter().enumerate() {
            next[i] -= a * c;
        }
        if k >= 2 {
            let rk = h[k - 1] / h[k - 2];
            for (i, c) in coeffs[k - 2].iter().enumerate() {
                next[i] -= rk * c;
            }
        }
        let (hk, scale) = inner(&next, &next, rho);
        if hk.abs() <= 1e-13 * scale {
            return Err(Error::NotQuasiDefinite(k));
        }
        alpha.push(a);
        r.push(hk / h[k - 1]);
        h.push(hk);
        coeffs.push(next);
    }
    Ok(OrthoTable { degree: n, alpha, r, h, weight_id: "moments".into(), coeffs })
}

/// Coefficients of the monic `P_k` from the Hankel system
/// `sum_j c_j rho_{i+j} = -rho_{i+k}`, `i < k`.
pub fn hankel_polynomial(m: &MomentSeq, k: usize) -> Result<Vec<f64>> {
    if m.rho.len() < 2 * k {
        return Err(Error::Dimension { expected: 2 * k, got: m.rho.len() });
    }
    let a: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| m.rho[i + j]).collect()).collect();
    let b: Vec<f64> = (0..k).map(|i| -m.rho[i + k]).collect();
    let mut c = solve_f64(a, b).map_err(|_| Error::NotQuasiDefinite(k))?;
    c.push(1.0);
    Ok(c)
}

pub const QUARTIC_MAX: usize = 64;

/// Recursion coefficients of the weight `exp(-x^4)` from
/// `m = 4 (R_{m+1} R_m + R_m^2 + R_m R_{m-1})`, seeded with
/// `R_1 = Gamma(3/4)/Gamma(1/4) = AGM(1, sqrt 2) / (2 sqrt pi)`.
///
/// The forward recursion amplifies rounding error geometrically, so it runs in
/// binary fixed point.
pub fn quartic_r_sequence(n_max: usize) -> Result<OrthoTable> {
    if n_max == 0 || n_max > QUARTIC_MAX {
        return Err(Error::Domain(format!("n_max must lie in 1..={QUARTIC_MAX}, got {n_max}")));
    }
    let sqrt2 = Fixed::from_int(2).sqrt();
    let r1 = Fixed::agm(&Fixed::from_int(1), &sqrt2).div(&Fixed::pi().sqrt().mul(&Fixed::from_int(2)));
    let mut rs = vec![Fixed::from_int(0), r1];
    for m in 1..n_max {
        let rm = &rs[m];
        let rprev = &rs[m - 1];
        let num = Fixed::from_ratio(m as i64, 4).sub(&rm.mul(rm)).sub(&rm.mul(rprev));
        let next = num.div(rm);
        if !next.is_positive() {
            return Err(Error::RecursionBreakdown(m + 1));
        }
        rs.push(next);
    }
    let r: Vec<f64> = rs[1..].iter().map(Fixed::to_f64).collect();
    let mut h = vec![gamma(0.25) / 2.0];
    for &v in &r {
        h.push(h.last().unwrap() * v);
    }
    let mut coeffs: Vec<Vec<f64>> = vec![vec![1.0]];
    for k in 1..=n_max {
        let mut next = vec![0.0];
        next.extend_from_slice(&coeffs[k - 1]);
        if k >= 2 {
            for (i, c) in coeffs[k - 2].iter().enumerate() {
                next[i] -= r[k - 2] * c;
            }
        }
        coeffs.push(next);
    }
    Ok(OrthoTable { degree: n_max, alpha: vec![0.0; n_max], r, h, weight_id: "exp(-x^4)".into(), coeffs })
}

/// `(sqrt(m/12), sqrt(m/12) exp(1/(4 m^2)))`.
pub fn r_band(m: usize) -> (f64, f64) {
    let lo = (m as f64 / 12.0).sqrt();
    (lo, lo * (1.0 / (4.0 * (m * m) as f64)).exp())
}

/// Indices `m >= 1` whose `R_m` falls outside the band.
pub fn band_violations(table: &OrthoTable) -> Vec<usize> {
    (1..=table.degree)
        .filter(|&m| {
            let (lo, hi) = r_band(m);
            let v = table.r_at(m);
            !(lo < v && v < hi)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaDet {
    pub direct: LogValue,
    pub via_norms: LogValue,
    pub rel_diff: f64,
}

/// `det_{0<=k,l<n} Gamma((2k+2l+1)/4)` directly and as `2^n prod h_{2m}`.
pub fn gamma_quarter_det(n: usize) -> Result<GammaDet> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let m: Vec<Vec<f64>> = (0..n).map(|k| (0..n).map(|l| gamma((2 * k + 2 * l + 1) as f64 / 4.0)).collect()).collect();
    let direct = det_log(m);
    let table = quartic_r_sequence((2 * n - 2).max(1))?;
    let mut via = LogValue::from_f64(2f64.powi(n as i32));
    for t in 0..n {
        via = via * LogValue::from_f64(table.h[2 * t]);
    }
    let rel_diff = (direct.log_abs - via.log_abs).exp_m1().abs();
    Ok(GammaDet { direct, via_norms: via, rel_diff })
}

/// `U[m][k]`, the coefficient of `x^(2k)` in `P_{2m}` for the quartic weight.
pub fn u_coefficients(n_max: usize) -> Result<Vec<Vec<f64>>> {
    let table = quartic_r_sequence((2 * n_max).max(1))?;
    let r = |j: isize| if j <= 0 { 0.0 } else { table.r_at(j as usize) };
    let mut u: Vec<Vec<f64>> = Vec::with_capacity(n_max + 1);
    u.push(vec![1.0]);
    for m in 1..=n_max {
        let mi = m as isize;
        let mut row = vec![0.0; m + 1];
        for k in 0..=m {
            let get = |mm: usize, kk: usize| u[mm].get(kk).copied().unwrap_or(0.0);
            let mut v = if k >= 1 { get(m - 1, k - 1) } else { 0.0 };
            v -= (r(2 * mi - 1) + r(2 * mi - 2)) * get(m - 1, k);
            if m >= 2 {
                v -= r(2 * mi - 2) * r(2 * mi - 3) * get(m - 2, k);
            }
            row[k] = v;
        }
        u.push(row);
    }
    Ok(u)
}

fn double_factorial_odd(m: usize) -> f64 {
    // (2m-1)!!
    (1..=m).map(|j| (2 * j - 1) as f64).product()
}

/// `binom(m+k, m-k) exp(pi^2/32) 12^((k-m)/2) sqrt((2m-1)!!/(2k-1)!!)`.
pub fn u_bound(m: usize, k: usize) -> f64 {
    assert!(k <= m);
    binomial_f64((m + k) as u64, (m - k) as u64)
        * (PI * PI / 32.0).exp()
        * 12f64.powf((k as f64 - m as f64) / 2.0)
        * (double_factorial_odd(m) / double_factorial_odd(k)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_complex_tol;
    use num_complex::Complex64;

    #[test]
    fn hermite_from_moments() {
        let t = ops_from_moments(&MomentSeq::gaussian(6), 6).unwrap();
        assert!((t.h[0] - (2.0 * PI).sqrt()).abs() < 1e-12);
        for (k, (&a, &r)) in t.alpha.iter().zip(&t.r).enumerate() {
            assert!(a.abs() < 1e-10);
            assert!((r - (k + 1) as f64).abs() < 1e-9, "R_{} = {r}", k + 1);
        }
        let p3 = &t.coeffs[3];
        assert!((p3[1] + 3.0).abs() < 1e-10 && (p3[3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn legendre_from_moments() {
        let t = ops_from_moments(&MomentSeq::uniform_unit(4), 4).unwrap();
        assert!((t.h[1] - 1.0 / 12.0).abs() < 1e-14);
        assert!((t.alpha[0] - 0.5).abs() < 1e-14);
        assert!((t.h[2] - 1.0 / 180.0).abs() < 1e-12);
    }

    #[test]
    fn degree_zero() {
        let t = ops_from_moments(&MomentSeq::new(vec![2.5]).unwrap(), 0).unwrap();
        assert_eq!(t.coeffs, vec![vec![1.0]]);
        assert_eq!(t.h, vec![2.5]);
    }

    #[test]
    fn vanishing_hankel_is_rejected() {
        // point mass at 0: rho = (1, 0, 0, ...)
        let m = MomentSeq::new(vec![1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(ops_from_moments(&m, 2), Err(Error::NotQuasiDefinite(1)));
    }

    #[test]
    fn quartic_table_values() {
        let t = quartic_r_sequence(10).unwrap();
        for (m, v) in [(1, 0.3380), (5, 0.6468), (10, 0.9132)] {
            assert!((t.r_at(m) - v).abs() < 5e-5, "R_{m} = {}", t.r_at(m));
        }
        assert!((t.h[0] - gamma(0.25) / 2.0).abs() < 1e-15);
        assert!((t.r_at(1) - gamma(0.75) / gamma(0.25)).abs() < 1e-14);
        assert!(t.alpha.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn quartic_recursion_matches_moments() {
        let rec = quartic_r_sequence(8).unwrap();
        let mom = ops_from_moments(&MomentSeq::quartic(8), 8).unwrap();
        for m in 1..=8 {
            assert!((rec.r_at(m) - mom.r_at(m)).abs() < 1e-8, "m={m}");
            assert!(mom.alpha[m - 1].abs() < 1e-8);
        }
    }

    #[test]
    fn band_holds_except_low_orders() {
        let t = quartic_r_sequence(QUARTIC_MAX).unwrap();
        assert_eq!(band_violations(&t), vec![2]);
        let (lo, _) = r_band(64);
        assert!((t.r_at(64) / lo - 1.0).abs() < 1e-3);
    }

    #[test]
    fn recursion_limits() {
        assert!(quartic_r_sequence(0).is_err());
        assert!(quartic_r_sequence(QUARTIC_MAX + 1).is_err());
    }

    #[test]
    fn orthogonality_by_quadrature() {
        let t = quartic_r_sequence(8).unwrap();
        for j in 0..=8 {
            for k in 0..=j {
                let f = |x: f64| Complex64::new((-x.powi(4)).exp() * t.eval(j, x) * t.eval(k, x), 0.0);
                let v = integrate_complex_tol(f, -8.0, 8.0, 16, 1e-12, 1e-13).re;
                let target = if j == k { t.h[j] } else { 0.0 };
                assert!((v - target).abs() < 1e-8 * t.h[j].max(1.0), "j={j} k={k}: {v} vs {target}");
            }
        }
    }

    #[test]
    fn uniqueness_hankel_vs_recursion() {
        let m = MomentSeq::quartic(8);
        let rec = quartic_r_sequence(6).unwrap();
        for k in 1..=6 {
            let c = hankel_polynomial(&m, k).unwrap();
            for (a, b) in c.iter().zip(&rec.coeffs[k]) {
                assert!((a - b).abs() < 1e-9, "k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn gamma_determinant() {
        let d1 = gamma_quarter_det(1).unwrap();
        assert!((d1.direct.to_f64() - gamma(0.25)).abs() < 1e-13);
        let h = quartic_r_sequence(2).unwrap().h;
        let d2 = gamma_quarter_det(2).unwrap();
        let direct2 = gamma(0.25) * gamma(1.25) - gamma(0.75).powi(2);
        assert!((d2.direct.to_f64() / direct2 - 1.0).abs() < 1e-12);
        assert!((4.0 * h[0] * h[2] / direct2 - 1.0).abs() < 1e-12);
        for n in 1..=6 {
            assert!(gamma_quarter_det(n).unwrap().rel_diff < 1e-8, "n={n}");
        }
    }

    #[test]
    fn u_table_structure() {
        let u = u_coefficients(10).unwrap();
        let r = quartic_r_sequence(20).unwrap();
        assert!((u[1][0] + r.r_at(1)).abs() < 1e-15);
        assert!((u[2][0] - r.r_at(3) * r.r_at(1)).abs() < 1e-14);
        assert!((u[4][3].abs() - 3.94).abs() < 0.01);
        for m in 0..=10 {
            assert_eq!(u[m][m], 1.0);
            for k in 0..=m {
                let sign = if (m + k) % 2 == 0 { 1.0 } else { -1.0 };
                assert!(u[m][k] * sign > 0.0, "sign at ({m},{k})");
                assert!(u[m][k].abs() <= u_bound(m, k), "bound at ({m},{k})");
            }
        }
        assert!((u_bound(1, 0) - 0.393).abs() < 1e-3);
    }
}

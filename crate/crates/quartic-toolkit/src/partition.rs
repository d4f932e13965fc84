//! Partition functions of the quartic Hermitian matrix model
//! `Z = int dX exp(-Tr(E X^2 + g X^4))`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::detkit::{exp_kernel_ratio, vandermonde_det};
use crate::error::{Error, Result};
use crate::numkit::{ln_factorial, mc_mean, LogValue};
use crate::orthopoly::quartic_r_sequence;

#[derive(Debug, Clone, PartialEq)]
pub struct KineticSpectrum {
    pub e: Vec<f64>,
    pub g: f64,
}

impl KineticSpectrum {
    pub fn new(e: Vec<f64>, g: f64) -> Result<Self> {
        if e.is_empty() {
            return Err(Error::Domain("spectrum is empty".into()));
        }
        if e.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::Domain("kinetic eigenvalues must be positive".into()));
        }
        if !(g >= 0.0) {
            return Err(Error::Domain(format!("coupling must be non-negative, got {g}")));
        }
        Ok(KineticSpectrum { e, g })
    }

    pub fn n(&self) -> usize {
        self.e.len()
    }

    /// Mean eigenvalue `xi`.
    pub fn xi(&self) -> f64 {
        self.e.iter().sum::<f64>() / self.n() as f64
    }

    /// Relative deviations `e_j / xi - 1`.
    pub fn eps_tilde(&self) -> Vec<f64> {
        let xi = self.xi();
        self.e.iter().map(|v| v / xi - 1.0).collect()
    }
}

fn pairs(n: usize) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// `prod sqrt(pi/e_k) prod_{k<l} pi/(e_k + e_l)`.
pub fn z_free(spec: &KineticSpectrum) -> LogValue {
    let e = &spec.e;
    let mut ln = 0.0;
    for k in 0..e.len() {
        ln += 0.5 * (PI / e[k]).ln();
        for l in k + 1..e.len() {
            ln += (PI / (e[k] + e[l])).ln();
        }
    }
    LogValue::from_ln(ln)
}

/// `prod(sqrt(pi/e_m) e_m^(1-N)) (pi N / (2 sum 1/e_m))^binom(N,2) exp(-sum 3g/(4 e_m^2))`.
pub fn z_weak(spec: &KineticSpectrum) -> LogValue {
    let n = spec.n() as f64;
    let inv: f64 = spec.e.iter().map(|v| 1.0 / v).sum();
    let mut ln = pairs(spec.n()) * (PI * n / (2.0 * inv)).ln();
    for &v in &spec.e {
        ln += 0.5 * (PI / v).ln() + (1.0 - n) * v.ln() - 3.0 * spec.g / (4.0 * v * v);
    }
    LogValue::from_ln(ln)
}

/// `z_weak` with the additional prefactor `sqrt((N-1)/N)`.
pub fn z_weak_prefactored(spec: &KineticSpectrum) -> LogValue {
    let n = spec.n() as f64;
    if spec.n() == 1 {
        return LogValue::zero();
    }
    z_weak(spec) * LogValue::from_ln(0.5 * ((n - 1.0) / n).ln())
}

/// Expansion of `z_weak` in the deviations `eps_tilde` through sixth order.
pub fn z_weak_expanded(spec: &KineticSpectrum) -> LogValue {
    let n = spec.n() as f64;
    let eps = spec.eps_tilde();
    let s = |k: i32| eps.iter().map(|v| v.powi(k)).sum::<f64>();
    let (s2, s3, s4, s5, s6) = (s(2), s(3), s(4), s(5), s(6));
    let mut ln = pairs(spec.n()) * (PI / (2.0 * spec.xi())).ln();
    for &v in &spec.e {
        ln += 0.5 * (PI / v).ln() - 3.0 * spec.g / (4.0 * v * v);
    }
    ln += (n - 1.0) / 6.0 * s3 - (n - 1.0) / 4.0 * s4 + 3.0 * (n - 1.0) / 10.0 * s5 - (n - 1.0) / 3.0 * s6;
    ln += (n - 1.0) / (4.0 * n) * s2 * s2 - 0.5 * s2 * s3 + 0.5 * s2 * s4;
    ln += 0.25 * s3 * s3 - s2.powi(3) / (6.0 * n);
    LogValue::from_ln(ln)
}

/// Coefficients of the free-theory exponent in power sums `S_k = sum eps_j^k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FreeExpansion {
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub s5: f64,
    pub s6: f64,
    pub s2_s2: f64,
    pub s2_s3: f64,
    pub s2_s4: f64,
    pub s3_s3: f64,
    pub s3_s4: f64,
    pub s2_cubed: f64,
    pub s2_s2_s3: f64,
}

impl FreeExpansion {
    /// Route through the asymptotic polytope volume.
    pub fn via_polytope(n: usize) -> Self {
        let n = n as f64;
        FreeExpansion {
            s2: (n - 2.0) / 8.0,
            s3: -(n - 6.0) / 24.0,
            s4: n / 64.0,
            s2_s2: 3.0 / 64.0,
            s2_s3: -1.0 / 16.0,
            s2_s4: 7.0 / 128.0,
            s3_s3: 3.0 / 128.0,
            s3_s4: -5.0 / 128.0,
            s2_cubed: 1.0 / (16.0 * n),
            s2_s2_s3: -11.0 / (128.0 * n),
            ..Default::default()
        }
    }

    /// Direct expansion of `prod_{k<l} pi/(e_k+e_l)`.
    pub fn direct(n: usize) -> Self {
        let n = n as f64;
        FreeExpansion {
            s2: (n - 2.0) / 8.0,
            s3: -(n - 4.0) / 24.0,
            s4: (n - 8.0) / 64.0,
            s5: -(n - 16.0) / 160.0,
            s6: (n - 32.0) / 384.0,
            s2_s2: 3.0 / 64.0,
            s2_s3: -1.0 / 16.0,
            s2_s4: 5.0 / 128.0,
            s3_s3: 5.0 / 96.0,
            ..Default::default()
        }
    }

    pub fn exponent(&self, eps: &[f64]) -> f64 {
        let s = |k: i32| eps.iter().map(|v| v.powi(k)).sum::<f64>();
        let (s2, s3, s4, s5, s6) = (s(2), s(3), s(4), s(5), s(6));
        self.s2 * s2
            + self.s3 * s3
            + self.s4 * s4
            + self.s5 * s5
            + self.s6 * s6
            + self.s2_s2 * s2 * s2
            + self.s2_s3 * s2 * s3
            + self.s2_s4 * s2 * s4
            + self.s3_s3 * s3 * s3
            + self.s3_s4 * s3 * s4
            + self.s2_cubed * s2.powi(3)
            + self.s2_s2_s3 * s2 * s2 * s3
    }
}

/// `ln z_free - ln[prod sqrt(pi/e_k) (pi/(2 xi))^binom(N,2)]`.
pub fn free_exponent_exact(spec: &KineticSpectrum) -> f64 {
    let eps = spec.eps_tilde();
    let mut v = 0.0;
    for k in 0..eps.len() {
        for l in k + 1..eps.len() {
            v -= (0.5 * (eps[k] + eps[l])).ln_1p();
        }
    }
    v
}

/// `ln U = binom(N,2) ln pi - sum_{m=0}^{N} ln m!`.
pub fn ln_measure_constant(n: usize) -> f64 {
    pairs(n) * PI.ln() - (0..=n as u64).map(ln_factorial).sum::<f64>()
}

/// `U g^(-N^2/4) N! prod_{t<N} h_t` for `E = 0`.
pub fn z_zero_kinetic(n: usize, g: f64) -> Result<LogValue> {
    if !(g > 0.0) {
        return Err(Error::Domain(format!("coupling must be positive, got {g}")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let table = quartic_r_sequence(n.max(1))?;
    let mut ln = ln_measure_constant(n) - (n * n) as f64 / 4.0 * g.ln() + ln_factorial(n as u64);
    for t in 0..n {
        ln += table.h[t].ln();
    }
    Ok(LogValue::from_ln(ln))
}

/// `(prod_{m<N} m!) t^(-binom(N,2)) det(exp(t x_k y_l)) / (Delta(x) Delta(y))`,
/// the normalised unitary-group integral of `exp(t Tr(X U Y U*))`.
pub fn hciz_value(x: &[f64], y: &[f64], t: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension { expected: x.len(), got: y.len() });
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let n = x.len();
    let ratio = exp_kernel_ratio(x, y, Complex64::new(t, 0.0)).re;
    let ln_fact: f64 = (0..n as u64).map(ln_factorial).sum();
    Ok(ratio * (ln_fact - pairs(n) * t.abs().ln()).exp() * if t < 0.0 && (pairs(n) as u64) % 2 == 1 { -1.0 } else { 1.0 })
}

/// Haar average of `exp(t Tr(X U Y U*))` over `U(2)` with Euler angles.
pub fn hciz_haar_mc(x: [f64; 2], y: [f64; 2], t: f64, samples: u64, seed: u64) -> (f64, f64) {
    mc_mean(samples, seed, |rng| {
        let c2: f64 = rng.random();
        let (ct, st) = (c2.sqrt(), (1.0 - c2).sqrt());
        let (psi, chi, alpha): (f64, f64, f64) =
            (2.0 * PI * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
        let g = Complex64::from_polar(1.0, alpha);
        let u = [
            [g * Complex64::from_polar(ct, psi), g * Complex64::from_polar(st, chi)],
            [-g * Complex64::from_polar(st, -chi), g * Complex64::from_polar(ct, -psi)],
        ];
        let mut tr = 0.0;
        for k in 0..2 {
            for l in 0..2 {
                tr += x[k] * y[l] * u[k][l].norm_sqr();
            }
        }
        (t * tr).exp()
    })
}

/// Integrand over eigenvalues whose integral times `U` is `Z`:
/// `Delta(lambda)^2 exp(-g sum lambda^4)` times the unitary average of
/// `exp(-Tr(E U Lambda^2 U*))`. Finite at `lambda_m = -lambda_n`.
pub fn eigen_integrand(spec: &KineticSpectrum, lambda: &[f64]) -> Result<f64> {
    if lambda.len() != spec.n() {
        return Err(Error::Dimension { expected: spec.n(), got: lambda.len() });
    }
    let sq: Vec<f64> = lambda.iter().map(|v| v * v).collect();
    let vd = vandermonde_det(lambda);
    if vd == 0.0 {
        return Ok(0.0);
    }
    let quartic: f64 = sq.iter().map(|v| v * v).sum();
    Ok(vd * vd * (-spec.g * quartic).exp() * hciz_value(&spec.e, &sq, -1.0)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McValue {
    pub estimate: f64,
    pub std_error: f64,
}

/// Monte Carlo of `U int eigen_integrand` with an independent Gaussian proposal.
pub fn z_mc_eigen(spec: &KineticSpectrum, samples: u64, seed: u64) -> Result<McValue> {
    let n = spec.n();
    let e_min = spec.e.iter().cloned().fold(f64::INFINITY, f64::min);
    let var = n as f64 / (2.0 * (e_min + spec.g.sqrt()));
    let sd = var.sqrt();
    let ln_u = ln_measure_constant(n);
    let ln_q_norm = 0.5 * n as f64 * (2.0 * PI * var).ln();
    let (mean, se) = mc_mean(samples, seed, |rng| {
        let lambda: Vec<f64> = (0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect();
        let f = eigen_integrand(spec, &lambda).unwrap_or(0.0);
        let ln_q = -lambda.iter().map(|v| v * v).sum::<f64>() / (2.0 * var) - ln_q_norm;
        f * (ln_u - ln_q).exp()
    });
    Ok(McValue { estimate: mean, std_error: se })
}

pub const MATRIX_MC_MAX_N: usize = 4;

/// Monte Carlo of `int dX exp(-Tr(E X^2 + g X^4))` over Hermitian `N x N`
/// matrices, with independent Gaussian proposals on the `N^2` real components
/// matched to the quadratic form (plus `sqrt(g)/2` for the quartic term).
pub fn z_mc_matrix(spec: &KineticSpectrum, samples: u64, seed: u64) -> Result<McValue> {
    matrix_mc(&spec.e, spec.g, samples, seed)
}

/// As `z_mc_matrix` with `E = 0`.
pub fn z_mc_zero_kinetic(n: usize, g: f64, samples: u64, seed: u64) -> Result<McValue> {
    if !(g > 0.0) {
        return Err(Error::Domain(format!("coupling must be positive, got {g}")));
    }
    matrix_mc(&vec![0.0; n], g, samples, seed)
}

fn matrix_mc(e: &[f64], g: f64, samples: u64, seed: u64) -> Result<McValue> {
    let n = e.len();
    if n > MATRIX_MC_MAX_N {
        return Err(Error::Resource(format!("matrix Monte Carlo supports N <= {MATRIX_MC_MAX_N}, got {n}")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let a: Vec<f64> = e.iter().map(|v| v + 0.5 * g.sqrt()).collect();
    let mut ln_zq = 0.0;
    for k in 0..n {
        ln_zq += 0.5 * (PI / a[k]).ln();
        for l in k + 1..n {
            ln_zq += (PI / (a[k] + a[l])).ln();
        }
    }
    let (mean, se) = mc_mean(samples, seed, |rng| {
        let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        let mut ln_w = ln_zq;
        for k in 0..n {
            let d = rng.sample::<f64, _>(StandardNormal) / (2.0 * a[k]).sqrt();
            m[k][k] = Complex64::new(d, 0.0);
            ln_w -= (e[k] - a[k]) * d * d;
            for l in k + 1..n {
                let s = 1.0 / (2.0 * (a[k] + a[l])).sqrt();
                let re = s * rng.sample::<f64, _>(StandardNormal);
                let im = s * rng.sample::<f64, _>(StandardNormal);
                m[k][l] = Complex64::new(re, im);
                m[l][k] = Complex64::new(re, -im);
                ln_w -= (e[k] + e[l] - a[k] - a[l]) * (re * re + im * im);
            }
        }
        if g > 0.0 {
            let mut tr4 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let sq: Complex64 = (0..n).map(|k| m[i][k] * m[k][j]).sum();
                    tr4 += sq.norm_sqr();
                }
            }
            ln_w -= g * tr4;
        }
        ln_w.exp()
    });
    Ok(McValue { estimate: mean, std_error: se })
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    fn spec(e: &[f64], g: f64) -> KineticSpectrum {
        KineticSpectrum::new(e.to_vec(), g).unwrap()
    }

    #[test]
    fn free_examples() {
        assert!((z_free(&spec(&[1.0, 1.1, 1.2], 0.0)).to_f64() - 14.142).abs() < 1e-3);
        assert!((z_free(&spec(&[2.0], 0.0)).to_f64() - (PI / 2.0).sqrt()).abs() < 1e-15);
        assert!((z_free(&spec(&[1.0, 1.0], 0.0)).to_f64() - PI * PI / 2.0).abs() < 1e-13);
        assert!(KineticSpectrum::new(vec![1.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn weak_coupling_limits() {
        for n in [3usize, 6] {
            let s = spec(&vec![1.3; n], 1e-12);
            assert!((z_weak(&s).log_abs - z_free(&s).log_abs).abs() < 1e-11);
            let with_factor = z_weak_prefactored(&s).log_abs - z_free(&s).log_abs;
            assert!((with_factor - 0.5 * ((n as f64 - 1.0) / n as f64).ln()).abs() < 1e-11);
        }
        let a = spec(&[0.9, 1.0, 1.3], 0.01);
        let b = spec(&[0.9, 1.0, 1.3], 0.02);
        let shift: f64 = a.e.iter().map(|v| -3.0 * 0.01 / (4.0 * v * v)).sum();
        assert!(((z_weak(&b).log_abs - z_weak(&a).log_abs) - shift).abs() < 1e-13);
    }

    #[test]
    fn weak_expansion_agrees_near_symmetry() {
        let e: Vec<f64> = [0.01, -0.008, 0.004, -0.01, 0.006, -0.002].iter().map(|d| 2.0 * (1.0 + d)).collect();
        let s = spec(&e, 0.05);
        assert!((z_weak(&s).log_abs - z_weak_expanded(&s).log_abs).abs() < 1e-4);
    }

    #[test]
    fn direct_expansion_tracks_exact_free_energy() {
        let base = [0.7, -0.2, 0.4, -1.0, 0.5, -0.4];
        let mut prev = f64::INFINITY;
        for scale in [0.1, 0.05, 0.025] {
            let e: Vec<f64> = base.iter().map(|d| 1.5 * (1.0 + scale * d)).collect();
            let s = spec(&e, 0.0);
            let err = (free_exponent_exact(&s) - FreeExpansion::direct(6).exponent(&s.eps_tilde())).abs();
            assert!(err < prev / 30.0);
            prev = err;
        }
    }

    #[test]
    fn polytope_route_matches_only_at_low_order() {
        for n in [6usize, 10, 40] {
            let p = FreeExpansion::via_polytope(n);
            let d = FreeExpansion::direct(n);
            assert_eq!(p.s2, d.s2);
            assert_eq!(p.s2_s2, d.s2_s2);
            assert_eq!(p.s2_s3, d.s2_s3);
            assert!((p.s3 - d.s3 - 1.0 / 12.0).abs() < 1e-15);
            assert!((p.s4 - d.s4 - 1.0 / 8.0).abs() < 1e-15);
            assert!(p.s3_s3 != d.s3_s3 && p.s2_s4 != d.s2_s4);
        }
    }

    #[test]
    fn zero_kinetic_examples() {
        assert!((z_zero_kinetic(1, 1.0).unwrap().to_f64() - gamma(0.25) / 2.0).abs() < 1e-14);
        let a = z_zero_kinetic(3, 1.0).unwrap().log_abs;
        let b = z_zero_kinetic(3, 2.5).unwrap().log_abs;
        assert!((b - a + 9.0 / 4.0 * 2.5f64.ln()).abs() < 1e-12);
        assert!(z_zero_kinetic(2, 0.0).is_err());
        let mc = z_mc_zero_kinetic(2, 1.0, 400_000, 42).unwrap();
        let exact = z_zero_kinetic(2, 1.0).unwrap().to_f64();
        assert!((mc.estimate / exact - 1.0).abs() < 0.05, "{} vs {exact}", mc.estimate);
    }

    #[test]
    fn hciz_examples() {
        let e1 = std::f64::consts::E - 1.0;
        assert!((hciz_value(&[0.0, 1.0], &[0.0, 1.0], 1.0).unwrap() - e1).abs() < 1e-13);
        assert!((hciz_value(&[0.3, 1.1, 2.0], &[0.5, -0.2, 0.9], 1e-9).unwrap() - 1.0).abs() < 1e-8);
        let limit = hciz_value(&[0.2, 0.9], &[0.4, 0.4], 0.7).unwrap();
        let probe = hciz_value(&[0.2, 0.9], &[0.4, 0.4 + 1e-7], 0.7).unwrap();
        assert!((limit - probe).abs() < 1e-6 * limit && limit.is_finite());
        let (mc, se) = hciz_haar_mc([0.0, 1.0], [0.0, 1.0], 1.0, 200_000, 42);
        assert!((mc / e1 - 1.0).abs() < 0.01 && se < 0.01);
    }

    #[test]
    fn eigen_integrand_properties() {
        let s = spec(&[1.0, 1.1, 1.2], 0.3);
        let at = eigen_integrand(&s, &[0.7, -0.7, 0.2]).unwrap();
        let near = eigen_integrand(&s, &[0.7, -0.7 + 1e-6, 0.2]).unwrap();
        assert!(at.is_finite() && (at - near).abs() < 1e-4 * at.abs());
        assert_eq!(eigen_integrand(&s, &[0.4, 0.4, 0.4]).unwrap(), 0.0);
        let p = eigen_integrand(&s, &[0.3, -1.2, 0.8]).unwrap();
        let q = eigen_integrand(&s, &[-0.3, 1.2, -0.8]).unwrap();
        assert!((p - q).abs() < 1e-14 * p.abs());
        assert!(p > 0.0);
    }

    #[test]
    fn gaussian_measure_constant() {
        // E = 1/2, g = 0 gives (2 pi)^(N/2) pi^binom(N,2) / 2^binom(N,2)
        for n in 1..=4usize {
            let s = spec(&vec![0.5; n], 0.0);
            let expected = 0.5 * n as f64 * (2.0 * PI).ln() + pairs(n) * PI.ln();
            assert!((z_free(&s).log_abs - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_mc_examples() {
        let s = spec(&[1.0], 0.0);
        let v = z_mc_matrix(&s, 10_000, 42).unwrap();
        assert!((v.estimate - PI.sqrt()).abs() <= 3.0 * v.std_error + 1e-12);
        let s = spec(&[1.0, 1.1, 1.2], 0.0);
        let v = z_mc_matrix(&s, 100_000, 42).unwrap();
        assert!((v.estimate / 14.142 - 1.0).abs() < 0.02);
        assert!(matches!(z_mc_matrix(&spec(&[1.0; 5], 0.0), 10, 42), Err(Error::Resource(_))));
    }

    #[test]
    fn matrix_and_eigen_forms_agree() {
        let s = spec(&[1.0, 2.0], 0.5);
        let a = z_mc_matrix(&s, 400_000, 42).unwrap();
        let b = z_mc_eigen(&s, 400_000, 43).unwrap();
        let tol = 3.0 * (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!((a.estimate - b.estimate).abs() < tol, "{a:?} {b:?}");
    }

    #[test]
    fn mc_is_deterministic() {
        let s = spec(&[1.0, 2.0], 0.5);
        assert_eq!(z_mc_matrix(&s, 50_000, 7).unwrap(), z_mc_matrix(&s, 50_000, 7).unwrap());
        assert_eq!(z_mc_eigen(&s, 50_000, 7).unwrap(), z_mc_eigen(&s, 50_000, 7).unwrap());
    }
}

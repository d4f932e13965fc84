//! Shared asymptotic and combinatorial utilities.

use std::f64::consts::PI;
use std::ops::{Div, Mul};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// A real number stored as `sign * exp(log_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub log_abs: f64,
    pub sign: i8,
}

impl LogValue {
    pub fn zero() -> Self {
        LogValue { log_abs: f64::NEG_INFINITY, sign: 0 }
    }

    pub fn one() -> Self {
        LogValue { log_abs: 0.0, sign: 1 }
    }

    /// Positive value `exp(log_abs)`.
    pub fn from_ln(log_abs: f64) -> Self {
        LogValue { log_abs, sign: 1 }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::zero()
        } else {
            LogValue { log_abs: x.abs().ln(), sign: if x > 0.0 { 1 } else { -1 } }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_abs.exp()
        }
    }

    pub fn powf(&self, p: f64) -> Self {
        assert!(self.sign >= 0, "real power of a negative LogValue");
        if self.sign == 0 {
            return if p == 0.0 { Self::one() } else { Self::zero() };
        }
        LogValue { log_abs: self.log_abs * p, sign: 1 }
    }

    /// Quotient `self / other` as a plain float; intended for ratios near one.
    pub fn ratio(&self, other: &LogValue) -> f64 {
        (*self / *other).to_f64()
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        let sign = self.sign * rhs.sign;
        if sign == 0 {
            return LogValue::zero();
        }
        LogValue { log_abs: self.log_abs + rhs.log_abs, sign }
    }
}

impl Div for LogValue {
    type Output = LogValue;
    fn div(self, rhs: LogValue) -> LogValue {
        assert!(rhs.sign != 0, "division by a zero LogValue");
        if self.sign == 0 {
            return LogValue::zero();
        }
        LogValue { log_abs: self.log_abs - rhs.log_abs, sign: self.sign * rhs.sign }
    }
}

/// ln n! from the Stirling approximation `sqrt(2 pi n) n^n e^-n (1 + 1/(12n))^order`.
pub fn stirling_ln_factorial(n: u64, order: u8) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let x = n as f64;
    let mut v = 0.5 * (2.0 * PI * x).ln() + x * x.ln() - x;
    if order >= 1 {
        v += (1.0 / (12.0 * x)).ln_1p();
    }
    v
}

pub fn ln_factorial(n: u64) -> f64 {
    statrs::function::gamma::ln_gamma(n as f64 + 1.0)
}

/// Principal branch of the Lambert W function for `x >= -1/e`.
pub fn lambert_w0(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut w = if x > -0.25 { x.ln_1p() } else { -0.5 };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let step = f / (ew * (w + 1.0));
        w -= step;
        if step.abs() < 1e-12 * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

/// Threshold `W(1/e)` below which the truncation bound decays in `n`.
pub fn truncation_threshold() -> f64 {
    lambert_w0((-1.0f64).exp())
}

/// Relative error bound `(gamma n / 2pi)^(1/2) (gamma e^(1+gamma))^n` for truncating
/// `exp(-gamma n)` after `n` Taylor terms.
pub fn taylor_truncation_bound(gamma: f64, n: u64) -> f64 {
    if gamma <= 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    let ln = 0.5 * (gamma * nf / (2.0 * PI)).ln() + nf * (gamma.ln() + 1.0 + gamma);
    ln.exp()
}

/// Table of `p_m(n)`, the number of ways to write `n` as a sum of `m` distinct
/// non-negative integers.
#[derive(Debug, Clone)]
pub struct PartitionTable {
    pub max_m: usize,
    pub max_n: usize,
    values: Vec<Vec<BigUint>>,
}

impl PartitionTable {
    pub fn new(max_m: usize, max_n: usize) -> Self {
        let mut values = vec![vec![BigUint::zero(); max_n + 1]; max_m + 1];
        for m in 1..=max_m {
            for n in 0..=max_n {
                values[m][n] = if m == 1 {
                    BigUint::one()
                } else {
                    let mut v = BigUint::zero();
                    if n + 1 >= m {
                        v += &values[m - 1][n + 1 - m];
                    }
                    if n >= m {
                        v += &values[m][n - m];
                    }
                    v
                };
            }
        }
        PartitionTable { max_m, max_n, values }
    }

    pub fn get(&self, m: usize, n: usize) -> &BigUint {
        &self.values[m][n]
    }
}

pub fn distinct_partition_count(m: usize, n: usize) -> BigUint {
    assert!(m >= 1, "m must be positive");
    PartitionTable::new(m, n).get(m, n).clone()
}

/// The nested alternating composition sum
/// `C_n = sum_m (-1)^(m+n) sum_{mu |= n, m parts} prod 1/mu_j!`.
pub fn alternating_composition_sum(n: usize) -> BigRational {
    let inv_fact: Vec<BigRational> = (0..=n)
        .map(|k| BigRational::new(BigInt::one(), factorial(k as u64).into()))
        .collect();
    // c[k] = sum over compositions of k into the current number of parts
    let mut c: Vec<BigRational> = (0..=n).map(|k| if k == 0 { BigRational::zero() } else { inv_fact[k].clone() }).collect();
    let mut total = BigRational::zero();
    for m in 1..=n {
        if m > 1 {
            let mut next = vec![BigRational::zero(); n + 1];
            for k in m..=n {
                let mut acc = BigRational::zero();
                for j in 1..=k - (m - 1) {
                    acc += &c[k - j] * &inv_fact[j];
                }
                next[k] = acc;
            }
            c = next;
        }
        if (m + n) % 2 == 0 {
            total += &c[n];
        } else {
            total -= &c[n];
        }
    }
    total
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut r = BigUint::one();
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

pub fn binomial_f64(n: u64, k: u64) -> f64 {
    binomial(n, k).to_f64().unwrap_or(f64::INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleSumKind {
    F,
    G,
}

/// `F = sum_k x_k^p prod_{t!=k} (x_t - x_k)^-1` and
/// `G = sum_k x_k^p prod_{t!=k} (x_t - z)/(x_t - x_k)`.
pub fn symmetric_pole_sum(kind: PoleSumKind, p: u32, x: &[Complex64], z: Complex64) -> Result<Complex64> {
    let scale = x.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    for i in 0..x.len() {
        for j in 0..i {
            if (x[i] - x[j]).norm() <= 1e-12 * scale {
                return Err(Error::DegenerateNodes);
            }
        }
    }
    let mut sum = Complex64::zero();
    for (k, &xk) in x.iter().enumerate() {
        let mut term = xk.powu(p);
        for (t, &xt) in x.iter().enumerate() {
            if t == k {
                continue;
            }
            term /= xt - xk;
            if kind == PoleSumKind::G {
                term *= xt - z;
            }
        }
        sum += term;
    }
    Ok(sum)
}

/// Complete homogeneous symmetric polynomial `h_p(x)`.
pub fn complete_homogeneous<T>(x: &[T], p: usize) -> T
where
    T: Clone + Zero + One + std::ops::Add<Output = T> + for<'a> std::ops::Mul<&'a T, Output = T>,
{
    let mut h = vec![T::zero(); p + 1];
    h[0] = T::one();
    for xi in x {
        for d in 1..=p {
            let prev = h[d - 1].clone() * xi;
            h[d] = h[d].clone() + prev;
        }
    }
    h[p].clone()
}

/// Elementary symmetric polynomials `e_0..e_n` of the given values.
pub fn elementary_symmetric(x: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; x.len() + 1];
    e[0] = 1.0;
    for (i, &xi) in x.iter().enumerate() {
        for d in (1..=i + 1).rev() {
            e[d] += e[d - 1] * xi;
        }
    }
    e
}

/// Binary fixed-point number with `Fixed::BITS` fractional bits, for recursions
/// that amplify rounding error beyond double precision.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fixed {
    v: BigInt,
}

impl Fixed {
    pub const BITS: usize = 640;

    pub fn from_int(n: i64) -> Self {
        Fixed { v: BigInt::from(n) << Self::BITS }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Fixed { v: (BigInt::from(num) << Self::BITS) / BigInt::from(den) }
    }

    pub fn add(&self, o: &Fixed) -> Fixed {
        Fixed { v: &self.v + &o.v }
    }

    pub fn sub(&self, o: &Fixed) -> Fixed {
        Fixed { v: &self.v - &o.v }
    }

    pub fn mul(&self, o: &Fixed) -> Fixed {
        Fixed { v: (&self.v * &o.v) >> Self::BITS }
    }

    pub fn div(&self, o: &Fixed) -> Fixed {
        Fixed { v: (&self.v << Self::BITS) / &o.v }
    }

    pub fn sqrt(&self) -> Fixed {
        assert!(!self.v.is_negative(), "sqrt of negative fixed-point value");
        Fixed { v: (&self.v << Self::BITS).sqrt() }
    }

    pub fn is_positive(&self) -> bool {
        self.v.is_positive()
    }

    pub fn to_f64(&self) -> f64 {
        self.v.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(Self::BITS as i32))
    }

    fn atan_inv(k: i64) -> Fixed {
        // atan(1/k) = sum (-1)^j / ((2j+1) k^(2j+1))
        let one = BigInt::one() << Self::BITS;
        let k2 = BigInt::from(k * k);
        let mut power = &one / BigInt::from(k);
        let mut sum = BigInt::zero();
        let mut j: i64 = 0;
        while !power.is_zero() {
            let term = &power / BigInt::from(2 * j + 1);
            if j % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
            power /= &k2;
            j += 1;
        }
        Fixed { v: sum }
    }

    pub fn pi() -> Fixed {
        let a = Self::atan_inv(5).mul(&Fixed::from_int(16));
        let b = Self::atan_inv(239).mul(&Fixed::from_int(4));
        a.sub(&b)
    }

    /// Arithmetic-geometric mean.
    pub fn agm(a: &Fixed, b: &Fixed) -> Fixed {
        let mut a = a.clone();
        let mut b = b.clone();
        for _ in 0..64 {
            let an = Fixed { v: (&a.v + &b.v) >> 1 };
            let bn = a.mul(&b).sqrt();
            let done = (&an.v - &bn.v).abs() <= BigInt::from(4);
            a = an;
            b = bn;
            if done {
                break;
            }
        }
        a
    }
}

/// Samples per Monte Carlo block; each block draws from its own ChaCha stream.
pub const BLOCK: usize = 1 << 14;

pub fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// Mean and standard error of `f` over `samples` draws, parallel over blocks and
/// reduced in block order so the result depends only on `seed`.
pub fn mc_mean<F>(samples: u64, seed: u64, f: F) -> (f64, f64)
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if samples == 0 {
        return (f64::NAN, f64::NAN);
    }
    let blocks = (samples as usize).div_ceil(BLOCK);
    let partial: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let count = BLOCK.min(samples as usize - b * BLOCK);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let w = f(&mut rng);
                s1 += w;
                s2 += w * w;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = partial.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let m = samples as f64;
    let mean = s1 / m;
    let var = (s2 / m - mean * mean).max(0.0);
    (mean, (var / m).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn stirling_examples() {
        let v = stirling_ln_factorial(1, 1);
        assert!((v - ((2.0 * PI).sqrt() * (-1.0f64).exp() * 13.0 / 12.0).ln()).abs() < 1e-14);
        assert!((v.exp() - 0.99898).abs() < 1e-5);
        assert!((stirling_ln_factorial(10, 1) - 3628800f64.ln()).abs() < 1e-4);
        assert!((stirling_ln_factorial(1, 0) - ((2.0 * PI).sqrt() / 1f64.exp()).ln()).abs() < 1e-14);
        assert_eq!(stirling_ln_factorial(0, 1), 0.0);
    }

    #[test]
    fn stirling_error_is_second_order() {
        for n in [10u64, 20, 40, 80] {
            let err = (stirling_ln_factorial(n, 1) - ln_factorial(n)).abs();
            let nf = n as f64;
            assert!(err * nf * nf < 0.01, "n={n} err={err}");
        }
    }

    #[test]
    fn lambert_threshold() {
        let w = truncation_threshold();
        assert!((w - 0.278464542761074).abs() < 1e-12);
        assert!((w * w.exp() - (-1.0f64).exp()).abs() < 1e-14);
        assert!((lambert_w0(1.0) - 0.567143290409784).abs() < 1e-12);
    }

    #[test]
    fn truncation_bound_examples() {
        assert!((0.25 * 1.25f64.exp() - 0.8725).abs() < 1e-3);
        assert!((0.30 * 1.30f64.exp() - 1.1007).abs() < 1e-3);
        assert!(taylor_truncation_bound(0.25, 400) < 1e-20);
        assert!(taylor_truncation_bound(0.30, 400) > 1e10);
        for n in 1..20 {
            assert_eq!(taylor_truncation_bound(0.0, n), 0.0);
        }
    }

    #[test]
    fn partition_examples() {
        assert_eq!(distinct_partition_count(2, 5), BigUint::from(3u32));
        assert_eq!(distinct_partition_count(4, 10), BigUint::from(5u32));
        assert_eq!(distinct_partition_count(1, 7), BigUint::from(1u32));
    }

    fn brute_distinct(m: usize, n: usize) -> usize {
        fn rec(m: usize, n: usize, min: usize) -> usize {
            if m == 0 {
                return usize::from(n == 0);
            }
            (min..=n).map(|v| rec(m - 1, n - v, v + 1)).sum()
        }
        rec(m, n, 0)
    }

    #[test]
    fn partition_table_matches_enumeration() {
        let table = PartitionTable::new(4, 12);
        for m in 1..=4 {
            for n in 0..=12 {
                assert_eq!(table.get(m, n), &BigUint::from(brute_distinct(m, n)), "m={m} n={n}");
            }
        }
    }

    #[test]
    fn alternating_sum_is_inverse_factorial() {
        for n in 1..=10 {
            let expected = BigRational::new(BigInt::one(), factorial(n as u64).into());
            assert_eq!(alternating_composition_sum(n), expected, "n={n}");
        }
    }

    #[test]
    fn pole_sum_examples() {
        let x: Vec<Complex64> = [1.0, 2.0, 3.0].iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let z = Complex64::zero();
        assert!(symmetric_pole_sum(PoleSumKind::F, 1, &x, z).unwrap().norm() < 1e-14);
        assert!((symmetric_pole_sum(PoleSumKind::F, 2, &x, z).unwrap() - 1.0).norm() < 1e-14);
        let x4: Vec<Complex64> = [0.3, -1.2, 2.5, 0.9].iter().map(|&v| Complex64::new(v, 0.1 * v)).collect();
        let g = symmetric_pole_sum(PoleSumKind::G, 0, &x4, Complex64::new(0.7, 0.0)).unwrap();
        assert!((g - 1.0).norm() < 1e-12);
        let dup = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert_eq!(symmetric_pole_sum(PoleSumKind::F, 0, &dup, z), Err(Error::DegenerateNodes));
    }

    #[test]
    fn fixed_point_constants() {
        assert!((Fixed::pi().to_f64() - PI).abs() < 1e-15);
        let agm = Fixed::agm(&Fixed::from_int(1), &Fixed::from_int(2).sqrt());
        assert!((agm.to_f64() - 1.198140234735592).abs() < 1e-14);
        assert!((Fixed::from_ratio(1, 3).mul(&Fixed::from_int(3)).to_f64() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_value_arithmetic() {
        let a = LogValue::from_f64(-3.0);
        let b = LogValue::from_f64(2.0);
        assert!(((a * b).to_f64() + 6.0).abs() < 1e-12);
        assert!(((a / b).to_f64() + 1.5).abs() < 1e-12);
        assert_eq!((a * LogValue::zero()).sign, 0);
        assert!(LogValue::from_f64(0.0).is_zero());
    }

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    proptest! {
        #[test]
        fn partition_recursion_and_bound(m in 1usize..6, n in 0usize..40) {
            let t = PartitionTable::new(6, 40);
            let v = t.get(m, n).clone();
            if m >= 2 {
                let mut r = BigUint::zero();
                if n + 1 >= m { r += t.get(m - 1, n + 1 - m); }
                if n >= m { r += t.get(m, n - m); }
                prop_assert_eq!(&v, &r);
            }
            let c = m * (m - 1) / 2;
            if n < c {
                prop_assert!(v.is_zero());
            } else {
                prop_assert!(v <= BigUint::one() << (n - c));
            }
        }

        #[test]
        fn pole_sum_equals_complete_homogeneous(
            nums in proptest::collection::vec(-40i64..40, 1..6),
            p in 0u32..9,
        ) {
            let mut xs: Vec<i64> = nums.clone();
            xs.sort();
            xs.dedup();
            let n = xs.len();
            prop_assume!(p as usize <= n + 3);
            let xr: Vec<BigRational> = xs.iter().map(|&v| rational(v, 7)).collect();
            // exact pole sum
            let mut f = BigRational::zero();
            for k in 0..n {
                let mut term = num_traits::pow(xr[k].clone(), p as usize);
                for t in 0..n {
                    if t != k { term /= &xr[t] - &xr[k]; }
                }
                f += term;
            }
            let expected = if (p as usize) + 1 < n {
                BigRational::zero()
            } else {
                let h = complete_homogeneous(&xr, p as usize + 1 - n);
                if (n - 1) % 2 == 0 { h } else { -h }
            };
            prop_assert_eq!(f, expected);
        }
    }
}

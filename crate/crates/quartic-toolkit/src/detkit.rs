//! Determinant identities: Vandermonde machinery, the exponential-kernel
//! factorisation, Cauchy-Binet and two closed-form rational determinants.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numkit::{binomial, elementary_symmetric, factorial, ln_factorial, LogValue};

/// Nodes that are pairwise distinct relative to their range.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    pub x: Vec<f64>,
}

impl NodeSet {
    pub const DISTINCT_TOL: f64 = 1e-12;

    pub fn new(x: Vec<f64>) -> Result<Self> {
        let range = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - x.iter().cloned().fold(f64::INFINITY, f64::min);
        let scale = range.max(x.iter().map(|v| v.abs()).fold(0.0, f64::max)).max(f64::MIN_POSITIVE);
        for i in 0..x.len() {
            for j in 0..i {
                if (x[i] - x[j]).abs() <= Self::DISTINCT_TOL * scale {
                    return Err(Error::DegenerateNodes);
                }
            }
        }
        Ok(NodeSet { x })
    }
}

/// `prod_{k<l} (x_l - x_k)`.
pub fn vandermonde_det(x: &[f64]) -> f64 {
    let mut d = 1.0;
    for l in 0..x.len() {
        for k in 0..l {
            d *= x[l] - x[k];
        }
    }
    d
}

pub fn vandermonde_log(x: &[f64]) -> LogValue {
    let mut v = LogValue::one();
    for l in 0..x.len() {
        for k in 0..l {
            v = v * LogValue::from_f64(x[l] - x[k]);
        }
    }
    v
}

/// `V_kl = x_k^l`.
pub fn vandermonde_matrix(x: &[f64]) -> Vec<Vec<f64>> {
    x.iter().map(|&xk| (0..x.len()).map(|l| xk.powi(l as i32)).collect()).collect()
}

/// Inverse of `vandermonde_matrix`: entry `(j, k)` is
/// `(-1)^(n-1-j) e_{n-1-j}(x without x_k) / prod_{t!=k} (x_k - x_t)`.
pub fn inverse_vandermonde(nodes: &NodeSet) -> Vec<Vec<f64>> {
    let x = &nodes.x;
    let n = x.len();
    let mut inv = vec![vec![0.0; n]; n];
    for k in 0..n {
        let others: Vec<f64> = x.iter().enumerate().filter(|&(t, _)| t != k).map(|(_, &v)| v).collect();
        let e = elementary_symmetric(&others);
        let denom: f64 = others.iter().map(|&xt| x[k] - xt).product();
        for j in 0..n {
            let sign = if (n - 1 - j) % 2 == 0 { 1.0 } else { -1.0 };
            inv[j][k] = sign * e[n - 1 - j] / denom;
        }
    }
    inv
}

pub fn det_f64(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

/// Determinant accumulated in log space, for matrices whose determinant
/// under- or overflows.
pub fn det_log(mut a: Vec<Vec<f64>>) -> LogValue {
    let n = a.len();
    let mut det = LogValue::one();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return LogValue::zero();
        }
        if p != c {
            a.swap(p, c);
            det = det * LogValue::from_f64(-1.0);
        }
        det = det * LogValue::from_f64(a[c][c]);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

pub fn det_complex(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut det = Complex64::one();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm())).unwrap();
        if a[p][c].norm() == 0.0 {
            return Complex64::zero();
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                let v = a[c][k];
                a[r][k] -= f * v;
            }
        }
    }
    det
}

pub fn det_rational(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let v = &f * &a[c][k];
                a[r][k] -= v;
            }
        }
    }
    det
}

/// Solves `a x = b` by partial-pivot elimination.
pub fn solve_f64(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return Err(Error::Singular);
        }
        a.swap(p, c);
        b.swap(p, c);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Ok(x)
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = b[0].len();
    a.iter()
        .map(|row| (0..m).map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum()).collect())
        .collect()
}

/// `det(exp(c x_k y_l)) / (Delta(x) Delta(y))`, finite for coincident nodes.
///
/// Newton divided differences turn the kernel into
/// `D_ij = sum_{m >= max(i,j)} c^m/m! h_{m-i}(x_1..x_{i+1}) h_{m-j}(y_1..y_{j+1})`
/// after centring both node sets, and the ratio is `det D` times the centring
/// factor.
pub fn exp_kernel_ratio(x: &[f64], y: &[f64], c: Complex64) -> Complex64 {
    let n = x.len();
    assert_eq!(n, y.len(), "node sets must have equal size");
    if n == 0 {
        return Complex64::one();
    }
    let mid = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        ((lo + hi) / 2.0, (hi - lo) / 2.0)
    };
    let (x0, xr) = mid(x);
    let (y0, yr) = mid(y);
    let xs: Vec<f64> = x.iter().map(|v| v - x0).collect();
    let ys: Vec<f64> = y.iter().map(|v| v - y0).collect();
    // exp(c x y) = exp(c x0 y0) exp(c x0 y') exp(c x' y0) exp(c x' y')
    let shift = c * (n as f64 * x0 * y0 + x0 * ys.iter().sum::<f64>() + y0 * xs.iter().sum::<f64>());
    let spread = c.norm() * xr * yr;
    if spread > 30.0 {
        let m: Vec<Vec<Complex64>> = xs.iter().map(|&a| ys.iter().map(|&b| (c * a * b).exp()).collect()).collect();
        return det_complex(m) / (vandermonde_det(x) * vandermonde_det(y)) * shift.exp();
    }
    let max_terms = n + 60 + (8.0 * spread) as usize;
    let hx = complete_table(&xs, max_terms);
    let hy = complete_table(&ys, max_terms);
    let mut d = vec![vec![Complex64::zero(); n]; n];
    let mut coef = Complex64::one();
    let mut quiet = 0;
    for m in 0..=max_terms {
        if m > 0 {
            coef = coef * c / m as f64;
        }
        let mut largest_rel: f64 = 0.0;
        for i in 0..n.min(m + 1) {
            for j in 0..n.min(m + 1) {
                let term = coef * hx[i][m - i] * hy[j][m - j];
                d[i][j] += term;
                let scale = d[i][j].norm();
                if scale > 0.0 {
                    largest_rel = largest_rel.max(term.norm() / scale);
                } else if term.norm() > 0.0 {
                    largest_rel = f64::INFINITY;
                }
            }
        }
        if m >= n && largest_rel < 1e-18 {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    det_complex(d) * shift.exp()
}

/// `table[i][p] = h_p(v_1..v_{i+1})`.
fn complete_table(v: &[f64], max_p: usize) -> Vec<Vec<f64>> {
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(v.len());
    let mut prev = vec![0.0; max_p + 1];
    prev[0] = 1.0;
    for &vi in v {
        let mut cur = vec![0.0; max_p + 1];
        cur[0] = 1.0;
        for p in 1..=max_p {
            cur[p] = prev[p] + vi * cur[p - 1];
        }
        table.push(cur.clone());
        prev = cur;
    }
    table
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpDet {
    /// `det(exp(c x_k y_l))`.
    pub exact: Complex64,
    /// `c^binom(N,2) / prod_{m<N} m! * Delta(x) Delta(y)`; equals the determinant
    /// of the exponential series truncated after `N` terms.
    pub factored: Complex64,
    pub ratio: Complex64,
}

pub fn exp_det_factorization(x: &[f64], y: &[f64], c: Complex64) -> ExpDet {
    let n = x.len();
    let vx = vandermonde_det(x);
    let vy = vandermonde_det(y);
    let exact = exp_kernel_ratio(x, y, c) * vx * vy;
    let pairs = (n * (n.max(1) - 1) / 2) as i32;
    let log_fact: f64 = (0..n as u64).map(ln_factorial).sum();
    let factored = c.powi(pairs) * (-log_fact).exp() * vx * vy;
    let ratio = if factored.norm() == 0.0 { Complex64::new(f64::NAN, 0.0) } else { exact / factored };
    ExpDet { exact, factored, ratio }
}

/// `ln |eps^-binom(N,2) det(exp(eps x_k y_l))|`.
pub fn rescaled_log_det(x: &[f64], y: &[f64], eps: f64) -> f64 {
    let n = x.len();
    let pairs = (n * (n - 1) / 2) as f64;
    let r = exp_kernel_ratio(x, y, Complex64::new(eps, 0.0));
    r.norm().ln() + vandermonde_det(x).abs().ln() + vandermonde_det(y).abs().ln() - pairs * eps.ln()
}

fn subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, m, &mut Vec::new(), &mut out);
    out
}

/// `det(A B)` for `A` of size `m x n` and `B` of size `n x m` as the sum over
/// `m`-subsets of products of minors.
pub fn cauchy_binet_det(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let m = a.len();
    let n = b.len();
    if m > n {
        return 0.0;
    }
    subsets(n, m)
        .iter()
        .map(|s| {
            let ma: Vec<Vec<f64>> = a.iter().map(|row| s.iter().map(|&j| row[j]).collect()).collect();
            let mb: Vec<Vec<f64>> = s.iter().map(|&j| b[j].clone()).collect();
            det_f64(ma) * det_f64(mb)
        })
        .sum()
}

pub fn cauchy_binet_det_rational(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> BigRational {
    let m = a.len();
    let n = b.len();
    if m > n {
        return BigRational::zero();
    }
    let mut total = BigRational::zero();
    for s in subsets(n, m) {
        let ma: Vec<Vec<BigRational>> = a.iter().map(|row| s.iter().map(|&j| row[j].clone()).collect()).collect();
        let mb: Vec<Vec<BigRational>> = s.iter().map(|&j| b[j].clone()).collect();
        total += det_rational(ma) * det_rational(mb);
    }
    total
}

fn ratio_int(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// `B(k, l) = (k-1)!(l-1)!/(k+l-1)!`.
pub fn beta_rational(k: u64, l: u64) -> BigRational {
    ratio_int((factorial(k - 1) * factorial(l - 1)).into(), factorial(k + l - 1).into())
}

/// Closed form of `det_{1<=k,l<=n} B(k,l)`.
pub fn beta_det(n: u64) -> BigRational {
    assert!(n >= 1);
    let mut v = ratio_int(BigInt::one(), BigInt::from(4).pow((n - 1) as u32));
    for k in 1..n {
        let c: BigInt = binomial(2 * k - 1, k).into();
        v /= ratio_int(BigInt::from(2 * k + 1) * &c * &c, BigInt::one());
    }
    if (n * (n - 1) / 2) % 2 == 1 {
        v = -v;
    }
    v
}

pub fn beta_det_direct(n: u64) -> BigRational {
    let m = (1..=n).map(|k| (1..=n).map(|l| beta_rational(k, l)).collect()).collect();
    det_rational(m)
}

/// Closed form `prod_{t=1}^{n-1} 1/(2t-1)!!` of `det [1/(2k-l)!]_{0<=k,l<n}`.
pub fn shifted_factorial_det(n: u64) -> BigRational {
    assert!(n >= 1);
    let mut v = BigRational::one();
    for t in 1..n {
        let dfact: BigInt = (1..=t).fold(BigInt::one(), |acc, j| acc * BigInt::from(2 * j - 1));
        v /= ratio_int(dfact, BigInt::one());
    }
    v
}

pub fn shifted_factorial_det_direct(n: u64) -> BigRational {
    let m = (0..n)
        .map(|k| {
            (0..n)
                .map(|l| {
                    if 2 * k >= l {
                        ratio_int(BigInt::one(), factorial(2 * k - l).into())
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    det_rational(m)
}

/// A perturbation of the exponential kernel and the data its smallness condition
/// depends on.
#[derive(Debug, Clone, PartialEq)]
pub enum Perturbation {
    /// `exp[x y + alpha (x y)^power]`: needs `alpha << N^-(power+1)`.
    DiagPower { n: usize, power: u32, alpha: f64 },
    /// `exp[x (y + beta y^power)]`: needs `beta << 1/(N^2 max|y|^(power-1))`.
    ArgumentPoly { n: usize, power: u32, beta: f64, y_max: f64 },
    /// `exp[x y + sum gamma_j x^m_j y^n_j]` with `m_j != n_j`.
    Mixed { n: usize, terms: Vec<(f64, u32, u32)>, y_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    pub holds: bool,
    /// Largest ratio of a coefficient to its threshold; below one when the
    /// condition holds.
    pub margin: f64,
}

pub fn perturbation_validity(p: &Perturbation) -> Validity {
    let margin = match p {
        Perturbation::DiagPower { n, power, alpha } => alpha.abs() * (*n as f64).powi(*power as i32 + 1),
        Perturbation::ArgumentPoly { n, power, beta, y_max } => {
            beta.abs() * (*n as f64).powi(2) * y_max.abs().powi(*power as i32 - 1)
        }
        Perturbation::Mixed { n, terms, y_max } => {
            let nf = *n as f64;
            let both = terms.iter().any(|t| t.1 > t.2) && terms.iter().any(|t| t.1 < t.2);
            terms
                .iter()
                .map(|&(gamma, m, k)| {
                    let g = gamma.abs();
                    match (m < k, both) {
                        (true, false) => g * y_max.abs().powi((k - m) as i32) * nf.powi(k as i32),
                        (false, false) => 0.0,
                        (true, true) => g * (1.0 + y_max.abs().powi((k - m) as i32)) * nf.powf(0.5 + k as f64),
                        (false, true) => g * nf.powf(0.5 + k as f64),
                    }
                })
                .fold(0.0, f64::max)
        }
    };
    Validity { holds: margin < 1.0, margin }
}

/// Relative difference of two values; used for determinant comparisons.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    if r.is_negative() {
        -(n.abs() / d)
    } else {
        n / d
    }
}

//! Volumes of fixed-diagonal sections of the polytope of symmetric stochastic
//! matrices.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numkit::{block_rng, LogValue, BLOCK};

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSpec {
    pub h: Vec<f64>,
}

impl DiagonalSpec {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if h.len() < 3 {
            return Err(Error::Domain("need n >= 3".into()));
        }
        if h.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::Domain("diagonal entries must lie in [0, 1]".into()));
        }
        Ok(DiagonalSpec { h })
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn chi(&self) -> f64 {
        self.h.iter().sum()
    }

    /// Off-diagonal row sums `u_j = 1 - h_j`.
    pub fn u(&self) -> Vec<f64> {
        self.h.iter().map(|&v| 1.0 - v).collect()
    }

    pub fn dimension(&self) -> usize {
        let n = self.n();
        n * (n - 3) / 2
    }
}

/// `s_j = S/2 - u_j`.
pub fn slack(u: &[f64]) -> Vec<f64> {
    let half: f64 = u.iter().sum::<f64>() / 2.0;
    u.iter().map(|&v| half - v).collect()
}

/// Identity plus the transposition-type permutation matrices.
#[derive(Debug, Clone)]
pub struct PolytopeBasis {
    pub n: usize,
    pub vertices: Vec<Vec<Vec<f64>>>,
}

impl PolytopeBasis {
    pub fn new(n: usize) -> Self {
        let identity: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        let mut vertices = vec![identity.clone()];
        for j in 0..n {
            for k in j + 1..n {
                let mut b = identity.clone();
                b[j][j] = 0.0;
                b[k][k] = 0.0;
                b[j][k] = 1.0;
                b[k][j] = 1.0;
                vertices.push(b);
            }
        }
        PolytopeBasis { n, vertices }
    }

    pub fn combine(&self, weights: &[f64]) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.n]; self.n];
        for (w, v) in weights.iter().zip(&self.vertices) {
            for i in 0..self.n {
                for j in 0..self.n {
                    m[i][j] += w * v[i][j];
                }
            }
        }
        m
    }
}

pub fn is_symmetric_stochastic(m: &[Vec<f64>], tol: f64) -> bool {
    let n = m.len();
    (0..n).all(|i| {
        (m[i].iter().sum::<f64>() - 1.0).abs() <= tol
            && (0..n).all(|j| m[i][j] >= -tol && (m[i][j] - m[j][i]).abs() <= tol)
    })
}

/// The zero-dimensional section for `n = 3`: 1 if feasible, else 0.
pub fn exact_volume_n3(spec: &DiagonalSpec) -> Result<f64> {
    if spec.n() != 3 {
        return Err(Error::Dimension { expected: 3, got: spec.n() });
    }
    Ok(if slack(&spec.u()).iter().all(|&s| s >= 0.0) { 1.0 } else { 0.0 })
}

/// Piecewise-quadratic closed form for `n = 4`, branch chosen by the signs of
/// `s_12, s_13, s_14` (boundaries count as non-negative).
pub fn exact_volume_n4(spec: &DiagonalSpec) -> Result<f64> {
    if spec.n() != 4 {
        return Err(Error::Dimension { expected: 4, got: spec.n() });
    }
    let u = spec.u();
    let s = slack(&u);
    if s.iter().any(|&v| v < 0.0) {
        return Ok(0.0);
    }
    let half = u.iter().sum::<f64>() / 2.0;
    let s12 = half - u[0] - u[1];
    let s13 = half - u[0] - u[2];
    let s14 = half - u[0] - u[3];
    let pos = |v: f64| v >= 0.0;
    let neg = |v: f64| v <= 0.0;
    let branches: [(bool, f64); 8] = [
        (pos(s12) && pos(s13) && pos(s14), u[0]),
        (neg(s12) && neg(s13) && neg(s14), s[0]),
        (pos(s12) && neg(s13) && neg(s14), u[1]),
        (neg(s12) && pos(s13) && pos(s14), s[1]),
        (neg(s12) && pos(s13) && neg(s14), u[2]),
        (pos(s12) && neg(s13) && pos(s14), s[2]),
        (neg(s12) && neg(s13) && pos(s14), u[3]),
        (pos(s12) && pos(s13) && neg(s14), s[3]),
    ];
    let v = branches.iter().find(|(hit, _)| *hit).map(|&(_, x)| x * x / 2.0).unwrap_or(0.0);
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    /// Number of samples with non-zero weight.
    pub hits: u64,
    pub samples: u64,
}

/// Free coordinates: every pair `(k, l)` with `1 <= k < l` and `l >= 3` (0-based);
/// the entries of row 0 and the triangle on rows 0..3 are solved from the row sums.
fn free_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut p = Vec::new();
    for l in 3..n {
        for k in 1..l {
            p.push((k, l));
        }
    }
    p
}

/// Solves the dependent entries and reports feasibility.
fn feasible(u: &[f64], pairs: &[(usize, usize)], x: &[f64], res: &mut [f64]) -> bool {
    res.copy_from_slice(u);
    for (&(k, l), &v) in pairs.iter().zip(x) {
        res[k] -= v;
        res[l] -= v;
    }
    for l in 3..u.len() {
        if res[l] < 0.0 {
            return false;
        }
        res[0] -= res[l];
    }
    let (r0, r1, r2) = (res[0], res[1], res[2]);
    r0 + r1 - r2 >= 0.0 && r0 + r2 - r1 >= 0.0 && r1 + r2 - r0 >= 0.0
}

/// Hit-and-miss estimate over the bounding box `u_kl in [0, min(u_k, u_l)]` of the
/// free coordinates.
pub fn mc_volume(spec: &DiagonalSpec, samples: u64, seed: u64) -> Result<McEstimate> {
    if spec.n() < 4 {
        return Err(Error::Domain("Monte Carlo volume needs n >= 4".into()));
    }
    let u = spec.u();
    let pairs = free_pairs(spec.n());
    let widths: Vec<f64> = pairs.iter().map(|&(k, l)| u[k].min(u[l])).collect();
    let box_volume: f64 = widths.iter().product();
    if box_volume <= 0.0 || slack(&u).iter().any(|&s| s < 0.0) {
        return Ok(McEstimate { estimate: 0.0, std_error: 0.0, hits: 0, samples });
    }
    let blocks = (samples as usize).div_ceil(BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let count = BLOCK.min(samples as usize - b * BLOCK);
            let mut x = vec![0.0; pairs.len()];
            let mut res = vec![0.0; u.len()];
            let mut hits = 0u64;
            for _ in 0..count {
                for (xi, w) in x.iter_mut().zip(&widths) {
                    *xi = rng.random::<f64>() * w;
                }
                if feasible(&u, &pairs, &x, &mut res) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let p = hits as f64 / samples as f64;
    let std_error = box_volume * (p * (1.0 - p) / samples as f64).sqrt();
    Ok(McEstimate { estimate: box_volume * p, std_error, hits, samples })
}

/// Sequential importance sampling for larger `n`, where hit-and-miss acceptance
/// is negligible. Each free entry is drawn from a truncated exponential on its
/// currently feasible interval; the estimate is the mean importance weight.
pub fn mc_volume_sequential(spec: &DiagonalSpec, samples: u64, seed: u64) -> Result<McEstimate> {
    mc_volume_sequential_u(&spec.u(), samples, seed)
}

/// Same estimator parametrised directly by the off-diagonal row sums `u`.
pub fn mc_volume_sequential_u(u: &[f64], samples: u64, seed: u64) -> Result<McEstimate> {
    let n = u.len();
    if n < 4 {
        return Err(Error::Domain("Monte Carlo volume needs n >= 4".into()));
    }
    if u.iter().any(|&v| v < 0.0) {
        return Err(Error::Domain("row sums must be non-negative".into()));
    }
    let blocks = (samples as usize).div_ceil(BLOCK);
    let partial: Vec<(f64, f64, u64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let count = BLOCK.min(samples as usize - b * BLOCK);
            let mut res = vec![0.0; n];
            let (mut s1, mut s2, mut hits) = (0.0, 0.0, 0u64);
            for _ in 0..count {
                let w = sequential_weight(u, &mut res, &mut rng);
                if w > 0.0 {
                    hits += 1;
                }
                s1 += w;
                s2 += w * w;
            }
            (s1, s2, hits)
        })
        .collect();
    let (s1, s2, hits) = partial.iter().fold((0.0, 0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let m = samples as f64;
    let mean = s1 / m;
    let var = (s2 / m - mean * mean).max(0.0);
    Ok(McEstimate { estimate: mean, std_error: (var / m).sqrt(), hits, samples })
}

fn sequential_weight(u: &[f64], res: &mut [f64], rng: &mut ChaCha8Rng) -> f64 {
    let n = u.len();
    res.copy_from_slice(u);
    let mut w = 1.0;
    for l in (3..n).rev() {
        for k in 1..l {
            let hi = res[k].min(res[l]);
            let lo = if k == l - 1 { (res[l] - res[0]).max(0.0) } else { 0.0 };
            let width = hi - lo;
            if width <= 0.0 {
                return 0.0;
            }
            // entries left in row l including the dependent one in row 0
            let remaining = (l - k + 1) as f64;
            let mu = res[l] / remaining;
            let a = width / mu;
            let norm = -(-a).exp_m1();
            let z = -(-rng.random::<f64>() * norm).ln_1p();
            let x = lo + z * mu;
            let density = (-z).exp() / (mu * norm);
            w /= density;
            res[k] -= x;
            res[l] -= x;
        }
        if res[l] < 0.0 || res[l] > res[0] {
            return 0.0;
        }
        res[0] -= res[l];
        res[l] = 0.0;
    }
    let (r0, r1, r2) = (res[0], res[1], res[2]);
    if r0 >= 0.0 && r0 <= r1 + r2 && r1 <= r0 + r2 && r2 <= r0 + r1 {
        w
    } else {
        0.0
    }
}

/// Asymptotic volume formula in the diagonal parametrisation.
pub fn asymptotic_volume(spec: &DiagonalSpec) -> Result<LogValue> {
    let n = spec.n() as f64;
    let chi = spec.chi();
    let nc = n - chi;
    if nc <= 0.0 {
        return Err(Error::Domain("degenerate diagonal: chi = n".into()));
    }
    let mean = chi / n;
    let (mut d2, mut d3, mut d4) = (0.0, 0.0, 0.0);
    for &h in &spec.h {
        let d = h - mean;
        d2 += d * d;
        d3 += d * d * d;
        d4 += d * d * d * d;
    }
    let n1 = n - 1.0;
    let pairs = n * n1 / 2.0;
    let mut ln = 0.5 * 2f64.ln() + 7.0 / 6.0 + pairs * (std::f64::consts::E * nc / (n * n1)).ln()
        + 0.5 * n * (n * n1 * n1 / (2.0 * PI * nc * nc)).ln();
    ln += -n * n1 * n1 / (2.0 * nc * nc) * d2;
    ln += -n1 * n1 / (nc * nc) * d2;
    ln += -n * n1.powi(3) / (3.0 * nc.powi(3)) * d3;
    ln += -n * n1.powi(4) / (4.0 * nc.powi(4)) * d4;
    ln += n1.powi(4) / (4.0 * nc.powi(4)) * d2 * d2;
    Ok(LogValue::from_ln(ln))
}

/// Same formula written in the off-diagonal row sums `u` with `S = sum u`; unlike
/// the diagonal form it accepts any positive scale of `u`.
pub fn asymptotic_volume_u(u: &[f64]) -> Result<LogValue> {
    let n = u.len() as f64;
    let s: f64 = u.iter().sum();
    if s <= 0.0 {
        return Err(Error::Domain("degenerate row sums: S = 0".into()));
    }
    let mean = s / n;
    let (mut d2, mut d3, mut d4) = (0.0, 0.0, 0.0);
    for &v in u {
        let d = v - mean;
        d2 += d * d;
        d3 += d * d * d;
        d4 += d * d * d * d;
    }
    let n1 = n - 1.0;
    let pairs = n * n1 / 2.0;
    let mut ln = 0.5 * 2f64.ln() + 7.0 / 6.0 + pairs * (std::f64::consts::E * s / (n * n1)).ln()
        + 0.5 * n * (n * n1 * n1 / (2.0 * PI * s * s)).ln();
    ln += -n1 * n1 / (2.0 * s * s) * (n + 2.0) * d2;
    ln += n * n1.powi(3) / (3.0 * s.powi(3)) * d3;
    ln += -n * n1.powi(4) / (4.0 * s.powi(4)) * d4;
    ln += n1.powi(4) / (4.0 * s.powi(4)) * d2 * d2;
    Ok(LogValue::from_ln(ln))
}

/// Largest `N^(1/4) (N-1)/(N-chi) |h_j - chi/N|`; the asymptotic formula is only
/// claimed when this is small.
pub fn applicability(spec: &DiagonalSpec) -> f64 {
    let n = spec.n() as f64;
    let chi = spec.chi();
    let mean = chi / n;
    spec.h.iter().map(|&h| n.powf(0.25) * (n - 1.0) / (n - chi) * (h - mean).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(h: &[f64]) -> DiagonalSpec {
        DiagonalSpec::new(h.to_vec()).unwrap()
    }

    #[test]
    fn n3_examples() {
        assert_eq!(exact_volume_n3(&spec(&[0.5, 0.5, 0.5])).unwrap(), 1.0);
        assert_eq!(exact_volume_n3(&spec(&[0.0, 0.9, 0.9])).unwrap(), 0.0);
        assert_eq!(exact_volume_n3(&spec(&[0.2, 0.4, 0.6])).unwrap(), 1.0);
        assert!(exact_volume_n3(&spec(&[0.2, 0.4, 0.6, 0.1])).is_err());
    }

    #[test]
    fn n4_against_hit_and_miss() {
        for h in [[0.8, 0.6, 0.4, 0.3], [0.5, 0.5, 0.5, 0.5], [0.1, 0.3, 0.2, 0.6]] {
            let s = spec(&h);
            let exact = exact_volume_n4(&s).unwrap();
            let mc = mc_volume(&s, 400_000, 7).unwrap();
            assert!((exact - mc.estimate).abs() <= 3.0 * mc.std_error + 1e-12, "h={h:?} exact={exact} mc={mc:?}");
        }
    }

    #[test]
    fn n4_corners() {
        assert_eq!(exact_volume_n4(&spec(&[1.0, 1.0, 1.0, 1.0])).unwrap(), 0.0);
        assert_eq!(exact_volume_n4(&spec(&[1.0, 1.0, 1.0, 0.5])).unwrap(), 0.0);
        let mc = mc_volume(&spec(&[1.0, 1.0, 1.0, 0.5]), 10_000, 1).unwrap();
        assert_eq!(mc.estimate, 0.0);
    }

    #[test]
    fn n4_continuous_across_boundaries() {
        // sweep u_2 so that s_12 changes sign
        let mut prev: Option<f64> = None;
        for i in 0..=2000 {
            let h2 = 0.2 + 0.6 * i as f64 / 2000.0;
            let v = exact_volume_n4(&spec(&[0.5, h2, 0.45, 0.55])).unwrap();
            if let Some(p) = prev {
                assert!((v - p).abs() < 2e-3, "jump at h2={h2}");
            }
            prev = Some(v);
        }
    }

    #[test]
    fn n4_grid_sum_is_stable() {
        let sum = |m: usize| {
            let step = 1.0 / m as f64;
            let mut acc = 0.0;
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        for d in 0..m {
                            let h = [a, b, c, d].map(|i| (i as f64 + 0.5) * step);
                            acc += exact_volume_n4(&spec(&h)).unwrap();
                        }
                    }
                }
            }
            acc * step.powi(4)
        };
        let coarse = sum(24);
        let fine = sum(48);
        assert!((coarse - fine).abs() < 0.005, "{coarse} vs {fine}");
    }

    #[test]
    fn basis_vertices() {
        let b = PolytopeBasis::new(5);
        assert_eq!(b.vertices.len(), 11);
        for v in &b.vertices {
            assert!(is_symmetric_stochastic(v, 0.0));
        }
    }

    #[test]
    fn symmetric_diagonal_has_no_corrections() {
        let s = spec(&[0.3; 7]);
        let n = 7.0f64;
        let nc = n - 2.1;
        let expected = 0.5 * 2f64.ln() + 7.0 / 6.0 + 21.0 * (std::f64::consts::E * nc / 42.0).ln()
            + 3.5 * (n * 36.0 / (2.0 * PI * nc * nc)).ln();
        assert!((asymptotic_volume(&s).unwrap().log_abs - expected).abs() < 1e-12);
        assert!(applicability(&s) < 1e-15);
    }

    #[test]
    fn u_form_matches_diagonal_form() {
        let h = [0.45, 0.5, 0.55, 0.5, 0.52, 0.48];
        let a = asymptotic_volume(&spec(&h)).unwrap();
        let u: Vec<f64> = h.iter().map(|v| 1.0 - v).collect();
        let b = asymptotic_volume_u(&u).unwrap();
        assert!((a.log_abs - b.log_abs).abs() < 1e-12);
    }

    #[test]
    fn sequential_agrees_with_hit_and_miss() {
        let s = spec(&[0.5; 5]);
        let hm = mc_volume(&s, 2_000_000, 3).unwrap();
        let sq = mc_volume_sequential(&s, 400_000, 3).unwrap();
        let tol = 3.0 * (hm.std_error.powi(2) + sq.std_error.powi(2)).sqrt();
        assert!((hm.estimate - sq.estimate).abs() < tol, "{hm:?} {sq:?}");
        let s4 = spec(&[0.8, 0.6, 0.4, 0.3]);
        let sq = mc_volume_sequential(&s4, 200_000, 5).unwrap();
        assert!((sq.estimate - exact_volume_n4(&s4).unwrap()).abs() < 3.0 * sq.std_error);
    }

    #[test]
    fn scaling_law() {
        let u = [0.5, 0.45, 0.55, 0.5, 0.48, 0.52];
        let m = 3.0;
        let scaled: Vec<f64> = u.iter().map(|v| v * m).collect();
        let dim = 6.0 * 3.0 / 2.0;
        let a = asymptotic_volume_u(&u).unwrap().log_abs;
        let b = asymptotic_volume_u(&scaled).unwrap().log_abs;
        assert!((a - (b - dim * m.ln())).abs() < 1e-10);
        let va = mc_volume_sequential_u(&u, 200_000, 11).unwrap();
        let vb = mc_volume_sequential_u(&scaled, 200_000, 11).unwrap();
        assert!((va.estimate - vb.estimate * m.powf(-dim)).abs() < 1e-9 * va.estimate);
    }

    #[test]
    fn deterministic_given_seed() {
        let s = spec(&[0.6, 0.5, 0.4, 0.45, 0.55]);
        assert_eq!(mc_volume(&s, 50_000, 42).unwrap(), mc_volume(&s, 50_000, 42).unwrap());
        assert_eq!(mc_volume_sequential(&s, 50_000, 42).unwrap(), mc_volume_sequential(&s, 50_000, 42).unwrap());
    }

    proptest! {
        #[test]
        fn basis_combinations_are_stochastic(n in 3usize..7, raw in proptest::collection::vec(0.0f64..1.0, 22)) {
            let b = PolytopeBasis::new(n);
            let w = &raw[..b.vertices.len()];
            let total: f64 = w.iter().sum();
            prop_assume!(total > 1e-6);
            let w: Vec<f64> = w.iter().map(|v| v / total).collect();
            prop_assert!(is_symmetric_stochastic(&b.combine(&w), 1e-12));
        }

        #[test]
        fn n4_permutation_invariant(h in proptest::collection::vec(0.0f64..1.0, 4)) {
            let base = exact_volume_n4(&spec(&h)).unwrap();
            for p in [[1usize, 0, 2, 3], [2, 1, 0, 3], [3, 1, 2, 0], [1, 2, 3, 0]] {
                let hp: Vec<f64> = p.iter().map(|&i| h[i]).collect();
                let v = exact_volume_n4(&spec(&hp)).unwrap();
                prop_assert!((v - base).abs() < 1e-12, "{:?} -> {} vs {}", hp, v, base);
            }
        }
    }
}

//! Exact counts of zero-diagonal symmetric non-negative integer matrices with
//! prescribed row sums.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numkit::binomial;

pub const DEFAULT_STATE_CAP: f64 = 2e8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowSumSpec {
    pub t: Vec<u64>,
}

impl RowSumSpec {
    pub fn new(t: Vec<u64>) -> Result<Self> {
        if t.len() < 2 {
            return Err(Error::Domain("need at least two rows".into()));
        }
        Ok(RowSumSpec { t })
    }

    pub fn uniform(n: usize, t: u64) -> Result<Self> {
        Self::new(vec![t; n])
    }

    pub fn n(&self) -> usize {
        self.t.len()
    }

    /// Total entry sum `x = sum t_j`.
    pub fn x(&self) -> u64 {
        self.t.iter().sum()
    }

    /// Estimated state count `prod (t_j + 1)` of the dense coefficient table.
    pub fn state_estimate(&self) -> f64 {
        self.t.iter().map(|&v| v as f64 + 1.0).product()
    }
}

/// Coefficient of `prod w_j^{t_j}` in `prod_{k<l} (1 - w_k w_l)^{-1}`, computed by a
/// memoized depth-first distribution of the smallest residual row over the others.
pub fn count_row_sums(spec: &RowSumSpec) -> Result<BigUint> {
    count_row_sums_capped(spec, DEFAULT_STATE_CAP)
}

pub fn count_row_sums_capped(spec: &RowSumSpec, cap: f64) -> Result<BigUint> {
    let estimated = spec.state_estimate();
    if estimated > cap {
        return Err(Error::TooLarge { estimated, cap });
    }
    let mut residual: Vec<u64> = spec.t.clone();
    residual.sort_unstable();
    let mut memo = HashMap::new();
    Ok(Counter { memo: &mut memo }.count(residual))
}

struct Counter<'a> {
    memo: &'a mut HashMap<Vec<u64>, BigUint>,
}

impl Counter<'_> {
    fn count(&mut self, mut r: Vec<u64>) -> BigUint {
        while r.first() == Some(&0) {
            r.remove(0);
        }
        let total: u64 = r.iter().sum();
        match r.len() {
            0 => return BigUint::one(),
            1 => return BigUint::zero(),
            2 => return if r[0] == r[1] { BigUint::one() } else { BigUint::zero() },
            _ => {}
        }
        let max = *r.last().unwrap();
        if total % 2 == 1 || 2 * max > total {
            return BigUint::zero();
        }
        if let Some(v) = self.memo.get(&r) {
            return v.clone();
        }
        let head = r[0];
        let rest: Vec<u64> = r[1..].to_vec();
        let mut acc = BigUint::zero();
        let mut work = rest.clone();
        self.distribute(head, 0, &rest, &mut work, &mut acc);
        self.memo.insert(r, acc.clone());
        acc
    }

    fn distribute(&mut self, left: u64, idx: usize, rest: &[u64], work: &mut Vec<u64>, acc: &mut BigUint) {
        if idx == rest.len() {
            if left == 0 {
                let mut next = work.clone();
                next.sort_unstable();
                *acc += self.count(next);
            }
            return;
        }
        let capacity: u64 = rest[idx..].iter().sum();
        if capacity < left {
            return;
        }
        let hi = left.min(rest[idx]);
        for b in 0..=hi {
            work[idx] = rest[idx] - b;
            self.distribute(left - b, idx + 1, rest, work, acc);
        }
        work[idx] = rest[idx];
    }
}

/// Same coefficient by truncated multivariate series multiplication over a dense
/// table; independent oracle for small instances.
pub fn count_row_sums_series(spec: &RowSumSpec, cap: f64) -> Result<BigUint> {
    let estimated = spec.state_estimate();
    if estimated > cap {
        return Err(Error::TooLarge { estimated, cap });
    }
    let n = spec.n();
    let dims: Vec<usize> = spec.t.iter().map(|&v| v as usize + 1).collect();
    let mut strides = vec![1usize; n];
    for j in 1..n {
        strides[j] = strides[j - 1] * dims[j - 1];
    }
    let size: usize = dims.iter().product();
    let mut table = vec![0u128; size];
    table[0] = 1;
    let mut idx = vec![0usize; n];
    for k in 0..n {
        for l in k + 1..n {
            // multiply by 1/(1 - w_k w_l): Q[i] = P[i] + Q[i - e_k - e_l]
            idx.iter_mut().for_each(|v| *v = 0);
            for flat in 0..size {
                if idx[k] >= 1 && idx[l] >= 1 {
                    let prev = flat - strides[k] - strides[l];
                    table[flat] = table[flat]
                        .checked_add(table[prev])
                        .ok_or_else(|| Error::Resource("series coefficient overflow".into()))?;
                }
                for j in 0..n {
                    idx[j] += 1;
                    if idx[j] < dims[j] {
                        break;
                    }
                    idx[j] = 0;
                }
            }
        }
    }
    Ok(BigUint::from(table[size - 1]))
}

/// Number of zero-diagonal symmetric non-negative integer matrices with entry sum
/// `x`: `binom(binom(n,2) - 1 + x/2, binom(n,2) - 1)`.
pub fn count_total(n: usize, x: u64) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::Domain("need n >= 2".into()));
    }
    if x % 2 == 1 {
        return Ok(BigUint::zero());
    }
    let c = (n * (n - 1) / 2) as u64;
    Ok(binomial(c - 1 + x / 2, c - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn count(t: &[u64]) -> BigUint {
        count_row_sums(&RowSumSpec::new(t.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(count(&[1, 1, 2]), BigUint::from(1u32));
        assert_eq!(count(&[6, 6, 6, 7, 7]), BigUint::from(795u32));
        assert_eq!(count(&[4, 5, 5, 5, 13]), BigUint::from(56u32));
        assert_eq!(count(&[12, 13, 13, 13, 13]), BigUint::from(13818u32));
        assert_eq!(count(&[3, 3]), BigUint::from(1u32));
        assert_eq!(count(&[1, 1, 1]), BigUint::zero());
    }

    #[test]
    fn totals() {
        assert_eq!(count_total(3, 2).unwrap(), BigUint::from(3u32));
        assert_eq!(count_total(2, 4).unwrap(), BigUint::from(1u32));
        assert_eq!(count_total(5, 32).unwrap(), binomial(25, 9));
        assert_eq!(count_total(4, 7).unwrap(), BigUint::zero());
    }

    #[test]
    fn sum_rule_n4() {
        for x in (0..=10u64).step_by(2) {
            let mut total = BigUint::zero();
            for a in 0..=x {
                for b in 0..=x - a {
                    for c in 0..=x - a - b {
                        let d = x - a - b - c;
                        total += count(&[a, b, c, d]);
                    }
                }
            }
            assert_eq!(total, count_total(4, x).unwrap(), "x={x}");
        }
    }

    #[test]
    fn resource_guard() {
        let spec = RowSumSpec::uniform(9, 20).unwrap();
        assert!(matches!(count_row_sums(&spec), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn series_oracle_agrees() {
        for t in [[6u64, 6, 6, 7, 7], [5, 6, 6, 6, 9], [4, 5, 5, 5, 13], [2, 3, 3, 3, 5]] {
            let spec = RowSumSpec::new(t.to_vec()).unwrap();
            assert_eq!(count_row_sums(&spec).unwrap(), count_row_sums_series(&spec, 1e7).unwrap());
        }
    }

    proptest! {
        #[test]
        fn permutation_invariance(t in proptest::collection::vec(0u64..7, 2..7), seed in any::<u64>()) {
            let mut perm = t.clone();
            let len = perm.len();
            let mut s = seed;
            for i in (1..len).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            prop_assert_eq!(count(&t), count(&perm));
        }

        #[test]
        fn parity_and_reachability(t in proptest::collection::vec(0u64..9, 2..6)) {
            let x: u64 = t.iter().sum();
            let max = *t.iter().max().unwrap();
            if x % 2 == 1 || 2 * max > x {
                prop_assert!(count(&t).is_zero());
            }
        }

        #[test]
        fn agrees_with_series(t in proptest::collection::vec(0u64..6, 2..6)) {
            let spec = RowSumSpec::new(t).unwrap();
            prop_assert_eq!(count_row_sums(&spec).unwrap(), count_row_sums_series(&spec, 1e6).unwrap());
        }
    }
}

//! Partitions, their dimensions and point-configuration embeddings.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

/// Largest size accepted by the enumerators.
pub const MAX_PARTITION_SIZE: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Trailing zeros are dropped; the rest must be positive and weakly decreasing.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.iter().any(|&p| p == 0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(format!("not a partition: {parts:?}")));
        }
        Ok(Self(parts))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// λ_i with 1-based i, zero past the length.
    pub fn part(&self, i: usize) -> usize {
        self.0.get(i.wrapping_sub(1)).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let m = self.0.first().copied().unwrap_or(0);
        Partition((1..=m).map(|j| self.0.iter().filter(|&&r| r >= j).count()).collect())
    }
}

fn partitions_of(n: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if n == 0 {
        out.push(Partition(prefix.clone()));
        return;
    }
    for first in (1..=n.min(max_part)).rev() {
        prefix.push(first);
        partitions_of(n - first, first, prefix, out);
        prefix.pop();
    }
}

/// All partitions of exactly n, in reverse lexicographic order.
pub fn partitions_of_size(n: usize) -> Result<Vec<Partition>> {
    if n > MAX_PARTITION_SIZE {
        return Err(Error::Guard(format!("partition size {n} > {MAX_PARTITION_SIZE}")));
    }
    let mut out = Vec::new();
    partitions_of(n, n, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Every partition with |λ| <= max_size, by size then reverse lexicographic.
pub fn enumerate_partitions(max_size: usize) -> Result<Vec<Partition>> {
    if max_size > MAX_PARTITION_SIZE {
        return Err(Error::Guard(format!("max_size {max_size} > {MAX_PARTITION_SIZE}")));
    }
    let mut out = Vec::new();
    for n in 0..=max_size {
        partitions_of(n, n, &mut Vec::new(), &mut out);
    }
    Ok(out)
}

/// dim λ by the hook-length formula.
pub fn partition_dim(lam: &Partition) -> BigUint {
    let conj = lam.conjugate();
    let mut num = BigUint::one();
    for k in 2..=lam.size() {
        num *= k;
    }
    let mut hooks = BigUint::one();
    for (i, &row) in lam.parts().iter().enumerate() {
        for j in 0..row {
            hooks *= row - j + conj.0[j] - i - 1;
        }
    }
    num / hooks
}

/// Number of standard Young tableaux by removing corners recursively.
pub fn syt_count(lam: &Partition) -> BigUint {
    if lam.size() <= 1 {
        return BigUint::one();
    }
    let mut total = BigUint::from(0u32);
    let parts = lam.parts();
    for i in 0..parts.len() {
        let is_corner = i + 1 == parts.len() || parts[i + 1] < parts[i];
        if is_corner {
            let mut q = parts.to_vec();
            q[i] -= 1;
            total += syt_count(&Partition::new(q).expect("corner removal keeps a partition"));
        }
    }
    total
}

/// dim λ as f64 (exact for the sizes the oracles use).
pub fn partition_dim_f64(lam: &Partition) -> f64 {
    partition_dim(lam).to_f64().unwrap_or(f64::INFINITY)
}

/// How a partition becomes a point configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Convention {
    /// {λ_i - i} on ℤ.
    ZShift,
    /// {λ_i - i + N}, i = 1..N, on ℕ.
    NShift(usize),
    /// {λ_i - i + 1/2} on ℤ + 1/2, stored as doubled integers 2(λ_i - i) + 1.
    HalfIntShift,
}

/// Points of the configuration lying in [lo, hi]. Half-integer conventions
/// compare the real value x against the window and return 2x.
pub fn config_of_partition(lam: &Partition, conv: Convention, lo: f64, hi: f64) -> Vec<i64> {
    let mut out = Vec::new();
    match conv {
        Convention::NShift(n) => {
            for i in 1..=n {
                let x = lam.part(i) as i64 - i as i64 + n as i64;
                if x as f64 >= lo && x as f64 <= hi {
                    out.push(x);
                }
            }
        }
        Convention::ZShift | Convention::HalfIntShift => {
            let half = conv == Convention::HalfIntShift;
            let mut i = 1usize;
            loop {
                let base = lam.part(i) as i64 - i as i64;
                let val = if half { base as f64 + 0.5 } else { base as f64 };
                if val < lo && i > lam.len() {
                    break;
                }
                if val >= lo && val <= hi {
                    out.push(if half { 2 * base + 1 } else { base });
                }
                i += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(enumerate_partitions(0).unwrap(), vec![Partition::empty()]);
        assert_eq!(enumerate_partitions(4).unwrap().len(), 12);
        assert_eq!(enumerate_partitions(10).unwrap().len(), 139);
        assert!(matches!(enumerate_partitions(31), Err(Error::Guard(_))));
    }

    #[test]
    fn dims() {
        let p = |v: Vec<usize>| Partition::new(v).unwrap();
        assert_eq!(partition_dim(&p(vec![1])), BigUint::from(1u32));
        assert_eq!(partition_dim(&p(vec![2, 1])), BigUint::from(2u32));
        let s: BigUint = partitions_of_size(5).unwrap().iter().map(|l| partition_dim(l).pow(2)).sum();
        assert_eq!(s, BigUint::from(120u32));
        for n in 0..=8 {
            for l in partitions_of_size(n).unwrap() {
                assert_eq!(partition_dim(&l), syt_count(&l), "{l:?}");
            }
        }
    }

    #[test]
    fn configurations() {
        let e = Partition::empty();
        assert_eq!(config_of_partition(&e, Convention::ZShift, -5.0, 5.0), vec![-1, -2, -3, -4, -5]);
        let l = Partition::new(vec![3, 1]).unwrap();
        assert_eq!(config_of_partition(&l, Convention::NShift(2), -10.0, 10.0), vec![4, 1]);
        // 2.5, -0.5, -2.5 doubled
        assert_eq!(config_of_partition(&l, Convention::HalfIntShift, -3.5, 3.5), vec![5, -1, -5, -7]);
    }

    #[test]
    fn rejects_non_partitions() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert_eq!(Partition::new(vec![2, 1, 0]).unwrap().parts(), &[2, 1]);
    }
}

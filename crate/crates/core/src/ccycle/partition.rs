use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::One;

use super::CycleError;

/// A weakly decreasing list of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Partition {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn trivial(n: usize) -> Partition {
        Partition::new(vec![n])
    }

    pub fn sign(n: usize) -> Partition {
        Partition::new(vec![1; n])
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

    /// Union of parts, as for cycle types of a product of disjoint permutations.
    pub fn union(&self, other: &Partition) -> Partition {
        let mut parts = self.0.clone();
        parts.extend_from_slice(&other.0);
        Partition::new(parts)
    }

    /// Size of the centralizer of a permutation of this cycle type.
    pub fn z(&self) -> BigInt {
        let mut acc = BigInt::one();
        let mut i = 0;
        while i < self.0.len() {
            let k = self.0[i];
            let mut m = 0;
            while i < self.0.len() && self.0[i] == k {
                m += 1;
                i += 1;
                acc *= BigInt::from(k) * BigInt::from(m);
            }
        }
        acc
    }

    /// All partitions of n in reverse lexicographic order.
    pub fn all(n: usize) -> Vec<Partition> {
        fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if n == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for k in (1..=n.min(max)).rev() {
                cur.push(k);
                rec(n - k, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

type CharKey = (Vec<usize>, Vec<usize>);

fn memo() -> &'static RwLock<HashMap<CharKey, i64>> {
    static MEMO: OnceLock<RwLock<HashMap<CharKey, i64>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// χ_λ(μ) by the Murnaghan–Nakayama rule on beta-sets.
pub fn sn_character(lambda: &Partition, cycle_type: &Partition) -> Result<i64, CycleError> {
    if lambda.size() != cycle_type.size() {
        return Err(CycleError::SizeMismatch(lambda.size(), cycle_type.size()));
    }
    Ok(character(&lambda.0, &cycle_type.0))
}

fn character(lambda: &[usize], mu: &[usize]) -> i64 {
    if mu.is_empty() {
        return 1;
    }
    let key = (lambda.to_vec(), mu.to_vec());
    if let Some(&v) = memo().read().unwrap().get(&key) {
        return v;
    }
    let k = mu[0];
    let rest = &mu[1..];
    let len = lambda.len();
    // β_i = λ_i + (len − 1 − i), strictly decreasing
    let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &l)| l + len - 1 - i).collect();
    let mut total = 0i64;
    for i in 0..len {
        if beta[i] < k {
            continue;
        }
        let target = beta[i] - k;
        if beta.contains(&target) {
            continue;
        }
        let height = beta.iter().filter(|&&b| b > target && b < beta[i]).count();
        let mut next = beta.clone();
        next[i] = target;
        next.sort_unstable_by(|a, b| b.cmp(a));
        let m = next.len();
        let shape: Vec<usize> = next.iter().enumerate().map(|(j, &b)| b - (m - 1 - j)).filter(|&x| x > 0).collect();
        let sign = if height % 2 == 0 { 1 } else { -1 };
        total += sign * character(&shape, rest);
    }
    memo().write().unwrap().insert(key, total);
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::factorial;

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=10).map(|n| Partition::all(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
    }

    #[test]
    fn small_characters() {
        let p = |v: Vec<usize>| Partition::new(v);
        assert_eq!(sn_character(&p(vec![2, 1]), &p(vec![3])).unwrap(), -1);
        assert_eq!(sn_character(&p(vec![2, 1]), &p(vec![1, 1, 1])).unwrap(), 2);
        assert_eq!(sn_character(&p(vec![2, 1]), &p(vec![2, 1])).unwrap(), 0);
        assert_eq!(sn_character(&p(vec![3, 1]), &p(vec![2, 2])).unwrap(), -1);
        assert!(sn_character(&p(vec![2]), &p(vec![1])).is_err());
    }

    #[test]
    fn trivial_and_sign() {
        for n in 1..=7 {
            for mu in Partition::all(n) {
                assert_eq!(sn_character(&Partition::trivial(n), &mu).unwrap(), 1);
                let expect = if (n - mu.len()) % 2 == 0 { 1 } else { -1 };
                assert_eq!(sn_character(&Partition::sign(n), &mu).unwrap(), expect);
            }
        }
    }

    #[test]
    fn row_orthogonality() {
        for n in 1..=8 {
            let parts = Partition::all(n);
            for lam in &parts {
                let mut acc = BigInt::from(0);
                for mu in &parts {
                    let c = sn_character(lam, mu).unwrap();
                    acc += factorial(n as u64) / mu.z() * BigInt::from(c * c);
                }
                assert_eq!(acc, factorial(n as u64), "λ = {lam}");
            }
        }
    }
}

use std::cmp::Ordering;

use num_bigint::BigInt;

use crate::exactalg::{binom, RationalSeries, SqrtQInt};

/// (1 − u)(1 + u)²(1 − (2√q + 1)u) as coefficients low to high.
fn denominator(q: u64) -> Vec<SqrtQInt> {
    let t = SqrtQInt::new(1, 2, q);
    let base = [1, 1, -1, -1].map(|c| SqrtQInt::integer(c, q));
    let mut out = vec![SqrtQInt::zero(q); 5];
    for (i, c) in base.iter().enumerate() {
        out[i] = &out[i] + c;
        out[i + 1] = &out[i + 1] - &(c * &t);
    }
    out
}

fn series(numerator: Vec<SqrtQInt>, q: u64) -> RationalSeries<SqrtQInt> {
    RationalSeries::new(numerator, denominator(q)).expect("unit constant term")
}

/// B(0), …, B(count − 1).
pub fn b_coeffs(q: u64, count: usize) -> Vec<SqrtQInt> {
    series(vec![SqrtQInt::one(q)], q).coefficients(count).expect("integral series")
}

/// B(d), zero for negative d.
pub fn b_coeff(d: i64, q: u64) -> SqrtQInt {
    if d < 0 {
        return SqrtQInt::zero(q);
    }
    b_coeffs(q, d as usize + 1).pop().unwrap()
}

/// S(a, b): the u^a coefficient of (1 + u)^b / ((1 − u)(1 + u)²(1 − (2√q + 1)u)).
pub fn s_coeff(a: i64, b: u32, q: u64) -> SqrtQInt {
    if a < 0 {
        return SqrtQInt::zero(q);
    }
    let num: Vec<SqrtQInt> = (0..=b as i64).map(|k| SqrtQInt::integer(binom(b as i64, k), q)).collect();
    series(num, q).coefficients(a as usize + 1).expect("integral series").pop().unwrap()
}

/// S(a, b) as Σ_k binom(b, k)·B(a − k).
pub fn s_coeff_binomial(a: i64, b: u32, q: u64) -> SqrtQInt {
    if a < 0 {
        return SqrtQInt::zero(q);
    }
    let bs = b_coeffs(q, a as usize + 1);
    (0..=a).map(|k| bs[(a - k) as usize].scale(&binom(b as i64, k))).sum()
}

fn s_row(b: u32, q: u64, count: usize) -> Vec<SqrtQInt> {
    let num: Vec<SqrtQInt> = (0..=b as i64).map(|k| SqrtQInt::integer(binom(b as i64, k), q)).collect();
    series(num, q).coefficients(count).expect("integral series")
}

/// S(a, deg N)/Σ_{k ≤ a+1} binom(deg N, k) is strictly increasing on
/// −1 ≤ a ≤ a_max. Returns the first a where the step a → a + 1 fails.
pub fn b_increasing_check(deg_n: u32, q: u64, a_max: i64) -> Option<i64> {
    let row = s_row(deg_n, q, a_max.max(0) as usize + 2);
    let s = |a: i64| if a < 0 { SqrtQInt::zero(q) } else { row[a as usize].clone() };
    let den = |a: i64| (0..=a + 1).map(|k| binom(deg_n as i64, k)).sum::<BigInt>();
    (-1..a_max).find(|&a| {
        let lhs = s(a).scale(&den(a + 1));
        let rhs = s(a + 1).scale(&den(a));
        lhs.cmp_exact(&rhs) != Ordering::Less
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BEstimateFailure {
    pub a: i64,
    pub b: u32,
    pub lhs: SqrtQInt,
}

/// S(a, b) ≤ (2√q + 2)^{b−2} / (2√q·(2√q + 1)^{b−3−a}) on 0 ≤ a ≤ a_max,
/// 2 ≤ b ≤ b_max, decided by exact cross-multiplication.
pub fn b_estimate_check(a_max: i64, b_max: u32, q: u64) -> Vec<BEstimateFailure> {
    let two_root = SqrtQInt::new(0, 2, q);
    let t = SqrtQInt::new(1, 2, q);
    let t1 = SqrtQInt::new(2, 2, q);
    let mut failures = Vec::new();
    for b in 2..=b_max {
        let row = s_row(b, q, a_max as usize + 1);
        for a in 0..=a_max {
            let e = b as i64 - 3 - a;
            let big = t1.pow(b - 2);
            let (lhs, rhs) = if e >= 0 {
                (&(&row[a as usize] * &two_root) * &t.pow(e as u32), big)
            } else {
                (&row[a as usize] * &two_root, &big * &t.pow((-e) as u32))
            };
            if lhs.cmp_exact(&rhs) == Ordering::Greater {
                failures.push(BEstimateFailure { a, b, lhs: row[a as usize].clone() });
            }
        }
    }
    failures
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_b_values() {
        for q in [5u64, 7, 9, 11, 13] {
            let b = b_coeffs(q, 3);
            assert_eq!(b[0], SqrtQInt::one(q));
            assert_eq!(b[1], SqrtQInt::new(0, 2, q));
            assert_eq!(b[2], SqrtQInt::new(4 * q as i64 + 2, 2, q));
            assert_eq!(b_coeff(-1, q), SqrtQInt::zero(q));
        }
    }

    #[test]
    fn s_values_and_binomial_relation() {
        let q = 7;
        for b in 0..10u32 {
            assert_eq!(s_coeff(0, b, q), SqrtQInt::one(q));
            assert_eq!(s_coeff(1, b, q), SqrtQInt::new(b as i64, 2, q));
            for a in -1..8 {
                assert_eq!(s_coeff(a, b, q), s_coeff_binomial(a, b, q), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn two_column_is_geometric() {
        // S(a, 2) = Σ_{j ≤ a}(2√q + 1)^j
        let q = 5;
        let t = SqrtQInt::new(1, 2, q);
        for a in 0..6 {
            let sum: SqrtQInt = (0..=a).map(|j| t.pow(j)).sum();
            assert_eq!(s_coeff(a as i64, 2, q), sum);
        }
    }

    #[test]
    fn increasing_and_estimate_small() {
        for q in [5u64, 9] {
            for deg in 4..8 {
                assert_eq!(b_increasing_check(deg, q, 10), None);
            }
            assert!(b_estimate_check(10, 10, q).is_empty());
        }
    }
}

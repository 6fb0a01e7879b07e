//! Symmetric-group characters, multiplicities of characteristic cycles and
//! the coefficient sequences B(d), S(a, b).

mod partition;
mod series;

pub use partition::{sn_character, Partition};
pub use series::{
    b_coeff, b_coeffs, b_estimate_check, b_increasing_check, s_coeff, s_coeff_binomial, BEstimateFailure,
};

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::exactalg::{binom, factorial, series_coeff, RationalSeries};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CycleError {
    #[error("size mismatch: |λ| = {0} but n = {1}")]
    SizeMismatch(usize, usize),
    #[error("invalid multiplicity input: {0}")]
    InvalidInput(String),
    #[error("non-integral multiplicity {0}/{1}")]
    NonIntegral(BigInt, BigInt),
}

/// Local data at the singular points together with the block structure
/// (e_x) and (w_k) of a stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultInput {
    pub conductors: Vec<u32>,
    pub rank: u32,
    pub etuple: Vec<usize>,
    /// k ↦ w_k
    pub wtuple: BTreeMap<usize, usize>,
}

impl MultInput {
    pub fn new(
        conductors: Vec<u32>,
        rank: u32,
        etuple: Vec<usize>,
        wtuple: BTreeMap<usize, usize>,
    ) -> Result<MultInput, CycleError> {
        if rank == 0 {
            return Err(CycleError::InvalidInput("rank must be positive".into()));
        }
        if conductors.contains(&0) {
            return Err(CycleError::InvalidInput("conductors must be positive".into()));
        }
        if conductors.len() != etuple.len() {
            return Err(CycleError::InvalidInput(format!(
                "{} conductors but {} entries in the e-tuple",
                conductors.len(),
                etuple.len()
            )));
        }
        if wtuple.contains_key(&0) {
            return Err(CycleError::InvalidInput("block sizes k start at 1".into()));
        }
        Ok(MultInput { conductors, rank, etuple, wtuple })
    }

    pub fn n(&self) -> usize {
        self.etuple.iter().sum::<usize>() + self.wtuple.iter().map(|(k, w)| k * w).sum::<usize>()
    }

    /// Order of the Young subgroup Π S_{e_x} × Π S_k^{w_k}.
    fn group_order(&self) -> BigInt {
        let mut g = BigInt::one();
        for &e in &self.etuple {
            g *= factorial(e as u64);
        }
        for (&k, &w) in &self.wtuple {
            g *= Pow::pow(factorial(k as u64), w);
        }
        g
    }

    /// Cycle type ↦ Σ over elements of the subgroup with that type of the
    /// product of c_x^{#cycles} on e-blocks and rank^{#cycles} on w-blocks.
    fn weighted_classes(&self) -> HashMap<Partition, BigInt> {
        let mut blocks: Vec<(usize, u32)> = self.etuple.iter().copied().zip(self.conductors.iter().copied()).collect();
        for (&k, &w) in &self.wtuple {
            blocks.extend(std::iter::repeat_n((k, self.rank), w));
        }
        let mut acc: HashMap<Partition, BigInt> = HashMap::from([(Partition::new(Vec::new()), BigInt::one())]);
        for (m, base) in blocks {
            if m == 0 {
                continue;
            }
            let fm = factorial(m as u64);
            let block: Vec<(Partition, BigInt)> = Partition::all(m)
                .into_iter()
                .map(|mu| {
                    let w = &fm / mu.z() * Pow::pow(BigInt::from(base), mu.len());
                    (mu, w)
                })
                .collect();
            let mut next = HashMap::with_capacity(acc.len() * block.len());
            for (mu, x) in &acc {
                for (nu, y) in &block {
                    *next.entry(mu.union(nu)).or_insert_with(BigInt::zero) += x * y;
                }
            }
            acc = next;
        }
        acc
    }
}

fn average(
    lambda: &Partition,
    classes: &HashMap<Partition, BigInt>,
    order: &BigInt,
) -> Result<BigInt, CycleError> {
    let mut total = BigInt::zero();
    for (mu, w) in classes {
        total += w * BigInt::from(sn_character(lambda, mu)?);
    }
    let (quo, rem) = total.div_rem(order);
    if !rem.is_zero() {
        return Err(CycleError::NonIntegral(total, order.clone()));
    }
    Ok(quo)
}

/// M_{K,ρ}((e_x), (w_k)) for ρ indexed by λ.
pub fn m_coeff(input: &MultInput, lambda: &Partition) -> Result<BigInt, CycleError> {
    if lambda.size() != input.n() {
        return Err(CycleError::SizeMismatch(lambda.size(), input.n()));
    }
    average(lambda, &input.weighted_classes(), &input.group_order())
}

/// M_{K,ρ} for every λ ⊢ n at once, sharing the class map.
pub fn m_coeffs_all(input: &MultInput) -> Result<Vec<(Partition, BigInt)>, CycleError> {
    let classes = input.weighted_classes();
    let order = input.group_order();
    Partition::all(input.n()).into_iter().map(|lam| average(&lam, &classes, &order).map(|m| (lam, m))).collect()
}

/// Π_{i < Σw}(2g − 2 − i) / Π w_k!.
pub fn intersection_number(wtuple: &BTreeMap<usize, usize>, g: i64) -> BigInt {
    let total: usize = wtuple.values().sum();
    let mut num = BigInt::one();
    for i in 0..total {
        num *= BigInt::from(2 * g - 2 - i as i64);
    }
    let den = wtuple.values().fold(BigInt::one(), |acc, &w| acc * factorial(w as u64));
    let (quo, rem) = num.div_rem(&den);
    assert!(rem.is_zero(), "intersection number {num}/{den} is not integral");
    quo
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexCheck {
    pub lambda: Partition,
    pub genus: i64,
    pub lhs: BigInt,
    pub rhs: BigRational,
    pub holds: bool,
}

fn tuples_bounded(len: usize, total: usize) -> Vec<Vec<usize>> {
    fn rec(len: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(len, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, total, &mut Vec::new(), &mut out);
    out
}

fn multiplicities(mu: &Partition) -> BTreeMap<usize, usize> {
    let mut w = BTreeMap::new();
    for &k in mu.parts() {
        *w.entry(k).or_insert(0) += 1;
    }
    w
}

/// Both sides of the index identity for every λ ⊢ n and every genus in
/// `genera`. The multiplicities do not depend on g and are computed once.
pub fn index_identity_grid(
    conductors: &[u32],
    rank: u32,
    n: usize,
    genera: &[i64],
) -> Result<Vec<IndexCheck>, CycleError> {
    let lambdas = Partition::all(n);
    let mut lhs = vec![vec![BigInt::zero(); genera.len()]; lambdas.len()];
    for etuple in tuples_bounded(conductors.len(), n) {
        let rest = n - etuple.iter().sum::<usize>();
        for mu in Partition::all(rest) {
            let wtuple = multiplicities(&mu);
            let input = MultInput::new(conductors.to_vec(), rank, etuple.clone(), wtuple.clone())?;
            let ms = m_coeffs_all(&input)?;
            let inter: Vec<BigInt> = genera.iter().map(|&g| intersection_number(&wtuple, g)).collect();
            for (li, (_, m)) in ms.iter().enumerate() {
                if m.is_zero() {
                    continue;
                }
                for (gi, x) in inter.iter().enumerate() {
                    lhs[li][gi] += m * x;
                }
            }
        }
    }
    let csum: i64 = conductors.iter().map(|&c| c as i64).sum();
    let mut out = Vec::with_capacity(lambdas.len() * genera.len());
    for (li, lam) in lambdas.iter().enumerate() {
        for (gi, &g) in genera.iter().enumerate() {
            let chi = BigInt::from((2 * g - 2) * rank as i64 + csum);
            let mut rhs = BigRational::zero();
            for mu in Partition::all(n) {
                let c = BigInt::from(sn_character(lam, &mu)?);
                rhs += BigRational::new(c * Pow::pow(&chi, mu.len()), mu.z());
            }
            let l = lhs[li][gi].clone();
            let holds = BigRational::from_integer(l.clone()) == rhs;
            out.push(IndexCheck { lambda: lam.clone(), genus: g, lhs: l, rhs, holds });
        }
    }
    Ok(out)
}

/// The index identity for a single λ and genus.
pub fn index_identity_check(
    conductors: &[u32],
    rank: u32,
    lambda: &Partition,
    n: usize,
    g: i64,
) -> Result<IndexCheck, CycleError> {
    if lambda.size() != n {
        return Err(CycleError::SizeMismatch(lambda.size(), n));
    }
    let grid = index_identity_grid(conductors, rank, n, &[g])?;
    Ok(grid.into_iter().find(|c| &c.lambda == lambda).expect("λ is a partition of n"))
}

/// u^n coefficient of −2u(1 − u)^c / ((1 − u)⁴(1 + u)) with c the total conductor.
pub fn radon_generic_euler(n: usize, total_conductor: u32) -> BigInt {
    let mut num = vec![BigInt::zero()];
    for k in 0..=total_conductor as i64 {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        num.push(BigInt::from(-2 * sign) * binom(total_conductor as i64, k));
    }
    // (1 − u)⁴(1 + u) = 1 − 3u + 2u² + 2u³ − 3u⁴ + u⁵
    let den: Vec<BigInt> = [1, -3, 2, 2, -3, 1].iter().map(|&x| BigInt::from(x)).collect();
    let series = RationalSeries::new(num, den).expect("unit constant term");
    series_coeff(&series, n as i64).expect("integral series")
}

/// Σ over a + b + Σe_x = n with e_x ≤ c_x of (−1)^{n−1+a+b}·Π binom(c_x, e_x)·(ab + max(a, b)).
pub fn radon_generic_euler_direct(n: usize, conductors: &[u32]) -> BigInt {
    let mut total = BigInt::zero();
    for etuple in tuples_bounded(conductors.len(), n) {
        let weight = etuple
            .iter()
            .zip(conductors)
            .fold(BigInt::one(), |acc, (&e, &c)| acc * binom(c as i64, e as i64));
        if weight.is_zero() {
            continue;
        }
        let s = n - etuple.iter().sum::<usize>();
        for a in 0..=s {
            let b = s - a;
            let sign = if (n + a + b + 1).is_multiple_of(2) { 1 } else { -1 };
            total += &weight * BigInt::from(sign * (a * b + a.max(b)) as i64);
        }
    }
    total
}

/// 2·Σ_{k<n} binom(deg N − 4, k).
pub fn zero_section_mult(n: usize, deg_n: usize) -> BigInt {
    (0..n as i64).map(|k| binom(deg_n as i64 - 4, k)).sum::<BigInt>() * 2
}

/// 2^{2r−i}·binom(d − i, d − 2r)·binom(d + 1 − r, d + 1 − i), zero outside range.
pub fn polar_mult(d: i64, r: i64, i: i64) -> BigInt {
    if r < 0 || i < 0 || 2 * r < i || 2 * r > d {
        return BigInt::zero();
    }
    let b = binom(d - i, d - 2 * r) * binom(d + 1 - r, d + 1 - i);
    b << (2 * r - i) as usize
}

/// Coefficients G[d][r][i] of 1/((1 − u²vw²)(1 − 2u − 2u²vw − u²vw²)).
pub fn polar_generating_coeffs(d_max: usize) -> Vec<Vec<Vec<BigInt>>> {
    let dims = |d: usize| (d / 2 + 1, d + 1);
    let get = |t: &Vec<Vec<Vec<BigInt>>>, d: i64, r: i64, i: i64| -> BigInt {
        if d < 0 || r < 0 || i < 0 {
            return BigInt::zero();
        }
        let row = &t[d as usize];
        row.get(r as usize).and_then(|x| x.get(i as usize)).cloned().unwrap_or_default()
    };
    let mut h: Vec<Vec<Vec<BigInt>>> = Vec::with_capacity(d_max + 1);
    for d in 0..=d_max {
        let (rs, is) = dims(d);
        let mut layer = vec![vec![BigInt::zero(); is]; rs];
        for (r, row) in layer.iter_mut().enumerate() {
            for (i, cell) in row.iter_mut().enumerate() {
                let (d, r, i) = (d as i64, r as i64, i as i64);
                let mut x = if d == 0 && r == 0 && i == 0 { BigInt::one() } else { BigInt::zero() };
                x += get(&h, d - 1, r, i) * 2;
                x += get(&h, d - 2, r - 1, i - 1) * 2;
                x += get(&h, d - 2, r - 1, i - 2);
                *cell = x;
            }
        }
        h.push(layer);
    }
    let mut g: Vec<Vec<Vec<BigInt>>> = Vec::with_capacity(d_max + 1);
    for d in 0..=d_max {
        let (rs, is) = dims(d);
        let mut layer = vec![vec![BigInt::zero(); is]; rs];
        for (r, row) in layer.iter_mut().enumerate() {
            for (i, cell) in row.iter_mut().enumerate() {
                *cell = &h[d][r][i] + get(&g, d as i64 - 2, r as i64 - 1, i as i64 - 2);
            }
        }
        g.push(layer);
    }
    g
}

/// Compares the generating function against 2^{d−2r}·polar_mult(d, r, i)
/// for all d ≤ d_max, 0 ≤ r ≤ d, 0 ≤ i ≤ d + 1.
pub fn polar_gen_check(d_max: usize) -> bool {
    let g = polar_generating_coeffs(d_max);
    for (d, layer) in g.iter().enumerate() {
        for r in 0..=d {
            for i in 0..=d + 1 {
                let lhs = layer.get(r).and_then(|x| x.get(i)).cloned().unwrap_or_default();
                let rhs = if 2 * r <= d { polar_mult(d as i64, r as i64, i as i64) << (d - 2 * r) } else { BigInt::zero() };
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// Closed form of M for rank 2 and the sign representation:
/// 2^{w_1}·Π binom(c_x, e_x) when w_k = 0 for k ≥ 3, otherwise 0.
pub fn rank_two_sign_closed_form(input: &MultInput) -> BigInt {
    if input.wtuple.iter().any(|(&k, &w)| k >= 3 && w > 0) {
        return BigInt::zero();
    }
    let w1 = input.wtuple.get(&1).copied().unwrap_or(0);
    let prod = input
        .etuple
        .iter()
        .zip(&input.conductors)
        .fold(BigInt::one(), |acc, (&e, &c)| acc * binom(c as i64, e as i64));
    prod << w1
}

/// Every (e, w) with |e| = |conductors| and Σe + Σk·w_k = n.
pub fn strata(conductors: &[u32], n: usize) -> Vec<(Vec<usize>, BTreeMap<usize, usize>)> {
    let mut out = Vec::new();
    for etuple in tuples_bounded(conductors.len(), n) {
        let rest = n - etuple.iter().sum::<usize>();
        for mu in Partition::all(rest) {
            out.push((etuple.clone(), multiplicities(&mu)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(pairs: &[(usize, usize)]) -> BTreeMap<usize, usize> {
        pairs.iter().copied().collect()
    }

    fn input(conductors: Vec<u32>, rank: u32, e: Vec<usize>, wt: &[(usize, usize)]) -> MultInput {
        MultInput::new(conductors, rank, e, w(wt)).unwrap()
    }

    #[test]
    fn rank_two_examples() {
        let m = |wt: &[(usize, usize)], lam: Partition| m_coeff(&input(vec![], 2, vec![], wt), &lam).unwrap();
        assert_eq!(m(&[(1, 1)], Partition::sign(1)), BigInt::from(2));
        assert_eq!(m(&[(2, 1)], Partition::sign(2)), BigInt::from(1));
        assert_eq!(m(&[(2, 1)], Partition::trivial(2)), BigInt::from(3));
        assert_eq!(m(&[(3, 1)], Partition::sign(3)), BigInt::from(0));
    }

    #[test]
    fn size_mismatch_rejected() {
        let inp = input(vec![2], 2, vec![1], &[(1, 1)]);
        assert_eq!(m_coeff(&inp, &Partition::sign(3)), Err(CycleError::SizeMismatch(3, 2)));
        assert!(MultInput::new(vec![1, 2], 2, vec![0], BTreeMap::new()).is_err());
    }

    #[test]
    fn sign_on_singular_block_is_binomial() {
        for c in 1..=4u32 {
            for e in 0..=5usize {
                let inp = input(vec![c], 2, vec![e], &[]);
                assert_eq!(m_coeff(&inp, &Partition::sign(e)).unwrap(), binom(c as i64, e as i64));
            }
        }
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(intersection_number(&w(&[(1, 1)]), 0), BigInt::from(-2));
        assert_eq!(intersection_number(&w(&[]), 7), BigInt::from(1));
        assert_eq!(intersection_number(&w(&[(1, 2)]), 2), BigInt::from(1));
        assert_eq!(intersection_number(&w(&[(1, 1), (2, 1)]), 0), BigInt::from(6));
    }

    #[test]
    fn index_identity_small() {
        // n = 2, trivial λ, χ = 3: Sym² of a 3-dimensional space
        let check = index_identity_check(&[3], 1, &Partition::trivial(2), 2, 1).unwrap();
        assert!(check.holds);
        assert_eq!(check.lhs, BigInt::from(6));
        for g in 0..3 {
            let c = index_identity_check(&[2, 1], 2, &Partition::trivial(1), 1, g).unwrap();
            assert!(c.holds);
            assert_eq!(c.lhs, BigInt::from((2 * g - 2) * 2 + 3));
        }
    }

    #[test]
    fn index_identity_moderate_grid() {
        for checks in [
            index_identity_grid(&[1, 3], 2, 4, &[0, 1, 2]).unwrap(),
            index_identity_grid(&[2], 3, 5, &[0, 4]).unwrap(),
        ] {
            for c in checks {
                assert!(c.holds, "λ = {} g = {}: {} vs {}", c.lambda, c.genus, c.lhs, c.rhs);
            }
        }
    }

    #[test]
    fn euler_characteristic_examples() {
        assert_eq!(radon_generic_euler(1, 0), BigInt::from(-2));
        assert_eq!(radon_generic_euler(0, 5), BigInt::zero());
        assert_eq!(radon_generic_euler_direct(1, &[]), BigInt::from(-2));
        for n in 0..=8 {
            for cs in [vec![], vec![1], vec![2, 1], vec![3, 3, 2]] {
                let total: u32 = cs.iter().sum();
                assert_eq!(radon_generic_euler(n, total), radon_generic_euler_direct(n, &cs), "n={n} cs={cs:?}");
            }
        }
    }

    #[test]
    fn zero_section_relation() {
        assert_eq!(zero_section_mult(0, 6), BigInt::zero());
        assert_eq!(zero_section_mult(1, 9), BigInt::from(2));
        for n in 1..6 {
            assert_eq!(zero_section_mult(n, 4), BigInt::from(2));
        }
        for deg in 4..10usize {
            for n in 0..10 {
                let sign = if n % 2 == 0 { 1 } else { -1 };
                assert_eq!(zero_section_mult(n, deg), radon_generic_euler(n, deg as u32) * sign);
            }
        }
    }

    #[test]
    fn polar_examples() {
        for d in 0..6 {
            assert_eq!(polar_mult(d, 0, 0), BigInt::one());
            for r in 0..=d / 2 {
                assert_eq!(polar_mult(d, r, d + 1), BigInt::zero());
            }
        }
        assert_eq!(polar_mult(2, 1, 1), BigInt::from(2));
        let g = polar_generating_coeffs(2);
        assert_eq!(g[0][0][0], BigInt::one());
        assert_eq!(g[2][1][1], BigInt::from(2));
        assert!(polar_gen_check(10));
    }

    #[test]
    fn closed_form_on_small_grid() {
        for n in 0..=5 {
            for (e, wt) in strata(&[1, 2], n) {
                let inp = MultInput::new(vec![1, 2], 2, e, wt).unwrap();
                assert_eq!(m_coeff(&inp, &Partition::sign(n)).unwrap(), rank_two_sign_closed_form(&inp));
            }
        }
    }
}

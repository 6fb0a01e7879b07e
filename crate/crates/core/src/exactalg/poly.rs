use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::FqElem;
use super::ExactError;

/// Polynomial in T over F_p, coefficients stored low to high with no
/// trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    p: u32,
    coeffs: Vec<u32>,
}

impl Poly {
    pub fn from_u32(p: u32, mut coeffs: Vec<u32>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { p, coeffs }
    }

    pub fn new(p: u32, coeffs: &[i64]) -> Self {
        Poly::from_u32(p, coeffs.iter().map(|&c| c.rem_euclid(p as i64) as u32).collect())
    }

    pub fn zero(p: u32) -> Self {
        Poly { p, coeffs: Vec::new() }
    }

    pub fn one(p: u32) -> Self {
        Poly::constant(FqElem::one(p))
    }

    pub fn constant(c: FqElem) -> Self {
        Poly::from_u32(c.modulus(), vec![c.value()])
    }

    /// The polynomial T.
    pub fn t(p: u32) -> Self {
        Poly::monomial(FqElem::one(p), 1)
    }

    /// T - c.
    pub fn linear(c: FqElem) -> Self {
        Poly::from_u32(c.modulus(), vec![(-c).value(), 1])
    }

    pub fn monomial(c: FqElem, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c.value();
        Poly::from_u32(c.modulus(), coeffs)
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to -1.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, i: usize) -> FqElem {
        FqElem::new(*self.coeffs.get(i).unwrap_or(&0) as i64, self.p)
    }

    pub fn raw_coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn lead(&self) -> FqElem {
        match self.coeffs.last() {
            Some(&c) => FqElem::new(c as i64, self.p),
            None => FqElem::zero(self.p),
        }
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn scale(&self, c: FqElem) -> Poly {
        let p = self.p as u64;
        Poly::from_u32(
            self.p,
            self.coeffs.iter().map(|&a| ((a as u64 * c.value() as u64) % p) as u32).collect(),
        )
    }

    /// Returns (leading coefficient, monic associate). Zero maps to (0, 0).
    pub fn monic(&self) -> (FqElem, Poly) {
        let lc = self.lead();
        match lc.inv() {
            Some(inv) => (lc, self.scale(inv)),
            None => (lc, self.clone()),
        }
    }

    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { p: self.p, coeffs }
    }

    pub fn eval(&self, x: FqElem) -> FqElem {
        let mut acc = FqElem::zero(self.p);
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + FqElem::new(c as i64, self.p);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        let p = self.p as u64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| ((c as u64 * (i as u64 % p)) % p) as u32)
            .collect();
        Poly::from_u32(self.p, coeffs)
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let p = self.p as u64;
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Poly::zero(self.p), self.clone());
        }
        let inv = d.lead().inv().unwrap().value() as u64;
        let mut r: Vec<u64> = self.coeffs.iter().map(|&c| c as u64).collect();
        let mut q = vec![0u32; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = (r[i] % p) * inv % p;
            if c == 0 {
                continue;
            }
            q[i - dd] = c as u32;
            let neg = p - c;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                r[i - dd + j] = (r[i - dd + j] + neg * dc as u64) % p;
            }
        }
        r.truncate(dd);
        (
            Poly::from_u32(self.p, q),
            Poly::from_u32(self.p, r.into_iter().map(|c| c as u32).collect()),
        )
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Exact division; panics if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Poly {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.rem(&y);
            x = y;
            y = r;
        }
        x.monic().1
    }

    /// Returns (g, s, t) with s·a + t·b = g, g monic.
    pub fn ext_gcd(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let p = a.p;
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(p), Poly::zero(p));
        let (mut t0, mut t1) = (Poly::zero(p), Poly::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.lead().inv() {
            Some(inv) => (r0.scale(inv), s0.scale(inv), t0.scale(inv)),
            None => (r0, s0, t0),
        }
    }

    /// Inverse of `self` modulo `m`, if coprime.
    pub fn inv_mod(&self, m: &Poly) -> Option<Poly> {
        let (g, s, _) = Poly::ext_gcd(&self.rem(m), m);
        if g.is_one() {
            Some(s.rem(m))
        } else {
            None
        }
    }

    pub fn mul_mod(&self, other: &Poly, m: &Poly) -> Poly {
        (self * other).rem(m)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn pow_mod(&self, mut e: u128, m: &Poly) -> Poly {
        let mut base = self.rem(m);
        let mut acc = Poly::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_mod(&base, m);
            }
        }
        acc
    }

    /// Rabin's test. Small degrees also go through the root check.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(n) => n,
        };
        if n == 1 {
            return true;
        }
        if n <= 3 {
            return FqElem::all(self.p).all(|x| !self.eval(x).is_zero());
        }
        let f = self.monic().1;
        let t = Poly::t(self.p);
        let q = self.p as u128;
        let frob = |k: usize| -> Poly {
            let mut x = t.clone();
            for _ in 0..k {
                x = x.pow_mod(q, &f);
            }
            x
        };
        if !(&frob(n) - &t).rem(&f).is_zero() {
            return false;
        }
        for r in prime_divisors(n) {
            let g = Poly::gcd(&(&frob(n / r) - &t), &f);
            if !g.is_one() {
                return false;
            }
        }
        true
    }

    /// Encodes a monic polynomial of degree d by its lower coefficients as a
    /// base-p integer.
    pub fn monic_code(&self) -> u64 {
        let d = self.coeffs.len() - 1;
        let mut code = 0u64;
        for i in (0..d).rev() {
            code = code * self.p as u64 + self.coeffs[i] as u64;
        }
        code
    }

    pub fn from_monic_code(p: u32, degree: usize, mut code: u64) -> Poly {
        let mut coeffs = Vec::with_capacity(degree + 1);
        for _ in 0..degree {
            coeffs.push((code % p as u64) as u32);
            code /= p as u64;
        }
        coeffs.push(1);
        Poly { p, coeffs }
    }

    /// All monic polynomials of the given degree in code order.
    pub fn monics(p: u32, degree: usize) -> impl Iterator<Item = Poly> {
        let count = (p as u64).pow(degree as u32);
        (0..count).map(move |c| Poly::from_monic_code(p, degree, c))
    }

    /// All monic irreducibles of the given degree in code order.
    pub fn monic_irreducibles(p: u32, degree: usize) -> Vec<Poly> {
        Poly::monics(p, degree).filter(|f| f.is_irreducible()).collect()
    }

    /// Factorization into monic irreducibles with multiplicities.
    pub fn factor(&self) -> Result<Factorization, ExactError> {
        if self.is_zero() {
            return Err(ExactError::FactorOfZero);
        }
        let (unit, f) = self.monic();
        let mut factors: Vec<(Poly, u32)> = Vec::new();
        for (sq, mult) in squarefree_decomposition(&f) {
            for (g, d) in distinct_degree(&sq) {
                for h in equal_degree(&g, d) {
                    factors.push((h, mult));
                }
            }
        }
        factors.sort_by(|a, b| poly_order(&a.0, &b.0));
        let mut merged: Vec<(Poly, u32)> = Vec::new();
        for (g, m) in factors {
            match merged.last_mut() {
                Some((h, k)) if *h == g => *k += m,
                _ => merged.push((g, m)),
            }
        }
        let out = Factorization { unit, factors: merged };
        debug_assert_eq!(&out.expand(), self);
        Ok(out)
    }

    /// Parses an expression in T such as "T^2+3*T+4" or "(T+1)^3".
    pub fn parse(p: u32, s: &str) -> Result<Poly, ExactError> {
        let (num, den) = super::parse::parse_rational(p, s)?;
        if !den.is_one() {
            if den.degree() == Some(0) {
                return Ok(num.scale(den.lead().inv().unwrap()));
            }
            return Err(ExactError::Parse(format!("not a polynomial: {s}")));
        }
        Ok(num)
    }
}

/// Degree first, then coefficients from the top down.
pub fn poly_order(a: &Poly, b: &Poly) -> Ordering {
    a.coeffs
        .len()
        .cmp(&b.coeffs.len())
        .then_with(|| a.coeffs.iter().rev().cmp(b.coeffs.iter().rev()))
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.p.cmp(&other.p).then_with(|| poly_order(self, other))
    }
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Monic squarefree parts with multiplicities.
fn squarefree_decomposition(f: &Poly) -> Vec<(Poly, u32)> {
    let p = f.p;
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let df = f.derivative();
    if df.is_zero() {
        // f is a p-th power
        let root = pth_root(f);
        for (g, m) in squarefree_decomposition(&root) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = Poly::gcd(f, &df);
    let mut w = f.exact_div(&c);
    let mut i = 1;
    while !w.is_one() {
        let y = Poly::gcd(&w, &c);
        let z = w.exact_div(&y);
        if !z.is_one() {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.exact_div(&w);
    }
    if !c.is_one() {
        let root = pth_root(&c);
        for (g, m) in squarefree_decomposition(&root) {
            out.push((g, m * p));
        }
    }
    out
}

fn pth_root(f: &Poly) -> Poly {
    let p = f.p as usize;
    let coeffs = f.coeffs.iter().step_by(p).copied().collect();
    Poly::from_u32(f.p, coeffs)
}

/// Splits a monic squarefree polynomial into products of irreducibles of
/// equal degree.
fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let p = f.p;
    let t = Poly::t(p);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = t.clone();
    let mut d = 0;
    while rest.deg() >= 2 * (d as i64 + 1) {
        d += 1;
        h = h.pow_mod(p as u128, &rest);
        let g = Poly::gcd(&(&h - &t), &rest);
        if !g.is_one() {
            rest = rest.exact_div(&g);
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    if rest.deg() > 0 {
        let d = rest.deg() as usize;
        out.push((rest, d));
    }
    out
}

/// Cantor–Zassenhaus splitting with a deterministic stream of trial
/// polynomials.
fn equal_degree(f: &Poly, d: usize) -> Vec<Poly> {
    let n = f.deg() as usize;
    if n == d {
        return vec![f.clone()];
    }
    let p = f.p;
    let mut state: u64 = f
        .coeffs
        .iter()
        .fold(0x9E37_79B9_7F4A_7C15, |h, &c| (h ^ c as u64).wrapping_mul(0x100_0000_01B3) | 1);
    loop {
        let mut coeffs = Vec::with_capacity(n);
        for _ in 0..n {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            coeffs.push((state % p as u64) as u32);
        }
        let a = Poly::from_u32(p, coeffs);
        if a.deg() < 1 {
            continue;
        }
        let cand = if p == 2 {
            let mut acc = a.rem(f);
            let mut term = acc.clone();
            for _ in 1..d {
                term = term.mul_mod(&term, f);
                acc = &acc + &term;
            }
            acc
        } else {
            let e = ((p as u128).pow(d as u32) - 1) / 2;
            &a.pow_mod(e, f) - &Poly::one(p)
        };
        let g = Poly::gcd(&cand, f);
        if !g.is_one() && g != *f && !g.is_zero() {
            let mut out = equal_degree(&g, d);
            out.extend(equal_degree(&f.exact_div(&g), d));
            return out;
        }
    }
}

/// Unit times a product of monic irreducible powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FqElem,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn expand(&self) -> Poly {
        let mut acc = Poly::constant(self.unit);
        for (g, m) in &self.factors {
            acc = &acc * &g.pow(*m as u64);
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "T")?,
                (1, c) => write!(f, "{c}*T")?,
                (i, 1) => write!(f, "T^{i}")?,
                (i, c) => write!(f, "{c}*T^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        assert_eq!(self.p, o.p, "field mismatch");
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                let s = self.coeffs.get(i).unwrap_or(&0) + o.coeffs.get(i).unwrap_or(&0);
                s % self.p
            })
            .collect();
        Poly::from_u32(self.p, coeffs)
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_u32(self.p, self.coeffs.iter().map(|&c| (self.p - c) % self.p).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        assert_eq!(self.p, o.p, "field mismatch");
        if self.is_zero() || o.is_zero() {
            return Poly::zero(self.p);
        }
        let p = self.p as u64;
        let mut acc = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                acc[i + j] += a as u64 * b as u64;
            }
            if i % 64 == 63 {
                for c in acc.iter_mut() {
                    *c %= p;
                }
            }
        }
        Poly::from_u32(self.p, acc.into_iter().map(|c| (c % p) as u32).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(p: u32, c: &[i64]) -> Poly {
        Poly::new(p, c)
    }

    #[test]
    fn factor_t2_plus_1_mod_5() {
        let f = pl(5, &[1, 0, 1]).factor().unwrap();
        assert_eq!(f.unit.value(), 1);
        assert_eq!(f.factors, vec![(pl(5, &[2, 1]), 1), (pl(5, &[3, 1]), 1)]);
    }

    #[test]
    fn factor_square() {
        let f = pl(5, &[-3, 1]).pow(2).factor().unwrap();
        assert_eq!(f.factors, vec![(pl(5, &[2, 1]), 2)]);
    }

    #[test]
    fn factor_cubic_with_unit() {
        let f = pl(5, &[2, 0, 0, 4]).factor().unwrap();
        assert_eq!(f.unit.value(), 4);
        assert_eq!(f.factors, vec![(pl(5, &[2, 1]), 1), (pl(5, &[4, 3, 1]), 1)]);
        assert!(pl(5, &[4, 3, 1]).is_irreducible());
    }

    #[test]
    fn factor_zero_fails() {
        assert_eq!(Poly::zero(5).factor(), Err(ExactError::FactorOfZero));
    }

    #[test]
    fn pth_powers_factor() {
        let g = pl(3, &[1, 1, 0, 1]);
        let f = g.pow(3);
        let fac = f.factor().unwrap();
        assert_eq!(fac.expand(), f);
        assert!(fac.factors.iter().all(|(_, m)| m % 3 == 0));
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // number of monic irreducibles of degree d over F_5
        assert_eq!(Poly::monic_irreducibles(5, 1).len(), 5);
        assert_eq!(Poly::monic_irreducibles(5, 2).len(), 10);
        assert_eq!(Poly::monic_irreducibles(5, 3).len(), 40);
        assert_eq!(Poly::monic_irreducibles(5, 4).len(), 150);
        assert_eq!(Poly::monic_irreducibles(3, 6).len(), 116);
    }

    #[test]
    fn monic_code_roundtrip() {
        for f in Poly::monics(5, 3) {
            assert_eq!(Poly::from_monic_code(5, 3, f.monic_code()), f);
        }
    }

    #[test]
    fn display_and_parse() {
        let f = pl(5, &[4, 3, 1]);
        assert_eq!(f.to_string(), "T^2+3*T+4");
        assert_eq!(Poly::parse(5, "T^2+3*T+4").unwrap(), f);
        assert_eq!(Poly::parse(5, "(T+1)^2 + T + 3").unwrap(), f);
    }

    #[test]
    fn ext_gcd_identity() {
        let a = pl(7, &[1, 2, 3, 4]);
        let b = pl(7, &[5, 0, 1]);
        let (g, s, t) = Poly::ext_gcd(&a, &b);
        assert_eq!(&(&s * &a) + &(&t * &b), g);
    }
}

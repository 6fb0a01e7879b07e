use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive, Zero};

use super::ExactError;

/// The number a + b·√q with arbitrary-precision a, b.
///
/// When q is a perfect square the value is folded into `a`, so equality of
/// representations is equality of numbers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SqrtQInt {
    a: BigInt,
    b: BigInt,
    q: u64,
}

fn exact_sqrt(q: u64) -> Option<u64> {
    let r = q.sqrt();
    (r * r == q).then_some(r)
}

impl SqrtQInt {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, q: u64) -> Self {
        assert!(q > 0, "q must be positive");
        let (mut a, mut b) = (a.into(), b.into());
        if let Some(r) = exact_sqrt(q) {
            a += &b * BigInt::from(r);
            b = BigInt::zero();
        }
        SqrtQInt { a, b, q }
    }

    pub fn integer(a: impl Into<BigInt>, q: u64) -> Self {
        SqrtQInt::new(a, 0, q)
    }

    /// The number √q itself.
    pub fn sqrt_q(q: u64) -> Self {
        SqrtQInt::new(0, 1, q)
    }

    pub fn zero(q: u64) -> Self {
        SqrtQInt::integer(0, q)
    }

    pub fn one(q: u64) -> Self {
        SqrtQInt::integer(1, q)
    }

    pub fn rational_part(&self) -> &BigInt {
        &self.a
    }

    pub fn sqrt_part(&self) -> &BigInt {
        &self.b
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign of a + b√q.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * BigInt::from(self.q);
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = SqrtQInt::one(self.q);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        SqrtQInt { a: &self.a * k, b: &self.b * k, q: self.q }
    }

    /// Conjugate a − b√q.
    pub fn conj(&self) -> Self {
        SqrtQInt { a: self.a.clone(), b: -&self.b, q: self.q }
    }

    /// Field norm a² − q·b².
    pub fn norm(&self) -> BigInt {
        &self.a * &self.a - &self.b * &self.b * BigInt::from(self.q)
    }

    /// Division that is exact in ℤ[√q], or None.
    pub fn checked_div(&self, d: &SqrtQInt) -> Option<SqrtQInt> {
        assert_eq!(self.q, d.q, "mismatched q");
        if d.is_zero() {
            return None;
        }
        let n = d.norm();
        let top = self * &d.conj();
        let (qa, ra) = top.a.div_rem(&n);
        let (qb, rb) = top.b.div_rem(&n);
        if ra.is_zero() && rb.is_zero() {
            Some(SqrtQInt::new(qa, qb, self.q))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.q as f64).sqrt()
    }

    pub fn cmp_exact(&self, other: &SqrtQInt) -> Ordering {
        assert_eq!(self.q, other.q, "mismatched q");
        (self - other).signum().cmp(&0)
    }

    pub fn max(self, other: SqrtQInt) -> SqrtQInt {
        if self.cmp_exact(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

fn sign_of(x: &BigInt) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for SqrtQInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.q == other.q).then(|| self.cmp_exact(other))
    }
}

impl fmt::Display for SqrtQInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_negative() {
            write!(f, "{}-{}*sqrt({})", self.a, -&self.b, self.q)
        } else {
            write!(f, "{}+{}*sqrt({})", self.a, self.b, self.q)
        }
    }
}

impl fmt::Debug for SqrtQInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for SqrtQInt {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, ExactError> {
        let bad = || ExactError::Parse(format!("not of the form a+b*sqrt(q): {s:?}"));
        let s = s.trim();
        let star = s.rfind("*sqrt(").ok_or_else(bad)?;
        let q: u64 = s[star + 6..].strip_suffix(')').ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let head = &s[..star];
        let split = head.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').map(|(i, _)| i).last();
        let split = split.ok_or_else(bad)?;
        let a: BigInt = head[..split].parse().map_err(|_| bad())?;
        let b_str = &head[split..];
        let b: BigInt = b_str.trim_start_matches('+').parse().map_err(|_| bad())?;
        Ok(SqrtQInt::new(a, b, q))
    }
}

impl<'a> Add<&'a SqrtQInt> for &'a SqrtQInt {
    type Output = SqrtQInt;
    fn add(self, o: &SqrtQInt) -> SqrtQInt {
        assert_eq!(self.q, o.q, "mismatched q");
        SqrtQInt { a: &self.a + &o.a, b: &self.b + &o.b, q: self.q }
    }
}

impl<'a> Sub<&'a SqrtQInt> for &'a SqrtQInt {
    type Output = SqrtQInt;
    fn sub(self, o: &SqrtQInt) -> SqrtQInt {
        assert_eq!(self.q, o.q, "mismatched q");
        SqrtQInt { a: &self.a - &o.a, b: &self.b - &o.b, q: self.q }
    }
}

impl<'a> Mul<&'a SqrtQInt> for &'a SqrtQInt {
    type Output = SqrtQInt;
    fn mul(self, o: &SqrtQInt) -> SqrtQInt {
        assert_eq!(self.q, o.q, "mismatched q");
        let q = BigInt::from(self.q);
        SqrtQInt {
            a: &self.a * &o.a + &self.b * &o.b * q,
            b: &self.a * &o.b + &self.b * &o.a,
            q: self.q,
        }
    }
}

impl Neg for &SqrtQInt {
    type Output = SqrtQInt;
    fn neg(self) -> SqrtQInt {
        SqrtQInt { a: -&self.a, b: -&self.b, q: self.q }
    }
}

impl Add for SqrtQInt {
    type Output = SqrtQInt;
    fn add(self, o: SqrtQInt) -> SqrtQInt {
        &self + &o
    }
}

impl Sub for SqrtQInt {
    type Output = SqrtQInt;
    fn sub(self, o: SqrtQInt) -> SqrtQInt {
        &self - &o
    }
}

impl Mul for SqrtQInt {
    type Output = SqrtQInt;
    fn mul(self, o: SqrtQInt) -> SqrtQInt {
        &self * &o
    }
}

impl Neg for SqrtQInt {
    type Output = SqrtQInt;
    fn neg(self) -> SqrtQInt {
        -&self
    }
}

impl std::iter::Sum for SqrtQInt {
    fn sum<I: Iterator<Item = SqrtQInt>>(mut iter: I) -> SqrtQInt {
        let first = iter.next().expect("sum of empty SqrtQInt iterator has no q");
        iter.fold(first, |acc, x| &acc + &x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplication_rule() {
        let x = SqrtQInt::new(2, 3, 5);
        let y = SqrtQInt::new(-1, 4, 5);
        assert_eq!(&x * &y, SqrtQInt::new(-2 + 12 * 5, 8 - 3, 5));
    }

    #[test]
    fn signs() {
        assert_eq!(SqrtQInt::new(-4, 2, 5).signum(), 1);
        assert_eq!(SqrtQInt::new(-5, 2, 5).signum(), -1);
        assert_eq!(SqrtQInt::new(3, -1, 9).signum(), 0);
    }

    #[test]
    fn text_roundtrip() {
        for x in [SqrtQInt::new(3, -2, 5), SqrtQInt::new(-7, 11, 13), SqrtQInt::new(0, 0, 7)] {
            let s = x.to_string();
            assert_eq!(s.parse::<SqrtQInt>().unwrap(), x);
        }
        assert_eq!("-1-2*sqrt(5)".parse::<SqrtQInt>().unwrap(), SqrtQInt::new(-1, -2, 5));
    }

    #[test]
    fn exact_division() {
        let x = SqrtQInt::new(2, 3, 5);
        let y = SqrtQInt::new(1, 1, 5);
        assert_eq!((&x * &y).checked_div(&y).unwrap(), x);
        assert!(SqrtQInt::one(5).checked_div(&SqrtQInt::integer(2, 5)).is_none());
    }
}

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::ExactError;

/// An element of the prime field F_p.
///
/// The modulus travels with the value so that mixing fields is caught at
/// runtime rather than producing garbage.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqElem {
    value: u32,
    p: u32,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Checks that `p` is a usable base-field characteristic.
pub fn check_prime(p: u32) -> Result<(), ExactError> {
    if is_prime(p as u64) {
        Ok(())
    } else {
        Err(ExactError::NotPrime(p))
    }
}

impl FqElem {
    pub fn new(value: i64, p: u32) -> Self {
        let v = value.rem_euclid(p as i64) as u32;
        FqElem { value: v, p }
    }

    pub fn zero(p: u32) -> Self {
        FqElem { value: 0, p }
    }

    pub fn one(p: u32) -> Self {
        FqElem { value: 1 % p, p }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = FqElem::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn inv(self) -> Option<Self> {
        if self.value == 0 {
            None
        } else {
            Some(self.pow(self.p as u64 - 2))
        }
    }

    /// Legendre symbol: 1 for nonzero squares, -1 for non-squares, 0 at zero.
    pub fn legendre(self) -> i32 {
        if self.value == 0 {
            return 0;
        }
        if self.pow((self.p as u64 - 1) / 2).value == 1 {
            1
        } else {
            -1
        }
    }

    pub fn all(p: u32) -> impl Iterator<Item = FqElem> {
        (0..p).map(move |v| FqElem { value: v, p })
    }

    fn check(self, other: Self) {
        assert_eq!(self.p, other.p, "field mismatch");
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FqElem {
    type Output = FqElem;
    fn add(self, o: FqElem) -> FqElem {
        self.check(o);
        let s = self.value + o.value;
        FqElem { value: if s >= self.p { s - self.p } else { s }, p: self.p }
    }
}

impl Sub for FqElem {
    type Output = FqElem;
    fn sub(self, o: FqElem) -> FqElem {
        self.check(o);
        let s = self.value + self.p - o.value;
        FqElem { value: if s >= self.p { s - self.p } else { s }, p: self.p }
    }
}

impl Neg for FqElem {
    type Output = FqElem;
    fn neg(self) -> FqElem {
        FqElem { value: (self.p - self.value) % self.p, p: self.p }
    }
}

impl Mul for FqElem {
    type Output = FqElem;
    fn mul(self, o: FqElem) -> FqElem {
        self.check(o);
        FqElem { value: ((self.value as u64 * o.value as u64) % self.p as u64) as u32, p: self.p }
    }
}

impl Div for FqElem {
    type Output = FqElem;
    fn div(self, o: FqElem) -> FqElem {
        self * o.inv().expect("division by zero in F_p")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_exist() {
        for p in [5u32, 7, 11, 13] {
            for x in FqElem::all(p).skip(1) {
                assert_eq!(x * x.inv().unwrap(), FqElem::one(p));
            }
        }
    }

    #[test]
    fn frobenius_is_identity_on_prime_field() {
        for x in FqElem::all(7) {
            assert_eq!(x.pow(7), x);
        }
    }

    #[test]
    fn two_squared_is_minus_one_mod_five() {
        let two = FqElem::new(2, 5);
        assert_eq!(two * two, -FqElem::one(5));
    }
}

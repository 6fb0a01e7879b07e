use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// An element Σ c_i ζ^i of ℤ[ζ_p], ζ a primitive p-th root of unity,
/// stored in the power basis 1, ζ, …, ζ^{p−2}.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycInt {
    p: u32,
    coords: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(p: u32) -> Self {
        CycInt { p, coords: vec![BigInt::zero(); p as usize - 1] }
    }

    pub fn integer(n: impl Into<BigInt>, p: u32) -> Self {
        let mut out = CycInt::zero(p);
        out.coords[0] = n.into();
        out
    }

    /// ζ^k.
    pub fn zeta_pow(k: i64, p: u32) -> Self {
        let mut full = vec![BigInt::zero(); p as usize];
        full[k.rem_euclid(p as i64) as usize] = BigInt::from(1);
        CycInt::from_exponent_coeffs(p, full)
    }

    /// Builds Σ_{k=0}^{p−1} c_k ζ^k, reducing ζ^{p−1} = −(1 + … + ζ^{p−2}).
    pub fn from_exponent_coeffs(p: u32, mut full: Vec<BigInt>) -> Self {
        assert_eq!(full.len(), p as usize);
        let top = full.pop().unwrap();
        for c in full.iter_mut() {
            *c -= &top;
        }
        CycInt { p, coords: full }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Returns the rational integer this element equals, if any.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.coords[1..].iter().all(|c| c.is_zero()).then(|| self.coords[0].clone())
    }

    /// Image under ζ ↦ ζ^k for k coprime to p.
    pub fn galois(&self, k: i64) -> Self {
        let p = self.p as i64;
        assert!(k.rem_euclid(p) != 0, "not a Galois automorphism");
        let mut full = vec![BigInt::zero(); self.p as usize];
        for (i, c) in self.coords.iter().enumerate() {
            full[((i as i64) * k).rem_euclid(p) as usize] += c;
        }
        CycInt::from_exponent_coeffs(self.p, full)
    }

    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// |x|² = x·x̄ as an element of the real subfield.
    pub fn abs_squared(&self) -> CycInt {
        self * &self.conj()
    }

    /// Value under ζ ↦ e^{2πik/p}.
    pub fn embed(&self, k: i64) -> (f64, f64) {
        let p = self.p as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (i, c) in self.coords.iter().enumerate() {
            let c = c.to_f64().unwrap_or(f64::NAN);
            let angle = 2.0 * std::f64::consts::PI * (i as i64 * k) as f64 / p;
            re += c * angle.cos();
            im += c * angle.sin();
        }
        (re, im)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        CycInt { p: self.p, coords: self.coords.iter().map(|c| c * k).collect() }
    }
}

/// |x| under the standard embedding ζ ↦ e^{2πi/p}.
///
/// Rational and real-subfield cases go through x·x̄ to avoid cancellation.
pub fn cyc_abs(x: &CycInt) -> f64 {
    let sq = x.abs_squared();
    if let Some(n) = sq.as_integer() {
        return n.to_f64().unwrap_or(f64::NAN).max(0.0).sqrt();
    }
    let (re, im) = x.embed(1);
    re.hypot(im)
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 && c >= &BigInt::zero() {
                write!(f, "+")?;
            }
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z")?,
                _ => write!(f, "{c}*z^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a CycInt> for &'a CycInt {
    type Output = CycInt;
    fn add(self, o: &CycInt) -> CycInt {
        assert_eq!(self.p, o.p);
        CycInt { p: self.p, coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a CycInt> for &'a CycInt {
    type Output = CycInt;
    fn sub(self, o: &CycInt) -> CycInt {
        assert_eq!(self.p, o.p);
        CycInt { p: self.p, coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        CycInt { p: self.p, coords: self.coords.iter().map(|a| -a).collect() }
    }
}

impl<'a> Mul<&'a CycInt> for &'a CycInt {
    type Output = CycInt;
    fn mul(self, o: &CycInt) -> CycInt {
        assert_eq!(self.p, o.p);
        let p = self.p as usize;
        let mut full = vec![BigInt::zero(); p];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coords.iter().enumerate() {
                full[(i + j) % p] += a * b;
            }
        }
        CycInt::from_exponent_coeffs(self.p, full)
    }
}

impl Add for CycInt {
    type Output = CycInt;
    fn add(self, o: CycInt) -> CycInt {
        &self + &o
    }
}

impl Mul for CycInt {
    type Output = CycInt;
    fn mul(self, o: CycInt) -> CycInt {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_character_sum_vanishes() {
        let p = 7;
        let mut acc = CycInt::zero(p);
        for k in 0..p as i64 {
            acc = &acc + &CycInt::zeta_pow(k, p);
        }
        assert!(acc.is_zero());
        assert_eq!(cyc_abs(&acc), 0.0);
    }

    #[test]
    fn small_absolute_values() {
        assert_eq!(cyc_abs(&CycInt::zero(5)), 0.0);
        assert!((cyc_abs(&CycInt::integer(-1, 5)) - 1.0).abs() < 1e-15);
        let z = CycInt::zeta_pow(2, 5);
        assert!((cyc_abs(&z) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_sum_has_norm_p() {
        // quadratic Gauss sum over F_5
        let p = 5;
        let mut g = CycInt::zero(p);
        for x in 0..p as i64 {
            g = &g + &CycInt::zeta_pow(x * x, p);
        }
        assert_eq!(g.abs_squared().as_integer(), Some(BigInt::from(5)));
    }

    #[test]
    fn display_format() {
        let x = &CycInt::integer(3, 5) + &CycInt::zeta_pow(1, 5).scale(&BigInt::from(-2));
        assert_eq!(x.to_string(), "3-2*z+0*z^2+0*z^3");
    }
}

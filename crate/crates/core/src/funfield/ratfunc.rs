use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::exactalg::{parse::parse_rational, ExactError, FqElem, Poly};

use super::Place;

/// A rational function num/den in lowest terms with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> RatFunc {
        assert!(!den.is_zero(), "zero denominator");
        let p = num.modulus();
        if num.is_zero() {
            return RatFunc { num, den: Poly::one(p) };
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = (num.exact_div(&g), den.exact_div(&g));
        let (lc, den) = den.monic();
        RatFunc { num: num.scale(lc.inv().unwrap()), den }
    }

    pub fn from_poly(num: Poly) -> RatFunc {
        let p = num.modulus();
        RatFunc { num, den: Poly::one(p) }
    }

    pub fn zero(p: u32) -> RatFunc {
        RatFunc::from_poly(Poly::zero(p))
    }

    pub fn one(p: u32) -> RatFunc {
        RatFunc::from_poly(Poly::one(p))
    }

    pub fn constant(c: FqElem) -> RatFunc {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn t(p: u32) -> RatFunc {
        RatFunc::from_poly(Poly::t(p))
    }

    /// π^k for a finite place, or s^k = T^{−k} at infinity.
    pub fn uniformizer_pow(place: &Place, k: i64, p: u32) -> RatFunc {
        let base = match place {
            Place::Finite(pi) => pi.clone(),
            Place::Infinity => Poly::t(p),
        };
        let k = if matches!(place, Place::Infinity) { -k } else { k };
        if k >= 0 {
            RatFunc::from_poly(base.pow(k as u64))
        } else {
            RatFunc::new(Poly::one(p), base.pow((-k) as u64))
        }
    }

    pub fn parse(p: u32, s: &str) -> Result<RatFunc, ExactError> {
        let (n, d) = parse_rational(p, s)?;
        Ok(RatFunc::new(n, d))
    }

    pub fn modulus(&self) -> u32 {
        self.num.modulus()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn inv(&self) -> Option<RatFunc> {
        (!self.is_zero()).then(|| RatFunc::new(self.den.clone(), self.num.clone()))
    }

    pub fn scale(&self, c: FqElem) -> RatFunc {
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, k: i64) -> RatFunc {
        if k >= 0 {
            RatFunc { num: self.num.pow(k as u64), den: self.den.pow(k as u64) }
        } else {
            self.inv().expect("negative power of zero").pow(-k)
        }
    }

    /// Valuation at a place; None for the zero function.
    pub fn valuation(&self, place: &Place) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(match place {
            Place::Infinity => self.den.deg() - self.num.deg(),
            Place::Finite(pi) => poly_valuation(&self.num, pi) - poly_valuation(&self.den, pi),
        })
    }
}

/// Multiplicity of π in f (f nonzero).
pub fn poly_valuation(f: &Poly, pi: &Poly) -> i64 {
    let mut k = 0;
    let mut g = f.clone();
    loop {
        let (q, r) = g.div_rem(pi);
        if !r.is_zero() {
            return k;
        }
        g = q;
        k += 1;
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone());
        }
        RatFunc::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, o: RatFunc) -> RatFunc {
        &self + &o
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, o: RatFunc) -> RatFunc {
        &self - &o
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, o: RatFunc) -> RatFunc {
        &self * &o
    }
}

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::sqrtq::SqrtQInt;
use super::ExactError;

/// Coefficient rings that rational series can live over.
pub trait SeriesRing: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn div_exact(&self, o: &Self) -> Option<Self>;
}

impl SeriesRing for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            return None;
        }
        let (q, r) = self.div_rem(o);
        r.is_zero().then_some(q)
    }
}

impl SeriesRing for SqrtQInt {
    fn zero_like(&self) -> Self {
        SqrtQInt::zero(self.q())
    }
    fn one_like(&self) -> Self {
        SqrtQInt::one(self.q())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        self.checked_div(o)
    }
}

/// Polynomial helpers on coefficient vectors (low to high).
pub fn poly_mul<R: SeriesRing>(a: &[R], b: &[R]) -> Vec<R> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let zero = a[0].zero_like();
    let mut out = vec![zero; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add_ref(&x.mul_ref(y));
        }
    }
    out
}

/// numerator / denominator as a formal power series in u.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSeries<R: SeriesRing> {
    numerator: Vec<R>,
    denominator: Vec<R>,
}

impl<R: SeriesRing> RationalSeries<R> {
    pub fn new(numerator: Vec<R>, denominator: Vec<R>) -> Result<Self, ExactError> {
        match denominator.first() {
            Some(d0) if !d0.is_zero_elem() => Ok(RationalSeries { numerator, denominator }),
            _ => Err(ExactError::NonInvertibleSeries),
        }
    }

    pub fn numerator(&self) -> &[R] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[R] {
        &self.denominator
    }

    /// First `count` coefficients, via the recurrence Σ_k den_k c_{n−k} = num_n.
    pub fn coefficients(&self, count: usize) -> Result<Vec<R>, ExactError> {
        let d0 = &self.denominator[0];
        let zero = d0.zero_like();
        let mut out: Vec<R> = Vec::with_capacity(count);
        for n in 0..count {
            let mut acc = self.numerator.get(n).cloned().unwrap_or_else(|| zero.clone());
            for (k, dk) in self.denominator.iter().enumerate().skip(1) {
                if k > n {
                    break;
                }
                acc = acc.sub_ref(&dk.mul_ref(&out[n - k]));
            }
            let c = acc.div_exact(d0).ok_or(ExactError::NonIntegralSeries)?;
            out.push(c);
        }
        Ok(out)
    }
}

/// The u^n coefficient of a rational series; negative n gives zero.
pub fn series_coeff<R: SeriesRing>(s: &RationalSeries<R>, n: i64) -> Result<R, ExactError> {
    if n < 0 {
        return Ok(s.denominator[0].zero_like());
    }
    let coeffs = s.coefficients(n as usize + 1)?;
    Ok(coeffs[n as usize].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn inverse_square() {
        let s = RationalSeries::new(ints(&[1]), ints(&[1, -2, 1])).unwrap();
        assert_eq!(series_coeff(&s, 2).unwrap(), BigInt::from(3));
    }

    #[test]
    fn zero_constant_term_rejected() {
        assert_eq!(
            RationalSeries::new(ints(&[1]), ints(&[0, 1])).unwrap_err(),
            ExactError::NonInvertibleSeries
        );
    }

    #[test]
    fn recurrence_holds() {
        let s = RationalSeries::new(ints(&[1, 1]), ints(&[1, -1, -1])).unwrap();
        let c = s.coefficients(20).unwrap();
        for n in 2..20 {
            assert_eq!(c[n], &c[n - 1] + &c[n - 2]);
        }
    }
}

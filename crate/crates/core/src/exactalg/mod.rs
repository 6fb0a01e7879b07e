//! Exact arithmetic: prime fields and their extensions, polynomials,
//! ℤ[√q], ℤ[ζ_p] and rational generating series.

mod cyclotomic;
mod extfield;
mod field;
pub mod parse;
mod poly;
mod series;
mod sqrtq;

pub use cyclotomic::{cyc_abs, CycInt};
pub use extfield::{find_primitive, ExtField, LOG_ZERO};
pub use field::{check_prime, is_prime, FqElem};
pub use poly::{poly_order, Factorization, Poly};
pub use series::{poly_mul, series_coeff, RationalSeries, SeriesRing};
pub use sqrtq::SqrtQInt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("factor-of-zero")]
    FactorOfZero,
    #[error("non-invertible-series")]
    NonInvertibleSeries,
    #[error("non-integral-series: coefficient not exactly divisible by the constant term")]
    NonIntegralSeries,
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("parse error: {0}")]
    Parse(String),
}

/// poly_factor as a free function.
pub fn poly_factor(f: &Poly) -> Result<Factorization, ExactError> {
    f.factor()
}

/// Binomial coefficient with the convention that it vanishes outside
/// 0 ≤ k ≤ n (including negative n).
pub fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), BigInt::from(10));
        assert_eq!(binom(-1, 0), BigInt::zero());
        assert_eq!(binom(3, 4), BigInt::zero());
        assert_eq!(binom(30, 15), BigInt::from(155117520));
    }
}

use crate::exactalg::{ExtField, FqElem, Poly};
use crate::funfield::Place;
use crate::whittaker::LinearForm;

use super::linalg::{rank, rank_ext};
use super::{ETuple, HeightError};

/// Π_x l_x^{e_x} as a polynomial in T; the factor at infinity is 1.
fn level_poly(e: &ETuple, p: u32) -> Poly {
    let mut out = Poly::one(p);
    for (v, k) in e.iter() {
        if let Place::Finite(pi) = v {
            out = &out * &pi.pow(k as u64);
        }
    }
    out
}

/// The Hankel matrices (α(L·T^{i+j})) for each m, with r = n − Σe.
fn hankel_entries(n: usize, alpha: &LinearForm, e: &ETuple) -> Result<(usize, Vec<FqElem>), HeightError> {
    let total = e.total();
    if total as usize > n {
        return Err(HeightError::TupleTooLarge(total, n));
    }
    let r = n - total as usize;
    let p = alpha.modulus();
    let l = level_poly(e, p);
    let t = Poly::t(p);
    let mut moments = Vec::with_capacity(r + 1);
    let mut w = l;
    for _ in 0..=r {
        moments.push(alpha.eval(&w));
        w = &w * &t;
    }
    Ok((r, moments))
}

fn splitting(n: usize, e: &ETuple, r: usize, rank_of: impl Fn(usize) -> usize) -> i64 {
    // m = r + 1 always has a kernel since the matrix has no columns
    let m = (0..=r + 1).find(|&m| rank_of(m) <= m).unwrap_or(r + 1);
    n as i64 - 2 * m as i64 - e.total() as i64
}

/// d = n − 2m − Σe with m minimal such that f ↦ (g ↦ α(f·Π l^e·g)) has a
/// nonzero kernel on forms of degree m.
pub fn d_alpha(n: usize, alpha: &LinearForm, e: &ETuple) -> Result<i64, HeightError> {
    let (r, mom) = hankel_entries(n, alpha, e)?;
    Ok(splitting(n, e, r, |m| {
        if m > r {
            return 0;
        }
        let rows = (0..=m).map(|i| (0..=r - m).map(|j| mom[i + j]).collect()).collect();
        rank(rows)
    }))
}

/// The same invariant with ranks computed over F_{p^d}.
pub fn d_alpha_over(n: usize, alpha: &LinearForm, e: &ETuple, field: &ExtField) -> Result<i64, HeightError> {
    let (r, mom) = hankel_entries(n, alpha, e)?;
    Ok(splitting(n, e, r, |m| {
        if m > r {
            return 0;
        }
        let rows = (0..=m).map(|i| (0..=r - m).map(|j| field.from_prime(mom[i + j])).collect()).collect();
        rank_ext(rows, field)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funfield::Divisor;
    use crate::heights::Level;

    const P: u32 = 5;

    fn empty() -> ETuple {
        ETuple::zeros(&Level::from_conductor(&Divisor::zero()).unwrap())
    }

    #[test]
    fn mixed_coefficient_form() {
        // α picks the T coefficient in degree 2, i.e. XY
        let alpha = LinearForm::coefficient(P, 2, 1);
        assert_eq!(d_alpha(2, &alpha, &empty()).unwrap(), -2);
    }

    #[test]
    fn top_coefficient_form() {
        for n in 1..7 {
            let alpha = LinearForm::coefficient(P, n, n);
            assert_eq!(d_alpha(n, &alpha, &empty()).unwrap(), n as i64 - 2);
        }
    }

    #[test]
    fn full_tuple_with_vanishing_form() {
        let lv = Level::from_conductor(&Divisor::parse(P, "[T] + [T+1]").unwrap()).unwrap();
        let e = ETuple::full(&lv);
        // α(T(T+1)) = 0 for α = coefficient of T^0
        let alpha = LinearForm::coefficient(P, 2, 0);
        assert_eq!(d_alpha(2, &alpha, &e).unwrap(), 0);
        assert!(d_alpha(1, &alpha, &e).is_err());
    }

    #[test]
    fn zero_form_splits_maximally() {
        for n in 0..6 {
            assert_eq!(d_alpha(n, &LinearForm::zero(P, n), &empty()).unwrap(), n as i64);
        }
    }

    #[test]
    fn brute_force_small() {
        // m is minimal with some nonzero f of degree ≤ m killing every g
        let n = 3;
        let lv = Level::from_conductor(&Divisor::parse(P, "[T+2]").unwrap()).unwrap();
        let field = ExtField::new(P, 2);
        let mut seed = 7u64;
        for _ in 0..40 {
            let vals: Vec<FqElem> = (0..=n)
                .map(|_| {
                    seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    FqElem::new((seed >> 33) as i64 % P as i64, P)
                })
                .collect();
            let alpha = LinearForm::new(vals);
            for e in ETuple::all(&lv) {
                let d = d_alpha(n, &alpha, &e).unwrap();
                assert_eq!(d, d_alpha_over(n, &alpha, &e, &field).unwrap());
                let l = level_poly(&e, P);
                let r = n - e.total() as usize;
                let kills = |m: usize| {
                    (1..(P as u64).pow(m as u32 + 1)).any(|code| {
                        let mut c = code;
                        let coeffs: Vec<u32> = (0..=m).map(|_| { let x = (c % P as u64) as u32; c /= P as u64; x }).collect();
                        let f = Poly::from_u32(P, coeffs);
                        (0..=r - m).all(|j| alpha.eval(&(&(&f * &l) * &Poly::t(P).pow(j as u64))).is_zero())
                    })
                };
                let m = (0..=r).find(|&m| kills(m)).unwrap_or(r + 1);
                assert_eq!(d, n as i64 - 2 * m as i64 - e.total() as i64);
            }
        }
    }
}

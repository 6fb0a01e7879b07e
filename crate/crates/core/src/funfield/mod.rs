//! Places, divisors, local expansions, residues and the residue pairing on
//! F_q(T), with the differential dT fixed as reference form.

mod local;
mod ratfunc;

pub use local::{residue_pairing, Adele, LocalElement};
pub use ratfunc::{poly_valuation, RatFunc};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::exactalg::{poly_order, CycInt, ExactError, FqElem, Poly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("divisor-of-zero")]
    DivisorOfZero,
    #[error("precision-exhausted at {0}")]
    PrecisionExhausted(String),
    #[error("not a place: {0}")]
    NotAPlace(String),
    #[error("negative-multiplicity")]
    NegativeMultiplicity,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// A closed point of P¹: a monic irreducible polynomial or infinity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Place {
    Finite(Poly),
    Infinity,
}

impl Place {
    pub fn finite(pi: Poly) -> Result<Place, FieldError> {
        if pi.is_monic() && pi.is_irreducible() {
            Ok(Place::Finite(pi))
        } else {
            Err(FieldError::NotAPlace(pi.to_string()))
        }
    }

    /// The place T − c.
    pub fn rational(c: FqElem) -> Place {
        Place::Finite(Poly::linear(c))
    }

    pub fn degree(&self) -> usize {
        match self {
            Place::Infinity => 1,
            Place::Finite(pi) => pi.deg() as usize,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Place::Infinity)
    }

    pub fn poly(&self) -> Option<&Poly> {
        match self {
            Place::Finite(pi) => Some(pi),
            Place::Infinity => None,
        }
    }

    /// For a degree-one finite place T − c, the point c.
    pub fn rational_point(&self) -> Option<FqElem> {
        match self {
            Place::Finite(pi) if pi.deg() == 1 => Some(-pi.coeff(0)),
            _ => None,
        }
    }

    pub fn parse(p: u32, s: &str) -> Result<Place, FieldError> {
        let s = s.trim();
        if s == "inf" || s == "[inf]" {
            return Ok(Place::Infinity);
        }
        let pi = Poly::parse(p, s)?;
        Place::finite(pi)
    }

    /// All places of degree d (infinity counted in degree 1, listed last).
    pub fn all_of_degree(p: u32, d: usize) -> Vec<Place> {
        let mut out: Vec<Place> = Poly::monic_irreducibles(p, d).into_iter().map(Place::Finite).collect();
        if d == 1 {
            out.push(Place::Infinity);
        }
        out
    }
}

impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Place::Infinity, Place::Infinity) => Ordering::Equal,
            (Place::Infinity, _) => Ordering::Greater,
            (_, Place::Infinity) => Ordering::Less,
            (Place::Finite(a), Place::Finite(b)) => poly_order(a, b),
        }
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Finite(pi) => write!(f, "{pi}"),
        }
    }
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// A finitely supported integer combination of places.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Divisor {
    mults: BTreeMap<Place, i64>,
}

impl Divisor {
    pub fn zero() -> Divisor {
        Divisor::default()
    }

    pub fn point(place: Place, k: i64) -> Divisor {
        let mut d = Divisor::zero();
        d.add_at(place, k);
        d
    }

    pub fn add_at(&mut self, place: Place, k: i64) {
        if k == 0 {
            return;
        }
        let e = self.mults.entry(place.clone()).or_insert(0);
        *e += k;
        if *e == 0 {
            self.mults.remove(&place);
        }
    }

    pub fn mult(&self, place: &Place) -> i64 {
        *self.mults.get(place).unwrap_or(&0)
    }

    pub fn degree(&self) -> i64 {
        self.mults.iter().map(|(v, &k)| v.degree() as i64 * k).sum()
    }

    pub fn is_effective(&self) -> bool {
        self.mults.values().all(|&k| k >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.mults.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &Place> {
        self.mults.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Place, i64)> {
        self.mults.iter().map(|(v, &k)| (v, k))
    }

    pub fn is_squarefree(&self) -> bool {
        self.mults.values().all(|&k| k == 1)
    }

    pub fn parse(p: u32, s: &str) -> Result<Divisor, FieldError> {
        let mut out = Divisor::zero();
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(out);
        }
        let bad = || FieldError::Exact(ExactError::Parse(format!("bad divisor: {s:?}")));
        let mut rest = s;
        let mut sign = 1i64;
        loop {
            rest = rest.trim_start();
            let open = rest.find('[').ok_or_else(bad)?;
            let close = rest.find(']').ok_or_else(bad)?;
            let coeff = rest[..open].trim().trim_end_matches('*').trim();
            let k: i64 = if coeff.is_empty() { 1 } else { coeff.parse().map_err(|_| bad())? };
            let place = Place::parse(p, &rest[open + 1..close])?;
            out.add_at(place, sign * k);
            rest = rest[close + 1..].trim_start();
            if rest.is_empty() {
                break;
            }
            sign = match rest.as_bytes()[0] {
                b'+' => 1,
                b'-' => -1,
                _ => return Err(bad()),
            };
            rest = &rest[1..];
        }
        Ok(out)
    }
}

impl std::ops::Add<&Divisor> for &Divisor {
    type Output = Divisor;
    fn add(self, o: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (v, k) in o.iter() {
            out.add_at(v.clone(), k);
        }
        out
    }
}

impl std::ops::Sub<&Divisor> for &Divisor {
    type Output = Divisor;
    fn sub(self, o: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (v, k) in o.iter() {
            out.add_at(v.clone(), -k);
        }
        out
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mults.is_empty() {
            return write!(f, "0");
        }
        for (i, (v, &k)) in self.mults.iter().enumerate() {
            if i > 0 {
                write!(f, " {} ", if k < 0 { '-' } else { '+' })?;
            } else if k < 0 {
                write!(f, "-")?;
            }
            write!(f, "{}*[{v}]", k.abs())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Divisor of a nonzero polynomial, including its pole at infinity.
pub fn divisor_of_poly(f: &Poly) -> Result<Divisor, FieldError> {
    let fac = f.factor()?;
    let mut d = Divisor::zero();
    for (g, m) in fac.factors {
        d.add_at(Place::Finite(g), m as i64);
    }
    d.add_at(Place::Infinity, -f.deg());
    Ok(d)
}

pub fn divisor_of(r: &RatFunc) -> Result<Divisor, FieldError> {
    if r.is_zero() {
        return Err(FieldError::DivisorOfZero);
    }
    Ok(&divisor_of_poly(r.num())? - &divisor_of_poly(r.den())?)
}

/// Residue of r·dT at a place, traced down to F_q.
pub fn residue(r: &RatFunc, place: &Place) -> FqElem {
    let p = r.modulus();
    if r.is_zero() {
        return FqElem::zero(p);
    }
    match place {
        Place::Infinity => {
            let (_, rem) = r.num().div_rem(r.den());
            if !rem.is_zero() && rem.deg() == r.den().deg() - 1 {
                -(rem.lead() / r.den().lead())
            } else {
                FqElem::zero(p)
            }
        }
        Place::Finite(pi) => {
            let j = poly_valuation(r.den(), pi);
            if j == 0 {
                return FqElem::zero(p);
            }
            let pij = pi.pow(j as u64);
            let other = r.den().exact_div(&pij);
            let a = r.num().mul_mod(&other.inv_mod(&pij).expect("coprime cofactor"), &pij);
            a.coeff((j as usize) * pi.deg() as usize - 1)
        }
    }
}

/// ψ₀(x) = ζ_p^x for the prime field.
pub fn psi0(x: FqElem) -> CycInt {
    CycInt::zeta_pow(x.value() as i64, x.modulus())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(p: u32, s: &str) -> RatFunc {
        RatFunc::parse(p, s).unwrap()
    }

    #[test]
    fn divisor_examples() {
        let d = divisor_of(&rf(5, "T/(T+1)")).unwrap();
        assert_eq!(d.to_string(), "1*[T] - 1*[T+1]");
        assert_eq!(d.degree(), 0);
        let d = divisor_of(&rf(5, "T")).unwrap();
        assert_eq!(d.to_string(), "1*[T] - 1*[inf]");
        let d = divisor_of(&rf(5, "4T^3+2")).unwrap();
        assert_eq!(d.to_string(), "1*[T+2] + 1*[T^2+3*T+4] - 3*[inf]");
        assert_eq!(divisor_of(&RatFunc::zero(5)), Err(FieldError::DivisorOfZero));
    }

    #[test]
    fn divisor_text_roundtrip() {
        let d = divisor_of(&rf(5, "(T^2+2)/(T^3+T+1)")).unwrap();
        assert_eq!(Divisor::parse(5, &d.to_string()).unwrap(), d);
    }

    #[test]
    fn residue_examples() {
        assert_eq!(residue(&rf(5, "1/T"), &Place::parse(5, "T").unwrap()).value(), 1);
        assert_eq!(residue(&rf(5, "T"), &Place::Infinity).value(), 0);
        assert_eq!(residue(&RatFunc::one(5), &Place::Infinity).value(), 0);
        // res_∞(dT/T) = −1
        assert_eq!(residue(&rf(5, "1/T"), &Place::Infinity).value(), 4);
    }

    #[test]
    fn residue_theorem_with_higher_degree_poles() {
        let r = rf(5, "(T^4+3T+1)/((T^2+2)^2*(T+1)^3)");
        let fac = r.den().factor().unwrap();
        let mut total = residue(&r, &Place::Infinity);
        for (g, _) in fac.factors {
            total = total + residue(&r, &Place::Finite(g));
        }
        assert!(total.is_zero());
    }

    #[test]
    fn psi0_values() {
        assert_eq!(psi0(FqElem::zero(5)), CycInt::integer(1, 5));
        assert_eq!(psi0(FqElem::one(5)), CycInt::zeta_pow(1, 5));
        let mut acc = CycInt::zero(5);
        for x in FqElem::all(5) {
            acc = &acc + &psi0(x);
        }
        assert!(acc.is_zero());
    }
}

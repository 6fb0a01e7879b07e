use std::fmt;

use crate::exactalg::{FqElem, Poly};
use crate::funfield::{poly_valuation, Place};

use super::TraceError;

/// y² = x³ + a₄(T)x + a₆(T) over F_p(T).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticSurface {
    a4: Poly,
    a6: Poly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    Good,
    Multiplicative { split: bool },
}

impl EllipticSurface {
    pub fn new(a4: Poly, a6: Poly) -> Result<EllipticSurface, TraceError> {
        let p = a4.modulus();
        if p < 5 {
            return Err(TraceError::SmallCharacteristic(p));
        }
        let e = EllipticSurface { a4, a6 };
        if e.discriminant().is_zero() {
            return Err(TraceError::SingularGenericFiber);
        }
        if e.is_isotrivial() {
            return Err(TraceError::Isotrivial);
        }
        Ok(e)
    }

    /// The short model of y² = x(x − P)(x − Q).
    pub fn from_two_torsion(pp: &Poly, qq: &Poly) -> Result<EllipticSurface, TraceError> {
        let p = pp.modulus();
        if p < 5 {
            return Err(TraceError::SmallCharacteristic(p));
        }
        let third = FqElem::new(3, p).inv().unwrap();
        let a2 = -&(pp + qq);
        let a4 = pp * qq;
        let a2sq = &a2 * &a2;
        let short_a4 = &a4 - &a2sq.scale(third);
        let b1 = (&a2 * &a4).scale(third);
        let b2 = (&a2sq * &a2).scale(FqElem::new(2, p) * third * third * third);
        EllipticSurface::new(short_a4, &b2 - &b1)
    }

    pub fn modulus(&self) -> u32 {
        self.a4.modulus()
    }

    pub fn a4(&self) -> &Poly {
        &self.a4
    }

    pub fn a6(&self) -> &Poly {
        &self.a6
    }

    pub fn discriminant(&self) -> Poly {
        discriminant(&self.a4, &self.a6)
    }

    fn is_isotrivial(&self) -> bool {
        if self.a4.is_zero() || self.a6.is_zero() {
            return true;
        }
        let cube = self.a4.pow(3);
        let square = self.a6.pow(2);
        cube.scale(square.lead()) == square.scale(cube.lead())
    }

    /// Least k ≥ 1 with deg a₄ ≤ 4k and deg a₆ ≤ 6k.
    pub fn weight(&self) -> usize {
        let mut k = 1;
        while self.a4.deg() > 4 * k as i64 || self.a6.deg() > 6 * k as i64 {
            k += 1;
        }
        k
    }

    /// Coefficients (A, B) of the model at infinity in the variable s = 1/T,
    /// together with the uniformizer s (written as the polynomial T).
    pub fn local_model(&self, place: &Place) -> (Poly, Poly, Poly) {
        match place {
            Place::Finite(pi) => (self.a4.clone(), self.a6.clone(), pi.clone()),
            Place::Infinity => {
                let k = self.weight();
                (reverse(&self.a4, 4 * k), reverse(&self.a6, 6 * k), Poly::t(self.modulus()))
            }
        }
    }

    pub fn reduction(&self, place: &Place) -> Result<Reduction, TraceError> {
        let (a, b, pi) = self.local_model(place);
        let disc = discriminant(&a, &b);
        if !pi.divides(&disc) {
            return Ok(Reduction::Good);
        }
        let ord = |f: &Poly| if f.is_zero() { i64::MAX } else { poly_valuation(f, &pi) };
        if ord(&a) >= 4 && ord(&b) >= 6 {
            return Err(TraceError::NonMinimalModel(place.to_string()));
        }
        if pi.divides(&a) {
            return Err(TraceError::NonSquarefreeConductor(place.to_string()));
        }
        // node at x0 = −3B/(2A); the tangent slopes are ±√(3·x0)
        let ring = ResidueRing::new(pi.clone());
        let p = self.modulus();
        let two_a = a.scale(FqElem::new(2, p)).rem(&pi);
        let x0 = b.scale(FqElem::new(-3, p)).mul_mod(&two_a.inv_mod(&pi).expect("A is a unit"), &pi);
        let split = ring.chi(&x0.scale(FqElem::new(3, p))) == 1;
        Ok(Reduction::Multiplicative { split })
    }

    /// Places of bad reduction in place order, infinity last.
    pub fn bad_places(&self) -> Result<Vec<Place>, TraceError> {
        let mut out: Vec<Place> =
            self.discriminant().factor()?.factors.into_iter().map(|(g, _)| Place::Finite(g)).collect();
        let (a, b, s) = self.local_model(&Place::Infinity);
        if s.divides(&discriminant(&a, &b)) {
            out.push(Place::Infinity);
        }
        Ok(out)
    }
}

impl fmt::Display for EllipticSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3 + ({})*x + ({})", self.a4, self.a6)
    }
}

fn discriminant(a: &Poly, b: &Poly) -> Poly {
    let p = a.modulus();
    let inner = &a.pow(3).scale(FqElem::new(4, p)) + &b.pow(2).scale(FqElem::new(27, p));
    inner.scale(FqElem::new(-16, p))
}

fn reverse(f: &Poly, m: usize) -> Poly {
    let p = f.modulus();
    let coeffs: Vec<u32> = (0..=m).map(|i| f.coeff(m - i).value()).collect();
    Poly::from_u32(p, coeffs)
}

/// κ_v = F_p[T]/(π) with elements as reduced polynomials.
#[derive(Clone, Debug)]
pub struct ResidueRing {
    pi: Poly,
    order: u64,
}

impl ResidueRing {
    pub fn new(pi: Poly) -> ResidueRing {
        let order = (pi.modulus() as u64).pow(pi.deg() as u32);
        ResidueRing { pi, order }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn elements(&self) -> impl Iterator<Item = Poly> + '_ {
        let p = self.pi.modulus();
        let d = self.pi.deg() as usize;
        (0..self.order).map(move |mut code| {
            let mut coeffs = Vec::with_capacity(d);
            for _ in 0..d {
                coeffs.push((code % p as u64) as u32);
                code /= p as u64;
            }
            Poly::from_u32(p, coeffs)
        })
    }

    /// Quadratic character of κ_v.
    pub fn chi(&self, x: &Poly) -> i32 {
        let x = x.rem(&self.pi);
        if x.is_zero() {
            return 0;
        }
        if x.pow_mod(((self.order - 1) / 2) as u128, &self.pi).is_one() {
            1
        } else {
            -1
        }
    }
}

/// a_v = −Σ_{x∈κ_v} χ(x³ + Ax + B) by exhaustive enumeration in F_p[T]/(v).
/// At a multiplicative place this counts the singular point too and gives ±1.
pub fn count_points_direct(e: &EllipticSurface, place: &Place) -> i64 {
    let (a, b, pi) = e.local_model(place);
    let ring = ResidueRing::new(pi.clone());
    let (a, b) = (a.rem(&pi), b.rem(&pi));
    let mut sum = 0i64;
    for x in ring.elements() {
        let x3 = x.mul_mod(&x.mul_mod(&x, &pi), &pi);
        let rhs = &(&x3 + &a.mul_mod(&x, &pi)) + &b;
        sum += ring.chi(&rhs) as i64;
    }
    -sum
}

/// Frobenius trace a_v at a good or multiplicative place.
pub fn count_points(e: &EllipticSurface, place: &Place) -> Result<i64, TraceError> {
    match e.reduction(place)? {
        Reduction::Good => {
            let a = count_points_direct(e, place);
            let qv = (e.modulus() as i64).pow(place.degree() as u32);
            if a * a > 4 * qv {
                return Err(TraceError::WeilViolation(place.to_string()));
            }
            Ok(a)
        }
        Reduction::Multiplicative { split } => Ok(if split { 1 } else { -1 }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> Poly {
        Poly::parse(5, s).unwrap()
    }

    #[test]
    fn constant_fiber_count() {
        // y² = x³ + 1 over F_5: x ↦ x³ is a bijection so Σχ(x³+1) = Σχ = 0
        let e = EllipticSurface { a4: Poly::zero(5), a6: Poly::one(5) };
        assert_eq!(count_points_direct(&e, &Place::parse(5, "T").unwrap()), 0);
    }

    #[test]
    fn reduction_at_simple_discriminant_zero() {
        let e = EllipticSurface::new(poly("T"), poly("1")).unwrap();
        // Δ = −16(4T³ + 27) = −16·4(T³ + 2) and T³ + 2 = (T − 3)(T² + 3T + 4)
        let v = Place::parse(5, "T+2").unwrap();
        let red = e.reduction(&v).unwrap();
        // x0 = −3/(2·3) = −1/2 = 2, 3·x0 = 6 = 1 is a square
        assert_eq!(red, Reduction::Multiplicative { split: true });
        assert_eq!(count_points(&e, &v).unwrap(), 1);
        assert_eq!(count_points_direct(&e, &v), 1);
        let bad = e.bad_places().unwrap();
        assert!(bad.contains(&Place::parse(5, "T^2+3*T+4").unwrap()));
    }

    #[test]
    fn split_test_agrees_with_count_everywhere() {
        let e = EllipticSurface::from_two_torsion(&poly("1"), &poly("T^2")).unwrap();
        for v in e.bad_places().unwrap() {
            let a = count_points(&e, &v).unwrap();
            assert_eq!(a, count_points_direct(&e, &v), "at {v}");
        }
    }

    #[test]
    fn two_torsion_example_has_four_rational_bad_places() {
        let e = EllipticSurface::from_two_torsion(&poly("1"), &poly("T^2")).unwrap();
        let bad: Vec<String> = e.bad_places().unwrap().iter().map(|v| v.to_string()).collect();
        assert_eq!(bad, vec!["T", "T+1", "T+4", "inf"]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(EllipticSurface::new(Poly::zero(5), poly("T")), Err(TraceError::Isotrivial));
        assert_eq!(EllipticSurface::new(poly("T^2"), poly("T^3")), Err(TraceError::Isotrivial));
        assert_eq!(EllipticSurface::new(Poly::zero(3), Poly::one(3)), Err(TraceError::SmallCharacteristic(3)));
        // x³ − 3x + 2 has a double root at every fiber
        assert_eq!(EllipticSurface::new(poly("-3"), poly("2")), Err(TraceError::SingularGenericFiber));
        let e = EllipticSurface::new(poly("T^2"), poly("T^3+1")).unwrap();
        assert!(matches!(e.reduction(&Place::parse(5, "T").unwrap()), Ok(Reduction::Good)));
        let cusp = EllipticSurface::new(poly("T"), poly("T+T^2")).unwrap();
        assert!(matches!(
            cusp.reduction(&Place::parse(5, "T").unwrap()),
            Err(TraceError::NonSquarefreeConductor(_))
        ));
    }

    #[test]
    fn infinity_model() {
        let e = EllipticSurface::new(poly("T^5+1"), poly("T")).unwrap();
        assert_eq!(e.weight(), 2);
        let (a, b, _) = e.local_model(&Place::Infinity);
        assert_eq!(a, poly("T^8+T^3"));
        assert_eq!(b, poly("T^11"));
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::exactalg::{poly_order, Poly};
use crate::funfield::{Adele, FieldError, LocalElement, Place, RatFunc};
use crate::whittaker::EvalPoint;

use super::HeightError;

/// An adele given by a global function together with finitely many local
/// components that replace it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdelicEntry {
    global: RatFunc,
    local: BTreeMap<Place, LocalElement>,
}

impl AdelicEntry {
    pub fn global(r: RatFunc) -> AdelicEntry {
        AdelicEntry { global: r, local: BTreeMap::new() }
    }

    pub fn zero(p: u32) -> AdelicEntry {
        AdelicEntry::global(RatFunc::zero(p))
    }

    pub fn one(p: u32) -> AdelicEntry {
        AdelicEntry::global(RatFunc::one(p))
    }

    /// A finitely supported additive adele: zero away from its components.
    pub fn from_adele(z: &Adele, p: u32) -> AdelicEntry {
        let mut e = AdelicEntry::zero(p);
        for c in z.components() {
            e.local.insert(c.place().clone(), c.clone());
        }
        e
    }

    pub fn with_local(mut self, elem: LocalElement) -> AdelicEntry {
        self.local.insert(elem.place().clone(), elem);
        self
    }

    pub fn modulus(&self) -> u32 {
        self.global.modulus()
    }

    pub fn global_part(&self) -> &RatFunc {
        &self.global
    }

    pub fn corrections(&self) -> impl Iterator<Item = &LocalElement> {
        self.local.values()
    }

    /// The component at v.
    pub fn at(&self, v: &Place) -> LocalElement {
        self.local.get(v).cloned().unwrap_or_else(|| LocalElement::exact(v.clone(), self.global.clone()))
    }

    /// Valuation at v; None for an exact zero component.
    pub fn valuation(&self, v: &Place) -> Result<Option<i64>, FieldError> {
        match self.local.get(v) {
            Some(e) => e.valuation(),
            None => Ok(self.global.valuation(v)),
        }
    }

    /// Places outside of which every component is a unit (or every
    /// component is zero when the global part vanishes).
    pub fn relevant_places(&self) -> Result<BTreeSet<Place>, FieldError> {
        let mut out: BTreeSet<Place> = self.local.keys().cloned().collect();
        out.insert(Place::Infinity);
        if !self.global.is_zero() {
            for f in [self.global.num(), self.global.den()] {
                for (g, _) in f.factor()?.factors {
                    out.insert(Place::Finite(g));
                }
            }
        }
        Ok(out)
    }

    fn combine(&self, o: &AdelicEntry, global: RatFunc, op: impl Fn(&LocalElement, &LocalElement) -> LocalElement) -> AdelicEntry {
        let places: BTreeSet<&Place> = self.local.keys().chain(o.local.keys()).collect();
        let local = places.into_iter().map(|v| (v.clone(), op(&self.at(v), &o.at(v)))).collect();
        AdelicEntry { global, local }
    }

    pub fn add(&self, o: &AdelicEntry) -> AdelicEntry {
        self.combine(o, &self.global + &o.global, |x, y| x.add(y))
    }

    pub fn sub(&self, o: &AdelicEntry) -> AdelicEntry {
        self.combine(o, &self.global - &o.global, |x, y| x.sub(y))
    }

    pub fn mul(&self, o: &AdelicEntry) -> AdelicEntry {
        self.combine(o, &self.global * &o.global, |x, y| x.mul(y))
    }

    pub fn scale(&self, r: &RatFunc) -> AdelicEntry {
        AdelicEntry {
            global: &self.global * r,
            local: self.local.iter().map(|(k, v)| (k.clone(), v.scale(r))).collect(),
        }
    }

    /// True if every component is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.global.is_zero() && self.local.values().all(|e| e.is_exact() && e.value().is_zero())
    }
}

impl fmt::Display for AdelicEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.global)?;
        for (v, e) in &self.local {
            write!(f, " [{v}: {}]", e.value())?;
        }
        Ok(())
    }
}

/// A 2×2 matrix over F_q(T) acting on the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    pub rows: [[RatFunc; 2]; 2],
}

impl RationalMatrix {
    pub fn new(rows: [[RatFunc; 2]; 2]) -> RationalMatrix {
        RationalMatrix { rows }
    }

    pub fn parse(p: u32, entries: [&str; 4]) -> Result<RationalMatrix, HeightError> {
        let r = |s: &str| RatFunc::parse(p, s).map_err(|e| HeightError::Field(e.into()));
        Ok(RationalMatrix::new([[r(entries[0])?, r(entries[1])?], [r(entries[2])?, r(entries[3])?]]))
    }

    pub fn identity(p: u32) -> RationalMatrix {
        RationalMatrix::new([[RatFunc::one(p), RatFunc::zero(p)], [RatFunc::zero(p), RatFunc::one(p)]])
    }

    pub fn swap(p: u32) -> RationalMatrix {
        RationalMatrix::new([[RatFunc::zero(p), RatFunc::one(p)], [RatFunc::one(p), RatFunc::zero(p)]])
    }

    pub fn det(&self) -> RatFunc {
        let [[a, b], [c, d]] = &self.rows;
        &(a * d) - &(b * c)
    }

    /// The inverse transpose; None if singular.
    pub fn inverse_transpose(&self) -> Option<RationalMatrix> {
        let inv = self.det().inv()?;
        let [[a, b], [c, d]] = &self.rows;
        Some(RationalMatrix::new([[d * &inv, -&(c * &inv)], [-&(b * &inv), a * &inv]]))
    }
}

/// A 2×2 matrix of adeles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdelicMatrix {
    pub rows: [[AdelicEntry; 2]; 2],
}

impl AdelicMatrix {
    pub fn new(rows: [[AdelicEntry; 2]; 2]) -> AdelicMatrix {
        AdelicMatrix { rows }
    }

    pub fn modulus(&self) -> u32 {
        self.rows[0][0].modulus()
    }

    /// ((a, z), (0, 1)) with a = 1 at finite places and s^{n+2} at infinity.
    pub fn canonical(point: &EvalPoint, p: u32) -> AdelicMatrix {
        let a = AdelicEntry::one(p).with_local(LocalElement::exact(
            Place::Infinity,
            RatFunc::uniformizer_pow(&Place::Infinity, point.n as i64 + 2, p),
        ));
        AdelicMatrix::new([[a, AdelicEntry::from_adele(&point.z, p)], [AdelicEntry::zero(p), AdelicEntry::one(p)]])
    }

    pub fn det(&self) -> AdelicEntry {
        let [[a, b], [c, d]] = &self.rows;
        a.mul(d).sub(&b.mul(c))
    }

    pub fn left_mul(&self, g: &RationalMatrix) -> AdelicMatrix {
        let e = |i: usize, j: usize| {
            self.rows[0][j].scale(&g.rows[i][0]).add(&self.rows[1][j].scale(&g.rows[i][1]))
        };
        AdelicMatrix::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    /// Right multiplication by a matrix supported at the single place v.
    pub fn right_mul_local(&self, v: &Place, g: &[[LocalElement; 2]; 2]) -> AdelicMatrix {
        let mut out = self.clone();
        for i in 0..2 {
            for j in 0..2 {
                let x = self.rows[i][0].at(v).mul(&g[0][j]).add(&self.rows[i][1].at(v).mul(&g[1][j]));
                out.rows[i][j] = out.rows[i][j].clone().with_local(x);
            }
        }
        out
    }

    /// Right multiplication by ((0, π_v^{−c}), (1, 0)) at v.
    pub fn atkin_lehner(&self, v: &Place, c: u32) -> AdelicMatrix {
        let p = self.modulus();
        let ex = |r: RatFunc| LocalElement::exact(v.clone(), r);
        let g = [
            [ex(RatFunc::zero(p)), ex(RatFunc::uniformizer_pow(v, -(c as i64), p))],
            [ex(RatFunc::one(p)), ex(RatFunc::zero(p))],
        ];
        self.right_mul_local(v, &g)
    }

    /// True if the lower-left entry vanishes identically.
    pub fn is_upper_triangular(&self) -> bool {
        self.rows[1][0].is_zero()
    }
}

impl fmt::Display for AdelicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = &self.rows;
        write!(f, "(({a}, {b}), ({c}, {d}))")
    }
}

/// A point (f1 : f2) of P¹(F_q(T)), stored as coprime polynomials with the
/// first nonzero coordinate monic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cusp {
    f1: Poly,
    f2: Poly,
}

impl Cusp {
    pub fn new(f1: &RatFunc, f2: &RatFunc) -> Result<Cusp, HeightError> {
        if f1.is_zero() && f2.is_zero() {
            return Err(HeightError::DegenerateCusp);
        }
        // clear denominators by the lcm of both
        let g = Poly::gcd(f1.den(), f2.den());
        let l = (f1.den() * f2.den()).exact_div(&g);
        let x = (f1.num() * &l).exact_div(f1.den());
        let y = (f2.num() * &l).exact_div(f2.den());
        let g = Poly::gcd(&x, &y);
        let (x, y) = (x.exact_div(&g), y.exact_div(&g));
        let lead = if x.is_zero() { y.lead() } else { x.lead() };
        let inv = lead.inv().expect("nonzero leading coefficient");
        Ok(Cusp { f1: x.scale(inv), f2: y.scale(inv) })
    }

    pub fn from_polys(f1: Poly, f2: Poly) -> Result<Cusp, HeightError> {
        Cusp::new(&RatFunc::from_poly(f1), &RatFunc::from_poly(f2))
    }

    pub fn zero_one(p: u32) -> Cusp {
        Cusp { f1: Poly::zero(p), f2: Poly::one(p) }
    }

    pub fn one_zero(p: u32) -> Cusp {
        Cusp { f1: Poly::one(p), f2: Poly::zero(p) }
    }

    /// Parses "f1:f2".
    pub fn parse(p: u32, s: &str) -> Result<Cusp, HeightError> {
        let (a, b) = s.split_once(':').ok_or_else(|| HeightError::Parse(format!("expected f1:f2, got {s:?}")))?;
        let r = |x: &str| RatFunc::parse(p, x.trim()).map_err(|e| HeightError::Field(e.into()));
        Cusp::new(&r(a)?, &r(b)?)
    }

    pub fn f1(&self) -> &Poly {
        &self.f1
    }

    pub fn f2(&self) -> &Poly {
        &self.f2
    }

    pub fn degree(&self) -> i64 {
        self.f1.deg().max(self.f2.deg())
    }

    /// The image under γ^{−T} of the column vector (f1, f2).
    pub fn transform(&self, gamma: &RationalMatrix) -> Result<Cusp, HeightError> {
        let g = gamma.inverse_transpose().ok_or(HeightError::SingularMatrix)?;
        let x = RatFunc::from_poly(self.f1.clone());
        let y = RatFunc::from_poly(self.f2.clone());
        let [[a, b], [c, d]] = &g.rows;
        Cusp::new(&(&(a * &x) + &(b * &y)), &(&(c * &x) + &(d * &y)))
    }

    pub fn sort_key(&self, other: &Cusp) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| poly_order(&self.f1, &other.f1))
            .then_with(|| poly_order(&self.f2, &other.f2))
    }

}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} : {})", self.f1, self.f2)
    }
}

//! Heights of cusps on adelic matrices, their mountain-shaped profiles over
//! e-tuples, cusp enumeration, the splitting invariant and the Atkin–Lehner
//! switch.

mod cusps;
mod dalpha;
pub mod linalg;
mod matrix;

pub use cusps::{enumerate_cusps, CuspEnumeration};
pub use dalpha::{d_alpha, d_alpha_over};
pub use matrix::{AdelicEntry, AdelicMatrix, Cusp, RationalMatrix};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::exactalg::FqElem;
use crate::funfield::{Divisor, FieldError, LocalElement, Place, RatFunc};
use crate::whittaker::{linear_form_of, EvalPoint};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HeightError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("degenerate-combination at {0}")]
    DegenerateCombination(String),
    #[error("degenerate cusp (0 : 0)")]
    DegenerateCusp,
    #[error("not-a-level-place: {0}")]
    NotALevelPlace(String),
    #[error("level place of degree > 1: {0}")]
    NonRationalLevel(String),
    #[error("matrix is not upper triangular")]
    NotTriangular,
    #[error("determinant vanishes at {0}")]
    ZeroDeterminant(String),
    #[error("singular rational matrix")]
    SingularMatrix,
    #[error("e-tuple total {0} exceeds n = {1}")]
    TupleTooLarge(u32, usize),
    #[error("{0}")]
    Parse(String),
}

/// The degree-one places of the conductor with their exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    places: Vec<(Place, u32)>,
}

impl Level {
    pub fn from_conductor(n: &Divisor) -> Result<Level, HeightError> {
        let mut places = Vec::new();
        for (v, c) in n.iter() {
            if v.degree() != 1 {
                return Err(HeightError::NonRationalLevel(v.to_string()));
            }
            places.push((v.clone(), c as u32));
        }
        Ok(Level { places })
    }

    pub fn places(&self) -> impl Iterator<Item = (&Place, u32)> {
        self.places.iter().map(|(v, c)| (v, *c))
    }

    pub fn exponent(&self, v: &Place) -> Option<u32> {
        self.places.iter().find(|(w, _)| w == v).map(|(_, c)| *c)
    }

    pub fn degree(&self) -> u32 {
        self.places.iter().map(|(_, c)| c).sum()
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    pub fn is_squarefree(&self) -> bool {
        self.places.iter().all(|(_, c)| *c == 1)
    }
}

/// Integers 0 ≤ e_x ≤ c_x indexed by the level places.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ETuple(BTreeMap<Place, u32>);

impl ETuple {
    pub fn zeros(level: &Level) -> ETuple {
        ETuple(level.places().map(|(v, _)| (v.clone(), 0)).collect())
    }

    pub fn full(level: &Level) -> ETuple {
        ETuple(level.places().map(|(v, c)| (v.clone(), c)).collect())
    }

    pub fn from_map(level: &Level, map: BTreeMap<Place, u32>) -> Result<ETuple, HeightError> {
        let mut e = ETuple::zeros(level);
        for (v, k) in map {
            let c = level.exponent(&v).ok_or_else(|| HeightError::NotALevelPlace(v.to_string()))?;
            if k > c {
                return Err(HeightError::Parse(format!("e at {v} is {k} > {c}")));
            }
            e.0.insert(v, k);
        }
        Ok(e)
    }

    /// Every tuple for the level, in lexicographic order of the values.
    pub fn all(level: &Level) -> Vec<ETuple> {
        let mut out = vec![ETuple(BTreeMap::new())];
        for (v, c) in level.places() {
            out = out
                .into_iter()
                .flat_map(|e| {
                    (0..=c).map(move |k| {
                        let mut m = e.0.clone();
                        m.insert(v.clone(), k);
                        ETuple(m)
                    })
                })
                .collect();
        }
        out
    }

    pub fn get(&self, v: &Place) -> u32 {
        self.0.get(v).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Place, u32)> {
        self.0.iter().map(|(v, k)| (v, *k))
    }

    pub fn total(&self) -> u32 {
        self.0.values().sum()
    }

    /// Σ_x |e_x − e'_x|.
    pub fn distance(&self, other: &ETuple) -> u32 {
        let places: BTreeSet<&Place> = self.0.keys().chain(other.0.keys()).collect();
        places.into_iter().map(|v| self.get(v).abs_diff(other.get(v))).sum()
    }

    pub fn to_divisor(&self) -> Divisor {
        let mut d = Divisor::zero();
        for (v, k) in self.iter() {
            if k > 0 {
                d.add_at(v.clone(), k as i64);
            }
        }
        d
    }
}

impl fmt::Display for ETuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(v, k)| format!("{v}:{k}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightProfile {
    pub hstar: i64,
    pub epeak: ETuple,
}

/// The pair (X, Y) = (a f1 + c f2, b f1 + d f2) at v.
fn combinations(m: &AdelicMatrix, cusp: &Cusp, v: &Place) -> (LocalElement, LocalElement) {
    let f1 = RatFunc::from_poly(cusp.f1().clone());
    let f2 = RatFunc::from_poly(cusp.f2().clone());
    let [[a, b], [c, d]] = &m.rows;
    let x = a.at(v).scale(&f1).add(&c.at(v).scale(&f2));
    let y = b.at(v).scale(&f1).add(&d.at(v).scale(&f2));
    (x, y)
}

fn support(m: &AdelicMatrix, e: &ETuple) -> Result<BTreeSet<Place>, HeightError> {
    let mut out = m.det().relevant_places()?;
    for row in &m.rows {
        for entry in row {
            out.extend(entry.relevant_places()?);
        }
    }
    out.extend(e.0.keys().cloned());
    Ok(out)
}

fn det_degree(m: &AdelicMatrix, places: &BTreeSet<Place>) -> Result<i64, HeightError> {
    let det = m.det();
    let mut total = 0;
    for v in places {
        let k = det.valuation(v)?.ok_or_else(|| HeightError::ZeroDeterminant(v.to_string()))?;
        total += v.degree() as i64 * k;
    }
    Ok(total)
}

/// min(v(X), v(Y) + e_v), with exact zeros treated as +∞.
/// Valuation floor and whether it is the true valuation; exact zero is
/// (i64::MAX, true).
fn floor_of(x: &LocalElement) -> (i64, bool) {
    let v = x.value().valuation(x.place()).unwrap_or(i64::MAX);
    match x.precision() {
        Some(p) if v >= p => (p, false),
        _ => (v, true),
    }
}

fn local_min(x: &LocalElement, y: &LocalElement, e: u32) -> Result<i64, HeightError> {
    let (xv, xk) = floor_of(x);
    let (yv, yk) = floor_of(y);
    let yv = yv.saturating_add(e as i64);
    let m = xv.min(yv);
    if m == i64::MAX {
        return Err(HeightError::DegenerateCombination(x.place().to_string()));
    }
    if (xv == m && xk) || (yv == m && yk) {
        Ok(m)
    } else {
        Err(FieldError::PrecisionExhausted(x.place().to_string()).into())
    }
}

/// 2·deg min(div X, div Y + Σ e_x[x]) − deg div(det) − Σ e_x.
pub fn height(m: &AdelicMatrix, cusp: &Cusp, e: &ETuple) -> Result<i64, HeightError> {
    let places = support(m, e)?;
    let mut total = 0;
    for v in &places {
        let (x, y) = combinations(m, cusp, v);
        total += v.degree() as i64 * local_min(&x, &y, e.get(v))?;
    }
    Ok(2 * total - det_degree(m, &places)? - e.total() as i64)
}

/// h(m, cusp, e) for each e, sharing the local combinations.
pub fn heights_over(m: &AdelicMatrix, cusp: &Cusp, tuples: &[ETuple]) -> Result<Vec<i64>, HeightError> {
    let mut places = support(m, &ETuple::default())?;
    for e in tuples {
        places.extend(e.0.keys().cloned());
    }
    let det = det_degree(m, &places)?;
    let local: Vec<(Place, LocalElement, LocalElement)> = places
        .iter()
        .map(|v| {
            let (x, y) = combinations(m, cusp, v);
            (v.clone(), x, y)
        })
        .collect();
    tuples
        .iter()
        .map(|e| {
            let mut total = 0;
            for (v, x, y) in &local {
                total += v.degree() as i64 * local_min(x, y, e.get(v))?;
            }
            Ok(2 * total - det - e.total() as i64)
        })
        .collect()
}

/// Peak value and location of e ↦ h(m, cusp, e), optimizing each place
/// separately.
pub fn height_profile(m: &AdelicMatrix, cusp: &Cusp, level: &Level) -> Result<HeightProfile, HeightError> {
    let mut peak = BTreeMap::new();
    for (v, c) in level.places() {
        let (x, y) = combinations(m, cusp, v);
        let (xv, xk) = floor_of(&x);
        let (yv, yk) = floor_of(&y);
        let k = match (xk, yk) {
            _ if xv == i64::MAX && yv == i64::MAX => {
                return Err(HeightError::DegenerateCombination(v.to_string()))
            }
            (true, true) if xv == i64::MAX => c,
            (true, true) if yv == i64::MAX => 0,
            (true, true) => (xv - yv).clamp(0, c as i64) as u32,
            (true, false) if xv <= yv => 0,
            (false, true) if xv >= yv.saturating_add(c as i64) => c,
            _ => return Err(FieldError::PrecisionExhausted(v.to_string()).into()),
        };
        peak.insert(v.clone(), k);
    }
    let epeak = ETuple(peak);
    Ok(HeightProfile { hstar: height(m, cusp, &epeak)?, epeak })
}

/// True if h(m, cusp, e) = h* − |e − epeak| for every e.
pub fn mountain_holds(m: &AdelicMatrix, cusp: &Cusp, level: &Level) -> Result<bool, HeightError> {
    let profile = height_profile(m, cusp, level)?;
    let tuples = ETuple::all(level);
    let hs = heights_over(m, cusp, &tuples)?;
    Ok(tuples.iter().zip(hs).all(|(e, h)| h == profile.hstar - profile.epeak.distance(e) as i64))
}

/// e_v ↦ c_v − e_v at one level place.
pub fn e_switch(e: &ETuple, v: &Place, level: &Level) -> Result<ETuple, HeightError> {
    let c = level.exponent(v).ok_or_else(|| HeightError::NotALevelPlace(v.to_string()))?;
    let mut out = e.clone();
    out.0.insert(v.clone(), c - e.get(v).min(c));
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub checks: usize,
    pub violations: Vec<String>,
}

impl CheckReport {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checks += other.checks;
        self.violations.extend(other.violations);
    }
}

/// A few cusps of small degree used as probes.
pub fn sample_cusps(p: u32) -> Vec<Cusp> {
    ["0:1", "1:0", "1:1", "T:1", "1:T", "T+1:T^2+2", "T^2:1"]
        .iter()
        .map(|s| Cusp::parse(p, s).expect("valid sample cusp"))
        .collect()
}

/// Local test elements: ((1,0),(π^c u,1)) and ((1,u),(0,1)) at level
/// places, the swap at one degree-one place off the level.
fn local_test_elements(level: &Level, p: u32) -> Vec<(Place, [[LocalElement; 2]; 2])> {
    let mut out = Vec::new();
    let ex = |v: &Place, r: RatFunc| LocalElement::exact(v.clone(), r);
    for (v, c) in level.places() {
        for u in [1, 2] {
            let unit = RatFunc::constant(FqElem::new(u, p));
            let low = &RatFunc::uniformizer_pow(v, c as i64, p) * &unit;
            out.push((
                v.clone(),
                [[ex(v, RatFunc::one(p)), ex(v, RatFunc::zero(p))], [ex(v, low), ex(v, RatFunc::one(p))]],
            ));
            out.push((
                v.clone(),
                [[ex(v, RatFunc::one(p)), ex(v, unit)], [ex(v, RatFunc::zero(p)), ex(v, RatFunc::one(p))]],
            ));
        }
    }
    if let Some(v) = Place::all_of_degree(p, 1).into_iter().find(|v| level.exponent(v).is_none()) {
        out.push((
            v.clone(),
            [[ex(&v, RatFunc::zero(p)), ex(&v, RatFunc::one(p))], [ex(&v, RatFunc::one(p)), ex(&v, RatFunc::zero(p))]],
        ));
    }
    out
}

fn test_gammas(p: u32) -> Vec<RationalMatrix> {
    vec![
        RationalMatrix::identity(p),
        RationalMatrix::swap(p),
        RationalMatrix::parse(p, ["1", "T", "0", "1"]).unwrap(),
        RationalMatrix::parse(p, ["T", "1", "1", "0"]).unwrap(),
    ]
}

/// h(γ·m·g, γ^{−T}·c, e) = h(m, c, e) over sample γ, g, cusps and all e.
pub fn invariance_suite(m: &AdelicMatrix, level: &Level) -> Result<CheckReport, HeightError> {
    let p = m.modulus();
    let cusps = sample_cusps(p);
    let tuples = ETuple::all(level);
    let base: Vec<Vec<i64>> = cusps.iter().map(|c| heights_over(m, c, &tuples)).collect::<Result<_, _>>()?;
    let mut report = CheckReport::default();
    let mut locals: Vec<Option<(Place, [[LocalElement; 2]; 2])>> = vec![None];
    locals.extend(local_test_elements(level, p).into_iter().map(Some));
    for gamma in test_gammas(p) {
        for g in &locals {
            let mut moved = m.left_mul(&gamma);
            if let Some((v, g)) = g {
                moved = moved.right_mul_local(v, g);
            }
            for (i, c) in cusps.iter().enumerate() {
                let c2 = c.transform(&gamma)?;
                let moved_heights = heights_over(&moved, &c2, &tuples)?;
                for ((e, h), h0) in tuples.iter().zip(moved_heights).zip(&base[i]) {
                    report.record(h == *h0, || {
                        format!("γ = {:?}, g at {:?}, cusp {c}, e {e}", gamma.rows, g.as_ref().map(|x| &x.0))
                    });
                }
            }
        }
    }
    Ok(report)
}

/// e_switch is an involution and h(m·W_v, c, e) = h(m, c, e_switch(e, v)).
pub fn e_switch_check(m: &AdelicMatrix, level: &Level) -> Result<CheckReport, HeightError> {
    let cusps = sample_cusps(m.modulus());
    let tuples = ETuple::all(level);
    let base: Vec<Vec<i64>> = cusps.iter().map(|c| heights_over(m, c, &tuples)).collect::<Result<_, _>>()?;
    let mut report = CheckReport::default();
    for (v, c) in level.places() {
        let switched = m.atkin_lehner(v, c);
        let mut partner = Vec::with_capacity(tuples.len());
        for e in &tuples {
            let e2 = e_switch(e, v, level)?;
            report.record(e_switch(&e2, v, level)? == *e, || format!("switch at {v} not an involution on {e}"));
            partner.push(tuples.iter().position(|t| *t == e2).expect("switch stays in range"));
        }
        for (cusp, rhs) in cusps.iter().zip(&base) {
            let lhs = heights_over(&switched, cusp, &tuples)?;
            for (k, e) in tuples.iter().enumerate() {
                let (l, r) = (lhs[k], rhs[partner[k]]);
                report.record(l == r, || format!("W at {v}, cusp {cusp}, e {e}: {l} ≠ {r}"));
            }
        }
    }
    Ok(report)
}

/// Heights of distinct cusps at one tuple sum to at most zero, and the
/// positive-height sets pack into 2^{deg N} tuples.
pub fn uniqueness_and_packing(m: &AdelicMatrix, cusps: &[Cusp], level: &Level) -> Result<CheckReport, HeightError> {
    let tuples = ETuple::all(level);
    let mut table = Vec::with_capacity(cusps.len());
    for c in cusps {
        let row: Vec<i64> = tuples.iter().map(|e| height(m, c, e)).collect::<Result<_, _>>()?;
        table.push(row);
    }
    let mut report = CheckReport::default();
    for i in 0..cusps.len() {
        for j in i + 1..cusps.len() {
            for (k, e) in tuples.iter().enumerate() {
                let s = table[i][k] + table[j][k];
                report.record(s <= 0, || format!("cusps {} and {} at {e}: sum {s}", cusps[i], cusps[j]));
            }
        }
    }
    let positive: usize = table.iter().map(|row| row.iter().filter(|&&h| h > 0).count()).sum();
    let cap = 1usize << level.degree();
    report.record(positive <= cap, || format!("packing: {positive} > {cap}"));
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct VolumeComparison {
    pub report: CheckReport,
    /// (e, d_alpha + 2, max height) for each tuple with Σe ≤ n.
    pub rows: Vec<(ETuple, i64, i64)>,
}

/// In the canonical frame of a point: d_alpha(n, α_z, e) + 2 equals the
/// maximal cusp height at e whenever Σe ≤ n, and h(m, (0:1), e) > −2
/// exactly when Σe > n.
pub fn volume_comparison(point: &EvalPoint, level: &Level, p: u32) -> Result<VolumeComparison, HeightError> {
    let m = AdelicMatrix::canonical(point, p);
    let alpha = linear_form_of(point, p)?;
    let deg_bound = point.n as i64 + level.degree() as i64 + 2;
    let en = enumerate_cusps(&m, level, 1, deg_bound)?;
    let mut report = CheckReport::default();
    let mut rows = Vec::new();
    let zero_one = Cusp::zero_one(p);
    for (e, &hmax) in &en.max_height {
        let h0 = height(&m, &zero_one, e)?;
        let big = e.total() as usize > point.n;
        report.record((h0 > -2) == big, || format!("h(m,(0:1),{e}) = {h0} with Σe = {}", e.total()));
        if !big {
            let d = d_alpha(point.n, &alpha, e)?;
            report.record(d + 2 == hmax, || format!("e {e}: d+2 = {} but max height {hmax}", d + 2));
            rows.push((e.clone(), d + 2, hmax));
        }
    }
    Ok(VolumeComparison { report, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funfield::Adele;

    const P: u32 = 5;

    fn level() -> Level {
        Level::from_conductor(&Divisor::parse(P, "[T] + [T+1] + [T+4] + [inf]").unwrap()).unwrap()
    }

    fn point(n: usize, z: &str) -> EvalPoint {
        EvalPoint::new(n, Adele::parse(P, z).unwrap())
    }

    #[test]
    fn local_min_decides_from_floors() {
        let v = Place::finite(crate::exactalg::Poly::new(P, &[0, 1])).unwrap();
        let t = LocalElement::exact(v.clone(), RatFunc::t(P));
        let vanishing = LocalElement::with_precision(v.clone(), RatFunc::zero(P), 4);
        assert_eq!(local_min(&t, &vanishing, 0), Ok(1));
        assert_eq!(local_min(&vanishing, &t, 2), Ok(3));
        let shallow = LocalElement::with_precision(v.clone(), RatFunc::zero(P), 1);
        let t2 = LocalElement::exact(v, &RatFunc::t(P) * &RatFunc::t(P));
        assert!(local_min(&t2, &shallow, 0).is_err());
    }

    #[test]
    fn canonical_frame_values() {
        let lv = level();
        for n in 0..5 {
            let m = AdelicMatrix::canonical(&point(n, "T:1/T; inf:T^2"), P);
            let zero = ETuple::zeros(&lv);
            assert_eq!(height(&m, &Cusp::zero_one(P), &zero).unwrap(), -(n as i64 + 2));
            let m0 = AdelicMatrix::canonical(&point(n, "0"), P);
            let a = height(&m0, &Cusp::one_zero(P), &zero).unwrap();
            let b = height(&m0, &Cusp::zero_one(P), &zero).unwrap();
            assert_eq!(a, n as i64 + 2);
            assert_eq!(a + b, 0);
        }
    }

    #[test]
    fn monotone_profile() {
        let lv = level();
        let n = 3;
        let m = AdelicMatrix::canonical(&point(n, "T+1:2/(T+1)"), P);
        let prof = height_profile(&m, &Cusp::zero_one(P), &lv).unwrap();
        assert_eq!(prof.epeak, ETuple::full(&lv));
        assert_eq!(prof.hstar, lv.degree() as i64 - n as i64 - 2);
        let m0 = AdelicMatrix::canonical(&point(n, "0"), P);
        let prof = height_profile(&m0, &Cusp::one_zero(P), &lv).unwrap();
        assert_eq!(prof.epeak, ETuple::zeros(&lv));
        assert_eq!(prof.hstar, n as i64 + 2);
    }

    #[test]
    fn mountain_matches_brute_force() {
        let lv = level();
        for z in ["T:1/T^2", "T+4:3/(T+4); inf:T", "T+2:1/(T+2)^2", "T:1/T; T+1:2/(T+1)"] {
            let m = AdelicMatrix::canonical(&point(3, z), P);
            for gamma in test_gammas(P) {
                let moved = m.left_mul(&gamma);
                for c in sample_cusps(P) {
                    let c = c.transform(&gamma).unwrap();
                    let prof = height_profile(&moved, &c, &lv).unwrap();
                    let brute = ETuple::all(&lv).iter().map(|e| height(&moved, &c, e).unwrap()).max().unwrap();
                    assert_eq!(prof.hstar, brute);
                    assert!(mountain_holds(&moved, &c, &lv).unwrap());
                }
            }
        }
    }

    #[test]
    fn switch_basics() {
        let lv = level();
        let e = ETuple::zeros(&lv);
        let v = Place::parse(P, "T").unwrap();
        let s = e_switch(&e, &v, &lv).unwrap();
        assert_eq!(s.get(&v), 1);
        assert_eq!(e_switch(&s, &v, &lv).unwrap(), e);
        let off = Place::parse(P, "T+2").unwrap();
        assert!(matches!(e_switch(&e, &off, &lv), Err(HeightError::NotALevelPlace(_))));
    }

    #[test]
    fn switch_matrix_action() {
        let lv = level();
        for z in ["T:1/T^2", "T+1:1/(T+1); inf:T^2", "0"] {
            let m = AdelicMatrix::canonical(&point(2, z), P);
            let r = e_switch_check(&m, &lv).unwrap();
            assert!(r.passed(), "{:?}", r.violations);
        }
    }

    #[test]
    fn invariance() {
        let lv = level();
        let m = AdelicMatrix::canonical(&point(2, "T:1/T; T+3:2/(T+3)"), P);
        let r = invariance_suite(&m, &lv).unwrap();
        assert!(r.checks > 1000);
        assert!(r.passed(), "{:?}", &r.violations[..r.violations.len().min(5)]);
    }

    #[test]
    fn volume_comparison_small() {
        let lv = level();
        for n in 0..4 {
            for z in ["0", "T:1/T", "T:1/T^2; inf:T^3", "T+2:3/(T+2); T+1:1/(T+1)^2"] {
                let vc = volume_comparison(&point(n, z), &lv, P).unwrap();
                assert!(vc.report.passed(), "n={n} z={z}: {:?}", vc.report.violations);
            }
        }
    }
}

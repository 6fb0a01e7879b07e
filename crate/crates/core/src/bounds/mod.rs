//! The explicit bound chain for Whittaker-normalized values and exact
//! checks of each pointwise inequality.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use crate::ccycle::{b_coeffs, s_coeff};
use crate::exactalg::{binom, cyc_abs, CycInt, SqrtQInt};
use crate::funfield::Place;
use crate::heights::{
    d_alpha, e_switch, enumerate_cusps, height_profile, AdelicMatrix, Cusp, CuspEnumeration, ETuple, HeightError,
    HeightProfile, Level,
};
use crate::whittaker::{linear_form_of, EvalPoint, WhittakerValue};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoundError {
    #[error(transparent)]
    Height(#[from] HeightError),
    #[error("level-too-small: deg N = {0} < 4")]
    LevelTooSmall(i64),
    #[error("unsupported: Atkin–Lehner optimization needs squarefree level")]
    NotSquarefree,
    #[error("inconclusive comparison: margin {margin:e} within guard {guard:e}")]
    Inconclusive { margin: f64, guard: f64 },
}

fn check_degree(level: &Level) -> Result<i64, BoundError> {
    let d = level.degree() as i64;
    if d < 4 {
        return Err(BoundError::LevelTooSmall(d));
    }
    Ok(d)
}

/// √q·2^{deg N − 3}.
fn base_term(deg_n: i64, q: u64) -> SqrtQInt {
    SqrtQInt::new(0, BigInt::one() << (deg_n - 3) as usize, q)
}

fn b_table(q: u64, d_max: i64) -> Vec<SqrtQInt> {
    b_coeffs(q, d_max.max(0) as usize + 1)
}

fn b_at(table: &[SqrtQInt], d: i64, q: u64) -> SqrtQInt {
    if d < 0 {
        SqrtQInt::zero(q)
    } else {
        table[d as usize].clone()
    }
}

fn binom_product(level: &Level, e: &ETuple) -> BigInt {
    level.places().map(|(v, c)| binom(c as i64, e.get(v) as i64)).product()
}

/// √q·2^{deg N−3} + q·Σ_{Σe ≤ n} Π binom(c_x, e_x)·B(d_alpha(n, α, e)).
pub fn bound_first(level: &Level, point: &EvalPoint, q: u64) -> Result<SqrtQInt, BoundError> {
    let deg_n = check_degree(level)?;
    let p = q as u32;
    let alpha = linear_form_of(point, p).map_err(HeightError::from)?;
    let table = b_table(q, point.n as i64);
    let mut sum = SqrtQInt::zero(q);
    for e in ETuple::all(level) {
        if e.total() as usize > point.n {
            continue;
        }
        let d = d_alpha(point.n, &alpha, &e)?;
        sum = &sum + &b_at(&table, d, q).scale(&binom_product(level, &e));
    }
    Ok(&base_term(deg_n, q) + &sum.scale(&BigInt::from(q)))
}

/// One cusp's contribution Σ_{e′ : |e′ − epeak| ≤ h* − 2} Π binom·B(h* − 2 − |e′ − epeak|).
#[derive(Clone, Debug)]
pub struct CuspTerm {
    pub cusp: Cusp,
    pub profile: HeightProfile,
    pub at_full: bool,
    pub value: SqrtQInt,
}

fn cusp_term(level: &Level, cusp: Cusp, profile: HeightProfile, q: u64) -> CuspTerm {
    let budget = profile.hstar - 2;
    let table = b_table(q, budget);
    let mut value = SqrtQInt::zero(q);
    for e in ETuple::all(level) {
        let dist = profile.epeak.distance(&e) as i64;
        if dist <= budget {
            value = &value + &b_at(&table, budget - dist, q).scale(&binom_product(level, &e));
        }
    }
    let at_full = profile.epeak == ETuple::full(level);
    CuspTerm { cusp, profile, at_full, value }
}

/// Cusp data for the canonical frame of a point.
#[derive(Clone, Debug)]
pub struct CuspData {
    pub terms: Vec<CuspTerm>,
    pub enumeration: CuspEnumeration,
    /// False if any maximizing cusp above the threshold fell outside the
    /// degree bound.
    pub complete: bool,
}

pub fn default_deg_bound(point: &EvalPoint, level: &Level) -> i64 {
    point.n as i64 + level.degree() as i64 + 2
}

pub fn cusp_data(level: &Level, point: &EvalPoint, q: u64) -> Result<CuspData, BoundError> {
    let m = AdelicMatrix::canonical(point, q as u32);
    cusp_data_for(level, &m, default_deg_bound(point, level), q)
}

pub fn cusp_data_for(level: &Level, m: &AdelicMatrix, deg_bound: i64, q: u64) -> Result<CuspData, BoundError> {
    let enumeration = enumerate_cusps(m, level, 2, deg_bound)?;
    let terms = enumeration.cusps.iter().map(|(c, prof)| cusp_term(level, c.clone(), prof.clone(), q)).collect();
    let complete = enumeration.beyond_degree == 0;
    Ok(CuspData { terms, enumeration, complete })
}

/// √q·2^{deg N−3} + q·Σ over cusps with h* ≥ 2 and epeak ≠ (c_x) of their terms.
pub fn bound_cusp(level: &Level, data: &CuspData, q: u64) -> Result<SqrtQInt, BoundError> {
    let deg_n = check_degree(level)?;
    let sum = data.terms.iter().filter(|t| !t.at_full).fold(SqrtQInt::zero(q), |acc, t| &acc + &t.value);
    Ok(&base_term(deg_n, q) + &sum.scale(&BigInt::from(q)))
}

/// √q·2^{deg N−3} + q·Σ over cusps with 2 ≤ h* ≤ deg N/2 of S(h* − 2, deg N).
pub fn bound_squarefree(level: &Level, data: &CuspData, q: u64) -> Result<SqrtQInt, BoundError> {
    let deg_n = check_degree(level)?;
    if !level.is_squarefree() {
        return Err(BoundError::NotSquarefree);
    }
    let sum = data
        .terms
        .iter()
        .filter(|t| 2 * t.profile.hstar <= deg_n)
        .fold(SqrtQInt::zero(q), |acc, t| &acc + &s_coeff(t.profile.hstar - 2, deg_n as u32, q));
    Ok(&base_term(deg_n, q) + &sum.scale(&BigInt::from(q)))
}

/// For squarefree level each cusp term equals S(h* − 2, deg N).
pub fn squarefree_terms_collapse(level: &Level, data: &CuspData, q: u64) -> bool {
    let deg_n = level.degree();
    data.terms.iter().all(|t| t.value == s_coeff(t.profile.hstar - 2, deg_n, q))
}

/// A bound of the form numerator/denominator with positive denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct FinalBound {
    pub numerator: SqrtQInt,
    pub denominator: SqrtQInt,
    pub value: f64,
    pub envelope: f64,
}

/// √q·(2^{deg N−3} + [2^{deg N−1}/Σ_{k<⌊deg N/2⌋} binom(deg N, k)]·
/// (2√q+2)^{deg N−2}/(2√q+1)^{⌈deg N/2⌉−1}), with the envelope
/// ((2√q+2)/√(2√q+1))^{deg N}.
pub fn bound_final(deg_n: i64, q: u64) -> Result<FinalBound, BoundError> {
    if deg_n < 4 {
        return Err(BoundError::LevelTooSmall(deg_n));
    }
    let sigma: BigInt = (0..deg_n / 2).map(|k| binom(deg_n, k)).sum();
    let t = SqrtQInt::new(1, 2, q);
    let t2 = SqrtQInt::new(2, 2, q);
    let root = SqrtQInt::sqrt_q(q);
    let ceil = (deg_n + 1) / 2;
    let denominator = t.pow((ceil - 1) as u32).scale(&sigma);
    let first = denominator.scale(&(BigInt::one() << (deg_n - 3) as usize));
    let second = t2.pow((deg_n - 2) as u32).scale(&(BigInt::one() << (deg_n - 1) as usize));
    let numerator = &root * &(&first + &second);
    let value = numerator.to_f64() / denominator.to_f64();
    let sq = (q as f64).sqrt();
    let envelope = ((2.0 * sq + 2.0) / (2.0 * sq + 1.0).sqrt()).powi(deg_n as i32);
    Ok(FinalBound { numerator, denominator, value, envelope })
}

/// Decides |S|·q^{−n} ≤ num/den. Exact when |S|² is a rational integer,
/// otherwise by a guarded floating comparison that refuses close calls.
pub fn magnitude_at_most(sum: &CycInt, n: usize, num: &SqrtQInt, den: &SqrtQInt) -> Result<bool, BoundError> {
    let q = num.q();
    let sq = sum.abs_squared();
    let scale = BigInt::from(q).pow(2 * n as u32);
    let rhs = (num * num).scale(&scale);
    if let Some(norm) = sq.as_integer() {
        let lhs = &SqrtQInt::integer(norm, q) * &(den * den);
        return Ok(lhs.cmp_exact(&rhs) != Ordering::Greater);
    }
    let (re, _) = sq.embed(1);
    let d = den.to_f64();
    let margin = rhs.to_f64() - re * d * d;
    let size: f64 = sq.coords().iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY).abs()).sum::<f64>() * d * d;
    let guard = 1e-12 * (size + rhs.to_f64().abs()).max(1.0);
    if margin.abs() <= guard {
        return Err(BoundError::Inconclusive { margin, guard });
    }
    Ok(margin > 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundLine {
    pub name: &'static str,
    pub rhs: SqrtQInt,
    pub value: f64,
    /// None when the inputs are not certified (incomplete cusp search).
    pub holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub point: String,
    pub sum: CycInt,
    pub magnitude: f64,
    pub lines: Vec<BoundLine>,
    pub complete: bool,
}

impl BoundReport {
    pub fn violations(&self) -> Vec<&'static str> {
        self.lines.iter().filter(|l| l.holds == Some(false)).map(|l| l.name).collect()
    }

    /// max over certified lines of |f| / rhs.
    pub fn worst_ratio(&self) -> f64 {
        self.lines
            .iter()
            .filter(|l| l.holds.is_some() && l.value > 0.0)
            .map(|l| self.magnitude / l.value)
            .fold(0.0, f64::max)
    }

    pub fn line(&self, name: &str) -> Option<&BoundLine> {
        self.lines.iter().find(|l| l.name == name)
    }

    pub fn to_json(&self) -> Value {
        let lines: Vec<Value> = self
            .lines
            .iter()
            .map(|l| json!({"bound": l.name, "rhs": l.rhs.to_string(), "value": l.value, "holds": l.holds}))
            .collect();
        json!({
            "point": self.point,
            "S": self.sum.to_string(),
            "magnitude": self.magnitude,
            "complete": self.complete,
            "worst_ratio": self.worst_ratio(),
            "bounds": lines,
        })
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: |f| = {:.6}", self.point, self.magnitude)?;
        for l in &self.lines {
            let mark = match l.holds {
                Some(true) => "ok",
                Some(false) => "VIOLATED",
                None => "unverified",
            };
            write!(f, "; {} {:.4} {mark}", l.name, l.value)?;
        }
        Ok(())
    }
}

/// Evaluates the pointwise chain at one point given its Whittaker value.
/// The cusp search runs up to `deg_bound`, or the default for the point.
pub fn bound_report(
    level: &Level,
    point: &EvalPoint,
    value: &WhittakerValue,
    deg_bound: Option<i64>,
    q: u64,
) -> Result<BoundReport, BoundError> {
    let one = SqrtQInt::one(q);
    let exact = |name: &'static str, rhs: SqrtQInt, certified: bool| -> Result<BoundLine, BoundError> {
        let holds = magnitude_at_most(&value.sum, point.n, &rhs, &one)?;
        Ok(BoundLine { name, value: rhs.to_f64(), rhs, holds: certified.then_some(holds) })
    };
    let mut lines = vec![exact("first", bound_first(level, point, q)?, true)?];
    let m = AdelicMatrix::canonical(point, q as u32);
    let data = cusp_data_for(level, &m, deg_bound.unwrap_or_else(|| default_deg_bound(point, level)), q)?;
    lines.push(exact("cusp", bound_cusp(level, &data, q)?, data.complete)?);
    if level.is_squarefree() {
        lines.push(exact("squarefree", bound_squarefree(level, &data, q)?, data.complete)?);
    }
    let fin = bound_final(level.degree() as i64, q)?;
    let holds = magnitude_at_most(&value.sum, point.n, &fin.numerator, &fin.denominator)?;
    lines.push(BoundLine { name: "final", rhs: fin.numerator.clone(), value: fin.value, holds: Some(holds) });
    Ok(BoundReport {
        point: point.to_string(),
        sum: value.sum.clone(),
        magnitude: value.magnitude,
        lines,
        complete: data.complete,
    })
}

/// Magnitude of a cyclotomic integer scaled by q^{−n}.
pub fn normalized_magnitude(sum: &CycInt, n: usize, q: u64) -> f64 {
    cyc_abs(sum) / (q as f64).powi(n as i32)
}

#[derive(Clone, Debug)]
pub struct AtkinLehnerResult {
    pub word: Vec<Place>,
    /// Bound after each prefix of the word, starting with the empty one.
    pub bounds: Vec<SqrtQInt>,
    pub dominant: Option<(Cusp, HeightProfile)>,
    pub invariant: bool,
}

/// The cusp sum with its largest term removed.
fn al_bound(level: &Level, profiles: &[HeightProfile], q: u64) -> SqrtQInt {
    let deg_n = level.degree() as i64;
    let terms: Vec<SqrtQInt> =
        profiles.iter().filter(|p| p.hstar >= 2).map(|p| s_coeff(p.hstar - 2, deg_n as u32, q)).collect();
    let max = terms.iter().cloned().fold(SqrtQInt::zero(q), SqrtQInt::max);
    let total = terms.iter().fold(SqrtQInt::zero(q), |acc, t| &acc + t);
    &base_term(deg_n, q) + &(&total - &max).scale(&BigInt::from(q))
}

/// Greedily switches level places where the dominant cusp has e = 0,
/// checking after each switch that every profile keeps its h* with the
/// peak switched, so the bound is unchanged.
pub fn atkin_lehner_optimize(level: &Level, m: &AdelicMatrix, deg_bound: i64, q: u64) -> Result<AtkinLehnerResult, BoundError> {
    check_degree(level)?;
    if !level.is_squarefree() {
        return Err(BoundError::NotSquarefree);
    }
    let en = enumerate_cusps(m, level, 1, deg_bound)?;
    let cusps: Vec<Cusp> = en.cusps.iter().map(|(c, _)| c.clone()).collect();
    let mut profiles: Vec<HeightProfile> = en.cusps.iter().map(|(_, p)| p.clone()).collect();
    let dominant = (0..profiles.len()).max_by(|&a, &b| {
        profiles[a].hstar.cmp(&profiles[b].hstar).then_with(|| cusps[b].sort_key(&cusps[a]))
    });
    let mut bounds = vec![al_bound(level, &profiles, q)];
    let mut word = Vec::new();
    let mut invariant = true;
    let mut current = m.clone();
    if let Some(i) = dominant {
        let targets: Vec<(Place, u32)> = level
            .places()
            .filter(|(v, c)| profiles[i].epeak.get(v) != *c)
            .map(|(v, c)| (v.clone(), c))
            .collect();
        for (v, c) in targets {
            current = current.atkin_lehner(&v, c);
            let mut next = Vec::with_capacity(profiles.len());
            for (cusp, old) in cusps.iter().zip(&profiles) {
                let new = height_profile(&current, cusp, level)?;
                invariant &= new.hstar == old.hstar && new.epeak == e_switch(&old.epeak, &v, level)?;
                next.push(new);
            }
            profiles = next;
            let b = al_bound(level, &profiles, q);
            invariant &= b == bounds[0];
            bounds.push(b);
            word.push(v);
        }
    }
    let dominant = dominant.map(|i| (cusps[i].clone(), profiles[i].clone()));
    Ok(AtkinLehnerResult { word, bounds, dominant, invariant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funfield::{Adele, Divisor};
    use crate::whittaker::LinearForm;

    const Q: u64 = 5;

    fn level() -> Level {
        Level::from_conductor(&Divisor::parse(5, "[T] + [T+1] + [T+4] + [inf]").unwrap()).unwrap()
    }

    fn point(n: usize, z: &str) -> EvalPoint {
        EvalPoint::new(n, Adele::parse(5, z).unwrap())
    }

    #[test]
    fn first_bound_at_n_zero() {
        let lv = level();
        for z in ["0", "T:1/T", "inf:T^2"] {
            let pt = point(0, z);
            let alpha = linear_form_of(&pt, 5).unwrap();
            let d = d_alpha(0, &alpha, &ETuple::zeros(&lv)).unwrap();
            let expect = &base_term(4, Q) + &b_at(&b_table(Q, 0), d, Q).scale(&BigInt::from(Q));
            assert_eq!(bound_first(&lv, &pt, Q).unwrap(), expect);
        }
    }

    #[test]
    fn first_bound_zero_form_dominates_top_terms() {
        let lv = level();
        for n in 0..=4usize {
            let b = bound_first(&lv, &point(n, "0"), Q).unwrap();
            let top = SqrtQInt::integer(binom(4, n as i64) * BigInt::from(Q), Q);
            assert!(b.cmp_exact(&top) != Ordering::Less);
        }
        assert!(LinearForm::zero(5, 2).is_zero());
    }

    #[test]
    fn final_bound_values() {
        let f = bound_final(4, 5).unwrap();
        let s = 5f64.sqrt();
        let expect = s * (2.0 + 1.6 * (2.0 * s + 2.0).powi(2) / (2.0 * s + 1.0));
        assert!((f.value - expect).abs() < 1e-9 * expect);
        assert!(matches!(bound_final(3, 5), Err(BoundError::LevelTooSmall(3))));
        let mut prev = 0.0;
        for d in 4..=20 {
            let f = bound_final(d, 5).unwrap();
            assert!(f.value > prev);
            prev = f.value;
            let ratio = f.value / f.envelope;
            assert!(ratio > 0.0 && ratio < 10.0, "deg {d}: ratio {ratio}");
        }
    }

    #[test]
    fn empty_cusp_list_gives_base() {
        let lv = level();
        // n large: h*(1:0) = n + 2 > deg N/2 is the only big cusp for z = 0
        let pt = point(3, "0");
        let data = cusp_data(&lv, &pt, Q).unwrap();
        assert!(data.complete);
        let b = bound_squarefree(&lv, &data, Q).unwrap();
        assert!(squarefree_terms_collapse(&lv, &data, Q));
        assert_eq!(b, base_term(4, Q));
    }

    #[test]
    fn exact_magnitude_comparison() {
        let one = SqrtQInt::one(Q);
        let s = CycInt::integer(25, 5);
        assert!(magnitude_at_most(&s, 1, &SqrtQInt::integer(5, Q), &one).unwrap());
        assert!(!magnitude_at_most(&s, 1, &SqrtQInt::integer(4, Q), &one).unwrap());
        // |ζ| = 1 ≤ 1 decided through the norm
        assert!(magnitude_at_most(&CycInt::zeta_pow(1, 5), 0, &one, &one).unwrap());
    }

    #[test]
    fn atkin_lehner_word() {
        let lv = level();
        let m = AdelicMatrix::canonical(&point(1, "0"), 5);
        let r = atkin_lehner_optimize(&lv, &m, 8, Q).unwrap();
        assert!(r.invariant);
        // (1:0) dominates with epeak 0, so all four places get switched
        assert_eq!(r.word.len(), 4);
        let (_, prof) = r.dominant.unwrap();
        assert_eq!(prof.epeak, ETuple::full(&lv));
        let mz = AdelicMatrix::canonical(&point(0, "T:1/T"), 5);
        let r = atkin_lehner_optimize(&lv, &mz, 8, Q).unwrap();
        assert!(r.invariant);
        assert!(r.bounds.windows(2).all(|w| w[0] == w[1]));
    }
}

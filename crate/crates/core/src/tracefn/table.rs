use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::exactalg::{ExtField, Poly, LOG_ZERO};
use crate::funfield::{Divisor, Place};

use super::surface::{count_points, EllipticSurface, Reduction};
use super::TraceError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalFactor {
    pub a: i64,
    pub reduction: Reduction,
}

impl LocalFactor {
    fn type_name(&self) -> &'static str {
        match self.reduction {
            Reduction::Good => "good",
            Reduction::Multiplicative { split: true } => "split",
            Reduction::Multiplicative { split: false } => "nonsplit",
        }
    }

    /// r̃(k[v]) for k = 0..len.
    pub fn sequence(&self, qv: i128, len: usize) -> Vec<i128> {
        let mut out = Vec::with_capacity(len);
        let a = self.a as i128;
        for k in 0..len {
            let next = match (self.reduction, k) {
                (_, 0) => 1,
                (_, 1) => a,
                (Reduction::Good, _) => a * out[k - 1] - qv * out[k - 2],
                (Reduction::Multiplicative { .. }, _) => a * out[k - 1],
            };
            out.push(next);
        }
        out
    }
}

/// The conductor: every bad place with multiplicity one, after checking that
/// reduction is multiplicative, the bad places are rational and deg N ≥ 4.
pub fn conductor(e: &EllipticSurface) -> Result<Divisor, TraceError> {
    let bad = e.bad_places()?;
    for v in &bad {
        e.reduction(v)?;
    }
    if let Some(v) = bad.iter().find(|v| v.degree() > 1) {
        return Err(TraceError::NonRationalSingularity(v.to_string()));
    }
    let mut n = Divisor::zero();
    for v in bad {
        n.add_at(v, 1);
    }
    if n.degree() < 4 {
        return Err(TraceError::LevelTooSmall(n.degree()));
    }
    Ok(n)
}

/// Local Frobenius data at every place of degree ≤ depth.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceTable {
    surface: EllipticSurface,
    conductor: Divisor,
    depth: usize,
    local: BTreeMap<Place, LocalFactor>,
}

impl TraceTable {
    pub fn build(e: &EllipticSurface, depth: usize) -> Result<TraceTable, TraceError> {
        let conductor = conductor(e)?;
        let p = e.modulus();
        let disc = e.discriminant();
        let mut local = BTreeMap::new();
        for d in 1..=depth {
            let field = ExtField::new(p, d);
            let m = (field.order() - 1) as u64;
            let reps: Vec<u32> = (0..m as u32)
                .filter(|&k| {
                    let mut orbit = k as u64;
                    for step in 1..=d {
                        orbit = orbit * p as u64 % m;
                        if orbit < k as u64 {
                            return false;
                        }
                        if orbit == k as u64 {
                            return step == d;
                        }
                    }
                    false
                })
                .collect();
            let found: Vec<(Place, LocalFactor)> = reps
                .par_iter()
                .map(|&k| {
                    let theta = field.exp(k);
                    let place = Place::Finite(field.minimal_polynomial(k));
                    if field.eval(&disc, theta) != 0 {
                        let a = frobenius_trace(&field, e, theta);
                        Ok((place, LocalFactor { a, reduction: Reduction::Good }))
                    } else {
                        let reduction = e.reduction(&place)?;
                        Ok((place.clone(), LocalFactor { a: count_points(e, &place)?, reduction }))
                    }
                })
                .collect::<Result<_, TraceError>>()?;
            local.extend(found);
            // zero is a root of T, which the orbit scan over units misses
            if d == 1 {
                let place = Place::parse(p, "T")?;
                let reduction = e.reduction(&place)?;
                local.insert(place.clone(), LocalFactor { a: count_points(e, &place)?, reduction });
            }
        }
        if depth >= 1 {
            let reduction = e.reduction(&Place::Infinity)?;
            local.insert(Place::Infinity, LocalFactor { a: count_points(e, &Place::Infinity)?, reduction });
        }
        let tbl = TraceTable { surface: e.clone(), conductor, depth, local };
        tbl.check_weil()?;
        Ok(tbl)
    }

    fn check_weil(&self) -> Result<(), TraceError> {
        for (v, lf) in &self.local {
            let qv = self.place_norm(v) as i64;
            let ok = match lf.reduction {
                Reduction::Good => lf.a * lf.a <= 4 * qv,
                Reduction::Multiplicative { .. } => lf.a.abs() == 1 && self.conductor.mult(v) == 1,
            };
            if !ok {
                return Err(TraceError::WeilViolation(v.to_string()));
            }
        }
        Ok(())
    }

    pub fn modulus(&self) -> u32 {
        self.surface.modulus()
    }

    pub fn surface(&self) -> &EllipticSurface {
        &self.surface
    }

    pub fn conductor(&self) -> &Divisor {
        &self.conductor
    }

    pub fn level_degree(&self) -> i64 {
        self.conductor.degree()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// q^{deg v}.
    pub fn place_norm(&self, v: &Place) -> u64 {
        (self.modulus() as u64).pow(v.degree() as u32)
    }

    pub fn local(&self, v: &Place) -> Result<&LocalFactor, TraceError> {
        self.local.get(v).ok_or_else(|| TraceError::BeyondDepth(v.to_string(), self.depth))
    }

    pub fn places(&self) -> impl Iterator<Item = (&Place, &LocalFactor)> {
        self.local.iter()
    }

    /// The level places in place order.
    pub fn level_places(&self) -> Vec<Place> {
        self.conductor.support().cloned().collect()
    }

    pub fn to_json(&self) -> Value {
        let mut places = Map::new();
        for (v, lf) in &self.local {
            places.insert(v.to_string(), json!({"a": lf.a, "type": lf.type_name()}));
        }
        let coeffs = |f: &Poly| -> Vec<u32> { (0..=f.deg().max(0) as usize).map(|i| f.coeff(i).value()).collect() };
        json!({
            "p": self.modulus(),
            "a4": coeffs(self.surface.a4()),
            "a6": coeffs(self.surface.a6()),
            "depth": self.depth,
            "conductor": self.conductor.to_string(),
            "places": Value::Object(places),
        })
    }

    pub fn from_json(v: &Value) -> Result<TraceTable, TraceError> {
        let bad = |what: &str| TraceError::Format(what.to_string());
        let p = v["p"].as_u64().ok_or_else(|| bad("p"))? as u32;
        let poly = |key: &str| -> Result<Poly, TraceError> {
            let arr = v[key].as_array().ok_or_else(|| bad(key))?;
            let cs: Option<Vec<i64>> = arr.iter().map(|c| c.as_i64()).collect();
            Ok(Poly::new(p, &cs.ok_or_else(|| bad(key))?))
        };
        let surface = EllipticSurface::new(poly("a4")?, poly("a6")?)?;
        let depth = v["depth"].as_u64().ok_or_else(|| bad("depth"))? as usize;
        let conductor = conductor(&surface)?;
        let stored = Divisor::parse(p, v["conductor"].as_str().ok_or_else(|| bad("conductor"))?)?;
        if stored != conductor {
            return Err(bad("conductor does not match the surface"));
        }
        let mut local = BTreeMap::new();
        for (key, entry) in v["places"].as_object().ok_or_else(|| bad("places"))? {
            let place = Place::parse(p, key)?;
            let a = entry["a"].as_i64().ok_or_else(|| bad("a"))?;
            let reduction = match entry["type"].as_str() {
                Some("good") => Reduction::Good,
                Some("split") => Reduction::Multiplicative { split: true },
                Some("nonsplit") => Reduction::Multiplicative { split: false },
                _ => return Err(bad("type")),
            };
            local.insert(place, LocalFactor { a, reduction });
        }
        let tbl = TraceTable { surface, conductor, depth, local };
        tbl.check_weil()?;
        Ok(tbl)
    }
}

/// a_v = −Σ_x χ(x³ + Aθ·x + Bθ) over F_{p^d}, using Zech logarithms.
fn frobenius_trace(field: &ExtField, e: &EllipticSurface, theta: u32) -> i64 {
    let la = field.log(field.eval(e.a4(), theta));
    let lb = field.log(field.eval(e.a6(), theta));
    let m = field.order() - 1;
    let parity = |l: u32| -> i64 {
        match l {
            LOG_ZERO => 0,
            l if l % 2 == 0 => 1,
            _ => -1,
        }
    };
    let mut sum = parity(lb);
    for i in 0..m {
        let cube = ((3 * i as u64) % m as u64) as u32;
        let lin = if la == LOG_ZERO { LOG_ZERO } else { ((la as u64 + i as u64) % m as u64) as u32 };
        sum += parity(field.add_logs(field.add_logs(cube, lin), lb));
    }
    -sum
}

/// r̃(D) for an effective divisor D.
pub fn r_value(tbl: &TraceTable, d: &Divisor) -> Result<BigInt, TraceError> {
    let mut acc = BigInt::one();
    for (v, k) in d.iter() {
        if k < 0 {
            return Err(TraceError::NegativeMultiplicity);
        }
        let lf = tbl.local(v)?;
        let qv = BigInt::from(tbl.place_norm(v));
        let a = BigInt::from(lf.a);
        let (mut prev, mut cur) = (BigInt::one(), BigInt::one());
        for step in 1..=k {
            let next = match (lf.reduction, step) {
                (_, 1) => a.clone(),
                (Reduction::Good, _) => &a * &cur - &qv * &prev,
                (Reduction::Multiplicative { .. }, _) => &a * &cur,
            };
            prev = std::mem::replace(&mut cur, next);
        }
        acc *= cur;
    }
    Ok(acc)
}

/// r̃ on every monic polynomial of degree ≤ max_degree (indexed by monic
/// code) and on multiples of the place at infinity.
#[derive(Clone, Debug)]
pub struct DivisorTable {
    p: u32,
    max_degree: usize,
    finite: Vec<Vec<i64>>,
    infinity: Vec<i64>,
}

impl DivisorTable {
    pub fn build(tbl: &TraceTable, max_degree: usize) -> Result<DivisorTable, TraceError> {
        if max_degree > tbl.depth() {
            return Err(TraceError::BeyondDepth(format!("degree {max_degree}"), tbl.depth()));
        }
        let p = tbl.modulus();
        let mut finite: Vec<Vec<i64>> = (0..=max_degree).map(|d| vec![0; (p as usize).pow(d as u32)]).collect();
        finite[0][0] = 1;
        let mut places: Vec<(Poly, Vec<i64>)> = Vec::new();
        for (v, lf) in tbl.places() {
            if let Place::Finite(pi) = v {
                let d = pi.deg() as usize;
                if d <= max_degree {
                    let seq = lf.sequence(tbl.place_norm(v) as i128, max_degree / d + 1);
                    let seq: Option<Vec<i64>> = seq.into_iter().map(|x| i64::try_from(x).ok()).collect();
                    places.push((pi.clone(), seq.ok_or(TraceError::Overflow)?));
                }
            }
        }
        places.sort_by_key(|(pi, _)| pi.deg());
        fill(&places, 0, &Poly::one(p), 1, max_degree, &mut finite)?;
        let inf = tbl.local(&Place::Infinity)?;
        let infinity: Option<Vec<i64>> =
            inf.sequence(p as i128, max_degree + 1).into_iter().map(|x| i64::try_from(x).ok()).collect();
        Ok(DivisorTable { p, max_degree, finite, infinity: infinity.ok_or(TraceError::Overflow)? })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn monic(&self, degree: usize, code: u64) -> i64 {
        self.finite[degree][code as usize]
    }

    pub fn infinity(&self, k: usize) -> i64 {
        self.infinity[k]
    }

    /// r̃ of the divisor of the section g of O(n): div g + (n − deg g)[∞].
    pub fn section(&self, g: &Poly, n: usize) -> i64 {
        let (_, g) = g.monic();
        let d = g.deg() as usize;
        self.monic(d, g.monic_code()) * self.infinity(n - d)
    }
}

fn fill(
    places: &[(Poly, Vec<i64>)],
    start: usize,
    cur: &Poly,
    value: i64,
    max_degree: usize,
    out: &mut [Vec<i64>],
) -> Result<(), TraceError> {
    for i in start..places.len() {
        let (pi, seq) = &places[i];
        if cur.deg() + pi.deg() > max_degree as i64 {
            break;
        }
        let mut g = cur.clone();
        for r in seq.iter().skip(1) {
            g = &g * pi;
            if g.deg() > max_degree as i64 {
                break;
            }
            let val = value.checked_mul(*r).ok_or(TraceError::Overflow)?;
            out[g.deg() as usize][g.monic_code() as usize] = val;
            fill(places, i + 1, &g, val, max_degree, out)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracefn::count_points_direct;

    fn example() -> EllipticSurface {
        let p = |s: &str| Poly::parse(5, s).unwrap();
        EllipticSurface::from_two_torsion(&p("1"), &p("T^2")).unwrap()
    }

    #[test]
    fn table_matches_direct_counts() {
        let e = example();
        let tbl = TraceTable::build(&e, 3).unwrap();
        assert_eq!(tbl.level_degree(), 4);
        let count = tbl.places().filter(|(v, _)| v.degree() == 3).count();
        assert_eq!(count, 40);
        for (v, lf) in tbl.places() {
            if v.degree() <= 2 {
                assert_eq!(lf.a, count_points_direct(&e, v), "at {v}");
            }
        }
    }

    #[test]
    fn r_value_examples() {
        let tbl = TraceTable::build(&example(), 2).unwrap();
        assert_eq!(r_value(&tbl, &Divisor::zero()).unwrap(), BigInt::one());
        let good = tbl.places().find(|(_, lf)| lf.reduction == Reduction::Good && lf.a == 0);
        if let Some((v, _)) = good {
            let qv = tbl.place_norm(v) as i64;
            assert_eq!(r_value(&tbl, &Divisor::point(v.clone(), 2)).unwrap(), BigInt::from(-qv));
        }
        let (v, lf) = tbl.places().find(|(_, lf)| lf.reduction != Reduction::Good).unwrap();
        assert_eq!(r_value(&tbl, &Divisor::point(v.clone(), 3)).unwrap(), BigInt::from(lf.a.pow(3)));
        let neg = Divisor::point(v.clone(), -1);
        assert_eq!(r_value(&tbl, &neg), Err(TraceError::NegativeMultiplicity));
    }

    #[test]
    fn json_roundtrip() {
        let tbl = TraceTable::build(&example(), 2).unwrap();
        let back = TraceTable::from_json(&tbl.to_json()).unwrap();
        assert_eq!(back, tbl);
    }

    #[test]
    fn divisor_table_agrees_with_r_value() {
        let tbl = TraceTable::build(&example(), 3).unwrap();
        let dt = DivisorTable::build(&tbl, 3).unwrap();
        for d in 0..=3usize {
            for g in Poly::monics(5, d).step_by(7) {
                let div = crate::funfield::divisor_of_poly(&g).unwrap();
                let mut eff = Divisor::zero();
                for (v, k) in div.iter().filter(|(v, _)| !v.is_infinity()) {
                    eff.add_at(v.clone(), k);
                }
                let expect = r_value(&tbl, &eff).unwrap();
                assert_eq!(BigInt::from(dt.monic(d, g.monic_code())), expect, "{g}");
            }
        }
    }
}

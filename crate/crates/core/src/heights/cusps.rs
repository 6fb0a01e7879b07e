use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::exactalg::FqElem;
use crate::funfield::{FieldError, LocalElement, Place, RatFunc};

use super::linalg::kernel;
use super::{height_profile, AdelicMatrix, Cusp, ETuple, HeightError, HeightProfile, Level};

#[derive(Clone, Debug)]
pub struct CuspEnumeration {
    /// Cusps with h* ≥ threshold and degree ≤ deg_bound, sorted.
    pub cusps: Vec<(Cusp, HeightProfile)>,
    /// max over all cusps of h(m, ·, e), for every e.
    pub max_height: BTreeMap<ETuple, i64>,
    /// A cusp attaining each maximum.
    pub maximizers: BTreeMap<ETuple, Cusp>,
    /// Cusps above the threshold dropped for exceeding deg_bound.
    pub beyond_degree: usize,
}

/// Coordinates of the expansion digits at positions lo..=hi, each digit
/// flattened to its deg v residue coefficients.
fn window(elem: &LocalElement, lo: i64, hi: i64) -> Result<Vec<FqElem>, FieldError> {
    let v = elem.place();
    let p = elem.value().modulus();
    if let Some(prec) = elem.precision() {
        if prec <= hi {
            return Err(FieldError::PrecisionExhausted(v.to_string()));
        }
    }
    let width = v.degree();
    let mut out = vec![FqElem::zero(p); ((hi - lo + 1).max(0) as usize) * width];
    let Some(val) = elem.value().valuation(v) else { return Ok(out) };
    if hi < val {
        return Ok(out);
    }
    let (val, digits) = elem.digits((hi - val + 1) as usize);
    for pos in lo.max(val)..=hi {
        let d = &digits[(pos - val) as usize];
        let base = (pos - lo) as usize * width;
        for i in 0..width {
            out[base + i] = d.coeff(i);
        }
    }
    Ok(out)
}

/// Π over finite places of π_v^{−k_v}.
fn pole_function(divisor: &BTreeMap<Place, i64>, p: u32) -> RatFunc {
    let mut out = RatFunc::one(p);
    for (v, &k) in divisor {
        if !v.is_infinity() && k != 0 {
            out = &out * &RatFunc::uniformizer_pow(v, -k, p);
        }
    }
    out
}

fn degree(divisor: &BTreeMap<Place, i64>) -> i64 {
    divisor.iter().map(|(v, k)| v.degree() as i64 * k).sum()
}

/// G·T^i for i = 0..=deg D: a basis of {f : div f + D ≥ 0}.
fn riemann_roch_basis(divisor: &BTreeMap<Place, i64>, p: u32) -> Vec<RatFunc> {
    let g = pole_function(divisor, p);
    let t = RatFunc::t(p);
    let d = degree(divisor);
    let mut out = Vec::new();
    let mut cur = g;
    for _ in 0..=d {
        out.push(cur.clone());
        cur = &cur * &t;
    }
    if d < 0 {
        out.clear();
    }
    out
}

struct Frame {
    p: u32,
    places: BTreeSet<Place>,
    val_a: BTreeMap<Place, i64>,
    val_d: BTreeMap<Place, i64>,
    ratio: BTreeMap<Place, LocalElement>,
    det_degree: i64,
}

impl Frame {
    fn new(m: &AdelicMatrix, level: &Level) -> Result<Frame, HeightError> {
        if !m.is_upper_triangular() {
            return Err(HeightError::NotTriangular);
        }
        let [[a, b], [_, d]] = &m.rows;
        let mut places = a.relevant_places()?;
        places.extend(b.relevant_places()?);
        places.extend(d.relevant_places()?);
        places.extend(level.places().map(|(v, _)| v.clone()));
        let mut val_a = BTreeMap::new();
        let mut val_d = BTreeMap::new();
        let mut ratio = BTreeMap::new();
        for v in &places {
            let zero = || HeightError::ZeroDeterminant(v.to_string());
            val_a.insert(v.clone(), a.valuation(v)?.ok_or_else(zero)?);
            val_d.insert(v.clone(), d.valuation(v)?.ok_or_else(zero)?);
            ratio.insert(v.clone(), b.at(v).mul(&d.at(v).inv()?));
        }
        let det_degree = degree(&val_a) + degree(&val_d);
        Ok(Frame { p: m.modulus(), places, val_a, val_d, ratio, det_degree })
    }

    /// A nonzero (f1, f2) with v(A f1) ≥ −kδ_∞ and v(B f1 + D f2) ≥
    /// −e_v − kδ_∞ everywhere, if one exists.
    fn section(&self, e: &ETuple, k: i64) -> Result<Option<(RatFunc, RatFunc)>, HeightError> {
        let p = self.p;
        let at_inf = |v: &Place| if v.is_infinity() { k } else { 0 };
        let d1: BTreeMap<Place, i64> = self.places.iter().map(|v| (v.clone(), self.val_a[v] + at_inf(v))).collect();
        let first = riemann_roch_basis(&d1, p);
        let mut target = BTreeMap::new();
        let mut poles = BTreeMap::new();
        for v in &self.places {
            let ev = e.get(v) as i64 + at_inf(v) + self.val_d[v];
            let z = &self.ratio[v];
            let mv = if z.is_exact() && z.value().is_zero() { ev } else { ev.max(d1[v] - z.valuation_floor()) };
            target.insert(v.clone(), ev);
            poles.insert(v.clone(), mv);
        }
        let second = riemann_roch_basis(&poles, p);
        let cols = first.len() + second.len();
        if cols == 0 {
            return Ok(None);
        }
        let mut rows: Vec<Vec<FqElem>> = Vec::new();
        for v in &self.places {
            let (lo, hi) = (-poles[v], -target[v] - 1);
            if lo > hi {
                continue;
            }
            let z = &self.ratio[v];
            let mut columns = Vec::with_capacity(cols);
            for b in &first {
                columns.push(window(&z.scale(b), lo, hi)?);
            }
            for g in &second {
                columns.push(window(&LocalElement::exact(v.clone(), g.clone()), lo, hi)?);
            }
            for r in 0..columns[0].len() {
                rows.push(columns.iter().map(|c| c[r]).collect());
            }
        }
        let ker = kernel(rows, cols, p);
        let Some(x) = ker.first() else { return Ok(None) };
        let combine = |basis: &[RatFunc], coeffs: &[FqElem]| {
            basis.iter().zip(coeffs).fold(RatFunc::zero(p), |acc, (b, &c)| &acc + &b.scale(c))
        };
        let f1 = combine(&first, &x[..first.len()]);
        let f2 = combine(&second, &x[first.len()..]);
        Ok(Some((f1, f2)))
    }

    /// The maximal height at e and a cusp attaining it.
    fn maximum(&self, e: &ETuple) -> Result<(i64, Cusp), HeightError> {
        let deg_a = degree(&self.val_a);
        let deg_d = degree(&self.val_d) + e.total() as i64;
        let mut k = -deg_a.max(deg_d) - 1;
        loop {
            if let Some((f1, f2)) = self.section(e, k)? {
                let h = -2 * k - self.det_degree - e.total() as i64;
                return Ok((h, Cusp::new(&f1, &f2)?));
            }
            // with f1 = 0 the space is nonzero by k = −deg_d
            assert!(k <= -deg_d, "section search overran");
            k += 1;
        }
    }
}

/// All rational cusps of degree ≤ deg_bound with h* ≥ threshold for an
/// upper-triangular matrix, together with the maximal height at every e.
pub fn enumerate_cusps(
    m: &AdelicMatrix,
    level: &Level,
    threshold: i64,
    deg_bound: i64,
) -> Result<CuspEnumeration, HeightError> {
    let frame = Frame::new(m, level)?;
    let tuples = ETuple::all(level);
    let maxima: Vec<(ETuple, i64, Cusp)> = tuples
        .into_par_iter()
        .map(|e| frame.maximum(&e).map(|(h, c)| (e, h, c)))
        .collect::<Result<_, _>>()?;
    let mut found: Vec<Cusp> = Vec::new();
    for (_, h, c) in &maxima {
        if *h >= threshold && !found.contains(c) {
            found.push(c.clone());
        }
    }
    let mut cusps = Vec::new();
    let mut beyond_degree = 0;
    for c in found {
        let profile = height_profile(m, &c, level)?;
        if profile.hstar < threshold {
            continue;
        }
        if c.degree() > deg_bound {
            beyond_degree += 1;
        } else {
            cusps.push((c, profile));
        }
    }
    cusps.sort_by(|a, b| a.0.sort_key(&b.0));
    let mut max_height = BTreeMap::new();
    let mut maximizers = BTreeMap::new();
    for (e, h, c) in maxima {
        max_height.insert(e.clone(), h);
        maximizers.insert(e, c);
    }
    Ok(CuspEnumeration { cusps, max_height, maximizers, beyond_degree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::Poly;
    use crate::funfield::{Adele, Divisor};
    use crate::heights::{height, sample_cusps, uniqueness_and_packing};
    use crate::whittaker::EvalPoint;

    const P: u32 = 5;

    fn level() -> Level {
        Level::from_conductor(&Divisor::parse(P, "[T] + [T+1] + [T+4] + [inf]").unwrap()).unwrap()
    }

    fn canonical(n: usize, z: &str) -> AdelicMatrix {
        AdelicMatrix::canonical(&EvalPoint::new(n, Adele::parse(P, z).unwrap()), P)
    }

    #[test]
    fn zero_adele_gives_the_infinite_cusp() {
        let lv = level();
        for n in 0..4 {
            let en = enumerate_cusps(&canonical(n, "0"), &lv, 1, 10).unwrap();
            let (c, prof) = en.cusps.iter().find(|(c, _)| *c == Cusp::one_zero(P)).unwrap();
            assert_eq!(*c, Cusp::one_zero(P));
            assert_eq!(prof.hstar, n as i64 + 2);
            assert_eq!(prof.epeak, ETuple::zeros(&lv));
            // (0:1) peaks at the full tuple with h* = deg N − n − 2
            let expected = if lv.degree() as i64 - n as i64 - 2 >= 1 { 2 } else { 1 };
            assert_eq!(en.cusps.len(), expected, "n = {n}");
        }
    }

    #[test]
    fn maxima_dominate_sampled_cusps() {
        let lv = level();
        for z in ["T:1/T", "T+2:1/(T+2)^2; inf:T", "T:2/T^3"] {
            let m = canonical(3, z);
            let en = enumerate_cusps(&m, &lv, 1, 12).unwrap();
            for (e, &hmax) in &en.max_height {
                assert_eq!(height(&m, &en.maximizers[e], e).unwrap(), hmax);
                for c in sample_cusps(P) {
                    assert!(height(&m, &c, e).unwrap() <= hmax, "z={z} e={e} c={c}");
                }
            }
            let cs: Vec<Cusp> = en.cusps.iter().map(|x| x.0.clone()).collect();
            assert!(uniqueness_and_packing(&m, &cs, &lv).unwrap().passed());
        }
    }

    #[test]
    fn exhaustive_small_cusps() {
        // every cusp of degree ≤ 2 stays below the per-tuple maximum
        let lv = level();
        let m = canonical(2, "T:1/T^2; T+1:3/(T+1)");
        let en = enumerate_cusps(&m, &lv, 1, 10).unwrap();
        let polys: Vec<Poly> = (0..=2).flat_map(|d| Poly::monics(P, d).collect::<Vec<_>>()).collect();
        let mut all = vec![Cusp::one_zero(P)];
        for f1 in &polys {
            for f2 in (0..=2).flat_map(|d| Poly::monics(P, d).collect::<Vec<_>>()) {
                for c in FqElem::all(P).filter(|c| !c.is_zero()) {
                    if let Ok(cusp) = Cusp::from_polys(f1.clone(), f2.scale(c)) {
                        all.push(cusp);
                    }
                }
            }
        }
        for e in ETuple::all(&lv) {
            for c in &all {
                assert!(height(&m, c, &e).unwrap() <= en.max_height[&e]);
            }
        }
        for c in &all {
            let prof = height_profile(&m, c, &lv).unwrap();
            if prof.hstar >= 1 {
                assert!(en.cusps.iter().any(|(d, _)| d == c), "missed {c}");
            }
        }
    }

    #[test]
    fn rejects_lower_triangular() {
        let lv = level();
        let m = canonical(1, "0").left_mul(&crate::heights::RationalMatrix::swap(P));
        assert!(matches!(enumerate_cusps(&m, &lv, 1, 5), Err(HeightError::NotTriangular)));
    }
}

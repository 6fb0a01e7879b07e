use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::exactalg::{FqElem, Poly};

use super::{residue, FieldError, Place, RatFunc};

/// An element of the completion F_v, represented by a rational function
/// known modulo π_v^prec (exact when `prec` is None).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalElement {
    place: Place,
    value: RatFunc,
    prec: Option<i64>,
}

impl LocalElement {
    pub fn exact(place: Place, value: RatFunc) -> LocalElement {
        LocalElement { place, value, prec: None }
    }

    pub fn with_precision(place: Place, value: RatFunc, prec: i64) -> LocalElement {
        LocalElement { place, value, prec: Some(prec) }.normalized()
    }

    pub fn zero(place: Place, p: u32) -> LocalElement {
        LocalElement::exact(place, RatFunc::zero(p))
    }

    pub fn place(&self) -> &Place {
        &self.place
    }

    pub fn value(&self) -> &RatFunc {
        &self.value
    }

    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Valuation; Ok(None) for an exact zero.
    pub fn valuation(&self) -> Result<Option<i64>, FieldError> {
        let v = self.value.valuation(&self.place);
        match (v, self.prec) {
            (None, None) => Ok(None),
            (Some(v), None) => Ok(Some(v)),
            (Some(v), Some(p)) if v < p => Ok(Some(v)),
            _ => Err(FieldError::PrecisionExhausted(self.place.to_string())),
        }
    }

    /// Lower bound on the valuation that never fails.
    pub fn valuation_floor(&self) -> i64 {
        let v = self.value.valuation(&self.place).unwrap_or(i64::MAX);
        match self.prec {
            Some(p) => v.min(p),
            None => v,
        }
    }

    /// True if this element lies in π^k O_v, deciding loudly.
    pub fn has_valuation_at_least(&self, k: i64) -> Result<bool, FieldError> {
        let v = self.value.valuation(&self.place).unwrap_or(i64::MAX);
        match self.prec {
            Some(p) if v >= p && p < k => Err(FieldError::PrecisionExhausted(self.place.to_string())),
            Some(p) if v >= p => Ok(true),
            _ => Ok(v >= k),
        }
    }

    pub fn truncate(&self, prec: i64) -> LocalElement {
        let prec = self.prec.map_or(prec, |p| p.min(prec));
        LocalElement { place: self.place.clone(), value: self.value.clone(), prec: Some(prec) }.normalized()
    }

    /// Replaces the value by a canonical truncated expansion.
    fn normalized(mut self) -> LocalElement {
        let Some(prec) = self.prec else { return self };
        let p = self.value.modulus();
        let Some(v) = self.value.valuation(&self.place) else { return self };
        if v >= prec {
            self.value = RatFunc::zero(p);
            return self;
        }
        let (val, digits) = self.digits((prec - v) as usize);
        let mut acc = RatFunc::zero(p);
        for (i, d) in digits.iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            let term = &RatFunc::from_poly(d.clone()) * &RatFunc::uniformizer_pow(&self.place, val + i as i64, p);
            acc = &acc + &term;
        }
        self.value = acc;
        self
    }

    /// The first `count` expansion digits starting at the valuation. Digits
    /// at a finite place are residues (polynomials of degree < deg v); at
    /// infinity they are constants.
    pub fn digits(&self, count: usize) -> (i64, Vec<Poly>) {
        let p = self.value.modulus();
        let Some(v) = self.value.valuation(&self.place) else {
            return (0, vec![Poly::zero(p); count]);
        };
        match &self.place {
            Place::Finite(pi) => {
                // value = π^v · N/D with π ∤ D
                let mut num = self.value.num().clone();
                let mut den = self.value.den().clone();
                if v > 0 {
                    num = num.exact_div(&pi.pow(v as u64));
                } else if v < 0 {
                    den = den.exact_div(&pi.pow((-v) as u64));
                }
                let modulus = pi.pow(count as u64);
                let mut u = num.mul_mod(&den.inv_mod(&modulus).expect("unit denominator"), &modulus);
                let mut out = Vec::with_capacity(count);
                for _ in 0..count {
                    let (q, r) = u.div_rem(pi);
                    out.push(r);
                    u = q;
                }
                (v, out)
            }
            Place::Infinity => {
                let series = infinity_series(&self.value, count);
                (v, series.into_iter().map(Poly::constant).collect())
            }
        }
    }

    pub fn add(&self, o: &LocalElement) -> LocalElement {
        assert_eq!(self.place, o.place, "place mismatch");
        let prec = min_prec(self.prec, o.prec);
        LocalElement { place: self.place.clone(), value: &self.value + &o.value, prec }.normalized()
    }

    pub fn neg(&self) -> LocalElement {
        LocalElement { place: self.place.clone(), value: -&self.value, prec: self.prec }
    }

    pub fn sub(&self, o: &LocalElement) -> LocalElement {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &LocalElement) -> LocalElement {
        assert_eq!(self.place, o.place, "place mismatch");
        if (self.is_exact() && self.value.is_zero()) || (o.is_exact() && o.value.is_zero()) {
            return LocalElement::zero(self.place.clone(), self.value.modulus());
        }
        let a = self.prec.map(|p| p.saturating_add(o.valuation_floor()));
        let b = o.prec.map(|p| p.saturating_add(self.valuation_floor()));
        LocalElement { place: self.place.clone(), value: &self.value * &o.value, prec: min_prec(a, b) }.normalized()
    }

    /// Multiplicative inverse; fails if the element is not known to be nonzero.
    pub fn inv(&self) -> Result<LocalElement, FieldError> {
        let v = self.valuation()?.ok_or_else(|| FieldError::PrecisionExhausted(self.place.to_string()))?;
        let value = self.value.inv().unwrap();
        // relative precision is preserved
        let prec = self.prec.map(|p| p - 2 * v);
        Ok(LocalElement { place: self.place.clone(), value, prec }.normalized())
    }

    pub fn scale(&self, r: &RatFunc) -> LocalElement {
        self.mul(&LocalElement::exact(self.place.clone(), r.clone()))
    }

    /// Residue of (this element)·dT, requiring enough precision for the
    /// coefficient of π^{−1}.
    pub fn residue(&self) -> Result<FqElem, FieldError> {
        let needed = if self.place.is_infinity() { 2 } else { 0 };
        if let Some(p) = self.prec {
            if p < needed {
                return Err(FieldError::PrecisionExhausted(self.place.to_string()));
            }
        }
        Ok(residue(&self.value, &self.place))
    }

    pub fn to_json(&self, count: usize) -> Value {
        let (val, digits) = self.digits(count);
        let coeffs: Vec<Vec<u32>> = digits.iter().map(|d| d.raw_coeffs().to_vec()).collect();
        json!({ "valuation": val, "coeffs": coeffs, "precision": self.prec })
    }
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

/// Coefficients of the expansion in s = 1/T, starting at s^{v_∞}.
fn infinity_series(r: &RatFunc, count: usize) -> Vec<FqElem> {
    let p = r.modulus();
    let rev = |f: &Poly| -> Vec<FqElem> { (0..=f.deg() as usize).rev().map(|i| f.coeff(i)).collect() };
    let num = rev(r.num());
    let den = rev(r.den());
    let inv0 = den[0].inv().unwrap();
    let mut out: Vec<FqElem> = Vec::with_capacity(count);
    for n in 0..count {
        let mut acc = num.get(n).copied().unwrap_or(FqElem::zero(p));
        for k in 1..den.len().min(n + 1) {
            acc = acc - den[k] * out[n - k];
        }
        out.push(acc * inv0);
    }
    out
}

/// A finitely supported additive adele; unlisted components are zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Adele {
    components: BTreeMap<Place, LocalElement>,
}

impl Adele {
    pub fn zero() -> Adele {
        Adele::default()
    }

    pub fn single(elem: LocalElement) -> Adele {
        let mut a = Adele::zero();
        a.set(elem);
        a
    }

    /// The global function r placed at each listed place.
    pub fn principal(r: &RatFunc, places: &[Place]) -> Adele {
        let mut a = Adele::zero();
        for v in places {
            a.set(LocalElement::exact(v.clone(), r.clone()));
        }
        a
    }

    pub fn set(&mut self, elem: LocalElement) {
        self.components.insert(elem.place().clone(), elem);
    }

    pub fn get(&self, place: &Place) -> Option<&LocalElement> {
        self.components.get(place)
    }

    pub fn components(&self) -> impl Iterator<Item = &LocalElement> {
        self.components.values()
    }

    pub fn places(&self) -> impl Iterator<Item = &Place> {
        self.components.keys()
    }

    pub fn add(&self, o: &Adele) -> Adele {
        let mut out = self.clone();
        for c in o.components() {
            let sum = match out.components.get(c.place()) {
                Some(existing) => existing.add(c),
                None => c.clone(),
            };
            out.set(sum);
        }
        out
    }

    pub fn scale(&self, c: FqElem) -> Adele {
        let r = RatFunc::constant(c);
        Adele { components: self.components.iter().map(|(k, v)| (k.clone(), v.scale(&r))).collect() }
    }

    pub fn to_json(&self, count: usize) -> Value {
        let map: serde_json::Map<String, Value> =
            self.components.iter().map(|(k, v)| (k.to_string(), v.to_json(count))).collect();
        Value::Object(map)
    }

    /// Parses "place:value; place:value" with values rational in T.
    pub fn parse(p: u32, s: &str) -> Result<Adele, FieldError> {
        let mut out = Adele::zero();
        for part in s.split(';').map(str::trim).filter(|x| !x.is_empty()) {
            if part == "0" {
                continue;
            }
            let (place, value) = part
                .split_once(':')
                .ok_or_else(|| FieldError::NotAPlace(format!("expected place:value in {part:?}")))?;
            let place = Place::parse(p, place)?;
            let value = RatFunc::parse(p, value)?;
            let elem = LocalElement::exact(place.clone(), value);
            let elem = match out.get(&place) {
                Some(e) => e.add(&elem),
                None => elem,
            };
            out.set(elem);
        }
        Ok(out)
    }
}

impl std::fmt::Display for Adele {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.components.values().map(|c| format!("{}:{}", c.place(), c.value())).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Σ_v res_v(w · z_v · dT) over the support of z.
pub fn residue_pairing(z: &Adele, w: &RatFunc) -> Result<FqElem, FieldError> {
    let mut acc = FqElem::zero(w.modulus());
    for c in z.components() {
        acc = acc + c.scale(w).residue()?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(s: &str) -> RatFunc {
        RatFunc::parse(5, s).unwrap()
    }

    fn place(s: &str) -> Place {
        Place::parse(5, s).unwrap()
    }

    #[test]
    fn exact_zero_annihilates_inexact() {
        let v = place("T^2+T+2");
        let x = LocalElement::with_precision(v.clone(), rf("T/(T^2+T+2)"), 8);
        let z = LocalElement::zero(v, 5);
        assert_eq!(x.mul(&z).valuation().unwrap(), None);
        assert_eq!(z.mul(&x).valuation().unwrap(), None);
    }

    #[test]
    fn pairing_examples() {
        let z = Adele::single(LocalElement::exact(place("T"), rf("1/T")));
        assert_eq!(residue_pairing(&z, &rf("3+2T+4T^2")).unwrap().value(), 3);
        assert_eq!(residue_pairing(&Adele::zero(), &rf("T")).unwrap().value(), 0);
        let z = Adele::single(LocalElement::exact(Place::Infinity, rf("1/T")));
        assert_eq!(residue_pairing(&z, &rf("T")).unwrap().value(), 0);
    }

    #[test]
    fn global_functions_pair_to_zero() {
        let r = rf("(T^3+1)/((T+1)^2*(T^2+2))");
        let places = vec![place("T+1"), place("T^2+2"), Place::Infinity];
        let z = Adele::principal(&r, &places);
        for w in ["1", "T", "T^2+3", "4T^5+T"] {
            assert!(residue_pairing(&z, &rf(w)).unwrap().is_zero());
        }
    }

    #[test]
    fn truncation_keeps_low_digits() {
        let v = place("T^2+2");
        let x = LocalElement::exact(v.clone(), rf("1/((T^2+2)*(T+1))"));
        let t = x.truncate(3);
        let (val, d1) = x.digits(4);
        let (val2, d2) = t.digits(4);
        assert_eq!(val, -1);
        assert_eq!(val2, -1);
        assert_eq!(d1[..4], d2[..4]);
        assert_eq!(t.has_valuation_at_least(4), Ok(false));
        assert!(t.sub(&t).has_valuation_at_least(4).is_err());
        assert_eq!(t.sub(&t).has_valuation_at_least(3), Ok(true));
    }

    #[test]
    fn precision_errors_are_loud() {
        let x = LocalElement::with_precision(place("T"), rf("T^3"), 2);
        assert!(x.valuation().is_err());
        let y = LocalElement::with_precision(Place::Infinity, rf("1"), 1);
        assert!(y.residue().is_err());
    }

    #[test]
    fn infinity_expansion() {
        let x = LocalElement::exact(Place::Infinity, rf("T/(T^2+1)"));
        let (v, d) = x.digits(4);
        assert_eq!(v, 1);
        let c: Vec<u32> = d.iter().map(|p| p.coeff(0).value()).collect();
        // s/(1+s^2) = s − s^3 + …
        assert_eq!(c, vec![1, 0, 4, 0]);
    }
}

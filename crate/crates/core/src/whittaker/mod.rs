//! Whittaker values of the newform attached to a trace table at points
//! ((a, z), (0, 1)) with div a = (n+2)[∞], and the Radon stalk trace.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::exactalg::{cyc_abs, CycInt, FqElem, Poly};
use crate::funfield::{residue_pairing, Adele, Divisor, FieldError, Place, RatFunc};
use crate::tracefn::DivisorTable;

/// An evaluation point in the canonical frame: sections of O(n) are the
/// polynomials of degree ≤ n and z is an additive adele.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalPoint {
    pub n: usize,
    pub z: Adele,
}

impl EvalPoint {
    pub fn new(n: usize, z: Adele) -> EvalPoint {
        EvalPoint { n, z }
    }
}

impl fmt::Display for EvalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} z={}", self.n, self.z)
    }
}

/// The values α(T^k), k = 0..=n, of a linear form on polynomials of degree ≤ n.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearForm {
    values: Vec<FqElem>,
}

impl LinearForm {
    pub fn new(values: Vec<FqElem>) -> LinearForm {
        assert!(!values.is_empty());
        LinearForm { values }
    }

    pub fn zero(p: u32, n: usize) -> LinearForm {
        LinearForm { values: vec![FqElem::zero(p); n + 1] }
    }

    /// The form w ↦ coefficient of T^k in w.
    pub fn coefficient(p: u32, n: usize, k: usize) -> LinearForm {
        let mut f = LinearForm::zero(p, n);
        f.values[k] = FqElem::one(p);
        f
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn modulus(&self) -> u32 {
        self.values[0].modulus()
    }

    pub fn values(&self) -> &[FqElem] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// α(w) for a polynomial of degree ≤ n.
    pub fn eval(&self, w: &Poly) -> FqElem {
        assert!(w.deg() <= self.n() as i64, "section degree exceeds n");
        let mut acc = FqElem::zero(self.modulus());
        for (i, &c) in w.raw_coeffs().iter().enumerate() {
            if c != 0 {
                acc = acc + self.values[i] * FqElem::new(c as i64, self.modulus());
            }
        }
        acc
    }

    fn eval_raw(&self, coeffs: &[u32]) -> u32 {
        let p = self.modulus() as u64;
        let mut acc = 0u64;
        for (i, &c) in coeffs.iter().enumerate() {
            acc += self.values[i].value() as u64 * c as u64;
        }
        (acc % p) as u32
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.value().to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// α(T^k) = Σ_v res_v(T^k z_v dT).
pub fn linear_form_of(point: &EvalPoint, p: u32) -> Result<LinearForm, FieldError> {
    let mut values = Vec::with_capacity(point.n + 1);
    let mut mono = RatFunc::one(p);
    let t = RatFunc::t(p);
    for _ in 0..=point.n {
        values.push(residue_pairing(&point.z, &mono)?);
        mono = &mono * &t;
    }
    Ok(LinearForm { values })
}

/// An effective divisor of degree n: div g + (n − deg g)[∞] for monic g.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SectionDivisor {
    pub g: Poly,
    pub infinity: usize,
}

impl SectionDivisor {
    pub fn degree(&self) -> usize {
        self.g.deg() as usize + self.infinity
    }

    pub fn to_divisor(&self) -> Result<Divisor, FieldError> {
        let mut d = Divisor::zero();
        for (pi, k) in self.g.factor()?.factors {
            d.add_at(Place::Finite(pi), k as i64);
        }
        d.add_at(Place::Infinity, self.infinity as i64);
        Ok(d)
    }
}

fn monic_coeffs(p: u32, d: usize, mut code: u64, buf: &mut Vec<u32>) {
    buf.clear();
    for _ in 0..d {
        buf.push((code % p as u64) as u32);
        code /= p as u64;
    }
    buf.push(1);
}

/// Degree-n divisors whose section line lies in ker α.
pub fn p_alpha(n: usize, alpha: &LinearForm) -> Vec<SectionDivisor> {
    assert_eq!(alpha.n(), n);
    let p = alpha.modulus();
    let mut out = Vec::new();
    let mut buf = Vec::new();
    for d in 0..=n {
        for code in 0..(p as u64).pow(d as u32) {
            monic_coeffs(p, d, code, &mut buf);
            if alpha.eval_raw(&buf) == 0 {
                out.push(SectionDivisor { g: Poly::from_u32(p, buf.clone()), infinity: n - d });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct WhittakerValue {
    pub sum: CycInt,
    pub magnitude: f64,
}

/// Per-monic accumulation: (Σ r̃ over ker α, Σ r̃ over all, exponent histogram).
fn accumulate(tbl: &DivisorTable, alpha: &LinearForm) -> (i128, i128, Vec<i128>) {
    let n = alpha.n();
    let p = alpha.modulus();
    assert!(n <= tbl.max_degree(), "divisor table too shallow for n = {n}");
    let chunks: Vec<(usize, u64, u64)> = (0..=n)
        .flat_map(|d| {
            let total = (p as u64).pow(d as u32);
            let step = 4096u64;
            (0..total.div_ceil(step)).map(move |i| (d, i * step, ((i + 1) * step).min(total)))
        })
        .collect();
    chunks
        .par_iter()
        .map(|&(d, lo, hi)| {
            let mut kernel = 0i128;
            let mut all = 0i128;
            let mut hist = vec![0i128; p as usize];
            let mut buf = Vec::new();
            let r_inf = tbl.infinity(n - d) as i128;
            for code in lo..hi {
                let r = tbl.monic(d, code) as i128 * r_inf;
                if r == 0 {
                    continue;
                }
                monic_coeffs(p, d, code, &mut buf);
                let t = alpha.eval_raw(&buf) as u64;
                all += r;
                if t == 0 {
                    kernel += r;
                }
                for lambda in 1..p as u64 {
                    hist[(lambda * t % p as u64) as usize] += r;
                }
            }
            (kernel, all, hist)
        })
        .reduce(
            || (0, 0, vec![0; p as usize]),
            |(k1, a1, h1), (k2, a2, h2)| (k1 + k2, a1 + a2, h1.iter().zip(&h2).map(|(x, y)| x + y).collect()),
        )
}

/// S = Σ_{s ≠ 0} ψ₀(α(s)) r̃(div s) in ℤ[ζ_p] and |f| = q^{−n}|S|.
pub fn whittaker_value(tbl: &DivisorTable, alpha: &LinearForm) -> WhittakerValue {
    let p = alpha.modulus();
    let (_, _, hist) = accumulate(tbl, alpha);
    let sum = CycInt::from_exponent_coeffs(p, hist.into_iter().map(BigInt::from).collect());
    let magnitude = cyc_abs(&sum) / (p as f64).powi(alpha.n() as i32);
    WhittakerValue { sum, magnitude }
}

/// −Σ_{D ∈ P(α)} r̃(D), from an independent enumeration of P(α).
pub fn radon_stalk_trace(tbl: &DivisorTable, n: usize, alpha: &LinearForm) -> BigInt {
    let mut acc = BigInt::zero();
    for sd in p_alpha(n, alpha) {
        acc += tbl.section(&sd.g, n);
    }
    -acc
}

/// Σ_{deg D = n} r̃(D).
pub fn degree_sum(tbl: &DivisorTable, n: usize) -> BigInt {
    let p = tbl.modulus();
    let (_, all, _) = accumulate(tbl, &LinearForm::zero(p, n));
    BigInt::from(all)
}

/// Checks S = q·Σ_{P(α)} r̃ − Σ_{deg D = n} r̃ exactly in ℤ[ζ_p].
pub fn radon_identity_holds(tbl: &DivisorTable, alpha: &LinearForm) -> bool {
    let p = alpha.modulus();
    let n = alpha.n();
    let s = whittaker_value(tbl, alpha).sum;
    let kernel = -radon_stalk_trace(tbl, n, alpha);
    let rhs = BigInt::from(p) * kernel - degree_sum(tbl, n);
    s == CycInt::integer(rhs, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funfield::LocalElement;
    use crate::tracefn::{l_polynomial, EllipticSurface, TraceTable};

    fn tables() -> (TraceTable, DivisorTable) {
        let q = |s: &str| Poly::parse(5, s).unwrap();
        let e = EllipticSurface::from_two_torsion(&q("1"), &q("T^2")).unwrap();
        let tbl = TraceTable::build(&e, 4).unwrap();
        let dt = DivisorTable::build(&tbl, 4).unwrap();
        (tbl, dt)
    }

    fn point(n: usize, s: &str) -> EvalPoint {
        EvalPoint::new(n, Adele::parse(5, s).unwrap())
    }

    #[test]
    fn linear_form_examples() {
        assert!(linear_form_of(&point(3, "0"), 5).unwrap().is_zero());
        let a = linear_form_of(&point(3, "T:1/T"), 5).unwrap();
        assert_eq!(a, LinearForm::coefficient(5, 3, 0));
        let a = linear_form_of(&point(3, "T:1/T^2"), 5).unwrap();
        assert_eq!(a, LinearForm::coefficient(5, 3, 1));
    }

    #[test]
    fn p_alpha_counts() {
        assert_eq!(p_alpha(2, &LinearForm::zero(5, 2)).len(), 31);
        assert!(p_alpha(0, &LinearForm::coefficient(5, 0, 0)).is_empty());
        // kernel of w ↦ w(0) on degree ≤ 1 is the single line spanned by T
        let k = p_alpha(1, &LinearForm::coefficient(5, 1, 0));
        assert_eq!(k, vec![SectionDivisor { g: Poly::t(5), infinity: 0 }]);
        // a nonzero form on degree ≤ 3 has (q³ − 1)/(q − 1) kernel lines
        assert_eq!(p_alpha(3, &LinearForm::coefficient(5, 3, 2)).len(), 31);
    }

    #[test]
    fn small_n_values() {
        let (tbl, dt) = tables();
        let one = whittaker_value(&dt, &LinearForm::coefficient(5, 0, 0));
        assert_eq!(one.sum, CycInt::integer(-1, 5));
        assert!((one.magnitude - 1.0).abs() < 1e-12);
        let zero = whittaker_value(&dt, &LinearForm::zero(5, 0));
        assert_eq!(zero.sum, CycInt::integer(4, 5));
        let c = l_polynomial(&tbl, 4).unwrap();
        let c1 = c.coeffs.get(1).cloned().unwrap_or_default();
        assert_eq!(whittaker_value(&dt, &LinearForm::zero(5, 1)).sum, CycInt::integer(c1 * 4, 5));
    }

    #[test]
    fn radon_identity_on_samples() {
        let (_, dt) = tables();
        for n in 0..=3 {
            for k in 0..=n {
                assert!(radon_identity_holds(&dt, &LinearForm::coefficient(5, n, k)));
            }
            assert!(radon_identity_holds(&dt, &LinearForm::zero(5, n)));
        }
        assert_eq!(radon_stalk_trace(&dt, 0, &LinearForm::coefficient(5, 0, 0)), BigInt::zero());
    }

    #[test]
    fn translation_by_global_function() {
        let (_, dt) = tables();
        let z = Adele::parse(5, "T+1:1/(T+1)^2; T^2+2:T/(T^2+2)").unwrap();
        let g = RatFunc::parse(5, "(T^3+1)/(T*(T+1))").unwrap();
        let places = vec![Place::parse(5, "T").unwrap(), Place::parse(5, "T+1").unwrap(), Place::Infinity];
        let shifted = z.add(&Adele::principal(&g, &places));
        for n in 0..=3 {
            let a = linear_form_of(&EvalPoint::new(n, z.clone()), 5).unwrap();
            let b = linear_form_of(&EvalPoint::new(n, shifted.clone()), 5).unwrap();
            assert_eq!(a, b);
            let lattice = LocalElement::exact(Place::Infinity, RatFunc::parse(5, "1/T").unwrap().pow(n as i64 + 2));
            let c = linear_form_of(&EvalPoint::new(n, z.add(&Adele::single(lattice))), 5).unwrap();
            assert_eq!(whittaker_value(&dt, &a), whittaker_value(&dt, &c));
        }
    }

    #[test]
    fn section_divisors_have_degree_n() {
        for sd in p_alpha(2, &LinearForm::coefficient(5, 2, 1)).iter().take(10) {
            let d = sd.to_divisor().unwrap();
            assert_eq!(d.degree(), 2);
            assert!(d.is_effective());
        }
    }
}

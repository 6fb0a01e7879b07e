use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::surface::Reduction;
use super::table::TraceTable;
use super::TraceError;

#[derive(Clone, Debug, PartialEq)]
pub struct LPolynomial {
    /// c_0..c_{deg N − 4}
    pub coeffs: Vec<BigInt>,
    pub inverse_roots: Vec<Complex64>,
    /// max over inverse roots of | |γ|/q − 1 |
    pub max_deviation: f64,
}

/// Σ_{deg D = n} r̃(D) from the Euler product, asserting vanishing above
/// degree deg N − 4 up to n_max.
pub fn l_polynomial(tbl: &TraceTable, n_max: usize) -> Result<LPolynomial, TraceError> {
    let degree = (tbl.level_degree() - 4) as usize;
    if n_max < degree {
        return Err(TraceError::LDegreeViolation(format!("n_max {n_max} below expected degree {degree}")));
    }
    if n_max > tbl.depth() {
        return Err(TraceError::BeyondDepth(format!("degree {n_max}"), tbl.depth()));
    }
    let mut series = vec![BigInt::zero(); n_max + 1];
    series[0] = BigInt::from(1);
    for (v, lf) in tbl.places() {
        let d = v.degree();
        if d > n_max {
            continue;
        }
        let local = lf.sequence(tbl.place_norm(v) as i128, n_max / d + 1);
        let mut next = vec![BigInt::zero(); n_max + 1];
        for (i, s) in series.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            for (k, r) in local.iter().enumerate() {
                let j = i + k * d;
                if j > n_max {
                    break;
                }
                next[j] += s * BigInt::from(*r);
            }
        }
        series = next;
    }
    if let Some(n) = (degree + 1..=n_max).find(|&n| !series[n].is_zero()) {
        return Err(TraceError::LDegreeViolation(format!("c_{n} = {} with deg N − 4 = {degree}", series[n])));
    }
    if series[degree].is_zero() {
        return Err(TraceError::LDegreeViolation(format!("c_{degree} vanishes")));
    }
    series.truncate(degree + 1);
    let q = tbl.modulus() as f64;
    // inverse roots are the roots of x^m + c_1 x^{m−1} + … + c_m
    let monic: Vec<f64> = series.iter().map(|c| c.to_f64().unwrap()).collect();
    let inverse_roots = polynomial_roots(&monic);
    let max_deviation = inverse_roots.iter().map(|r| (r.norm() / q - 1.0).abs()).fold(0.0, f64::max);
    Ok(LPolynomial { coeffs: series, inverse_roots, max_deviation })
}

/// Roots of x^m + a_1 x^{m−1} + … + a_m where `coeffs` = [1, a_1, …, a_m],
/// by Durand–Kerner iteration followed by Newton polishing.
fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let m = coeffs.len() - 1;
    if m == 0 {
        return Vec::new();
    }
    let eval = |x: Complex64| coeffs.iter().fold(Complex64::zero(), |acc, &c| acc * x + c);
    let deriv = |x: Complex64| {
        coeffs[..m].iter().enumerate().fold(Complex64::zero(), |acc, (i, &c)| acc * x + c * (m - i) as f64)
    };
    let radius = 1.0 + coeffs[1..].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let seed = Complex64::from_polar(1.0, 0.4);
    let mut roots: Vec<Complex64> = (0..m).map(|k| seed.powu(k as u32 + 1) * radius * 0.5).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..m {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..m {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 * radius {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..5 {
            let d = deriv(*r);
            if d.norm() == 0.0 {
                break;
            }
            *r -= eval(*r) / d;
        }
    }
    roots
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdjointLValue {
    pub estimate: f64,
    pub error_bound: f64,
    pub window: (f64, f64),
    pub in_window: bool,
}

/// A_n = Σ_{x ∈ P¹(F_{q^n})} tr(Frob_x | ad), from places of degree dividing n.
fn adjoint_traces(tbl: &TraceTable, n_max: usize) -> Result<Vec<f64>, TraceError> {
    if n_max > tbl.depth() {
        return Err(TraceError::BeyondDepth(format!("degree {n_max}"), tbl.depth()));
    }
    let mut out = vec![0.0; n_max + 1];
    for (v, lf) in tbl.places() {
        let d = v.degree();
        if d > n_max {
            continue;
        }
        let qv = tbl.place_norm(v) as f64;
        // power sums α^k + β^k of the weight-one Frobenius eigenvalues
        let mut t = vec![2.0f64, lf.a as f64];
        while t.len() <= n_max / d {
            let k = t.len();
            t.push(lf.a as f64 * t[k - 1] - qv * t[k - 2]);
        }
        for k in 1..=n_max / d {
            let tr = match lf.reduction {
                Reduction::Good => t[k] * t[k] / qv.powi(k as i32) - 1.0,
                Reduction::Multiplicative { .. } => qv.powi(-(k as i32)),
            };
            out[k * d] += d as f64 * tr;
        }
    }
    Ok(out)
}

/// exp(Σ_{n ≤ d_max} q^{−n} A_n / n) with a Weil-bound tail estimate, and
/// the window check with constant `c`.
pub fn adjoint_l_value(tbl: &TraceTable, d_max: usize, c: f64) -> Result<AdjointLValue, TraceError> {
    let traces = adjoint_traces(tbl, d_max)?;
    let q = tbl.modulus() as f64;
    let log: f64 = (1..=d_max).map(|n| traces[n] * q.powi(-(n as i32)) / n as f64).sum();
    let estimate = log.exp();
    let dim = (2 * tbl.level_degree() - 3) as f64;
    let tail = dim * q.powf(-((d_max + 1) as f64) / 2.0) / ((d_max + 1) as f64 * (1.0 - q.powf(-0.5)));
    let error_bound = estimate * (tail.exp() - 1.0);
    let w = (c * dim.ln()).powi(3);
    let window = (1.0 / w, w);
    let in_window = estimate >= window.0 && estimate <= window.1;
    Ok(AdjointLValue { estimate, error_bound, window, in_window })
}

/// L(1, ad) exactly from the 2·deg N − 6 inverse roots on H¹, via Newton's
/// identities; None when the table is too shallow.
pub fn adjoint_l_exact(tbl: &TraceTable) -> Option<f64> {
    let m = (2 * tbl.level_degree() - 6) as usize;
    if m > tbl.depth() {
        return None;
    }
    let traces = adjoint_traces(tbl, m).ok()?;
    let power: Vec<f64> = traces.iter().map(|a| -a).collect();
    let mut e = vec![1.0f64];
    for k in 1..=m {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * power[i];
        }
        e.push(acc / k as f64);
    }
    let u = 1.0 / tbl.modulus() as f64;
    Some((0..=m).map(|k| if k % 2 == 0 { e[k] } else { -e[k] } * u.powi(k as i32)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::Poly;
    use crate::tracefn::EllipticSurface;

    fn table(depth: usize) -> TraceTable {
        let p = |s: &str| Poly::parse(5, s).unwrap();
        let e = EllipticSurface::from_two_torsion(&p("1"), &p("T^2")).unwrap();
        TraceTable::build(&e, depth).unwrap()
    }

    #[test]
    fn degree_four_level_has_constant_l_polynomial() {
        let tbl = table(3);
        let l = l_polynomial(&tbl, 3).unwrap();
        assert_eq!(l.coeffs, vec![BigInt::from(1)]);
        assert!(l.inverse_roots.is_empty());
    }

    #[test]
    fn roots_of_known_polynomial() {
        // (x − 5i)(x + 5i) = x² + 25
        let roots = polynomial_roots(&[1.0, 0.0, 25.0]);
        for r in roots {
            assert!((r.norm() - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn euler_factor_matches_trace_expansion() {
        let tbl = table(4);
        let (v, lf) = tbl.places().find(|(v, lf)| v.degree() == 1 && lf.reduction == Reduction::Good).unwrap();
        let qv = tbl.place_norm(v) as f64;
        // 1/((1 − u)(1 − (x + 1/x)u + u²)) at u = 1/q_v, x + 1/x = (a² − 2q_v)/q_v
        let u = 1.0 / qv;
        let s = (lf.a as f64 * lf.a as f64 - 2.0 * qv) / qv;
        let direct = -((1.0 - u) * (1.0 - s * u + u * u)).ln();
        // log of the factor is Σ_k tr_k q_v^{−k}/k
        let mut t = vec![2.0, lf.a as f64];
        for k in 2..80 {
            t.push(lf.a as f64 * t[k - 1] - qv * t[k - 2]);
        }
        let series: f64 = (1..60).map(|k| (t[k] * t[k] / qv.powi(k as i32) - 1.0) * qv.powi(-(k as i32)) / k as f64).sum();
        assert!((direct - series).abs() < 1e-9);
    }

    #[test]
    fn adjoint_estimate_converges_to_exact_value() {
        let tbl = table(6);
        let exact = adjoint_l_exact(&tbl).unwrap();
        let five = adjoint_l_value(&tbl, 5, 8.0).unwrap();
        let six = adjoint_l_value(&tbl, 6, 8.0).unwrap();
        assert!((six.estimate - five.estimate).abs() <= five.error_bound);
        assert!((six.estimate - exact).abs() <= six.error_bound);
        assert!(six.in_window);
    }
}

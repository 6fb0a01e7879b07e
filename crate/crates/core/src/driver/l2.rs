use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::exactalg::{CycInt, FqElem};
use crate::tracefn::{adjoint_l_exact, adjoint_l_value, AdjointLValue, DivisorTable};
use crate::whittaker::{degree_sum, whittaker_value, LinearForm};

use super::sweep::Prepared;

/// Constant C of the L-value window (C·log(2 deg N − 3))^{±3}.
pub const WINDOW_CONSTANT: f64 = 8.0;

/// Accepted band for the mass ratio; outside it the report raises a flag.
pub const RATIO_BAND: (f64, f64) = (0.5, 2.0);

/// Largest degree at which the Plancherel identity is checked by summing
/// over every linear form.
pub const PLANCHEREL_MAX_N: usize = 2;

#[derive(Clone, Debug)]
pub struct MassRow {
    pub n: usize,
    /// Σ_{deg D = n} r̃(D)².
    pub square_sum: BigInt,
    /// q^{−2n}·square_sum.
    pub mass: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct L2Report {
    pub label: String,
    pub rows: Vec<MassRow>,
    /// L(1, ad)(1 − q^{−2})Π_{v | N} 1/(1 + q_v^{−1}).
    pub limit: f64,
    /// 2q^{deg N − 2}L(1, ad), the integral over PGL₂ with Γ₁(N) of mass 1.
    pub rankin_selberg_rhs: f64,
    pub adjoint: AdjointLValue,
    pub adjoint_exact: Option<f64>,
    /// Largest n ≤ n_max with Σ_{deg D = n} r̃(D) ≠ 0.
    pub support_radius: Option<usize>,
    pub support_bounded: bool,
    /// (n, Σ_α |S_α|² = q^{n+1}(q − 1)·square_sum) for small n.
    pub plancherel: Vec<(usize, bool)>,
    pub ratio: f64,
    pub within_band: bool,
}

impl L2Report {
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| json!({"n": r.n, "square_sum": r.square_sum.to_string(), "mass": r.mass, "ratio": r.ratio}))
            .collect();
        let plancherel: Vec<Value> = self.plancherel.iter().map(|(n, ok)| json!({"n": n, "holds": ok})).collect();
        json!({
            "surface": self.label,
            "rows": rows,
            "limit": self.limit,
            "rankin_selberg_rhs": self.rankin_selberg_rhs,
            "adjoint_l": {
                "estimate": self.adjoint.estimate,
                "error_bound": self.adjoint.error_bound,
                "window": [self.adjoint.window.0, self.adjoint.window.1],
                "in_window": self.adjoint.in_window,
                "exact": self.adjoint_exact,
            },
            "support": if self.support_bounded { json!(self.support_radius) } else { json!("support-unbounded") },
            "plancherel": plancherel,
            "ratio": self.ratio,
            "within_band": self.within_band,
        })
    }
}

/// Σ_{deg D = n} r̃(D)², with D = div g + (n − deg g)[∞] for monic g.
pub fn square_sum(tbl: &DivisorTable, n: usize) -> BigInt {
    let p = tbl.modulus() as u64;
    let total: i128 = (0..=n)
        .into_par_iter()
        .map(|d| {
            let inf = tbl.infinity(n - d) as i128;
            let s: i128 = (0..p.pow(d as u32)).map(|code| (tbl.monic(d, code) as i128).pow(2)).sum();
            s * inf * inf
        })
        .sum();
    BigInt::from(total)
}

/// Σ over all q^{n+1} linear forms α of |S_α|².
fn total_square_over_forms(tbl: &DivisorTable, n: usize) -> CycInt {
    let p = tbl.modulus();
    let count = (p as u64).pow(n as u32 + 1);
    (0..count)
        .map(|mut code| {
            let vals = (0..=n)
                .map(|_| {
                    let c = FqElem::new((code % p as u64) as i64, p);
                    code /= p as u64;
                    c
                })
                .collect();
            whittaker_value(tbl, &LinearForm::new(vals)).sum.abs_squared()
        })
        .fold(CycInt::zero(p), |acc, x| &acc + &x)
}

/// Exploratory comparison of the Whittaker mass with the Rankin–Selberg
/// prediction. Nothing here is a hard check.
pub fn l2_explore(prep: &Prepared, n_max: usize, d_max: usize) -> Result<L2Report, super::DriverError> {
    let q = prep.table.modulus() as f64;
    let adjoint = adjoint_l_value(&prep.table, d_max, WINDOW_CONSTANT)?;
    let adjoint_exact = adjoint_l_exact(&prep.table);
    let l1 = adjoint_exact.unwrap_or(adjoint.estimate);
    let local: f64 = prep.level.places().map(|(v, _)| 1.0 / (1.0 + q.powi(-(v.degree() as i32)))).product();
    let limit = l1 * (1.0 - q.powi(-2)) * local;
    let rankin_selberg_rhs = 2.0 * q.powi(prep.level.degree() as i32 - 2) * l1;
    let rows: Vec<MassRow> = (0..=n_max)
        .map(|n| {
            let square_sum = square_sum(&prep.divisors, n);
            let mass = square_sum.to_f64().unwrap_or(f64::INFINITY) * q.powi(-2 * n as i32);
            MassRow { n, square_sum, mass, ratio: mass / limit }
        })
        .collect();
    let sums: Vec<BigInt> = (0..=n_max).map(|n| degree_sum(&prep.divisors, n)).collect();
    let support_radius = sums.iter().rposition(|s| !s.is_zero());
    let support_bounded = support_radius.is_some_and(|r| r < n_max);
    let p = prep.table.modulus();
    let plancherel = rows
        .iter()
        .take_while(|r| r.n <= PLANCHEREL_MAX_N)
        .map(|r| {
            let lhs = total_square_over_forms(&prep.divisors, r.n);
            let rhs = BigInt::from(p).pow(r.n as u32 + 1) * BigInt::from(p - 1) * &r.square_sum;
            (r.n, lhs == CycInt::integer(rhs, p))
        })
        .collect();
    let ratio = rows.last().map(|r| r.ratio).unwrap_or(f64::NAN);
    Ok(L2Report {
        label: prep.entry.label(),
        rows,
        limit,
        rankin_selberg_rhs,
        adjoint,
        adjoint_exact,
        support_radius,
        support_bounded,
        plancherel,
        ratio,
        within_band: ratio >= RATIO_BAND.0 && ratio <= RATIO_BAND.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::config::{RunConfig, SurfaceSpec};
    use crate::driver::scan::curve_scan;
    use crate::driver::sweep::prepare;

    #[test]
    fn constant_l_polynomial_surface() {
        let cfg = RunConfig {
            surface: Some(SurfaceSpec::TwoTorsion { p: vec![1], q: vec![0, 0, 1] }),
            ..RunConfig::default()
        };
        let entry = curve_scan(&cfg).unwrap().remove(0);
        let prep = prepare(&entry, 4).unwrap();
        let report = l2_explore(&prep, 4, 4).unwrap();
        assert_eq!(report.rows[0].square_sum, BigInt::from(1));
        // the L-polynomial is 1, so only degree zero has a nonzero sum
        assert_eq!(report.support_radius, Some(0));
        assert!(report.support_bounded);
        assert!(report.plancherel.iter().all(|(_, ok)| *ok));
        assert_eq!(report.plancherel.len(), PLANCHEREL_MAX_N + 1);
    }
}

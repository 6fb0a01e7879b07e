use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::exactalg::{FqElem, Poly};
use crate::funfield::Divisor;
use crate::tracefn::{conductor, EllipticSurface, TraceError, TraceTable};

use super::config::{RunConfig, SurfaceSpec};
use super::DriverError;

/// An accepted surface with its conductor.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanEntry {
    pub surface: EllipticSurface,
    pub conductor: Divisor,
    /// (P, Q) when the surface came from a two-torsion model.
    pub two_torsion: Option<(Poly, Poly)>,
}

impl ScanEntry {
    pub fn level_degree(&self) -> i64 {
        self.conductor.degree()
    }

    pub fn label(&self) -> String {
        match &self.two_torsion {
            Some((p, q)) => format!("P={p}, Q={q}"),
            None => format!("a4={}, a6={}", self.surface.a4(), self.surface.a6()),
        }
    }

    /// The entry for a surface whose trace table was loaded from disk.
    pub fn from_table(tbl: &TraceTable) -> ScanEntry {
        ScanEntry { surface: tbl.surface().clone(), conductor: tbl.conductor().clone(), two_torsion: None }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "label": self.label(),
            "a4": self.surface.a4().to_string(),
            "a6": self.surface.a6().to_string(),
            "conductor": self.conductor.to_string(),
            "deg_N": self.level_degree(),
        })
    }
}

/// f(aT + b).
fn substitute(f: &Poly, a: FqElem, b: FqElem) -> Poly {
    let p = f.modulus();
    let lin = Poly::from_u32(p, vec![b.value(), a.value()]);
    f.raw_coeffs().iter().rev().fold(Poly::zero(p), |acc, &c| &(&acc * &lin) + &Poly::constant(FqElem::new(c as i64, p)))
}

/// Coefficients of (u⁴a₄(aT + b), u⁶a₆(aT + b)) minimized over units u, a
/// and shifts b, so that models related by rescaling x and y or by an
/// affine change of T share a key.
fn model_key(e: &EllipticSurface) -> Vec<Vec<u32>> {
    let p = e.modulus();
    let units = || (1..p as i64).map(move |u| FqElem::new(u, p));
    let mut best: Option<Vec<Vec<u32>>> = None;
    for a in units() {
        for b in (0..p as i64).map(|b| FqElem::new(b, p)) {
            let (a4, a6) = (substitute(e.a4(), a, b), substitute(e.a6(), a, b));
            for u in units() {
                let key = vec![a4.scale(u.pow(4)).raw_coeffs().to_vec(), a6.scale(u.pow(6)).raw_coeffs().to_vec()];
                if best.as_ref().is_none_or(|k| key < *k) {
                    best = Some(key);
                }
            }
        }
    }
    best.expect("p ≥ 5 has units")
}

fn accept(surface: EllipticSurface, two_torsion: Option<(Poly, Poly)>) -> Result<ScanEntry, TraceError> {
    let conductor = conductor(&surface)?;
    if !conductor.is_squarefree() {
        return Err(TraceError::NonSquarefreeConductor(conductor.to_string()));
    }
    Ok(ScanEntry { surface, conductor, two_torsion })
}

/// The configured surface, or every two-torsion model y² = x(x − P)(x − Q)
/// with P monic, Q = c·monic, deg P, Q ≤ scan_degree, accepted when the
/// conductor is squarefree, supported on rational places and of degree ≥ 4.
/// Output is sorted by deg N and then by scan order; at most max_surfaces
/// entries are kept per deg N.
pub fn curve_scan(cfg: &RunConfig) -> Result<Vec<ScanEntry>, DriverError> {
    let p = cfg.q;
    if let Some(spec) = &cfg.surface {
        let entry = match spec {
            SurfaceSpec::TwoTorsion { p: pp, q: qq } => {
                let (pp, qq) = (cfg.poly(pp), cfg.poly(qq));
                accept(EllipticSurface::from_two_torsion(&pp, &qq)?, Some((pp, qq)))?
            }
            SurfaceSpec::Weierstrass { a4, a6 } => accept(EllipticSurface::new(cfg.poly(a4), cfg.poly(a6))?, None)?,
        };
        return Ok(vec![entry]);
    }
    let monics: Vec<Poly> = (0..=cfg.scan_degree).flat_map(|d| Poly::monics(p, d)).collect();
    let mut seen = BTreeSet::new();
    let mut out: Vec<ScanEntry> = Vec::new();
    for pp in &monics {
        for c in 1..p as i64 {
            for m in &monics {
                let qq = m.scale(FqElem::new(c, p));
                if &qq == pp || qq.is_zero() {
                    continue;
                }
                let Ok(surface) = EllipticSurface::from_two_torsion(pp, &qq) else { continue };
                if !seen.insert(model_key(&surface)) {
                    continue;
                }
                if let Ok(entry) = accept(surface, Some((pp.clone(), qq))) {
                    out.push(entry);
                }
            }
        }
    }
    out.sort_by_key(|e| e.level_degree());
    let mut kept = Vec::new();
    for entry in out {
        let same = kept.iter().filter(|k: &&ScanEntry| k.level_degree() == entry.level_degree()).count();
        if same < cfg.max_surfaces {
            kept.push(entry);
        }
    }
    if kept.is_empty() {
        return Err(DriverError::NoInstances);
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracefn::TraceTable;

    #[test]
    fn scan_finds_degree_four_levels() {
        let cfg = RunConfig { max_surfaces: 2, ..RunConfig::default() };
        let found = curve_scan(&cfg).unwrap();
        assert!(found.iter().filter(|e| e.level_degree() == 4).count() == 2);
        for e in &found {
            assert!(e.conductor.is_squarefree());
            assert!(e.conductor.support().all(|v| v.degree() == 1));
            assert!(TraceTable::build(&e.surface, 1).is_ok());
        }
        let degrees: Vec<i64> = found.iter().map(|e| e.level_degree()).collect();
        assert!(degrees.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(curve_scan(&cfg).unwrap(), found);
    }

    #[test]
    fn configured_surface_is_validated() {
        let cfg = RunConfig {
            surface: Some(SurfaceSpec::TwoTorsion { p: vec![1], q: vec![0, 0, 1] }),
            ..RunConfig::default()
        };
        let found = curve_scan(&cfg).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].level_degree(), 4);
        // constant P and Q give an isotrivial surface
        let iso = RunConfig { surface: Some(SurfaceSpec::TwoTorsion { p: vec![1], q: vec![2] }), ..cfg };
        assert!(matches!(curve_scan(&iso), Err(DriverError::Trace(TraceError::Isotrivial))));
    }
}

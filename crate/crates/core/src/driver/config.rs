use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::exactalg::{is_prime, Poly};

use super::DriverError;

/// The input surface, either through its two-torsion model
/// y² = x(x − P)(x − Q) or directly as y² = x³ + a₄x + a₆.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurfaceSpec {
    TwoTorsion { p: Vec<i64>, q: Vec<i64> },
    Weierstrass { a4: Vec<i64>, a6: Vec<i64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityGrid {
    Small,
    Full,
}

impl FromStr for IdentityGrid {
    type Err = DriverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "small" => Ok(IdentityGrid::Small),
            "full" => Ok(IdentityGrid::Full),
            _ => Err(DriverError::Config(format!("identity_grid must be small or full, got {s:?}"))),
        }
    }
}

impl fmt::Display for IdentityGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdentityGrid::Small => "small",
            IdentityGrid::Full => "full",
        })
    }
}

/// Run configuration. The text form is one `key = value` per line with `#`
/// comments; polynomials are coefficient lists, lowest degree first.
///
/// | key | default |
/// |-----|---------|
/// | `q` | 5 |
/// | `two_torsion_p`, `two_torsion_q` | unset |
/// | `a4`, `a6` | unset |
/// | `scan_degree` | 2 |
/// | `max_surfaces` | 3 |
/// | `n_max` | 6 |
/// | `z_place_degree` | 2 |
/// | `z_pole_order` | 3 |
/// | `deg_bound` | n + deg N + 2 per point |
/// | `identity_grid` | full |
/// | `random_points` | 50 |
/// | `seed` | 1 |
/// | `threads` | rayon default |
/// | `precision` | 2(n + deg N + 4) per point |
/// | `adjoint_d_max` | 6 |
/// | `output` | stdout |
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub q: u32,
    pub surface: Option<SurfaceSpec>,
    pub scan_degree: usize,
    pub max_surfaces: usize,
    pub n_max: usize,
    pub z_place_degree: usize,
    pub z_pole_order: u32,
    pub deg_bound: Option<i64>,
    pub identity_grid: IdentityGrid,
    pub random_points: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Digits carried by inexact local components of random matrix points.
    pub precision: Option<i64>,
    pub adjoint_d_max: usize,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: 5,
            surface: None,
            scan_degree: 2,
            max_surfaces: 3,
            n_max: 6,
            z_place_degree: 2,
            z_pole_order: 3,
            deg_bound: None,
            identity_grid: IdentityGrid::Full,
            random_points: 50,
            seed: 1,
            threads: None,
            precision: None,
            adjoint_d_max: 6,
            output: None,
        }
    }
}

/// 2(n + deg N + 4).
pub fn default_precision(n: usize, level_degree: usize) -> i64 {
    2 * (n + level_degree + 4) as i64
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, DriverError> {
    value.parse().map_err(|_| DriverError::Config(format!("{key}: cannot parse {value:?}")))
}

/// "1, 0, 3" or "[1, 0, 3]" as coefficients low to high.
pub fn parse_coeffs(key: &str, value: &str) -> Result<Vec<i64>, DriverError> {
    let inner = value.trim().trim_start_matches('[').trim_end_matches(']');
    if inner.trim().is_empty() {
        return Err(DriverError::Config(format!("{key}: empty coefficient list")));
    }
    inner.split(',').map(|c| parse_num(key, c.trim())).collect()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, DriverError> {
        let mut cfg = RunConfig::default();
        let mut two = (None, None);
        let mut weier = (None, None);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| DriverError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "q" => cfg.q = parse_num(key, value)?,
                "two_torsion_p" => two.0 = Some(parse_coeffs(key, value)?),
                "two_torsion_q" => two.1 = Some(parse_coeffs(key, value)?),
                "a4" => weier.0 = Some(parse_coeffs(key, value)?),
                "a6" => weier.1 = Some(parse_coeffs(key, value)?),
                "scan_degree" => cfg.scan_degree = parse_num(key, value)?,
                "max_surfaces" => cfg.max_surfaces = parse_num(key, value)?,
                "n_max" => cfg.n_max = parse_num(key, value)?,
                "z_place_degree" => cfg.z_place_degree = parse_num(key, value)?,
                "z_pole_order" => cfg.z_pole_order = parse_num(key, value)?,
                "deg_bound" => cfg.deg_bound = Some(parse_num(key, value)?),
                "identity_grid" => cfg.identity_grid = value.parse()?,
                "random_points" => cfg.random_points = parse_num(key, value)?,
                "seed" => cfg.seed = parse_num(key, value)?,
                "threads" => cfg.threads = Some(parse_num(key, value)?),
                "precision" => cfg.precision = Some(parse_num(key, value)?),
                "adjoint_d_max" => cfg.adjoint_d_max = parse_num(key, value)?,
                "output" => cfg.output = Some(PathBuf::from(value)),
                _ => return Err(DriverError::Config(format!("line {}: unknown key {key:?}", lineno + 1))),
            }
        }
        cfg.surface = match (two, weier) {
            ((None, None), (None, None)) => None,
            ((Some(p), Some(q)), (None, None)) => Some(SurfaceSpec::TwoTorsion { p, q }),
            ((None, None), (Some(a4), Some(a6))) => Some(SurfaceSpec::Weierstrass { a4, a6 }),
            _ => {
                return Err(DriverError::Config(
                    "give both two_torsion_p and two_torsion_q, or both a4 and a6, but not a mix".into(),
                ))
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), DriverError> {
        if self.q < 5 || !is_prime(self.q as u64) {
            return Err(DriverError::Config(format!("q = {} must be a prime ≥ 5", self.q)));
        }
        let positive = [
            ("scan_degree", self.scan_degree),
            ("max_surfaces", self.max_surfaces),
            ("z_place_degree", self.z_place_degree),
            ("z_pole_order", self.z_pole_order as usize),
            ("adjoint_d_max", self.adjoint_d_max),
        ];
        if let Some((key, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(DriverError::Config(format!("{key} must be positive")));
        }
        if matches!(self.precision, Some(d) if d <= 0) {
            return Err(DriverError::Config("precision must be positive".into()));
        }
        if matches!(self.deg_bound, Some(d) if d <= 0) {
            return Err(DriverError::Config("deg_bound must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(DriverError::Config("threads must be positive".into()));
        }
        Ok(())
    }

    /// Local precision for a point of degree n at a level of degree deg N.
    pub fn precision_for(&self, n: usize, level_degree: usize) -> i64 {
        self.precision.unwrap_or(default_precision(n, level_degree))
    }

    pub fn poly(&self, coeffs: &[i64]) -> Poly {
        Poly::new(self.q, coeffs)
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |c: &[i64]| c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        writeln!(f, "q = {}", self.q)?;
        match &self.surface {
            Some(SurfaceSpec::TwoTorsion { p, q }) => {
                writeln!(f, "two_torsion_p = {}", list(p))?;
                writeln!(f, "two_torsion_q = {}", list(q))?;
            }
            Some(SurfaceSpec::Weierstrass { a4, a6 }) => {
                writeln!(f, "a4 = {}", list(a4))?;
                writeln!(f, "a6 = {}", list(a6))?;
            }
            None => {}
        }
        writeln!(f, "scan_degree = {}", self.scan_degree)?;
        writeln!(f, "max_surfaces = {}", self.max_surfaces)?;
        writeln!(f, "n_max = {}", self.n_max)?;
        writeln!(f, "z_place_degree = {}", self.z_place_degree)?;
        writeln!(f, "z_pole_order = {}", self.z_pole_order)?;
        if let Some(d) = self.deg_bound {
            writeln!(f, "deg_bound = {d}")?;
        }
        writeln!(f, "identity_grid = {}", self.identity_grid)?;
        writeln!(f, "random_points = {}", self.random_points)?;
        writeln!(f, "seed = {}", self.seed)?;
        if let Some(t) = self.threads {
            writeln!(f, "threads = {t}")?;
        }
        if let Some(d) = self.precision {
            writeln!(f, "precision = {d}")?;
        }
        writeln!(f, "adjoint_d_max = {}", self.adjoint_d_max)?;
        if let Some(o) = &self.output {
            writeln!(f, "output = {}", o.display())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let text = "# corpus surface\nq = 7\ntwo_torsion_p = 1\ntwo_torsion_q = [0, 0, 1]  # T^2\nn_max = 4\nidentity_grid = small\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.q, 7);
        assert_eq!(cfg.n_max, 4);
        assert_eq!(cfg.surface, Some(SurfaceSpec::TwoTorsion { p: vec![1], q: vec![0, 0, 1] }));
        assert_eq!(RunConfig::parse(&cfg.to_string()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_input() {
        for text in ["q = 4", "q = 3", "foo = 1", "q 5", "a4 = 1", "scan_degree = 0", "two_torsion_p = "] {
            assert!(matches!(RunConfig::parse(text), Err(DriverError::Config(_))), "{text}");
        }
    }
}

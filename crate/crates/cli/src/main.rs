//! Command-line front end: scans, sweeps and the verification suite, all
//! reporting JSON lines.
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use supnorm_core::bounds::bound_report;
use supnorm_core::driver::identities::height_checks;
use supnorm_core::driver::{
    curve_scan, l2_explore, prepare, prepare_with, supnorm_run, thread_count, verify_identities, z_sweep, DriverError,
    IdentityGrid, Prepared, RunConfig, ScanEntry,
};
use supnorm_core::funfield::Adele;
use supnorm_core::heights::{
    enumerate_cusps, height_profile, heights_over, AdelicMatrix, Cusp, ETuple,
};
use supnorm_core::tracefn::TraceTable;
use supnorm_core::whittaker::{linear_form_of, whittaker_value, EvalPoint};

#[derive(Parser)]
#[command(name = "supnorm", version, about = "Exact sup-norm checks for Whittaker values of elliptic newforms over F_q(T)")]
struct Cli {
    /// Configuration file of `key = value` lines
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set n_max=4`
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Trace table written by `make-table`, used instead of a scan
    #[arg(long, global = true)]
    table: Option<PathBuf>,
    /// Position of the surface in scan order for single-surface commands
    #[arg(long, default_value_t = 0, global = true)]
    surface_index: usize,
    /// Add wall-clock seconds to the reports
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List accepted surfaces with their conductors
    CurveScan,
    /// Write the trace table of one surface as JSON
    MakeTable {
        /// Largest place degree tabulated (defaults to n_max)
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Whittaker value at one point
    EvalForm {
        #[arg(long)]
        n: usize,
        /// Adele as `place:value; place:value`, or `0`
        #[arg(long, default_value = "0")]
        z: String,
    },
    /// Cusp heights in the canonical frame of a point
    Heights {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "0")]
        z: String,
        /// Report h(m, cusp, e) for every e instead of enumerating cusps
        #[arg(long)]
        cusp: Option<String>,
        /// Also run mountain, packing, invariance and volume checks
        #[arg(long)]
        suite: bool,
    },
    /// Bound chain at a point, or over the z-sweep when no z is given
    Bound {
        /// Degree; the sweep covers every n ≤ n_max when absent
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        z: Option<String>,
    },
    /// Full sweep and bound checks on every scanned surface
    Supnorm,
    /// Run the acceptance identities and inequalities
    VerifyIdentities {
        #[arg(long)]
        grid: Option<IdentityGrid>,
    },
    /// Whittaker mass against the Rankin–Selberg prediction
    L2Explore,
}

enum Outcome {
    Pass,
    Violation,
}

struct Sink(Box<dyn Write>);

impl Sink {
    fn open(path: Option<&Path>) -> Result<Sink, DriverError> {
        Ok(Sink(match path {
            Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
            None => Box::new(io::stdout().lock()),
        }))
    }

    fn line(&mut self, v: &Value) -> Result<(), DriverError> {
        writeln!(self.0, "{v}")?;
        Ok(())
    }
}

impl Drop for Sink {
    fn drop(&mut self) {
        let _ = self.0.flush();
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, DriverError> {
    let mut text = match &cli.config {
        Some(p) => fs::read_to_string(p).map_err(|e| DriverError::Config(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    for o in &cli.overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| DriverError::Config(format!("--set expects KEY=VALUE, got {o:?}")))?;
        text.push_str(&format!("\n{} = {}", k.trim(), v.trim()));
    }
    RunConfig::parse(&text)
}

fn load_table(path: &Path) -> Result<TraceTable, DriverError> {
    let text = fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| DriverError::Config(format!("{}: {e}", path.display())))?;
    Ok(TraceTable::from_json(&v)?)
}

fn entries(cli: &Cli, cfg: &RunConfig) -> Result<Vec<ScanEntry>, DriverError> {
    match &cli.table {
        Some(p) => Ok(vec![ScanEntry::from_table(&load_table(p)?)]),
        None => curve_scan(cfg),
    }
}

fn prepared_all(cli: &Cli, cfg: &RunConfig, n_max: usize) -> Result<Vec<Prepared>, DriverError> {
    if let Some(p) = &cli.table {
        let tbl = load_table(p)?;
        return Ok(vec![prepare_with(&ScanEntry::from_table(&tbl), tbl, n_max)?]);
    }
    curve_scan(cfg)?.iter().map(|e| prepare(e, n_max)).collect()
}

fn prepared_one(cli: &Cli, cfg: &RunConfig, n_max: usize) -> Result<Prepared, DriverError> {
    if let Some(p) = &cli.table {
        let tbl = load_table(p)?;
        return prepare_with(&ScanEntry::from_table(&tbl), tbl, n_max);
    }
    let all = curve_scan(cfg)?;
    let entry = all.get(cli.surface_index).ok_or_else(|| {
        DriverError::Config(format!("surface index {} out of range ({} surfaces)", cli.surface_index, all.len()))
    })?;
    prepare(entry, n_max)
}

fn point(cfg: &RunConfig, n: usize, z: &str) -> Result<EvalPoint, DriverError> {
    Ok(EvalPoint::new(n, Adele::parse(cfg.q, z)?))
}

fn stamp(mut v: Value, timings: bool, start: Instant) -> Value {
    if timings {
        v["seconds"] = json!(start.elapsed().as_secs_f64());
    }
    v
}

fn run(cli: &Cli) -> Result<Outcome, DriverError> {
    let mut cfg = load_config(cli)?;
    if let Some(n) = thread_count(&cfg)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| DriverError::Config(format!("thread pool: {e}")))?;
    }
    let mut out = Sink::open(cfg.output.as_deref())?;
    let start = Instant::now();
    let q = cfg.q as u64;
    match &cli.command {
        Command::CurveScan => {
            for e in entries(cli, &cfg)? {
                out.line(&e.to_json())?;
            }
            Ok(Outcome::Pass)
        }
        Command::MakeTable { depth } => {
            let all = entries(cli, &cfg)?;
            let entry = all.get(cli.surface_index).ok_or_else(|| {
                DriverError::Config(format!("surface index {} out of range ({} surfaces)", cli.surface_index, all.len()))
            })?;
            let tbl = TraceTable::build(&entry.surface, depth.unwrap_or(cfg.n_max).max(1))?;
            out.line(&tbl.to_json())?;
            Ok(Outcome::Pass)
        }
        Command::EvalForm { n, z } => {
            let prep = prepared_one(cli, &cfg, *n)?;
            let pt = point(&cfg, *n, z)?;
            let alpha = linear_form_of(&pt, cfg.q)?;
            let value = whittaker_value(&prep.divisors, &alpha);
            let v = json!({
                "surface": prep.entry.label(),
                "point": pt.to_string(),
                "alpha": alpha.to_string(),
                "S": value.sum.to_string(),
                "abs_S_squared": value.sum.abs_squared().to_string(),
                "magnitude": value.magnitude,
            });
            out.line(&stamp(v, cli.timings, start))?;
            Ok(Outcome::Pass)
        }
        Command::Heights { n, z, cusp, suite } => {
            let prep = prepared_one(cli, &cfg, *n)?;
            let pt = point(&cfg, *n, z)?;
            let m = AdelicMatrix::canonical(&pt, cfg.q);
            let mut v = match cusp {
                Some(c) => {
                    let c: Cusp = Cusp::parse(cfg.q, c)?;
                    let profile = height_profile(&m, &c, &prep.level)?;
                    let tuples = ETuple::all(&prep.level);
                    let hs = heights_over(&m, &c, &tuples)?;
                    let rows: Vec<Value> =
                        tuples.iter().zip(hs).map(|(e, h)| json!({"e": e.to_string(), "h": h})).collect();
                    json!({
                        "point": pt.to_string(),
                        "cusp": c.to_string(),
                        "hstar": profile.hstar,
                        "epeak": profile.epeak.to_string(),
                        "heights": rows,
                    })
                }
                None => {
                    let deg_bound = cfg.deg_bound.unwrap_or(*n as i64 + prep.level.degree() as i64 + 2);
                    let en = enumerate_cusps(&m, &prep.level, 1, deg_bound)?;
                    let cusps: Vec<Value> = en
                        .cusps
                        .iter()
                        .map(|(c, p)| json!({"cusp": c.to_string(), "hstar": p.hstar, "epeak": p.epeak.to_string()}))
                        .collect();
                    json!({
                        "point": pt.to_string(),
                        "deg_bound": deg_bound,
                        "cusps": cusps,
                        "beyond_degree": en.beyond_degree,
                    })
                }
            };
            let mut outcome = Outcome::Pass;
            if *suite {
                let rep = height_checks(&prep, &pt)?;
                if !rep.passed() {
                    outcome = Outcome::Violation;
                }
                v["suite"] = json!({"checks": rep.checks, "violations": rep.violations});
            }
            out.line(&stamp(v, cli.timings, start))?;
            Ok(outcome)
        }
        Command::Bound { n, z } => {
            let n_max = n.unwrap_or(cfg.n_max);
            let prep = prepared_one(cli, &cfg, n_max)?;
            let points: Vec<EvalPoint> = match (n, z) {
                (_, Some(z)) => vec![point(&cfg, n_max, z)?],
                (Some(n), None) => z_sweep(cfg.q, *n, cfg.z_place_degree, cfg.z_pole_order),
                (None, None) => {
                    (0..=n_max).flat_map(|n| z_sweep(cfg.q, n, cfg.z_place_degree, cfg.z_pole_order)).collect()
                }
            };
            let mut outcome = Outcome::Pass;
            for pt in &points {
                let alpha = linear_form_of(pt, cfg.q)?;
                let value = whittaker_value(&prep.divisors, &alpha);
                let rep = bound_report(&prep.level, pt, &value, cfg.deg_bound, q)?;
                if !rep.violations().is_empty() {
                    outcome = Outcome::Violation;
                }
                out.line(&rep.to_json())?;
            }
            Ok(outcome)
        }
        Command::Supnorm => {
            let mut outcome = Outcome::Pass;
            for prep in prepared_all(cli, &cfg, cfg.n_max)? {
                let summary = supnorm_run(&cfg, &prep)?;
                if !summary.passed() {
                    outcome = Outcome::Violation;
                }
                let mut v = summary.to_json();
                if cli.timings {
                    v["seconds"] = json!(summary.seconds);
                }
                out.line(&v)?;
            }
            Ok(outcome)
        }
        Command::VerifyIdentities { grid } => {
            if let Some(g) = grid {
                cfg.identity_grid = *g;
            }
            let results = verify_identities(&cfg)?;
            let mut all = true;
            for r in &results {
                all &= r.reported_only || r.passed();
                let mut v = r.to_json();
                if cli.timings {
                    v["seconds"] = json!(r.seconds);
                    v["within_time"] = json!(r.within_time());
                }
                out.line(&v)?;
            }
            out.line(&stamp(json!({"summary": "verify-identities", "passed": all}), cli.timings, start))?;
            Ok(if all { Outcome::Pass } else { Outcome::Violation })
        }
        Command::L2Explore => {
            for prep in prepared_all(cli, &cfg, cfg.n_max)? {
                let report = l2_explore(&prep, cfg.n_max, cfg.adjoint_d_max)?;
                out.line(&report.to_json())?;
            }
            Ok(Outcome::Pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Err(e) => {
            if e == DriverError::NoInstances {
                eprintln!("warning: {e}");
            } else {
                eprintln!("supnorm: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Orchestration: configuration, surface scans, sweeps and report emission.

pub mod config;
pub mod identities;
pub mod l2;
pub mod scan;
pub mod sweep;

pub use config::{IdentityGrid, RunConfig, SurfaceSpec};
pub use identities::{verify_identities, IdentityResult};
pub use l2::{l2_explore, L2Report};
pub use scan::{curve_scan, ScanEntry};
pub use sweep::{prepare, prepare_with, supnorm_run, z_sweep, Prepared, SupnormSummary};

use crate::bounds::BoundError;
use crate::ccycle::CycleError;
use crate::funfield::FieldError;
use crate::heights::HeightError;
use crate::tracefn::TraceError;

/// Environment variable read for the worker thread count when the
/// configuration does not set one.
pub const THREADS_ENV: &str = "SUPNORM_THREADS";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DriverError {
    #[error("config error: {0}")]
    Config(String),
    #[error("no-instances: the scan accepted no surface")]
    NoInstances,
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Height(#[from] HeightError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error("io: {0}")]
    Io(String),
}

impl DriverError {
    /// 2 for bad input, 3 for precision or enumeration limits.
    pub fn exit_code(&self) -> i32 {
        match self {
            DriverError::Field(FieldError::PrecisionExhausted(_))
            | DriverError::Bound(BoundError::Inconclusive { .. })
            | DriverError::Bound(BoundError::Height(HeightError::Field(FieldError::PrecisionExhausted(_))))
            | DriverError::Height(HeightError::Field(FieldError::PrecisionExhausted(_)))
            | DriverError::Trace(TraceError::BeyondDepth(..)) => 3,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for DriverError {
    fn from(e: std::io::Error) -> Self {
        DriverError::Io(e.to_string())
    }
}

/// Thread count from the configuration, then the environment.
pub fn thread_count(cfg: &RunConfig) -> Result<Option<usize>, DriverError> {
    if cfg.threads.is_some() {
        return Ok(cfg.threads);
    }
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(DriverError::Config(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))),
        },
        Err(_) => Ok(None),
    }
}

//! Trace functions of elliptic surfaces over P¹: local Frobenius data,
//! conductors, the multiplicative divisor function r̃, L-polynomials and the
//! adjoint L-value.

mod lfunc;
mod surface;
mod table;

pub use lfunc::{adjoint_l_exact, adjoint_l_value, l_polynomial, AdjointLValue, LPolynomial};
pub use surface::{count_points, count_points_direct, EllipticSurface, Reduction, ResidueRing};
pub use table::{conductor, r_value, DivisorTable, LocalFactor, TraceTable};

use crate::exactalg::ExactError;
use crate::funfield::FieldError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("characteristic {0} unsupported: short Weierstrass models need p >= 5")]
    SmallCharacteristic(u32),
    #[error("singular-generic-fiber")]
    SingularGenericFiber,
    #[error("isotrivial: j-invariant is constant")]
    Isotrivial,
    #[error("non-squarefree-conductor: additive reduction at {0}")]
    NonSquarefreeConductor(String),
    #[error("non-minimal-model at {0}")]
    NonMinimalModel(String),
    #[error("non-rational-singularity at {0}")]
    NonRationalSingularity(String),
    #[error("level-too-small: deg N = {0}")]
    LevelTooSmall(i64),
    #[error("l-degree-violation: {0}")]
    LDegreeViolation(String),
    #[error("weil-bound-violation at {0}")]
    WeilViolation(String),
    #[error("negative-multiplicity")]
    NegativeMultiplicity,
    #[error("place {0} lies beyond the tabulated depth {1}")]
    BeyondDepth(String, usize),
    #[error("integer overflow in divisor table")]
    Overflow,
    #[error("table format: {0}")]
    Format(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

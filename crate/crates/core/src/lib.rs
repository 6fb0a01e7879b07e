//! Exact computation of Whittaker values, heights and explicit bounds for
//! rank-two trace functions on the projective line over a finite field.

pub mod exactalg;
pub mod funfield;
pub mod tracefn;
pub mod whittaker;
pub mod ccycle;
pub mod heights;
pub mod bounds;
pub mod driver;

//! Numeric substrate: real and complex scalars, multiprecision support and
//! the coefficient rings used by q-series.

pub mod coeff;
pub mod cx;
pub mod mp;
pub mod real;

pub use coeff::{rat, Angle, Coeff, QQi};
pub use cx::{Cx, C64};
pub use mp::{with_prec, MpReal};
pub use real::Real;

/// Multiprecision complex.
pub type MpC = Cx<MpReal>;

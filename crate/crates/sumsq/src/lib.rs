//! Exact power-series algebra for surface germs `z^2 - F(x, y)` over the
//! rationals: Weierstrass preparation, finite determinacy certificates,
//! formal-flow coordinate changes, normal-form classification and
//! sum-of-squares certificates.
//!
//! The algebraic core is generic over a coefficient [`Field`]; decision
//! procedures that need an ordered exact field are specialised to
//! [`Rational`].

pub mod classify;
pub mod determinacy;
pub mod error;
pub mod expr;
pub mod flow;
pub mod linalg;
pub mod psd;
pub mod scalar;
pub mod series;
pub mod upoly;
pub mod weierstrass;

pub use error::{Error, Result};
pub use scalar::Field;
pub use series::{vars, OrderResult, TruncatedSeries, Vars};

pub type Rational = num_rational::BigRational;
pub type Series = TruncatedSeries<Rational>;

//! Numeric oracles for the concrete mapping families.

pub mod backend;
pub mod period;
pub mod recursion;
pub mod residual;
pub mod sampling;
pub mod weierstrass;

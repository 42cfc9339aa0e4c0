//! Gauges, Birkhoff and isosceles orthogonality, and best approximation in
//! generalized (asymmetric) Minkowski spaces.

pub mod approximation;
pub mod error;
pub mod format;
pub mod gauge;
pub mod geometry;
pub mod lp;
pub mod oracle;
pub mod orthogonality;
pub mod search;
pub mod vector;

pub use error::{Error, Result};
pub use gauge::{Gauge, GaugeSpec, SubdifferentialOracle, Tolerances};

pub mod error;
pub mod quad;
pub mod rational;
pub mod real;

pub use error::{Error, Result};
pub use real::{DoubleDouble, Real, DD};

/// Exact scalar used by every certified computation.
pub type Rational = num_rational::BigRational;
pub mod admissible;
pub mod bounds;
pub mod cutoff3d;
pub mod pipeline;
pub mod primes;
pub mod symmpoly;
pub mod varprob;

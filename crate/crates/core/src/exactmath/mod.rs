//! Exact scalar and polynomial arithmetic over the rationals.

pub mod factor;
pub mod gaussian;
pub mod modp;
pub mod poly;
pub mod rational;
pub mod resultant;
pub mod sturm;
pub mod zpoly;

pub use factor::{factor_rationals, squarefree_decompose, squarefree_part, Factor, FactoredPoly};
pub use gaussian::GaussianRational;
pub use poly::RationalPoly;
pub use rational::Rational;
pub use resultant::{discriminant, poly_gcd, resultant};
pub use sturm::{count_real_roots, isolate_real_roots, RootInterval};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("zero polynomial passed to {0}")]
    ZeroPolynomial(&'static str),
    #[error("{0} needs a polynomial of positive degree")]
    ConstantPolynomial(&'static str),
    #[error("polynomial division is not exact")]
    NotDivisible,
    #[error("{what} limited to {limit}, got {got}")]
    Capacity { what: &'static str, limit: usize, got: usize },
}

//! Exact arithmetic substrate.

mod expr;
pub mod factor;
mod gaussian;
mod poly;
mod quadratic;
mod ratfunc;
mod rational;
mod roots;

pub use expr::{parse_gaussian, parse_rational_function};
pub use gaussian::GaussianRational;
pub use poly::Poly;
pub use quadratic::QuadraticElement;
pub use ratfunc::RationalFunction;
pub(crate) use rational::int_valuation;
pub use rational::{padic_valuation, parse_rational, rational_to_string, Rational, Valuation};
pub use roots::{roots, ComplexRoot};

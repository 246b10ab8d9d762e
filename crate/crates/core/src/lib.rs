//! Adelic curves at desk scale.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: exact rationals, Gaussian rationals, polynomials, rational
//!   functions, p-adic valuations and root localisation.
//! * [`pav`]: places and their (pseudo-)absolute values, including the
//!   splitting of rational places in quadratic fields.
//! * [`curve`]: adelic curves as measure spaces of places, with defects
//!   (product formula / Jensen formula) and the radius family of discs.
//! * [`bundle`]: pseudo-norm families (diagonal and lattice-hermitian),
//!   their algebra and Arakelov degrees.
//! * [`hn`]: slopes and Harder–Narasimhan flags.
//! * [`heights`]: heights of points and the Nevanlinna functions.

pub mod arith;
pub mod bundle;
pub mod curve;
mod error;
pub mod heights;
pub mod hn;
pub mod linalg;
pub mod numeric;
pub mod pav;

pub use error::{Error, Result};

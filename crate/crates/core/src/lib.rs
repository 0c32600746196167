//! Classical, free and Boolean max-convolution powers, the von Mises
//! functionals that control their convergence, and a certified
//! Kolmogorov-distance engine for measuring rates toward the limit laws.

pub mod cli;
pub mod distributions;
mod error;
pub mod ratelab;
pub mod scaling;
pub mod semigroup;
mod solve;
pub mod stable;
pub mod vonmises;

pub use distributions::{Cdf, EvFamily, GridCdf, Kind, Scaled};
pub use error::{Error, Result};

//! Class groups of imaginary quadratic orders, kernels along towers of orders, the class-group
//! criterion for primes at which a given isogeny volcano occurs, and the graph-side check over
//! finite fields.

pub mod arith;
pub mod config;
pub mod error;
pub mod group;
pub mod heuristics;
pub mod isogeny;
pub mod ordertower;
pub mod primesearch;
pub mod quadforms;
pub mod solvability;

pub use error::{Error, Result};

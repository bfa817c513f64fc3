//! Ordinary ell-isogeny graphs over finite fields and their volcano components.

pub mod field;
pub mod graph;
pub mod modpoly;
pub mod poly;

pub use field::{Elem, FieldCtx, ZERO};
pub use graph::{
    build_graph, classify, components, contains_volcano, count_points, is_supersingular,
    is_supersingular_naive, Adjacency, ComponentReport, IsogenyGraph, VolcanoClassification,
};
pub use modpoly::{modular_polynomial, ModularPolynomial};

use crate::config::Caps;
use crate::error::Result;

/// F_{p^k} under the configured size cap.
pub fn build_field(p: u64, k: u32, caps: &Caps) -> Result<FieldCtx> {
    FieldCtx::new(p, k, caps.field)
}

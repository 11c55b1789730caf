//! Discrete approximations of l-level Sierpinski gaskets (any dimension d >= 2)
//! and of two- and three-dimensional Vicsek sets.
//!
//! The building blocks are:
//!
//! - [`GasketSpec`]: which family, dimension, subdivision side and approximation
//!   level to construct;
//! - [`CellWord`]: self-similar cell addresses (sequences of subdivision letters);
//! - [`BaryVertex`]: exact integer coordinates for vertices (barycentric for the
//!   gasket families, Cartesian for the Vicsek families);
//! - [`ApproxGraph`]: the deduplicated conductance graph of a finest-level
//!   approximation, together with boundary vertices and cell membership.
//!
//! All geometry is exact integer arithmetic; floating point only enters through
//! the optional Euclidean embedding ([`ApproxGraph::euclidean_positions`]).

mod cells;
mod embed;
mod graph;
mod serialize;
mod spec;

pub use cells::{cell_corners, count_cells, enumerate_cells, BaryVertex, CellWord};
pub use embed::{barycentric_to_euclidean, simplex_corners};
pub use graph::{build_graph, lattice_graph, ApproxGraph, Edge};
pub use spec::{ConductanceScheme, Family, GasketSpec, DEFAULT_VERTEX_GUARD};

use thiserror::Error;

/// Errors produced while validating specs or constructing graphs.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("arithmetic overflow computing {0}")]
    ArithmeticOverflow(String),
    #[error("memory guard exceeded: {actual} vertices/cells requested, guard is {guard}")]
    MemoryGuard { actual: u128, guard: u128 },
    #[error("malformed cell word: {0}")]
    MalformedWord(String),
    #[error("conductance must be positive, got {0}")]
    NonPositiveConductance(f64),
    #[error("conductance scheme {scheme} does not apply to family {family}")]
    SchemeMismatch { scheme: String, family: String },
}

pub type Result<T> = std::result::Result<T, GeometryError>;

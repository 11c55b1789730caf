//! Exact computations for discrete random walks on approximation graphs:
//! hitting-time moments and harmonic measures, boundary symmetry identities,
//! crossing-time statistics, exit-time profiles, Poincare constants of vertex
//! regions, and exact n-step distribution evolution.
//!
//! Everything here reduces to grounded Laplacian solves or small symmetric
//! eigenproblems; Monte Carlo lives elsewhere and is cross-validated against
//! these solvers.

mod evolve;
mod exit;
mod hitting;
mod model;
mod poincare;

pub use evolve::evolve;
pub use exit::{ball_region, exit_time_profile, ExitRow, ExitScaling};
pub use hitting::{
    boundary_identity_check, crossing_time_stats, hitting_moments, BoundaryIdentityReport,
    CrossingStats, HittingReport,
};
pub use model::{MassVector, WalkKind, WalkModel};
pub use poincare::poincare_constant;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("target set is empty or unreachable from the start vertex")]
    UnreachableTarget,
    #[error("region is disconnected")]
    DisconnectedRegion,
    #[error("ball contains every vertex; exit time is infinite")]
    InfiniteExitTime,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error(transparent)]
    Net(#[from] network_resistance::NetError),
    #[error(transparent)]
    Geometry(#[from] gasket_geometry::GeometryError),
}

pub type Result<T> = std::result::Result<T, ChainError>;

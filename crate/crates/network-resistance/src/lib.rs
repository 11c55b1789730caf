//! Electrical-network computations on fractal approximation graphs: effective
//! resistance, Schur-complement traces onto vertex subsets, resistance
//! renormalization factors, scaling exponent tables, the crossover scale
//! function, and Vicsek renormalization fixed points.
//!
//! Two arithmetic paths coexist on purpose. The working path solves grounded
//! Laplacian systems in f64 (dense Cholesky for small node counts, Jacobi
//! preconditioned conjugate gradients above). The exact path
//! ([`exact`]) eliminates interior nodes of small networks with big-rational
//! star-mesh transforms; it backs golden values and cross-checks, and shares
//! no code with the f64 path.

pub mod cache;
pub mod exact;
mod exponents;
mod network;
mod renorm;
mod resistance;
pub mod solve;
mod vicsek;

pub use cache::{CacheEntry, RhoCache};
pub use exponents::{exponents, ExponentTable, ScaleFunction};
pub use network::ResistorNetwork;
pub use renorm::{
    corner_resistance, decimation_check, resistance_diameter, rho, rho_exact, rho_lower_bound,
    rho_via_trace, DiameterReport, RhoLowerBound,
};
pub use resistance::{all_pairs_resistance, effective_resistance, schur_trace};
pub use vicsek::{
    cube_corner_resistance, cube_network, eta, vicsek_fixed_point, vicsek_rho_check,
    vs3d_liminf_constant, vs3d_rho_liminf, VicsekFixedPoint,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("nodes {0} and {1} lie in different connected components")]
    DisconnectedPair(usize, usize),
    #[error("interior component without a boundary link; trace is singular")]
    SingularInterior,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error(
        "fixed-point iteration did not converge: residual {residual:.3e} after {iterations} iterations (last iterate {last:?})"
    )]
    NonConvergence {
        residual: f64,
        iterations: u32,
        last: Vec<f64>,
    },
    #[error("symmetry-orbit spread {spread:.3e} exceeds tolerance; traced network is asymmetric")]
    OrbitAsymmetry { spread: f64 },
    #[error("cached value {cached} disagrees with recomputed {computed} for {key}")]
    CacheMismatch {
        key: String,
        cached: f64,
        computed: f64,
    },
    #[error(transparent)]
    Geometry(#[from] gasket_geometry::GeometryError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NetError>;

//! Stochastic laboratory: seeded Monte Carlo walks cross-validated against the
//! exact solvers, hitting-time concentration experiments, probe-based
//! heat-kernel estimates, dense-lattice reference kernels, and the kernel
//! comparison, on-diagonal and Holder-modulus diagnostics.
//!
//! Determinism contract: the sample budget is split into fixed-size batches;
//! batch `w` draws from a ChaCha stream seeded with `seed + w`, and partial
//! results merge in batch order. Outputs therefore depend only on the seed,
//! never on thread count or scheduling.

mod concentration;
mod diag;
mod kernels;
mod probes;
mod sampler;

pub use concentration::{t1_concentration, T1ConcentrationReport};
pub use diag::{holder_modulus, ondiag_check, HolderReport, OndiagReport};
pub use kernels::{
    compare_kernels, compare_kernels_from, kernel_estimate, kernel_steps, nearest_vertex,
    reference_kernel, CompareReport, CompareRow, KernelContext, KernelEstimate, KernelMode,
};
pub use kernels::{default_reference_side, reference_steps};
pub use probes::{probe_cell_masses, Probe, ProbeMembership, ProbeSet};
pub use sampler::{endpoint_distribution, sample_paths, EndpointReport, PathStatistics, SimConfig};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("time {t} is below temporal resolution: it maps to zero steps")]
    BelowResolution { t: f64 },
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error(transparent)]
    Chain(#[from] chain_solver::ChainError),
    #[error(transparent)]
    Net(#[from] network_resistance::NetError),
    #[error(transparent)]
    Geometry(#[from] gasket_geometry::GeometryError),
}

pub type Result<T> = std::result::Result<T, LabError>;

//! Monte Carlo toolkit for imitative-learning search on NK fitness
//! landscapes.
//!
//! A group of agents searches the configuration space of an NK landscape
//! for its global maximum. Each agent repeatedly either flips a random bit
//! of its current string or imitates its fittest neighbor on a fixed
//! communication network by copying one bit where the two strings differ.
//! The crate provides:
//!
//! - [`landscape`]: NK landscape generation and analysis (fitness, local
//!   maxima, neighbor-fitness correlation);
//! - [`topology`]: communication networks (rings, complete graphs, chains,
//!   stars, preferential-attachment trees, small-world graphs, community
//!   graphs) with shared validity invariants;
//! - [`dynamics`]: the per-trial update loop and halting logic;
//! - [`baseline`]: the analytical cost of independent (non-imitative)
//!   search via the second-largest eigenvalue of its transition matrix;
//! - [`harness`]: replica ensembles, parameter sweeps, CSV output, and
//!   power-law fits;
//! - [`rng`]: seed derivation that keeps every replica on a private,
//!   reproducible random stream.
//!
//! Numerical routines are generic over the floating-point [`Scalar`];
//! the `*64` / `*32` aliases below pin the two supported precisions.
//! Simulations are deterministic given their seeds, independent of worker
//! thread count.

pub mod baseline;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod landscape;
pub mod rng;
pub mod scalar;
pub mod topology;

pub use baseline::{build_matrix, independent_cost, second_largest_eigenvalue, TransitionMatrix};
pub use dynamics::{
    run, run_tracking_winner_degree, ModelView, SearchConfig, SearchOutcome, UpdateOrder,
};
pub use error::{Error, Result};
pub use harness::{
    csv_string, fit_power_law, run_ensemble, sweep, EnsembleReport, ExperimentPoint,
    ExperimentSpec, TopologySpec, CSV_HEADER,
};
pub use landscape::{neighbor_fitness_correlation, BitString, Landscape};
pub use rng::{derive_seed, replica_seed, rng_from_seed};
pub use scalar::Scalar;
pub use topology::{Topology, TopologyKind};

/// Double-precision landscape (the default choice).
pub type Landscape64 = landscape::Landscape<f64>;
/// Single-precision landscape for memory-bound parameter scans.
pub type Landscape32 = landscape::Landscape<f32>;
/// Double-precision independent-search transition matrix.
pub type TransitionMatrix64 = baseline::TransitionMatrix<f64>;
/// Single-precision independent-search transition matrix.
pub type TransitionMatrix32 = baseline::TransitionMatrix<f32>;

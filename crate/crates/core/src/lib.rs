//! Guaranteed over-approximation of the reachable sets of feed-forward
//! neural networks and of NARMA neural models, with safety verification
//! against half-space specifications and a Monte Carlo soundness oracle.
//!
//! The pipeline: partition a box-shaped input set into a uniform grid
//! ([`interval`]), push each cell through the network one layer at a time
//! with exact per-neuron interval bounds ([`reach`]), iterate that estimate
//! over a time horizon for NARMA models ([`narma`]), and check every
//! resulting box against a conjunction of half-spaces ([`safety`]).
//! [`simulate`] draws seeded random trajectories to cross-check soundness.
//!
//! All set arithmetic is plain 64-bit floating point with round-to-nearest;
//! there is no outward rounding. Callers who want a cushion against the
//! (tiny) rounding of the bound formulas can set a widen epsilon in
//! [`reach::ReachConfig`], which pads every computed bound outward.

pub mod fixtures;
pub mod interval;
pub mod narma;
pub mod network;
pub mod reach;
pub mod safety;
pub mod simulate;

pub use interval::{hull, make_partition, CellBox, Interval, Partition};
pub use narma::{reach_interval_union, reach_narma, ReachTube, StepSet};
pub use network::{
    load_narma, load_network, load_scenario, save_narma, save_network, ActivationKind, Layer,
    NarmaModel, Network, Scenario, StepMode,
};
pub use reach::{layer_bound, reach_mlp, MlpReachResult, ReachConfig};
pub use safety::{
    box_satisfies, point_satisfies, verify_narma, verify_tube, HalfSpace, SafetySpec, Verdict,
};
pub use simulate::{
    check_containment, sample_trajectories, ContainmentReport, SplitMix64, Trajectory, Violation,
};

/// Errors shared across the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad caller input: dimension mismatches, zero counts, malformed values.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A partition would exceed the configured cell budget.
    #[error("cell budget exceeded: {cells} cells requested, budget is {budget}")]
    CellBudget { cells: u128, budget: u64 },

    /// A model or scenario file failed to parse or validate.
    #[error("cannot parse {path}: {detail}")]
    Parse { path: String, detail: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

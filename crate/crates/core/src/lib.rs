//! Core algorithms for comparing community structure across the snapshots of
//! a temporal network whose node set changes over time.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, ingestion,
//! parallel drivers and the command line live in the `tcomm` crate.
//!
//! * [`temporal`]: event streams and half-open snapshot windows
//! * [`community`]: partitions, modularity and the per-snapshot statistics
//! * [`louvain`]: classic multilevel Louvain
//! * [`null_model`]: double-edge-swap rewiring and modularity Z-scores
//! * [`similarity`]: NMI, Union-NMI and Intersection-NMI
//! * [`synthetic`]: the node-pool churn/flip model
#![no_std]

extern crate alloc;

pub mod community;
mod error;
pub mod louvain;
pub mod null_model;
pub mod similarity;
pub mod synthetic;
pub mod temporal;

pub use community::{edge_node_ratio, lcc_proportion, modularity, Partition, SnapshotStats};
pub use error::{Error, Result};
pub use louvain::{louvain, CommunityDetector, Louvain};
pub use null_model::{
    degree_preserving_rewire, modularity_zscore, null_sample, sample_seed, ZScoreReport,
    DEFAULT_SAMPLES, DEFAULT_SWAP_FACTOR,
};
pub use similarity::{
    augment_union, check_matrix_input, inmi, nmi, pairwise_matrix, partition_index, unmi,
    AugmentedPair, ContingencyTable, Measure, SimilarityMatrix, UnknownMeasure,
};
pub use synthetic::{synth_init, synth_run, synth_step, SynthConfig, SynthRun, SynthState};
pub use temporal::{
    NodeId, Snapshot, TemporalEvent, TemporalGraph, TemporalGraphBuilder, Timestamp,
};

/// Seeded generator used by every randomized routine in the crate.
pub type Rng = rand_chacha::ChaCha8Rng;

pub(crate) fn rng_from_seed(seed: u64) -> Rng {
    <Rng as rand::SeedableRng>::seed_from_u64(seed)
}

//! Rayon-backed variants of the per-window, per-pair and per-sample loops.
//!
//! Every work unit is seeded independently and results are collected in
//! index order, so the output does not depend on the worker count.

use rayon::prelude::*;
use rayon::ThreadPool;
use tcomm_core::{
    check_matrix_input, modularity, null_sample, partition_index, CommunityDetector,
    Error as CoreError, Measure, Partition, SimilarityMatrix, Snapshot, ZScoreReport,
};

use crate::error::{Error, Result};

/// Thread pool with `workers` threads; `None` or 0 uses every core.
pub fn pool(workers: Option<usize>) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Invalid(format!("cannot start worker pool: {e}")))
}

/// Same result as `tcomm_core::pairwise_matrix`, computed in parallel.
pub fn par_pairwise_matrix(
    pool: &ThreadPool,
    partitions: &[Partition],
    measure: Measure,
) -> Result<SimilarityMatrix> {
    check_matrix_input(partitions, measure)?;
    let n = partitions.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let upper: Vec<f64> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(i, j)| measure.entry(&partitions[i], &partitions[j]))
            .collect::<Result<Vec<_>, CoreError>>()
    })?;
    let mut values = vec![0.0; n * n];
    for (&(i, j), v) in pairs.iter().zip(upper) {
        values[i * n + j] = v;
        values[j * n + i] = v;
    }
    Ok(SimilarityMatrix::from_values(
        measure,
        partition_index(partitions),
        values,
    ))
}

/// Same result as `tcomm_core::modularity_zscore`, with the null samples
/// drawn in parallel.
pub fn par_modularity_zscore<D: CommunityDetector + Sync>(
    pool: &ThreadPool,
    s: &Snapshot,
    sample_count: usize,
    seed: u64,
    swap_factor: usize,
    detector: &D,
) -> Result<ZScoreReport> {
    if sample_count < 2 {
        return Err(CoreError::TooFewSamples(sample_count).into());
    }
    if s.edge_count() < 2 {
        return Err(CoreError::CannotRewire(s.edge_count()).into());
    }
    let observed = detector.detect(s, seed)?;
    let q_observed = modularity(s, &observed, detector.resolution())?;
    let samples = pool.install(|| {
        (0..sample_count)
            .into_par_iter()
            .map(|k| null_sample(s, seed, k, swap_factor, detector))
            .collect::<Result<Vec<f64>, CoreError>>()
    })?;
    Ok(ZScoreReport::from_samples(s, q_observed, samples)?)
}

/// Detects communities on every snapshot, snapshot `i` seeded with `seed ^ i`.
pub fn par_detect<D: CommunityDetector + Sync>(
    pool: &ThreadPool,
    snapshots: &[&Snapshot],
    seeds: &[u64],
    detector: &D,
) -> Result<Vec<Partition>> {
    assert_eq!(snapshots.len(), seeds.len());
    Ok(pool.install(|| {
        snapshots
            .par_iter()
            .zip(seeds.par_iter())
            .map(|(s, &seed)| detector.detect(s, seed))
            .collect::<Result<Vec<_>, CoreError>>()
    })?)
}

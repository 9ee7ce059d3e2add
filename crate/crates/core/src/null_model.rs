//! Configuration-model null ensembles and the modularity Z-score.
//!
//! Null graphs are drawn with a double-edge-swap chain, which keeps every
//! degree exactly and never creates loops or parallel edges. Sample `k` of an
//! ensemble is seeded with `seed ^ k`, so samples can be produced in any
//! order (or in parallel) and still assemble into the same report.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::community::modularity;
use crate::error::{Error, Result};
use crate::louvain::CommunityDetector;
use crate::temporal::{NodeId, Snapshot};

pub const DEFAULT_SWAP_FACTOR: usize = 10;
pub const DEFAULT_SAMPLES: usize = 100;

/// Randomizes `s` with `swap_factor * |E|` attempted double-edge swaps.
///
/// A swap picks two distinct edges `{a, b}`, `{c, d}` and rewires them to
/// `{a, d}`, `{c, b}` or `{a, c}`, `{b, d}` (chosen uniformly); it is
/// rejected when it would create a self-loop or an edge that already exists.
pub fn degree_preserving_rewire(s: &Snapshot, seed: u64, swap_factor: usize) -> Result<Snapshot> {
    let m = s.edge_count();
    if m < 2 {
        return Err(Error::CannotRewire(m));
    }
    let mut rng = crate::rng_from_seed(seed);
    let mut edges: Vec<(NodeId, NodeId)> = s.edges().to_vec();
    let mut present: BTreeSet<(NodeId, NodeId)> = edges.iter().copied().collect();
    let ordered = |x: NodeId, y: NodeId| if x < y { (x, y) } else { (y, x) };

    for _ in 0..swap_factor.saturating_mul(m) {
        let i = rng.gen_range(0..m);
        let j = rng.gen_range(0..m - 1);
        let j = if j >= i { j + 1 } else { j };
        let (a, b) = edges[i];
        let (c, d) = edges[j];
        let (e1, e2) = if rng.gen_bool(0.5) {
            ((a, d), (c, b))
        } else {
            ((a, c), (b, d))
        };
        if e1.0 == e1.1 || e2.0 == e2.1 {
            continue;
        }
        let (e1, e2) = (ordered(e1.0, e1.1), ordered(e2.0, e2.1));
        if e1 == e2 || present.contains(&e1) || present.contains(&e2) {
            continue;
        }
        present.remove(&edges[i]);
        present.remove(&edges[j]);
        present.insert(e1);
        present.insert(e2);
        edges[i] = e1;
        edges[j] = e2;
    }
    Ok(s.with_edges(edges))
}

/// Seed of null sample `k`.
#[inline]
pub fn sample_seed(seed: u64, k: usize) -> u64 {
    seed ^ k as u64
}

/// Modularity found by `detector` on null sample `k`.
pub fn null_sample<D: CommunityDetector + ?Sized>(
    s: &Snapshot,
    seed: u64,
    k: usize,
    swap_factor: usize,
    detector: &D,
) -> Result<f64> {
    let seed = sample_seed(seed, k);
    let rewired = degree_preserving_rewire(s, seed, swap_factor)?;
    let p = detector.detect(&rewired, seed)?;
    modularity(&rewired, &p, detector.resolution())
}

/// Observed modularity against a configuration-model ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct ZScoreReport {
    pub window_start: i64,
    pub window_end: i64,
    pub q_observed: f64,
    pub null_mean: f64,
    /// Sample standard deviation (divisor `M - 1`).
    pub null_std: f64,
    /// `None` when the null ensemble has zero spread.
    pub z: Option<f64>,
    pub samples: Vec<f64>,
}

impl ZScoreReport {
    /// Assembles a report from the observed modularity and the per-sample
    /// null modularities (in sample order).
    pub fn from_samples(s: &Snapshot, q_observed: f64, samples: Vec<f64>) -> Result<Self> {
        let m = samples.len();
        if m < 2 {
            return Err(Error::TooFewSamples(m));
        }
        let null_mean = samples.iter().sum::<f64>() / m as f64;
        let var = samples
            .iter()
            .map(|q| (q - null_mean) * (q - null_mean))
            .sum::<f64>()
            / (m - 1) as f64;
        let null_std = libm::sqrt(var);
        let z = (null_std > 0.0).then(|| (q_observed - null_mean) / null_std);
        Ok(Self {
            window_start: s.window_start,
            window_end: s.window_end,
            q_observed,
            null_mean,
            null_std,
            z,
            samples,
        })
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    pub fn z_defined(&self) -> bool {
        self.z.is_some()
    }
}

/// Detects communities on `s` and on `sample_count` rewired copies, and
/// compares the observed modularity with the null distribution.
pub fn modularity_zscore<D: CommunityDetector + ?Sized>(
    s: &Snapshot,
    sample_count: usize,
    seed: u64,
    swap_factor: usize,
    detector: &D,
) -> Result<ZScoreReport> {
    if sample_count < 2 {
        return Err(Error::TooFewSamples(sample_count));
    }
    if s.edge_count() < 2 {
        return Err(Error::CannotRewire(s.edge_count()));
    }
    let observed = detector.detect(s, seed)?;
    let q_observed = modularity(s, &observed, detector.resolution())?;
    let samples = (0..sample_count)
        .map(|k| null_sample(s, seed, k, swap_factor, detector))
        .collect::<Result<Vec<f64>>>()?;
    ZScoreReport::from_samples(s, q_observed, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::Partition;
    use crate::louvain::Louvain;
    use alloc::vec;

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    fn graph(pairs: &[(u32, u32)]) -> Snapshot {
        Snapshot::from_edges([], pairs.iter().map(|&(a, b)| (n(a), n(b))))
    }

    fn assert_same_degrees(a: &Snapshot, b: &Snapshot) {
        assert_eq!(a.nodes(), b.nodes());
        assert_eq!(a.degrees(), b.degrees());
        assert!(b.edges().iter().all(|&(u, v)| u < v));
        assert!(b.edges().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn path_is_rigid() {
        let s = graph(&[(0, 1), (1, 2)]);
        for seed in 0..10 {
            let r = degree_preserving_rewire(&s, seed, 10).unwrap();
            assert_eq!(r.degrees(), vec![1, 2, 1]);
            assert_eq!(r, s);
        }
    }

    #[test]
    fn cycle_and_triangles_keep_degrees() {
        let cycle = graph(&[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let tris = graph(&[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        for seed in 0..20 {
            let r = degree_preserving_rewire(&cycle, seed, 10).unwrap();
            assert_eq!(r.degrees(), vec![2; 4]);
            assert_same_degrees(&cycle, &r);
            let r = degree_preserving_rewire(&tris, seed, 10).unwrap();
            assert_eq!(r.degrees(), vec![2; 6]);
            assert_same_degrees(&tris, &r);
        }
    }

    #[test]
    fn rewiring_actually_mixes() {
        // two disjoint 4-cycles can become one 8-cycle
        let s = graph(&[
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 0),
            (4, 5),
            (5, 6),
            (6, 7),
            (7, 4),
        ]);
        let changed = (0..20)
            .filter(|&seed| degree_preserving_rewire(&s, seed, 10).unwrap() != s)
            .count();
        assert!(changed > 10);
    }

    #[test]
    fn too_few_edges() {
        assert_eq!(
            degree_preserving_rewire(&graph(&[(0, 1)]), 0, 10),
            Err(Error::CannotRewire(1))
        );
    }

    #[test]
    fn isolated_nodes_survive_rewiring() {
        let s = Snapshot::from_edges([n(9)], [(n(0), n(1)), (n(2), n(3))]);
        let r = degree_preserving_rewire(&s, 3, 10).unwrap();
        assert_same_degrees(&s, &r);
    }

    #[test]
    fn report_statistics_use_sample_divisor() {
        let s = graph(&[(0, 1), (1, 2)]);
        let r = ZScoreReport::from_samples(&s, 1.0, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.null_mean, 1.5);
        // sum of squares 5, divided by M - 1 = 3
        assert!((r.null_std - libm::sqrt(5.0 / 3.0)).abs() < 1e-15);
        assert!((r.z.unwrap() - (-0.5 / libm::sqrt(5.0 / 3.0))).abs() < 1e-15);
    }

    #[test]
    fn zero_spread_leaves_z_undefined() {
        struct OneCommunity;
        impl CommunityDetector for OneCommunity {
            fn detect(&self, s: &Snapshot, _: u64) -> Result<Partition> {
                Ok(Partition::from_iter(s.nodes().iter().map(|&v| (v, 0))))
            }
        }
        let s = graph(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let r = modularity_zscore(&s, 10, 1, DEFAULT_SWAP_FACTOR, &OneCommunity).unwrap();
        assert_eq!(r.q_observed, 0.0);
        assert!(r.samples.iter().all(|&q| q == 0.0));
        assert_eq!(r.null_std, 0.0);
        assert!(!r.z_defined());
    }

    #[test]
    fn zscore_is_deterministic() {
        let s = graph(&[
            (0, 1),
            (1, 2),
            (0, 2),
            (3, 4),
            (4, 5),
            (3, 5),
            (2, 3),
            (5, 6),
            (6, 7),
            (7, 5),
        ]);
        let a = modularity_zscore(&s, 20, 9, DEFAULT_SWAP_FACTOR, &Louvain::default()).unwrap();
        let b = modularity_zscore(&s, 20, 9, DEFAULT_SWAP_FACTOR, &Louvain::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sample_count(), 20);
    }

    #[test]
    fn zscore_preconditions() {
        let s = graph(&[(0, 1), (1, 2)]);
        assert_eq!(
            modularity_zscore(&s, 1, 0, 10, &Louvain::default()),
            Err(Error::TooFewSamples(1))
        );
        assert_eq!(
            modularity_zscore(&graph(&[(0, 1)]), 5, 0, 10, &Louvain::default()),
            Err(Error::CannotRewire(1))
        );
    }
}

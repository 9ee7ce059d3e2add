//! Classic multilevel Louvain modularity maximization.
//!
//! Each level repeatedly sweeps the nodes in a seeded random order and moves
//! every node to the neighbouring community with the largest modularity
//! gain, until a full sweep moves nothing. Communities are then collapsed
//! into super-nodes and the procedure restarts on the aggregated graph. The
//! algorithm stops at the first level that makes no move.
//!
//! Ties between equally good target communities go to the smallest
//! community id; a node only leaves its current community for a strictly
//! better one.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::temporal::Snapshot;

/// Gains closer than this are considered equal.
const GAIN_EPS: f64 = 1e-10;

/// Anything that assigns communities to the nodes of a snapshot.
pub trait CommunityDetector {
    fn detect(&self, s: &Snapshot, seed: u64) -> Result<Partition>;

    /// Resolution used when scoring the detected partitions.
    fn resolution(&self) -> f64 {
        1.0
    }
}

/// Louvain with a fixed resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Louvain {
    pub resolution: f64,
}

impl Default for Louvain {
    fn default() -> Self {
        Self { resolution: 1.0 }
    }
}

impl Louvain {
    pub fn new(resolution: f64) -> Self {
        Self { resolution }
    }
}

impl CommunityDetector for Louvain {
    fn detect(&self, s: &Snapshot, seed: u64) -> Result<Partition> {
        louvain(s, self.resolution, seed)
    }

    fn resolution(&self) -> f64 {
        self.resolution
    }
}

impl<T: CommunityDetector + ?Sized> CommunityDetector for &T {
    fn detect(&self, s: &Snapshot, seed: u64) -> Result<Partition> {
        (**self).detect(s, seed)
    }

    fn resolution(&self) -> f64 {
        (**self).resolution()
    }
}

/// Runs Louvain on `s` and returns the canonical partition of its nodes.
/// Isolated nodes end up in singleton communities.
pub fn louvain(s: &Snapshot, resolution: f64, seed: u64) -> Result<Partition> {
    if s.is_empty() {
        return Err(Error::EmptySnapshot);
    }
    let mut graph = WeightedGraph::from_snapshot(s);
    // community of every original node
    let mut membership: Vec<usize> = (0..s.node_count()).collect();
    let mut rng = crate::rng_from_seed(seed);

    if graph.two_m > 0.0 {
        loop {
            let mut order: Vec<usize> = (0..graph.len()).collect();
            order.shuffle(&mut rng);
            let Some(level) = graph.one_level(&order, resolution) else {
                break;
            };
            let (compact, count) = renumber(&level);
            for c in membership.iter_mut() {
                *c = compact[*c];
            }
            graph = graph.aggregate(&compact, count);
        }
    }

    let p = Partition::from_pairs(
        s.nodes()
            .iter()
            .copied()
            .zip(membership.iter().map(|&c| c as u32)),
    )?;
    Ok(p.with_window(s.window_start, s.window_end).canonical())
}

/// Relabels community ids to `0..count`, ordered by first appearance.
fn renumber(community: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![usize::MAX; community.len()];
    let mut next = 0;
    let compact = community
        .iter()
        .map(|&c| {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
            map[c]
        })
        .collect();
    (compact, next)
}

struct WeightedGraph {
    /// neighbour lists without self-loops
    adj: Vec<Vec<(usize, f64)>>,
    /// weight of the internal edges collapsed into each node
    self_loops: Vec<f64>,
    /// weighted degree, self-loops counted twice
    degree: Vec<f64>,
    two_m: f64,
}

impl WeightedGraph {
    fn from_snapshot(s: &Snapshot) -> Self {
        let n = s.node_count();
        let mut adj = vec![Vec::new(); n];
        for (u, v) in s.indexed_edges() {
            adj[u].push((v, 1.0));
            adj[v].push((u, 1.0));
        }
        Self::from_parts(adj, vec![0.0; n])
    }

    fn from_parts(adj: Vec<Vec<(usize, f64)>>, self_loops: Vec<f64>) -> Self {
        let degree: Vec<f64> = adj
            .iter()
            .zip(&self_loops)
            .map(|(nbrs, &w)| nbrs.iter().map(|&(_, x)| x).sum::<f64>() + 2.0 * w)
            .collect();
        let two_m = degree.iter().sum();
        Self {
            adj,
            self_loops,
            degree,
            two_m,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Local-move phase. Returns the community of each node, or `None` when
    /// no node moved at all.
    fn one_level(&self, order: &[usize], resolution: f64) -> Option<Vec<usize>> {
        let n = self.len();
        let mut community: Vec<usize> = (0..n).collect();
        let mut total: Vec<f64> = self.degree.clone();
        let mut link = vec![0.0f64; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut moved_any = false;

        loop {
            let mut moves = 0usize;
            for &node in order {
                let own = community[node];
                let k = self.degree[node];

                for &(nbr, w) in &self.adj[node] {
                    let c = community[nbr];
                    if link[c] == 0.0 {
                        touched.push(c);
                    }
                    link[c] += w;
                }

                total[own] -= k;
                let gain = |c: usize, link_c: f64| link_c - resolution * total[c] * k / self.two_m;
                let stay = gain(own, link[own]);
                let mut best = own;
                let mut best_gain = stay;
                for &c in &touched {
                    let g = gain(c, link[c]);
                    if g > best_gain + GAIN_EPS
                        || ((g - best_gain).abs() <= GAIN_EPS && c < best && best != own)
                    {
                        best = c;
                        best_gain = g;
                    }
                }
                // only leave for a strictly better community
                if best != own && best_gain <= stay + GAIN_EPS {
                    best = own;
                }
                total[best] += k;
                if best != own {
                    community[node] = best;
                    moves += 1;
                }

                for &c in &touched {
                    link[c] = 0.0;
                }
                touched.clear();
            }
            if moves == 0 {
                break;
            }
            moved_any = true;
        }
        moved_any.then_some(community)
    }

    /// Collapses every community into one node.
    fn aggregate(&self, community: &[usize], count: usize) -> Self {
        let mut self_loops = vec![0.0; count];
        let mut weights: Vec<alloc::collections::BTreeMap<usize, f64>> =
            vec![Default::default(); count];
        for (u, nbrs) in self.adj.iter().enumerate() {
            let cu = community[u];
            self_loops[cu] += self.self_loops[u];
            for &(v, w) in nbrs {
                let cv = community[v];
                if cu == cv {
                    // each internal edge is seen from both ends
                    self_loops[cu] += w / 2.0;
                } else {
                    *weights[cu].entry(cv).or_insert(0.0) += w;
                }
            }
        }
        let adj = weights
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect();
        Self::from_parts(adj, self_loops)
    }
}

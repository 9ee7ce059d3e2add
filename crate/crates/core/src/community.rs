//! Partitions and the per-snapshot statistics used to pick a window size.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::temporal::{NodeId, Snapshot, Timestamp};

/// Community label for every node of one snapshot.
///
/// Stored as `(node, label)` pairs sorted by node id, one entry per node.
/// Labels are arbitrary `u32`s; [`Partition::canonical`] renumbers them to
/// `0..C` in order of first appearance over the sorted nodes, after which two
/// partitions describing the same grouping compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Partition {
    assignment: Vec<(NodeId, u32)>,
    window: Option<(Timestamp, Timestamp)>,
}

impl Partition {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (NodeId, u32)>) -> Result<Self> {
        let mut assignment: Vec<(NodeId, u32)> = pairs.into_iter().collect();
        assignment.sort_unstable_by_key(|&(n, _)| n);
        if let Some(w) = assignment.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateNode(w[0].0));
        }
        Ok(Self {
            assignment,
            window: None,
        })
    }

    /// Labels given in node order: node `i` gets `labels[i]`.
    pub fn from_labels(labels: &[u32]) -> Self {
        Self {
            assignment: labels
                .iter()
                .enumerate()
                .map(|(i, &l)| (NodeId(i as u32), l))
                .collect(),
            window: None,
        }
    }

    pub fn with_window(mut self, start: Timestamp, end: Timestamp) -> Self {
        self.window = Some((start, end));
        self
    }

    /// Window the partition was computed on, if known.
    pub fn window(&self) -> Option<(Timestamp, Timestamp)> {
        self.window
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (NodeId, u32)> + '_ {
        self.assignment.iter().copied()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        self.assignment.iter().map(|&(n, _)| n)
    }

    pub fn labels(&self) -> impl ExactSizeIterator<Item = u32> + '_ {
        self.assignment.iter().map(|&(_, l)| l)
    }

    pub fn as_slice(&self) -> &[(NodeId, u32)] {
        &self.assignment
    }

    pub fn label_of(&self, node: NodeId) -> Option<u32> {
        self.assignment
            .binary_search_by_key(&node, |&(n, _)| n)
            .ok()
            .map(|i| self.assignment[i].1)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.label_of(node).is_some()
    }

    pub fn max_label(&self) -> Option<u32> {
        self.labels().max()
    }

    pub fn community_count(&self) -> usize {
        let mut labels: Vec<u32> = self.labels().collect();
        labels.sort_unstable();
        labels.dedup();
        labels.len()
    }

    /// Labels renumbered by first appearance over sorted node ids.
    pub fn canonical(&self) -> Self {
        let mut map = BTreeMap::new();
        let assignment = self
            .assignment
            .iter()
            .map(|&(n, l)| {
                let next = map.len() as u32;
                (n, *map.entry(l).or_insert(next))
            })
            .collect();
        Self {
            assignment,
            window: self.window,
        }
    }

    /// Same labels, only for nodes that are also present in `other`.
    pub fn restrict_to(&self, other: &Partition) -> Self {
        let mut out = Vec::with_capacity(self.len().min(other.len()));
        let (a, b) = (&self.assignment, &other.assignment);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        Self {
            assignment: out,
            window: self.window,
        }
    }

    /// Label of each snapshot node, aligned with [`Snapshot::nodes`].
    pub(crate) fn labels_for(&self, s: &Snapshot) -> Result<Vec<u32>> {
        s.nodes()
            .iter()
            .map(|&n| self.label_of(n).ok_or(Error::IncompletePartition(n)))
            .collect()
    }
}

impl FromIterator<(NodeId, u32)> for Partition {
    /// Later duplicates of a node are dropped.
    fn from_iter<I: IntoIterator<Item = (NodeId, u32)>>(iter: I) -> Self {
        let mut assignment: Vec<(NodeId, u32)> = iter.into_iter().collect();
        assignment.sort_by_key(|&(n, _)| n);
        assignment.dedup_by_key(|&mut (n, _)| n);
        Self {
            assignment,
            window: None,
        }
    }
}

/// Newman modularity with resolution `gamma` on the simple undirected
/// snapshot:
///
/// `Q = sum_c [ L_c / m - gamma * (D_c / 2m)^2 ]`
///
/// where `L_c` counts edges inside community `c` and `D_c` sums its degrees.
/// This is the community-wise form of `(1/2m) sum_ij (A_ij - gamma k_i k_j / 2m) delta(c_i, c_j)`.
pub fn modularity(s: &Snapshot, p: &Partition, resolution: f64) -> Result<f64> {
    if s.edge_count() == 0 {
        return Err(Error::UndefinedModularity);
    }
    let labels = p.labels_for(s)?;
    Ok(modularity_of_labels(s, &labels, resolution))
}

/// `labels` aligned with `s.nodes()`; `s` must have at least one edge.
pub(crate) fn modularity_of_labels(s: &Snapshot, labels: &[u32], resolution: f64) -> f64 {
    let m = s.edge_count() as f64;
    // label -> (internal edges, degree sum)
    let mut per: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for (u, v) in s.indexed_edges() {
        let (lu, lv) = (labels[u], labels[v]);
        per.entry(lu).or_default().1 += 1;
        per.entry(lv).or_default().1 += 1;
        if lu == lv {
            per.entry(lu).or_default().0 += 1;
        }
    }
    per.values()
        .map(|&(internal, degree)| {
            let frac = degree as f64 / (2.0 * m);
            internal as f64 / m - resolution * frac * frac
        })
        .sum()
}

/// Size of the largest connected component over the node count.
pub fn lcc_proportion(s: &Snapshot) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptySnapshot);
    }
    let sizes = component_sizes(s);
    let largest = sizes.iter().copied().max().unwrap_or(0);
    Ok(largest as f64 / s.node_count() as f64)
}

pub fn edge_node_ratio(s: &Snapshot) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptySnapshot);
    }
    Ok(s.edge_count() as f64 / s.node_count() as f64)
}

/// Sizes of the connected components, in no particular order.
pub fn component_sizes(s: &Snapshot) -> Vec<usize> {
    let n = s.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (u, v) in s.indexed_edges() {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru.max(rv)] = ru.min(rv);
        }
    }
    let mut size = alloc::vec![0usize; n];
    for x in 0..n {
        let r = find(&mut parent, x);
        size[r] += 1;
    }
    size.retain(|&c| c > 0);
    size
}

/// Window-selection statistics for one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotStats {
    pub window_start: Timestamp,
    pub window_end: Timestamp,
    pub node_count: usize,
    pub edge_count: usize,
    pub edge_node_ratio: f64,
    pub lcc_proportion: f64,
    /// `None` when the snapshot has no edges.
    pub modularity: Option<f64>,
    pub community_count: usize,
}

impl SnapshotStats {
    /// Statistics of a non-empty snapshot given its detected partition.
    pub fn compute(s: &Snapshot, p: &Partition, resolution: f64) -> Result<Self> {
        let modularity = match modularity(s, p, resolution) {
            Ok(q) => Some(q),
            Err(Error::UndefinedModularity) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            window_start: s.window_start,
            window_end: s.window_end,
            node_count: s.node_count(),
            edge_count: s.edge_count(),
            edge_node_ratio: edge_node_ratio(s)?,
            lcc_proportion: lcc_proportion(s)?,
            modularity,
            community_count: {
                let mut labels = p.labels_for(s)?;
                labels.sort_unstable();
                labels.dedup();
                labels.len()
            },
        })
    }
}

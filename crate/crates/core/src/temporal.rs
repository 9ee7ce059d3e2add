//! Temporal event streams and their decomposition into snapshot graphs.
//!
//! A [`TemporalGraph`] is an ordered multiset of timestamped events. Slicing
//! it with [`TemporalGraph::extract_snapshots`] produces one simple undirected
//! [`Snapshot`] per half-open window `[start, start + length)`. Windows are
//! anchored at the first observed timestamp and advance by a fixed stride, so
//! consecutive windows overlap whenever the stride is shorter than the window.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::error::{Error, Result};

/// Integer timestamp (Unix seconds or abstract ticks).
pub type Timestamp = i64;

/// Dense node handle issued by a [`TemporalGraph`] (or chosen by the caller
/// for synthetic data). The original token is available through
/// [`TemporalGraph::name`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalEvent {
    pub src: NodeId,
    pub dst: NodeId,
    pub time: Timestamp,
    /// Parsed and carried along, never used when building snapshots.
    pub weight: Option<f64>,
}

/// Time-sorted event stream over a universe of named nodes.
#[derive(Debug, Clone)]
pub struct TemporalGraph {
    events: Vec<TemporalEvent>,
    names: Arc<[String]>,
    universe: Vec<NodeId>,
}

/// Interns node tokens while events are pushed, then sorts them into a
/// [`TemporalGraph`].
#[derive(Debug, Default)]
pub struct TemporalGraphBuilder {
    ids: HashMap<String, NodeId>,
    names: Vec<String>,
    events: Vec<TemporalEvent>,
}

impl TemporalGraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, token: &str) -> Result<NodeId> {
        if token.is_empty() {
            return Err(Error::EmptyToken);
        }
        if let Some(&id) = self.ids.get(token) {
            return Ok(id);
        }
        let id = NodeId(self.names.len() as u32);
        self.names.push(String::from(token));
        self.ids.insert(String::from(token), id);
        Ok(id)
    }

    pub fn push(
        &mut self,
        src: &str,
        dst: &str,
        time: Timestamp,
        weight: Option<f64>,
    ) -> Result<()> {
        let src = self.intern(src)?;
        let dst = self.intern(dst)?;
        self.events.push(TemporalEvent {
            src,
            dst,
            time,
            weight,
        });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn build(self) -> TemporalGraph {
        TemporalGraph::assemble(self.events, self.names.into())
    }
}

impl TemporalGraph {
    /// Builds a graph from events over pre-assigned ids; `names[id]` is the
    /// token of node `id`. Events are stably sorted by time.
    pub fn from_events(events: Vec<TemporalEvent>, names: Vec<String>) -> Result<Self> {
        if let Some(e) = events
            .iter()
            .find(|e| e.src.index() >= names.len() || e.dst.index() >= names.len())
        {
            let bad = if e.src.index() >= names.len() {
                e.src
            } else {
                e.dst
            };
            return Err(Error::UnknownNode(bad));
        }
        if names.iter().any(String::is_empty) {
            return Err(Error::EmptyToken);
        }
        Ok(Self::assemble(events, names.into()))
    }

    fn assemble(mut events: Vec<TemporalEvent>, names: Arc<[String]>) -> Self {
        // sort_by_key is stable: simultaneous events keep input order
        events.sort_by_key(|e| e.time);
        let universe = universe_of(&events);
        Self {
            events,
            names,
            universe,
        }
    }

    pub fn events(&self) -> &[TemporalEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn t_min(&self) -> Option<Timestamp> {
        self.events.first().map(|e| e.time)
    }

    pub fn t_max(&self) -> Option<Timestamp> {
        self.events.last().map(|e| e.time)
    }

    /// Sorted ids of every node that appears in at least one event.
    pub fn node_universe(&self) -> &[NodeId] {
        &self.universe
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.names[id.index()]
    }

    /// Token table shared by every graph derived from the same source.
    pub fn names(&self) -> &Arc<[String]> {
        &self.names
    }

    /// Events with `start <= time < end`.
    pub fn restrict_time(&self, start: Timestamp, end: Timestamp) -> Result<Self> {
        if start >= end {
            return Err(Error::InvalidInterval { start, end });
        }
        let events = self.window_events(start, end).to_vec();
        let universe = universe_of(&events);
        Ok(Self {
            events,
            names: Arc::clone(&self.names),
            universe,
        })
    }

    /// Slice of the (sorted) event stream falling in `[start, end)`.
    pub fn window_events(&self, start: Timestamp, end: Timestamp) -> &[TemporalEvent] {
        let lo = self.events.partition_point(|e| e.time < start);
        let hi = self.events.partition_point(|e| e.time < end);
        &self.events[lo..hi.max(lo)]
    }

    /// Simple undirected graph of the events in `[start, end)`.
    pub fn snapshot(&self, start: Timestamp, end: Timestamp) -> Snapshot {
        let events = self.window_events(start, end);
        Snapshot::build(
            start,
            end,
            events.iter().flat_map(|e| [e.src, e.dst]),
            events.iter().map(|e| (e.src, e.dst)),
        )
    }

    /// Start times `t_min + k * stride` for every `k` whose start is still
    /// `<= t_max`. Empty for an empty graph.
    pub fn window_starts(&self, window_length: i64, stride: i64) -> Result<Vec<Timestamp>> {
        validate_window(window_length, stride)?;
        let (Some(t_min), Some(t_max)) = (self.t_min(), self.t_max()) else {
            return Ok(Vec::new());
        };
        let mut starts = Vec::new();
        let mut start = t_min;
        loop {
            starts.push(start);
            match start.checked_add(stride) {
                Some(next) if next <= t_max => start = next,
                _ => break,
            }
        }
        Ok(starts)
    }

    /// One snapshot per window `[t_min + k*stride, t_min + k*stride + window_length)`.
    /// Windows containing no events are kept as empty snapshots.
    pub fn extract_snapshots(&self, window_length: i64, stride: i64) -> Result<Vec<Snapshot>> {
        Ok(self
            .window_starts(window_length, stride)?
            .into_iter()
            .map(|start| self.snapshot(start, start.saturating_add(window_length)))
            .collect())
    }
}

pub(crate) fn validate_window(window_length: i64, stride: i64) -> Result<()> {
    if window_length <= 0 || stride <= 0 || stride > window_length {
        return Err(Error::InvalidWindow {
            window: window_length,
            stride,
        });
    }
    Ok(())
}

fn universe_of(events: &[TemporalEvent]) -> Vec<NodeId> {
    let mut nodes: Vec<NodeId> = events.iter().flat_map(|e| [e.src, e.dst]).collect();
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

/// Simple undirected graph for one time window: no self-loops, no parallel
/// edges. Nodes are kept sorted and every edge is stored as `(u, v)` with
/// `u < v`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub window_start: Timestamp,
    pub window_end: Timestamp,
    nodes: Vec<NodeId>,
    edges: Vec<(NodeId, NodeId)>,
}

impl Snapshot {
    /// Node set is `nodes` plus every endpoint in `pairs`; self-pairs only
    /// contribute their node, repeated pairs (in either orientation) collapse.
    pub fn build(
        window_start: Timestamp,
        window_end: Timestamp,
        nodes: impl IntoIterator<Item = NodeId>,
        pairs: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Self {
        let mut node_list: Vec<NodeId> = nodes.into_iter().collect();
        let mut edges = Vec::new();
        for (u, v) in pairs {
            node_list.push(u);
            node_list.push(v);
            if u != v {
                edges.push(if u < v { (u, v) } else { (v, u) });
            }
        }
        node_list.sort_unstable();
        node_list.dedup();
        edges.sort_unstable();
        edges.dedup();
        Self {
            window_start,
            window_end,
            nodes: node_list,
            edges,
        }
    }

    /// Convenience for tests and synthetic graphs: window `[0, 1)`.
    pub fn from_edges(
        nodes: impl IntoIterator<Item = NodeId>,
        pairs: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Self {
        Self::build(0, 1, nodes, pairs)
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Position of `node` in [`Snapshot::nodes`].
    pub fn index_of(&self, node: NodeId) -> Option<usize> {
        self.nodes.binary_search(&node).ok()
    }

    /// Degree of every node, aligned with [`Snapshot::nodes`].
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = alloc::vec![0usize; self.nodes.len()];
        for &(u, v) in &self.edges {
            deg[self.index_of(u).expect("edge endpoint is a node")] += 1;
            deg[self.index_of(v).expect("edge endpoint is a node")] += 1;
        }
        deg
    }

    /// Same nodes and window, new edge set. Used by rewiring.
    pub(crate) fn with_edges(&self, edges: Vec<(NodeId, NodeId)>) -> Self {
        let mut snap = Self::build(
            self.window_start,
            self.window_end,
            self.nodes.iter().copied(),
            edges,
        );
        snap.nodes.clone_from(&self.nodes);
        snap
    }

    /// Edges as pairs of positions into [`Snapshot::nodes`].
    pub(crate) fn indexed_edges(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .map(|&(u, v)| {
                (
                    self.index_of(u).expect("edge endpoint is a node"),
                    self.index_of(v).expect("edge endpoint is a node"),
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn graph(events: &[(&str, &str, i64)]) -> TemporalGraph {
        let mut b = TemporalGraphBuilder::new();
        for &(s, d, t) in events {
            b.push(s, d, t, None).unwrap();
        }
        b.build()
    }

    fn times(g: &TemporalGraph) -> Vec<i64> {
        g.events().iter().map(|e| e.time).collect()
    }

    #[test]
    fn events_are_sorted_by_time() {
        let g = graph(&[("a", "b", 5), ("b", "c", 3)]);
        assert_eq!(times(&g), vec![3, 5]);
        assert_eq!(g.name(g.events()[0].src), "b");
        assert_eq!(g.name(g.events()[0].dst), "c");
        assert_eq!((g.t_min(), g.t_max()), (Some(3), Some(5)));
        assert_eq!(g.node_universe().len(), 3);
    }

    #[test]
    fn ties_keep_input_order() {
        let g = graph(&[("a", "b", 1), ("c", "d", 0), ("e", "f", 1), ("g", "h", 1)]);
        let srcs: Vec<&str> = g.events().iter().map(|e| g.name(e.src)).collect();
        assert_eq!(srcs, vec!["c", "a", "e", "g"]);
    }

    #[test]
    fn empty_token_rejected() {
        let mut b = TemporalGraphBuilder::new();
        assert_eq!(b.push("", "b", 0, None), Err(Error::EmptyToken));
    }

    #[test]
    fn from_events_checks_ids() {
        let e = TemporalEvent {
            src: NodeId(0),
            dst: NodeId(3),
            time: 0,
            weight: None,
        };
        let names = vec![String::from("x"), String::from("y")];
        assert_eq!(
            TemporalGraph::from_events(vec![e], names).unwrap_err(),
            Error::UnknownNode(NodeId(3))
        );
    }

    #[test]
    fn restrict_is_half_open() {
        let g = graph(&[("a", "b", 1), ("b", "c", 5), ("c", "d", 9)]);
        let r = g.restrict_time(0, 6).unwrap();
        assert_eq!(times(&r), vec![1, 5]);
        assert_eq!(r.node_universe().len(), 3);

        let empty = g.restrict_time(100, 200).unwrap();
        assert!(empty.is_empty());
        assert!(empty.node_universe().is_empty());

        let full = g.restrict_time(1, 10).unwrap();
        assert_eq!(full.events(), g.events());

        assert_eq!(
            g.restrict_time(5, 5).unwrap_err(),
            Error::InvalidInterval { start: 5, end: 5 }
        );
    }

    #[test]
    fn sliding_windows() {
        let events: Vec<(String, String, i64)> = (0..20)
            .map(|t| (alloc::format!("n{t}"), alloc::format!("n{}", t + 1), t))
            .collect();
        let mut b = TemporalGraphBuilder::new();
        for (s, d, t) in &events {
            b.push(s, d, *t, None).unwrap();
        }
        let g = b.build();
        let snaps = g.extract_snapshots(10, 1).unwrap();
        assert_eq!(snaps.len(), 20);
        assert_eq!((snaps[0].window_start, snaps[0].window_end), (0, 10));
        assert_eq!((snaps[1].window_start, snaps[1].window_end), (1, 11));
        assert_eq!(snaps[0].edge_count(), 10);
        assert_eq!(snaps[19].edge_count(), 1);
    }

    #[test]
    fn collapse_and_self_loops() {
        let g = graph(&[("a", "b", 1), ("b", "a", 2), ("a", "a", 3)]);
        let snaps = g.extract_snapshots(10, 10).unwrap();
        assert_eq!(snaps.len(), 1);
        let s = &snaps[0];
        assert_eq!(s.node_count(), 2);
        assert_eq!(s.edges(), &[(NodeId(0), NodeId(1))]);
    }

    #[test]
    fn event_on_window_end_goes_to_next_window() {
        let g = graph(&[("a", "b", 0), ("c", "d", 10)]);
        let snaps = g.extract_snapshots(10, 5).unwrap();
        assert_eq!(snaps.len(), 3);
        assert_eq!(snaps[0].node_count(), 2);
        assert!(snaps[0].index_of(NodeId(2)).is_none());
        assert!(snaps[1].index_of(NodeId(2)).is_some());
    }

    #[test]
    fn empty_windows_are_emitted() {
        let g = graph(&[("a", "b", 0), ("c", "d", 30)]);
        let snaps = g.extract_snapshots(10, 10).unwrap();
        assert_eq!(snaps.len(), 4);
        assert!(snaps[1].is_empty() && snaps[2].is_empty());
    }

    #[test]
    fn self_loop_only_node_is_isolated() {
        let g = graph(&[("a", "a", 0)]);
        let s = &g.extract_snapshots(1, 1).unwrap()[0];
        assert_eq!(s.node_count(), 1);
        assert_eq!(s.edge_count(), 0);
    }

    #[test]
    fn bad_window_parameters() {
        let g = graph(&[("a", "b", 0)]);
        assert!(g.extract_snapshots(0, 1).is_err());
        assert!(g.extract_snapshots(10, 0).is_err());
        assert!(g.extract_snapshots(10, 11).is_err());
        assert!(g.extract_snapshots(-3, -3).is_err());
    }

    #[test]
    fn windows_near_the_end_of_time() {
        let g = graph(&[("a", "b", i64::MAX - 1), ("b", "c", i64::MAX)]);
        let snaps = g.extract_snapshots(5, 5).unwrap();
        assert_eq!(snaps.len(), 1);
        // end saturates at i64::MAX, so the last event sits on the boundary
        assert_eq!(snaps[0].edge_count(), 1);
    }

    #[test]
    fn degrees_align_with_nodes() {
        let s = Snapshot::from_edges(
            [NodeId(9)],
            [(NodeId(2), NodeId(1)), (NodeId(1), NodeId(3))],
        );
        assert_eq!(s.nodes(), &[NodeId(1), NodeId(2), NodeId(3), NodeId(9)]);
        assert_eq!(s.degrees(), vec![2, 1, 1, 0]);
    }
}

//! Normalized mutual information between partitions, including partitions
//! over different node sets.
//!
//! All three measures share one formula,
//!
//! ```text
//! NMI = 2 I(L1; L2) / (H(L1) + H(L2))
//! I   = sum_rs (n_rs / N) ln(N n_rs / (n_r n_s))
//! H   = -sum_r (n_r / N) ln(n_r / N)
//! ```
//!
//! and differ only in which nodes enter the contingency table:
//!
//! * [`nmi`]: both partitions cover the same nodes.
//! * [`unmi`]: the union of the node sets. A node missing from one side is
//!   placed in a reserved *virtual* community on that side
//!   (see [`augment_union`]).
//! * [`inmi`]: the intersection of the node sets; nodes present on only one
//!   side are ignored.
//!
//! Empty cells and empty labels contribute nothing. When both entropies
//! vanish (one community on each side) the partitions are identical over
//! the compared nodes and the measure is 1.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::temporal::{NodeId, Timestamp};

/// Label of the virtual community used while streaming union pairs. It sorts
/// after every real `u32` label, exactly like `max_label + 1` does in
/// [`augment_union`], so both routes sum in the same order.
const VIRTUAL: u64 = u32::MAX as u64 + 1;

/// Joint label counts of two labellings over a common node scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// distinct labels of the first labelling, ascending
    pub row_labels: Vec<u64>,
    /// distinct labels of the second labelling, ascending
    pub col_labels: Vec<u64>,
    pub row_marginals: Vec<u64>,
    pub col_marginals: Vec<u64>,
    /// non-zero cells `(row, col, n_rs)`, sorted by `(row, col)`
    pub cells: Vec<(usize, usize, u64)>,
    pub total: u64,
}

impl ContingencyTable {
    /// Builds the table from one `(label1, label2)` pair per node.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut pairs: Vec<(u64, u64)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        let total = pairs.len() as u64;

        let (row_labels, row_marginals) = run_lengths(pairs.iter().map(|p| p.0));
        let mut cols: Vec<u64> = pairs.iter().map(|p| p.1).collect();
        cols.sort_unstable();
        let (col_labels, col_marginals) = run_lengths(cols.into_iter());

        let mut cells: Vec<(usize, usize, u64)> = Vec::new();
        let mut row = 0;
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if i > 0 && pairs[i - 1] == (a, b) {
                cells.last_mut().expect("run in progress").2 += 1;
                continue;
            }
            while row_labels[row] != a {
                row += 1;
            }
            let col = col_labels.binary_search(&b).expect("label was counted");
            cells.push((row, col, 1));
        }
        Self {
            row_labels,
            col_labels,
            row_marginals,
            col_marginals,
            cells,
            total,
        }
    }

    /// `n_rs` for the given label values.
    pub fn count(&self, r: u64, s: u64) -> u64 {
        let (Ok(i), Ok(j)) = (
            self.row_labels.binary_search(&r),
            self.col_labels.binary_search(&s),
        ) else {
            return 0;
        };
        self.cells
            .binary_search_by(|&(a, b, _)| (a, b).cmp(&(i, j)))
            .map(|k| self.cells[k].2)
            .unwrap_or(0)
    }

    pub fn row_entropy(&self) -> f64 {
        entropy(&self.row_marginals, self.total)
    }

    pub fn col_entropy(&self) -> f64 {
        entropy(&self.col_marginals, self.total)
    }

    pub fn mutual_information(&self) -> f64 {
        let n = self.total as f64;
        self.cells
            .iter()
            .map(|&(r, s, c)| {
                let c = c as f64;
                let expected = self.row_marginals[r] as f64 * self.col_marginals[s] as f64;
                c / n * libm::log(n * c / expected)
            })
            .sum()
    }

    /// `2 I / (H1 + H2)`, clamped to `[0, 1]`. Exactly 1 when the labellings
    /// are a bijection of each other, which covers both entropies being 0.
    pub fn normalized_mutual_information(&self) -> f64 {
        // one cell per row and per column
        if self.cells.len() == self.row_labels.len() && self.cells.len() == self.col_labels.len() {
            return 1.0;
        }
        let h = self.row_entropy() + self.col_entropy();
        (2.0 * self.mutual_information() / h).clamp(0.0, 1.0)
    }
}

fn run_lengths(sorted: impl Iterator<Item = u64>) -> (Vec<u64>, Vec<u64>) {
    let mut labels: Vec<u64> = Vec::new();
    let mut counts: Vec<u64> = Vec::new();
    for x in sorted {
        if labels.last() == Some(&x) {
            *counts.last_mut().expect("parallel to labels") += 1;
        } else {
            labels.push(x);
            counts.push(1);
        }
    }
    (labels, counts)
}

fn entropy(marginals: &[u64], total: u64) -> f64 {
    let n = total as f64;
    marginals
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * libm::log(p)
        })
        .sum()
}

/// Walks two node-sorted partitions in lockstep.
fn merge<'a>(
    a: &'a [(NodeId, u32)],
    b: &'a [(NodeId, u32)],
) -> impl Iterator<Item = (Option<u32>, Option<u32>)> + 'a {
    let (mut i, mut j) = (0, 0);
    core::iter::from_fn(move || {
        let next = match (a.get(i), b.get(j)) {
            (None, None) => return None,
            (Some(&(_, l)), None) => (Some(l), None),
            (None, Some(&(_, l))) => (None, Some(l)),
            (Some(&(x, l)), Some(&(y, k))) => match x.cmp(&y) {
                Ordering::Less => (Some(l), None),
                Ordering::Greater => (None, Some(k)),
                Ordering::Equal => (Some(l), Some(k)),
            },
        };
        i += next.0.is_some() as usize;
        j += next.1.is_some() as usize;
        Some(next)
    })
}

/// NMI of two partitions over the same nodes.
pub fn nmi(p1: &Partition, p2: &Partition) -> Result<f64> {
    if p1.is_empty() && p2.is_empty() {
        return Err(Error::EmptyPartition);
    }
    if p1.len() != p2.len() || p1.nodes().zip(p2.nodes()).any(|(a, b)| a != b) {
        return Err(Error::NodeSetMismatch);
    }
    let table = ContingencyTable::from_pairs(
        p1.labels()
            .zip(p2.labels())
            .map(|(a, b)| (a as u64, b as u64)),
    );
    Ok(table.normalized_mutual_information())
}

/// Both labellings extended to `V1 ∪ V2`. Nodes missing from the first
/// partition carry `virtual1` in `labels1`, nodes missing from the second
/// carry `virtual2` in `labels2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedPair {
    pub labels1: Partition,
    pub labels2: Partition,
    pub virtual1: u32,
    pub virtual2: u32,
}

impl AugmentedPair {
    pub fn union_len(&self) -> usize {
        self.labels1.len()
    }
}

/// Places the nodes each partition lacks into a fresh virtual community
/// (label `max_label + 1`).
pub fn augment_union(p1: &Partition, p2: &Partition) -> Result<AugmentedPair> {
    if p1.is_empty() && p2.is_empty() {
        return Err(Error::EmptyPartition);
    }
    let fresh = |p: &Partition| match p.max_label() {
        None => Ok(0),
        Some(l) => l.checked_add(1).ok_or(Error::LabelOverflow),
    };
    let (virtual1, virtual2) = (fresh(p1)?, fresh(p2)?);
    let mut l1 = Vec::with_capacity(p1.len() + p2.len());
    let mut l2 = Vec::with_capacity(p1.len() + p2.len());
    let (a, b) = (p1.as_slice(), p2.as_slice());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let order = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match order {
            Ordering::Less => {
                l1.push(a[i]);
                l2.push((a[i].0, virtual2));
                i += 1;
            }
            Ordering::Greater => {
                l1.push((b[j].0, virtual1));
                l2.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                l1.push(a[i]);
                l2.push(b[j]);
                i += 1;
                j += 1;
            }
        }
    }
    Ok(AugmentedPair {
        labels1: Partition::from_pairs(l1)?,
        labels2: Partition::from_pairs(l2)?,
        virtual1,
        virtual2,
    })
}

/// Union-NMI: NMI over `V1 ∪ V2` with virtual communities for the nodes
/// absent from either side.
pub fn unmi(p1: &Partition, p2: &Partition) -> Result<f64> {
    if p1.is_empty() && p2.is_empty() {
        return Err(Error::EmptyPartition);
    }
    let pairs = merge(p1.as_slice(), p2.as_slice())
        .map(|(a, b)| (a.map_or(VIRTUAL, u64::from), b.map_or(VIRTUAL, u64::from)));
    Ok(ContingencyTable::from_pairs(pairs).normalized_mutual_information())
}

/// Intersection-NMI: NMI over `V1 ∩ V2`, ignoring nodes unique to one side.
pub fn inmi(p1: &Partition, p2: &Partition) -> Result<f64> {
    let table = intersection_table(p1, p2);
    if table.total == 0 {
        return Err(Error::EmptyIntersection);
    }
    Ok(table.normalized_mutual_information())
}

fn intersection_table(p1: &Partition, p2: &Partition) -> ContingencyTable {
    ContingencyTable::from_pairs(
        merge(p1.as_slice(), p2.as_slice())
            .filter_map(|(a, b)| Some((u64::from(a?), u64::from(b?)))),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Nmi,
    Unmi,
    Inmi,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Nmi, Measure::Unmi, Measure::Inmi];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Nmi => "nmi",
            Measure::Unmi => "unmi",
            Measure::Inmi => "inmi",
        }
    }

    pub fn compute(self, p1: &Partition, p2: &Partition) -> Result<f64> {
        match self {
            Measure::Nmi => nmi(p1, p2),
            Measure::Unmi => unmi(p1, p2),
            Measure::Inmi => inmi(p1, p2),
        }
    }

    /// Matrix entry for a pair: comparisons that are undefined for this pair
    /// (disjoint node sets under INMI) become NaN, everything else is an
    /// error.
    pub fn entry(self, p1: &Partition, p2: &Partition) -> Result<f64> {
        match self.compute(p1, p2) {
            Err(Error::EmptyIntersection | Error::EmptyPartition) => Ok(f64::NAN),
            other => other,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnknownMeasure;

impl fmt::Display for UnknownMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown measure (expected nmi, unmi or inmi)")
    }
}

impl core::error::Error for UnknownMeasure {}

impl FromStr for Measure {
    type Err = UnknownMeasure;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nmi" => Ok(Measure::Nmi),
            "unmi" => Ok(Measure::Unmi),
            "inmi" => Ok(Measure::Inmi),
            _ => Err(UnknownMeasure),
        }
    }
}

/// Symmetric matrix of one measure over a sequence of partitions. Undefined
/// entries are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub measure: Measure,
    /// one label per row/column, normally the window start
    pub index: Vec<Timestamp>,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn from_values(measure: Measure, index: Vec<Timestamp>, values: Vec<f64>) -> Self {
        assert_eq!(
            values.len(),
            index.len() * index.len(),
            "matrix must be square"
        );
        Self {
            measure,
            index,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mean over `i != j`, skipping NaN entries. `None` if nothing is left.
    pub fn off_diagonal_mean(&self) -> Option<f64> {
        let n = self.len();
        let (sum, count) = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .filter(|v| !v.is_nan())
            .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        (count > 0).then(|| sum / count as f64)
    }

    /// Fills the upper triangle (diagonal included) with `entry(i, j)` and
    /// mirrors it.
    pub fn build(
        measure: Measure,
        index: Vec<Timestamp>,
        mut entry: impl FnMut(usize, usize) -> Result<f64>,
    ) -> Result<Self> {
        let n = index.len();
        let mut values = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = entry(i, j)?;
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Ok(Self {
            measure,
            index,
            values,
        })
    }
}

/// Window start of each partition, or its position when it has no window.
pub fn partition_index(partitions: &[Partition]) -> Vec<Timestamp> {
    partitions
        .iter()
        .enumerate()
        .map(|(i, p)| p.window().map_or(i as Timestamp, |w| w.0))
        .collect()
}

/// Checks that a matrix can be built over `partitions`: at least two of them,
/// and identical node sets for plain NMI.
pub fn check_matrix_input(partitions: &[Partition], measure: Measure) -> Result<()> {
    if partitions.len() < 2 {
        return Err(Error::TooFewPartitions(partitions.len()));
    }
    if measure == Measure::Nmi {
        let first = &partitions[0];
        if partitions[1..]
            .iter()
            .any(|p| p.len() != first.len() || p.nodes().zip(first.nodes()).any(|(a, b)| a != b))
        {
            return Err(Error::NodeSetMismatch);
        }
    }
    Ok(())
}

/// All pairwise values of `measure`. INMI entries for disjoint node sets are
/// NaN.
pub fn pairwise_matrix(partitions: &[Partition], measure: Measure) -> Result<SimilarityMatrix> {
    check_matrix_input(partitions, measure)?;
    SimilarityMatrix::build(measure, partition_index(partitions), |i, j| {
        measure.entry(&partitions[i], &partitions[j])
    })
}

//! Reference implementations used only by tests. Nothing here calls into the
//! similarity module; labels are plain maps and every sum is written out.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use tcomm_core::{NodeId, Partition};

pub type Labels = BTreeMap<u32, u32>;

pub fn labels_of(p: &Partition) -> Labels {
    p.iter().map(|(n, l)| (n.0, l)).collect()
}

pub fn to_partition(l: &Labels) -> Partition {
    Partition::from_pairs(l.iter().map(|(&n, &c)| (NodeId(n), c))).unwrap()
}

fn count<K: Ord + Copy>(items: impl Iterator<Item = K>) -> BTreeMap<K, f64> {
    let mut m = BTreeMap::new();
    for k in items {
        *m.entry(k).or_insert(0.0) += 1.0;
    }
    m
}

fn xlogx_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

fn normalize(i: f64, h1: f64, h2: f64) -> f64 {
    if h1 + h2 == 0.0 {
        1.0
    } else {
        (2.0 * i / (h1 + h2)).clamp(0.0, 1.0)
    }
}

/// Plain NMI over identical node sets.
pub fn nmi_direct(l1: &Labels, l2: &Labels) -> f64 {
    assert_eq!(l1.keys().collect::<Vec<_>>(), l2.keys().collect::<Vec<_>>());
    let n = l1.len() as f64;
    let c1 = count(l1.values().copied());
    let c2 = count(l2.values().copied());
    let joint = count(l1.keys().map(|k| (l1[k], l2[k])));
    let mut i = 0.0;
    for (&(r, s), &nrs) in &joint {
        i += nrs / n * (n * nrs / (c1[&r] * c2[&s])).ln();
    }
    let h1: f64 = c1.values().map(|&c| xlogx_term(c / n)).sum();
    let h2: f64 = c2.values().map(|&c| xlogx_term(c / n)).sum();
    normalize(i, h1, h2)
}

/// Union-NMI evaluated as the three mutual-information sums and the
/// two-term entropies, with the marginal in each virtual-community term
/// taken from the opposite labelling.
pub fn unmi_direct(l1: &Labels, l2: &Labels) -> f64 {
    let v1: BTreeSet<u32> = l1.keys().copied().collect();
    let v2: BTreeSet<u32> = l2.keys().copied().collect();
    let only1: Vec<u32> = v1.difference(&v2).copied().collect();
    let only2: Vec<u32> = v2.difference(&v1).copied().collect();
    let common: Vec<u32> = v1.intersection(&v2).copied().collect();
    let nu = v1.union(&v2).count() as f64;
    let (d12, d21) = (only1.len() as f64, only2.len() as f64);

    let n1 = count(l1.values().copied());
    let n2 = count(l2.values().copied());

    // real x real cells, over common nodes
    let mut i = 0.0;
    for (&(r, s), &nrs) in &count(common.iter().map(|k| (l1[k], l2[k]))) {
        i += nrs / nu * (nu * nrs / (n1[&r] * n2[&s])).ln();
    }
    // virtual community of L1 (nodes of V2 - V1) against real labels s of L2
    for (&s, &c) in &count(only2.iter().map(|k| l2[k])) {
        i += c / nu * (nu * c / (d21 * n2[&s])).ln();
    }
    // real labels r of L1 against the virtual community of L2 (nodes of V1 - V2)
    for (&r, &c) in &count(only1.iter().map(|k| l1[k])) {
        i += c / nu * (nu * c / (d12 * n1[&r])).ln();
    }

    let h1: f64 = n1.values().map(|&c| xlogx_term(c / nu)).sum::<f64>() + xlogx_term(d21 / nu);
    let h2: f64 = n2.values().map(|&c| xlogx_term(c / nu)).sum::<f64>() + xlogx_term(d12 / nu);
    normalize(i, h1, h2)
}

/// Intersection-NMI with the restricted marginals written as `n_r - q_r`.
/// Returns `None` for disjoint node sets.
pub fn inmi_direct(l1: &Labels, l2: &Labels) -> Option<f64> {
    let common: Vec<u32> = l1.keys().filter(|k| l2.contains_key(k)).copied().collect();
    if common.is_empty() {
        return None;
    }
    let ni = common.len() as f64;
    let n1 = count(l1.values().copied());
    let n2 = count(l2.values().copied());
    let q1 = count(
        l1.iter()
            .filter(|(k, _)| !l2.contains_key(k))
            .map(|(_, &l)| l),
    );
    let q2 = count(
        l2.iter()
            .filter(|(k, _)| !l1.contains_key(k))
            .map(|(_, &l)| l),
    );
    let kept = |n: &BTreeMap<u32, f64>, q: &BTreeMap<u32, f64>, r: u32| {
        n[&r] - q.get(&r).copied().unwrap_or(0.0)
    };

    let mut i = 0.0;
    for (&(r, s), &nrs) in &count(common.iter().map(|k| (l1[k], l2[k]))) {
        i += nrs / ni * (nrs * ni / (kept(&n1, &q1, r) * kept(&n2, &q2, s))).ln();
    }
    let h1: f64 = n1.keys().map(|&r| xlogx_term(kept(&n1, &q1, r) / ni)).sum();
    let h2: f64 = n2.keys().map(|&s| xlogx_term(kept(&n2, &q2, s) / ni)).sum();
    Some(normalize(i, h1, h2))
}

/// Random pair of labellings over a universe of at most `max_universe`
/// nodes. Overlap ranges from disjoint to identical node sets, each side
/// uses 1 to 10 labels. The union is never empty.
pub fn random_pair(rng: &mut impl Rng, max_universe: u32) -> (Labels, Labels) {
    let universe = rng.gen_range(1..=max_universe);
    let mut nodes: Vec<u32> = (0..universe).collect();
    nodes.shuffle(rng);
    let mode = rng.gen_range(0..4);
    let (v1, v2): (Vec<u32>, Vec<u32>) = match mode {
        // identical node sets
        0 => (nodes.clone(), nodes.clone()),
        // disjoint
        1 => {
            let cut = rng.gen_range(0..=nodes.len());
            (nodes[..cut].to_vec(), nodes[cut..].to_vec())
        }
        // independent membership
        _ => {
            let p1 = rng.gen_range(0.0..=1.0);
            let p2 = rng.gen_range(0.0..=1.0);
            (
                nodes.iter().copied().filter(|_| rng.gen_bool(p1)).collect(),
                nodes.iter().copied().filter(|_| rng.gen_bool(p2)).collect(),
            )
        }
    };
    let k1 = rng.gen_range(1..=10);
    let k2 = rng.gen_range(1..=10);
    let mut label = |vs: Vec<u32>, k: u32| {
        vs.into_iter()
            .map(|n| (n, rng.gen_range(0..k)))
            .collect::<Labels>()
    };
    let l1 = label(v1, k1);
    let l2 = label(v2, k2);
    if l1.is_empty() && l2.is_empty() {
        return random_pair(rng, max_universe);
    }
    (l1, l2)
}

/// Same as [`random_pair`] but retried until both sides share a node (and
/// neither side is empty).
pub fn random_overlapping_pair(rng: &mut impl Rng, max_universe: u32) -> (Labels, Labels) {
    loop {
        let (a, b) = random_pair(rng, max_universe);
        if a.keys().any(|k| b.contains_key(k)) {
            return (a, b);
        }
    }
}

/// Random pair over one shared node set.
pub fn random_same_nodes(rng: &mut impl Rng, max_universe: u32) -> (Labels, Labels) {
    let n = rng.gen_range(1..=max_universe);
    let k1 = rng.gen_range(1..=10);
    let k2 = rng.gen_range(1..=10);
    let l1 = (0..n).map(|i| (i, rng.gen_range(0..k1))).collect();
    let l2 = (0..n).map(|i| (i, rng.gen_range(0..k2))).collect();
    (l1, l2)
}

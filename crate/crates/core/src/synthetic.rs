//! Synthetic dynamic communities with node churn.
//!
//! A pool of `N` labelled nodes feeds a network of exactly `n` active nodes.
//! Every iteration first lets each active node leave with probability `phi`,
//! replacing it by a uniformly drawn inactive pool node, and then lets each
//! node now in the network switch, with probability `psi`, to one of the
//! other `k - 1` labels. Inactive nodes keep their label until they return.
//!
//! Random draws are taken from one seeded stream in a fixed order: departure
//! coins (active nodes by ascending id), then the replacement draw, then for
//! every active node (ascending id) a flip coin and, on success, the new
//! label.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng as _;

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::temporal::NodeId;
use crate::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    /// `N`
    pub pool_size: usize,
    /// `n`
    pub network_size: usize,
    /// `k`
    pub communities: u32,
    /// `phi`: per-iteration probability an active node leaves
    pub churn: f64,
    /// `psi`: per-iteration probability an active node changes label
    pub flip: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            pool_size: 500,
            network_size: 400,
            communities: 4,
            churn: 0.0,
            flip: 0.001,
            iterations: 50,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.network_size == 0 || self.network_size >= self.pool_size {
            return Err(Error::InvalidConfig("need 0 < network size < pool size"));
        }
        if self.pool_size > u32::MAX as usize {
            return Err(Error::InvalidConfig("pool size must fit in u32"));
        }
        if self.communities < 2 {
            return Err(Error::InvalidConfig("need at least 2 communities"));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("need at least 1 iteration"));
        }
        if !(0.0..=1.0).contains(&self.churn) || !(0.0..=1.0).contains(&self.flip) {
            return Err(Error::InvalidConfig("probabilities must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthState {
    /// label of every pool node, active or not
    labels: Vec<u32>,
    /// active pool indices, ascending
    active: Vec<u32>,
    in_network: Vec<bool>,
    iteration: usize,
    /// departures in the most recent step
    departures: usize,
    rng: Rng,
}

impl SynthState {
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn active(&self) -> &[u32] {
        &self.active
    }

    pub fn is_active(&self, node: u32) -> bool {
        self.in_network[node as usize]
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Nodes that left the network during the last step.
    pub fn last_departures(&self) -> usize {
        self.departures
    }

    /// Current labels of the active nodes.
    pub fn partition(&self) -> Partition {
        let t = self.iteration as i64;
        Partition::from_iter(
            self.active
                .iter()
                .map(|&i| (NodeId(i), self.labels[i as usize])),
        )
        .with_window(t, t + 1)
    }

    /// Label of every pool node, `None` when it is outside the network.
    pub fn membership(&self) -> Vec<Option<u32>> {
        self.labels
            .iter()
            .zip(&self.in_network)
            .map(|(&l, &on)| on.then_some(l))
            .collect()
    }
}

/// Uniform labels over the pool and a uniform choice of `n` active nodes.
pub fn synth_init(cfg: &SynthConfig) -> Result<SynthState> {
    cfg.validate()?;
    let mut rng = crate::rng_from_seed(cfg.seed);
    let labels: Vec<u32> = (0..cfg.pool_size)
        .map(|_| rng.gen_range(0..cfg.communities))
        .collect();
    let mut active: Vec<u32> = index::sample(&mut rng, cfg.pool_size, cfg.network_size)
        .into_iter()
        .map(|i| i as u32)
        .collect();
    active.sort_unstable();
    let mut in_network = vec![false; cfg.pool_size];
    for &i in &active {
        in_network[i as usize] = true;
    }
    Ok(SynthState {
        labels,
        active,
        in_network,
        iteration: 0,
        departures: 0,
        rng,
    })
}

/// One churn phase followed by one flip phase.
pub fn synth_step(mut state: SynthState, cfg: &SynthConfig) -> SynthState {
    let rng = &mut state.rng;

    let mut leaving: Vec<u32> = state
        .active
        .iter()
        .copied()
        .filter(|_| rng.gen_bool(cfg.churn))
        .collect();
    let inactive: Vec<u32> = (0..state.labels.len() as u32)
        .filter(|&i| !state.in_network[i as usize])
        .collect();
    if leaving.len() > inactive.len() {
        // more departures than free pool slots: a random subset of them leaves
        let keep = index::sample(rng, leaving.len(), inactive.len());
        let mut chosen: Vec<u32> = keep.into_iter().map(|i| leaving[i]).collect();
        chosen.sort_unstable();
        leaving = chosen;
    }
    let arrivals: Vec<u32> = index::sample(rng, inactive.len(), leaving.len())
        .into_iter()
        .map(|i| inactive[i])
        .collect();
    for &i in &leaving {
        state.in_network[i as usize] = false;
    }
    for &i in &arrivals {
        state.in_network[i as usize] = true;
    }
    state.active = (0..state.labels.len() as u32)
        .filter(|&i| state.in_network[i as usize])
        .collect();
    state.departures = leaving.len();

    let k = cfg.communities;
    for &i in &state.active {
        if rng.gen_bool(cfg.flip) {
            let current = state.labels[i as usize];
            let pick = rng.gen_range(0..k - 1);
            state.labels[i as usize] = if pick >= current { pick + 1 } else { pick };
        }
    }
    state.iteration += 1;
    state
}

/// Output of a full simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthRun {
    /// one partition of the active nodes per iteration; entry 0 is the
    /// initial state
    pub partitions: Vec<Partition>,
    /// `membership[t][node]`: label of pool node at iteration `t`, or `None`
    /// while it is outside the network
    pub membership: Vec<Vec<Option<u32>>>,
}

/// Initial state plus `iterations - 1` steps.
pub fn synth_run(cfg: &SynthConfig) -> Result<SynthRun> {
    let mut state = synth_init(cfg)?;
    let mut partitions = Vec::with_capacity(cfg.iterations);
    let mut membership = Vec::with_capacity(cfg.iterations);
    for t in 0..cfg.iterations {
        if t > 0 {
            state = synth_step(state, cfg);
        }
        partitions.push(state.partition());
        membership.push(state.membership());
    }
    Ok(SynthRun {
        partitions,
        membership,
    })
}

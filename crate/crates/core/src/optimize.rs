//! Maximum-weight stable matchings through a minimum cut on the rotation poset.

use std::collections::{BTreeMap, BTreeSet};

use crate::algorithms::rotation_poset;
use crate::error::{Error, Result};
use crate::market::{Instance, Pair};
use crate::matching::Matching;
use crate::maxflow::Network;
use crate::represent::RotationPoset;
use crate::ringsets::Precedence;

/// Integer weights on acceptable pairs; unlisted pairs weigh 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Weights {
    map: BTreeMap<Pair, i64>,
}

impl Weights {
    pub fn zero() -> Self {
        Weights::default()
    }

    pub fn from_map(map: BTreeMap<Pair, i64>) -> Self {
        Weights { map }
    }

    pub fn get(&self, pair: Pair) -> i64 {
        self.map.get(&pair).copied().unwrap_or(0)
    }

    pub fn set(&mut self, pair: Pair, value: i64) {
        self.map.insert(pair, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pair, i64)> + '_ {
        self.map.iter().map(|(&p, &v)| (p, v))
    }

    /// `Σ_{e∈μ} w_e`.
    pub fn value(&self, mu: &Matching) -> Result<i64> {
        mu.pairs()
            .into_iter()
            .try_fold(0i64, |acc, p| acc.checked_add(self.get(p)))
            .ok_or(Error::WeightOverflow)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureSolution {
    pub upper: BTreeSet<usize>,
    pub value: i64,
    pub flow: i64,
    pub network_nodes: usize,
}

/// Heaviest upper set of a node-weighted poset; among optimal ones, the
/// inclusion-wise smallest.
pub fn max_weight_closure(weights: &[i64], order: &Precedence) -> Result<ClosureSolution> {
    let k = weights.len();
    let (source, sink) = (k, k + 1);
    let positive = weights
        .iter()
        .filter(|&&c| c > 0)
        .try_fold(0i64, |acc, &c| acc.checked_add(c))
        .ok_or(Error::WeightOverflow)?;
    let uncuttable = positive.checked_add(1).ok_or(Error::WeightOverflow)?;
    let mut net = Network::new(k + 2);
    for (i, &c) in weights.iter().enumerate() {
        if c > 0 {
            net.add_arc(source, i, c);
        } else if c < 0 {
            let cap = c.checked_neg().ok_or(Error::WeightOverflow)?;
            net.add_arc(i, sink, cap);
        }
    }
    for (above, below) in order.covers() {
        net.add_arc(below, above, uncuttable);
    }
    let flow = net.max_flow(source, sink)?;
    let side = net.reachable(source);
    let upper: BTreeSet<usize> = (0..k).filter(|&i| side[i]).collect();
    let value = upper.iter().map(|&i| weights[i]).sum();
    Ok(ClosureSolution {
        upper,
        value,
        flow,
        network_nodes: net.node_count(),
    })
}

/// `c_ρ = Σ_{e∈ρ⁺} w_e − Σ_{e∈ρ⁻} w_e`.
pub fn rotation_weights(poset: &RotationPoset, weights: &Weights) -> Result<Vec<i64>> {
    poset
        .rotations
        .iter()
        .map(|r| {
            let gain = r.plus.iter().try_fold(0i64, |acc, &p| acc.checked_add(weights.get(p)));
            let loss = r.minus.iter().try_fold(0i64, |acc, &p| acc.checked_add(weights.get(p)));
            gain.zip(loss)
                .and_then(|(g, l)| g.checked_sub(l))
                .ok_or(Error::WeightOverflow)
        })
        .collect()
}

pub fn max_weight_with_poset(
    instance: &Instance,
    poset: &RotationPoset,
    weights: &Weights,
) -> Result<(Matching, i64)> {
    let c = rotation_weights(poset, weights)?;
    let solution = max_weight_closure(&c, &poset.order)?;
    let mu = poset.realize(instance, &solution.upper)?;
    let value = weights.value(&mu)?;
    Ok((mu, value))
}

pub fn max_weight_stable_matching(instance: &Instance, weights: &Weights) -> Result<(Matching, i64)> {
    let poset = rotation_poset(instance)?;
    max_weight_with_poset(instance, &poset, weights)
}

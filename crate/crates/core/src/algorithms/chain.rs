//! Walking down the lattice: immediate descendants, a maximal chain, rotations
//! and their precedence.

use super::{break_marriage, deferred_acceptance};
use crate::error::{Error, Result};
use crate::market::{Instance, Side};
use crate::matching::{dominates, is_stable, Matching, PairSet};
use crate::represent::{Rotation, RotationPoset};
use crate::ringsets::{order_from_lambdas, peel_lambdas, Lambda};

/// Order in which the pairs of `μ' ∖ μ_W` are tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairOrder {
    #[default]
    Canonical,
    Reversed,
}

pub fn immediate_descendant(
    instance: &Instance,
    mu_prime: &Matching,
    mu_w: &Matching,
    order: PairOrder,
) -> Result<Matching> {
    let mut pairs: Vec<_> = mu_prime.pairs().into_iter().filter(|p| !mu_w.contains(*p)).collect();
    if order == PairOrder::Reversed {
        pairs.reverse();
    }
    let mut best: Option<Matching> = None;
    for p in pairs {
        let run = break_marriage(instance, mu_prime, mu_w, p.firm, p.worker)?;
        if !run.successful {
            continue;
        }
        best = match best {
            Some(current) if !dominates(instance, &run.matching, &current)? => Some(current),
            _ => Some(run.matching),
        };
    }
    best.ok_or(Error::NoDescendant)
}

/// A maximal chain from the firm-optimal to the worker-optimal matching and
/// the rotations between consecutive members.
pub fn maximal_chain(instance: &Instance) -> Result<(Vec<Matching>, Vec<Rotation>)> {
    maximal_chain_with(instance, PairOrder::Canonical)
}

pub fn maximal_chain_with(instance: &Instance, order: PairOrder) -> Result<(Vec<Matching>, Vec<Rotation>)> {
    let mu_f = deferred_acceptance(instance, Side::Firm)?;
    let mu_w = deferred_acceptance(instance, Side::Worker)?;
    chain_between(instance, mu_f, &mu_w, order)
}

fn chain_between(
    instance: &Instance,
    mu_f: Matching,
    mu_w: &Matching,
    order: PairOrder,
) -> Result<(Vec<Matching>, Vec<Rotation>)> {
    let bound = instance.acceptable_pairs().len() + 1;
    let mut chain = vec![mu_f];
    let mut rotations = Vec::new();
    while chain.last() != Some(mu_w) {
        if chain.len() > bound {
            return Err(Error::InvalidChain(format!("chain longer than {bound} matchings")));
        }
        let prev = chain.last().expect("nonempty");
        let next = immediate_descendant(instance, prev, mu_w, order)?;
        let (a, b) = (prev.pair_set(), next.pair_set());
        rotations.push(Rotation {
            index: chain.len(),
            plus: b.difference(&a).copied().collect(),
            minus: a.difference(&b).copied().collect(),
        });
        chain.push(next);
    }
    Ok((chain, rotations))
}

/// Λ(ρ_i) by undoing earlier rotations and testing stability.
pub fn rotation_lambdas(instance: &Instance, chain: &[Matching], rotations: &[Rotation]) -> Result<Vec<Lambda>> {
    peel_lambdas(
        rotations.len(),
        |i| chain[i].pair_set(),
        |mu: &PairSet, j| {
            let r = &rotations[j - 1];
            let step: PairSet = mu.symmetric_difference(&r.minus).copied().collect();
            step.symmetric_difference(&r.plus).copied().collect()
        },
        |pairs| match Matching::from_pairs(instance, pairs) {
            Ok(mu) => is_stable(instance, &mu),
            Err(_) => Ok(false),
        },
    )
}

pub fn rotation_poset(instance: &Instance) -> Result<RotationPoset> {
    rotation_poset_with(instance, PairOrder::Canonical)
}

pub fn rotation_poset_with(instance: &Instance, order: PairOrder) -> Result<RotationPoset> {
    let start = instance.oracle_calls();
    let mu_f = deferred_acceptance(instance, Side::Firm)?;
    let mu_w = deferred_acceptance(instance, Side::Worker)?;
    let (chain, rotations) = chain_between(instance, mu_f.clone(), &mu_w, order)?;
    let lambdas = rotation_lambdas(instance, &chain, &rotations)?;
    let precedence = order_from_lambdas(&lambdas);
    Ok(RotationPoset {
        mu_f,
        mu_w,
        rotations,
        lambdas,
        order: precedence,
        oracle_calls: instance.oracle_calls() - start,
    })
}

//! Deferred acceptance with incremental bookkeeping: after the first round only
//! agents whose sets changed are re-evaluated.

use super::{Trace, TraceStep};
use crate::agentset::AgentSet;
use crate::error::Result;
use crate::market::{AgentId, Instance, Pair, Side};
use crate::matching::Matching;

/// Firm-proposing returns the firm-optimal stable matching, worker-proposing
/// the worker-optimal one.
pub fn deferred_acceptance(instance: &Instance, proposers: Side) -> Result<Matching> {
    run(instance, proposers, false).map(|(mu, _)| mu)
}

pub fn deferred_acceptance_traced(instance: &Instance, proposers: Side) -> Result<(Matching, Trace)> {
    run(instance, proposers, true)
}

fn run(instance: &Instance, proposers: Side, tracing: bool) -> Result<(Matching, Trace)> {
    let receivers = proposers.other();
    let np = instance.count(proposers);
    let nr = instance.count(receivers);
    let pid = |index| AgentId { side: proposers, index };
    let rid = |index| AgentId { side: receivers, index };

    let mut live: Vec<AgentSet> = (0..np).map(|p| instance.acceptable(pid(p)).clone()).collect();
    let mut offers = Vec::with_capacity(np);
    for (p, x) in live.iter().enumerate() {
        offers.push(instance.choose(pid(p), x)?);
    }
    let mut received = vec![AgentSet::new(); nr];
    for (p, o) in offers.iter().enumerate() {
        for r in o.iter() {
            received[r].insert(p);
        }
    }
    let mut held = vec![AgentSet::new(); nr];
    let mut dirty_receivers: Vec<usize> = (0..nr).filter(|&r| !received[r].is_empty()).collect();
    let mut trace = Trace {
        proposers,
        steps: Vec::new(),
    };

    for step in 0.. {
        let mut rejections = Vec::new();
        for &r in &dirty_receivers {
            held[r] = instance.choose(rid(r), &received[r])?;
            rejections.extend(received[r].difference(&held[r]).iter().map(|p| (p, r)));
        }
        if tracing {
            trace.steps.push(TraceStep {
                step,
                live: live.clone(),
                received: received.clone(),
                held: held.clone(),
            });
        }
        if rejections.is_empty() {
            break;
        }
        let mut dirty_proposers = AgentSet::new();
        for (p, r) in rejections {
            live[p].remove(r);
            dirty_proposers.insert(p);
        }
        let mut touched = AgentSet::new();
        for p in dirty_proposers.iter() {
            let fresh = instance.choose(pid(p), &live[p])?;
            for r in offers[p].difference(&fresh).iter() {
                received[r].remove(p);
                touched.insert(r);
            }
            for r in fresh.difference(&offers[p]).iter() {
                received[r].insert(p);
                touched.insert(r);
            }
            offers[p] = fresh;
        }
        dirty_receivers = touched.to_vec();
    }

    let pairs: Vec<Pair> = held
        .iter()
        .enumerate()
        .flat_map(|(r, ps)| {
            ps.iter().map(move |p| match proposers {
                Side::Firm => Pair::new(p, r),
                Side::Worker => Pair::new(r, p),
            })
        })
        .collect();
    Ok((Matching::from_pairs(instance, &pairs)?, trace))
}

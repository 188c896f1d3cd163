//! Restarting firm proposals from the closure of a stable matching after one
//! marriage `(f', w')` is broken.

use super::{Trace, TraceStep};
use crate::agentset::AgentSet;
use crate::error::{Error, Result};
use crate::market::{Instance, Pair, Side};
use crate::matching::{closure, Matching};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BreakMarriageResult {
    pub matching: Matching,
    pub successful: bool,
    pub steps: usize,
    pub trace: Trace,
}

/// Requires `(firm, worker) ∈ mu_prime ∖ mu_w`.
pub fn break_marriage(
    instance: &Instance,
    mu_prime: &Matching,
    mu_w: &Matching,
    firm: usize,
    worker: usize,
) -> Result<BreakMarriageResult> {
    let pair = Pair::new(firm, worker);
    if !mu_prime.contains(pair) || mu_w.contains(pair) {
        return Err(Error::Precondition(format!(
            "({}) must be in μ' but not in the worker-optimal matching",
            instance.format_pair(pair)
        )));
    }
    let nw = instance.worker_count();
    let mut live = closure(instance, mu_prime)?;
    live[firm].remove(worker);

    let mut steps = Vec::new();
    for step in 0.. {
        let mut received = vec![AgentSet::new(); nw];
        for (f, x) in live.iter().enumerate() {
            for w in instance.choose_firm(f, x)?.iter() {
                received[w].insert(f);
            }
        }
        let mut held = Vec::with_capacity(nw);
        let mut kept_broken = false;
        for (w, x) in received.iter().enumerate() {
            if w == worker {
                let chosen = instance.choose_worker(w, &x.with(firm))?;
                kept_broken = chosen.contains(firm);
                held.push(chosen.without(firm));
            } else {
                held.push(instance.choose_worker(w, x)?);
            }
        }
        steps.push(TraceStep {
            step,
            live: live.clone(),
            received: received.clone(),
            held: held.clone(),
        });
        let mut changed = false;
        for (w, x) in received.iter().enumerate() {
            for f in x.difference(&held[w]).iter() {
                changed |= live[f].remove(w);
            }
        }
        if !changed {
            let pairs: Vec<Pair> = held
                .iter()
                .enumerate()
                .flat_map(|(w, fs)| fs.iter().map(move |f| Pair::new(f, w)))
                .collect();
            return Ok(BreakMarriageResult {
                matching: Matching::from_pairs(instance, &pairs)?,
                successful: !kept_broken,
                steps: step + 1,
                trace: Trace {
                    proposers: Side::Firm,
                    steps,
                },
            });
        }
    }
    unreachable!("live sets shrink every round")
}

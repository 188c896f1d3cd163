//! Proposal algorithms and the rotation-poset pipeline.

pub mod break_marriage;
pub mod chain;
pub mod da;

use std::fmt::Write as _;

use crate::agentset::AgentSet;
use crate::market::{Instance, Side};

pub use break_marriage::{break_marriage, BreakMarriageResult};
pub use chain::{immediate_descendant, maximal_chain, maximal_chain_with, rotation_lambdas, rotation_poset, rotation_poset_with, PairOrder};
pub use da::{deferred_acceptance, deferred_acceptance_traced};

/// Snapshot of one proposal round: live sets of the proposing side, the offers
/// each receiver got, and what each receiver kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub step: usize,
    pub live: Vec<AgentSet>,
    pub received: Vec<AgentSet>,
    pub held: Vec<AgentSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub proposers: Side,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    /// One line per step: `s=<n> X f1:{..} ... | X w1:{..} ... | Y w1:{..} ...`.
    pub fn to_text(&self, instance: &Instance) -> String {
        let receivers = self.proposers.other();
        let mut out = String::new();
        for st in &self.steps {
            let _ = write!(out, "s={} X", st.step);
            for (i, set) in st.live.iter().enumerate() {
                let name = side_name(instance, self.proposers, i);
                let _ = write!(out, " {}:{}", name, instance.format_set(receivers, set));
            }
            out.push_str(" | X");
            for (i, set) in st.received.iter().enumerate() {
                let name = side_name(instance, receivers, i);
                let _ = write!(out, " {}:{}", name, instance.format_set(self.proposers, set));
            }
            out.push_str(" | Y");
            for (i, set) in st.held.iter().enumerate() {
                let name = side_name(instance, receivers, i);
                let _ = write!(out, " {}:{}", name, instance.format_set(self.proposers, set));
            }
            out.push('\n');
        }
        out
    }
}

fn side_name(instance: &Instance, side: Side, index: usize) -> &str {
    match side {
        Side::Firm => instance.firm_name(index),
        Side::Worker => instance.worker_name(index),
    }
}

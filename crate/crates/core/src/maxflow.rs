//! Integer max-flow by shortest augmenting paths.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
}

#[derive(Debug, Clone)]
pub struct Network {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    pub fn new(nodes: usize) -> Self {
        Network {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64) {
        self.adj[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.adj[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0 });
    }

    /// Pushes a maximum flow and returns its value; afterwards the network
    /// holds the residual capacities.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> Result<i64> {
        let mut total: i64 = 0;
        loop {
            let mut via = vec![usize::MAX; self.adj.len()];
            let mut seen = vec![false; self.adj.len()];
            seen[source] = true;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                for &a in &self.adj[u] {
                    let v = self.arcs[a].to;
                    if !seen[v] && self.arcs[a].cap > 0 {
                        seen[v] = true;
                        via[v] = a;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[sink] {
                return Ok(total);
            }
            let mut bottleneck = i64::MAX;
            let mut v = sink;
            while v != source {
                let a = via[v];
                bottleneck = bottleneck.min(self.arcs[a].cap);
                v = self.arcs[a ^ 1].to;
            }
            let mut v = sink;
            while v != source {
                let a = via[v];
                self.arcs[a].cap -= bottleneck;
                self.arcs[a ^ 1].cap += bottleneck;
                v = self.arcs[a ^ 1].to;
            }
            total = total.checked_add(bottleneck).ok_or(Error::WeightOverflow)?;
        }
    }

    /// Nodes reachable from `source` through arcs with residual capacity.
    pub fn reachable(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[source] = true;
        let mut stack = vec![source];
        while let Some(u) = stack.pop() {
            for &a in &self.adj[u] {
                let v = self.arcs[a].to;
                if !seen[v] && self.arcs[a].cap > 0 {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

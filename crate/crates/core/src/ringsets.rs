//! Rings of sets presented by a maximal chain and a membership test.
//!
//! Minimal differences are indexed `0..k` in vectors; the Λ index sets use
//! 1-based chain positions, so `Λ(K_i)` always contains `i` and lies in `1..=i`.

use std::collections::BTreeSet;

use crate::agentset::AgentSet;
use crate::error::{Error, Result};

pub type Lambda = BTreeSet<usize>;

/// `K_i = C_i ∖ C_{i−1}` for `i = 1..k`.
pub fn minimal_differences(chain: &[AgentSet]) -> Result<Vec<AgentSet>> {
    chain
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            if w[0].is_subset(&w[1]) && w[0] != w[1] {
                Ok(w[1].difference(&w[0]))
            } else {
                Err(Error::InvalidChain(format!(
                    "C_{} is not a proper subset of C_{}",
                    i,
                    i + 1
                )))
            }
        })
        .collect()
}

/// The peeling loop shared by sets and matchings: starting from `top(i)`, try
/// to remove each earlier step `j = i−1, ..., 1` and keep the removal when the
/// result is a member.
pub fn peel_lambdas<S>(
    k: usize,
    mut top: impl FnMut(usize) -> S,
    mut remove: impl FnMut(&S, usize) -> S,
    mut member: impl FnMut(&S) -> Result<bool>,
) -> Result<Vec<Lambda>> {
    let mut lambdas = Vec::with_capacity(k);
    for i in 1..=k {
        let mut h = top(i);
        let mut lambda: Lambda = (1..=i).collect();
        for j in (1..i).rev() {
            let candidate = remove(&h, j);
            if member(&candidate)? {
                h = candidate;
                lambda.remove(&j);
            }
        }
        lambdas.push(lambda);
    }
    Ok(lambdas)
}

/// Λ(K_i) for every minimal difference of a maximal chain.
pub fn irreducibles_via_chain(
    chain: &[AgentSet],
    membership: impl FnMut(&AgentSet) -> Result<bool>,
) -> Result<Vec<Lambda>> {
    let diffs = minimal_differences(chain)?;
    peel_lambdas(
        diffs.len(),
        |i| chain[i].clone(),
        |h, j| h.difference(&diffs[j - 1]),
        membership,
    )
}

/// A finite partial order on `0..n`, stored as its full strict relation.
///
/// `above(a, b)` means `a` is strictly greater than `b`; upper sets are closed
/// under going up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Precedence {
    n: usize,
    greater: Vec<Vec<bool>>,
}

impl Precedence {
    pub fn empty(n: usize) -> Self {
        Precedence {
            n,
            greater: vec![vec![false; n]; n],
        }
    }

    /// From strict relations `(a, b)` meaning `a > b`; closes transitively.
    pub fn from_relations(n: usize, relations: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut p = Precedence::empty(n);
        for (a, b) in relations {
            p.greater[a][b] = true;
        }
        for m in 0..n {
            for a in 0..n {
                if p.greater[a][m] {
                    for b in 0..n {
                        if p.greater[m][b] {
                            p.greater[a][b] = true;
                        }
                    }
                }
            }
        }
        if (0..n).any(|a| p.greater[a][a]) {
            return Err(Error::InvalidChain("relation contains a cycle".into()));
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn above(&self, a: usize, b: usize) -> bool {
        self.greater[a][b]
    }

    /// Strict pairs `(a, b)` with nothing strictly between, sorted.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if self.greater[a][b] && !(0..self.n).any(|m| self.greater[a][m] && self.greater[m][b]) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn relations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if self.greater[a][b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Elements with nothing below them.
    pub fn minimal(&self) -> Vec<usize> {
        (0..self.n).filter(|&a| !(0..self.n).any(|b| self.greater[a][b])).collect()
    }

    /// Elements with nothing above them.
    pub fn maximal(&self) -> Vec<usize> {
        (0..self.n).filter(|&a| !(0..self.n).any(|b| self.greater[b][a])).collect()
    }

    pub fn is_upper_set(&self, set: &BTreeSet<usize>) -> bool {
        set.iter().all(|&b| b < self.n && (0..self.n).all(|a| !self.greater[a][b] || set.contains(&a)))
    }

    /// A linear extension listing greater elements first, smallest index on ties.
    fn topological(&self) -> Vec<usize> {
        let mut placed = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        while order.len() < self.n {
            let next = (0..self.n)
                .find(|&b| !placed[b] && (0..self.n).all(|a| !self.greater[a][b] || placed[a]))
                .expect("acyclic");
            placed[next] = true;
            order.push(next);
        }
        order
    }

    /// Every upper set, by depth-first descent (exclude before include).
    pub fn upper_sets(&self, limit: u64) -> Result<Vec<BTreeSet<usize>>> {
        let order = self.topological();
        let mut out = Vec::new();
        let mut current = vec![false; self.n];
        self.descend(&order, 0, &mut current, &mut out, limit)?;
        Ok(out)
    }

    fn descend(
        &self,
        order: &[usize],
        depth: usize,
        current: &mut Vec<bool>,
        out: &mut Vec<BTreeSet<usize>>,
        limit: u64,
    ) -> Result<()> {
        if depth == order.len() {
            if out.len() as u64 >= limit {
                return Err(Error::LimitExceeded { limit });
            }
            out.push((0..self.n).filter(|&i| current[i]).collect());
            return Ok(());
        }
        let b = order[depth];
        self.descend(order, depth + 1, current, out, limit)?;
        if (0..self.n).all(|a| !self.greater[a][b] || current[a]) {
            current[b] = true;
            self.descend(order, depth + 1, current, out, limit)?;
            current[b] = false;
        }
        Ok(())
    }
}

/// `K_a ⊒ K_b ⇔ Λ(K_a) ⊆ Λ(K_b)`.
pub fn order_from_lambdas(lambdas: &[Lambda]) -> Precedence {
    let n = lambdas.len();
    let mut p = Precedence::empty(n);
    for a in 0..n {
        for b in 0..n {
            if a != b && lambdas[a].is_subset(&lambdas[b]) {
                p.greater[a][b] = true;
            }
        }
    }
    p
}

/// `C_0 ∪ ⋃{K_i : i ∈ upper}` (0-based indices).
pub fn reconstruct(
    order: &Precedence,
    differences: &[AgentSet],
    c0: &AgentSet,
    upper: &BTreeSet<usize>,
) -> Result<AgentSet> {
    if !order.is_upper_set(upper) {
        return Err(Error::NotUpperSet(format!("{upper:?}")));
    }
    Ok(upper.iter().fold(c0.clone(), |acc, &i| acc.union(&differences[i])))
}

/// 0/1 matrix over `base_size × differences` with columns `χ^{K_j}` and `x0 = χ^{C_0}`.
pub fn birkhoff_matrix(
    differences: &[AgentSet],
    c0: &AgentSet,
    base_size: usize,
) -> Result<(Vec<Vec<i64>>, Vec<i64>)> {
    for a in 0..differences.len() {
        for b in a + 1..differences.len() {
            if !differences[a].intersection(&differences[b]).is_empty() {
                return Err(Error::OverlappingDifferences(a, b));
            }
        }
    }
    let matrix = (0..base_size)
        .map(|e| differences.iter().map(|k| i64::from(k.contains(e))).collect())
        .collect();
    let x0 = (0..base_size).map(|e| i64::from(c0.contains(e))).collect();
    Ok((matrix, x0))
}

//! Brute-force ground truth for small instances.

use std::collections::BTreeMap;

use crate::agentset::AgentSet;
use crate::error::{Error, Result};
use crate::market::{AgentId, Instance, Pair};
use crate::matching::{
    dominates, find_blocking_pair, join, meet, sort_canonical, worker_dominated, Matching, PairSet,
};
use crate::optimize::Weights;

pub const DEFAULT_NODE_LIMIT: u64 = 10_000_000;

struct Search<'a> {
    instance: &'a Instance,
    // firm f's candidate subsets: individually rational and within the size cap
    options: Vec<Vec<AgentSet>>,
    // workers whose acceptable firms all have index <= d
    complete_after: Vec<Vec<usize>>,
    assignment: Vec<AgentSet>,
    worker_sets: Vec<AgentSet>,
    nodes: u64,
    limit: u64,
    found: Vec<Matching>,
}

impl Search<'_> {
    fn descend(&mut self, firm: usize) -> Result<()> {
        let inst = self.instance;
        if firm == inst.firm_count() {
            // each worker must keep everything it was assigned
            for w in 0..inst.worker_count() {
                if inst.choose_worker(w, &self.worker_sets[w])? != self.worker_sets[w] {
                    return Ok(());
                }
            }
            let pairs: Vec<Pair> = self
                .assignment
                .iter()
                .enumerate()
                .flat_map(|(f, ws)| ws.iter().map(move |w| Pair::new(f, w)))
                .collect();
            let mu = Matching::from_pairs(inst, &pairs)?;
            if find_blocking_pair(inst, &mu)?.is_none() {
                self.found.push(mu);
            }
            return Ok(());
        }
        for choice in self.options[firm].clone() {
            self.nodes += 1;
            if self.nodes > self.limit {
                return Err(Error::LimitExceeded { limit: self.limit });
            }
            for w in choice.iter() {
                self.worker_sets[w].insert(firm);
            }
            self.assignment[firm] = choice.clone();
            if self.consistent_so_far(firm)? {
                self.descend(firm + 1)?;
            }
            for w in choice.iter() {
                self.worker_sets[w].remove(firm);
            }
        }
        self.assignment[firm] = AgentSet::new();
        Ok(())
    }

    /// Prunes on workers whose partner sets are final after `firm`.
    fn consistent_so_far(&self, firm: usize) -> Result<bool> {
        let inst = self.instance;
        for &w in &self.complete_after[firm] {
            let held = &self.worker_sets[w];
            if inst.choose_worker(w, held)? != *held {
                return Ok(false);
            }
            for f in 0..=firm {
                if held.contains(f) || !inst.acceptable(AgentId::worker(w)).contains(f) {
                    continue;
                }
                let own = &self.assignment[f];
                if inst.choose_firm(f, &own.with(w))?.contains(w)
                    && inst.choose_worker(w, &held.with(f))?.contains(f)
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn subsets_within(universe: &[usize], cap: usize) -> impl Iterator<Item = AgentSet> + '_ {
    (0u64..1 << universe.len())
        .filter(move |m| m.count_ones() as usize <= cap)
        .map(move |m| AgentSet::from_mask(universe, m))
}

/// Every stable matching by exhaustive search, in canonical order.
pub fn enumerate_stable_bruteforce(instance: &Instance, limit: u64) -> Result<Vec<Matching>> {
    let mut found = stable_unsorted(instance, limit)?;
    let stable_pairs: PairSet = found.iter().flat_map(|m| m.pairs()).collect();
    sort_canonical(instance, &mut found, &stable_pairs)?;
    Ok(found)
}

fn stable_unsorted(instance: &Instance, limit: u64) -> Result<Vec<Matching>> {
    let nf = instance.firm_count();
    let nw = instance.worker_count();
    let mut options = Vec::with_capacity(nf);
    for f in 0..nf {
        let universe = instance.acceptable(AgentId::firm(f)).to_vec();
        if universe.len() > 20 {
            return Err(Error::LimitExceeded { limit });
        }
        let cap = instance.declared_quota(AgentId::firm(f)).unwrap_or(universe.len());
        let mut list = Vec::new();
        for s in subsets_within(&universe, cap) {
            if instance.choose_firm(f, &s)? == s {
                list.push(s);
            }
        }
        options.push(list);
    }
    let mut complete_after = vec![Vec::new(); nf];
    for w in 0..nw {
        if let Some(last) = instance.acceptable(AgentId::worker(w)).iter().last() {
            complete_after[last].push(w);
        }
    }
    let mut search = Search {
        instance,
        options,
        complete_after,
        assignment: vec![AgentSet::new(); nf],
        worker_sets: vec![AgentSet::new(); nw],
        nodes: 0,
        limit,
        found: Vec::new(),
    };
    search.descend(0)?;
    Ok(search.found)
}

/// Best stable matching by enumeration; ties go to the smallest pair list.
pub fn max_weight_bruteforce(instance: &Instance, weights: &Weights, limit: u64) -> Result<(Matching, i64)> {
    let mut best: Option<(i64, Vec<Pair>, Matching)> = None;
    for mu in stable_unsorted(instance, limit)? {
        let value = weights.value(&mu)?;
        let pairs = mu.pairs();
        let better = match &best {
            None => true,
            Some((v, p, _)) => value > *v || (value == *v && pairs < *p),
        };
        if better {
            best = Some((value, pairs, mu));
        }
    }
    best.map(|(v, _, mu)| (mu, v))
        .ok_or_else(|| Error::Precondition("instance has no stable matching".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    PartialOrder,
    JoinClosed,
    MeetClosed,
    Distributive,
    Polarity,
    EqualQuota,
    Concordance,
    FullQuota,
}

impl Axiom {
    pub const ALL: [Axiom; 8] = [
        Axiom::PartialOrder,
        Axiom::JoinClosed,
        Axiom::MeetClosed,
        Axiom::Distributive,
        Axiom::Polarity,
        Axiom::EqualQuota,
        Axiom::Concordance,
        Axiom::FullQuota,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::PartialOrder => "partial-order",
            Axiom::JoinClosed => "join-closed",
            Axiom::MeetClosed => "meet-closed",
            Axiom::Distributive => "distributive",
            Axiom::Polarity => "polarity",
            Axiom::EqualQuota => "equal-quota",
            Axiom::Concordance => "concordance",
            Axiom::FullQuota => "full-quota",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeReport {
    pub matchings: usize,
    /// First counterexample per failed axiom.
    pub failures: BTreeMap<Axiom, String>,
    /// Common assignment size per agent name, where all stable matchings agree.
    pub q_bar: Vec<(String, Option<usize>)>,
}

impl LatticeReport {
    pub fn holds(&self, axiom: Axiom) -> bool {
        !self.failures.contains_key(&axiom)
    }

    pub fn all_hold(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("stable matchings: {}\n", self.matchings);
        for a in Axiom::ALL {
            match self.failures.get(&a) {
                None => out.push_str(&format!("{}: PASS\n", a.name())),
                Some(w) => out.push_str(&format!("{}: FAIL {}\n", a.name(), w)),
            }
        }
        let qs: Vec<String> = self
            .q_bar
            .iter()
            .map(|(n, q)| format!("{}={}", n, q.map_or("?".to_string(), |q| q.to_string())))
            .collect();
        out.push_str(&format!("q-bar: {}\n", qs.join(" ")));
        out
    }
}

/// Exhaustive check of the lattice properties over all stable matchings.
pub fn verify_lattice(instance: &Instance, limit: u64) -> Result<LatticeReport> {
    let all = enumerate_stable_bruteforce(instance, limit)?;
    let mut failures: BTreeMap<Axiom, String> = BTreeMap::new();
    let mut fail = |axiom: Axiom, witness: String| {
        failures.entry(axiom).or_insert(witness);
    };
    let d = |m: &Matching| m.describe(instance);
    let n = all.len();

    let mut dom = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            dom[i][j] = dominates(instance, &all[i], &all[j])?;
            if worker_dominated(instance, &all[i], &all[j])? != dom[i][j] {
                fail(Axiom::Polarity, format!("{} vs {}", d(&all[i]), d(&all[j])));
            }
        }
    }
    for i in 0..n {
        if !dom[i][i] {
            fail(Axiom::PartialOrder, format!("not reflexive at {}", d(&all[i])));
        }
        for j in 0..n {
            if i != j && dom[i][j] && dom[j][i] {
                fail(Axiom::PartialOrder, format!("{} and {} dominate each other", d(&all[i]), d(&all[j])));
            }
            for k in 0..n {
                if dom[i][j] && dom[j][k] && !dom[i][k] {
                    fail(Axiom::PartialOrder, format!("not transitive through {}", d(&all[j])));
                }
            }
        }
    }

    let index = |m: &Matching| all.iter().position(|x| x == m);
    let mut joins = vec![vec![None; n]; n];
    let mut meets = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            let jm = join(instance, &all[i], &all[j])?;
            let mm = meet(instance, &all[i], &all[j])?;
            joins[i][j] = index(&jm);
            meets[i][j] = index(&mm);
            if joins[i][j].is_none() {
                fail(Axiom::JoinClosed, format!("{} ∨ {} = {} is not stable", d(&all[i]), d(&all[j]), d(&jm)));
            }
            if meets[i][j].is_none() {
                fail(Axiom::MeetClosed, format!("{} ∧ {} = {} is not stable", d(&all[i]), d(&all[j]), d(&mm)));
            }
            for f in 0..instance.firm_count() {
                let common = all[i].of_firm(f).intersection(all[j].of_firm(f));
                if !common.is_subset(jm.of_firm(f)) {
                    fail(Axiom::Concordance, format!("{} and {} at {}", d(&all[i]), d(&all[j]), instance.firm_name(f)));
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs = meets[j][k].and_then(|m| joins[i][m]);
                let rhs = match (joins[i][j], joins[i][k]) {
                    (Some(a), Some(b)) => meets[a][b],
                    _ => None,
                };
                if lhs.is_none() || lhs != rhs {
                    fail(
                        Axiom::Distributive,
                        format!("triple {}, {}, {}", d(&all[i]), d(&all[j]), d(&all[k])),
                    );
                }
            }
        }
    }

    let mut q_bar = Vec::new();
    for side_agents in [
        instance.agents_of(crate::market::Side::Firm).collect::<Vec<_>>(),
        instance.agents_of(crate::market::Side::Worker).collect::<Vec<_>>(),
    ] {
        for a in side_agents {
            let sets: Vec<&AgentSet> = all
                .iter()
                .map(|m| match a.side {
                    crate::market::Side::Firm => m.of_firm(a.index),
                    crate::market::Side::Worker => m.of_worker(a.index),
                })
                .collect();
            let sizes: Vec<usize> = sets.iter().map(|s| s.len()).collect();
            let common = sizes.first().copied().filter(|s| sizes.iter().all(|x| x == s));
            if common.is_none() && !sizes.is_empty() {
                fail(Axiom::EqualQuota, format!("{} has sizes {:?}", instance.name(a), sizes));
            }
            if a.side == crate::market::Side::Worker {
                if let (Some(qb), Some(q)) = (common, instance.quota(a)) {
                    if qb < q && sets.iter().any(|s| *s != sets[0]) {
                        fail(Axiom::FullQuota, format!("{} is below quota but changes partners", instance.name(a)));
                    }
                }
            }
            q_bar.push((instance.name(a).to_string(), common));
        }
    }

    Ok(LatticeReport {
        matchings: n,
        failures,
        q_bar,
    })
}

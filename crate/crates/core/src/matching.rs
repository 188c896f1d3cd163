//! Matchings, stability, the firm-side lattice operations, closures and P-sets.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::agentset::AgentSet;
use crate::error::{Error, Result};
use crate::market::{Instance, Pair};

pub type PairSet = BTreeSet<Pair>;

/// A set of acceptable pairs, stored from both sides.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    firms: Vec<AgentSet>,
    workers: Vec<AgentSet>,
}

impl Matching {
    pub fn empty(instance: &Instance) -> Self {
        Matching {
            firms: vec![AgentSet::new(); instance.firm_count()],
            workers: vec![AgentSet::new(); instance.worker_count()],
        }
    }

    pub fn from_pairs<'a>(instance: &Instance, pairs: impl IntoIterator<Item = &'a Pair>) -> Result<Self> {
        let mut mu = Matching::empty(instance);
        for &p in pairs {
            if !instance.is_acceptable(p) {
                return Err(Error::Precondition(format!(
                    "pair ({}) is not acceptable",
                    if p.firm < instance.firm_count() && p.worker < instance.worker_count() {
                        instance.format_pair(p)
                    } else {
                        format!("{} {}", p.firm, p.worker)
                    }
                )));
            }
            mu.firms[p.firm].insert(p.worker);
            mu.workers[p.worker].insert(p.firm);
        }
        Ok(mu)
    }

    /// From per-firm worker sets, e.g. `(f1:{w3,w4}, f2:{w1,w2}, ...)`.
    pub fn from_firm_sets(instance: &Instance, sets: &[AgentSet]) -> Result<Self> {
        if sets.len() != instance.firm_count() {
            return Err(Error::Precondition(format!(
                "expected {} firm sets, got {}",
                instance.firm_count(),
                sets.len()
            )));
        }
        let pairs: Vec<Pair> = sets
            .iter()
            .enumerate()
            .flat_map(|(f, ws)| ws.iter().map(move |w| Pair::new(f, w)))
            .collect();
        Matching::from_pairs(instance, &pairs)
    }

    pub fn of_firm(&self, firm: usize) -> &AgentSet {
        &self.firms[firm]
    }

    pub fn of_worker(&self, worker: usize) -> &AgentSet {
        &self.workers[worker]
    }

    pub fn contains(&self, pair: Pair) -> bool {
        self.firms.get(pair.firm).is_some_and(|s| s.contains(pair.worker))
    }

    /// Pairs in canonical order.
    pub fn pairs(&self) -> Vec<Pair> {
        self.firms
            .iter()
            .enumerate()
            .flat_map(|(f, ws)| ws.iter().map(move |w| Pair::new(f, w)))
            .collect()
    }

    pub fn pair_set(&self) -> PairSet {
        self.pairs().into_iter().collect()
    }

    pub fn len(&self) -> usize {
        self.firms.iter().map(AgentSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.firms.iter().all(AgentSet::is_empty)
    }

    pub fn firm_count(&self) -> usize {
        self.firms.len()
    }

    pub fn worker_count(&self) -> usize {
        self.workers.len()
    }

    /// 0/1 vector indexed by `instance.acceptable_pairs()`.
    pub fn characteristic(&self, instance: &Instance) -> Vec<i64> {
        instance
            .acceptable_pairs()
            .into_iter()
            .map(|p| i64::from(self.contains(p)))
            .collect()
    }

    /// One `<firm> <worker>` line per pair, canonical order.
    pub fn to_text(&self, instance: &Instance) -> String {
        let mut out = String::new();
        for p in self.pairs() {
            let _ = writeln!(out, "{}", instance.format_pair(p));
        }
        out
    }

    /// `(f1:{w3,w4}, f2:{w1,w2})`
    pub fn describe(&self, instance: &Instance) -> String {
        let parts: Vec<String> = (0..self.firms.len())
            .map(|f| {
                format!(
                    "{}:{}",
                    instance.firm_name(f),
                    instance.format_set(crate::market::Side::Worker, &self.firms[f])
                )
            })
            .collect();
        format!("({})", parts.join(", "))
    }
}

pub fn is_individually_rational(instance: &Instance, mu: &Matching) -> Result<bool> {
    for f in 0..mu.firms.len() {
        if instance.choose_firm(f, &mu.firms[f])? != mu.firms[f] {
            return Ok(false);
        }
    }
    for w in 0..mu.workers.len() {
        if instance.choose_worker(w, &mu.workers[w])? != mu.workers[w] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(f,w)` with `w ∈ C_f(μ(f)∪{w})` and `f ∈ C_w(μ(w)∪{f})`, if any.
pub fn find_blocking_pair(instance: &Instance, mu: &Matching) -> Result<Option<Pair>> {
    for p in instance.acceptable_pairs() {
        if mu.contains(p) {
            continue;
        }
        let firm_wants = instance
            .choose_firm(p.firm, &mu.firms[p.firm].with(p.worker))?
            .contains(p.worker);
        if firm_wants
            && instance
                .choose_worker(p.worker, &mu.workers[p.worker].with(p.firm))?
                .contains(p.firm)
        {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

pub fn is_stable(instance: &Instance, mu: &Matching) -> Result<bool> {
    Ok(is_individually_rational(instance, mu)? && find_blocking_pair(instance, mu)?.is_none())
}

/// Firm-side dominance `μ1 ⪰ μ2`.
pub fn dominates(instance: &Instance, mu1: &Matching, mu2: &Matching) -> Result<bool> {
    for f in 0..mu1.firms.len() {
        if instance.choose_firm(f, &mu1.firms[f].union(&mu2.firms[f]))? != mu1.firms[f] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The same order read from the worker side: `C_w(μ1(w)∪μ2(w)) = μ2(w)` for all w.
pub fn worker_dominated(instance: &Instance, mu1: &Matching, mu2: &Matching) -> Result<bool> {
    for w in 0..mu1.workers.len() {
        if instance.choose_worker(w, &mu1.workers[w].union(&mu2.workers[w]))? != mu2.workers[w] {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn join(instance: &Instance, mu1: &Matching, mu2: &Matching) -> Result<Matching> {
    let sets = (0..mu1.firms.len())
        .map(|f| instance.choose_firm(f, &mu1.firms[f].union(&mu2.firms[f])))
        .collect::<Result<Vec<_>>>()?;
    Matching::from_firm_sets(instance, &sets)
}

pub fn meet(instance: &Instance, mu1: &Matching, mu2: &Matching) -> Result<Matching> {
    let sets = (0..mu1.firms.len())
        .map(|f| {
            let union = mu1.firms[f].union(&mu2.firms[f]);
            let joined = instance.choose_firm(f, &union)?;
            Ok(union
                .difference(&joined)
                .union(&mu1.firms[f].intersection(&mu2.firms[f])))
        })
        .collect::<Result<Vec<_>>>()?;
    Matching::from_firm_sets(instance, &sets)
}

/// `X̄_f(μ) = {w ∈ W(f) : C_f(μ(f)∪{w}) = μ(f)}` for every firm.
pub fn closure(instance: &Instance, mu: &Matching) -> Result<Vec<AgentSet>> {
    (0..mu.firms.len())
        .map(|f| {
            let own = &mu.firms[f];
            let mut out = AgentSet::new();
            for w in instance.acceptable(crate::market::AgentId::firm(f)).iter() {
                if own.contains(w) || instance.choose_firm(f, &own.with(w))? == *own {
                    out.insert(w);
                }
            }
            Ok(out)
        })
        .collect()
}

/// `P(μ) = {(f,w) : (f,w) stable pair, w ∈ C_f(μ(f)∪{w})}`.
pub fn p_set(instance: &Instance, mu: &Matching, stable_pairs: &PairSet) -> Result<PairSet> {
    if let Some(p) = stable_pairs.iter().find(|p| !instance.is_acceptable(**p)) {
        return Err(Error::Precondition(format!(
            "stable pair ({} {}) is not acceptable",
            p.firm, p.worker
        )));
    }
    if !is_stable(instance, mu)? {
        return Err(Error::Precondition("P-sets are defined for stable matchings only".into()));
    }
    let mut out = PairSet::new();
    for &p in stable_pairs {
        if mu.contains(p)
            || instance
                .choose_firm(p.firm, &mu.firms[p.firm].with(p.worker))?
                .contains(p.worker)
        {
            out.insert(p);
        }
    }
    Ok(out)
}

/// Sorts stable matchings by `|P(μ)|`, then by pair list. Firm-preferred
/// matchings have smaller P-sets, so the firm-optimal one comes first.
pub fn sort_canonical(instance: &Instance, matchings: &mut Vec<Matching>, stable_pairs: &PairSet) -> Result<()> {
    let mut keyed = matchings
        .drain(..)
        .map(|mu| Ok(((p_set(instance, &mu, stable_pairs)?.len(), mu.pairs()), mu)))
        .collect::<Result<Vec<_>>>()?;
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    matchings.extend(keyed.into_iter().map(|(_, mu)| mu));
    Ok(())
}

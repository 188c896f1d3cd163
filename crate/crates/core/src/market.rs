//! Two-sided markets: agents, acceptability, and evaluable choice functions.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::agentset::AgentSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Firm,
    Worker,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Firm => Side::Worker,
            Side::Worker => Side::Firm,
        }
    }
}

/// An agent: its side and its 0-based position in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId {
    pub side: Side,
    pub index: usize,
}

impl AgentId {
    pub fn firm(index: usize) -> Self {
        AgentId { side: Side::Firm, index }
    }

    pub fn worker(index: usize) -> Self {
        AgentId { side: Side::Worker, index }
    }
}

/// An acceptable firm-worker pair, ordered by firm index then worker index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    pub firm: usize,
    pub worker: usize,
}

impl Pair {
    pub fn new(firm: usize, worker: usize) -> Self {
        Pair { firm, worker }
    }
}

/// A choice function in one of the supported concrete forms.
///
/// Partner indices refer to the opposite side of the market.
#[derive(Clone, PartialEq, Eq)]
pub enum ChoiceSpec {
    /// Maximizer-collecting: the union over strict orders of each order's
    /// best element in the offered set.
    Mc(McChoice),
    /// One strict order and a quota; picks the top `quota` offered partners.
    Responsive { order: Vec<usize>, quota: usize },
    /// Explicit lookup table, used for counterexample fixtures.
    Table(HashMap<AgentSet, AgentSet>),
}

#[derive(Clone, PartialEq, Eq)]
pub struct McChoice {
    relations: Vec<Vec<usize>>,
    // ranks[i][partner] = position of partner in relation i (u32::MAX if absent)
    ranks: Vec<Vec<u32>>,
}

impl McChoice {
    pub fn relations(&self) -> &[Vec<usize>] {
        &self.relations
    }
}

impl ChoiceSpec {
    pub fn mc(relations: Vec<Vec<usize>>) -> Self {
        let width = relations
            .iter()
            .flat_map(|r| r.iter().copied())
            .max()
            .map_or(0, |m| m + 1);
        let ranks = relations
            .iter()
            .map(|r| {
                let mut rank = vec![u32::MAX; width];
                for (pos, &p) in r.iter().enumerate() {
                    rank[p] = rank[p].min(pos as u32);
                }
                rank
            })
            .collect();
        ChoiceSpec::Mc(McChoice { relations, ranks })
    }

    pub fn responsive(order: Vec<usize>, quota: usize) -> Self {
        ChoiceSpec::Responsive { order, quota }
    }

    pub fn table(entries: impl IntoIterator<Item = (AgentSet, AgentSet)>) -> Self {
        ChoiceSpec::Table(entries.into_iter().collect())
    }

    /// Partners this specification mentions, i.e. the acceptable set.
    pub fn partners(&self) -> AgentSet {
        match self {
            ChoiceSpec::Mc(mc) => mc.relations.iter().flatten().copied().collect(),
            ChoiceSpec::Responsive { order, .. } => order.iter().copied().collect(),
            ChoiceSpec::Table(t) => t
                .keys()
                .fold(AgentSet::new(), |acc, k| acc.union(k)),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ChoiceSpec::Mc(_) => "MC",
            ChoiceSpec::Responsive { .. } => "RESPONSIVE",
            ChoiceSpec::Table(_) => "TABLE",
        }
    }

    /// Evaluates the function. `None` means a table lookup miss.
    fn evaluate(&self, offered: &AgentSet) -> Option<AgentSet> {
        match self {
            ChoiceSpec::Mc(mc) => Some(
                mc.ranks
                    .iter()
                    .filter_map(|rank| {
                        offered
                            .iter()
                            .filter(|&p| p < rank.len() && rank[p] != u32::MAX)
                            .min_by_key(|&p| rank[p])
                    })
                    .collect(),
            ),
            ChoiceSpec::Responsive { order, quota } => Some(
                order
                    .iter()
                    .copied()
                    .filter(|&p| offered.contains(p))
                    .take(*quota)
                    .collect(),
            ),
            ChoiceSpec::Table(t) => t.get(offered).cloned(),
        }
    }

    fn validate(&self) -> std::result::Result<(), String> {
        match self {
            ChoiceSpec::Mc(mc) => {
                let mut expected: Option<AgentSet> = None;
                for rel in &mc.relations {
                    let set: AgentSet = rel.iter().copied().collect();
                    if set.len() != rel.len() {
                        return Err("partner repeated within one preference relation".into());
                    }
                    match &expected {
                        None => expected = Some(set),
                        Some(e) if *e != set => {
                            return Err("preference relations list different partner sets".into())
                        }
                        _ => {}
                    }
                }
                Ok(())
            }
            ChoiceSpec::Responsive { order, quota } => {
                if *quota == 0 {
                    return Err("responsive quota must be at least 1".into());
                }
                let set: AgentSet = order.iter().copied().collect();
                if set.len() != order.len() {
                    return Err("partner repeated within one preference relation".into());
                }
                Ok(())
            }
            ChoiceSpec::Table(t) => {
                if t.iter().all(|(k, v)| v.is_subset(k)) {
                    Ok(())
                } else {
                    Err("table entry chooses partners outside its argument".into())
                }
            }
        }
    }
}

impl fmt::Debug for ChoiceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChoiceSpec::Mc(mc) => f.debug_tuple("Mc").field(&mc.relations).finish(),
            ChoiceSpec::Responsive { order, quota } => f
                .debug_struct("Responsive")
                .field("order", order)
                .field("quota", quota)
                .finish(),
            ChoiceSpec::Table(t) => f.debug_tuple("Table").field(&t.len()).finish(),
        }
    }
}

#[derive(Debug, Clone)]
struct Agent {
    name: String,
    choice: ChoiceSpec,
    acceptable: AgentSet,
    declared_quota: Option<usize>,
}

/// A matching market with one choice function per agent.
///
/// Immutable after construction apart from a relaxed atomic counter of choice
/// function evaluations, which algorithms report as their oracle-call cost.
#[derive(Debug)]
pub struct Instance {
    firms: Vec<Agent>,
    workers: Vec<Agent>,
    calls: AtomicU64,
}

impl Clone for Instance {
    fn clone(&self) -> Self {
        Instance {
            firms: self.firms.clone(),
            workers: self.workers.clone(),
            calls: AtomicU64::new(0),
        }
    }
}

impl Instance {
    pub fn parse(text: &str) -> Result<Instance> {
        crate::format::parse_instance(text)
    }

    pub fn firm_count(&self) -> usize {
        self.firms.len()
    }

    pub fn worker_count(&self) -> usize {
        self.workers.len()
    }

    pub fn count(&self, side: Side) -> usize {
        self.agents(side).len()
    }

    pub fn agents_of(&self, side: Side) -> impl Iterator<Item = AgentId> {
        let n = self.count(side);
        (0..n).map(move |index| AgentId { side, index })
    }

    pub fn name(&self, agent: AgentId) -> &str {
        &self.agent(agent).name
    }

    pub fn firm_name(&self, firm: usize) -> &str {
        &self.firms[firm].name
    }

    pub fn worker_name(&self, worker: usize) -> &str {
        &self.workers[worker].name
    }

    pub fn lookup(&self, name: &str) -> Option<AgentId> {
        let find = |agents: &[Agent], side| {
            agents
                .iter()
                .position(|a| a.name == name)
                .map(|index| AgentId { side, index })
        };
        find(&self.firms, Side::Firm).or_else(|| find(&self.workers, Side::Worker))
    }

    pub fn acceptable(&self, agent: AgentId) -> &AgentSet {
        &self.agent(agent).acceptable
    }

    pub fn choice_spec(&self, agent: AgentId) -> &ChoiceSpec {
        &self.agent(agent).choice
    }

    pub fn declared_quota(&self, agent: AgentId) -> Option<usize> {
        self.agent(agent).declared_quota
    }

    /// Declared quota, or the intrinsic quota of a responsive function.
    pub fn quota(&self, agent: AgentId) -> Option<usize> {
        let a = self.agent(agent);
        a.declared_quota.or(match a.choice {
            ChoiceSpec::Responsive { quota, .. } => Some(quota),
            _ => None,
        })
    }

    /// The base set `E` of acceptable pairs in canonical order.
    pub fn acceptable_pairs(&self) -> Vec<Pair> {
        self.firms
            .iter()
            .enumerate()
            .flat_map(|(f, a)| a.acceptable.iter().map(move |w| Pair::new(f, w)))
            .collect()
    }

    pub fn is_acceptable(&self, pair: Pair) -> bool {
        pair.firm < self.firms.len() && self.firms[pair.firm].acceptable.contains(pair.worker)
    }

    /// `C_a(offered)`.
    pub fn choose(&self, agent: AgentId, offered: &AgentSet) -> Result<AgentSet> {
        let a = self.agent(agent);
        if !offered.is_subset(&a.acceptable) {
            let stray = offered.difference(&a.acceptable).iter().next().unwrap_or(0);
            return Err(Error::NotAcceptable {
                agent: a.name.clone(),
                partner: self.name(AgentId {
                    side: agent.side.other(),
                    index: stray,
                })
                .to_string(),
            });
        }
        self.calls.fetch_add(1, Ordering::Relaxed);
        a.choice.evaluate(offered).ok_or_else(|| Error::TableMiss {
            agent: a.name.clone(),
            set: self.format_set(agent.side.other(), offered),
        })
    }

    pub fn choose_firm(&self, firm: usize, offered: &AgentSet) -> Result<AgentSet> {
        self.choose(AgentId::firm(firm), offered)
    }

    pub fn choose_worker(&self, worker: usize, offered: &AgentSet) -> Result<AgentSet> {
        self.choose(AgentId::worker(worker), offered)
    }

    /// Total choice-function evaluations performed on this instance so far.
    pub fn oracle_calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// `{a,b}` using agent names of `side`.
    pub fn format_set(&self, side: Side, set: &AgentSet) -> String {
        let names: Vec<&str> = set
            .iter()
            .map(|i| self.agents(side).get(i).map_or("?", |a| a.name.as_str()))
            .collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn format_pair(&self, pair: Pair) -> String {
        format!("{} {}", self.firm_name(pair.firm), self.worker_name(pair.worker))
    }

    fn agents(&self, side: Side) -> &[Agent] {
        match side {
            Side::Firm => &self.firms,
            Side::Worker => &self.workers,
        }
    }

    fn agent(&self, id: AgentId) -> &Agent {
        &self.agents(id.side)[id.index]
    }
}

/// Programmatic construction of an [`Instance`]; the parser goes through here too.
#[derive(Debug, Clone)]
pub struct InstanceBuilder {
    firms: Vec<(String, Option<ChoiceSpec>, Option<usize>)>,
    workers: Vec<(String, Option<ChoiceSpec>, Option<usize>)>,
}

impl InstanceBuilder {
    pub fn new<S: Into<String>>(
        firms: impl IntoIterator<Item = S>,
        workers: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let firms: Vec<String> = firms.into_iter().map(Into::into).collect();
        let workers: Vec<String> = workers.into_iter().map(Into::into).collect();
        let mut seen = std::collections::HashSet::new();
        for n in firms.iter().chain(&workers) {
            if !seen.insert(n.as_str()) {
                return Err(Error::DuplicateAgent(n.clone()));
            }
        }
        Ok(InstanceBuilder {
            firms: firms.into_iter().map(|n| (n, None, None)).collect(),
            workers: workers.into_iter().map(|n| (n, None, None)).collect(),
        })
    }

    /// Anonymous agents `f1..fn`, `w1..wm`.
    pub fn numbered(firms: usize, workers: usize) -> Self {
        InstanceBuilder::new(
            (1..=firms).map(|i| format!("f{i}")),
            (1..=workers).map(|i| format!("w{i}")),
        )
        .expect("generated names are distinct")
    }

    pub fn choice(mut self, agent: AgentId, spec: ChoiceSpec, declared_quota: Option<usize>) -> Self {
        let slot = match agent.side {
            Side::Firm => &mut self.firms[agent.index],
            Side::Worker => &mut self.workers[agent.index],
        };
        slot.1 = Some(spec);
        slot.2 = declared_quota;
        self
    }

    pub fn build(self) -> Result<Instance> {
        let (nf, nw) = (self.firms.len(), self.workers.len());
        let finish = |list: Vec<(String, Option<ChoiceSpec>, Option<usize>)>,
                      partners: usize|
         -> Result<Vec<Agent>> {
            list.into_iter()
                .map(|(name, spec, declared_quota)| {
                    let choice = spec.unwrap_or_else(|| ChoiceSpec::mc(Vec::new()));
                    choice.validate().map_err(|message| Error::InvalidChoice {
                        agent: name.clone(),
                        message,
                    })?;
                    if declared_quota == Some(0) {
                        return Err(Error::InvalidChoice {
                            agent: name,
                            message: "quota must be at least 1".into(),
                        });
                    }
                    let acceptable = choice.partners();
                    if acceptable.iter().any(|p| p >= partners) {
                        return Err(Error::InvalidChoice {
                            agent: name,
                            message: "partner index out of range".into(),
                        });
                    }
                    Ok(Agent {
                        name,
                        choice,
                        acceptable,
                        declared_quota,
                    })
                })
                .collect()
        };
        let firms = finish(self.firms, nw)?;
        let workers = finish(self.workers, nf)?;
        for (fi, f) in firms.iter().enumerate() {
            for w in f.acceptable.iter() {
                if !workers[w].acceptable.contains(fi) {
                    return Err(Error::NonMutual {
                        lister: f.name.clone(),
                        listed: workers[w].name.clone(),
                    });
                }
            }
        }
        for (wi, w) in workers.iter().enumerate() {
            for f in w.acceptable.iter() {
                if !firms[f].acceptable.contains(wi) {
                    return Err(Error::NonMutual {
                        lister: w.name.clone(),
                        listed: firms[f].name.clone(),
                    });
                }
            }
        }
        Ok(Instance {
            firms,
            workers,
            calls: AtomicU64::new(0),
        })
    }
}

/// Choice-function properties that can be checked exhaustively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    Substitutable,
    Consistent,
    CardinalMonotone,
    QuotaFilling(usize),
    PathIndependent,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::Substitutable => write!(f, "substitutable"),
            Property::Consistent => write!(f, "consistent"),
            Property::CardinalMonotone => write!(f, "cardinal-monotone"),
            Property::QuotaFilling(q) => write!(f, "quota-filling({q})"),
            Property::PathIndependent => write!(f, "path-independent"),
        }
    }
}

/// A counterexample to a property: the partner sets involved and a message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub property: Property,
    pub sets: Vec<AgentSet>,
    pub detail: String,
}

pub const DEFAULT_PROPERTY_CAP: usize = 10;

/// True iff `property` holds for every subset (pair of subsets) of the agent's
/// acceptable partners.
pub fn verify_property(
    instance: &Instance,
    agent: AgentId,
    property: Property,
    cap: usize,
) -> Result<bool> {
    Ok(find_violation(instance, agent, property, cap)?.is_none())
}

pub fn find_violation(
    instance: &Instance,
    agent: AgentId,
    property: Property,
    cap: usize,
) -> Result<Option<Violation>> {
    let universe = instance.acceptable(agent).to_vec();
    let n = universe.len();
    if n > cap || n > 24 {
        return Err(Error::CapExceeded {
            agent: instance.name(agent).to_string(),
            partners: n,
            cap,
        });
    }
    let full: u64 = (1u64 << n) - 1;
    let mut table = Vec::with_capacity(1 << n);
    for mask in 0..=full {
        let chosen = instance.choose(agent, &AgentSet::from_mask(&universe, mask))?;
        table.push(chosen.to_mask(&universe).expect("choice stays inside acceptable set"));
    }
    let c = |m: u64| table[m as usize];
    let side = agent.side.other();
    let set = |m: u64| AgentSet::from_mask(&universe, m);
    let fmt = |m: u64| instance.format_set(side, &set(m));
    let violation = |sets: Vec<u64>, detail: String| {
        Some(Violation {
            property,
            sets: sets.into_iter().map(set).collect(),
            detail,
        })
    };

    match property {
        Property::Substitutable => {
            for s in 0..=full {
                let cs = c(s);
                for b in bits(cs) {
                    for t in submasks(s) {
                        if c(t | b) & b == 0 {
                            return Ok(violation(
                                vec![s, t],
                                format!(
                                    "{} chosen from {} but not from {}",
                                    fmt(b),
                                    fmt(s),
                                    fmt(t | b)
                                ),
                            ));
                        }
                    }
                }
            }
        }
        Property::Consistent => {
            for s in 0..=full {
                let cs = c(s);
                for extra in submasks(s & !cs) {
                    let t = cs | extra;
                    if c(t) != cs {
                        return Ok(violation(
                            vec![s, t],
                            format!("C({}) = {} but C({}) = {}", fmt(s), fmt(cs), fmt(t), fmt(c(t))),
                        ));
                    }
                }
            }
        }
        Property::CardinalMonotone => {
            for t in 0..=full {
                for s in submasks(t) {
                    if c(s).count_ones() > c(t).count_ones() {
                        return Ok(violation(
                            vec![s, t],
                            format!("|C({})| > |C({})|", fmt(s), fmt(t)),
                        ));
                    }
                }
            }
        }
        Property::QuotaFilling(q) => {
            for s in 0..=full {
                let want = q.min(s.count_ones() as usize);
                if c(s).count_ones() as usize != want {
                    return Ok(violation(
                        vec![s],
                        format!("|C({})| = {} but min(q, |S|) = {}", fmt(s), c(s).count_ones(), want),
                    ));
                }
            }
        }
        Property::PathIndependent => {
            for s in 0..=full {
                for t in 0..=full {
                    if c(s | t) != c(c(s) | t) {
                        return Ok(violation(
                            vec![s, t],
                            format!("C({} ∪ {}) differs from C(C({}) ∪ {})", fmt(s), fmt(t), fmt(s), fmt(t)),
                        ));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn bits(mask: u64) -> impl Iterator<Item = u64> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let low = rest & rest.wrapping_neg();
        rest &= rest - 1;
        Some(low)
    })
}

/// All submasks of `mask`, including 0 and `mask` itself.
fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

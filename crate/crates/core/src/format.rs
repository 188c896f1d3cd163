//! Text formats: instance files and weight files.

use std::collections::{BTreeMap, HashMap};

use crate::agentset::AgentSet;
use crate::error::{Error, Result};
use crate::market::{AgentId, ChoiceSpec, Instance, InstanceBuilder, Pair, Side};
use crate::optimize::Weights;

enum Pending {
    Mc {
        quota: Option<usize>,
        prefs: Vec<Vec<usize>>,
    },
    Responsive {
        quota: usize,
        prefs: Vec<Vec<usize>>,
    },
    Table {
        quota: Option<usize>,
        entries: HashMap<AgentSet, AgentSet>,
    },
}

struct Names {
    firms: Vec<String>,
    workers: Vec<String>,
}

impl Names {
    fn resolve(&self, name: &str) -> Result<AgentId> {
        if let Some(i) = self.firms.iter().position(|n| n == name) {
            return Ok(AgentId::firm(i));
        }
        if let Some(i) = self.workers.iter().position(|n| n == name) {
            return Ok(AgentId::worker(i));
        }
        Err(Error::UnknownAgent(name.to_string()))
    }

    fn partner(&self, of: AgentId, name: &str, line: usize) -> Result<usize> {
        let id = self.resolve(name)?;
        if id.side == of.side {
            return Err(syntax(line, format!("`{name}` is on the same side as its lister")));
        }
        Ok(id.index)
    }
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_quota(tokens: &[&str], line: usize) -> Result<Option<usize>> {
    match tokens {
        [] => Ok(None),
        ["QUOTA", q] => q
            .parse::<usize>()
            .ok()
            .filter(|&q| q >= 1)
            .map(Some)
            .ok_or_else(|| syntax(line, format!("quota must be a positive integer, got `{q}`"))),
        _ => Err(syntax(line, "expected `QUOTA <q>`")),
    }
}

/// Strips a `#` comment and surrounding whitespace.
fn content(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("").trim()
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, content(l)))
        .filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, "instance v1")) => {}
        Some((n, _)) => return Err(syntax(n, "expected header `instance v1`")),
        None => return Err(syntax(1, "empty file, expected header `instance v1`")),
    }

    let mut firms: Option<Vec<String>> = None;
    let mut workers: Option<Vec<String>> = None;
    let mut names: Option<Names> = None;
    let mut pending: BTreeMap<AgentId, (usize, Pending)> = BTreeMap::new();

    for (n, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "FIRMS" | "WORKERS" => {
                if names.is_some() {
                    return Err(syntax(n, "agent lists must precede CF lines"));
                }
                let slot = if tokens[0] == "FIRMS" { &mut firms } else { &mut workers };
                if slot.is_some() {
                    return Err(syntax(n, format!("{} declared twice", tokens[0])));
                }
                *slot = Some(tokens[1..].iter().map(|s| s.to_string()).collect());
            }
            "CF" => {
                if names.is_none() {
                    let (Some(f), Some(w)) = (firms.take(), workers.take()) else {
                        return Err(syntax(n, "CF before both FIRMS and WORKERS"));
                    };
                    InstanceBuilder::new(f.iter().cloned(), w.iter().cloned())?;
                    names = Some(Names { firms: f, workers: w });
                }
                let names = names.as_ref().expect("set above");
                if tokens.len() < 3 {
                    return Err(syntax(n, "expected `CF <agent> <kind>`"));
                }
                let agent = names.resolve(tokens[1])?;
                let spec = match tokens[2] {
                    "MC" => Pending::Mc {
                        quota: parse_quota(&tokens[3..], n)?,
                        prefs: Vec::new(),
                    },
                    "RESPONSIVE" => Pending::Responsive {
                        quota: parse_quota(&tokens[3..], n)?
                            .ok_or_else(|| syntax(n, "RESPONSIVE requires `QUOTA <q>`"))?,
                        prefs: Vec::new(),
                    },
                    "TABLE" => Pending::Table {
                        quota: parse_quota(&tokens[3..], n)?,
                        entries: HashMap::new(),
                    },
                    other => return Err(syntax(n, format!("unknown choice kind `{other}`"))),
                };
                if pending.insert(agent, (n, spec)).is_some() {
                    return Err(syntax(n, format!("second CF line for `{}`", tokens[1])));
                }
            }
            "PREF" => {
                let names = names.as_ref().ok_or_else(|| syntax(n, "PREF before CF"))?;
                let name = tokens.get(1).ok_or_else(|| syntax(n, "expected `PREF <agent> ...`"))?;
                let agent = names.resolve(name)?;
                let mut order = Vec::new();
                let mut seen = AgentSet::new();
                for p in &tokens[2..] {
                    let idx = names.partner(agent, p, n)?;
                    if !seen.insert(idx) {
                        return Err(syntax(n, format!("partner `{p}` repeated within one preference relation")));
                    }
                    order.push(idx);
                }
                match pending.get_mut(&agent) {
                    Some((_, Pending::Mc { prefs, .. })) | Some((_, Pending::Responsive { prefs, .. })) => {
                        prefs.push(order)
                    }
                    Some((_, Pending::Table { .. })) => {
                        return Err(syntax(n, format!("PREF for TABLE agent `{name}`")))
                    }
                    None => return Err(syntax(n, format!("PREF for `{name}` before its CF line"))),
                }
            }
            "CHOICE" => {
                let names = names.as_ref().ok_or_else(|| syntax(n, "CHOICE before CF"))?;
                let name = tokens.get(1).ok_or_else(|| syntax(n, "expected `CHOICE <agent> {..} -> {..}`"))?;
                let agent = names.resolve(name)?;
                let rest = line["CHOICE".len()..]
                    .trim_start()
                    .strip_prefix(name)
                    .unwrap_or_default();
                let (lhs, rhs) = rest
                    .split_once("->")
                    .ok_or_else(|| syntax(n, "expected `->` in CHOICE line"))?;
                let parse_set = |text: &str| -> Result<AgentSet> {
                    let inner = text
                        .trim()
                        .strip_prefix('{')
                        .and_then(|t| t.strip_suffix('}'))
                        .ok_or_else(|| syntax(n, format!("expected a braced set, got `{}`", text.trim())))?;
                    inner
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|p| names.partner(agent, p, n))
                        .collect()
                };
                let (key, value) = (parse_set(lhs)?, parse_set(rhs)?);
                match pending.get_mut(&agent) {
                    Some((_, Pending::Table { entries, .. })) => {
                        if entries.insert(key, value).is_some() {
                            return Err(syntax(n, "duplicate CHOICE entry"));
                        }
                    }
                    _ => return Err(syntax(n, format!("CHOICE for `{name}` without a TABLE CF line"))),
                }
            }
            other => return Err(syntax(n, format!("unknown directive `{other}`"))),
        }
    }

    let names = match names {
        Some(names) => names,
        None => {
            let (Some(f), Some(w)) = (firms, workers) else {
                return Err(syntax(text.lines().count().max(1), "missing FIRMS or WORKERS line"));
            };
            Names { firms: f, workers: w }
        }
    };

    let mut builder = InstanceBuilder::new(names.firms.iter().cloned(), names.workers.iter().cloned())?;
    for (agent, (n, spec)) in pending {
        let (spec, quota) = match spec {
            Pending::Mc { quota, prefs } => {
                if prefs.is_empty() {
                    return Err(syntax(n, "MC choice function needs at least one PREF line"));
                }
                (ChoiceSpec::mc(prefs), quota)
            }
            Pending::Responsive { quota, mut prefs } => {
                if prefs.len() != 1 {
                    return Err(syntax(n, "RESPONSIVE choice function needs exactly one PREF line"));
                }
                (ChoiceSpec::responsive(prefs.remove(0), quota), None)
            }
            Pending::Table { quota, entries } => (ChoiceSpec::Table(entries), quota),
        };
        builder = builder.choice(agent, spec, quota);
    }
    builder.build()
}

/// `<firm> <worker> <integer>` per line; unlisted acceptable pairs weigh 0.
pub fn parse_weights(instance: &Instance, text: &str) -> Result<Weights> {
    let mut weights = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = content(raw);
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [f, w, value] = tokens[..] else {
            return Err(Error::Weights(format!("line {n}: expected `<firm> <worker> <integer>`")));
        };
        let firm = match instance.lookup(f) {
            Some(AgentId { side: Side::Firm, index }) => index,
            _ => return Err(Error::Weights(format!("line {n}: `{f}` is not a firm"))),
        };
        let worker = match instance.lookup(w) {
            Some(AgentId { side: Side::Worker, index }) => index,
            _ => return Err(Error::Weights(format!("line {n}: `{w}` is not a worker"))),
        };
        let value: i64 = value
            .parse()
            .map_err(|_| Error::Weights(format!("line {n}: weight `{value}` is not an integer")))?;
        let pair = Pair::new(firm, worker);
        if !instance.is_acceptable(pair) {
            return Err(Error::Weights(format!("line {n}: pair `{f} {w}` is not acceptable")));
        }
        if weights.insert(pair, value).is_some() {
            return Err(Error::Weights(format!("line {n}: pair `{f} {w}` listed twice")));
        }
    }
    Ok(Weights::from_map(weights))
}

//! Command-line front end.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::algorithms::{break_marriage, deferred_acceptance, deferred_acceptance_traced, rotation_poset};
use crate::error::Error;
use crate::format::{parse_instance, parse_weights};
use crate::market::{find_violation, AgentId, Instance, Pair, Property, Side, DEFAULT_PROPERTY_CAP};
use crate::matching::Matching;
use crate::optimize::max_weight_with_poset;
use crate::oracle::{enumerate_stable_bruteforce, verify_lattice, DEFAULT_NODE_LIMIT};
use crate::polytope::Formulation;
use crate::represent::DEFAULT_UPPER_SET_LIMIT;

#[derive(Debug, Parser)]
#[command(name = "choicematch", version, about = "Stable matchings under path-independent choice functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Firms,
    Workers,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Poset,
    Brute,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolytopeFormat {
    Lp,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check choice-function properties agent by agent.
    Validate {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PROPERTY_CAP)]
        cap: usize,
    },
    /// Run deferred acceptance.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "firms")]
        side: SideArg,
        #[arg(long)]
        trace: bool,
    },
    /// Break one marriage of a stable matching and restart proposals.
    BreakMarriage {
        file: PathBuf,
        /// Pair file for the starting matching; defaults to the firm-optimal one.
        #[arg(long)]
        matching: Option<PathBuf>,
        #[arg(long)]
        firm: String,
        #[arg(long)]
        worker: String,
        #[arg(long)]
        trace: bool,
    },
    /// Print the rotation poset.
    Poset { file: PathBuf },
    /// List every stable matching.
    Enumerate {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "poset")]
        method: Method,
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Maximum-weight stable matching.
    Optimize {
        file: PathBuf,
        #[arg(long)]
        weights: PathBuf,
    },
    /// Emit the extended formulation of the stable matching polytope.
    Polytope {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "lp")]
        format: PolytopeFormat,
    },
    /// Cross-check the poset against brute force and the lattice properties.
    Verify { file: PathBuf },
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. }
            | Error::DuplicateAgent(_)
            | Error::UnknownAgent(_)
            | Error::NonMutual { .. }
            | Error::InvalidChoice { .. }
            | Error::Weights(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

/// Runs one invocation; returns the process exit code (0 ok, 1 domain
/// failure, 2 usage or parse error).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                return 2;
            }
            let _ = out.write_all(text.as_bytes());
            return 0;
        }
    };
    let mut text = String::new();
    let result = execute(cli.command, &mut text);
    let _ = out.write_all(text.as_bytes());
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Domain(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Instance, Failure> {
    Ok(parse_instance(&read(path)?)?)
}

fn resolve(instance: &Instance, name: &str, side: Side) -> Result<usize, Failure> {
    match instance.lookup(name) {
        Some(id) if id.side == side => Ok(id.index),
        _ => Err(Failure::Usage(format!(
            "`{name}` is not a {}",
            if side == Side::Firm { "firm" } else { "worker" }
        ))),
    }
}

fn parse_matching(instance: &Instance, text: &str) -> Result<Matching, Failure> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let [f, w] = line.split_whitespace().collect::<Vec<_>>()[..] else {
            return Err(Failure::Usage(format!("matching line {}: expected `<firm> <worker>`", i + 1)));
        };
        pairs.push(Pair::new(resolve(instance, f, Side::Firm)?, resolve(instance, w, Side::Worker)?));
    }
    Matching::from_pairs(instance, &pairs).map_err(|e| Failure::Usage(e.to_string()))
}

fn write_matchings(out: &mut String, instance: &Instance, all: &[Matching]) {
    for (i, mu) in all.iter().enumerate() {
        let _ = writeln!(out, "MATCHING {}", i + 1);
        out.push_str(&mu.to_text(instance));
    }
}

fn execute(command: Command, out: &mut String) -> Result<bool, Failure> {
    match command {
        Command::Validate { file, cap } => {
            let instance = load(&file)?;
            let mut ok = true;
            for side in [Side::Firm, Side::Worker] {
                for agent in instance.agents_of(side).collect::<Vec<AgentId>>() {
                    ok &= validate_agent(&instance, agent, cap, out)?;
                }
            }
            let _ = writeln!(out, "{}", if ok { "VALID" } else { "INVALID" });
            Ok(ok)
        }
        Command::Solve { file, side, trace } => {
            let instance = load(&file)?;
            let side = match side {
                SideArg::Firms => Side::Firm,
                SideArg::Workers => Side::Worker,
            };
            let mu = if trace {
                let (mu, t) = deferred_acceptance_traced(&instance, side)?;
                out.push_str(&t.to_text(&instance));
                mu
            } else {
                deferred_acceptance(&instance, side)?
            };
            out.push_str(&mu.to_text(&instance));
            Ok(true)
        }
        Command::BreakMarriage {
            file,
            matching,
            firm,
            worker,
            trace,
        } => {
            let instance = load(&file)?;
            let mu_prime = match matching {
                Some(path) => parse_matching(&instance, &read(&path)?)?,
                None => deferred_acceptance(&instance, Side::Firm)?,
            };
            let mu_w = deferred_acceptance(&instance, Side::Worker)?;
            let f = resolve(&instance, &firm, Side::Firm)?;
            let w = resolve(&instance, &worker, Side::Worker)?;
            let result = break_marriage(&instance, &mu_prime, &mu_w, f, w)?;
            if trace {
                out.push_str(&result.trace.to_text(&instance));
            }
            let _ = writeln!(out, "{}", if result.successful { "SUCCESSFUL" } else { "UNSUCCESSFUL" });
            out.push_str(&result.matching.to_text(&instance));
            Ok(true)
        }
        Command::Poset { file } => {
            let instance = load(&file)?;
            out.push_str(&rotation_poset(&instance)?.to_text(&instance));
            Ok(true)
        }
        Command::Enumerate { file, method, limit } => {
            let instance = load(&file)?;
            let all = match method {
                Method::Poset => rotation_poset(&instance)?
                    .enumerate_stable(&instance, limit.unwrap_or(DEFAULT_UPPER_SET_LIMIT))?,
                Method::Brute => enumerate_stable_bruteforce(&instance, limit.unwrap_or(DEFAULT_NODE_LIMIT))?,
            };
            write_matchings(out, &instance, &all);
            Ok(true)
        }
        Command::Optimize { file, weights } => {
            let instance = load(&file)?;
            let weights = parse_weights(&instance, &read(&weights)?)?;
            let poset = rotation_poset(&instance)?;
            let (mu, value) = max_weight_with_poset(&instance, &poset, &weights)?;
            let _ = writeln!(out, "VALUE {value}");
            out.push_str(&mu.to_text(&instance));
            Ok(true)
        }
        Command::Polytope { file, format } => {
            let instance = load(&file)?;
            let poset = rotation_poset(&instance)?;
            let formulation = Formulation::from_poset(&instance, &poset)?;
            match format {
                PolytopeFormat::Lp => out.push_str(&formulation.to_lp(&instance)),
            }
            Ok(true)
        }
        Command::Verify { file } => {
            let instance = load(&file)?;
            let brute = enumerate_stable_bruteforce(&instance, DEFAULT_NODE_LIMIT)?;
            let b: BTreeSet<Vec<Pair>> = brute.iter().map(Matching::pairs).collect();
            let mut ok = true;
            // outside the model the pipeline itself may break down; that is
            // a verification failure, not a crash
            let from_poset = match rotation_poset(&instance)
                .and_then(|poset| poset.enumerate_stable(&instance, DEFAULT_UPPER_SET_LIMIT))
            {
                Ok(all) => all,
                Err(e) => {
                    ok = false;
                    let _ = writeln!(out, "enumeration: FAIL (poset route: {e})");
                    Vec::new()
                }
            };
            let a: BTreeSet<Vec<Pair>> = from_poset.iter().map(Matching::pairs).collect();
            if ok && a == b {
                let _ = writeln!(out, "enumeration: PASS ({} stable matchings)", a.len());
            } else if ok {
                ok = false;
                let _ = writeln!(out, "enumeration: FAIL");
                for mu in from_poset.iter().filter(|m| !b.contains(&m.pairs())) {
                    let _ = writeln!(out, "  only from poset: {}", mu.describe(&instance));
                }
                for mu in brute.iter().filter(|m| !a.contains(&m.pairs())) {
                    let _ = writeln!(out, "  only from brute force: {}", mu.describe(&instance));
                }
            }
            let report = verify_lattice(&instance, DEFAULT_NODE_LIMIT)?;
            out.push_str(&report.to_text());
            ok &= report.all_hold();
            let _ = writeln!(out, "{}", if ok { "PASS" } else { "FAIL" });
            Ok(ok)
        }
    }
}

fn validate_agent(instance: &Instance, agent: AgentId, cap: usize, out: &mut String) -> Result<bool, Failure> {
    let spec = instance.choice_spec(agent);
    let _ = write!(out, "{} {}", instance.name(agent), spec.kind());
    if let Some(q) = instance.quota(agent) {
        let _ = write!(out, " quota={q}");
    }
    let mut properties = vec![
        Property::Substitutable,
        Property::Consistent,
        Property::PathIndependent,
        Property::CardinalMonotone,
    ];
    if let Some(q) = instance.quota(agent) {
        properties.push(Property::QuotaFilling(q));
    }
    let mut ok = true;
    let mut details = Vec::new();
    for p in properties {
        match find_violation(instance, agent, p, cap) {
            Ok(None) => {
                let _ = write!(out, " {p}=yes");
            }
            Ok(Some(v)) => {
                ok = false;
                let _ = write!(out, " {p}=no");
                details.push(format!("  {p}: {}", v.detail));
            }
            Err(e @ Error::CapExceeded { .. }) => {
                let _ = write!(out, " skipped ({e})");
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    out.push('\n');
    for d in details {
        let _ = writeln!(out, "{d}");
    }
    Ok(ok)
}

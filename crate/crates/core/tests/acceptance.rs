//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the report is always printed.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use choicematch::algorithms::{break_marriage, deferred_acceptance, rotation_poset, rotation_poset_with, PairOrder};
use choicematch::linalg::affine_hull_dimension;
use choicematch::oracle::{enumerate_stable_bruteforce, max_weight_bruteforce, verify_lattice, DEFAULT_NODE_LIMIT};
use choicematch::optimize::{max_weight_with_poset, Weights};
use choicematch::polytope::order_polytope_facets;
use choicematch::represent::{indicator, AffineMap, DEFAULT_UPPER_SET_LIMIT};
use choicematch::ringsets::{birkhoff_matrix, irreducibles_via_chain, minimal_differences, order_from_lambdas, reconstruct, Lambda};
use choicematch::{AgentSet, Instance, Matching, Pair, PairSet, Side};
use common::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: choicematch::Error) -> String {
    e.to_string()
}

/// Upper bound constant for the oracle-call sanity check of criterion 11.
const CALL_CONSTANT: u64 = 1;

fn ac1() -> Outcome {
    let q = Qf2::load();
    let mu_f = deferred_acceptance(&q.inst, Side::Firm).map_err(err)?;
    let mu_w = deferred_acceptance(&q.inst, Side::Worker).map_err(err)?;
    check(mu_f == q.mu_f, format!("firm-proposing gave {}", mu_f.describe(&q.inst)))?;
    check(mu_w == q.mu_w, format!("worker-proposing gave {}", mu_w.describe(&q.inst)))?;
    Ok("μ_F and μ_W reproduced".into())
}

fn ac2() -> Outcome {
    let inst = bm();
    let mu_prime = by_firm(&inst, &[&[2, 4], &[1, 2], &[3, 4], &[1, 3]]);
    let expected = by_firm(&inst, &[&[3, 4], &[1, 4], &[2, 3], &[1, 2]]);
    let mu_w = deferred_acceptance(&inst, Side::Worker).map_err(err)?;
    let run = break_marriage(&inst, &mu_prime, &mu_w, 0, 1).map_err(err)?;
    check(run.successful, "run reported unsuccessful")?;
    check(run.matching == expected, format!("output {}", run.matching.describe(&inst)))?;
    let step1 = run.trace.steps.get(1).ok_or("trace shorter than two steps")?;
    check(step1.held[1] == AgentSet::singleton(3), format!("Y_w2(1) = {:?}", step1.held[1]))?;

    let (inst_path, start_path) = (fixture_path("bm.inst"), fixture_path("bm_start.txt"));
    let args = [
        "choicematch",
        "break-marriage",
        inst_path.to_str().unwrap(),
        "--matching",
        start_path.to_str().unwrap(),
        "--firm",
        "f1",
        "--worker",
        "w2",
        "--trace",
    ];
    let (mut out, mut errs) = (Vec::new(), Vec::new());
    let code = choicematch::cli::run(args, &mut out, &mut errs);
    let text = String::from_utf8(out).unwrap();
    check(code == 0, format!("cli exit {code}"))?;
    let line = text.lines().find(|l| l.starts_with("s=1 ")).ok_or("no s=1 trace line")?;
    let y_part = line.split(" | Y ").nth(1).ok_or("no Y section")?;
    check(y_part.split(' ').any(|t| t == "w2:{f4}"), format!("trace line: {line}"))?;
    check(text.ends_with(&expected.to_text(&inst)), "cli matching differs")?;
    Ok(format!("μ̄ reproduced in {} steps, Y_w2(1) = {{f4}}", run.steps))
}

fn ac3() -> Outcome {
    let q = Qf2::load();
    let poset = rotation_poset(&q.inst).map_err(err)?;
    let expected = [
        (pairs(&[(3, 2), (4, 1)]), pairs(&[(3, 1), (4, 2)])),
        (pairs(&[(1, 2), (2, 3)]), pairs(&[(1, 3), (2, 2)])),
        (pairs(&[(3, 4), (4, 3)]), pairs(&[(3, 3), (4, 4)])),
    ];
    check(poset.len() == 3, format!("{} rotations", poset.len()))?;
    // locate each printed rotation, whatever order the chain found them in
    let mut at = Vec::new();
    for (plus, minus) in &expected {
        let i = poset
            .rotations
            .iter()
            .position(|r| &r.plus == plus && &r.minus == minus)
            .ok_or_else(|| format!("missing rotation with ρ⁺ = {plus:?}"))?;
        at.push(i);
    }
    let relations = poset.order.relations();
    check(relations == vec![(at[0], at[1])], format!("relations {relations:?}"))?;
    Ok("three rotations, only ρ1 ⪰* ρ2".into())
}

fn ac4() -> Outcome {
    let (ring, chain) = six_letter_ring();
    let lambdas = irreducibles_via_chain(&chain, |h| Ok(ring.contains(h))).map_err(err)?;
    check(lambdas[2] == Lambda::from([2, 3]), format!("Λ(K3) = {:?}", lambdas[2]))?;
    check(lambdas[0] == Lambda::from([1]), format!("Λ(K1) = {:?}", lambdas[0]))?;
    let order = order_from_lambdas(&lambdas);
    // b = 0, c = 1, de = 2, f = 3
    let relations: BTreeSet<(usize, usize)> = order.relations().into_iter().collect();
    let expected = BTreeSet::from([(1, 2), (1, 3), (2, 3), (0, 3)]);
    check(relations == expected, format!("relations {relations:?}"))?;
    check(order.covers() == vec![(0, 3), (1, 2), (2, 3)], format!("covers {:?}", order.covers()))?;
    Ok("Λ(K3) = {2,3}; c ⊒ de ⊒ f, b ⊒ f".into())
}

fn ac5() -> Outcome {
    // base {1,2,3,4}, two incomparable generators
    let map = AffineMap {
        pairs: Vec::new(),
        matrix: vec![vec![0, 0], vec![-1, 0], vec![1, 0], vec![0, 1]],
        x0: vec![1, 1, 0, 0],
    };
    let members = [[1, 1, 0, 0], [1, 0, 1, 0], [1, 1, 0, 1], [1, 0, 1, 1]];
    let uppers = [[0, 0], [1, 0], [0, 1], [1, 1]];
    for (u, s) in uppers.iter().zip(&members) {
        check(map.apply(u) == s.to_vec(), format!("g({u:?}) = {:?}", map.apply(u)))?;
    }

    let (ring, chain) = six_letter_ring();
    let diffs = minimal_differences(&chain).map_err(err)?;
    let (matrix, x0) = birkhoff_matrix(&diffs, &chain[0], 6).map_err(err)?;
    let fig = vec![
        vec![0, 0, 0, 0],
        vec![1, 0, 0, 0],
        vec![0, 1, 0, 0],
        vec![0, 0, 1, 0],
        vec![0, 0, 1, 0],
        vec![0, 0, 0, 1],
    ];
    check(matrix == fig, format!("matrix {matrix:?}"))?;
    check(x0 == vec![1, 0, 0, 0, 0, 0], format!("x0 {x0:?}"))?;
    let lambdas = irreducibles_via_chain(&chain, |h| Ok(ring.contains(h))).map_err(err)?;
    let order = order_from_lambdas(&lambdas);
    let listed: [&[usize]; 7] = [&[], &[0], &[1], &[0, 1], &[1, 2], &[0, 1, 2], &[0, 1, 2, 3]];
    let map = AffineMap {
        pairs: Vec::new(),
        matrix,
        x0,
    };
    for (u, h) in listed.iter().zip(&ring) {
        let u: BTreeSet<usize> = u.iter().copied().collect();
        let rebuilt = reconstruct(&order, &diffs, &chain[0], &u).map_err(err)?;
        check(&rebuilt == h, format!("reconstruct({u:?}) = {rebuilt:?}"))?;
        let x: Vec<i64> = (0..6).map(|e| i64::from(h.contains(e))).collect();
        check(map.apply(&indicator(&u, 4)) == x, format!("affine image of {u:?}"))?;
    }
    Ok("4 two-generator identities and 7 members of the six-letter ring".into())
}

fn same_sets(a: &[Matching], b: &[Matching]) -> bool {
    let a: BTreeSet<Vec<Pair>> = a.iter().map(Matching::pairs).collect();
    let b: BTreeSet<Vec<Pair>> = b.iter().map(Matching::pairs).collect();
    a == b
}

fn ac6(corpus: &[Instance]) -> Outcome {
    for (name, inst, count) in [("QF2", qf2(), 6), ("P5", p5(), 4)] {
        let poset = rotation_poset(&inst).map_err(err)?;
        let a = poset.enumerate_stable(&inst, DEFAULT_UPPER_SET_LIMIT).map_err(err)?;
        let b = enumerate_stable_bruteforce(&inst, DEFAULT_NODE_LIMIT).map_err(err)?;
        check(a.len() == count && same_sets(&a, &b), format!("{name}: {} vs {}", a.len(), b.len()))?;
    }
    let mut total = 0;
    for (i, inst) in corpus.iter().enumerate() {
        let poset = rotation_poset(inst).map_err(|e| format!("instance {i}: {e}"))?;
        let a = poset.enumerate_stable(inst, DEFAULT_UPPER_SET_LIMIT).map_err(err)?;
        let b = enumerate_stable_bruteforce(inst, DEFAULT_NODE_LIMIT).map_err(err)?;
        check(same_sets(&a, &b), format!("instance {i}: poset {} vs brute {}", a.len(), b.len()))?;
        total += a.len();
    }
    Ok(format!("fixtures plus {} random instances ({} stable matchings)", corpus.len(), total))
}

fn ac7(corpus: &[Instance]) -> Outcome {
    let mut rng = StdRng::seed_from_u64(CORPUS_SEED ^ 7);
    for (i, inst) in corpus.iter().enumerate() {
        let weights = random_weights(&mut rng, inst);
        let poset = rotation_poset(inst).map_err(err)?;
        let (_, fast) = max_weight_with_poset(inst, &poset, &weights).map_err(err)?;
        let (_, slow) = max_weight_bruteforce(inst, &weights, DEFAULT_NODE_LIMIT).map_err(err)?;
        check(fast == slow, format!("instance {i}: min-cut {fast} vs brute force {slow}"))?;
    }
    let q = Qf2::load();
    let mut w = Weights::zero();
    w.set(Pair::new(0, 1), 5);
    w.set(Pair::new(2, 2), 3);
    let (mu, value) = choicematch::optimize::max_weight_stable_matching(&q.inst, &w).map_err(err)?;
    check(value == 8 && mu == q.mu3, format!("QF2 weighted: {} value {value}", mu.describe(&q.inst)))?;
    Ok(format!("{} random instances agree; QF2 example gives μ3 at 8", corpus.len()))
}

fn ac8(corpus: &[Instance]) -> Outcome {
    for (i, inst) in corpus.iter().enumerate() {
        let report = verify_lattice(inst, DEFAULT_NODE_LIMIT).map_err(err)?;
        if !report.all_hold() {
            return Err(format!("instance {i}: {:?}", report.failures));
        }
    }
    Ok(format!("all axioms hold on {} random instances", corpus.len()))
}

type RotationKey = (PairSet, PairSet);

fn keyed(inst: &Instance, order: PairOrder) -> Result<(BTreeSet<RotationKey>, BTreeSet<(RotationKey, RotationKey)>), String> {
    let poset = rotation_poset_with(inst, order).map_err(err)?;
    let key = |i: usize| (poset.rotations[i].plus.clone(), poset.rotations[i].minus.clone());
    let rotations = (0..poset.len()).map(key).collect();
    let relations = poset.order.relations().into_iter().map(|(a, b)| (key(a), key(b))).collect();
    Ok((rotations, relations))
}

fn ac9(corpus: &[Instance]) -> Outcome {
    let mut differing_chains = 0;
    for (i, inst) in corpus.iter().enumerate() {
        let (ra, oa) = keyed(inst, PairOrder::Canonical)?;
        let (rb, ob) = keyed(inst, PairOrder::Reversed)?;
        check(ra == rb, format!("instance {i}: rotation sets differ"))?;
        check(oa == ob, format!("instance {i}: precedence differs"))?;
        let a = choicematch::algorithms::maximal_chain_with(inst, PairOrder::Canonical).map_err(err)?;
        let b = choicematch::algorithms::maximal_chain_with(inst, PairOrder::Reversed).map_err(err)?;
        if a.0 != b.0 {
            differing_chains += 1;
        }
    }
    Ok(format!("{} instances ({} with distinct chains)", corpus.len(), differing_chains))
}

fn ac10() -> Outcome {
    let q = Qf2::load();
    let poset = rotation_poset(&q.inst).map_err(err)?;
    let facets = order_polytope_facets(&poset.order);
    check(facets.len() == 5, format!("{} facets", facets.len()))?;
    let uppers = poset.upper_sets(DEFAULT_UPPER_SET_LIMIT).map_err(err)?;
    check(uppers.len() == 6, format!("{} upper sets", uppers.len()))?;
    for u in &uppers {
        let y = indicator(u, poset.len());
        check(facets.iter().all(|f| f.holds(&y)), format!("χ^{u:?} violates a facet"))?;
    }
    let points: Vec<Vec<i64>> = q.all().iter().map(|m| m.characteristic(&q.inst)).collect();
    let dim = affine_hull_dimension(&points);
    check(dim == 3, format!("affine hull dimension {dim}"))?;
    poset.affine_map(&q.inst).map_err(err)?;
    Ok("5 facets, 6 upper sets feasible, dimension 3, A full column rank".into())
}

fn ac11() -> Outcome {
    let mut rng = StdRng::seed_from_u64(CORPUS_SEED ^ 11);
    let mut worst: f64 = 0.0;
    let runs = 40;
    for i in 0..runs {
        let inst = random_sized(&mut rng, 4, 4);
        let poset = rotation_poset(&inst).map_err(err)?;
        let bound = CALL_CONSTANT * 4u64.pow(3) * 4u64.pow(3);
        check(poset.oracle_calls < bound, format!("instance {i}: {} calls ≥ {bound}", poset.oracle_calls))?;
        worst = worst.max(poset.oracle_calls as f64 / bound as f64);
    }
    Ok(format!("{runs} 4×4 instances under {CALL_CONSTANT}·|F|³|W|³ (worst ratio {worst:.3})"))
}

fn main() {
    let corpus = corpus(CORPUS_SEED, CORPUS_SIZE);
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("golden deferred acceptance", Box::new(ac1)),
        ("golden break-marriage", Box::new(ac2)),
        ("golden rotations", Box::new(ac3)),
        ("golden irreducibles via chain", Box::new(ac4)),
        ("golden affine maps", Box::new(ac5)),
        ("bijection poset vs brute force", Box::new(|| ac6(&corpus))),
        ("optimizer correctness", Box::new(|| ac7(&corpus))),
        ("lattice axioms", Box::new(|| ac8(&corpus))),
        ("chain invariance", Box::new(|| ac9(&corpus))),
        ("polytope", Box::new(ac10)),
        ("oracle-call accounting", Box::new(ac11)),
    ];
    let mut failed = BTreeMap::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        match run() {
            Ok(detail) => println!("AC{:<2} PASS  {name}: {detail} [{:.2?}]", i + 1, start.elapsed()),
            Err(why) => {
                println!("AC{:<2} FAIL  {name}: {why}", i + 1);
                failed.insert(i + 1, why);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
    } else {
        println!("acceptance: {} of {} criteria fail", failed.len(), criteria.len());
        std::process::exit(1);
    }
}

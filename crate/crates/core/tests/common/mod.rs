#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use choicematch::market::{verify_property, DEFAULT_PROPERTY_CAP};
use choicematch::oracle::{enumerate_stable_bruteforce, DEFAULT_NODE_LIMIT};
use choicematch::{AgentId, AgentSet, ChoiceSpec, Instance, InstanceBuilder, Matching, Pair, Property};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> Instance {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    Instance::parse(&text).expect("fixture parses")
}

pub fn qf2() -> Instance {
    fixture("qf2.inst")
}

pub fn bm() -> Instance {
    fixture("bm.inst")
}

pub fn p5() -> Instance {
    fixture("p5.inst")
}

/// Matching from per-firm worker lists written with 1-based worker numbers,
/// e.g. `&[&[3, 4], &[1, 2]]` for `(f1:{w3,w4}, f2:{w1,w2})`.
pub fn by_firm(inst: &Instance, sets: &[&[usize]]) -> Matching {
    let sets: Vec<AgentSet> = sets.iter().map(|ws| ws.iter().map(|w| w - 1).collect()).collect();
    Matching::from_firm_sets(inst, &sets).expect("acceptable pairs")
}

/// Pair set from 1-based `(firm, worker)` numbers.
pub fn pairs(list: &[(usize, usize)]) -> BTreeSet<Pair> {
    list.iter().map(|&(f, w)| Pair::new(f - 1, w - 1)).collect()
}

pub struct Qf2 {
    pub inst: Instance,
    pub mu_f: Matching,
    pub mu1: Matching,
    pub mu2: Matching,
    pub mu3: Matching,
    pub mu4: Matching,
    pub mu_w: Matching,
}

impl Qf2 {
    pub fn load() -> Self {
        let inst = qf2();
        let m = |sets: &[&[usize]]| by_firm(&inst, sets);
        Qf2 {
            mu_f: m(&[&[3, 4], &[1, 2], &[1, 3], &[2, 4]]),
            mu1: m(&[&[3, 4], &[1, 2], &[1, 4], &[2, 3]]),
            mu2: m(&[&[3, 4], &[1, 2], &[2, 3], &[1, 4]]),
            mu3: m(&[&[2, 4], &[1, 3], &[2, 3], &[1, 4]]),
            mu4: m(&[&[3, 4], &[1, 2], &[2, 4], &[1, 3]]),
            mu_w: m(&[&[2, 4], &[1, 3], &[2, 4], &[1, 3]]),
            inst,
        }
    }

    pub fn all(&self) -> Vec<&Matching> {
        vec![&self.mu_f, &self.mu1, &self.mu2, &self.mu3, &self.mu4, &self.mu_w]
    }
}

pub struct P5 {
    pub inst: Instance,
    pub mu_f: Matching,
    pub mu1: Matching,
    pub mu2: Matching,
    pub mu_w: Matching,
}

impl P5 {
    pub fn load() -> Self {
        let inst = p5();
        let m = |sets: &[&[usize]]| by_firm(&inst, sets);
        P5 {
            mu_f: m(&[&[1, 2], &[4], &[3], &[5]]),
            mu1: m(&[&[1, 4], &[2], &[3], &[5]]),
            mu2: m(&[&[2, 3], &[4], &[1], &[5]]),
            mu_w: m(&[&[3, 4], &[2], &[1], &[5]]),
            inst,
        }
    }
}

/// Ring of sets over `{a,...,f}` (indices 0..6) and its maximal chain `H1,H2,H4,H6,H7`.
pub fn six_letter_ring() -> (Vec<AgentSet>, Vec<AgentSet>) {
    let s = |xs: &[usize]| xs.iter().copied().collect::<AgentSet>();
    let ring = vec![
        s(&[0]),
        s(&[0, 1]),
        s(&[0, 2]),
        s(&[0, 1, 2]),
        s(&[0, 2, 3, 4]),
        s(&[0, 1, 2, 3, 4]),
        s(&[0, 1, 2, 3, 4, 5]),
    ];
    let chain = vec![ring[0].clone(), ring[1].clone(), ring[3].clone(), ring[5].clone(), ring[6].clone()];
    (ring, chain)
}

/// Preference orders are drawn around a base order with a few random adjacent
/// swaps; `None` means a uniform shuffle.
struct Bias {
    base: Option<Vec<usize>>,
}

impl Bias {
    fn uniform() -> Self {
        Bias { base: None }
    }

    fn order(&self, rng: &mut StdRng, items: &[usize]) -> Vec<usize> {
        let Some(base) = &self.base else {
            let mut v = items.to_vec();
            v.shuffle(rng);
            return v;
        };
        let mut v: Vec<usize> = base.iter().copied().filter(|x| items.contains(x)).collect();
        if v.len() > 1 {
            for _ in 0..usize::from(rng.gen_bool(0.25)) {
                let i = rng.gen_range(0..v.len() - 1);
                v.swap(i, i + 1);
            }
        }
        v
    }
}

fn worker_spec(rng: &mut StdRng, bias: &Bias, inst_firms: &[usize], quota: usize) -> (ChoiceSpec, Option<usize>) {
    if inst_firms.is_empty() {
        return (ChoiceSpec::mc(Vec::new()), None);
    }
    if rng.gen_bool(0.5) || quota == 1 {
        return (ChoiceSpec::responsive(bias.order(rng, inst_firms), quota), None);
    }
    // quota-filling maximizer-collecting: try three relations, else a
    // relation and its reverse
    for _ in 0..20 {
        let relations: Vec<Vec<usize>> = (0..3).map(|_| bias.order(rng, inst_firms)).collect();
        if mc_sizes_ok(&relations, |s, n| n == quota.min(s)) {
            return (ChoiceSpec::mc(relations), Some(quota));
        }
    }
    let first = bias.order(rng, inst_firms);
    let mut second = first.clone();
    second.reverse();
    (ChoiceSpec::mc(vec![first, second]), Some(quota))
}

/// Checks `accept(|S|, |C(S)|)` for every nonempty subset `S`, evaluating the
/// maximizer-collecting rule directly.
fn mc_sizes_ok(relations: &[Vec<usize>], accept: impl Fn(usize, usize) -> bool) -> bool {
    let items = &relations[0];
    (1u32..1 << items.len()).all(|mask| {
        let subset: Vec<usize> = (0..items.len()).filter(|i| mask >> i & 1 == 1).map(|i| items[i]).collect();
        let chosen: BTreeSet<usize> = relations
            .iter()
            .map(|r| *r.iter().find(|x| subset.contains(x)).expect("nonempty"))
            .collect();
        accept(subset.len(), chosen.len())
    })
}

/// `|C(S)| ≤ |C(T)|` for `S ⊆ T`, via sizes: |C| must be monotone in the subset lattice.
fn mc_cardinal_monotone(relations: &[Vec<usize>]) -> bool {
    let items = &relations[0];
    let size = |mask: u32| -> usize {
        let subset: Vec<usize> = (0..items.len()).filter(|i| mask >> i & 1 == 1).map(|i| items[i]).collect();
        relations
            .iter()
            .filter_map(|r| r.iter().find(|x| subset.contains(x)))
            .collect::<BTreeSet<_>>()
            .len()
    };
    let full = 1u32 << items.len();
    (0..full).all(|t| (0..items.len()).all(|i| t >> i & 1 == 0 || size(t & !(1 << i)) <= size(t)))
}

fn firm_spec(rng: &mut StdRng, bias: &Bias, workers: &[usize], quota: usize) -> ChoiceSpec {
    if workers.is_empty() {
        return ChoiceSpec::mc(Vec::new());
    }
    if quota == 1 || rng.gen_bool(0.4) {
        return ChoiceSpec::responsive(bias.order(rng, workers), quota);
    }
    loop {
        let relations: Vec<Vec<usize>> = (0..quota).map(|_| bias.order(rng, workers)).collect();
        if mc_cardinal_monotone(&relations) {
            return ChoiceSpec::mc(relations);
        }
    }
}

/// A random market where every firm is cardinal monotone and every worker is
/// quota-filling (quota at most 2). Candidate choice functions are rejection
/// sampled; the library's property checker then confirms the result.
pub fn random_instance(rng: &mut StdRng, max_firms: usize, max_workers: usize) -> Instance {
    let nf = rng.gen_range(2.min(max_firms)..=max_firms);
    let nw = if nf <= max_workers && rng.gen_bool(0.5) {
        nf
    } else {
        rng.gen_range(2.min(max_workers)..=max_workers)
    };
    random_sized(rng, nf, nw)
}

pub fn random_sized(rng: &mut StdRng, nf: usize, nw: usize) -> Instance {
    // opposed markets: firm f starts its list at worker f, worker w ranks the
    // firms that like it most last, which tends to give long lattices
    let opposed = nf == nw && rng.gen_bool(0.7);
    let density = if opposed && rng.gen_bool(0.5) { 1.0 } else { rng.gen_range(0.7..=1.0) };
    let acceptable: Vec<Vec<bool>> = (0..nf)
        .map(|_| (0..nw).map(|_| rng.gen_bool(density)).collect())
        .collect();
    let shared = rng.gen_range(1..=2);
    let quota = |rng: &mut StdRng| if opposed { shared } else { rng.gen_range(1..=2) };
    // independent 2×2 blocks give incomparable rotations
    let blocks = opposed && nf % 2 == 0 && rng.gen_bool(0.5);
    let base = |agent: usize, shift: usize, n: usize| -> Vec<usize> {
        let latin = (0..n).map(|k| (agent + shift + k) % n);
        if !blocks {
            return latin.collect();
        }
        let start = agent / 2 * 2;
        let mut v: Vec<usize> = (0..2).map(|k| start + (agent + shift + k) % 2).collect();
        v.extend(latin.filter(|x| x / 2 * 2 != start));
        v
    };
    let mut builder = InstanceBuilder::numbered(nf, nw);
    for f in 0..nf {
        let ws: Vec<usize> = (0..nw).filter(|&w| acceptable[f][w]).collect();
        let bias = if opposed {
            Bias { base: Some(base(f, 0, nw)) }
        } else {
            Bias::uniform()
        };
        let q = quota(rng);
        builder = builder.choice(AgentId::firm(f), firm_spec(rng, &bias, &ws, q), None);
    }
    let mut worker_quota = Vec::new();
    for w in 0..nw {
        let fs: Vec<usize> = (0..nf).filter(|&f| acceptable[f][w]).collect();
        let q = quota(rng);
        let bias = if opposed {
            Bias { base: Some(base(w, 1, nf)) }
        } else {
            Bias::uniform()
        };
        let (spec, declared) = worker_spec(rng, &bias, &fs, q);
        worker_quota.push(q);
        builder = builder.choice(AgentId::worker(w), spec, declared);
    }
    let inst = builder.build().expect("mutual by construction");
    for f in 0..nf {
        let ok = verify_property(&inst, AgentId::firm(f), Property::CardinalMonotone, DEFAULT_PROPERTY_CAP)
            .expect("small");
        assert!(ok, "generator produced a firm that is not cardinal monotone");
    }
    for (w, &q) in worker_quota.iter().enumerate() {
        let ok = verify_property(&inst, AgentId::worker(w), Property::QuotaFilling(q), DEFAULT_PROPERTY_CAP)
            .expect("small");
        assert!(ok, "generator produced a worker that is not quota-filling");
    }
    inst
}

/// Seeded corpus of `n` random markets with at most 4 firms and 4 workers.
/// Except for every fifth slot, markets with a single stable matching are
/// redrawn so the lattice checks see real structure.
pub fn corpus(seed: u64, n: usize) -> Vec<Instance> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|i| loop {
            let inst = random_instance(&mut rng, 4, 4);
            let stable = enumerate_stable_bruteforce(&inst, DEFAULT_NODE_LIMIT).expect("small market");
            if stable.len() > 1 || i % 5 == 0 {
                break inst;
            }
        })
        .collect()
}

pub const CORPUS_SEED: u64 = 0x5eed_2024;
pub const CORPUS_SIZE: usize = 120;

/// Random integer weights in `[-10, 10]` on every acceptable pair.
pub fn random_weights(rng: &mut StdRng, inst: &Instance) -> choicematch::Weights {
    let mut w = choicematch::Weights::zero();
    for p in inst.acceptable_pairs() {
        w.set(p, rng.gen_range(-10..=10));
    }
    w
}

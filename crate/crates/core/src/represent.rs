//! The rotation poset as a compact representation of all stable matchings.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg;
use crate::market::{Instance, Pair};
use crate::matching::{sort_canonical, Matching, PairSet};
use crate::ringsets::{Lambda, Precedence};

pub const DEFAULT_UPPER_SET_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rotation {
    /// 1-based position along the chain the rotation was extracted from.
    pub index: usize,
    pub plus: PairSet,
    pub minus: PairSet,
}

/// Rotations indexed `0..k` in chain order with `ρ_a ⪰* ρ_b` given by `order.above(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationPoset {
    pub mu_f: Matching,
    pub mu_w: Matching,
    pub rotations: Vec<Rotation>,
    pub lambdas: Vec<Lambda>,
    pub order: Precedence,
    /// Choice-function evaluations spent building the poset.
    pub oracle_calls: u64,
}

/// `x = x0 + A·y` over the acceptable pairs (rows) and rotations (columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub pairs: Vec<Pair>,
    pub matrix: Vec<Vec<i64>>,
    pub x0: Vec<i64>,
}

impl AffineMap {
    pub fn apply(&self, y: &[i64]) -> Vec<i64> {
        self.matrix
            .iter()
            .zip(&self.x0)
            .map(|(row, x)| x + row.iter().zip(y).map(|(a, b)| a * b).sum::<i64>())
            .collect()
    }

    pub fn columns(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }
}

pub fn indicator(upper: &BTreeSet<usize>, k: usize) -> Vec<i64> {
    (0..k).map(|i| i64::from(upper.contains(&i))).collect()
}

impl RotationPoset {
    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    pub fn is_upper_set(&self, subset: &BTreeSet<usize>) -> bool {
        self.order.is_upper_set(subset)
    }

    /// `μ_F ∪ ⋃ρ⁺ ∖ ⋃ρ⁻` over the rotations of an upper set.
    pub fn realize(&self, instance: &Instance, upper: &BTreeSet<usize>) -> Result<Matching> {
        if !self.is_upper_set(upper) {
            return Err(Error::NotUpperSet(format!(
                "{:?}",
                upper.iter().map(|i| i + 1).collect::<Vec<_>>()
            )));
        }
        let mut pairs = self.mu_f.pair_set();
        for &i in upper {
            pairs.extend(self.rotations[i].plus.iter().copied());
        }
        for &i in upper {
            for p in &self.rotations[i].minus {
                pairs.remove(p);
            }
        }
        Matching::from_pairs(instance, &pairs)
    }

    pub fn upper_sets(&self, limit: u64) -> Result<Vec<BTreeSet<usize>>> {
        self.order.upper_sets(limit)
    }

    /// Every stable matching, in canonical order.
    pub fn enumerate_stable(&self, instance: &Instance, limit: u64) -> Result<Vec<Matching>> {
        let mut all = self
            .upper_sets(limit)?
            .iter()
            .map(|u| self.realize(instance, u))
            .collect::<Result<Vec<_>>>()?;
        sort_canonical(instance, &mut all, &self.stable_pairs())?;
        Ok(all)
    }

    /// `μ_F` together with every `ρ⁺`.
    pub fn stable_pairs(&self) -> PairSet {
        let mut pairs = self.mu_f.pair_set();
        for r in &self.rotations {
            pairs.extend(r.plus.iter().copied());
        }
        pairs
    }

    /// Columns `χ^{ρ⁺} − χ^{ρ⁻}` and `x0 = χ^{μ_F}`; errors unless full column rank.
    pub fn affine_map(&self, instance: &Instance) -> Result<AffineMap> {
        let pairs = instance.acceptable_pairs();
        let matrix: Vec<Vec<i64>> = pairs
            .iter()
            .map(|p| {
                self.rotations
                    .iter()
                    .map(|r| i64::from(r.plus.contains(p)) - i64::from(r.minus.contains(p)))
                    .collect()
            })
            .collect();
        let x0 = self.mu_f.characteristic(instance);
        let columns = self.rotations.len();
        let rank = linalg::rank(&linalg::transpose(&matrix, columns));
        if rank != columns {
            return Err(Error::RankDeficient { rank, columns });
        }
        Ok(AffineMap { pairs, matrix, x0 })
    }

    /// `ROTATION <i> PLUS <pairs> MINUS <pairs>` lines, then `ORDER <i> <j>`
    /// for each covering relation `ρ_i ⪰* ρ_j`.
    pub fn to_text(&self, instance: &Instance) -> String {
        let fmt_pairs = |set: &PairSet| {
            set.iter()
                .map(|p| format!("({},{})", instance.firm_name(p.firm), instance.worker_name(p.worker)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::new();
        for (i, r) in self.rotations.iter().enumerate() {
            let _ = writeln!(out, "ROTATION {} PLUS {} MINUS {}", i + 1, fmt_pairs(&r.plus), fmt_pairs(&r.minus));
        }
        for (a, b) in self.order.covers() {
            let _ = writeln!(out, "ORDER {} {}", a + 1, b + 1);
        }
        out
    }
}

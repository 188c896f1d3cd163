//! Order-polytope facets of a rotation poset and the extended formulation of
//! the stable matching polytope.

use std::fmt::Write as _;

use crate::algorithms::rotation_poset;
use crate::error::Result;
use crate::market::Instance;
use crate::represent::{AffineMap, RotationPoset};
use crate::ringsets::Precedence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FacetKind {
    /// `y_i ≥ 0` for a minimal element.
    Nonneg,
    /// `y_i ≤ 1` for a maximal element.
    Upper,
    /// `y_i ≥ y_j` for a covering pair.
    Precedence,
}

/// `Σ coeff·y ≥ rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearInequality {
    pub coeffs: Vec<(usize, i64)>,
    pub rhs: i64,
    pub kind: FacetKind,
}

impl LinearInequality {
    pub fn holds(&self, y: &[i64]) -> bool {
        self.slack(y) >= 0
    }

    pub fn slack(&self, y: &[i64]) -> i64 {
        self.coeffs.iter().map(|&(i, c)| c * y[i]).sum::<i64>() - self.rhs
    }
}

/// Nonneg rows, then upper rows, then precedence rows, each sorted by index.
pub fn order_polytope_facets(order: &Precedence) -> Vec<LinearInequality> {
    let mut rows: Vec<LinearInequality> = order
        .minimal()
        .into_iter()
        .map(|i| LinearInequality {
            coeffs: vec![(i, 1)],
            rhs: 0,
            kind: FacetKind::Nonneg,
        })
        .collect();
    rows.extend(order.maximal().into_iter().map(|i| LinearInequality {
        coeffs: vec![(i, -1)],
        rhs: -1,
        kind: FacetKind::Upper,
    }));
    rows.extend(order.covers().into_iter().map(|(a, b)| LinearInequality {
        coeffs: vec![(a, 1), (b, -1)],
        rhs: 0,
        kind: FacetKind::Precedence,
    }));
    rows
}

/// `{x = x0 + A·y, y in the order polytope}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formulation {
    pub map: AffineMap,
    pub facets: Vec<LinearInequality>,
}

impl Formulation {
    pub fn from_poset(instance: &Instance, poset: &RotationPoset) -> Result<Self> {
        Ok(Formulation {
            map: poset.affine_map(instance)?,
            facets: order_polytope_facets(&poset.order),
        })
    }

    pub fn x_variables(&self) -> usize {
        self.map.pairs.len()
    }

    pub fn y_variables(&self) -> usize {
        self.map.columns()
    }

    /// True iff `(x, y)` satisfies every equation and inequality.
    pub fn satisfied_by(&self, x: &[i64], y: &[i64]) -> bool {
        self.map.apply(y) == x && self.facets.iter().all(|f| f.holds(y))
    }

    pub fn to_lp(&self, instance: &Instance) -> String {
        let xname = |e: usize| {
            let p = self.map.pairs[e];
            format!("x_{}_{}", instance.firm_name(p.firm), instance.worker_name(p.worker))
        };
        let yname = |i: usize| format!("y_r{}", i + 1);
        let mut out = String::from("max\n obj: 0\nsubject to\n");
        for (e, row) in self.map.matrix.iter().enumerate() {
            let mut line = xname(e);
            for (i, &a) in row.iter().enumerate() {
                match a {
                    0 => {}
                    1 => line.push_str(&format!(" - {}", yname(i))),
                    -1 => line.push_str(&format!(" + {}", yname(i))),
                    _ => line.push_str(&format!(" - {} {}", a, yname(i))),
                }
            }
            let _ = writeln!(out, " eq_{}: {} = {}", &xname(e)[2..], line, self.map.x0[e]);
        }
        for f in &self.facets {
            match (f.kind, f.coeffs.as_slice()) {
                (FacetKind::Nonneg, [(i, _)]) => {
                    let _ = writeln!(out, " nonneg_r{}: {} >= 0", i + 1, yname(*i));
                }
                (FacetKind::Upper, [(i, _)]) => {
                    let _ = writeln!(out, " upper_r{}: {} <= 1", i + 1, yname(*i));
                }
                (FacetKind::Precedence, [(a, _), (b, _)]) => {
                    let _ = writeln!(out, " prec_r{}_r{}: {} - {} >= 0", a + 1, b + 1, yname(*a), yname(*b));
                }
                _ => unreachable!("order-polytope rows have the shapes above"),
            }
        }
        out.push_str("bounds\n");
        for e in 0..self.x_variables() {
            let _ = writeln!(out, " {} free", xname(e));
        }
        for i in 0..self.y_variables() {
            let _ = writeln!(out, " {} free", yname(i));
        }
        out.push_str("end\n");
        out
    }
}

pub fn extended_formulation(instance: &Instance) -> Result<Formulation> {
    Formulation::from_poset(instance, &rotation_poset(instance)?)
}

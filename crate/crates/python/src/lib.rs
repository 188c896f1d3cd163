//! Python bindings. Agents and pairs cross the boundary by name.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use choicematch::algorithms::{deferred_acceptance, rotation_poset};
use choicematch::format::parse_instance;
use choicematch::market::{verify_property, DEFAULT_PROPERTY_CAP};
use choicematch::matching::is_stable;
use choicematch::optimize::max_weight_with_poset;
use choicematch::oracle::{enumerate_stable_bruteforce, verify_lattice, Axiom, DEFAULT_NODE_LIMIT};
use choicematch::polytope::Formulation;
use choicematch::represent::DEFAULT_UPPER_SET_LIMIT;
use choicematch::{AgentId, AgentSet, Matching, Pair, Property, Side, Weights};

type NamedPair = (String, String);

fn err(e: choicematch::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn named(inst: &choicematch::Instance, mu: &Matching) -> Vec<NamedPair> {
    mu.pairs()
        .into_iter()
        .map(|p| (inst.firm_name(p.firm).to_string(), inst.worker_name(p.worker).to_string()))
        .collect()
}

/// A two-sided market parsed from the instance text format.
#[pyclass(name = "Instance", module = "choicematch_py", frozen)]
struct PyInstance {
    inner: choicematch::Instance,
}

impl PyInstance {
    fn agent(&self, name: &str) -> PyResult<AgentId> {
        self.inner
            .lookup(name)
            .ok_or_else(|| PyValueError::new_err(format!("unknown agent `{name}`")))
    }

    fn side_index(&self, name: &str, side: Side) -> PyResult<usize> {
        let id = self.agent(name)?;
        if id.side != side {
            return Err(PyValueError::new_err(format!("`{name}` is on the wrong side")));
        }
        Ok(id.index)
    }

    fn matching(&self, pairs: Vec<NamedPair>) -> PyResult<Matching> {
        let pairs = pairs
            .iter()
            .map(|(f, w)| Ok(Pair::new(self.side_index(f, Side::Firm)?, self.side_index(w, Side::Worker)?)))
            .collect::<PyResult<Vec<_>>>()?;
        Matching::from_pairs(&self.inner, &pairs).map_err(err)
    }
}

#[pymethods]
impl PyInstance {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyInstance {
            inner: parse_instance(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Self::parse(&text)
    }

    #[getter]
    fn firms(&self) -> Vec<String> {
        (0..self.inner.firm_count()).map(|f| self.inner.firm_name(f).to_string()).collect()
    }

    #[getter]
    fn workers(&self) -> Vec<String> {
        (0..self.inner.worker_count()).map(|w| self.inner.worker_name(w).to_string()).collect()
    }

    fn acceptable_pairs(&self) -> Vec<NamedPair> {
        self.inner
            .acceptable_pairs()
            .into_iter()
            .map(|p| (self.inner.firm_name(p.firm).to_string(), self.inner.worker_name(p.worker).to_string()))
            .collect()
    }

    /// Choice of `agent` from the named partners.
    fn choose(&self, agent: &str, partners: Vec<String>) -> PyResult<Vec<String>> {
        let id = self.agent(agent)?;
        let set = partners
            .iter()
            .map(|p| self.side_index(p, id.side.other()))
            .collect::<PyResult<AgentSet>>()?;
        let chosen = self.inner.choose(id, &set).map_err(err)?;
        Ok(chosen
            .iter()
            .map(|i| self.inner.name(AgentId { side: id.side.other(), index: i }).to_string())
            .collect())
    }

    /// `property` is one of substitutable, consistent, cardinal-monotone,
    /// path-independent, quota-filling (which needs `quota`).
    #[pyo3(signature = (agent, property, quota=None, cap=DEFAULT_PROPERTY_CAP))]
    fn verify_property(&self, agent: &str, property: &str, quota: Option<usize>, cap: usize) -> PyResult<bool> {
        let p = match (property, quota) {
            ("substitutable", _) => Property::Substitutable,
            ("consistent", _) => Property::Consistent,
            ("cardinal-monotone", _) => Property::CardinalMonotone,
            ("path-independent", _) => Property::PathIndependent,
            ("quota-filling", Some(q)) => Property::QuotaFilling(q),
            _ => return Err(PyValueError::new_err(format!("unknown property `{property}`"))),
        };
        verify_property(&self.inner, self.agent(agent)?, p, cap).map_err(err)
    }

    #[pyo3(signature = (side="firms"))]
    fn deferred_acceptance(&self, side: &str) -> PyResult<Vec<NamedPair>> {
        let side = match side {
            "firms" => Side::Firm,
            "workers" => Side::Worker,
            _ => return Err(PyValueError::new_err("side must be `firms` or `workers`")),
        };
        let mu = deferred_acceptance(&self.inner, side).map_err(err)?;
        Ok(named(&self.inner, &mu))
    }

    fn is_stable(&self, pairs: Vec<NamedPair>) -> PyResult<bool> {
        is_stable(&self.inner, &self.matching(pairs)?).map_err(err)
    }

    fn rotation_poset(&self) -> PyResult<PyRotationPoset> {
        Ok(PyRotationPoset {
            poset: rotation_poset(&self.inner).map_err(err)?,
            instance: self.inner.clone(),
        })
    }

    #[pyo3(signature = (method="poset"))]
    fn enumerate_stable(&self, method: &str) -> PyResult<Vec<Vec<NamedPair>>> {
        let all = match method {
            "poset" => rotation_poset(&self.inner)
                .and_then(|p| p.enumerate_stable(&self.inner, DEFAULT_UPPER_SET_LIMIT))
                .map_err(err)?,
            "brute" => enumerate_stable_bruteforce(&self.inner, DEFAULT_NODE_LIMIT).map_err(err)?,
            _ => return Err(PyValueError::new_err("method must be `poset` or `brute`")),
        };
        Ok(all.iter().map(|m| named(&self.inner, m)).collect())
    }

    /// Maximum-weight stable matching for integer pair weights.
    fn optimize(&self, weights: HashMap<NamedPair, i64>) -> PyResult<(Vec<NamedPair>, i64)> {
        let mut map = BTreeMap::new();
        for ((f, w), v) in weights {
            let pair = Pair::new(self.side_index(&f, Side::Firm)?, self.side_index(&w, Side::Worker)?);
            if !self.inner.is_acceptable(pair) {
                return Err(PyValueError::new_err(format!("pair ({f}, {w}) is not acceptable")));
            }
            map.insert(pair, v);
        }
        let poset = rotation_poset(&self.inner).map_err(err)?;
        let (mu, value) = max_weight_with_poset(&self.inner, &poset, &Weights::from_map(map)).map_err(err)?;
        Ok((named(&self.inner, &mu), value))
    }

    fn polytope_lp(&self) -> PyResult<String> {
        let poset = rotation_poset(&self.inner).map_err(err)?;
        let f = Formulation::from_poset(&self.inner, &poset).map_err(err)?;
        Ok(f.to_lp(&self.inner))
    }

    /// Axiom name to pass/fail over the brute-force stable set.
    fn verify_lattice(&self) -> PyResult<BTreeMap<String, bool>> {
        let report = verify_lattice(&self.inner, DEFAULT_NODE_LIMIT).map_err(err)?;
        Ok(Axiom::ALL.iter().map(|a| (a.name().to_string(), report.holds(*a))).collect())
    }

    fn oracle_calls(&self) -> u64 {
        self.inner.oracle_calls()
    }
}

/// Rotations with their precedence; indices are 1-based.
#[pyclass(name = "RotationPoset", module = "choicematch_py", frozen)]
struct PyRotationPoset {
    poset: choicematch::RotationPoset,
    instance: choicematch::Instance,
}

#[pymethods]
impl PyRotationPoset {
    fn __len__(&self) -> usize {
        self.poset.len()
    }

    /// `(plus, minus)` pair lists per rotation.
    fn rotations(&self) -> Vec<(Vec<NamedPair>, Vec<NamedPair>)> {
        let names = |set: &choicematch::PairSet| {
            set.iter()
                .map(|p| (self.instance.firm_name(p.firm).to_string(), self.instance.worker_name(p.worker).to_string()))
                .collect()
        };
        self.poset.rotations.iter().map(|r| (names(&r.plus), names(&r.minus))).collect()
    }

    /// Covering pairs `(i, j)` with rotation i preceding rotation j.
    fn covers(&self) -> Vec<(usize, usize)> {
        self.poset.order.covers().into_iter().map(|(a, b)| (a + 1, b + 1)).collect()
    }

    fn lambdas(&self) -> Vec<Vec<usize>> {
        self.poset.lambdas.iter().map(|l| l.iter().copied().collect()).collect()
    }

    fn is_upper_set(&self, rotations: Vec<usize>) -> bool {
        let set: BTreeSet<usize> = rotations.iter().filter_map(|i| i.checked_sub(1)).collect();
        set.len() == rotations.len() && self.poset.is_upper_set(&set)
    }

    fn realize(&self, rotations: Vec<usize>) -> PyResult<Vec<NamedPair>> {
        let set: BTreeSet<usize> = rotations.iter().map(|i| i.wrapping_sub(1)).collect();
        let mu = self.poset.realize(&self.instance, &set).map_err(err)?;
        Ok(named(&self.instance, &mu))
    }

    fn stable_pairs(&self) -> Vec<NamedPair> {
        self.poset
            .stable_pairs()
            .into_iter()
            .map(|p| (self.instance.firm_name(p.firm).to_string(), self.instance.worker_name(p.worker).to_string()))
            .collect()
    }

    #[getter]
    fn oracle_calls(&self) -> u64 {
        self.poset.oracle_calls
    }

    fn to_text(&self) -> String {
        self.poset.to_text(&self.instance)
    }
}

#[pymodule]
fn choicematch_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyRotationPoset>()?;
    Ok(())
}

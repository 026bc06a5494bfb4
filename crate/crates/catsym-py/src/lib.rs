//! Python bindings for the finite-category toolkit: parse categories from
//! the text format, search and inspect duality structures, classify the
//! symmetry hierarchy, iterate the induced endofunctor, and run the
//! finite-set model claims.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use catsym_core::cat::{ArrId, FiniteCategory, ObjId};
use catsym_core::comma::{LevelCaps, LevelTower};
use catsym_core::finset::{check_set_claims, ClaimMode, FinSetCaps};
use catsym_core::format::{parse_category_file, print_category_file, tokenize_category};
use catsym_core::internal::{build_e, orbit_arr, orbit_obj};
use catsym_core::symmetry::{
    check_cocc, check_imc, check_psc, check_sec, classify, search_cocc, search_psc, Budget,
    CoccStructure, ImcOutcome, LayerVerdict, PscStructure, SearchOutcome,
};

fn budget_of(max_nodes: Option<u64>) -> Budget {
    match max_nodes {
        Some(n) => Budget { max_nodes: n },
        None => Budget::default(),
    }
}

fn caps_of(max_objects: Option<usize>, max_arrows: Option<usize>) -> LevelCaps {
    let mut caps = LevelCaps::default();
    if let Some(n) = max_objects {
        caps.max_objects = n;
    }
    if let Some(n) = max_arrows {
        caps.max_arrows = n;
    }
    caps
}

/// A finite category, optionally carrying the structures declared in the
/// file it was parsed from.
#[pyclass(name = "Category", module = "catsym_py")]
struct PyCategory {
    cat: Arc<FiniteCategory>,
    psc: Option<PscStructure>,
    cocc: Option<CoccStructure>,
    source: Option<String>,
}

impl PyCategory {
    fn obj(&self, name: &str) -> PyResult<ObjId> {
        self.cat
            .obj_by_name(name)
            .ok_or_else(|| PyKeyError::new_err(format!("unknown object {name}")))
    }

    fn arr(&self, name: &str) -> PyResult<ArrId> {
        self.cat
            .arr_by_name(name)
            .ok_or_else(|| PyKeyError::new_err(format!("unknown arrow {name}")))
    }

    fn resolved_psc(&self, budget: Budget) -> PyResult<PscStructure> {
        if let Some(p) = &self.psc {
            return Ok(p.clone());
        }
        match search_psc(&self.cat, budget) {
            SearchOutcome::Found(p) => Ok(p),
            SearchOutcome::AbsentProven => Err(PyValueError::new_err(
                "NoPscStructure: the category admits no duality structure",
            )),
            SearchOutcome::BudgetExhausted => {
                Err(PyValueError::new_err("duality search budget exhausted"))
            }
        }
    }
}

fn layer_entry(v: &LayerVerdict) -> String {
    match v {
        LayerVerdict::Pass => "PASS".to_string(),
        LayerVerdict::Fail { reason } => format!("FAIL ({reason})"),
        LayerVerdict::Unknown { reason } => format!("BUDGET ({reason})"),
    }
}

fn summary_mark(entry: &str) -> char {
    if entry.starts_with("PASS") {
        '+'
    } else if entry.starts_with("BUDGET") {
        '?'
    } else {
        '-'
    }
}

#[pymethods]
impl PyCategory {
    /// Parses the text format; declared `psc.*` and `cocc.*` sections are
    /// validated structurally and kept on the result.
    #[staticmethod]
    #[pyo3(signature = (text, max_objects=None, max_arrows=None))]
    fn parse(text: &str, max_objects: Option<usize>, max_arrows: Option<usize>) -> PyResult<Self> {
        let file = parse_category_file(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let lowered = file
            .lower(caps_of(max_objects, max_arrows))
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self {
            cat: lowered.cat,
            psc: lowered.psc,
            cocc: lowered.cocc,
            source: Some(print_category_file(&file)),
        })
    }

    #[getter]
    fn n_objects(&self) -> usize {
        self.cat.n_objects()
    }

    #[getter]
    fn n_arrows(&self) -> usize {
        self.cat.n_arrows()
    }

    fn objects(&self) -> Vec<String> {
        self.cat.objects().map(|o| self.cat.obj_name(o).to_string()).collect()
    }

    fn arrows(&self) -> Vec<String> {
        self.cat.arrows().map(|f| self.cat.arr_name(f).to_string()).collect()
    }

    fn dom(&self, arrow: &str) -> PyResult<String> {
        Ok(self.cat.obj_name(self.cat.dom(self.arr(arrow)?)).to_string())
    }

    fn cod(&self, arrow: &str) -> PyResult<String> {
        Ok(self.cat.obj_name(self.cat.cod(self.arr(arrow)?)).to_string())
    }

    fn identity(&self, obj: &str) -> PyResult<String> {
        Ok(self.cat.arr_name(self.cat.identity(self.obj(obj)?)).to_string())
    }

    /// `second . first`, in composition order.
    fn compose(&self, second: &str, first: &str) -> PyResult<String> {
        let h = self
            .cat
            .compose(self.arr(second)?, self.arr(first)?)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(self.cat.arr_name(h).to_string())
    }

    fn is_iso(&self, arrow: &str) -> PyResult<bool> {
        Ok(self.cat.is_iso(self.arr(arrow)?))
    }

    fn first_non_invertible(&self) -> Option<String> {
        catsym_core::symmetry::first_non_invertible(&self.cat)
            .map(|f| self.cat.arr_name(f).to_string())
    }

    /// Canonical text of the category; identities stay implicit.
    fn to_text(&self) -> String {
        match &self.source {
            Some(s) => s.clone(),
            None => print_category_file(&tokenize_category(&self.cat).0),
        }
    }

    /// The `n`-th level of the tower over this category, with tokenized
    /// names `o{i}` and `m{k}`.
    #[pyo3(signature = (n, max_objects=None, max_arrows=None))]
    fn level(&self, n: usize, max_objects: Option<usize>, max_arrows: Option<usize>) -> PyResult<Self> {
        let mut tower = LevelTower::new(self.cat.clone(), caps_of(max_objects, max_arrows));
        let cat = tower.category(n).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let (file, _) = tokenize_category(&cat);
        let lowered = file
            .lower(caps_of(max_objects, max_arrows))
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { cat: lowered.cat, psc: None, cocc: None, source: Some(print_category_file(&file)) })
    }

    fn has_declared_duality(&self) -> bool {
        self.psc.is_some()
    }

    /// The declared duality structure if present, otherwise the least one
    /// found by exhaustive search; `None` when provably absent.
    #[pyo3(signature = (max_nodes=None))]
    fn duality(&self, max_nodes: Option<u64>) -> PyResult<Option<PyDuality>> {
        if let Some(p) = &self.psc {
            return Ok(Some(PyDuality { psc: p.clone() }));
        }
        match search_psc(&self.cat, budget_of(max_nodes)) {
            SearchOutcome::Found(p) => Ok(Some(PyDuality { psc: p })),
            SearchOutcome::AbsentProven => Ok(None),
            SearchOutcome::BudgetExhausted => {
                Err(PyValueError::new_err("duality search budget exhausted"))
            }
        }
    }

    /// Bottom-up layer verdicts plus a `summary` line; declared
    /// structures are checked, missing ones searched within the budget.
    #[pyo3(signature = (max_nodes=None, max_objects=None, max_arrows=None))]
    fn classify<'py>(
        &self,
        py: Python<'py>,
        max_nodes: Option<u64>,
        max_objects: Option<usize>,
        max_arrows: Option<usize>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let budget = budget_of(max_nodes);
        let caps = caps_of(max_objects, max_arrows);

        let entries: Vec<(&str, String)> = if let Some(c) = &self.cocc {
            let v = classify(c, budget);
            vec![
                ("psc", layer_entry(&v.psc)),
                ("cocc", layer_entry(&v.cocc)),
                ("sec", layer_entry(&v.sec)),
                ("imc", layer_entry(&v.imc)),
            ]
        } else {
            let psc = match &self.psc {
                Some(p) => match check_psc(p) {
                    Ok(()) => Ok(p.clone()),
                    Err(e) => Err(format!("FAIL ({e})")),
                },
                None => match search_psc(&self.cat, budget) {
                    SearchOutcome::Found(p) => Ok(p),
                    SearchOutcome::AbsentProven => {
                        Err("FAIL (no duality structure exists)".to_string())
                    }
                    SearchOutcome::BudgetExhausted => {
                        Err("BUDGET (duality search budget exhausted)".to_string())
                    }
                },
            };
            match psc {
                Err(entry) => vec![
                    ("psc", entry),
                    ("cocc", "ABSENT".to_string()),
                    ("sec", "ABSENT".to_string()),
                    ("imc", "ABSENT".to_string()),
                ],
                Ok(p) => {
                    let cocc = search_cocc(&p, caps, budget)
                        .map_err(|e| PyValueError::new_err(e.to_string()))?;
                    match cocc {
                        SearchOutcome::Found(c) => {
                            let sec = match check_sec(&c) {
                                Ok(()) => "PASS".to_string(),
                                Err(e) => format!("FAIL ({e})"),
                            };
                            let imc = match check_imc(&c, budget) {
                                ImcOutcome::Holds { .. } => "PASS".to_string(),
                                ImcOutcome::Fails { reason } => format!("FAIL ({reason})"),
                                ImcOutcome::BudgetExhausted => {
                                    "BUDGET (component search budget exhausted)".to_string()
                                }
                            };
                            let cocc_entry = match check_cocc(&c) {
                                Ok(()) => "PASS".to_string(),
                                Err(e) => format!("FAIL ({e})"),
                            };
                            vec![
                                ("psc", "PASS".to_string()),
                                ("cocc", cocc_entry),
                                ("sec", sec),
                                ("imc", imc),
                            ]
                        }
                        SearchOutcome::AbsentProven => vec![
                            ("psc", "PASS".to_string()),
                            ("cocc", "FAIL (no closure functor exists)".to_string()),
                            ("sec", "ABSENT".to_string()),
                            ("imc", "ABSENT".to_string()),
                        ],
                        SearchOutcome::BudgetExhausted => vec![
                            ("psc", "PASS".to_string()),
                            ("cocc", "BUDGET (closure search budget exhausted)".to_string()),
                            ("sec", "ABSENT".to_string()),
                            ("imc", "ABSENT".to_string()),
                        ],
                    }
                }
            }
        };

        let labels = [("psc", "PSC"), ("cocc", "CoCC"), ("sec", "SEC"), ("imc", "IMC")];
        let summary = labels
            .iter()
            .map(|(key, label)| {
                let entry = entries.iter().find(|(k, _)| k == key).expect("all layers present");
                format!("{label}{}", summary_mark(&entry.1))
            })
            .collect::<Vec<_>>()
            .join(" ");

        let out = PyDict::new(py);
        for (k, v) in &entries {
            out.set_item(k, v)?;
        }
        out.set_item("summary", summary)?;
        Ok(out)
    }

    /// Applies the induced endofunctor `n` times to the named object or
    /// arrow and returns the result's name.
    #[pyo3(signature = (target, n=1, max_nodes=None))]
    fn apply_e(&self, target: &str, n: u64, max_nodes: Option<u64>) -> PyResult<String> {
        let psc = self.resolved_psc(budget_of(max_nodes))?;
        let e = build_e(&psc).map_err(|err| PyValueError::new_err(err.to_string()))?;
        if let Some(mut o) = self.cat.obj_by_name(target) {
            for _ in 0..n {
                o = e.apply_obj(o);
            }
            return Ok(self.cat.obj_name(o).to_string());
        }
        let mut f = self.arr(target)?;
        for _ in 0..n {
            f = e.apply_arr(f);
        }
        Ok(self.cat.arr_name(f).to_string())
    }

    /// The orbit of the named object or arrow under the endofunctor:
    /// `(points, cycle)` where `cycle` is `(start, length)` once a point
    /// recurs within the depth.
    #[pyo3(signature = (target, depth=3, max_nodes=None))]
    fn orbit(
        &self,
        target: &str,
        depth: usize,
        max_nodes: Option<u64>,
    ) -> PyResult<(Vec<String>, Option<(usize, usize)>)> {
        let psc = self.resolved_psc(budget_of(max_nodes))?;
        let e = build_e(&psc).map_err(|err| PyValueError::new_err(err.to_string()))?;
        if let Some(o) = self.cat.obj_by_name(target) {
            let r = orbit_obj(&e, o, depth);
            let points = r.points.iter().map(|&p| self.cat.obj_name(p).to_string()).collect();
            return Ok((points, r.cycle));
        }
        let f = self.arr(target)?;
        let r = orbit_arr(&e, f, depth);
        let points = r.points.iter().map(|&p| self.cat.arr_name(p).to_string()).collect();
        Ok((points, r.cycle))
    }

    fn __repr__(&self) -> String {
        format!("Category({} objects, {} arrows)", self.cat.n_objects(), self.cat.n_arrows())
    }
}

/// A duality structure: object values for arrows, the star table, and the
/// representability witnesses.
#[pyclass(name = "Duality", module = "catsym_py")]
struct PyDuality {
    psc: PscStructure,
}

#[pymethods]
impl PyDuality {
    /// The object standing for the arrow.
    fn btop(&self, arrow: &str) -> PyResult<String> {
        let cat = self.psc.cat();
        let f = cat
            .arr_by_name(arrow)
            .ok_or_else(|| PyKeyError::new_err(format!("unknown arrow {arrow}")))?;
        Ok(cat.obj_name(self.psc.btop(f)).to_string())
    }

    /// The star product of two objects, if the table defines it.
    fn star(&self, x: &str, y: &str) -> PyResult<Option<String>> {
        let cat = self.psc.cat();
        let find = |name: &str| {
            cat.obj_by_name(name)
                .ok_or_else(|| PyKeyError::new_err(format!("unknown object {name}")))
        };
        Ok(self.psc.star(find(x)?, find(y)?).map(|o| cat.obj_name(o).to_string()))
    }

    /// The representability witness at an object.
    fn iso(&self, obj: &str) -> PyResult<String> {
        let cat = self.psc.cat();
        let a = cat
            .obj_by_name(obj)
            .ok_or_else(|| PyKeyError::new_err(format!("unknown object {obj}")))?;
        Ok(cat.arr_name(self.psc.iso(a)).to_string())
    }

    /// Whether the structure passes the full duality law check.
    fn is_coherent(&self) -> bool {
        check_psc(&self.psc).is_ok()
    }

    /// The structure as `psc.*` lines of the text format.
    fn sections(&self) -> String {
        let cat = self.psc.cat();
        let mut out = String::new();
        for f in cat.arrows() {
            out.push_str(&format!(
                "psc.btop: {} -> {}\n",
                cat.arr_name(f),
                cat.obj_name(self.psc.btop(f))
            ));
        }
        for (&(x, y), &z) in self.psc.star_table() {
            out.push_str(&format!(
                "psc.star: {} * {} = {}\n",
                cat.obj_name(x),
                cat.obj_name(y),
                cat.obj_name(z)
            ));
        }
        for a in cat.objects() {
            out.push_str(&format!(
                "psc.iso: {} = {}\n",
                cat.obj_name(a),
                cat.arr_name(self.psc.iso(a))
            ));
        }
        out
    }

    fn __repr__(&self) -> String {
        let cat = self.psc.cat();
        format!(
            "Duality({} arrow values, {} star entries)",
            cat.n_arrows(),
            self.psc.star_table().len()
        )
    }
}

/// Runs the finite-set model claims at ground size `n`: exhaustive when
/// `samples` is omitted, sampled otherwise. Returns claim name -> result.
#[pyfunction]
#[pyo3(signature = (n, samples=None, seed=7))]
fn set_claims(n: usize, samples: Option<usize>, seed: u64) -> PyResult<BTreeMap<String, String>> {
    let mode = match samples {
        Some(samples) => ClaimMode::Sampled { samples, seed },
        None => ClaimMode::Exhaustive,
    };
    let report = check_set_claims(n, mode, FinSetCaps::default())
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let mut out = BTreeMap::new();
    out.insert("hom_law".to_string(), report.hom_law.to_string());
    out.insert("representability".to_string(), report.representability.to_string());
    out.insert("te_functoriality".to_string(), report.te_functoriality.to_string());
    out.insert("te_naturality".to_string(), report.te_naturality.to_string());
    out.insert("sec_identity".to_string(), report.sec_identity.to_string());
    out.insert("rho_naturality".to_string(), report.rho_naturality.to_string());
    out.insert("imc_refuted".to_string(), report.imc_refuted.to_string());
    out.insert("all_verified".to_string(), report.all_verified().to_string());
    Ok(out)
}

#[pymodule]
fn catsym_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCategory>()?;
    m.add_class::<PyDuality>()?;
    m.add_function(wrap_pyfunction!(set_claims, m)?)?;
    Ok(())
}

//! Python bindings for weldlab.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;

use weldlab::adversary::{distinguishing_experiment, run_game, Game, GameSpec, Strategy};
use weldlab::advice::{AdviceMap, AdviceSource, CorruptAdvice, Corruption};
use weldlab::analysis::{bipartite_distance, raw_census, DistanceMode, ReducedGraph};
use weldlab::cli::{parity_advice_flags, FILE_LABEL_SEED};
use weldlab::generators::{sample_instance, AdviceConvention, InstanceSpec, Variant};
use weldlab::graph::{self, GraphMeta, MultiGraph, OracleHandle, VariantTag};
use weldlab::quantum::{Marker, QuantumAdvice, WalkSchedule};
use weldlab::tester::{TestContext, TesterConfig};
use weldlab::{seed, suite};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(PyValueError::new_err)
}

fn to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    match v {
        Value::Null => Ok(py.None()),
        Value::Bool(b) => b.into_py_any(py),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_py_any(py),
            (None, Some(i)) => i.into_py_any(py),
            _ => n.as_f64().unwrap_or(f64::NAN).into_py_any(py),
        },
        Value::String(s) => s.into_py_any(py),
        Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(to_py(py, x)?)?;
            }
            list.into_py_any(py)
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_py_any(py)
        }
    }
}

fn serialized<T: serde::Serialize>(py: Python<'_>, x: &T) -> PyResult<Py<PyAny>> {
    to_py(py, &serde_json::to_value(x).map_err(err)?)
}

/// A bounded-degree multigraph with its depth parameter.
#[pyclass(name = "Graph", module = "pyweldlab", frozen)]
struct PyGraph {
    graph: Arc<MultiGraph>,
    meta: GraphMeta,
    /// Ground-truth weld flags, when the graph came from a generator.
    weld: Option<Vec<bool>>,
}

#[pymethods]
impl PyGraph {
    /// Sample an instance.
    #[staticmethod]
    #[pyo3(signature = (k, variant = "g1", seed = 0, j = 1, convention = "odd"))]
    fn sample(k: u32, variant: &str, seed: u64, j: u64, convention: &str) -> PyResult<Self> {
        let spec = InstanceSpec::new(k, parse::<Variant>(variant)?, seed).with_j(j).with_convention(parse(convention)?);
        let inst = sample_instance(spec).map_err(err)?;
        Ok(PyGraph { graph: inst.graph_arc(), meta: inst.meta(), weld: Some(inst.weld_flags()) })
    }

    /// Parse the text graph format.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let f = graph::deserialize(text).map_err(err)?;
        Ok(PyGraph { graph: Arc::new(f.graph), meta: f.meta, weld: None })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Self::from_text(&std::fs::read_to_string(path).map_err(err)?)
    }

    fn to_text(&self) -> String {
        graph::serialize(&self.graph, self.meta)
    }

    #[getter]
    fn k(&self) -> u32 {
        self.meta.k
    }

    #[getter]
    fn variant(&self) -> &'static str {
        self.meta.variant.as_str()
    }

    #[getter]
    fn n(&self) -> usize {
        self.graph.vertex_count()
    }

    fn __len__(&self) -> usize {
        self.graph.vertex_count()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, k={}, variant={})", self.graph.vertex_count(), self.meta.k, self.meta.variant.as_str())
    }

    fn role(&self, v: usize) -> PyResult<&'static str> {
        if v >= self.graph.vertex_count() {
            return Err(err(format!("vertex {v} out of range")));
        }
        Ok(self.graph.role(v).as_str())
    }

    /// `(neighbor, "single" | "double")` pairs of `v`.
    fn neighbors(&self, v: usize) -> PyResult<Vec<(usize, &'static str)>> {
        if v >= self.graph.vertex_count() {
            return Err(err(format!("vertex {v} out of range")));
        }
        Ok(self.graph.neighbors(v).map(|(w, kind)| (w, if kind == graph::EdgeKind::Single { "single" } else { "double" })).collect())
    }

    fn has_loop(&self, v: usize) -> bool {
        v < self.graph.vertex_count() && self.graph.has_loop(v)
    }

    /// Ground-truth weld flags; `None` for graphs read from text.
    fn weld_flags(&self) -> Option<Vec<bool>> {
        self.weld.clone()
    }

    #[pyo3(signature = (convention = "odd"))]
    fn census(&self, py: Python<'_>, convention: &str) -> PyResult<Py<PyAny>> {
        let c: AdviceConvention = parse(convention)?;
        serialized(py, &raw_census(&self.graph, self.meta.k, c))
    }

    fn is_bipartite(&self) -> bool {
        bipartite_distance(&ReducedGraph::from_multigraph(&self.graph), DistanceMode::Lb, 0).is_ok_and(|r| r.is_bipartite)
    }

    /// Distance of the single-edge graph to bipartiteness.
    #[pyo3(signature = (mode = "lb", seed = 0))]
    fn distance(&self, py: Python<'_>, mode: &str, seed: u64) -> PyResult<Py<PyAny>> {
        let r = bipartite_distance(&ReducedGraph::from_multigraph(&self.graph), parse(mode)?, seed).map_err(err)?;
        serialized(py, &r)
    }

    /// Quantum-marker bit per vertex id, and the modeled query charge.
    #[pyo3(signature = (seed = 0, convention = "odd"))]
    fn mark(&self, seed: u64, convention: &str) -> PyResult<(Vec<bool>, u64)> {
        let oracle = OracleHandle::new(Arc::clone(&self.graph), FILE_LABEL_SEED);
        let mut marker = Marker::new(&oracle, self.meta.k, parse(convention)?, seed);
        let bits = (0..self.graph.vertex_count()).map(|v| marker.classify_vertex(oracle.label_of(v)).bit).collect();
        Ok((bits, marker.modeled_quantum_queries))
    }

    /// Run the final test once. `advice` is quantum, zero, one, random,
    /// parity, truth, or a list of per-vertex bits.
    #[pyo3(signature = (advice = None, eps = 0.1, seed = 0, c1 = 10.0, c2 = 10.0, convention = "odd"))]
    fn final_test(&self, py: Python<'_>, advice: Option<&Bound<'_, PyAny>>, eps: f64, seed: u64, c1: f64, c2: f64, convention: &str) -> PyResult<Py<PyAny>> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(err("eps must lie in (0, 1]"));
        }
        let convention: AdviceConvention = parse(convention)?;
        let oracle = OracleHandle::new(Arc::clone(&self.graph), seed::derive(seed, "labels", 0));
        let marker_oracle = oracle.fork();
        let flags: Option<Vec<bool>> = match advice {
            Some(a) if !a.is_instance_of::<pyo3::types::PyString>() => Some(a.extract()?),
            _ => None,
        };
        let name: String = match advice {
            Some(a) if flags.is_none() => a.extract()?,
            _ => "quantum".to_string(),
        };
        let holder: Box<dyn AdviceSource + '_> = match (flags, name.as_str()) {
            (Some(f), _) => {
                if f.len() != self.graph.vertex_count() {
                    return Err(err("advice list must have one bit per vertex"));
                }
                Box::new(AdviceMap::from_vertex_flags(&oracle, &f))
            }
            (None, "quantum") => Box::new(QuantumAdvice::new(Marker::new(&marker_oracle, self.meta.k, convention, seed::derive(seed, "marker", 0)))),
            (None, "zero") => Box::new(CorruptAdvice::new(Corruption::AllZero)),
            (None, "one") => Box::new(CorruptAdvice::new(Corruption::AllOne)),
            (None, "random") => Box::new(CorruptAdvice::new(Corruption::Random(seed::derive(seed, "advice", 0)))),
            (None, "parity") => Box::new(AdviceMap::from_vertex_flags(&oracle, &parity_advice_flags(&self.graph, convention))),
            (None, "truth") => {
                let w = self.weld.as_ref().ok_or_else(|| err("no ground truth for this graph"))?;
                Box::new(AdviceMap::from_vertex_flags(&oracle, w))
            }
            (None, other) => return Err(err(format!("unknown advice `{other}`"))),
        };
        let cfg = TesterConfig { c1, c2, convention, ..TesterConfig::new(self.meta.k, eps) };
        let v = TestContext::new(&oracle, holder.as_ref(), cfg, seed::stream(seed, "tester", 0)).final_test();
        let d = PyDict::new(py);
        d.set_item("accept", v.accept)?;
        d.set_item("reason", v.reason.map(|r| r.name()))?;
        d.set_item("oracle_queries", v.queries_used)?;
        d.set_item("advice_queries", v.advice_queries)?;
        d.into_py_any(py)
    }
}

/// Sampled exit-probability schedule of the column walk at depth `k`.
#[pyfunction]
fn walk_schedule(py: Python<'_>, k: u32) -> PyResult<Py<PyAny>> {
    let s = WalkSchedule::new(k);
    let d = PyDict::new(py);
    d.set_item("k", k)?;
    d.set_item("t_star", s.peak.t_star)?;
    d.set_item("p_star", s.peak.p_star)?;
    d.set_item("run_t", s.run.t_star)?;
    d.set_item("run_p", s.run.p_star)?;
    d.set_item("modeled_queries", s.modeled_queries())?;
    d.into_py_any(py)
}

/// `(t, p_entrance, p_exit)` rows.
#[pyfunction]
fn walk_sweep(k: u32, t_max: f64, dt: f64) -> PyResult<Vec<(f64, f64, f64)>> {
    if k == 0 || dt <= 0.0 || t_max < 0.0 {
        return Err(err("need k >= 1, dt > 0 and t_max >= 0"));
    }
    Ok(suite::walk_sweep(k, t_max, dt))
}

#[pyfunction]
#[pyo3(signature = (game, k, t, trials = 1000, strategy = "random-walk", seed = 0))]
fn play_game(py: Python<'_>, game: &str, k: u32, t: u64, trials: u64, strategy: &str, seed: u64) -> PyResult<Py<PyAny>> {
    let spec = GameSpec { game: parse::<Game>(game)?, k, t, trials };
    serialized(py, &run_game(spec, parse::<Strategy>(strategy)?, seed).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (k, t, trials = 1000, strategy = "random-walk", seed = 0))]
fn distinguish(py: Python<'_>, k: u32, t: u64, trials: u64, strategy: &str, seed: u64) -> PyResult<Py<PyAny>> {
    serialized(py, &distinguishing_experiment(k, t, parse::<Strategy>(strategy)?, trials, seed).map_err(err)?)
}

/// One acceptance criterion (C1..C8, S1) as a dict.
#[pyfunction]
#[pyo3(signature = (id, seed = suite::ACCEPTANCE_SEED))]
fn run_criterion(py: Python<'_>, id: &str, seed: u64) -> PyResult<Py<PyAny>> {
    let c = py.detach(|| suite::run_criterion(id, seed)).map_err(err)?;
    serialized(py, &c)
}

#[pymodule]
fn pyweldlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(walk_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(walk_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(play_game, m)?)?;
    m.add_function(wrap_pyfunction!(distinguish, m)?)?;
    m.add_function(wrap_pyfunction!(run_criterion, m)?)?;
    m.add("FILE_LABEL_SEED", FILE_LABEL_SEED)?;
    m.add("VARIANTS", [VariantTag::G1.as_str(), VariantTag::G2.as_str(), VariantTag::Yes.as_str()])?;
    Ok(())
}

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use pw::estimators::{self, gap_for_fraction};
use pw::graph::{EdgePolicy, Label, LabelOrigin, NodeId, Topology};
use pw::ingest::{self, LabelOptions};
use pw::theory::{self, DegreeMoments};
use pw::walker::{PublicDegreeMode, WalkConfig};
use pw::{synth, LabeledGraph, PublicClusterView, WalkRecord};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Undirected graph with public/private node labels. Node ids are dense
/// `0..node_count`; `original_ids` maps them back to the input ids.
#[pyclass(name = "Graph", module = "privwalk", skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: LabeledGraph,
    original_ids: Arc<Vec<u64>>,
}

impl PyGraph {
    fn synthetic(inner: LabeledGraph) -> Self {
        let n = inner.node_count() as u64;
        PyGraph { inner, original_ids: Arc::new((0..n).collect()) }
    }

    fn relabel(&self, inner: LabeledGraph) -> Self {
        PyGraph { inner, original_ids: Arc::clone(&self.original_ids) }
    }

    fn check(&self, v: NodeId) -> PyResult<()> {
        if (v as usize) < self.inner.node_count() {
            Ok(())
        } else {
            Err(value_err(format!("node {v} out of range")))
        }
    }
}

#[pymethods]
impl PyGraph {
    /// Builds an all-public graph on nodes `0..n` from `(u, v)` pairs.
    #[new]
    #[pyo3(signature = (node_count, edges))]
    fn new(node_count: usize, edges: Vec<(NodeId, NodeId)>) -> PyResult<Self> {
        let topology = Topology::from_edges(node_count, &edges, EdgePolicy::Drop).map_err(value_err)?;
        LabeledGraph::all_public(Arc::new(topology)).map(Self::synthetic).map_err(value_err)
    }

    /// Reads and cleans an edge list, keeping its largest connected component.
    #[staticmethod]
    #[pyo3(signature = (path, directed = false))]
    fn load(path: PathBuf, directed: bool) -> PyResult<Self> {
        let g = ingest::load_edge_list(&path, directed).map_err(value_err)?;
        Ok(PyGraph { inner: g.graph, original_ids: Arc::new(g.original_ids) })
    }

    #[staticmethod]
    #[pyo3(signature = (n, m, seed = 0))]
    fn preferential_attachment(n: usize, m: usize, seed: u64) -> PyResult<Self> {
        if m == 0 || n <= m + 1 {
            return Err(value_err("need n > m + 1 and m >= 1"));
        }
        Ok(Self::synthetic(synth::preferential_attachment(n, m, seed)))
    }

    #[staticmethod]
    #[pyo3(signature = (n, extra_edges, seed = 0))]
    fn random_connected(n: usize, extra_edges: usize, seed: u64) -> PyResult<Self> {
        if n < 2 {
            return Err(value_err("need n >= 2"));
        }
        Ok(Self::synthetic(synth::random_connected(n, extra_edges, seed)))
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn average_degree(&self) -> f64 {
        self.inner.average_degree()
    }

    #[getter]
    fn private_count(&self) -> usize {
        self.inner.private_count()
    }

    #[getter]
    fn original_ids(&self) -> Vec<u64> {
        self.original_ids.to_vec()
    }

    fn degree(&self, v: NodeId) -> PyResult<u32> {
        self.check(v)?;
        Ok(self.inner.degree(v))
    }

    fn neighbors(&self, v: NodeId) -> PyResult<Vec<NodeId>> {
        self.check(v)?;
        Ok(self.inner.neighbors(v).to_vec())
    }

    fn is_public(&self, v: NodeId) -> PyResult<bool> {
        self.check(v)?;
        Ok(self.inner.is_public(v))
    }

    /// Copy with independent Bernoulli(p) private labels.
    #[pyo3(signature = (p, seed = 0))]
    fn with_bernoulli_labels(&self, p: f64, seed: u64) -> PyResult<Self> {
        self.inner.assign_labels_bernoulli(p, seed).map(|g| self.relabel(g)).map_err(value_err)
    }

    /// Copy where exactly the listed nodes are private.
    fn with_private(&self, private: Vec<NodeId>) -> PyResult<Self> {
        let mut labels = vec![Label::Public; self.inner.node_count()];
        for v in private {
            self.check(v)?;
            labels[v as usize] = Label::Private;
        }
        self.inner.with_labels(labels, LabelOrigin::File).map(|g| self.relabel(g)).map_err(value_err)
    }

    /// Copy with labels read from an `id flag` file (1 = private).
    fn with_label_file(&self, path: PathBuf) -> PyResult<Self> {
        let ingested = ingest::IngestedGraph {
            graph: self.inner.clone(),
            original_ids: self.original_ids.to_vec(),
            stats: Default::default(),
        };
        ingest::load_labels(&path, &ingested, LabelOptions::default())
            .map(|g| self.relabel(g))
            .map_err(value_err)
    }

    fn largest_public_cluster(&self) -> PyResult<PyCluster> {
        let view = pw::largest_public_cluster(&self.inner).map_err(value_err)?;
        Ok(PyCluster { graph: self.inner.clone(), view: Arc::new(view) })
    }

    /// Expected errors of both estimator families for Bernoulli(p) labels.
    fn expected_errors(&self, p: f64) -> PyResult<BTreeMap<&'static str, f64>> {
        if !(0.0..=1.0).contains(&p) {
            return Err(value_err("p must lie in [0, 1]"));
        }
        let e = theory::expected_errors(self.inner.topology(), p);
        Ok(BTreeMap::from([
            ("expected_n_star", e.expected_n_star),
            ("alpha_p", e.alpha_p),
            ("expected_n_tilde", e.expected_n_tilde),
            ("expected_davg_star", e.expected_davg_star),
            ("expected_davg_tilde", e.expected_davg_tilde),
        ]))
    }

    /// Whether both proposed estimators are expected to beat the prior ones at `p`.
    fn corollary_inequalities(&self, p: f64) -> (bool, bool) {
        theory::corollary_inequalities(self.inner.topology(), p)
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(nodes={}, edges={}, private={})",
            self.inner.node_count(),
            self.inner.edge_count(),
            self.inner.private_count()
        )
    }
}

/// The largest public cluster of a graph.
#[pyclass(name = "PublicCluster", module = "privwalk")]
struct PyCluster {
    graph: LabeledGraph,
    view: Arc<PublicClusterView>,
}

#[pymethods]
impl PyCluster {
    #[getter]
    fn size(&self) -> usize {
        self.view.member_count()
    }

    #[getter]
    fn public_degree_sum(&self) -> u64 {
        self.view.public_degree_sum()
    }

    fn members(&self) -> Vec<NodeId> {
        self.view.members().collect()
    }

    fn is_member(&self, v: NodeId) -> bool {
        (v as usize) < self.view.node_count() && self.view.is_member(v)
    }

    fn public_degree(&self, v: NodeId) -> PyResult<u32> {
        if !self.is_member(v) {
            return Err(value_err(format!("node {v} is not in the cluster")));
        }
        Ok(self.view.public_degree(v))
    }

    /// Cluster size -> number of public clusters of that size.
    fn census(&self) -> BTreeMap<usize, usize> {
        self.view.census().clone()
    }

    /// Limits n*, ñ, d*_avg and d̃_avg the estimators converge to.
    fn convergence_values(&self) -> BTreeMap<&'static str, f64> {
        let cv = theory::convergence_values(&self.graph, &self.view);
        BTreeMap::from([
            ("n_star", cv.n_star),
            ("n_tilde", cv.n_tilde),
            ("davg_star", cv.davg_star),
            ("davg_tilde", cv.davg_tilde),
        ])
    }

    /// Expected hidden-model queries per sample for the exact and approximate methods.
    fn expected_query_ratios(&self) -> BTreeMap<&'static str, f64> {
        let q = theory::expected_query_ratios(&self.graph, &self.view);
        BTreeMap::from([("exact", q.exact), ("approx", q.approx), ("savings", q.savings)])
    }

    fn __repr__(&self) -> String {
        format!("PublicCluster(size={}, clusters={})", self.view.member_count(), self.view.cluster_count())
    }
}

/// A finished walk: sampled nodes with their degrees and public degrees.
#[pyclass(name = "Walk", module = "privwalk")]
struct PyWalk {
    record: WalkRecord,
}

#[pymethods]
impl PyWalk {
    fn __len__(&self) -> usize {
        self.record.len()
    }

    fn nodes(&self) -> Vec<NodeId> {
        self.record.nodes().collect()
    }

    fn degrees(&self) -> Vec<u32> {
        self.record.samples().iter().map(|s| s.degree).collect()
    }

    fn public_degrees(&self) -> Vec<f64> {
        self.record.samples().iter().map(|s| s.public_degree).collect()
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.record.mode().name()
    }

    /// `(raw, unique, per-sample ratio)`, or None for walks loaded from a file.
    fn queries(&self) -> Option<(u64, usize, f64)> {
        self.record.ledger().map(|l| (l.raw_queries(), l.unique_count(), l.query_ratio()))
    }

    /// All estimators; `m` defaults to ceil(0.025 r).
    #[pyo3(signature = (m = None))]
    fn estimate(&self, m: Option<usize>) -> PyResult<BTreeMap<&'static str, f64>> {
        let m = m.unwrap_or_else(|| gap_for_fraction(self.record.len(), 0.025));
        let r = estimators::estimate(&self.record, m).map_err(value_err)?;
        Ok(BTreeMap::from([
            ("m", m as f64),
            ("size_nc", r.n_nc()),
            ("size_proposed", r.n_hat()),
            ("avg_degree_smooth", r.davg_smooth()),
            ("avg_degree_proposed", r.davg_hat()),
            ("privacy_rate_size", r.p_hat_n),
            ("privacy_rate_avg_degree", r.p_hat_avg),
        ]))
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        let file = File::create(&path).map_err(|e| PyIOError::new_err(e.to_string()))?;
        self.record
            .write_dump(BufWriter::new(file), None)
            .map_err(|e| PyIOError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Walk(len={}, mode={})", self.record.len(), self.record.mode().name())
    }
}

/// Walks `length` samples on the largest public cluster of `graph`, starting
/// from `start` or, by default, the cluster member with the smallest id.
#[pyfunction]
#[pyo3(signature = (graph, length, mode = "exact_ideal", seed = 0, start = None, memoize = false))]
fn run_walk(
    py: Python<'_>,
    graph: &PyGraph,
    length: usize,
    mode: &str,
    seed: u64,
    start: Option<NodeId>,
    memoize: bool,
) -> PyResult<PyWalk> {
    let mode: PublicDegreeMode = mode.parse().map_err(value_err)?;
    let g = &graph.inner;
    let view = pw::largest_public_cluster(g).map_err(value_err)?;
    let start = start.unwrap_or_else(|| view.members().next().expect("cluster is non-empty"));
    let mut config = WalkConfig::new(length, mode, seed);
    config.memoize = memoize;
    let record = py
        .detach(|| pw::run_walk(g, &view, start, &config))
        .map_err(value_err)?;
    Ok(PyWalk { record })
}

/// Reads a sample file (3-column or walk dump).
#[pyfunction]
fn load_samples(path: PathBuf) -> PyResult<PyWalk> {
    ingest::load_sample_records(&path).map(|f| PyWalk { record: f.record }).map_err(value_err)
}

/// Rows of the theory table over a p grid, as dicts.
#[pyfunction]
fn theory_table(graph: &PyGraph, p_grid: Vec<f64>) -> PyResult<Vec<BTreeMap<&'static str, f64>>> {
    if p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(value_err("p must lie in [0, 1]"));
    }
    let moments = DegreeMoments::of(graph.inner.topology());
    Ok(theory::theory_rows(&moments, &p_grid)
        .into_iter()
        .map(|row| {
            BTreeMap::from([
                ("p", row.p),
                ("expected_n_star", row.expected.expected_n_star),
                ("alpha_p_n", row.expected.expected_n_tilde),
                ("expected_davg_star", row.expected.expected_davg_star),
                ("davg", row.davg),
                ("expected_q", row.queries.exact),
                ("expected_q_hat", row.queries.approx),
            ])
        })
        .collect())
}

#[pymodule]
fn privwalk(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyCluster>()?;
    m.add_class::<PyWalk>()?;
    m.add_function(wrap_pyfunction!(run_walk, m)?)?;
    m.add_function(wrap_pyfunction!(load_samples, m)?)?;
    m.add_function(wrap_pyfunction!(theory_table, m)?)?;
    Ok(())
}

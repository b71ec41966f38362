//! Crawler-side view of a labeled graph.
//!
//! The walker never touches a [`LabeledGraph`] directly: it queries nodes
//! through a [`Crawler`], which enforces the access model and keeps a
//! [`QueryLedger`].
//!
//! * Ideal model: a query on a public node returns each neighbor with its
//!   privacy label.
//! * Hidden model: a query returns neighbor ids only; learning a neighbor's
//!   label costs a query on that neighbor.
//!
//! Querying a private node fails with [`AccessError::PrivateNode`] and still
//! costs one query.

use std::collections::HashSet;

use thiserror::Error;

use crate::graph::{Label, LabeledGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccessModel {
    Ideal,
    Hidden,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AccessError {
    #[error("node {0} is private; its neighbors cannot be obtained")]
    PrivateNode(NodeId),
    #[error("node {id} out of range for a graph of {node_count} nodes")]
    OutOfRange { id: NodeId, node_count: usize },
}

/// Answer to a successful query on a public node.
#[derive(Debug, Clone, Copy)]
pub struct NeighborReport<'g> {
    queried: NodeId,
    model: AccessModel,
    graph: &'g LabeledGraph,
}

impl<'g> NeighborReport<'g> {
    pub fn queried_id(&self) -> NodeId {
        self.queried
    }

    pub fn model(&self) -> AccessModel {
        self.model
    }

    /// Neighbor ids, including private neighbors.
    pub fn neighbors(&self) -> &'g [NodeId] {
        self.graph.neighbors(self.queried)
    }

    pub fn degree(&self) -> u32 {
        self.neighbors().len() as u32
    }

    /// Label of the `index`-th neighbor; `None` under the hidden model.
    pub fn label_at(&self, index: usize) -> Option<Label> {
        match self.model {
            AccessModel::Ideal => Some(self.graph.label(self.neighbors()[index])),
            AccessModel::Hidden => None,
        }
    }

    /// `(neighbor id, label if disclosed)` pairs.
    pub fn entries(&self) -> impl Iterator<Item = (NodeId, Option<Label>)> + 'g {
        let graph = self.graph;
        let ideal = self.model == AccessModel::Ideal;
        self.neighbors()
            .iter()
            .map(move |&w| (w, ideal.then(|| graph.label(w))))
    }

    /// Number of public neighbors, available only under the ideal model.
    pub fn public_neighbor_count(&self) -> Option<u32> {
        match self.model {
            AccessModel::Ideal => Some(
                self.neighbors()
                    .iter()
                    .filter(|&&w| self.graph.is_public(w))
                    .count() as u32,
            ),
            AccessModel::Hidden => None,
        }
    }
}

/// Query accounting for one walk.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryLedger {
    raw_queries: u64,
    unique_queried: HashSet<NodeId>,
    per_sample: Vec<u64>,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a query on `v`; returns whether it was charged.
    fn record(&mut self, v: NodeId, memoize: bool) -> bool {
        let first = self.unique_queried.insert(v);
        if memoize && !first {
            return false;
        }
        self.raw_queries += 1;
        if let Some(current) = self.per_sample.last_mut() {
            *current += 1;
        }
        true
    }

    /// Opens the query bucket of the next sample; later queries count toward it.
    pub fn begin_sample(&mut self) {
        self.per_sample.push(0);
    }

    pub fn raw_queries(&self) -> u64 {
        self.raw_queries
    }

    pub fn unique_queried(&self) -> &HashSet<NodeId> {
        &self.unique_queried
    }

    pub fn unique_count(&self) -> usize {
        self.unique_queried.len()
    }

    /// Q(k) (exact method) or Q̂(k) (approximation), one entry per sample.
    pub fn per_sample_queries(&self) -> &[u64] {
        &self.per_sample
    }

    /// Queries per sample, Σ_k Q(k) / r.
    pub fn query_ratio(&self) -> f64 {
        if self.per_sample.is_empty() {
            return 0.0;
        }
        self.per_sample.iter().sum::<u64>() as f64 / self.per_sample.len() as f64
    }
}

/// Queries `v` under `model`, charging `ledger`.
pub fn query_node<'g>(
    g: &'g LabeledGraph,
    v: NodeId,
    model: AccessModel,
    ledger: &mut QueryLedger,
    memoize: bool,
) -> Result<NeighborReport<'g>, AccessError> {
    if v as usize >= g.node_count() {
        return Err(AccessError::OutOfRange { id: v, node_count: g.node_count() });
    }
    ledger.record(v, memoize);
    if !g.is_public(v) {
        return Err(AccessError::PrivateNode(v));
    }
    Ok(NeighborReport { queried: v, model, graph: g })
}

/// Decides whether `u` is public. Free under the ideal model (the label came
/// with the parent's report); one query on `u` under the hidden model.
pub fn is_public_via_model(
    g: &LabeledGraph,
    u: NodeId,
    model: AccessModel,
    ledger: &mut QueryLedger,
    memoize: bool,
) -> bool {
    match model {
        AccessModel::Ideal => g.is_public(u),
        AccessModel::Hidden => query_node(g, u, model, ledger, memoize).is_ok(),
    }
}

/// A graph seen through one access model, with its own ledger.
#[derive(Debug)]
pub struct Crawler<'g> {
    graph: &'g LabeledGraph,
    model: AccessModel,
    memoize: bool,
    ledger: QueryLedger,
}

impl<'g> Crawler<'g> {
    pub fn new(graph: &'g LabeledGraph, model: AccessModel, memoize: bool) -> Self {
        Crawler { graph, model, memoize, ledger: QueryLedger::new() }
    }

    pub fn model(&self) -> AccessModel {
        self.model
    }

    pub fn query(&mut self, v: NodeId) -> Result<NeighborReport<'g>, AccessError> {
        query_node(self.graph, v, self.model, &mut self.ledger, self.memoize)
    }

    pub fn is_public(&mut self, u: NodeId) -> bool {
        is_public_via_model(self.graph, u, self.model, &mut self.ledger, self.memoize)
    }

    pub fn begin_sample(&mut self) {
        self.ledger.begin_sample();
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn into_ledger(self) -> QueryLedger {
        self.ledger
    }
}

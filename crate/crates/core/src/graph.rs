//! Labeled undirected graphs and their public-cluster decomposition.
//!
//! A [`LabeledGraph`] pairs a shared, immutable [`Topology`] with one privacy
//! flag per node. Relabeling (for example a fresh Bernoulli draw per trial)
//! only allocates the label array; the adjacency is shared through an `Arc`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Dense node index, `0..node_count`.
pub type NodeId = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge list is empty")]
    EmptyEdgeList,
    #[error("node id {id} out of range for a graph of {node_count} nodes")]
    OutOfRange { id: u64, node_count: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("graph is disconnected ({components} components); restrict it to its largest connected component first")]
    Disconnected { components: usize },
    #[error("got {labels} labels for {nodes} nodes")]
    LabelCount { labels: usize, nodes: usize },
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("graph has no public nodes")]
    NoPublicNodes,
    #[error("graph has {0} nodes, more than a 32-bit node id can address")]
    TooManyNodes(usize),
}

/// Privacy label of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Public,
    Private,
}

impl Label {
    pub fn is_public(self) -> bool {
        self == Label::Public
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Public => f.write_str("public"),
            Label::Private => f.write_str("private"),
        }
    }
}

/// Where a graph's labels came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LabelOrigin {
    Bernoulli { p: f64 },
    File,
    AllPublic,
}

/// What to do with self-loops and repeated edges in an input edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgePolicy {
    /// Fail on the first self-loop or duplicate.
    Reject,
    /// Silently drop them.
    #[default]
    Drop,
}

/// Undirected simple graph in compressed sparse row form.
///
/// Neighbor lists are strictly increasing, symmetric, and free of self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Topology {
    /// Builds the topology without checking connectivity.
    pub fn from_edges(
        node_count: usize,
        edges: &[(NodeId, NodeId)],
        policy: EdgePolicy,
    ) -> Result<Self, GraphError> {
        if node_count > NodeId::MAX as usize {
            return Err(GraphError::TooManyNodes(node_count));
        }
        let mut degree = vec![0usize; node_count];
        for &(u, v) in edges {
            for w in [u, v] {
                if w as usize >= node_count {
                    return Err(GraphError::OutOfRange { id: w as u64, node_count });
                }
            }
            if u == v {
                if policy == EdgePolicy::Reject {
                    return Err(GraphError::SelfLoop(u));
                }
                continue;
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }

        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..node_count].to_vec();
        let mut targets = vec![0 as NodeId; offsets[node_count]];
        for &(u, v) in edges {
            if u == v {
                continue;
            }
            targets[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            targets[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }

        // Sort and dedup each row, compacting in place.
        let mut write = 0usize;
        let mut new_offsets = Vec::with_capacity(node_count + 1);
        new_offsets.push(0);
        for v in 0..node_count {
            let (start, end) = (offsets[v], offsets[v + 1]);
            targets[start..end].sort_unstable();
            let mut last: Option<NodeId> = None;
            for i in start..end {
                let t = targets[i];
                if last == Some(t) {
                    if policy == EdgePolicy::Reject {
                        let v = v as NodeId;
                        return Err(GraphError::DuplicateEdge(v.min(t), v.max(t)));
                    }
                    continue;
                }
                last = Some(t);
                targets[write] = t;
                write += 1;
            }
            new_offsets.push(write);
        }
        targets.truncate(write);
        targets.shrink_to_fit();
        Ok(Topology { offsets: new_offsets, targets })
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, v: NodeId) -> u32 {
        let v = v as usize;
        (self.offsets[v + 1] - self.offsets[v]) as u32
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// D, the sum of all degrees (twice the edge count).
    pub fn degree_sum(&self) -> u64 {
        self.targets.len() as u64
    }

    pub fn average_degree(&self) -> f64 {
        self.degree_sum() as f64 / self.node_count() as f64
    }

    /// Component index per node (components numbered in order of their
    /// smallest member) and the number of components.
    pub fn components(&self) -> (Vec<u32>, usize) {
        let n = self.node_count();
        let mut comp = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        let mut count = 0u32;
        for start in 0..n {
            if comp[start] != u32::MAX {
                continue;
            }
            comp[start] = count;
            queue.push_back(start as NodeId);
            while let Some(v) = queue.pop_front() {
                for &w in self.neighbors(v) {
                    if comp[w as usize] == u32::MAX {
                        comp[w as usize] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count as usize)
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.components().1 == 1
    }
}

/// Connected undirected graph with one privacy label per node.
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    topology: Arc<Topology>,
    labels: Vec<Label>,
    origin: LabelOrigin,
}

/// Builds a connected labeled graph from an edge list over ids `0..labels.len()`.
pub fn build_graph(
    edges: &[(NodeId, NodeId)],
    labels: Vec<Label>,
    policy: EdgePolicy,
) -> Result<LabeledGraph, GraphError> {
    if edges.is_empty() {
        return Err(GraphError::EmptyEdgeList);
    }
    let topology = Topology::from_edges(labels.len(), edges, policy)?;
    let origin = if labels.iter().all(|l| l.is_public()) {
        LabelOrigin::AllPublic
    } else {
        LabelOrigin::File
    };
    LabeledGraph::new(Arc::new(topology), labels, origin)
}

impl LabeledGraph {
    pub fn new(
        topology: Arc<Topology>,
        labels: Vec<Label>,
        origin: LabelOrigin,
    ) -> Result<Self, GraphError> {
        if labels.len() != topology.node_count() {
            return Err(GraphError::LabelCount {
                labels: labels.len(),
                nodes: topology.node_count(),
            });
        }
        let (_, components) = topology.components();
        if components != 1 {
            return Err(GraphError::Disconnected { components });
        }
        Ok(LabeledGraph { topology, labels, origin })
    }

    pub fn all_public(topology: Arc<Topology>) -> Result<Self, GraphError> {
        let n = topology.node_count();
        Self::new(topology, vec![Label::Public; n], LabelOrigin::AllPublic)
    }

    /// Same topology, new labels. Connectivity was already checked.
    pub fn with_labels(&self, labels: Vec<Label>, origin: LabelOrigin) -> Result<Self, GraphError> {
        if labels.len() != self.node_count() {
            return Err(GraphError::LabelCount { labels: labels.len(), nodes: self.node_count() });
        }
        Ok(LabeledGraph { topology: Arc::clone(&self.topology), labels, origin })
    }

    /// Relabels every node independently: private with probability `p`.
    pub fn assign_labels_bernoulli(&self, p: f64, rng_seed: u64) -> Result<Self, GraphError> {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let labels = bernoulli_labels(self.node_count(), p, &mut rng)?;
        self.with_labels(labels, LabelOrigin::Bernoulli { p })
    }

    pub fn topology(&self) -> &Arc<Topology> {
        &self.topology
    }

    pub fn node_count(&self) -> usize {
        self.topology.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.topology.edge_count()
    }

    pub fn degree(&self, v: NodeId) -> u32 {
        self.topology.degree(v)
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        self.topology.neighbors(v)
    }

    pub fn degree_sum(&self) -> u64 {
        self.topology.degree_sum()
    }

    pub fn average_degree(&self) -> f64 {
        self.topology.average_degree()
    }

    pub fn label(&self, v: NodeId) -> Label {
        self.labels[v as usize]
    }

    pub fn is_public(&self, v: NodeId) -> bool {
        self.labels[v as usize].is_public()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn origin(&self) -> LabelOrigin {
        self.origin
    }

    pub fn private_count(&self) -> usize {
        self.labels.iter().filter(|l| !l.is_public()).count()
    }
}

/// Draws `n` independent labels, each private with probability `p`.
pub fn bernoulli_labels<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    rng: &mut R,
) -> Result<Vec<Label>, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidProbability(p));
    }
    Ok((0..n)
        .map(|_| if rng.random_bool(p) { Label::Private } else { Label::Public })
        .collect())
}

/// The largest public-cluster C* of a labeled graph.
///
/// Public-degrees are zero for non-members. When several public-clusters
/// share the maximum size, the one containing the smallest node id wins.
#[derive(Debug, Clone)]
pub struct PublicClusterView {
    member: Vec<bool>,
    member_count: usize,
    public_degree: Vec<u32>,
    public_degree_sum: u64,
    census: BTreeMap<usize, usize>,
}

/// Finds C* and the size histogram of every public-cluster.
pub fn largest_public_cluster(g: &LabeledGraph) -> Result<PublicClusterView, GraphError> {
    let n = g.node_count();
    let mut comp = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    let mut census = BTreeMap::new();
    let mut best: Option<(u32, usize)> = None;
    let mut next = 0u32;

    for start in 0..n as NodeId {
        if !g.is_public(start) || comp[start as usize] != u32::MAX {
            continue;
        }
        let id = next;
        next += 1;
        comp[start as usize] = id;
        queue.push_back(start);
        let mut size = 0usize;
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &w in g.neighbors(v) {
                if g.is_public(w) && comp[w as usize] == u32::MAX {
                    comp[w as usize] = id;
                    queue.push_back(w);
                }
            }
        }
        *census.entry(size).or_insert(0) += 1;
        if best.is_none_or(|(_, s)| size > s) {
            best = Some((id, size));
        }
    }

    let (best_id, member_count) = best.ok_or(GraphError::NoPublicNodes)?;
    let member: Vec<bool> = comp.iter().map(|&c| c == best_id).collect();
    let mut public_degree = vec![0u32; n];
    let mut public_degree_sum = 0u64;
    for v in 0..n {
        if member[v] {
            let d = g
                .neighbors(v as NodeId)
                .iter()
                .filter(|&&w| member[w as usize])
                .count() as u32;
            public_degree[v] = d;
            public_degree_sum += d as u64;
        }
    }

    Ok(PublicClusterView { member, member_count, public_degree, public_degree_sum, census })
}

impl PublicClusterView {
    pub fn is_member(&self, v: NodeId) -> bool {
        self.member[v as usize]
    }

    /// n*.
    pub fn member_count(&self) -> usize {
        self.member_count
    }

    /// d*_v, zero outside C*.
    pub fn public_degree(&self, v: NodeId) -> u32 {
        self.public_degree[v as usize]
    }

    /// D*.
    pub fn public_degree_sum(&self) -> u64 {
        self.public_degree_sum
    }

    /// d*_avg = D*/n*.
    pub fn average_public_degree(&self) -> f64 {
        self.public_degree_sum as f64 / self.member_count as f64
    }

    /// Cluster size → number of public-clusters of that size.
    pub fn census(&self) -> &BTreeMap<usize, usize> {
        &self.census
    }

    pub fn cluster_count(&self) -> usize {
        self.census.values().sum()
    }

    /// Number of public nodes in the whole graph.
    pub fn public_node_count(&self) -> usize {
        self.census.iter().map(|(size, count)| size * count).sum()
    }

    /// Mean size of the public-clusters other than C*; zero when C* is alone.
    pub fn mean_isolated_cluster_size(&self) -> f64 {
        let others = self.cluster_count() - 1;
        if others == 0 {
            0.0
        } else {
            (self.public_node_count() - self.member_count) as f64 / others as f64
        }
    }

    pub fn members(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(v, _)| v as NodeId)
    }

    pub fn node_count(&self) -> usize {
        self.member.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> LabeledGraph {
        build_graph(&[(0, 1), (1, 2)], vec![Label::Public; 3], EdgePolicy::Reject).unwrap()
    }

    /// Paper-style ids 1..=10 shifted down by one.
    fn figure_one() -> LabeledGraph {
        let e = |a: u32, b: u32| (a - 1, b - 1);
        let edges = [
            e(4, 5), e(5, 6), e(5, 7), e(5, 9), e(8, 10),
            e(2, 4), e(1, 2), e(1, 3), e(1, 8), e(2, 6), e(2, 10), e(1, 9),
        ];
        let mut labels = vec![Label::Public; 10];
        labels[0] = Label::Private;
        labels[1] = Label::Private;
        build_graph(&edges, labels, EdgePolicy::Reject).unwrap()
    }

    #[test]
    fn path_degrees() {
        let g = path3();
        let d: Vec<u32> = (0..3).map(|v| g.degree(v)).collect();
        assert_eq!(d, vec![1, 2, 1]);
        assert_eq!(g.degree_sum(), 4);
        assert_eq!(g.origin(), LabelOrigin::AllPublic);
    }

    #[test]
    fn rejects_disconnected_and_out_of_range() {
        let err = build_graph(&[(0, 1), (2, 3)], vec![Label::Public; 4], EdgePolicy::Drop);
        assert_eq!(err.unwrap_err(), GraphError::Disconnected { components: 2 });
        let err = build_graph(&[(0, 5)], vec![Label::Public; 3], EdgePolicy::Drop);
        assert!(matches!(err.unwrap_err(), GraphError::OutOfRange { id: 5, .. }));
        let err = build_graph(&[], vec![Label::Public; 1], EdgePolicy::Drop);
        assert_eq!(err.unwrap_err(), GraphError::EmptyEdgeList);
    }

    #[test]
    fn duplicate_and_loop_policy() {
        let edges = [(0, 1), (1, 0), (1, 1), (1, 2)];
        let g = build_graph(&edges, vec![Label::Public; 3], EdgePolicy::Drop).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
        let err = build_graph(&[(0, 1), (1, 0), (1, 2)], vec![Label::Public; 3], EdgePolicy::Reject);
        assert_eq!(err.unwrap_err(), GraphError::DuplicateEdge(0, 1));
        let err = build_graph(&[(0, 1), (1, 1)], vec![Label::Public; 2], EdgePolicy::Reject);
        assert_eq!(err.unwrap_err(), GraphError::SelfLoop(1));
    }

    #[test]
    fn figure_one_cluster() {
        let g = figure_one();
        assert!(g.degree(4) >= 4);
        let view = largest_public_cluster(&g).unwrap();
        assert_eq!(view.member_count(), 5);
        let members: Vec<u32> = view.members().map(|v| v + 1).collect();
        assert_eq!(members, vec![4, 5, 6, 7, 9]);
        let dstar: Vec<u32> = [4, 5, 6, 7, 9].iter().map(|&v| view.public_degree(v - 1)).collect();
        assert_eq!(dstar, vec![1, 4, 1, 1, 1]);
        assert_eq!(view.public_degree_sum(), 8);
        let census: Vec<(usize, usize)> = view.census().iter().map(|(a, b)| (*a, *b)).collect();
        assert_eq!(census, vec![(1, 1), (2, 1), (5, 1)]);
        assert_eq!(view.public_node_count(), 8);
    }

    #[test]
    fn all_public_cluster_is_whole_graph() {
        let g = path3();
        let view = largest_public_cluster(&g).unwrap();
        assert_eq!(view.member_count(), 3);
        for v in 0..3 {
            assert_eq!(view.public_degree(v), g.degree(v));
        }
        assert_eq!(view.public_degree_sum(), g.degree_sum());
    }

    #[test]
    fn no_public_nodes() {
        let g = path3().assign_labels_bernoulli(1.0, 7).unwrap();
        assert_eq!(g.private_count(), 3);
        assert_eq!(largest_public_cluster(&g).unwrap_err(), GraphError::NoPublicNodes);
    }

    #[test]
    fn degenerate_probabilities() {
        let g = path3();
        assert_eq!(g.assign_labels_bernoulli(0.0, 1).unwrap().private_count(), 0);
        assert_eq!(g.assign_labels_bernoulli(1.0, 1).unwrap().private_count(), 3);
        assert!(g.assign_labels_bernoulli(1.5, 1).is_err());
    }

    #[test]
    fn equal_size_tie_prefers_smallest_id() {
        // 0-1 public, 2 private, 3-4 public.
        let labels = vec![Label::Public, Label::Public, Label::Private, Label::Public, Label::Public];
        let g = build_graph(&[(0, 1), (1, 2), (2, 3), (3, 4)], labels, EdgePolicy::Reject).unwrap();
        let view = largest_public_cluster(&g).unwrap();
        assert!(view.is_member(0) && view.is_member(1));
        assert!(!view.is_member(3));
        assert_eq!(view.mean_isolated_cluster_size(), 2.0);
    }
}

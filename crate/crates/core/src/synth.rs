//! Small synthetic graph families for tests and desk-scale experiments.
//! All generators return connected, all-public graphs.

use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{EdgePolicy, LabeledGraph, NodeId, Topology};

fn finish(n: usize, edges: &[(NodeId, NodeId)]) -> LabeledGraph {
    let topology = Topology::from_edges(n, edges, EdgePolicy::Drop).expect("generator ids in range");
    LabeledGraph::all_public(Arc::new(topology)).expect("generators produce connected graphs")
}

pub fn path(n: usize) -> LabeledGraph {
    assert!(n >= 2);
    let edges: Vec<_> = (1..n as NodeId).map(|i| (i - 1, i)).collect();
    finish(n, &edges)
}

/// Star with node 0 at the center.
pub fn star(leaves: usize) -> LabeledGraph {
    assert!(leaves >= 1);
    let edges: Vec<_> = (1..=leaves as NodeId).map(|i| (0, i)).collect();
    finish(leaves + 1, &edges)
}

/// Circulant graph where node i links to i±1, …, i±k/2; `k`-regular for even `k < n`.
pub fn ring_lattice(n: usize, k: usize) -> LabeledGraph {
    assert!(k >= 2 && k.is_multiple_of(2) && k < n);
    let mut edges = Vec::with_capacity(n * k / 2);
    for i in 0..n {
        for j in 1..=k / 2 {
            edges.push((i as NodeId, ((i + j) % n) as NodeId));
        }
    }
    finish(n, &edges)
}

/// Random recursive tree plus `extra_edges` uniformly random chords.
pub fn random_connected(n: usize, extra_edges: usize, seed: u64) -> LabeledGraph {
    assert!(n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(NodeId, NodeId)> = (1..n)
        .map(|i| (rng.random_range(0..i) as NodeId, i as NodeId))
        .collect();
    let max_edges = n * (n - 1) / 2;
    let mut seen: HashSet<(NodeId, NodeId)> = edges.iter().copied().collect();
    let target = (edges.len() + extra_edges).min(max_edges);
    while edges.len() < target {
        let a = rng.random_range(0..n) as NodeId;
        let b = rng.random_range(0..n) as NodeId;
        if a == b {
            continue;
        }
        let e = (a.min(b), a.max(b));
        if seen.insert(e) {
            edges.push(e);
        }
    }
    finish(n, &edges)
}

/// Barabási–Albert preferential attachment: a clique on `m + 1` nodes, then
/// each new node links to `m` distinct existing nodes chosen with probability
/// proportional to degree. Minimum degree is `m`.
pub fn preferential_attachment(n: usize, m: usize, seed: u64) -> LabeledGraph {
    assert!(m >= 1 && n > m + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n * m);
    // Every edge endpoint, so a uniform pick is degree-proportional.
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(2 * n * m);
    for i in 0..=m as NodeId {
        for j in 0..i {
            edges.push((j, i));
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    let mut chosen: Vec<NodeId> = Vec::with_capacity(m);
    for v in (m + 1) as NodeId..n as NodeId {
        chosen.clear();
        while chosen.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    finish(n, &edges)
}

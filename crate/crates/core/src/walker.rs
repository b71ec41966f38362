//! Random walk restricted to public nodes.
//!
//! From the current sample the walk draws a neighbor uniformly at random
//! (with replacement); a private draw is discarded and redrawn, so the walk
//! only ever visits nodes of the largest public-cluster C*. Its stationary
//! distribution is `d*_v / D*`.
//!
//! Each sample is stored with its degree and a public-degree value whose
//! meaning depends on [`PublicDegreeMode`]:
//!
//! * `ExactIdeal`: counted from the labels that come with the report (no extra queries);
//! * `ExactHidden`: every neighbor is queried (`d_v` extra queries per sample);
//! * `ApproxHidden`: `d_v · a_v / b_v`, where `a_v` counts successful public
//!   draws and `b_v` all draws made from `v` over the whole walk. Only the
//!   drawn neighbor is queried.
//!
//! All three modes consume the random stream identically, so for a fixed
//! seed they produce the same node sequence and differ only in public-degree
//! values and query cost.

use std::collections::HashMap;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::access::{AccessModel, Crawler, NeighborReport, QueryLedger};
use crate::graph::{Label, LabeledGraph, NodeId, PublicClusterView};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PublicDegreeMode {
    ExactIdeal,
    ExactHidden,
    ApproxHidden,
}

impl PublicDegreeMode {
    pub fn access_model(self) -> AccessModel {
        match self {
            PublicDegreeMode::ExactIdeal => AccessModel::Ideal,
            PublicDegreeMode::ExactHidden | PublicDegreeMode::ApproxHidden => AccessModel::Hidden,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PublicDegreeMode::ExactIdeal => "exact_ideal",
            PublicDegreeMode::ExactHidden => "exact_hidden",
            PublicDegreeMode::ApproxHidden => "approx_hidden",
        }
    }
}

impl std::str::FromStr for PublicDegreeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact_ideal" | "ideal" => Ok(PublicDegreeMode::ExactIdeal),
            "exact_hidden" | "exact" => Ok(PublicDegreeMode::ExactHidden),
            "approx_hidden" | "approx" | "hidden" => Ok(PublicDegreeMode::ApproxHidden),
            other => Err(format!(
                "unknown public-degree mode `{other}` (expected exact_ideal, exact_hidden or approx_hidden)"
            )),
        }
    }
}

/// How a hidden-model sample's own neighbor list is paid for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProbeAccounting {
    /// The label probe that selected the sample already returned its
    /// neighbor list; only the seed needs its own query.
    #[default]
    ReuseProbe,
    /// Every sample is queried again on arrival.
    SeparateVisit,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WalkError {
    #[error("walk length must be at least 1")]
    EmptyWalk,
    #[error("seed {seed} out of range for a graph of {node_count} nodes")]
    SeedOutOfRange { seed: NodeId, node_count: usize },
    #[error("seed {0} is private")]
    SeedPrivate(NodeId),
    #[error("seed {0} is public but not on the largest public-cluster")]
    SeedOffCluster(NodeId),
    #[error("seed {0} has no public neighbor, the walk cannot move")]
    Stuck(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub node: NodeId,
    pub degree: u32,
    pub public_degree: f64,
}

/// Per-node neighbor-selection counters `(a, b)`: successful public draws
/// and total draws, accumulated over every visit.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SelectionCounters {
    counts: HashMap<NodeId, (u64, u64)>,
}

impl SelectionCounters {
    fn record(&mut self, v: NodeId, success: bool) {
        let entry = self.counts.entry(v).or_insert((0, 0));
        entry.1 += 1;
        if success {
            entry.0 += 1;
        }
    }

    pub fn get(&self, v: NodeId) -> Option<(u64, u64)> {
        self.counts.get(&v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, u64, u64)> + '_ {
        self.counts.iter().map(|(&v, &(a, b))| (v, a, b))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// An ordered sample sequence with per-sample degree and public-degree.
#[derive(Debug, Clone)]
pub struct WalkRecord {
    samples: Vec<Sample>,
    mode: PublicDegreeMode,
    ledger: Option<QueryLedger>,
    counters: Option<SelectionCounters>,
}

impl WalkRecord {
    /// A record assembled from already-known samples (e.g. a sample file).
    pub fn from_samples(samples: Vec<Sample>, mode: PublicDegreeMode) -> Self {
        WalkRecord { samples, mode, ledger: None, counters: None }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mode(&self) -> PublicDegreeMode {
        self.mode
    }

    pub fn ledger(&self) -> Option<&QueryLedger> {
        self.ledger.as_ref()
    }

    pub fn counters(&self) -> Option<&SelectionCounters> {
        self.counters.as_ref()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.samples.iter().map(|s| s.node)
    }

    /// Writes one `index node degree public_degree` line per sample (index
    /// starts at 1). `original_ids` maps dense ids back to input ids.
    pub fn write_dump<W: Write>(&self, mut w: W, original_ids: Option<&[u64]>) -> io::Result<()> {
        writeln!(w, "# index node degree public_degree")?;
        for (k, s) in self.samples.iter().enumerate() {
            let id = match original_ids {
                Some(map) => map[s.node as usize],
                None => s.node as u64,
            };
            writeln!(w, "{} {} {} {}", k + 1, id, s.degree, s.public_degree)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    /// r, the number of samples.
    pub length: usize,
    pub mode: PublicDegreeMode,
    pub memoize: bool,
    pub accounting: ProbeAccounting,
    pub rng_seed: u64,
}

impl WalkConfig {
    pub fn new(length: usize, mode: PublicDegreeMode, rng_seed: u64) -> Self {
        WalkConfig {
            length,
            mode,
            memoize: false,
            accounting: ProbeAccounting::default(),
            rng_seed,
        }
    }
}

/// Runs a walk of `config.length` samples from `seed`, seeding a ChaCha8
/// generator from `config.rng_seed`.
pub fn run_walk(
    g: &LabeledGraph,
    view: &PublicClusterView,
    seed: NodeId,
    config: &WalkConfig,
) -> Result<WalkRecord, WalkError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    run_walk_with_rng(g, view, seed, config, &mut rng)
}

/// Same as [`run_walk`], drawing from a caller-supplied generator
/// (`config.rng_seed` is ignored).
pub fn run_walk_with_rng<R: Rng + ?Sized>(
    g: &LabeledGraph,
    view: &PublicClusterView,
    seed: NodeId,
    config: &WalkConfig,
    rng: &mut R,
) -> Result<WalkRecord, WalkError> {
    let r = config.length;
    if r == 0 {
        return Err(WalkError::EmptyWalk);
    }
    if seed as usize >= g.node_count() {
        return Err(WalkError::SeedOutOfRange { seed, node_count: g.node_count() });
    }
    if !g.is_public(seed) {
        return Err(WalkError::SeedPrivate(seed));
    }
    if !view.is_member(seed) {
        return Err(WalkError::SeedOffCluster(seed));
    }
    let isolated = view.member_count() == 1;
    if isolated && (r > 1 || config.mode == PublicDegreeMode::ApproxHidden) {
        return Err(WalkError::Stuck(seed));
    }

    let mode = config.mode;
    let mut crawler = Crawler::new(g, mode.access_model(), config.memoize);
    let mut counters = SelectionCounters::default();
    let mut samples = Vec::with_capacity(r);
    let mut current = seed;
    let mut arrived_with: Option<NeighborReport<'_>> = None;
    let mut probes: Vec<Option<NeighborReport<'_>>> = Vec::new();

    for _ in 0..r {
        crawler.begin_sample();
        let report = match (arrived_with.take(), config.accounting) {
            (Some(report), ProbeAccounting::ReuseProbe) => report,
            _ => crawler
                .query(current)
                .expect("walk only moves to public nodes"),
        };
        let neighbors = report.neighbors();

        let public_degree = match mode {
            PublicDegreeMode::ExactIdeal => report
                .public_neighbor_count()
                .expect("ideal reports carry labels") as f64,
            PublicDegreeMode::ExactHidden => {
                probes.clear();
                probes.extend(neighbors.iter().map(|&w| crawler.query(w).ok()));
                probes.iter().filter(|p| p.is_some()).count() as f64
            }
            // Filled in from the counters once the walk is over.
            PublicDegreeMode::ApproxHidden => f64::NAN,
        };
        samples.push(Sample { node: current, degree: report.degree(), public_degree });

        if isolated {
            break;
        }

        // Neighbor selection; also runs after the last sample so that its
        // counters and query cost are complete.
        loop {
            let idx = rng.random_range(0..neighbors.len());
            let u = neighbors[idx];
            let next = match mode {
                PublicDegreeMode::ExactIdeal => {
                    (report.label_at(idx) == Some(Label::Public)).then_some(None)
                }
                PublicDegreeMode::ExactHidden => probes[idx].map(Some),
                PublicDegreeMode::ApproxHidden => crawler.query(u).ok().map(Some),
            };
            counters.record(current, next.is_some());
            if let Some(report) = next {
                arrived_with = report;
                current = u;
                break;
            }
        }
    }

    if mode == PublicDegreeMode::ApproxHidden {
        for s in &mut samples {
            let (a, b) = counters.get(s.node).expect("every sample draws at least once");
            s.public_degree = s.degree as f64 * a as f64 / b as f64;
        }
    }

    Ok(WalkRecord {
        samples,
        mode,
        ledger: Some(crawler.into_ledger()),
        counters: Some(counters),
    })
}

/// π_v = d*_v / D* on C*, zero elsewhere.
pub fn stationary_distribution(view: &PublicClusterView) -> Vec<f64> {
    let total = view.public_degree_sum() as f64;
    (0..view.node_count() as NodeId)
        .map(|v| {
            if view.is_member(v) {
                view.public_degree(v) as f64 / total
            } else {
                0.0
            }
        })
        .collect()
}

/// Fraction of samples on each node, indexed by node id.
pub fn visit_frequencies(record: &WalkRecord, node_count: usize) -> Vec<f64> {
    let mut counts = vec![0u64; node_count];
    for v in record.nodes() {
        counts[v as usize] += 1;
    }
    let r = record.len() as f64;
    counts.into_iter().map(|c| c as f64 / r).collect()
}

/// Total-variation distance between two distributions on the same support.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, largest_public_cluster, EdgePolicy};

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

    fn path3() -> LabeledGraph {
        build_graph(&[(0, 1), (1, 2)], vec![Label::Public; 3], EdgePolicy::Reject).unwrap()
    }

    #[test]
    fn single_sample_walk() {
        let g = figure_one();
        let view = largest_public_cluster(&g).unwrap();
        for mode in [PublicDegreeMode::ExactIdeal, PublicDegreeMode::ExactHidden] {
            let rec = run_walk(&g, &view, 4, &WalkConfig::new(1, mode, 3)).unwrap();
            assert_eq!(rec.len(), 1);
            assert_eq!(rec.samples()[0].node, 4);
            assert_eq!(rec.samples()[0].public_degree, 4.0);
        }
        let rec = run_walk(&g, &view, 4, &WalkConfig::new(1, PublicDegreeMode::ApproxHidden, 3))
            .unwrap();
        // Node 5 has only public neighbors, so the first draw succeeds.
        assert_eq!(rec.samples()[0].public_degree, 4.0);
        assert_eq!(rec.counters().unwrap().get(4), Some((1, 1)));
    }

    #[test]
    fn seed_validation() {
        let g = figure_one();
        let view = largest_public_cluster(&g).unwrap();
        let cfg = WalkConfig::new(10, PublicDegreeMode::ExactIdeal, 0);
        assert_eq!(run_walk(&g, &view, 0, &cfg).unwrap_err(), WalkError::SeedPrivate(0));
        assert_eq!(run_walk(&g, &view, 7, &cfg).unwrap_err(), WalkError::SeedOffCluster(7));
        assert!(matches!(run_walk(&g, &view, 70, &cfg), Err(WalkError::SeedOutOfRange { .. })));
        let cfg0 = WalkConfig::new(0, PublicDegreeMode::ExactIdeal, 0);
        assert_eq!(run_walk(&g, &view, 4, &cfg0).unwrap_err(), WalkError::EmptyWalk);
    }

    #[test]
    fn stuck_on_single_node_cluster() {
        // 0 public, 1 private, 2 public: two singleton clusters, C* = {0}.
        let labels = vec![Label::Public, Label::Private, Label::Public];
        let g = build_graph(&[(0, 1), (1, 2)], labels, EdgePolicy::Reject).unwrap();
        let view = largest_public_cluster(&g).unwrap();
        let cfg = WalkConfig::new(5, PublicDegreeMode::ExactIdeal, 0);
        assert_eq!(run_walk(&g, &view, 0, &cfg).unwrap_err(), WalkError::Stuck(0));
        let one = WalkConfig::new(1, PublicDegreeMode::ExactHidden, 0);
        let rec = run_walk(&g, &view, 0, &one).unwrap();
        assert_eq!(rec.samples()[0].public_degree, 0.0);
        let approx = WalkConfig::new(1, PublicDegreeMode::ApproxHidden, 0);
        assert_eq!(run_walk(&g, &view, 0, &approx).unwrap_err(), WalkError::Stuck(0));
    }

    #[test]
    fn star_cluster_alternates_through_center() {
        let g = figure_one();
        let view = largest_public_cluster(&g).unwrap();
        let rec = run_walk(&g, &view, 4, &WalkConfig::new(2000, PublicDegreeMode::ApproxHidden, 11))
            .unwrap();
        let nodes: Vec<u32> = rec.nodes().map(|v| v + 1).collect();
        assert!(nodes.iter().all(|v| [4, 5, 6, 7, 9].contains(v)));
        for pair in nodes.windows(2) {
            assert!(pair[0] == 5 || pair[1] == 5, "leaves must be separated by node 5");
            assert!(g.neighbors(pair[0] - 1).contains(&(pair[1] - 1)));
        }
    }

    #[test]
    fn modes_share_the_node_sequence() {
        let g = figure_one();
        let view = largest_public_cluster(&g).unwrap();
        let run = |mode| run_walk(&g, &view, 4, &WalkConfig::new(500, mode, 99)).unwrap();
        let ideal = run(PublicDegreeMode::ExactIdeal);
        let exact = run(PublicDegreeMode::ExactHidden);
        let approx = run(PublicDegreeMode::ApproxHidden);
        assert_eq!(ideal.samples(), exact.samples());
        assert!(ideal.nodes().eq(approx.nodes()));
        for s in exact.samples() {
            assert_eq!(s.public_degree, view.public_degree(s.node) as f64);
        }
    }

    #[test]
    fn ideal_ledger_counts_one_query_per_sample() {
        let g = figure_one();
        let view = largest_public_cluster(&g).unwrap();
        let rec = run_walk(&g, &view, 4, &WalkConfig::new(300, PublicDegreeMode::ExactIdeal, 5))
            .unwrap();
        let ledger = rec.ledger().unwrap();
        assert_eq!(ledger.raw_queries(), 300);
        assert!(ledger.per_sample_queries().iter().all(|&q| q == 1));
    }

    #[test]
    fn approx_counters_and_ledger_agree() {
        let g = figure_one();
        let view = largest_public_cluster(&g).unwrap();
        let rec = run_walk(&g, &view, 4, &WalkConfig::new(400, PublicDegreeMode::ApproxHidden, 8))
            .unwrap();
        let ledger = rec.ledger().unwrap();
        let draws: u64 = rec.counters().unwrap().iter().map(|(_, _, b)| b).sum();
        // One query per draw plus the seed's own query.
        assert_eq!(ledger.raw_queries(), draws + 1);
        assert_eq!(ledger.per_sample_queries().iter().sum::<u64>(), ledger.raw_queries());
        for (_, a, b) in rec.counters().unwrap().iter() {
            assert!(a >= 1 && a <= b);
        }
        for s in rec.samples() {
            assert!(s.public_degree > 0.0 && s.public_degree <= s.degree as f64);
        }
    }

    #[test]
    fn separate_visit_accounting_adds_one_per_sample() {
        let g = figure_one();
        let view = largest_public_cluster(&g).unwrap();
        let mut cfg = WalkConfig::new(200, PublicDegreeMode::ApproxHidden, 21);
        let reuse = run_walk(&g, &view, 4, &cfg).unwrap();
        cfg.accounting = ProbeAccounting::SeparateVisit;
        let separate = run_walk(&g, &view, 4, &cfg).unwrap();
        assert_eq!(
            separate.ledger().unwrap().raw_queries(),
            reuse.ledger().unwrap().raw_queries() + 199
        );
    }

    #[test]
    fn path_stationary_vector() {
        let g = path3();
        let view = largest_public_cluster(&g).unwrap();
        assert_eq!(stationary_distribution(&view), vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn figure_one_stationary_vector() {
        let g = figure_one();
        let view = largest_public_cluster(&g).unwrap();
        let pi = stationary_distribution(&view);
        assert_eq!(pi[4], 0.5);
        for v in [4, 6, 7, 9] {
            assert_eq!(pi[v - 1], 0.125);
        }
        assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dump_format() {
        let rec = WalkRecord::from_samples(
            vec![
                Sample { node: 2, degree: 3, public_degree: 1.5 },
                Sample { node: 0, degree: 1, public_degree: 1.0 },
            ],
            PublicDegreeMode::ApproxHidden,
        );
        let mut out = Vec::new();
        rec.write_dump(&mut out, Some(&[10, 11, 12])).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "# index node degree public_degree\n1 12 3 1.5\n2 10 1 1\n"
        );
    }
}

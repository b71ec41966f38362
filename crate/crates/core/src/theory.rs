//! Closed-form targets: the limits the estimators converge to on a fixed
//! labeled graph, their expectations over Bernoulli label draws, and the
//! expected query cost of the two public-degree methods.
//!
//! Expectations over labels assume every public node belongs to the largest
//! public-cluster, so they depend only on the degree sequence.

use std::io::{self, Write};

use crate::graph::{LabeledGraph, NodeId, PublicClusterView, Topology};
use crate::numeric::CompensatedSum;

/// The almost-sure limits of the four estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceValues {
    /// Limit of the node-collision estimator, n*.
    pub n_star: f64,
    /// Limit of the proposed size estimator, ñ = n* Σ d*d / Σ (d*)².
    pub n_tilde: f64,
    /// Limit of the smooth estimator, d*_avg = D*/n*.
    pub davg_star: f64,
    /// Limit of the proposed average-degree estimator, d̃_avg = D* / Σ d*/d.
    pub davg_tilde: f64,
}

/// Sums over C* that the convergence values and their expectations are built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterSums {
    /// n*
    pub member_count: u64,
    /// D* = Σ d*
    pub public_degree_sum: u64,
    /// Σ (d*)²
    pub public_degree_sq_sum: u64,
    /// Σ d* d
    pub cross_sum: u64,
    /// Σ d*/d
    pub ratio_sum: f64,
    /// Σ d over members
    pub member_degree_sum: u64,
}

pub fn cluster_sums(g: &LabeledGraph, view: &PublicClusterView) -> ClusterSums {
    let mut sums = ClusterSums {
        member_count: 0,
        public_degree_sum: 0,
        public_degree_sq_sum: 0,
        cross_sum: 0,
        ratio_sum: 0.0,
        member_degree_sum: 0,
    };
    let mut ratio = CompensatedSum::new();
    for v in view.members() {
        let ds = view.public_degree(v) as u64;
        let d = g.degree(v) as u64;
        sums.member_count += 1;
        sums.public_degree_sum += ds;
        sums.public_degree_sq_sum += ds * ds;
        sums.cross_sum += ds * d;
        sums.member_degree_sum += d;
        ratio.add(ds as f64 / d as f64);
    }
    sums.ratio_sum = ratio.value();
    sums
}

pub fn convergence_values(g: &LabeledGraph, view: &PublicClusterView) -> ConvergenceValues {
    let s = cluster_sums(g, view);
    let n_star = s.member_count as f64;
    ConvergenceValues {
        n_star,
        n_tilde: n_star * s.cross_sum as f64 / s.public_degree_sq_sum as f64,
        davg_star: s.public_degree_sum as f64 / n_star,
        davg_tilde: s.public_degree_sum as f64 / s.ratio_sum,
    }
}

/// Degree moments of the whole graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeMoments {
    pub n: u64,
    /// D = Σ d
    pub sum: u64,
    /// Σ d²
    pub sq_sum: u64,
}

impl DegreeMoments {
    pub fn of(topology: &Topology) -> Self {
        let mut m = DegreeMoments { n: topology.node_count() as u64, sum: 0, sq_sum: 0 };
        for v in 0..topology.node_count() as NodeId {
            let d = topology.degree(v) as u64;
            m.sum += d;
            m.sq_sum += d * d;
        }
        m
    }

    pub fn average_degree(&self) -> f64 {
        self.sum as f64 / self.n as f64
    }

    /// α_p = (1−p) Σd² / Σ d[(1−p)d + p].
    pub fn alpha(&self, p: f64) -> f64 {
        let q = 1.0 - p;
        let sq = self.sq_sum as f64;
        q * sq / (q * sq + p * self.sum as f64)
    }
}

/// Expected convergence values over Bernoulli(p) labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedErrors {
    /// E[n*] = (1−p) n
    pub expected_n_star: f64,
    pub alpha_p: f64,
    /// E[ñ] ≈ α_p n
    pub expected_n_tilde: f64,
    /// E[d*_avg] ≈ (1−p) d_avg
    pub expected_davg_star: f64,
    /// E[d̃_avg] ≈ d_avg
    pub expected_davg_tilde: f64,
}

pub fn expected_errors(topology: &Topology, p: f64) -> ExpectedErrors {
    expected_errors_from(&DegreeMoments::of(topology), p)
}

pub fn expected_errors_from(m: &DegreeMoments, p: f64) -> ExpectedErrors {
    let n = m.n as f64;
    let alpha_p = m.alpha(p);
    ExpectedErrors {
        expected_n_star: (1.0 - p) * n,
        alpha_p,
        expected_n_tilde: alpha_p * n,
        expected_davg_star: (1.0 - p) * m.average_degree(),
        expected_davg_tilde: m.average_degree(),
    }
}

/// Expected queries per sample of the exact method (`exact`), of the
/// counter-based approximation (`approx`), and their quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryRatios {
    /// E[Q] = Σ_{C*} d* d / D*
    pub exact: f64,
    /// E[Q̂] = Σ_{C*} d / D*
    pub approx: f64,
    pub savings: f64,
}

pub fn expected_query_ratios(g: &LabeledGraph, view: &PublicClusterView) -> QueryRatios {
    let s = cluster_sums(g, view);
    let total = s.public_degree_sum as f64;
    let exact = s.cross_sum as f64 / total;
    let approx = s.member_degree_sum as f64 / total;
    QueryRatios { exact, approx, savings: exact / approx }
}

/// Query ratios with every cluster sum replaced by its expectation over
/// Bernoulli(p) labels: `Σd² / D` and `1 / (1−p)`.
pub fn expected_query_ratios_bernoulli(m: &DegreeMoments, p: f64) -> QueryRatios {
    let exact = m.sq_sum as f64 / m.sum as f64;
    let approx = 1.0 / (1.0 - p);
    QueryRatios { exact, approx, savings: exact / approx }
}

/// `(E[d*], E[(d*)²])` for a node of degree `d` whose neighbors are each
/// public with probability `1 − p`.
pub fn expectation_lemma_moments(d: u32, p: f64) -> (f64, f64) {
    let q = 1.0 - p;
    let d = d as f64;
    (q * d, q * d * (q * d + p))
}

/// Expected values of the C* sums over Bernoulli(p) labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedClusterSums {
    /// (1−p) n
    pub member_count: f64,
    /// (1−p)² D
    pub public_degree_sum: f64,
    /// (1−p)² Σ d[(1−p)d + p]
    pub public_degree_sq_sum: f64,
    /// (1−p)² Σ d²
    pub cross_sum: f64,
    /// (1−p)² n
    pub ratio_sum: f64,
}

pub fn expected_cluster_sums(m: &DegreeMoments, p: f64) -> ExpectedClusterSums {
    let q = 1.0 - p;
    let sq = m.sq_sum as f64;
    let sum = m.sum as f64;
    ExpectedClusterSums {
        member_count: q * m.n as f64,
        public_degree_sum: q * q * sum,
        public_degree_sq_sum: q * q * (q * sq + p * sum),
        cross_sum: q * q * sq,
        ratio_sum: q * q * m.n as f64,
    }
}

/// Both sides of an expected-error comparison: `proposed` should not exceed `prior`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorComparison {
    pub proposed: f64,
    pub prior: f64,
}

impl ErrorComparison {
    pub fn holds(&self) -> bool {
        self.proposed <= self.prior + 1e-12 * self.prior.abs().max(1.0)
    }
}

/// Expected absolute errors of the size and average-degree convergence
/// values, proposed vs prior weighting, from the closed forms.
pub fn corollary_comparisons(m: &DegreeMoments, p: f64) -> (ErrorComparison, ErrorComparison) {
    let n = m.n as f64;
    let davg = m.average_degree();
    let e = expected_cluster_sums(m, p);

    // At p = 1 every expectation vanishes; fall back to the limits of the ratios.
    let size_target = if e.public_degree_sq_sum > 0.0 {
        e.member_count * e.cross_sum / e.public_degree_sq_sum
    } else {
        0.0
    };
    let size = ErrorComparison {
        proposed: (n - size_target).abs(),
        prior: (n - e.member_count).abs(),
    };
    let (tilde, star) = if e.ratio_sum > 0.0 {
        (e.public_degree_sum / e.ratio_sum, e.public_degree_sum / e.member_count)
    } else {
        (davg, 0.0)
    };
    let degree = ErrorComparison { proposed: (davg - tilde).abs(), prior: (davg - star).abs() };
    (size, degree)
}

/// Whether the size and average-degree inequalities hold at `p`.
pub fn corollary_inequalities(topology: &Topology, p: f64) -> (bool, bool) {
    let (size, degree) = corollary_comparisons(&DegreeMoments::of(topology), p);
    (size.holds(), degree.holds())
}

/// One row of the theory report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryRow {
    pub p: f64,
    pub expected: ExpectedErrors,
    pub davg: f64,
    pub queries: QueryRatios,
}

pub fn theory_rows(m: &DegreeMoments, p_grid: &[f64]) -> Vec<TheoryRow> {
    p_grid
        .iter()
        .map(|&p| TheoryRow {
            p,
            expected: expected_errors_from(m, p),
            davg: m.average_degree(),
            queries: expected_query_ratios_bernoulli(m, p),
        })
        .collect()
}

pub const THEORY_HEADER: &str = "p,expected_n_star,alpha_p_n,expected_davg_star,davg,expected_q,expected_q_hat";

pub fn write_theory_csv<W: Write>(mut w: W, rows: &[TheoryRow]) -> io::Result<()> {
    writeln!(w, "{THEORY_HEADER}")?;
    for row in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            row.p,
            row.expected.expected_n_star,
            row.expected.expected_n_tilde,
            row.expected.expected_davg_star,
            row.davg,
            row.queries.exact,
            row.queries.approx
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, largest_public_cluster, EdgePolicy, Label};

    fn star(leaves: u32) -> LabeledGraph {
        let edges: Vec<(u32, u32)> = (1..=leaves).map(|i| (0, i)).collect();
        build_graph(&edges, vec![Label::Public; leaves as usize + 1], EdgePolicy::Reject).unwrap()
    }

    fn cycle(n: u32) -> LabeledGraph {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        build_graph(&edges, vec![Label::Public; n as usize], EdgePolicy::Reject).unwrap()
    }

    #[test]
    fn all_public_convergence_is_truth() {
        let g = star(6);
        let view = largest_public_cluster(&g).unwrap();
        let cv = convergence_values(&g, &view);
        assert_eq!(cv.n_star, 7.0);
        assert_eq!(cv.n_tilde, 7.0);
        assert_eq!(cv.davg_star, g.average_degree());
        assert!((cv.davg_tilde - g.average_degree()).abs() < 1e-12);
    }

    #[test]
    fn regular_query_ratios() {
        let g = cycle(8);
        let view = largest_public_cluster(&g).unwrap();
        let q = expected_query_ratios(&g, &view);
        assert_eq!((q.exact, q.approx, q.savings), (2.0, 1.0, 2.0));
    }

    #[test]
    fn moments_edge_cases() {
        assert_eq!(expectation_lemma_moments(7, 0.0), (7.0, 49.0));
        let (a, b) = expectation_lemma_moments(1, 0.3);
        assert!((a - 0.7).abs() < 1e-15 && (b - 0.7).abs() < 1e-15);
        let (a, b) = expectation_lemma_moments(5, 0.3);
        assert!((a - 3.5).abs() < 1e-12 && (b - 13.3).abs() < 1e-12);
    }

    #[test]
    fn expected_errors_endpoints() {
        let g = star(9);
        let e0 = expected_errors(g.topology(), 0.0);
        assert_eq!(e0.alpha_p, 1.0);
        assert_eq!(e0.expected_n_star, 10.0);
        assert_eq!(e0.expected_n_tilde, 10.0);
        assert_eq!(e0.expected_davg_star, g.average_degree());
        let e1 = expected_errors(g.topology(), 1.0);
        assert_eq!(e1.expected_n_star, 0.0);
        assert_eq!(e1.expected_davg_star, 0.0);
    }

    #[test]
    fn star_inequalities() {
        let g = star(9);
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            assert_eq!(corollary_inequalities(g.topology(), p), (true, true), "p = {p}");
        }
    }

    #[test]
    fn theory_csv_header() {
        let g = cycle(4);
        let rows = theory_rows(&DegreeMoments::of(g.topology()), &[0.0, 0.5]);
        let mut out = Vec::new();
        write_theory_csv(&mut out, &rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(THEORY_HEADER));
        assert_eq!(lines.next(), Some("0,4,4,2,2,2,1"));
        assert_eq!(lines.next(), Some("0.5,2,2.6666666666666665,1,2,2,2"));
    }
}

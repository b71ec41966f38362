use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use privwalk::graph::bernoulli_labels;
use privwalk::walker::{run_walk, ProbeAccounting, PublicDegreeMode, WalkConfig, WalkError};
use privwalk::{largest_public_cluster, synth};

#[test]
fn exact_hidden_on_regular_graph_probes_every_neighbor() {
    // 6-regular, all public: each sample probes 6 neighbor labels; the seed's
    // own visit query adds one more.
    let g = synth::ring_lattice(30, 6);
    let view = largest_public_cluster(&g).unwrap();
    let r = 500;
    let rec = run_walk(&g, &view, 0, &WalkConfig::new(r, PublicDegreeMode::ExactHidden, 1)).unwrap();
    let ledger = rec.ledger().unwrap();
    assert_eq!(ledger.raw_queries(), (r * 6 + 1) as u64);

    let mut separate = WalkConfig::new(r, PublicDegreeMode::ExactHidden, 1);
    separate.accounting = ProbeAccounting::SeparateVisit;
    let rec = run_walk(&g, &view, 0, &separate).unwrap();
    assert_eq!(rec.ledger().unwrap().raw_queries(), (r * 7) as u64);
}

#[test]
fn memoized_queries_never_exceed_node_count() {
    let g = synth::ring_lattice(30, 6);
    let view = largest_public_cluster(&g).unwrap();
    let mut config = WalkConfig::new(1000, PublicDegreeMode::ExactHidden, 2);
    config.memoize = true;
    let rec = run_walk(&g, &view, 0, &config).unwrap();
    assert_eq!(rec.ledger().unwrap().raw_queries(), 30);
}

#[test]
fn approx_hidden_on_all_public_graph_is_one_query_per_step() {
    let g = synth::random_connected(40, 60, 3);
    let view = largest_public_cluster(&g).unwrap();
    let r = 400;
    let rec = run_walk(&g, &view, 0, &WalkConfig::new(r, PublicDegreeMode::ApproxHidden, 3)).unwrap();
    // Every selection succeeds, so the only queries are the seed visit plus
    // one label probe per selection (r − 1 moves and the trailing one).
    assert_eq!(rec.ledger().unwrap().raw_queries(), r as u64 + 1);
    for s in rec.samples() {
        assert_eq!(s.public_degree, s.degree as f64);
    }
}

#[test]
fn binomial_private_count_concentrates() {
    let n = 100_000;
    for (i, p) in [0.05, 0.3, 0.5, 0.9].into_iter().enumerate() {
        let labels = bernoulli_labels(n, p, &mut ChaCha8Rng::seed_from_u64(i as u64)).unwrap();
        let private = labels.iter().filter(|l| !l.is_public()).count() as f64;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((private - n as f64 * p).abs() < 4.0 * sd, "p = {p}: {private}");
    }
}

#[test]
fn isolated_public_seed_is_stuck() {
    let g = synth::star(3);
    let mut labels = vec![privwalk::Label::Public; 4];
    labels[0] = privwalk::Label::Private;
    let g = g.with_labels(labels, privwalk::graph::LabelOrigin::File).unwrap();
    let view = largest_public_cluster(&g).unwrap();
    assert_eq!(view.member_count(), 1);
    let seed = view.members().next().unwrap();
    let err = run_walk(&g, &view, seed, &WalkConfig::new(5, PublicDegreeMode::ExactIdeal, 0)).unwrap_err();
    assert!(matches!(err, WalkError::Stuck(_)));
    let one = run_walk(&g, &view, seed, &WalkConfig::new(1, PublicDegreeMode::ExactIdeal, 0)).unwrap();
    assert_eq!(one.len(), 1);
}

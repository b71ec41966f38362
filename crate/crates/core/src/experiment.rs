//! Repeated-trial experiments and NRMSE aggregation.
//!
//! A configuration names a dataset, a label source, a public-degree mode and
//! one or more sample sizes. Every (label setting, sample size) pair is a
//! cell; each cell runs `trials` independent trials. A trial draws fresh
//! Bernoulli labels (when the label source is a p-grid), picks a seed node
//! uniformly from the largest public-cluster, walks, and evaluates every
//! estimator.
//!
//! Randomness: trial `i` of every cell uses base seed `seed + i`; the labels,
//! the seed node and the walk each read their own ChaCha8 stream (1, 2 and 3)
//! of that seed. Trials run in parallel and are reduced in index order, so
//! results do not depend on the thread count.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimators::{self, gap_for_fraction, EstimateError};
use crate::graph::{bernoulli_labels, largest_public_cluster, GraphError, LabelOrigin, LabeledGraph, NodeId};
use crate::ingest::{self, IngestError, IngestedGraph, LabelOptions};
use crate::synth;
use crate::theory::{self, DegreeMoments, TheoryRow};
use crate::walker::{self, ProbeAccounting, PublicDegreeMode, WalkConfig, WalkError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    ConfigSyntax { path: PathBuf, source: toml::de::Error },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSpec {
    EdgeList {
        path: PathBuf,
        #[serde(default)]
        directed: bool,
    },
    PreferentialAttachment {
        nodes: usize,
        edges_per_node: usize,
        #[serde(default)]
        seed: u64,
    },
    RandomConnected {
        nodes: usize,
        extra_edges: usize,
        #[serde(default)]
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LabelSource {
    Bernoulli { p_grid: Vec<f64> },
    File {
        path: PathBuf,
        #[serde(default)]
        strict: bool,
    },
    AllPublic,
}

/// Reference value the estimate NRMSE is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Properties of the whole graph (n, d_avg, p).
    #[default]
    Truth,
    /// Each estimator's own convergence value for the trial's labels.
    Convergence,
}

fn default_trials() -> usize {
    1000
}

fn default_m_fraction() -> f64 {
    0.025
}

fn default_fractions() -> Vec<f64> {
    vec![0.01]
}

fn default_mode() -> String {
    "exact_ideal".to_owned()
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

/// Experiment settings, usually read from a TOML file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub labels: LabelSource,
    /// `exact_ideal`, `exact_hidden` or `approx_hidden`.
    #[serde(default = "default_mode")]
    pub mode: String,
    /// Walk lengths as fractions of n; ignored when `sample_sizes` is set.
    #[serde(default = "default_fractions")]
    pub sample_fractions: Vec<f64>,
    #[serde(default)]
    pub sample_sizes: Vec<usize>,
    #[serde(default = "default_m_fraction")]
    pub m_fraction: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub reference: Reference,
    #[serde(default)]
    pub memoize: bool,
    /// Charge every hidden-model sample its own visit query.
    #[serde(default)]
    pub separate_visit_queries: bool,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path)
            .map_err(|source| ExperimentError::Io { path: path.to_path_buf(), source })?;
        let mut config = Self::from_toml(&text)
            .map_err(|source| ExperimentError::ConfigSyntax { path: path.to_path_buf(), source })?;
        // Relative paths inside the file are relative to the file.
        if let Some(dir) = path.parent() {
            config.rebase_paths(dir);
        }
        config.validate()?;
        Ok(config)
    }

    fn rebase_paths(&mut self, dir: &Path) {
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        if let DatasetSpec::EdgeList { path, .. } = &mut self.dataset {
            rebase(path);
        }
        if let LabelSource::File { path, .. } = &mut self.labels {
            rebase(path);
        }
        rebase(&mut self.output_dir);
    }

    pub fn mode(&self) -> Result<PublicDegreeMode, ExperimentError> {
        self.mode.parse().map_err(ExperimentError::Config)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: String| Err(ExperimentError::Config(msg));
        self.mode()?;
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if let LabelSource::Bernoulli { p_grid } = &self.labels {
            if p_grid.is_empty() {
                return bad("p_grid is empty".into());
            }
            if let Some(p) = p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return bad(format!("p = {p} is outside [0, 1]"));
            }
        }
        if self.sample_sizes.is_empty() {
            if self.sample_fractions.is_empty() {
                return bad("no sample size given".into());
            }
            if let Some(f) = self.sample_fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
                return bad(format!("sample fraction {f} is outside (0, 1]"));
            }
        } else if self.sample_sizes.contains(&0) {
            return bad("sample sizes must be positive".into());
        }
        if !(self.m_fraction > 0.0 && self.m_fraction < 1.0) {
            return bad(format!("m_fraction {} is outside (0, 1)", self.m_fraction));
        }
        Ok(())
    }

    fn walk_template(&self) -> Result<WalkConfig, ExperimentError> {
        let mut cfg = WalkConfig::new(1, self.mode()?, 0);
        cfg.memoize = self.memoize;
        if self.separate_visit_queries {
            cfg.accounting = ProbeAccounting::SeparateVisit;
        }
        Ok(cfg)
    }
}

/// Loads or generates the dataset (with its base labels when they come from a file).
pub fn load_dataset(config: &ExperimentConfig) -> Result<IngestedGraph, ExperimentError> {
    let mut ingested = match &config.dataset {
        DatasetSpec::EdgeList { path, directed } => ingest::load_edge_list(path, *directed)?,
        DatasetSpec::PreferentialAttachment { nodes, edges_per_node, seed } => {
            if *edges_per_node == 0 || *nodes <= edges_per_node + 1 {
                return Err(ExperimentError::Config(
                    "preferential attachment needs nodes > edges_per_node + 1 >= 2".into(),
                ));
            }
            synthetic(synth::preferential_attachment(*nodes, *edges_per_node, *seed))
        }
        DatasetSpec::RandomConnected { nodes, extra_edges, seed } => {
            if *nodes < 2 {
                return Err(ExperimentError::Config("random graph needs at least 2 nodes".into()));
            }
            synthetic(synth::random_connected(*nodes, *extra_edges, *seed))
        }
    };
    if let LabelSource::File { path, strict } = &config.labels {
        let options = LabelOptions { strict: *strict, ..Default::default() };
        let labeled = ingest::load_labels(path, &ingested, options)?;
        ingested = ingested.with_labels(labeled);
    }
    Ok(ingested)
}

fn synthetic(graph: LabeledGraph) -> IngestedGraph {
    let n = graph.node_count();
    IngestedGraph { graph, original_ids: (0..n as u64).collect(), stats: Default::default() }
}

/// Estimators reported per cell, in output order.
pub const ESTIMATORS: [&str; 6] = [
    "size_nc",
    "size_proposed",
    "avg_degree_smooth",
    "avg_degree_proposed",
    "privacy_rate_size",
    "privacy_rate_avg_degree",
];

#[derive(Debug, Clone, Copy, PartialEq)]
enum LabelSetting {
    Bernoulli(f64),
    Fixed,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    labels: LabelSetting,
    sample_size: usize,
}

/// What a single trial produced. `None` marks an estimator that failed.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub estimates: [Option<f64>; 6],
    pub convergence: Option<[f64; 6]>,
    pub query_ratio: f64,
    pub raw_queries: u64,
    pub unique_queried: usize,
}

impl TrialOutcome {
    fn failed() -> Self {
        TrialOutcome {
            estimates: [None; 6],
            convergence: None,
            query_ratio: f64::NAN,
            raw_queries: 0,
            unique_queried: 0,
        }
    }
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run_trial(
    base: &LabeledGraph,
    cell: Cell,
    trial_seed: u64,
    walk: &WalkConfig,
    m_fraction: f64,
) -> TrialOutcome {
    let relabeled;
    let g = match cell.labels {
        LabelSetting::Bernoulli(p) => {
            let labels = bernoulli_labels(base.node_count(), p, &mut trial_rng(trial_seed, 1))
                .expect("p validated");
            relabeled = base
                .with_labels(labels, LabelOrigin::Bernoulli { p })
                .expect("label count matches");
            &relabeled
        }
        LabelSetting::Fixed => base,
    };
    let Ok(view) = largest_public_cluster(g) else {
        return TrialOutcome::failed();
    };
    let pick = trial_rng(trial_seed, 2).random_range(0..view.member_count());
    let seed_node: NodeId = view.members().nth(pick).expect("pick < n*");

    let mut cfg = *walk;
    cfg.length = cell.sample_size;
    let record = match walker::run_walk_with_rng(g, &view, seed_node, &cfg, &mut trial_rng(trial_seed, 3)) {
        Ok(record) => record,
        Err(WalkError::Stuck(_)) => return TrialOutcome::failed(),
        Err(e) => panic!("seed drawn from C* was rejected: {e}"),
    };
    let ledger = record.ledger().expect("simulated walks carry a ledger");

    let m = gap_for_fraction(record.len(), m_fraction);
    let size = match estimators::size_estimates(&record, m) {
        Ok(s) => Some(s),
        Err(EstimateError::NoCollision { .. } | EstimateError::InvalidGap { .. }) => None,
        Err(e) => panic!("walk produced an invalid record: {e}"),
    };
    let degree = estimators::avg_degree_estimates(&record).ok();
    let p_rates = match (&size, &degree) {
        (Some(s), Some(d)) => Some(estimators::estimate_privacy_rate(s, d)),
        _ => None,
    };

    let cv = theory::convergence_values(g, &view);
    TrialOutcome {
        estimates: [
            size.map(|s| s.n_nc),
            size.map(|s| s.n_hat),
            degree.map(|d| d.davg_smooth),
            degree.map(|d| d.davg_hat),
            p_rates.map(|p| p.0),
            degree.map(|d| estimators::estimate_privacy_rate_avg(&d)),
        ],
        convergence: Some([
            cv.n_star,
            cv.n_tilde,
            cv.davg_star,
            cv.davg_tilde,
            1.0 - cv.n_star / cv.n_tilde,
            1.0 - cv.davg_star / cv.davg_tilde,
        ]),
        query_ratio: ledger.query_ratio(),
        raw_queries: ledger.raw_queries(),
        unique_queried: ledger.unique_count(),
    }
}

/// One output line: an estimator's accuracy in one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NrmseRow {
    /// Bernoulli p, or the observed private fraction for fixed labels.
    pub p: f64,
    pub sample_size: usize,
    pub estimator: String,
    pub truth: f64,
    pub mean_estimate: f64,
    /// sqrt(mean((estimate/reference − 1)²)) over successful trials.
    pub nrmse: f64,
    /// The same statistic for the estimator's convergence value against the truth.
    pub cv_nrmse: f64,
    pub successful_trials: usize,
    pub failed_trials: usize,
    pub mean_query_ratio: f64,
    pub mean_unique_fraction: f64,
}

/// sqrt(mean((x/reference − 1)²)); NaN when empty.
pub fn nrmse(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let mut count = 0usize;
    let mut acc = 0.0;
    for (x, reference) in pairs {
        let e = x / reference - 1.0;
        acc += e * e;
        count += 1;
    }
    if count == 0 {
        f64::NAN
    } else {
        (acc / count as f64).sqrt()
    }
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, count) = xs.into_iter().fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

/// Aggregated outcome of one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub rows: Vec<NrmseRow>,
    pub theory: Vec<TheoryRow>,
}

fn cells(config: &ExperimentConfig, n: usize) -> Vec<Cell> {
    let settings: Vec<LabelSetting> = match &config.labels {
        LabelSource::Bernoulli { p_grid } => p_grid.iter().map(|&p| LabelSetting::Bernoulli(p)).collect(),
        LabelSource::File { .. } | LabelSource::AllPublic => vec![LabelSetting::Fixed],
    };
    let sizes: Vec<usize> = if config.sample_sizes.is_empty() {
        config
            .sample_fractions
            .iter()
            .map(|f| ((f * n as f64).round() as usize).max(1))
            .collect()
    } else {
        config.sample_sizes.clone()
    };
    settings
        .iter()
        .flat_map(|&labels| sizes.iter().map(move |&sample_size| Cell { labels, sample_size }))
        .collect()
}

fn run_cell(base: &LabeledGraph, cell: Cell, config: &ExperimentConfig, walk: &WalkConfig) -> Vec<TrialOutcome> {
    (0..config.trials as u64)
        .into_par_iter()
        .map(|i| run_trial(base, cell, config.seed.wrapping_add(i), walk, config.m_fraction))
        .collect()
}

fn cell_p(base: &LabeledGraph, cell: Cell) -> f64 {
    match cell.labels {
        LabelSetting::Bernoulli(p) => p,
        LabelSetting::Fixed => base.private_count() as f64 / base.node_count() as f64,
    }
}

fn summarize(base: &LabeledGraph, cell: Cell, outcomes: &[TrialOutcome], reference: Reference) -> Vec<NrmseRow> {
    let p = cell_p(base, cell);
    let truths = [
        base.node_count() as f64,
        base.node_count() as f64,
        base.average_degree(),
        base.average_degree(),
        p,
        p,
    ];
    let n = base.node_count() as f64;
    let walked: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.convergence.is_some()).collect();
    let mean_q = mean(walked.iter().map(|o| o.query_ratio));
    let mean_unique = mean(walked.iter().map(|o| o.unique_queried as f64 / n));

    ESTIMATORS
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let ok: Vec<(f64, f64)> = outcomes
                .iter()
                .filter_map(|o| {
                    let est = o.estimates[j]?;
                    let cv = o.convergence?[j];
                    Some((est, cv))
                })
                .collect();
            let reference_of = |cv: f64| match reference {
                Reference::Truth => truths[j],
                Reference::Convergence => cv,
            };
            NrmseRow {
                p,
                sample_size: cell.sample_size,
                estimator: (*name).to_owned(),
                truth: truths[j],
                mean_estimate: mean(ok.iter().map(|&(e, _)| e)),
                nrmse: nrmse(ok.iter().map(|&(e, cv)| (e, reference_of(cv)))),
                cv_nrmse: nrmse(walked.iter().map(|o| (o.convergence.unwrap()[j], truths[j]))),
                successful_trials: ok.len(),
                failed_trials: outcomes.len() - ok.len(),
                mean_query_ratio: mean_q,
                mean_unique_fraction: mean_unique,
            }
        })
        .collect()
}

/// Runs every cell of `config` on an already-loaded dataset.
pub fn run_experiment_on(dataset: &IngestedGraph, config: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    config.validate()?;
    let walk = config.walk_template()?;
    let base = &dataset.graph;
    let mut rows = Vec::new();
    for cell in cells(config, base.node_count()) {
        let outcomes = run_cell(base, cell, config, &walk);
        rows.extend(summarize(base, cell, &outcomes, config.reference));
    }
    let moments = DegreeMoments::of(base.topology());
    let grid: Vec<f64> = match &config.labels {
        LabelSource::Bernoulli { p_grid } => p_grid.clone(),
        _ => vec![base.private_count() as f64 / base.node_count() as f64],
    };
    Ok(ExperimentOutput { rows, theory: theory::theory_rows(&moments, &grid) })
}

/// Loads the dataset, runs the experiment and writes `nrmse.csv` and
/// `theory.csv` into the output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    let dataset = load_dataset(config)?;
    let output = run_experiment_on(&dataset, config)?;
    write_experiment_output(&config.output_dir, &output)?;
    Ok(output)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, ExperimentError> {
    fs::create_dir_all(dir).map_err(|source| ExperimentError::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|source| ExperimentError::Io { path, source })
}

pub fn write_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<(), ExperimentError> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_experiment_output(dir: &Path, output: &ExperimentOutput) -> Result<(), ExperimentError> {
    write_rows(create(dir, "nrmse.csv")?, &output.rows)?;
    let mut theory_out = create(dir, "theory.csv")?;
    theory::write_theory_csv(&mut theory_out, &output.theory)
        .and_then(|_| theory_out.flush())
        .map_err(|source| ExperimentError::Io { path: dir.join("theory.csv"), source })?;
    Ok(())
}

/// Query cost of one public-degree method in one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusRow {
    pub p: f64,
    pub sample_size: usize,
    pub mode: String,
    pub mean_raw_queries: f64,
    pub mean_query_ratio: f64,
    pub mean_unique_queried: f64,
    /// Unique queried nodes as a fraction of n.
    pub unique_fraction: f64,
    pub size_proposed_nrmse: f64,
    pub failed_trials: usize,
}

/// Compares the exact and approximate hidden-model methods on identical
/// trial seeds (hence identical labels, seed nodes and sample paths).
pub fn query_census_on(dataset: &IngestedGraph, config: &ExperimentConfig) -> Result<Vec<CensusRow>, ExperimentError> {
    config.validate()?;
    let base = &dataset.graph;
    let n = base.node_count() as f64;
    let mut rows = Vec::new();
    for cell in cells(config, base.node_count()) {
        for mode in [PublicDegreeMode::ExactHidden, PublicDegreeMode::ApproxHidden] {
            let mut walk = config.walk_template()?;
            walk.mode = mode;
            let outcomes = run_cell(base, cell, config, &walk);
            let walked: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.convergence.is_some()).collect();
            let size: Vec<(f64, f64)> = outcomes
                .iter()
                .filter_map(|o| o.estimates[1].map(|e| (e, n)))
                .collect();
            let failed = outcomes.len() - size.len();
            let mean_unique = mean(walked.iter().map(|o| o.unique_queried as f64));
            rows.push(CensusRow {
                p: cell_p(base, cell),
                sample_size: cell.sample_size,
                mode: mode.name().to_owned(),
                mean_raw_queries: mean(walked.iter().map(|o| o.raw_queries as f64)),
                mean_query_ratio: mean(walked.iter().map(|o| o.query_ratio)),
                mean_unique_queried: mean_unique,
                unique_fraction: mean_unique / n,
                size_proposed_nrmse: nrmse(size),
                failed_trials: failed,
            });
        }
    }
    Ok(rows)
}

/// Loads the dataset, runs the census and writes `census.csv`.
pub fn query_census(config: &ExperimentConfig) -> Result<Vec<CensusRow>, ExperimentError> {
    let dataset = load_dataset(config)?;
    let rows = query_census_on(&dataset, config)?;
    write_rows(create(&config.output_dir, "census.csv")?, &rows)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ExperimentConfig {
        let c = ExperimentConfig::from_toml(text).unwrap();
        c.validate().unwrap();
        c
    }

    #[test]
    fn parses_defaults() {
        let c = config(
            r#"
            dataset = { kind = "preferential_attachment", nodes = 100, edges_per_node = 3 }
            labels = { kind = "bernoulli", p_grid = [0.0, 0.1] }
            "#,
        );
        assert_eq!(c.trials, 1000);
        assert_eq!(c.m_fraction, 0.025);
        assert_eq!(c.sample_fractions, vec![0.01]);
        assert_eq!(c.mode().unwrap(), PublicDegreeMode::ExactIdeal);
        assert_eq!(c.reference, Reference::Truth);
    }

    #[test]
    fn rejects_bad_values() {
        let parse = |extra: &str| {
            let text = format!(
                "dataset = {{ kind = \"preferential_attachment\", nodes = 100, edges_per_node = 3 }}\n{extra}"
            );
            ExperimentConfig::from_toml(&text).map(|c| c.validate())
        };
        assert!(parse("labels = { kind = \"bernoulli\", p_grid = [1.5] }").unwrap().is_err());
        assert!(parse("labels = { kind = \"all_public\" }\ntrials = 0").unwrap().is_err());
        assert!(parse("labels = { kind = \"all_public\" }\nsample_fractions = [0.0]").unwrap().is_err());
        assert!(parse("labels = { kind = \"all_public\" }\nmode = \"psychic\"").unwrap().is_err());
        assert!(parse("labels = { kind = \"all_public\" }\nbogus = 1").is_err());
    }

    #[test]
    fn nrmse_definition() {
        assert!((nrmse([(1.1, 1.0)]) - 0.1).abs() < 1e-12);
        let v = nrmse([(2.0, 1.0), (1.0, 1.0)]);
        assert!((v - (0.5f64).sqrt()).abs() < 1e-15);
        assert!(nrmse(std::iter::empty()).is_nan());
    }

    #[test]
    fn single_trial_all_public() {
        let c = config(
            r#"
            dataset = { kind = "random_connected", nodes = 30, extra_edges = 40, seed = 2 }
            labels = { kind = "bernoulli", p_grid = [0.0] }
            sample_sizes = [400]
            trials = 1
            reference = "convergence"
            "#,
        );
        let data = load_dataset(&c).unwrap();
        let out = run_experiment_on(&data, &c).unwrap();
        assert_eq!(out.rows.len(), 6);
        let by = |name: &str| out.rows.iter().find(|r| r.estimator == name).unwrap();
        assert_eq!(by("size_nc").nrmse, by("size_proposed").nrmse);
        assert_eq!(by("avg_degree_smooth").nrmse, by("avg_degree_proposed").nrmse);
        for name in &ESTIMATORS[..4] {
            assert_eq!(by(name).cv_nrmse, 0.0);
            let r = by(name);
            assert_eq!(r.nrmse, (r.mean_estimate / r.truth - 1.0).abs());
        }
    }
}

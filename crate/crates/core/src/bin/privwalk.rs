use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use privwalk::estimators::{self, gap_for_fraction};
use privwalk::experiment::{self, ExperimentConfig};
use privwalk::ingest::{self, IngestedGraph, LabelOptions};
use privwalk::theory::{self, DegreeMoments};
use privwalk::walker::{ProbeAccounting, PublicDegreeMode, WalkConfig};
use privwalk::{largest_public_cluster, LabeledGraph};

#[derive(Parser)]
#[command(name = "privwalk", version, about = "Random-walk size and average-degree estimation with private nodes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean an edge list: symmetrize, drop loops and duplicates, keep the largest component.
    Ingest {
        input: PathBuf,
        #[arg(long)]
        directed: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Draw Bernoulli(p) privacy labels for a graph.
    Labels {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(short)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run one walk and write its sample dump.
    Walk {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        labels: LabelArgs,
        #[arg(short = 'r', long)]
        length: usize,
        #[arg(long, default_value = "exact_ideal")]
        mode: PublicDegreeMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Start node (original id); default is a uniform member of the largest public cluster.
        #[arg(long)]
        start: Option<u64>,
        #[arg(long)]
        memoize: bool,
        #[arg(long)]
        separate_visit_queries: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate every estimator on a sample file.
    Estimate {
        samples: PathBuf,
        /// Minimum index gap; defaults to ceil(m_fraction * r).
        #[arg(short)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0.025)]
        m_fraction: f64,
    },
    /// Expected errors and query ratios over a p grid; with labels, the convergence values too.
    Theory {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        p_grid: Vec<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a configured experiment and write nrmse.csv and theory.csv.
    Experiment { config: PathBuf },
    /// Compare query costs of the exact and approximate hidden-model methods.
    Census { config: PathBuf },
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list, one `u v` pair per line.
    #[arg(short, long)]
    graph: PathBuf,
    #[arg(long)]
    directed: bool,
}

impl GraphArgs {
    fn load(&self) -> Result<IngestedGraph> {
        let g = ingest::load_edge_list(&self.graph, self.directed)?;
        info!("loaded {} nodes, {} edges", g.graph.node_count(), g.graph.edge_count());
        Ok(g)
    }
}

#[derive(Args)]
struct LabelArgs {
    /// Label file (`id flag`, 1 = private).
    #[arg(long, conflicts_with = "p")]
    labels: Option<PathBuf>,
    /// Draw Bernoulli(p) labels instead of reading a file.
    #[arg(short)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    label_seed: u64,
}

impl LabelArgs {
    fn apply(&self, g: &IngestedGraph) -> Result<LabeledGraph> {
        Ok(match (&self.labels, self.p) {
            (Some(path), _) => ingest::load_labels(path, g, LabelOptions::default())?,
            (None, Some(p)) => g.graph.assign_labels_bernoulli(p, self.label_seed)?,
            (None, None) => g.graph.clone(),
        })
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { input, directed, output: out } => {
            let g = ingest::load_edge_list(&input, directed)?;
            let s = &g.stats;
            eprintln!(
                "nodes {} edges {} (input nodes {}, dropped {}, self-loops {}, duplicates {}, reciprocal pairs {})",
                g.graph.node_count(),
                g.graph.edge_count(),
                s.input_nodes,
                s.dropped_nodes,
                s.self_loops,
                s.duplicate_edges,
                s.reciprocal_pairs
            );
            let mut w = output(out.as_deref())?;
            g.write_edge_list(&mut w)?;
            w.flush()?;
        }
        Command::Labels { graph, p, seed, output: out } => {
            let g = graph.load()?;
            let labeled = g.graph.assign_labels_bernoulli(p, seed)?;
            let mut w = output(out.as_deref())?;
            ingest::write_labels(&mut w, &labeled, &g.original_ids)?;
            w.flush()?;
        }
        Command::Walk {
            graph,
            labels,
            length,
            mode,
            seed,
            start,
            memoize,
            separate_visit_queries,
            output: out,
        } => {
            let g = graph.load()?;
            let labeled = labels.apply(&g)?;
            let view = largest_public_cluster(&labeled)?;
            let start = match start {
                Some(id) => g.dense_id(id).with_context(|| format!("start node {id} is not in the graph"))?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(2);
                    let k = rng.random_range(0..view.member_count());
                    view.members().nth(k).expect("k < n*")
                }
            };
            let mut config = WalkConfig::new(length, mode, seed);
            config.memoize = memoize;
            if separate_visit_queries {
                config.accounting = ProbeAccounting::SeparateVisit;
            }
            let record = privwalk::run_walk(&labeled, &view, start, &config)?;
            if let Some(ledger) = record.ledger() {
                eprintln!(
                    "cluster size {} of {}; raw queries {} ({:.3} per sample), unique {}",
                    view.member_count(),
                    labeled.node_count(),
                    ledger.raw_queries(),
                    ledger.query_ratio(),
                    ledger.unique_count()
                );
            }
            let mut w = output(out.as_deref())?;
            record.write_dump(&mut w, Some(&g.original_ids))?;
            w.flush()?;
        }
        Command::Estimate { samples, m, m_fraction } => {
            if !(m_fraction > 0.0 && m_fraction < 1.0) {
                bail!("m_fraction must lie in (0, 1)");
            }
            let file = ingest::load_sample_records(&samples)?;
            let r = file.record.len();
            let m = m.unwrap_or_else(|| gap_for_fraction(r, m_fraction));
            let report = estimators::estimate(&file.record, m)?;
            println!("r\t{r}");
            println!("m\t{m}");
            println!("size_nc\t{}", report.n_nc());
            println!("size_proposed\t{}", report.n_hat());
            println!("avg_degree_smooth\t{}", report.davg_smooth());
            println!("avg_degree_proposed\t{}", report.davg_hat());
            println!("privacy_rate_size\t{}", report.p_hat_n);
            println!("privacy_rate_avg_degree\t{}", report.p_hat_avg);
        }
        Command::Theory { graph, labels, p_grid, output: out } => {
            if let Some(p) = p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                bail!("p = {p} is outside [0, 1]");
            }
            let g = graph.load()?;
            if let Some(path) = labels {
                let labeled = ingest::load_labels(&path, &g, LabelOptions::default())?;
                let view = largest_public_cluster(&labeled)?;
                let cv = theory::convergence_values(&labeled, &view);
                let q = theory::expected_query_ratios(&labeled, &view);
                eprintln!("n {} n_star {} n_tilde {}", labeled.node_count(), cv.n_star, cv.n_tilde);
                eprintln!(
                    "davg {} davg_star {} davg_tilde {}",
                    labeled.average_degree(),
                    cv.davg_star,
                    cv.davg_tilde
                );
                eprintln!("expected queries per sample: exact {} approx {}", q.exact, q.approx);
            }
            let rows = theory::theory_rows(&DegreeMoments::of(g.graph.topology()), &p_grid);
            let mut w = output(out.as_deref())?;
            theory::write_theory_csv(&mut w, &rows)?;
            w.flush()?;
        }
        Command::Experiment { config } => {
            let config = ExperimentConfig::load(&config)?;
            let out = experiment::run_experiment(&config)?;
            eprintln!("{} rows written to {}", out.rows.len(), config.output_dir.display());
        }
        Command::Census { config } => {
            let config = ExperimentConfig::load(&config)?;
            let rows = experiment::query_census(&config)?;
            eprintln!("{} rows written to {}", rows.len(), config.output_dir.join("census.csv").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

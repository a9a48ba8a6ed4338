//! Command-line front end. Each subcommand runs one pipeline stage, reusing
//! upstream artifacts in the output directory when they are current.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
//! Failures print one line to stderr: `error kind=<tag>: <message>`.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::error::{Error, ErrorClass, Result};
use crate::eval;
use crate::pipeline::{ProjectionMethod, Run};

#[derive(Debug, Parser)]
#[command(name = "occrisk", version, about = "Occupation automation-risk pipeline over an occupation-skill graph")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Corpus directory, overriding the config.
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Record the run as deterministic in the manifest.
    #[arg(long, global = true)]
    pub deterministic: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate the corpus and write an ingest report.
    Ingest,
    /// Train word, document and skill embeddings.
    Embed,
    /// Assemble the occupation-skill graph and report its structure.
    BuildGraph,
    /// Train the graph model.
    Train,
    /// Score the graph model and the three baselines on the test split.
    Evaluate,
    /// Rank every occupation by predicted automation risk.
    Predict,
    /// Train over the embedding-size and layer-width grid.
    Sweep,
    /// Project learned node embeddings to two dimensions.
    Project {
        #[arg(long, value_enum, default_value_t = MethodArg::Tsne)]
        method: MethodArg,
        /// Include skill nodes.
        #[arg(long)]
        all_nodes: bool,
    },
    /// Compare the risk table against the declining-occupation list.
    CompareBls,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Pca,
    Kmeans,
    Tsne,
}

impl From<MethodArg> for ProjectionMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Pca => ProjectionMethod::Pca,
            MethodArg::Kmeans => ProjectionMethod::Kmeans,
            MethodArg::Tsne => ProjectionMethod::Tsne,
        }
    }
}

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    match e.class() {
        ErrorClass::Usage => EXIT_USAGE,
        ErrorClass::Data => EXIT_DATA,
        ErrorClass::Numeric => EXIT_NUMERIC,
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.paths.out_dir = out.clone();
    }
    if let Some(data) = &cli.data {
        cfg.paths.data_dir = data.clone();
    }
    if let Some(threads) = cli.threads {
        cfg.threads = threads;
    }
    if cli.deterministic {
        cfg.deterministic = true;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<()> {
    let mut cfg = resolve_config(&cli)?;
    if cfg.threads > 0 {
        // Fails only if a pool already exists, which is harmless here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    }
    if let Command::Project { all_nodes: true, .. } = cli.command {
        cfg.viz.all_nodes = true;
    }
    let run = Run::new(cfg)?;
    let mut out = std::io::stdout().lock();
    let w = |out: &mut std::io::StdoutLock, s: String| {
        let _ = out.write_all(s.as_bytes());
    };
    match cli.command {
        Command::Ingest => {
            let r = run.ingest()?;
            w(
                &mut out,
                format!(
                    "occupations {}\nskills {}\nlinks {}\nlabels {} ({} automated)\nexcluded {}\n",
                    r.occupations,
                    r.skills,
                    r.links,
                    r.labels,
                    r.labels_automated,
                    r.excluded.len()
                ),
            );
            if r.fixture_verified == Some(false) {
                w(&mut out, "warning: inputs differ from the fixture manifest\n".into());
            }
        }
        Command::Embed => {
            let e = run.embed()?;
            let s = &e.stats;
            w(
                &mut out,
                format!(
                    "vocabulary {}\nword loss {:.4} -> {:.4}\ndocument loss {:.4} -> {:.4}\nunresolved skills {}\n",
                    s.vocabulary,
                    s.word_initial_loss,
                    s.word_final_loss,
                    s.doc_initial_loss,
                    s.doc_final_loss,
                    s.unresolved_skills.len()
                ),
            );
        }
        Command::BuildGraph => {
            let (_, r) = run.build_graph()?;
            w(
                &mut out,
                format!(
                    "occupations {}\nskills {}\nedges {}\nbipartite {}\ndegree sums match {}\n",
                    r.occupations, r.skills, r.edges, r.bipartite, r.degree_sums_match
                ),
            );
        }
        Command::Train => {
            let model = run.train()?;
            w(&mut out, format!("trained layer plan {:?}\n", model.layer_plan));
        }
        Command::Evaluate => {
            let rows = run.evaluate()?;
            w(&mut out, eval::metrics_table(&rows));
        }
        Command::Predict => {
            let t = run.predict()?;
            for r in t.rows.iter().take(10) {
                w(&mut out, format!("{:>4}  {:.4}  {}  {}\n", r.rank, r.probability, r.soc_code, r.title));
            }
            w(
                &mut out,
                format!(
                    "flagged {} of {} at cutoff {} ({:.1}%)\n",
                    t.flagged(),
                    t.rows.len(),
                    t.cutoff,
                    100.0 * t.flagged_fraction()
                ),
            );
        }
        Command::Sweep => {
            let cells = run.sweep()?;
            for c in &cells {
                w(&mut out, format!("d0 {:>3}  hidden {:>3}  accuracy {:.4}  f1 {:.4}\n", c.d0, c.hidden, c.accuracy, c.f1));
            }
        }
        Command::Project { method, .. } => {
            let p = run.project(method.into())?;
            w(&mut out, format!("projected {} points with {}\n", p.len(), ProjectionMethod::from(method).name()));
        }
        Command::CompareBls => {
            let r = run.compare_bls()?;
            let fraction = r
                .fraction_above
                .map_or_else(|| "undefined".to_string(), |f| format!("{:.4}", f));
            w(
                &mut out,
                format!(
                    "matched {}\nunmatched {}\nfraction above {} {}\n",
                    r.matched.len(),
                    r.unmatched.len(),
                    r.threshold,
                    fraction
                ),
            );
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let first = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            eprintln!("error kind=usage: {}", one_line(&first));
            eprintln!("{}", e.render().to_string().lines().skip(1).collect::<Vec<_>>().join("\n").trim());
            return EXIT_USAGE;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error kind={}: {}", e.kind(), one_line(&e.to_string()));
            exit_code(&e)
        }
    }
}

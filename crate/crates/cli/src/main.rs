//! Command-line pipeline driver.
//!
//! Exit codes: 0 on success, 2 for configuration/usage errors, 1 for runtime
//! failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser};

use graphzoom_core::io::SbmSpec;
use graphzoom_core::pipeline::{InputSource, KernelChoice, PipelineConfig, Task};

#[derive(Parser, Debug)]
#[command(
    name = "graphzoom",
    about = "Multi-level spectral graph embedding: fuse, coarsen, embed, refine",
    group(ArgGroup::new("input").args(["edges", "sbm"]).required(true))
)]
struct Args {
    /// Edge list file ("u v" or "u v w" per line, '#' comments)
    #[arg(long, value_name = "PATH")]
    edges: Option<PathBuf>,

    /// Node feature CSV (one row of reals per node)
    #[arg(long, value_name = "PATH")]
    features: Option<PathBuf>,

    /// Node label CSV ("node_id,label" per line)
    #[arg(long, value_name = "PATH")]
    labels: Option<PathBuf>,

    /// Training node ids, one per line
    #[arg(long = "train-mask", value_name = "PATH")]
    train_mask: Option<PathBuf>,

    /// Test node ids, one per line
    #[arg(long = "test-mask", value_name = "PATH")]
    test_mask: Option<PathBuf>,

    /// Synthetic benchmark instead of files: "n,b,p_in,p_out,K,noise"
    #[arg(long, value_name = "SPEC")]
    sbm: Option<String>,

    /// Coarsening levels
    #[arg(long, default_value_t = 2)]
    levels: usize,

    /// Attribute graph weight in the fused adjacency
    #[arg(long, default_value_t = 1.0)]
    beta: f64,

    /// Neighbors per node in the attribute kNN graph
    #[arg(long = "knn-k", default_value_t = 5)]
    knn_k: usize,

    /// Self-loop weight added before filter normalization
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,

    /// Number of filter applications per refinement level
    #[arg(long = "filter-power", default_value_t = 2)]
    filter_power: usize,

    /// Embedding kernel: deepwalk | spectral
    #[arg(long, default_value = "deepwalk")]
    kernel: String,

    /// Embedding dimension
    #[arg(long, default_value_t = 128)]
    dim: usize,

    /// RNG seed
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Task: classify | linkpred | embed-only
    #[arg(long, default_value = "classify")]
    task: String,

    /// Where to write the final embeddings CSV
    #[arg(long = "out-embeddings", value_name = "PATH")]
    out_embeddings: Option<PathBuf>,

    /// Where to write the JSON report (defaults to stdout)
    #[arg(long = "out-report", value_name = "PATH")]
    out_report: Option<PathBuf>,
}

fn parse_sbm(spec: &str) -> Result<SbmSpec, String> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        return Err(format!(
            "--sbm expects \"n,b,p_in,p_out,K,noise\", got {spec:?}"
        ));
    }
    let parse = |i: usize, what: &str| -> Result<f64, String> {
        parts[i]
            .parse::<f64>()
            .map_err(|_| format!("bad {what} in --sbm: {:?}", parts[i]))
    };
    let n = parts[0]
        .parse::<usize>()
        .map_err(|_| format!("bad node count in --sbm: {:?}", parts[0]))?;
    let blocks = parts[1]
        .parse::<usize>()
        .map_err(|_| format!("bad block count in --sbm: {:?}", parts[1]))?;
    let feature_dim = parts[4]
        .parse::<usize>()
        .map_err(|_| format!("bad feature dimension in --sbm: {:?}", parts[4]))?;
    Ok(SbmSpec {
        n,
        blocks,
        p_in: parse(2, "p_in")?,
        p_out: parse(3, "p_out")?,
        feature_dim,
        feature_noise: parse(5, "noise")?,
        seed: 0, // overwritten with the pipeline seed below
    })
}

fn build_config(args: Args) -> Result<PipelineConfig, String> {
    let input = match (&args.edges, &args.sbm) {
        (Some(edges), None) => InputSource::Files {
            edges: edges.clone(),
            features: args.features.clone(),
            labels: args.labels.clone(),
            train_mask: args.train_mask.clone(),
            test_mask: args.test_mask.clone(),
        },
        (None, Some(spec)) => {
            let mut sbm = parse_sbm(spec)?;
            sbm.seed = args.seed;
            InputSource::Sbm(sbm)
        }
        // clap's arg group enforces exactly one input
        _ => unreachable!("input group guarantees exactly one source"),
    };
    let kernel: KernelChoice = args.kernel.parse().map_err(|e| format!("{e}"))?;
    let task: Task = args.task.parse().map_err(|e| format!("{e}"))?;

    let mut cfg = PipelineConfig::new(input);
    cfg.levels = args.levels;
    cfg.beta = args.beta;
    cfg.knn_k = args.knn_k;
    cfg.sigma = args.sigma;
    cfg.filter_power = args.filter_power;
    cfg.kernel = kernel;
    cfg.dim = args.dim;
    cfg.seed = args.seed;
    cfg.task = task;
    cfg.out_embeddings = args.out_embeddings;
    cfg.out_report = args.out_report;
    cfg.validate().map_err(|e| format!("{e}"))?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse(); // usage errors exit with code 2
    let cfg = match build_config(args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let to_stdout = cfg.out_report.is_none();
    match graphzoom_core::run_pipeline(&cfg) {
        Ok(out) => {
            if out.report.fusion_skipped {
                eprintln!("notice: no node features; fusion skipped, using topology only");
            }
            if to_stdout {
                println!("{}", out.report.to_json());
            } else {
                let t = &out.report.timings;
                eprintln!(
                    "done: fusion {:.2}s, coarsening {:.2}s, embedding {:.2}s, refinement {:.2}s, total {:.2}s",
                    t.fusion, t.coarsening, t.embedding, t.refinement, t.total
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(1)
        }
    }
}

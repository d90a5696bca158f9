//! End-to-end pipeline: fuse, coarsen, embed the coarsest graph, refine back
//! to the original graph, then evaluate and write artifacts.

use std::path::PathBuf;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::coarsening::{build_hierarchy, CoarsenConfig};
use crate::embed::{deepwalk_embed, spectral_embed, validate_embedding, DeepWalkConfig};
use crate::error::{Error, Result};
use crate::eval::{
    evaluate_classification, link_prediction_auc, mean_and_std, stratified_split,
    train_classifier, EvalReport, PhaseTimings,
};
use crate::fusion::{cluster_for_knn, fuse, knn_attribute_graph, FusionConfig};
use crate::graph::{EmbeddingMatrix, Graph};
use crate::io::{
    generate_sbm, labels_to_dense, load_edge_list, load_features_csv, load_labels_csv,
    load_mask, save_embeddings_csv, Dataset, SbmSpec,
};
use crate::refine::{refine_all, FilterConfig};

const FUSION_SEED_SALT: u64 = 0x5EED_F051;
const LINKPRED_SPLIT_SALT: u64 = 0x5EED_11CC;
const LINKPRED_EVAL_SALT: u64 = 0x5EED_22AA;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Classify,
    LinkPred,
    EmbedOnly,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Classify => "classify",
            Task::LinkPred => "linkpred",
            Task::EmbedOnly => "embed-only",
        }
    }
}

impl std::str::FromStr for Task {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classify" => Ok(Task::Classify),
            "linkpred" => Ok(Task::LinkPred),
            "embed-only" => Ok(Task::EmbedOnly),
            other => Err(Error::Validation(format!(
                "unknown task {other:?}; expected classify, linkpred, or embed-only"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelChoice {
    DeepWalk,
    Spectral,
}

impl KernelChoice {
    pub fn name(&self) -> &'static str {
        match self {
            KernelChoice::DeepWalk => "deepwalk",
            KernelChoice::Spectral => "spectral",
        }
    }
}

impl std::str::FromStr for KernelChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deepwalk" => Ok(KernelChoice::DeepWalk),
            "spectral" => Ok(KernelChoice::Spectral),
            other => Err(Error::Validation(format!(
                "unknown kernel {other:?}; expected deepwalk or spectral"
            ))),
        }
    }
}

/// Where the dataset comes from: files on disk or a synthetic benchmark.
#[derive(Debug, Clone)]
pub enum InputSource {
    Files {
        edges: PathBuf,
        features: Option<PathBuf>,
        labels: Option<PathBuf>,
        train_mask: Option<PathBuf>,
        test_mask: Option<PathBuf>,
    },
    Sbm(SbmSpec),
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: InputSource,
    pub levels: usize,
    pub beta: f64,
    pub knn_k: usize,
    pub target_cluster_size: usize,
    pub sigma: f64,
    pub filter_power: usize,
    pub kernel: KernelChoice,
    pub dim: usize,
    pub seed: u64,
    pub task: Task,
    pub out_embeddings: Option<PathBuf>,
    pub out_report: Option<PathBuf>,
    /// Walk and skip-gram parameters; `dim` and `seed` above take precedence.
    pub deepwalk: DeepWalkConfig,
    /// Aggregation parameters; `levels` above takes precedence.
    pub coarsen: CoarsenConfig,
    /// Fraction of each class used for training when no masks are given.
    pub train_fraction: f64,
    /// Seeded classification trials averaged into the report.
    pub trials: usize,
    /// Fraction of edges held out as link prediction positives.
    pub linkpred_holdout: f64,
}

impl PipelineConfig {
    pub fn new(input: InputSource) -> Self {
        PipelineConfig {
            input,
            levels: 2,
            beta: 1.0,
            knn_k: 5,
            target_cluster_size: 50,
            sigma: 2.0,
            filter_power: 2,
            kernel: KernelChoice::DeepWalk,
            dim: 128,
            seed: 42,
            task: Task::Classify,
            out_embeddings: None,
            out_report: None,
            deepwalk: DeepWalkConfig::default(),
            coarsen: CoarsenConfig::default(),
            train_fraction: 0.1,
            trials: 5,
            linkpred_holdout: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Validation("dim must be >= 1".into()));
        }
        if self.beta < 0.0 {
            return Err(Error::Validation("beta must be non-negative".into()));
        }
        if self.sigma < 0.0 {
            return Err(Error::Validation("sigma must be non-negative".into()));
        }
        if self.knn_k == 0 {
            return Err(Error::Validation("knn-k must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Validation("trials must be >= 1".into()));
        }
        if !(self.linkpred_holdout > 0.0 && self.linkpred_holdout < 1.0) {
            return Err(Error::Validation("link prediction holdout must lie in (0, 1)".into()));
        }
        if let InputSource::Sbm(spec) = &self.input {
            spec.validate()?;
        }
        Ok(())
    }

    fn summary_json(&self) -> serde_json::Value {
        let input = match &self.input {
            InputSource::Files { edges, .. } => {
                serde_json::json!({ "kind": "files", "edges": edges.display().to_string() })
            }
            InputSource::Sbm(s) => serde_json::json!({
                "kind": "sbm",
                "n": s.n, "blocks": s.blocks, "p_in": s.p_in, "p_out": s.p_out,
                "feature_dim": s.feature_dim, "feature_noise": s.feature_noise,
                "seed": s.seed,
            }),
        };
        serde_json::json!({
            "input": input,
            "levels": self.levels,
            "beta": self.beta,
            "knn_k": self.knn_k,
            "sigma": self.sigma,
            "filter_power": self.filter_power,
            "kernel": self.kernel.name(),
            "dim": self.dim,
            "seed": self.seed,
            "task": self.task.name(),
        })
    }
}

/// Everything a pipeline run produces.
#[derive(Debug)]
pub struct PipelineOutput {
    pub report: EvalReport,
    pub embeddings: EmbeddingMatrix,
}

fn load_dataset(cfg: &PipelineConfig) -> Result<Dataset> {
    let ds = match &cfg.input {
        InputSource::Sbm(spec) => generate_sbm(spec)?,
        InputSource::Files {
            edges,
            features,
            labels,
            train_mask,
            test_mask,
        } => {
            let graph = load_edge_list(edges)?;
            let n = graph.num_nodes();
            let mut ds = Dataset::new(graph);
            if let Some(p) = features {
                ds.features = Some(load_features_csv(p)?);
            }
            if let Some(p) = labels {
                let pairs = load_labels_csv(p)?;
                ds.labels = Some(labels_to_dense(&pairs, n)?);
            }
            if let Some(p) = train_mask {
                ds.train_mask = Some(load_mask(p)?);
            }
            if let Some(p) = test_mask {
                ds.test_mask = Some(load_mask(p)?);
            }
            ds
        }
    };
    ds.validate()?;
    Ok(ds)
}

/// Training graph plus held-out positive and sampled negative edge sets.
pub type LinkPredSplit = (Graph, Vec<(usize, usize)>, Vec<(usize, usize)>);

/// Hold out `frac` of the undirected edges as link prediction positives and
/// sample the same number of uniform non-edges as negatives.
pub fn split_edges_for_link_prediction(g: &Graph, frac: f64, seed: u64) -> Result<LinkPredSplit> {
    let mut all: Vec<(usize, usize, f64)> = g.edges().filter(|&(u, v, _)| u != v).collect();
    if all.len() < 2 {
        return Err(Error::Validation(
            "graph too small to hold out edges for link prediction".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    all.shuffle(&mut rng);
    let n_test = ((all.len() as f64 * frac).round() as usize).clamp(1, all.len() - 1);
    let held_out: Vec<(usize, usize)> = all[..n_test].iter().map(|&(u, v, _)| (u, v)).collect();
    let remaining = &all[n_test..];
    let train = Graph::from_edges(g.num_nodes(), remaining)?;

    let n = g.num_nodes();
    let mut negatives = Vec::with_capacity(n_test);
    let mut attempts = 0usize;
    let max_attempts = n_test.saturating_mul(1000).max(10_000);
    while negatives.len() < n_test {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::Validation(
                "could not sample enough non-edges for link prediction".into(),
            ));
        }
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let (a, b) = (u.min(v), u.max(v));
        if g.weight(a, b) == 0.0 && !negatives.contains(&(a, b)) {
            negatives.push((a, b));
        }
    }
    Ok((train, held_out, negatives))
}

/// Execute the full pipeline described by `cfg`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    cfg.validate().map_err(|e| e.in_phase("config"))?;
    let total_start = Instant::now();
    let mut timings = PhaseTimings::default();

    let mut ds = load_dataset(cfg).map_err(|e| e.in_phase("config"))?;

    // Link prediction holds out test edges before anything else sees them.
    type EdgeSets = (Vec<(usize, usize)>, Vec<(usize, usize)>);
    let mut linkpred_edges: Option<EdgeSets> = None;
    if cfg.task == Task::LinkPred {
        let (train, pos, neg) = split_edges_for_link_prediction(
            &ds.graph,
            cfg.linkpred_holdout,
            cfg.seed.wrapping_add(LINKPRED_SPLIT_SALT),
        )
        .map_err(|e| e.in_phase("evaluation"))?;
        ds.graph = train;
        linkpred_edges = Some((pos, neg));
    }

    // Phase 1: fusion (skipped entirely for featureless datasets).
    let has_features = ds
        .features
        .as_ref()
        .map(|x| x.nrows() > 0 && x.ncols() > 0)
        .unwrap_or(false);
    let fusion_start = Instant::now();
    let fused = if has_features {
        let fcfg = FusionConfig {
            beta: cfg.beta,
            knn_k: cfg.knn_k,
            target_cluster_size: cfg.target_cluster_size,
        };
        fcfg.validate().map_err(|e| e.in_phase("fusion"))?;
        let x = ds.features.as_ref().unwrap();
        let partition = cluster_for_knn(
            &ds.graph,
            fcfg.target_cluster_size,
            cfg.seed.wrapping_add(FUSION_SEED_SALT),
        )
        .map_err(|e| e.in_phase("fusion"))?;
        let a_feat =
            knn_attribute_graph(x, &partition, fcfg.knn_k).map_err(|e| e.in_phase("fusion"))?;
        fuse(&ds.graph, &a_feat, fcfg.beta).map_err(|e| e.in_phase("fusion"))?
    } else {
        ds.graph.clone()
    };
    timings.fusion = if has_features {
        fusion_start.elapsed().as_secs_f64()
    } else {
        0.0
    };

    // Phase 2: coarsening hierarchy (plus feature propagation per level).
    let coarsen_start = Instant::now();
    let coarsen_cfg = CoarsenConfig {
        levels: cfg.levels,
        ..cfg.coarsen.clone()
    };
    let mut hierarchy =
        build_hierarchy(&fused, &coarsen_cfg, cfg.seed).map_err(|e| e.in_phase("coarsening"))?;
    if has_features {
        hierarchy
            .attach_features(ds.features.clone().unwrap())
            .map_err(|e| e.in_phase("coarsening"))?;
    }
    timings.coarsening = coarsen_start.elapsed().as_secs_f64();

    // Phase 3: embed the coarsest graph.
    let embed_start = Instant::now();
    let coarsest = hierarchy.coarsest();
    let e_coarse = match cfg.kernel {
        KernelChoice::DeepWalk => {
            let dw = DeepWalkConfig {
                dim: cfg.dim,
                seed: cfg.seed,
                ..cfg.deepwalk.clone()
            };
            deepwalk_embed(coarsest, &dw)
        }
        KernelChoice::Spectral => spectral_embed(coarsest, cfg.dim, cfg.seed),
    }
    .map_err(|e| e.in_phase("embedding"))?;
    validate_embedding(coarsest, &e_coarse).map_err(|e| e.in_phase("embedding"))?;
    timings.embedding = embed_start.elapsed().as_secs_f64();

    // Phase 4: refine back to the original graph.
    let refine_start = Instant::now();
    let filter_cfg = FilterConfig {
        sigma: cfg.sigma,
        power: cfg.filter_power,
    };
    let embeddings =
        refine_all(&hierarchy, &e_coarse, &filter_cfg).map_err(|e| e.in_phase("refinement"))?;
    timings.refinement = refine_start.elapsed().as_secs_f64();

    // Evaluation.
    let mut accuracy = None;
    let mut accuracy_std = None;
    let mut micro_f1 = None;
    let mut micro_f1_std = None;
    let mut auc = None;
    match cfg.task {
        Task::Classify => {
            let labels = ds.labels.as_ref().ok_or_else(|| {
                Error::Validation("classify task needs labels".into()).in_phase("evaluation")
            })?;
            let mut accs = Vec::with_capacity(cfg.trials);
            let mut f1s = Vec::with_capacity(cfg.trials);
            for trial in 0..cfg.trials as u64 {
                let (train_idx, test_idx) = match (&ds.train_mask, &ds.test_mask) {
                    (Some(tr), Some(te)) => (tr.clone(), te.clone()),
                    _ => stratified_split(labels, cfg.train_fraction, cfg.seed.wrapping_add(trial)),
                };
                let model = train_classifier(
                    &embeddings,
                    labels,
                    &train_idx,
                    cfg.seed.wrapping_add(1000 + trial),
                )
                .map_err(|e| e.in_phase("evaluation"))?;
                let (acc, f1) = evaluate_classification(&model, &embeddings, labels, &test_idx)
                    .map_err(|e| e.in_phase("evaluation"))?;
                accs.push(acc);
                f1s.push(f1);
            }
            let (am, astd) = mean_and_std(&accs);
            let (fm, fstd) = mean_and_std(&f1s);
            accuracy = Some(am);
            accuracy_std = Some(astd);
            micro_f1 = Some(fm);
            micro_f1_std = Some(fstd);
        }
        Task::LinkPred => {
            let (pos, neg) = linkpred_edges.as_ref().expect("split prepared above");
            let score = link_prediction_auc(
                &embeddings,
                pos,
                neg,
                cfg.seed.wrapping_add(LINKPRED_EVAL_SALT),
            )
            .map_err(|e| e.in_phase("evaluation"))?;
            auc = Some(score);
        }
        Task::EmbedOnly => {}
    }

    timings.total = total_start.elapsed().as_secs_f64();
    let report = EvalReport {
        accuracy,
        accuracy_std,
        micro_f1,
        micro_f1_std,
        auc,
        fusion_skipped: !has_features,
        level_node_counts: hierarchy.node_counts(),
        timings,
        config: cfg.summary_json(),
    };

    if let Some(path) = &cfg.out_embeddings {
        save_embeddings_csv(&embeddings, path).map_err(|e| e.in_phase("output"))?;
    }
    if let Some(path) = &cfg.out_report {
        std::fs::write(path, report.to_json()).map_err(|e| {
            Error::Io {
                path: path.display().to_string(),
                source: e,
            }
            .in_phase("output")
        })?;
    }

    Ok(PipelineOutput { report, embeddings })
}

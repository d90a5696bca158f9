//! Multi-level spectral graph embedding.
//!
//! The pipeline has four phases: fuse node attributes with topology into a
//! weighted graph, spectrally coarsen the fused graph into a hierarchy of
//! smaller graphs, embed the coarsest graph with a pluggable unsupervised
//! kernel, then project the embeddings back level by level while smoothing
//! them with a low-pass graph filter. An evaluation harness measures node
//! classification accuracy, micro-F1, and link prediction AUC.

pub mod coarsening;
pub mod embed;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod graph;
pub mod io;
pub mod pipeline;
pub mod refine;

pub use coarsening::{
    build_hierarchy, coarse_laplacian, coarsen_once, gauss_seidel_sweep, node_affinity,
    propagate_features, smooth_test_vectors, CoarsenConfig, Hierarchy, MappingOperator,
    TestVectors,
};
pub use embed::{
    deepwalk_embed, spectral_embed, DeepWalkConfig, DeepWalkKernel, EmbeddingKernel,
    SpectralKernel,
};
pub use error::{Error, Result};
pub use eval::{
    auc_from_scores, evaluate_classification, link_prediction_auc, stratified_split,
    train_classifier, ClassifierModel, EvalReport, PhaseTimings,
};
pub use fusion::{cluster_for_knn, cosine_weight, fuse, knn_attribute_graph, FusionConfig};
pub use graph::{EmbeddingMatrix, FeatureMatrix, Graph, SparseSymMatrix};
pub use io::{
    generate_sbm, load_edge_list, load_features_csv, save_embeddings_csv, Dataset, SbmSpec,
};
pub use pipeline::{
    run_pipeline, InputSource, KernelChoice, PipelineConfig, PipelineOutput, Task,
};
pub use refine::{filter_refine, project, refine_all, tikhonov_exact, FilterConfig};

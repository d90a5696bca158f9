//! Pluggable unsupervised embedding kernels for the coarsest graph.
//!
//! Ships two built-ins: a DeepWalk-style kernel (weighted random walks feeding
//! a skip-gram model trained with negative sampling) and a cheap spectral
//! kernel (orthonormalized smoothed random vectors). Both ignore node
//! features; the trait passes them through for kernels that want them.

use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::coarsening::smooth_test_vectors;
use crate::error::{Error, Result};
use crate::graph::{EmbeddingMatrix, FeatureMatrix, Graph};

/// An unsupervised embedding method applied to one graph. Implementations
/// must return one row per node, all entries finite, and be deterministic
/// for a fixed configuration in single-threaded mode.
pub trait EmbeddingKernel {
    fn name(&self) -> &'static str;
    fn embed(&self, g: &Graph, features: Option<&FeatureMatrix>) -> Result<EmbeddingMatrix>;
}

/// Verify the kernel output contract: shape and finiteness.
pub fn validate_embedding(g: &Graph, e: &EmbeddingMatrix) -> Result<()> {
    if e.nrows() != g.num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "kernel produced {} rows for a graph with {} nodes",
            e.nrows(),
            g.num_nodes()
        )));
    }
    if e.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation("kernel produced non-finite values".into()));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct DeepWalkConfig {
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub window: usize,
    pub dim: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    /// Initial learning rate; decays linearly over all training pairs.
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for DeepWalkConfig {
    fn default() -> Self {
        DeepWalkConfig {
            walks_per_node: 10,
            walk_length: 80,
            window: 10,
            dim: 128,
            negative_samples: 5,
            epochs: 1,
            learning_rate: 0.025,
            seed: 42,
        }
    }
}

impl DeepWalkConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("walks_per_node", self.walks_per_node),
            ("walk_length", self.walk_length),
            ("window", self.window),
            ("dim", self.dim),
            ("negative_samples", self.negative_samples),
            ("epochs", self.epochs),
        ];
        for (name, v) in fields {
            if v == 0 {
                return Err(Error::Validation(format!("{name} must be positive")));
            }
        }
        if self.learning_rate <= 0.0 {
            return Err(Error::Validation("learning_rate must be positive".into()));
        }
        Ok(())
    }
}

/// Mean skip-gram loss near the start and end of training; used to check
/// that optimization makes progress.
#[derive(Debug, Clone, Copy)]
pub struct DeepWalkStats {
    pub early_loss: f64,
    pub late_loss: f64,
    pub pairs_trained: usize,
}

/// Per-node cumulative edge weights for O(log deg) weighted neighbor draws.
struct WalkTable {
    neighbors: Vec<Vec<usize>>,
    cumwts: Vec<Vec<f64>>,
}

impl WalkTable {
    fn new(g: &Graph) -> Self {
        let n = g.num_nodes();
        let mut neighbors = Vec::with_capacity(n);
        let mut cumwts = Vec::with_capacity(n);
        for u in 0..n {
            let mut nb = Vec::new();
            let mut cw = Vec::new();
            let mut acc = 0.0;
            for (v, w) in g.neighbors(u) {
                acc += w;
                nb.push(v);
                cw.push(acc);
            }
            neighbors.push(nb);
            cumwts.push(cw);
        }
        WalkTable { neighbors, cumwts }
    }

    /// Next step from `u` with probability proportional to edge weight, or
    /// None when `u` has no neighbors.
    fn step(&self, u: usize, rng: &mut ChaCha8Rng) -> Option<usize> {
        let cw = &self.cumwts[u];
        let total = *cw.last()?;
        let r = rng.random::<f64>() * total;
        let idx = cw.partition_point(|&c| c <= r).min(cw.len() - 1);
        Some(self.neighbors[u][idx])
    }
}

/// Generate `walks_per_node` weighted random walks from every node. Node
/// order is reshuffled before each round. Walks stop early at dead ends.
pub fn generate_walks(g: &Graph, cfg: &DeepWalkConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let n = g.num_nodes();
    let table = WalkTable::new(g);
    let mut walks = Vec::with_capacity(n * cfg.walks_per_node);
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..cfg.walks_per_node {
        order.shuffle(rng);
        for &start in &order {
            let mut walk = Vec::with_capacity(cfg.walk_length);
            walk.push(start);
            let mut cur = start;
            while walk.len() < cfg.walk_length {
                match table.step(cur, rng) {
                    Some(next) => {
                        walk.push(next);
                        cur = next;
                    }
                    None => break,
                }
            }
            walks.push(walk);
        }
    }
    walks
}

/// Cumulative unigram^{0.75} distribution over corpus tokens.
struct NegativeTable {
    cdf: Vec<f64>,
}

impl NegativeTable {
    fn new(n: usize, walks: &[Vec<usize>]) -> Self {
        let mut counts = vec![0usize; n];
        for walk in walks {
            for &node in walk {
                counts[node] += 1;
            }
        }
        let mut cdf = Vec::with_capacity(n);
        let mut acc = 0.0;
        for c in counts {
            acc += (c as f64).powf(0.75);
            cdf.push(acc);
        }
        NegativeTable { cdf }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let total = *self.cdf.last().unwrap();
        let r = rng.random::<f64>() * total;
        self.cdf.partition_point(|&c| c <= r).min(self.cdf.len() - 1)
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x.clamp(-30.0, 30.0)).exp())
}

/// DeepWalk embedding plus optimization statistics.
pub fn deepwalk_embed_with_stats(
    g: &Graph,
    cfg: &DeepWalkConfig,
) -> Result<(EmbeddingMatrix, DeepWalkStats)> {
    cfg.validate()?;
    let n = g.num_nodes();
    if n == 0 {
        return Err(Error::Validation("cannot embed an empty graph".into()));
    }
    let dim = cfg.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let walks = generate_walks(g, cfg, &mut rng);
    let negatives = NegativeTable::new(n, &walks);

    // Input vectors start small and random; output vectors start at zero.
    let mut w_in: Vec<f64> = (0..n * dim)
        .map(|_| rng.random_range(-0.5..0.5) / dim as f64)
        .collect();
    let mut w_out = vec![0.0f64; n * dim];

    let pairs_per_epoch: usize = walks
        .iter()
        .map(|walk| {
            let len = walk.len();
            (0..len)
                .map(|c| {
                    let lo = c.saturating_sub(cfg.window);
                    let hi = (c + cfg.window).min(len - 1);
                    hi - lo
                })
                .sum::<usize>()
        })
        .sum();
    let total_pairs = pairs_per_epoch * cfg.epochs;
    if total_pairs == 0 {
        // No co-occurrences (e.g. edgeless graph): random init is the result.
        let e = Array2::from_shape_vec((n, dim), w_in)
            .map_err(|e| Error::Validation(format!("embedding shape: {e}")))?;
        return Ok((
            e,
            DeepWalkStats {
                early_loss: 0.0,
                late_loss: 0.0,
                pairs_trained: 0,
            },
        ));
    }

    let band = (total_pairs / 10).max(1);
    let mut early_loss = 0.0;
    let mut early_count = 0usize;
    let mut late_loss = 0.0;
    let mut late_count = 0usize;

    let mut processed = 0usize;
    let mut grad_in = vec![0.0f64; dim];
    for _ in 0..cfg.epochs {
        for walk in &walks {
            let len = walk.len();
            for c in 0..len {
                let center = walk[c];
                let lo = c.saturating_sub(cfg.window);
                let hi = (c + cfg.window).min(len - 1);
                for (offset, &context) in walk[lo..=hi].iter().enumerate() {
                    if lo + offset == c {
                        continue;
                    }
                    let frac = processed as f64 / total_pairs as f64;
                    let lr = cfg.learning_rate * (1.0 - frac).max(1e-4);

                    let h = center * dim;
                    grad_in.iter_mut().for_each(|v| *v = 0.0);
                    let mut pair_loss = 0.0;
                    for k in 0..=cfg.negative_samples {
                        let (target, label) = if k == 0 {
                            (context, 1.0)
                        } else {
                            let s = negatives.sample(&mut rng);
                            if s == context {
                                continue;
                            }
                            (s, 0.0)
                        };
                        let o = target * dim;
                        let mut f = 0.0;
                        for d in 0..dim {
                            f += w_in[h + d] * w_out[o + d];
                        }
                        let p = sigmoid(f);
                        pair_loss -= if label > 0.5 {
                            p.max(1e-12).ln()
                        } else {
                            (1.0 - p).max(1e-12).ln()
                        };
                        let gscale = (label - p) * lr;
                        for d in 0..dim {
                            grad_in[d] += gscale * w_out[o + d];
                            w_out[o + d] += gscale * w_in[h + d];
                        }
                    }
                    for d in 0..dim {
                        w_in[h + d] += grad_in[d];
                    }

                    if processed < band {
                        early_loss += pair_loss;
                        early_count += 1;
                    }
                    if processed + band >= total_pairs {
                        late_loss += pair_loss;
                        late_count += 1;
                    }
                    processed += 1;
                }
            }
        }
    }

    let e = Array2::from_shape_vec((n, dim), w_in)
        .map_err(|e| Error::Validation(format!("embedding shape: {e}")))?;
    Ok((
        e,
        DeepWalkStats {
            early_loss: early_loss / early_count.max(1) as f64,
            late_loss: late_loss / late_count.max(1) as f64,
            pairs_trained: processed,
        },
    ))
}

/// DeepWalk: weighted random walks + skip-gram with negative sampling.
/// Returns the input-side vectors.
pub fn deepwalk_embed(g: &Graph, cfg: &DeepWalkConfig) -> Result<EmbeddingMatrix> {
    deepwalk_embed_with_stats(g, cfg).map(|(e, _)| e)
}

/// Project column `j` of `m` against columns `0..j` (assumed orthonormal),
/// twice for numerical stability, and return the residual norm.
fn project_column(m: &mut Array2<f64>, j: usize) -> f64 {
    let n = m.nrows();
    for _ in 0..2 {
        for i in 0..j {
            let mut dot = 0.0;
            for r in 0..n {
                dot += m[(r, j)] * m[(r, i)];
            }
            for r in 0..n {
                let mi = m[(r, i)];
                m[(r, j)] -= dot * mi;
            }
        }
    }
    (0..n).map(|r| m[(r, j)] * m[(r, j)]).sum::<f64>().sqrt()
}

/// Spectral embedding: `d` heavily smoothed random vectors, orthonormalized
/// column by column with re-orthogonalized Gram-Schmidt.
///
/// Smoothing can collapse the columns onto a low-dimensional subspace (the
/// span of per-component constants); once that subspace is exhausted a
/// column's residual is pure rounding noise, so it is replaced by the first
/// canonical basis vector with a usable residual, keeping the columns
/// orthonormal and the matrix full rank for any `d <= n`.
pub fn spectral_embed(g: &Graph, d: usize, seed: u64) -> Result<EmbeddingMatrix> {
    let n = g.num_nodes();
    if d > n {
        return Err(Error::Validation(format!(
            "spectral dimension {d} exceeds node count {n}"
        )));
    }
    let lap = g.laplacian();
    let tv = smooth_test_vectors(&lap, d, 20, seed);
    let mut m = tv.matrix().clone();

    for j in 0..d {
        let orig: f64 = (0..n).map(|r| m[(r, j)] * m[(r, j)]).sum::<f64>().sqrt();
        let mut norm = project_column(&mut m, j);
        if norm <= orig * 1e-10 || norm == 0.0 {
            let mut placed = false;
            for t in 0..n {
                for r in 0..n {
                    m[(r, j)] = if r == t { 1.0 } else { 0.0 };
                }
                norm = project_column(&mut m, j);
                if norm > 1e-6 {
                    placed = true;
                    break;
                }
            }
            debug_assert!(placed, "no canonical vector outside the current span");
        }
        for r in 0..n {
            m[(r, j)] /= norm;
        }
    }
    Ok(m)
}

pub struct DeepWalkKernel {
    pub cfg: DeepWalkConfig,
}

impl EmbeddingKernel for DeepWalkKernel {
    fn name(&self) -> &'static str {
        "deepwalk"
    }

    fn embed(&self, g: &Graph, _features: Option<&FeatureMatrix>) -> Result<EmbeddingMatrix> {
        let e = deepwalk_embed(g, &self.cfg)?;
        validate_embedding(g, &e)?;
        Ok(e)
    }
}

pub struct SpectralKernel {
    pub dim: usize,
    pub seed: u64,
}

impl EmbeddingKernel for SpectralKernel {
    fn name(&self) -> &'static str {
        "spectral"
    }

    fn embed(&self, g: &Graph, _features: Option<&FeatureMatrix>) -> Result<EmbeddingMatrix> {
        let e = spectral_embed(g, self.dim, self.seed)?;
        validate_embedding(g, &e)?;
        Ok(e)
    }
}

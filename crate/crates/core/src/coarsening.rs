//! Spectral coarsening: smoothed test vectors, affinity-driven aggregation,
//! mapping operators, coarse Laplacians, and feature propagation.
//!
//! A coarsening pass embeds every node into a low-dimensional space spanned
//! by a few Gauss-Seidel-smoothed random vectors, then greedily aggregates
//! neighboring nodes whose smoothed rows are strongly correlated. The
//! resulting 0/1 mapping operator H sends fine nodes onto super-nodes;
//! repeated passes build a hierarchy of successively smaller graphs.

use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, Graph, SparseSymMatrix};

/// Tuning knobs for one coarsening pass.
#[derive(Debug, Clone)]
pub struct CoarsenConfig {
    /// Stop aggregating once fine/coarse node ratio reaches this.
    pub gamma_max: f64,
    /// Initial affinity acceptance threshold relative to the local maximum.
    pub delta0: f64,
    /// Multiplicative relaxation of delta per outer iteration.
    pub delta_decay: f64,
    /// Gauss-Seidel sweeps applied to each test vector.
    pub gs_sweeps: usize,
    /// Number of smoothed random test vectors.
    pub num_test_vectors: usize,
    /// Nodes whose degree is at least this multiple of the median neighbor
    /// degree become non-aggregable cluster roots.
    pub degree_outlier_factor: f64,
    /// Number of coarsening levels a hierarchy should attempt.
    pub levels: usize,
}

impl Default for CoarsenConfig {
    fn default() -> Self {
        CoarsenConfig {
            gamma_max: 1.8,
            delta0: 0.9,
            delta_decay: 0.7,
            gs_sweeps: 10,
            num_test_vectors: 8,
            degree_outlier_factor: 8.0,
            levels: 2,
        }
    }
}

impl CoarsenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gamma_max <= 1.0 {
            return Err(Error::Validation("gamma_max must exceed 1".into()));
        }
        if !(self.delta_decay > 0.0 && self.delta_decay < 1.0) {
            return Err(Error::Validation("delta_decay must lie in (0, 1)".into()));
        }
        if self.gs_sweeps == 0 {
            return Err(Error::Validation("gs_sweeps must be >= 1".into()));
        }
        if self.num_test_vectors == 0 {
            return Err(Error::Validation("num_test_vectors must be >= 1".into()));
        }
        Ok(())
    }
}

/// Smoothed random vectors, one row per node, one column per vector.
#[derive(Debug, Clone)]
pub struct TestVectors {
    data: Array2<f64>,
}

impl TestVectors {
    pub fn num_nodes(&self) -> usize {
        self.data.nrows()
    }

    pub fn num_vectors(&self) -> usize {
        self.data.ncols()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.data
    }

    fn copy_row(&mut self, src: usize, dst: usize) {
        let row = self.data.row(src).to_owned();
        self.data.row_mut(dst).assign(&row);
    }
}

/// Random columns in (-1, 1), each shifted to zero mean so it is orthogonal
/// to the all-one vector.
pub fn init_test_vectors(n: usize, t: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Array2::zeros((n, t));
    for k in 0..t {
        let mut mean = 0.0;
        for i in 0..n {
            let v = rng.random_range(-1.0..1.0);
            data[(i, k)] = v;
            mean += v;
        }
        mean /= n as f64;
        for i in 0..n {
            data[(i, k)] -= mean;
        }
    }
    data
}

/// One in-order Gauss-Seidel sweep for `L x = 0`.
///
/// Visits nodes 0..n, replacing `x_p` with the weighted neighbor average
/// implied by row p of the Laplacian. Rows with zero diagonal (isolated
/// nodes) are skipped.
pub fn gauss_seidel_sweep(l: &SparseSymMatrix, x: &mut [f64]) {
    assert_eq!(x.len(), l.dim());
    for p in 0..l.dim() {
        let mut diag = 0.0;
        let mut acc = 0.0;
        for (q, v) in l.row(p) {
            if q == p {
                diag = v;
            } else {
                acc -= v * x[q];
            }
        }
        if diag > 0.0 {
            x[p] = acc / diag;
        }
    }
}

/// Draw `t` mean-free random vectors and smooth each with `sweeps`
/// Gauss-Seidel sweeps on `L x = 0`. Deterministic for a fixed seed.
pub fn smooth_test_vectors(l: &SparseSymMatrix, t: usize, sweeps: usize, seed: u64) -> TestVectors {
    let n = l.dim();
    let mut data = init_test_vectors(n, t, seed);
    let mut col = vec![0.0; n];
    for k in 0..t {
        for i in 0..n {
            col[i] = data[(i, k)];
        }
        for _ in 0..sweeps {
            gauss_seidel_sweep(l, &mut col);
        }
        for i in 0..n {
            data[(i, k)] = col[i];
        }
    }
    TestVectors { data }
}

/// Spectral node affinity: normalized squared correlation of two smoothed
/// rows. Returns 0 when either row is all zero.
pub fn node_affinity(t: &TestVectors, p: usize, q: usize) -> f64 {
    let rp = t.data.row(p);
    let rq = t.data.row(q);
    let mut dot = 0.0;
    let mut np = 0.0;
    let mut nq = 0.0;
    for (a, b) in rp.iter().zip(rq.iter()) {
        dot += a * b;
        np += a * a;
        nq += b * b;
    }
    if np == 0.0 || nq == 0.0 {
        return 0.0;
    }
    (dot * dot) / (np * nq)
}

/// 0/1 aggregation matrix H of shape `n_coarse x n_fine`, stored as the
/// fine-node-to-super-node assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingOperator {
    assignment: Vec<usize>,
    n_coarse: usize,
}

impl MappingOperator {
    pub fn identity(n: usize) -> Self {
        MappingOperator {
            assignment: (0..n).collect(),
            n_coarse: n,
        }
    }

    pub fn from_assignment(assignment: Vec<usize>, n_coarse: usize) -> Result<Self> {
        let mut seen = vec![false; n_coarse];
        for &c in &assignment {
            if c >= n_coarse {
                return Err(Error::Validation(format!(
                    "assignment references super-node {c} >= {n_coarse}"
                )));
            }
            seen[c] = true;
        }
        if let Some(empty) = seen.iter().position(|&s| !s) {
            return Err(Error::Validation(format!("super-node {empty} is empty")));
        }
        Ok(MappingOperator {
            assignment,
            n_coarse,
        })
    }

    pub fn n_fine(&self) -> usize {
        self.assignment.len()
    }

    pub fn n_coarse(&self) -> usize {
        self.n_coarse
    }

    /// Super-node that fine node `u` belongs to.
    pub fn cluster_of(&self, u: usize) -> usize {
        self.assignment[u]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Fine members of every super-node, ascending within each.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.n_coarse];
        for (u, &c) in self.assignment.iter().enumerate() {
            m[c].push(u);
        }
        m
    }
}

enum Flag {
    Unassigned,
    Root,
    Child(usize),
}

/// One spectral coarsening pass: returns the coarse graph and the mapping
/// operator taking fine nodes onto super-nodes.
///
/// Each outer iteration takes an affinity snapshot of every edge from the
/// current test-vector rows, then sweeps nodes in ascending order, merging
/// each eligible node into its best-affinity neighbor's cluster. A merge
/// overwrites the joining node's row with its root's row, so affinities in
/// later iterations measure nodes against cluster representatives; joins
/// that would chain through a node merged in the same iteration are
/// deferred until that snapshot refresh. The acceptance threshold delta
/// relaxes by `delta_decay` per iteration, and the loop exits once the
/// reduction ratio reaches `gamma_max` or an iteration performs no merges.
pub fn coarsen_once(g: &Graph, cfg: &CoarsenConfig, seed: u64) -> Result<(Graph, MappingOperator)> {
    cfg.validate()?;
    let n = g.num_nodes();
    if n == 0 {
        return Err(Error::Validation("cannot coarsen an empty graph".into()));
    }

    let lap = g.laplacian();
    let mut tv = smooth_test_vectors(&lap, cfg.num_test_vectors, cfg.gs_sweeps, seed);

    // Unique undirected non-loop edges with per-node incidence lists.
    let edge_list: Vec<(usize, usize)> = g
        .edges()
        .filter(|&(p, q, _)| p != q)
        .map(|(p, q, _)| (p, q))
        .collect();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (eid, &(p, q)) in edge_list.iter().enumerate() {
        incident[p].push(eid);
        incident[q].push(eid);
    }
    let other = |eid: usize, p: usize| {
        let (a, b) = edge_list[eid];
        if a == p {
            b
        } else {
            a
        }
    };

    // High-degree outliers and isolated nodes become non-aggregable roots.
    let mut z: Vec<Flag> = (0..n)
        .map(|p| {
            if incident[p].is_empty() {
                return Flag::Root;
            }
            let d = g.neighbor_count(p) as f64;
            let mut nd: Vec<usize> = incident[p]
                .iter()
                .map(|&eid| g.neighbor_count(other(eid, p)))
                .collect();
            nd.sort_unstable();
            let mid = nd.len() / 2;
            let median = if nd.len() % 2 == 1 {
                nd[mid] as f64
            } else {
                (nd[mid - 1] + nd[mid]) as f64 / 2.0
            };
            if d >= cfg.degree_outlier_factor * median {
                Flag::Root
            } else {
                Flag::Unassigned
            }
        })
        .collect();

    let mut aff = vec![0.0f64; edge_list.len()];
    let mut n_c = n;
    let mut delta = cfg.delta0;
    let mut gamma = 1.0;
    while gamma < cfg.gamma_max {
        for (eid, &(p, q)) in edge_list.iter().enumerate() {
            aff[eid] = node_affinity(&tv, p, q);
        }
        let child_at_start: Vec<bool> = z.iter().map(|f| matches!(f, Flag::Child(_))).collect();
        let mut merges = 0usize;
        for p in 0..n {
            if !matches!(z[p], Flag::Unassigned) {
                continue;
            }
            if incident[p].is_empty() {
                continue;
            }
            // best-affinity partner, ties to the lower node index
            let mut best_eid = usize::MAX;
            let mut best_q = usize::MAX;
            let mut best_a = f64::NEG_INFINITY;
            for &eid in &incident[p] {
                let q = other(eid, p);
                let a = aff[eid];
                if a > best_a || (a == best_a && q < best_q) {
                    best_a = a;
                    best_q = q;
                    best_eid = eid;
                }
            }
            // strongest affinity among the other edges of p and of its
            // partner; the delta test compares against this local maximum
            let mut local_max: f64 = 0.0;
            for &eid in &incident[p] {
                if eid != best_eid {
                    local_max = local_max.max(aff[eid]);
                }
            }
            for &eid in &incident[best_q] {
                if eid != best_eid {
                    local_max = local_max.max(aff[eid]);
                }
            }
            if best_a < delta * local_max {
                continue;
            }
            let root = match z[best_q] {
                Flag::Unassigned => {
                    z[best_q] = Flag::Root;
                    best_q
                }
                Flag::Root => best_q,
                Flag::Child(r) => {
                    if !child_at_start[best_q] {
                        // merged earlier in this same sweep: its new row is
                        // not in the snapshot yet, so revisit next iteration
                        continue;
                    }
                    r
                }
            };
            z[p] = Flag::Child(root);
            tv.copy_row(root, p);
            n_c -= 1;
            merges += 1;
        }
        gamma = n as f64 / n_c as f64;
        delta *= cfg.delta_decay;
        if merges == 0 {
            break;
        }
    }

    // Roots keep their own id; renumber to dense coarse ids in fine order.
    let mut coarse_id = vec![usize::MAX; n];
    let mut n_coarse = 0;
    for p in 0..n {
        if !matches!(z[p], Flag::Child(_)) {
            coarse_id[p] = n_coarse;
            n_coarse += 1;
        }
    }
    let assignment: Vec<usize> = (0..n)
        .map(|p| match z[p] {
            Flag::Child(r) => coarse_id[r],
            _ => coarse_id[p],
        })
        .collect();
    let h = MappingOperator::from_assignment(assignment, n_coarse)?;

    // Coarse adjacency H A H^T with the intra-cluster diagonal dropped.
    let mut acc: std::collections::BTreeMap<(usize, usize), f64> = std::collections::BTreeMap::new();
    for (p, q, w) in g.edges() {
        let c = h.cluster_of(p);
        let d = h.cluster_of(q);
        if c != d {
            let key = (c.min(d), c.max(d));
            *acc.entry(key).or_insert(0.0) += w;
        }
    }
    let coarse = Graph::from_undirected_entries(n_coarse, acc.into_iter());
    Ok((coarse, h))
}

/// Coarse Laplacian `H L H^T`, computed exactly entry by entry.
pub fn coarse_laplacian(l: &SparseSymMatrix, h: &MappingOperator) -> Result<SparseSymMatrix> {
    if l.dim() != h.n_fine() {
        return Err(Error::DimensionMismatch(format!(
            "Laplacian is {}x{} but mapping operator has {} fine nodes",
            l.dim(),
            l.dim(),
            h.n_fine()
        )));
    }
    let mut rows: Vec<std::collections::BTreeMap<usize, f64>> =
        vec![std::collections::BTreeMap::new(); h.n_coarse()];
    for i in 0..l.dim() {
        let ci = h.cluster_of(i);
        for (j, v) in l.row(i) {
            *rows[ci].entry(h.cluster_of(j)).or_insert(0.0) += v;
        }
    }
    Ok(SparseSymMatrix::from_rows(
        h.n_coarse(),
        rows.into_iter()
            .map(|r| r.into_iter().collect::<Vec<_>>())
            .collect(),
    ))
}

/// Row-averaged feature propagation: each super-node receives the mean of
/// its members' feature rows.
pub fn propagate_features(x: &FeatureMatrix, h: &MappingOperator) -> Result<FeatureMatrix> {
    if x.nrows() != h.n_fine() {
        return Err(Error::DimensionMismatch(format!(
            "feature matrix has {} rows but mapping operator has {} fine nodes",
            x.nrows(),
            h.n_fine()
        )));
    }
    let mut out = Array2::zeros((h.n_coarse(), x.ncols()));
    let mut counts = vec![0usize; h.n_coarse()];
    for u in 0..h.n_fine() {
        let c = h.cluster_of(u);
        counts[c] += 1;
        let mut row = out.row_mut(c);
        row += &x.row(u);
    }
    for (c, &count) in counts.iter().enumerate() {
        let inv = 1.0 / count as f64;
        out.row_mut(c).mapv_inplace(|v| v * inv);
    }
    Ok(out)
}

/// Graphs from fine to coarse with the mapping operators between them, and
/// optionally per-level propagated feature matrices.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub graphs: Vec<Graph>,
    pub operators: Vec<MappingOperator>,
    pub level_features: Option<Vec<FeatureMatrix>>,
}

impl Hierarchy {
    /// Achieved coarsening depth (0 means only the original graph).
    pub fn levels(&self) -> usize {
        self.operators.len()
    }

    pub fn coarsest(&self) -> &Graph {
        self.graphs.last().expect("hierarchy has at least one graph")
    }

    pub fn node_counts(&self) -> Vec<usize> {
        self.graphs.iter().map(|g| g.num_nodes()).collect()
    }

    /// Propagate `x0` through every operator, storing one matrix per level.
    pub fn attach_features(&mut self, x0: FeatureMatrix) -> Result<()> {
        let mut feats = vec![x0];
        for h in &self.operators {
            let next = propagate_features(feats.last().unwrap(), h)?;
            feats.push(next);
        }
        self.level_features = Some(feats);
        Ok(())
    }

    pub fn coarsest_features(&self) -> Option<&FeatureMatrix> {
        self.level_features.as_ref().map(|f| f.last().unwrap())
    }
}

/// Derive a per-level seed so every level draws fresh test vectors.
pub(crate) fn level_seed(seed: u64, level: usize) -> u64 {
    seed.wrapping_add((level as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Apply [`coarsen_once`] up to `cfg.levels` times, stopping early when a
/// pass achieves no reduction.
pub fn build_hierarchy(g: &Graph, cfg: &CoarsenConfig, seed: u64) -> Result<Hierarchy> {
    let mut graphs = vec![g.clone()];
    let mut operators = Vec::new();
    for level in 0..cfg.levels {
        let cur = graphs.last().unwrap();
        let (coarse, h) = coarsen_once(cur, cfg, level_seed(seed, level))?;
        if coarse.num_nodes() == cur.num_nodes() {
            break;
        }
        graphs.push(coarse);
        operators.push(h);
    }
    Ok(Hierarchy {
        graphs,
        operators,
        level_features: None,
    })
}

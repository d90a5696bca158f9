//! Graph fusion: build a kNN attribute graph with cluster-restricted search
//! and combine it with the topology as `A_fusion = A_topo + beta * A_feat`.
//!
//! The kNN search is restricted to clusters obtained by coarsening the
//! topology until the mean cluster size reaches a target, which keeps the
//! construction near-linear in the edge count instead of O(N^2).

use std::collections::BTreeSet;

use crate::coarsening::{coarsen_once, level_seed, CoarsenConfig};
use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, Graph};

#[derive(Debug, Clone)]
pub struct FusionConfig {
    /// Balance between topology and attribute information.
    pub beta: f64,
    /// Neighbors each node selects inside its cluster.
    pub knn_k: usize,
    /// Target mean cluster size for the restricted search.
    pub target_cluster_size: usize,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            beta: 1.0,
            knn_k: 5,
            target_cluster_size: 50,
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.knn_k == 0 {
            return Err(Error::Validation("knn_k must be >= 1".into()));
        }
        if self.target_cluster_size < 2 {
            return Err(Error::Validation("target_cluster_size must be >= 2".into()));
        }
        if self.beta < 0.0 {
            return Err(Error::Validation("beta must be non-negative".into()));
        }
        Ok(())
    }
}

/// Partition the graph by repeated coarsening until the mean cluster size
/// reaches `target_cluster_size` or no pass reduces the graph further.
/// Returns one cluster id per node.
pub fn cluster_for_knn(g: &Graph, target_cluster_size: usize, seed: u64) -> Result<Vec<usize>> {
    let n = g.num_nodes();
    if n == 0 {
        return Err(Error::Validation("cannot cluster an empty graph".into()));
    }
    let cfg = CoarsenConfig::default();
    let mut assignment: Vec<usize> = (0..n).collect();
    let mut cur = g.clone();
    let mut level = 0usize;
    while (n as f64) / (cur.num_nodes() as f64) < target_cluster_size as f64 {
        let (coarse, h) = coarsen_once(&cur, &cfg, level_seed(seed, level))?;
        if coarse.num_nodes() == cur.num_nodes() {
            break;
        }
        for a in assignment.iter_mut() {
            *a = h.cluster_of(*a);
        }
        cur = coarse;
        level += 1;
    }
    Ok(assignment)
}

/// Cosine similarity of two feature rows; 0 when either has zero norm.
pub fn cosine_weight(xi: &[f64], xj: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut ni = 0.0;
    let mut nj = 0.0;
    for (a, b) in xi.iter().zip(xj.iter()) {
        dot += a * b;
        ni += a * a;
        nj += b * b;
    }
    if ni == 0.0 || nj == 0.0 {
        return 0.0;
    }
    dot / (ni.sqrt() * nj.sqrt())
}

/// Build the attribute graph: within each cluster every node selects its k
/// nearest feature rows by Euclidean distance (ties to the lower index), the
/// selection is symmetrized by union, and each kept edge is weighted by the
/// cosine similarity clamped to zero from below. Zero-weight edges vanish.
pub fn knn_attribute_graph(
    x: &FeatureMatrix,
    partition: &[usize],
    k: usize,
) -> Result<Graph> {
    let n = x.nrows();
    if partition.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} nodes but features have {} rows",
            partition.len(),
            n
        )));
    }
    let n_clusters = partition.iter().copied().max().map_or(0, |m| m + 1);
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); n_clusters];
    for (node, &c) in partition.iter().enumerate() {
        clusters[c].push(node);
    }

    let mut selected: BTreeSet<(usize, usize)> = BTreeSet::new();
    for members in &clusters {
        for (ii, &i) in members.iter().enumerate() {
            let mut dists: Vec<(f64, usize)> = Vec::with_capacity(members.len() - 1);
            for (jj, &j) in members.iter().enumerate() {
                if jj == ii {
                    continue;
                }
                let mut d2 = 0.0;
                for (a, b) in x.row(i).iter().zip(x.row(j).iter()) {
                    let diff = a - b;
                    d2 += diff * diff;
                }
                dists.push((d2, j));
            }
            dists.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
            for &(_, j) in dists.iter().take(k) {
                selected.insert((i.min(j), i.max(j)));
            }
        }
    }

    let mut edges = Vec::with_capacity(selected.len());
    for (i, j) in selected {
        let w = cosine_weight(
            x.row(i).as_slice().unwrap(),
            x.row(j).as_slice().unwrap(),
        )
        .max(0.0);
        if w > 0.0 {
            edges.push((i, j, w));
        }
    }
    Graph::from_edges(n, &edges)
}

/// Entrywise weighted sum of two adjacencies over the same node set.
pub fn fuse(a_topo: &Graph, a_feat: &Graph, beta: f64) -> Result<Graph> {
    if a_topo.num_nodes() != a_feat.num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "topology graph has {} nodes, attribute graph has {}",
            a_topo.num_nodes(),
            a_feat.num_nodes()
        )));
    }
    let mut acc: std::collections::BTreeMap<(usize, usize), f64> = std::collections::BTreeMap::new();
    for (u, v, w) in a_topo.edges() {
        *acc.entry((u, v)).or_insert(0.0) += w;
    }
    for (u, v, w) in a_feat.edges() {
        *acc.entry((u, v)).or_insert(0.0) += beta * w;
    }
    Ok(Graph::from_undirected_entries(
        a_topo.num_nodes(),
        acc.into_iter(),
    ))
}

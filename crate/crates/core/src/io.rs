//! Dataset loading, saving, and synthetic stochastic-block-model generation.
//!
//! All formats are plain text:
//! - edge lists: `u v` or `u v w` per line, `#` comments, optional `#nodes N`
//!   header overriding the node count;
//! - features: one CSV row of reals per node;
//! - labels: `node_id,label` per line;
//! - masks: one node id per line;
//! - embeddings: CSV with header `node,e0,...,e{D-1}`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::graph::{EmbeddingMatrix, FeatureMatrix, Graph};

/// A graph plus whatever supervision the source files provided.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub graph: Graph,
    pub features: Option<FeatureMatrix>,
    pub labels: Option<Vec<usize>>,
    pub train_mask: Option<Vec<usize>>,
    pub test_mask: Option<Vec<usize>>,
}

impl Dataset {
    pub fn new(graph: Graph) -> Self {
        Dataset {
            graph,
            features: None,
            labels: None,
            train_mask: None,
            test_mask: None,
        }
    }

    /// Check index ranges, feature row count, and mask disjointness.
    pub fn validate(&self) -> Result<()> {
        let n = self.graph.num_nodes();
        if let Some(x) = &self.features {
            if x.nrows() != 0 && x.nrows() != n {
                return Err(Error::DimensionMismatch(format!(
                    "feature matrix has {} rows but graph has {} nodes",
                    x.nrows(),
                    n
                )));
            }
        }
        if let Some(labels) = &self.labels {
            if labels.len() != n {
                return Err(Error::Validation(format!(
                    "labels cover {} nodes but graph has {}",
                    labels.len(),
                    n
                )));
            }
        }
        for (name, mask) in [("train", &self.train_mask), ("test", &self.test_mask)] {
            if let Some(m) = mask {
                if let Some(&bad) = m.iter().find(|&&i| i >= n) {
                    return Err(Error::Validation(format!(
                        "{name} mask references node {bad} >= {n}"
                    )));
                }
            }
        }
        if let (Some(tr), Some(te)) = (&self.train_mask, &self.test_mask) {
            let set: std::collections::HashSet<usize> = tr.iter().copied().collect();
            if let Some(&bad) = te.iter().find(|i| set.contains(i)) {
                return Err(Error::Validation(format!(
                    "node {bad} appears in both train and test masks"
                )));
            }
        }
        Ok(())
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Load an undirected edge list. Node count is `1 + max id` unless a
/// `#nodes N` header says otherwise.
pub fn load_edge_list(path: &Path) -> Result<Graph> {
    let reader = open(path)?;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut n_override: Option<usize> = None;
    let mut max_id: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some(count) = rest.trim().strip_prefix("nodes") {
                let n: usize = count.trim().parse().map_err(|_| {
                    parse_err(path, lineno, format!("bad node count in header: {rest:?}"))
                })?;
                n_override = Some(n);
            }
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 && tokens.len() != 3 {
            return Err(parse_err(
                path,
                lineno,
                format!("expected 'u v' or 'u v w', got {trimmed:?}"),
            ));
        }
        let u: usize = tokens[0]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad node id {:?}", tokens[0])))?;
        let v: usize = tokens[1]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad node id {:?}", tokens[1])))?;
        let w: f64 = match tokens.get(2) {
            Some(t) => t
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("bad weight {t:?}")))?,
            None => 1.0,
        };
        if !w.is_finite() || w <= 0.0 {
            return Err(Error::Validation(format!(
                "{}:{lineno}: edge weight must be positive, got {w}",
                path.display()
            )));
        }
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        edges.push((u, v, w));
    }
    let n = n_override.unwrap_or(max_id.map_or(0, |m| m + 1));
    Graph::from_edges(n, &edges)
}

/// Load a dense CSV feature matrix; every row must have the same arity and
/// all entries must be finite. An empty file yields a 0x0 matrix.
pub fn load_features_csv(path: &Path) -> Result<FeatureMatrix> {
    let reader = open(path)?;
    let mut values: Vec<f64> = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| parse_err(path, lineno, format!("bad value {t:?}")))
            })
            .collect::<Result<_>>()?;
        if let Some(&bad) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "{}:{lineno}: non-finite feature value {bad}",
                path.display()
            )));
        }
        match cols {
            None => cols = Some(row.len()),
            Some(k) if k != row.len() => {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("ragged row: expected {k} values, got {}", row.len()),
                ));
            }
            _ => {}
        }
        values.extend(row);
        rows += 1;
    }
    let k = cols.unwrap_or(0);
    Array2::from_shape_vec((rows, k), values)
        .map_err(|e| Error::Validation(format!("feature matrix shape: {e}")))
}

/// Load `node_id,label` pairs. Pairing against a graph happens later.
pub fn load_labels_csv(path: &Path) -> Result<Vec<(usize, usize)>> {
    let reader = open(path)?;
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let (a, b) = trimmed
            .split_once(',')
            .ok_or_else(|| parse_err(path, lineno, "expected 'node_id,label'"))?;
        let node: usize = a
            .trim()
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad node id {a:?}")))?;
        let label: usize = b
            .trim()
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad label {b:?}")))?;
        pairs.push((node, label));
    }
    Ok(pairs)
}

/// Densify label pairs onto `0..n`; every node must be covered exactly once.
pub fn labels_to_dense(pairs: &[(usize, usize)], n: usize) -> Result<Vec<usize>> {
    let mut out = vec![usize::MAX; n];
    for &(node, label) in pairs {
        if node >= n {
            return Err(Error::Validation(format!("label for node {node} >= {n}")));
        }
        if out[node] != usize::MAX {
            return Err(Error::Validation(format!("duplicate label for node {node}")));
        }
        out[node] = label;
    }
    if let Some(missing) = out.iter().position(|&l| l == usize::MAX) {
        return Err(Error::Validation(format!("node {missing} has no label")));
    }
    Ok(out)
}

/// Load a newline-separated list of node ids.
pub fn load_mask(path: &Path) -> Result<Vec<usize>> {
    let reader = open(path)?;
    let mut ids = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let id: usize = trimmed
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad node id {trimmed:?}")))?;
        ids.push(id);
    }
    Ok(ids)
}

/// Parameters of a planted-partition benchmark graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmSpec {
    pub n: usize,
    pub blocks: usize,
    pub p_in: f64,
    pub p_out: f64,
    /// Feature dimension K; 0 produces a featureless dataset.
    pub feature_dim: usize,
    /// Std deviation of Gaussian noise added to the one-hot block indicator.
    pub feature_noise: f64,
    pub seed: u64,
}

impl SbmSpec {
    pub fn validate(&self) -> Result<()> {
        if self.blocks == 0 || self.blocks > self.n {
            return Err(Error::Validation(format!(
                "block count {} invalid for {} nodes",
                self.blocks, self.n
            )));
        }
        if !(0.0..=1.0).contains(&self.p_out)
            || !(0.0..=1.0).contains(&self.p_in)
            || self.p_out > self.p_in
        {
            return Err(Error::Validation(format!(
                "need 0 <= p_out <= p_in <= 1, got p_in={} p_out={}",
                self.p_in, self.p_out
            )));
        }
        Ok(())
    }

    /// Block of node `i`: equal-size blocks of `n / b`, remainder in the last.
    pub fn block_of(&self, i: usize) -> usize {
        let base = self.n / self.blocks;
        (i / base).min(self.blocks - 1)
    }
}

/// Generate a stochastic block model dataset. Deterministic for a fixed seed:
/// edges are drawn in `(u, v)` lexicographic order, then features row-major.
pub fn generate_sbm(spec: &SbmSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let labels: Vec<usize> = (0..spec.n).map(|i| spec.block_of(i)).collect();

    let mut edges = Vec::new();
    for u in 0..spec.n {
        for v in (u + 1)..spec.n {
            let p = if labels[u] == labels[v] {
                spec.p_in
            } else {
                spec.p_out
            };
            if p > 0.0 && rng.random::<f64>() < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    let graph = Graph::from_edges(spec.n, &edges)?;

    let features = if spec.feature_dim > 0 {
        let mut x = Array2::zeros((spec.n, spec.feature_dim));
        for i in 0..spec.n {
            if labels[i] < spec.feature_dim {
                x[(i, labels[i])] = 1.0;
            }
        }
        if spec.feature_noise > 0.0 {
            let normal = Normal::new(0.0, spec.feature_noise)
                .map_err(|e| Error::Validation(format!("feature noise: {e}")))?;
            for i in 0..spec.n {
                for k in 0..spec.feature_dim {
                    x[(i, k)] += normal.sample(&mut rng);
                }
            }
        }
        Some(x)
    } else {
        None
    };

    Ok(Dataset {
        graph,
        features,
        labels: Some(labels),
        train_mask: None,
        test_mask: None,
    })
}

/// Write embeddings as CSV with header `node,e0,...,e{D-1}`. Values use the
/// shortest representation that round-trips exactly.
pub fn save_embeddings_csv(e: &EmbeddingMatrix, path: &Path) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source: e,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    let mut header = String::from("node");
    for d in 0..e.ncols() {
        header.push_str(&format!(",e{d}"));
    }
    writeln!(w, "{header}").map_err(io_err)?;
    for (i, row) in e.rows().into_iter().enumerate() {
        let mut line = i.to_string();
        for v in row.iter() {
            line.push(',');
            line.push_str(&v.to_string());
        }
        writeln!(w, "{line}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Read embeddings written by [`save_embeddings_csv`].
pub fn load_embeddings_csv(path: &Path) -> Result<EmbeddingMatrix> {
    let reader = open(path)?;
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing header"))?;
    let header = header.map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    if !header.starts_with("node") {
        return Err(parse_err(path, 1, "expected 'node,e0,...' header"));
    }
    let dim = header.split(',').count() - 1;
    let mut values = Vec::new();
    let mut rows = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim + 1 {
            return Err(parse_err(path, lineno, "wrong number of fields"));
        }
        for t in &fields[1..] {
            let v: f64 = t
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("bad value {t:?}")))?;
            values.push(v);
        }
        rows += 1;
    }
    Array2::from_shape_vec((rows, dim), values)
        .map_err(|e| Error::Validation(format!("embedding shape: {e}")))
}

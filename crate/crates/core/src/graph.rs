//! Sparse symmetric graph storage and the Laplacian / filter operators built on it.
//!
//! Both [`Graph`] and [`SparseSymMatrix`] use a CSR-like layout with sorted
//! column indices per row. A `Graph` stores a non-negative adjacency (diagonal
//! entries only when self-loops were constructed explicitly); a
//! `SparseSymMatrix` stores general symmetric matrices such as Laplacians,
//! where off-diagonals may be negative and the diagonal is explicit.

use std::collections::BTreeMap;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Dense node feature matrix X (one row per node).
pub type FeatureMatrix = Array2<f64>;

/// Dense node embedding matrix E (one row per node).
pub type EmbeddingMatrix = Array2<f64>;

/// Undirected weighted graph over nodes `0..n` in compressed sparse row form.
///
/// Symmetric by construction: every off-diagonal entry is stored in both
/// incident rows. Weights are strictly positive (zero entries are absent).
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    wts: Vec<f64>,
}

impl Graph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            row_ptr: vec![0; n + 1],
            cols: Vec::new(),
            wts: Vec::new(),
        }
    }

    /// Build a graph from an undirected edge list.
    ///
    /// An input pair `(u, v)` and its reverse `(v, u)` name the same
    /// undirected edge; duplicate occurrences are summed into a single edge,
    /// so the result does not depend on input order. `(u, u)` constructs an
    /// explicit self-loop.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
        for &(u, v, w) in edges {
            if u >= n {
                return Err(Error::NodeOutOfRange { id: u, n });
            }
            if v >= n {
                return Err(Error::NodeOutOfRange { id: v, n });
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::NonPositiveWeight(w));
            }
            let key = (u.min(v), u.max(v));
            acc.entry(key).or_default().push(w);
        }
        // sum duplicates in value order so the result is bit-identical under
        // any permutation of the input lines
        let entries = acc.into_iter().map(|(key, mut ws)| {
            ws.sort_unstable_by(f64::total_cmp);
            (key, ws.iter().sum::<f64>())
        });
        Ok(Self::from_undirected_entries(n, entries))
    }

    /// Assemble CSR from unique undirected entries keyed by `(min, max)`.
    /// Entries with weight exactly zero are dropped.
    pub(crate) fn from_undirected_entries<I>(n: usize, entries: I) -> Self
    where
        I: Iterator<Item = ((usize, usize), f64)>,
    {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for ((u, v), w) in entries {
            if w == 0.0 {
                continue;
            }
            rows[u].push((v, w));
            if u != v {
                rows[v].push((u, w));
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut wts = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_unstable_by_key(|&(c, _)| c);
            for (c, w) in row {
                cols.push(c);
                wts.push(w);
            }
            row_ptr.push(cols.len());
        }
        Graph {
            n,
            row_ptr,
            cols,
            wts,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    /// Number of undirected edges (self-loops count once).
    pub fn num_edges(&self) -> usize {
        let loops = (0..self.n)
            .map(|u| self.neighbors(u).filter(|&(v, _)| v == u).count())
            .sum::<usize>();
        (self.cols.len() - loops) / 2 + loops
    }

    /// Stored neighbors of `u` with weights, in ascending column order.
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[u];
        let hi = self.row_ptr[u + 1];
        self.cols[lo..hi]
            .iter()
            .copied()
            .zip(self.wts[lo..hi].iter().copied())
    }

    /// Number of stored entries in row `u` (unweighted degree; a self-loop
    /// counts once).
    pub fn neighbor_count(&self, u: usize) -> usize {
        self.row_ptr[u + 1] - self.row_ptr[u]
    }

    /// Weighted degree: sum of incident edge weights (self-loop counted once).
    pub fn degree(&self, u: usize) -> f64 {
        self.neighbors(u).map(|(_, w)| w).sum()
    }

    pub fn weighted_degrees(&self) -> Vec<f64> {
        (0..self.n).map(|u| self.degree(u)).collect()
    }

    /// Weight of edge `(u, v)` or 0.0 when absent.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        let lo = self.row_ptr[u];
        let hi = self.row_ptr[u + 1];
        match self.cols[lo..hi].binary_search(&v) {
            Ok(k) => self.wts[lo + k],
            Err(_) => 0.0,
        }
    }

    /// Unique undirected edges as `(u, v, w)` with `u <= v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| v >= u)
                .map(move |(v, w)| (u, v, w))
        })
    }

    /// Connected component id per node (BFS order, ids dense from 0).
    pub fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut queue = std::collections::VecDeque::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for (v, _) in self.neighbors(u) {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Combinatorial Laplacian L = D - A with D the weighted degree matrix.
    pub fn laplacian(&self) -> SparseSymMatrix {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.n];
        for (u, row) in rows.iter_mut().enumerate() {
            let mut diag = 0.0;
            let mut self_w = 0.0;
            for (v, w) in self.neighbors(u) {
                diag += w;
                if v == u {
                    self_w = w;
                } else {
                    row.push((v, -w));
                }
            }
            let d = diag - self_w;
            if d != 0.0 {
                row.push((u, d));
            }
        }
        SparseSymMatrix::from_rows(self.n, rows)
    }

    /// Normalized filter matrix `D~^{-1/2} A~ D~^{-1/2}` with `A~ = A + sigma*I`.
    ///
    /// Errors with [`Error::DegenerateNode`] when `sigma == 0` and some node
    /// is isolated, since its augmented degree would be zero.
    pub fn normalized_filter_matrix(&self, sigma: f64) -> Result<SparseSymMatrix> {
        let mut deg = self.weighted_degrees();
        for (u, d) in deg.iter_mut().enumerate() {
            *d += sigma;
            if *d <= 0.0 {
                return Err(Error::DegenerateNode(u));
            }
        }
        let inv_sqrt: Vec<f64> = deg.iter().map(|d| 1.0 / d.sqrt()).collect();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.n];
        for u in 0..self.n {
            let mut diag = sigma;
            for (v, w) in self.neighbors(u) {
                if v == u {
                    diag += w;
                } else {
                    rows[u].push((v, w * inv_sqrt[u] * inv_sqrt[v]));
                }
            }
            if diag != 0.0 {
                rows[u].push((u, diag * inv_sqrt[u] * inv_sqrt[u]));
            }
        }
        Ok(SparseSymMatrix::from_rows(self.n, rows))
    }
}

/// Symmetric sparse matrix in CSR form with explicit diagonal entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSymMatrix {
    /// Assemble from per-row entry lists; entries are sorted and exact zeros
    /// dropped.
    pub(crate) fn from_rows(n: usize, mut rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows.iter_mut() {
            row.sort_unstable_by_key(|&(c, _)| c);
            for &(c, v) in row.iter() {
                if v != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseSymMatrix {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of row `i` as `(col, value)`, ascending columns.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.cols[lo..hi]
            .iter()
            .copied()
            .zip(self.vals[lo..hi].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.cols[lo..hi].binary_search(&j) {
            Ok(k) => self.vals[lo + k],
            Err(_) => 0.0,
        }
    }

    /// y = M x
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, v) in self.row(i) {
                acc += v * x[j];
            }
            *out = acc;
        }
    }

    /// x^T M x
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                acc += x[i] * v * x[j];
            }
        }
        acc
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut m = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }
}

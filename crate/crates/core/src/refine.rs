//! Embedding refinement: project coarse embeddings up one level, then smooth
//! them with the low-pass filter `(D~^{-1/2} A~ D~^{-1/2})^k`, `A~ = A + sigma*I`.
//!
//! [`tikhonov_exact`] solves the underlying regularized objective directly
//! with a dense factorization; it is capped to small instances and exists to
//! verify that the polynomial filter moves embeddings the same way.

use nalgebra::DMatrix;
use ndarray::Array2;

use crate::coarsening::{Hierarchy, MappingOperator};
use crate::error::{Error, Result};
use crate::graph::{EmbeddingMatrix, Graph};

/// Node budget for the dense exact solver.
pub const TIKHONOV_MAX_NODES: usize = 500;

#[derive(Debug, Clone, Copy)]
pub struct FilterConfig {
    /// Self-loop weight added to every node before normalization.
    pub sigma: f64,
    /// Number of filter applications.
    pub power: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            sigma: 2.0,
            power: 2,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sigma < 0.0 {
            return Err(Error::Validation("sigma must be non-negative".into()));
        }
        Ok(())
    }
}

/// Project coarse embeddings through `H^T`: every fine node receives its
/// super-node's row unchanged.
pub fn project(e_coarse: &EmbeddingMatrix, h: &MappingOperator) -> Result<EmbeddingMatrix> {
    if e_coarse.nrows() != h.n_coarse() {
        return Err(Error::DimensionMismatch(format!(
            "embedding has {} rows but operator has {} super-nodes",
            e_coarse.nrows(),
            h.n_coarse()
        )));
    }
    let mut out = Array2::zeros((h.n_fine(), e_coarse.ncols()));
    for u in 0..h.n_fine() {
        out.row_mut(u).assign(&e_coarse.row(h.cluster_of(u)));
    }
    Ok(out)
}

/// Smooth embeddings with `k` sparse applications of the normalized filter;
/// the k-th matrix power is never materialized.
pub fn filter_refine(
    g: &Graph,
    e_hat: &EmbeddingMatrix,
    cfg: &FilterConfig,
) -> Result<EmbeddingMatrix> {
    cfg.validate()?;
    if e_hat.nrows() != g.num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "embedding has {} rows but graph has {} nodes",
            e_hat.nrows(),
            g.num_nodes()
        )));
    }
    if cfg.power == 0 {
        return Ok(e_hat.clone());
    }
    let s = g.normalized_filter_matrix(cfg.sigma)?;
    let n = g.num_nodes();
    let d = e_hat.ncols();
    let mut cur = e_hat.clone();
    let mut next = Array2::zeros((n, d));
    for _ in 0..cfg.power {
        next.fill(0.0);
        for i in 0..n {
            let mut out_row = next.row_mut(i);
            for (j, v) in s.row(i) {
                out_row.scaled_add(v, &cur.row(j));
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(cur)
}

/// Regularized objective `||E - E_hat||_F^2 + tr(E^T L E)` with L = D - A
/// the graph Laplacian of `g`; the trace term is the Dirichlet energy.
pub fn tikhonov_objective(g: &Graph, e: &EmbeddingMatrix, e_hat: &EmbeddingMatrix) -> f64 {
    let l = g.laplacian();
    let diff = e - e_hat;
    let fidelity: f64 = diff.iter().map(|v| v * v).sum();
    let mut smooth = 0.0;
    let mut col = vec![0.0; g.num_nodes()];
    let mut out = vec![0.0; g.num_nodes()];
    for k in 0..e.ncols() {
        for i in 0..g.num_nodes() {
            col[i] = e[(i, k)];
        }
        l.matvec(&col, &mut out);
        smooth += col.iter().zip(out.iter()).map(|(a, b)| a * b).sum::<f64>();
    }
    fidelity + smooth
}

/// Solve `(I + L) E = E_hat` exactly with a dense Cholesky factorization,
/// L = D - A. Isolated nodes have a zero Laplacian row, so their rows pass
/// through unchanged. Refuses instances above [`TIKHONOV_MAX_NODES`].
pub fn tikhonov_exact(g: &Graph, e_hat: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
    let n = g.num_nodes();
    if n > TIKHONOV_MAX_NODES {
        return Err(Error::InstanceTooLarge {
            n,
            max: TIKHONOV_MAX_NODES,
        });
    }
    if e_hat.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "embedding has {} rows but graph has {} nodes",
            e_hat.nrows(),
            n
        )));
    }
    let l = g.laplacian();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = 1.0;
        for (j, v) in l.row(i) {
            m[(i, j)] += v;
        }
    }
    let chol = nalgebra::Cholesky::new(m)
        .ok_or_else(|| Error::Validation("I + L is not positive definite".into()))?;
    let d = e_hat.ncols();
    let mut rhs = DMatrix::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            rhs[(i, j)] = e_hat[(i, j)];
        }
    }
    let sol = chol.solve(&rhs);
    Ok(Array2::from_shape_fn((n, d), |(i, j)| sol[(i, j)]))
}

/// Walk the hierarchy from coarsest to finest, projecting and filtering at
/// every level. A zero-level hierarchy returns the input unchanged.
pub fn refine_all(
    h: &Hierarchy,
    e_coarsest: &EmbeddingMatrix,
    cfg: &FilterConfig,
) -> Result<EmbeddingMatrix> {
    if e_coarsest.nrows() != h.coarsest().num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "embedding has {} rows but coarsest graph has {} nodes",
            e_coarsest.nrows(),
            h.coarsest().num_nodes()
        )));
    }
    let mut e = e_coarsest.clone();
    for i in (0..h.operators.len()).rev() {
        let projected = project(&e, &h.operators[i])?;
        e = filter_refine(&h.graphs[i], &projected, cfg)?;
    }
    Ok(e)
}

//! Evaluation harness: one-vs-rest logistic regression on frozen embeddings,
//! accuracy / micro-F1, link prediction AUC from Hadamard edge features, and
//! per-phase wall-clock timing for the pipeline report.

use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::EmbeddingMatrix;

const L2_PENALTY: f64 = 1e-4;
const GD_EPOCHS: usize = 200;
const GD_LEARNING_RATE: f64 = 0.5;

/// One-vs-rest linear classifier; one weight vector (with bias) per class.
#[derive(Debug, Clone)]
pub struct ClassifierModel {
    /// Class ids present in the training set, ascending.
    pub classes: Vec<usize>,
    /// `classes.len()` x `(dim + 1)` weights; last column is the bias.
    pub weights: Array2<f64>,
}

/// Full-batch gradient descent on the regularized logistic loss.
/// `xs` rows are feature vectors, `ys` are 0/1 targets.
fn train_binary_logistic(xs: &Array2<f64>, ys: &[f64], seed: u64) -> Array1<f64> {
    let n = xs.nrows();
    let d = xs.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Array1::from_shape_fn(d + 1, |_| rng.random_range(-0.01..0.01));
    let inv_n = 1.0 / n as f64;
    let mut grad = Array1::zeros(d + 1);
    for _ in 0..GD_EPOCHS {
        grad.fill(0.0);
        for (i, row) in xs.rows().into_iter().enumerate() {
            let mut z = w[d];
            for (k, x) in row.iter().enumerate() {
                z += w[k] * x;
            }
            let p = 1.0 / (1.0 + (-z.clamp(-30.0, 30.0)).exp());
            let err = (p - ys[i]) * inv_n;
            for (k, x) in row.iter().enumerate() {
                grad[k] += err * x;
            }
            grad[d] += err;
        }
        for k in 0..d {
            grad[k] += L2_PENALTY * w[k];
        }
        w.scaled_add(-GD_LEARNING_RATE, &grad);
    }
    w
}

fn logit(w: &ndarray::ArrayView1<f64>, x: &ndarray::ArrayView1<f64>) -> f64 {
    let d = x.len();
    let mut z = w[d];
    for k in 0..d {
        z += w[k] * x[k];
    }
    z
}

/// Train a one-vs-rest logistic regression on the rows of `e` selected by
/// `train_idx`. Needs at least two classes in the training set.
pub fn train_classifier(
    e: &EmbeddingMatrix,
    labels: &[usize],
    train_idx: &[usize],
    seed: u64,
) -> Result<ClassifierModel> {
    if train_idx.is_empty() {
        return Err(Error::Validation("empty training set".into()));
    }
    if labels.len() != e.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} embedding rows",
            labels.len(),
            e.nrows()
        )));
    }
    let mut classes: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Validation(
            "training set contains a single class".into(),
        ));
    }
    let d = e.ncols();
    let xs = Array2::from_shape_fn((train_idx.len(), d), |(i, k)| e[(train_idx[i], k)]);
    let mut weights = Array2::zeros((classes.len(), d + 1));
    for (c, &class) in classes.iter().enumerate() {
        let ys: Vec<f64> = train_idx
            .iter()
            .map(|&i| if labels[i] == class { 1.0 } else { 0.0 })
            .collect();
        let w = train_binary_logistic(&xs, &ys, seed.wrapping_add(c as u64));
        weights.row_mut(c).assign(&w);
    }
    Ok(ClassifierModel { classes, weights })
}

/// Argmax class per row; ties break toward the lower class id.
pub fn predict(model: &ClassifierModel, e: &EmbeddingMatrix, idx: &[usize]) -> Vec<usize> {
    idx.iter()
        .map(|&i| {
            let row = e.row(i);
            let mut best = 0usize;
            let mut best_score = f64::NEG_INFINITY;
            for c in 0..model.classes.len() {
                let s = logit(&model.weights.row(c), &row);
                if s > best_score {
                    best_score = s;
                    best = c;
                }
            }
            model.classes[best]
        })
        .collect()
}

/// Accuracy and micro-averaged F1 over the one-vs-rest decomposition. For
/// single-label multiclass predictions the two coincide.
pub fn evaluate_classification(
    model: &ClassifierModel,
    e: &EmbeddingMatrix,
    labels: &[usize],
    test_idx: &[usize],
) -> Result<(f64, f64)> {
    if test_idx.is_empty() {
        return Err(Error::Validation("empty test set".into()));
    }
    let preds = predict(model, e, test_idx);
    let truth: Vec<usize> = test_idx.iter().map(|&i| labels[i]).collect();
    Ok((
        accuracy(&preds, &truth),
        micro_f1(&preds, &truth),
    ))
}

pub fn accuracy(preds: &[usize], truth: &[usize]) -> f64 {
    let correct = preds.iter().zip(truth).filter(|(p, t)| p == t).count();
    correct as f64 / preds.len() as f64
}

/// Micro-F1 pooled over classes: TP / (TP + (FP + FN)/2).
pub fn micro_f1(preds: &[usize], truth: &[usize]) -> f64 {
    let mut classes: Vec<usize> = preds.iter().chain(truth).copied().collect();
    classes.sort_unstable();
    classes.dedup();
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fne = 0usize;
    for &c in &classes {
        for (&p, &t) in preds.iter().zip(truth) {
            match (p == c, t == c) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fne += 1,
                _ => {}
            }
        }
    }
    tp as f64 / (tp as f64 + 0.5 * (fp + fne) as f64)
}

/// Rank-statistic AUC with half credit for ties.
pub fn auc_from_scores(pos: &[f64], neg: &[f64]) -> f64 {
    let mut acc = 0.0;
    for &p in pos {
        for &n in neg {
            if p > n {
                acc += 1.0;
            } else if p == n {
                acc += 0.5;
            }
        }
    }
    acc / (pos.len() * neg.len()) as f64
}

fn hadamard_rows(e: &EmbeddingMatrix, edges: &[(usize, usize)]) -> Array2<f64> {
    Array2::from_shape_fn((edges.len(), e.ncols()), |(i, k)| {
        let (u, v) = edges[i];
        e[(u, k)] * e[(v, k)]
    })
}

/// Link prediction AUC: Hadamard edge features, a logistic scorer trained on
/// a seeded 80/20 split of the given positive/negative edge sets, and the
/// rank AUC of the held-out 20%.
pub fn link_prediction_auc(
    e: &EmbeddingMatrix,
    pos_edges: &[(usize, usize)],
    neg_edges: &[(usize, usize)],
    seed: u64,
) -> Result<f64> {
    if pos_edges.is_empty() || neg_edges.is_empty() {
        return Err(Error::Validation(
            "link prediction needs non-empty positive and negative edge sets".into(),
        ));
    }
    if pos_edges.len() < 2 || neg_edges.len() < 2 {
        return Err(Error::Validation(
            "link prediction needs at least 2 positives and 2 negatives".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let split = |edges: &[(usize, usize)], rng: &mut ChaCha8Rng| {
        let mut shuffled = edges.to_vec();
        shuffled.shuffle(rng);
        let cut = ((shuffled.len() as f64 * 0.8).round() as usize).clamp(1, shuffled.len() - 1);
        let test = shuffled.split_off(cut);
        (shuffled, test)
    };
    let (pos_train, pos_test) = split(pos_edges, &mut rng);
    let (neg_train, neg_test) = split(neg_edges, &mut rng);

    let mut xs = hadamard_rows(e, &pos_train);
    let neg_xs = hadamard_rows(e, &neg_train);
    xs.append(ndarray::Axis(0), neg_xs.view())
        .map_err(|err| Error::Validation(format!("edge feature stack: {err}")))?;
    let mut ys = vec![1.0; pos_train.len()];
    ys.extend(std::iter::repeat_n(0.0, neg_train.len()));
    let w = train_binary_logistic(&xs, &ys, seed);

    let score = |edges: &[(usize, usize)]| -> Vec<f64> {
        hadamard_rows(e, edges)
            .rows()
            .into_iter()
            .map(|r| logit(&w.view(), &r))
            .collect()
    };
    Ok(auc_from_scores(&score(&pos_test), &score(&neg_test)))
}

/// Seeded stratified split: about `train_fraction` of each class goes to the
/// training set (at least one per class, at least one left for testing).
pub fn stratified_split(
    labels: &[usize],
    train_fraction: f64,
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    let mut by_class: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (_, mut idx) in by_class {
        idx.shuffle(&mut rng);
        let take = if idx.len() == 1 {
            // lone node: train on it, it cannot be tested
            1
        } else {
            ((idx.len() as f64 * train_fraction).round() as usize).clamp(1, idx.len() - 1)
        };
        train.extend_from_slice(&idx[..take]);
        test.extend_from_slice(&idx[take..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Wall-clock seconds per pipeline phase.
#[derive(Debug, Clone, Default, Serialize)]
pub struct PhaseTimings {
    pub fusion: f64,
    pub coarsening: f64,
    pub embedding: f64,
    pub refinement: f64,
    pub total: f64,
}

/// Final pipeline report. Metric fields are null when the task did not
/// compute them.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub accuracy: Option<f64>,
    pub accuracy_std: Option<f64>,
    pub micro_f1: Option<f64>,
    pub micro_f1_std: Option<f64>,
    pub auc: Option<f64>,
    pub fusion_skipped: bool,
    pub level_node_counts: Vec<usize>,
    pub timings: PhaseTimings,
    pub config: serde_json::Value,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

//! Shared fixtures for the pipeline benchmarks.

use graphzoom_core::io::{generate_sbm, SbmSpec};
use graphzoom_core::Graph;

/// A planted-partition benchmark graph sized by node count.
pub fn sbm_graph(n: usize, blocks: usize, avg_degree: f64, seed: u64) -> Graph {
    // split the target degree evenly between intra- and inter-block edges
    let block_size = (n / blocks) as f64;
    let p_in = (avg_degree / 2.0 / block_size).min(1.0);
    let p_out = (avg_degree / 2.0 / (n as f64 - block_size)).min(p_in);
    generate_sbm(&SbmSpec {
        n,
        blocks,
        p_in,
        p_out,
        feature_dim: 0,
        feature_noise: 0.0,
        seed,
    })
    .expect("valid benchmark spec")
    .graph
}

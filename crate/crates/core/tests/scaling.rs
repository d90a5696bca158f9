//! Loose wall-time guards for the near-linear phases. The bounds are
//! deliberately generous (a 10x edge-count increase may cost at most
//! 20-30x) so they catch accidental quadratic behavior, not jitter; each
//! measurement takes the best of three runs to reject scheduler noise.

use std::time::Instant;

fn best_of_three(mut f: impl FnMut()) -> f64 {
    (0..3)
        .map(|_| {
            let t0 = Instant::now();
            f();
            t0.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

use graphzoom_core::coarsening::{coarsen_once, CoarsenConfig};
use graphzoom_core::fusion::{cluster_for_knn, knn_attribute_graph};
use graphzoom_core::io::{generate_sbm, SbmSpec};

fn sbm_with_edges(n: usize, avg_degree: f64, feature_dim: usize, seed: u64) -> graphzoom_core::io::Dataset {
    let blocks = 10;
    let block_size = (n / blocks) as f64;
    let p_in = (avg_degree / 2.0 / block_size).min(1.0);
    let p_out = (avg_degree / 2.0 / (n as f64 - block_size)).min(p_in);
    generate_sbm(&SbmSpec {
        n,
        blocks,
        p_in,
        p_out,
        feature_dim,
        feature_noise: 0.3,
        seed,
    })
    .unwrap()
}

#[test]
fn coarsening_wall_time_scales_near_linearly() {
    let small = sbm_with_edges(1_250, 16.0, 0, 1); // ~1e4 edges
    let large = sbm_with_edges(12_500, 16.0, 0, 2); // ~1e5 edges
    assert!(small.graph.num_edges() >= 8_000 && small.graph.num_edges() <= 12_000);
    assert!(large.graph.num_edges() >= 80_000 && large.graph.num_edges() <= 120_000);

    let cfg = CoarsenConfig::default();
    // warm up allocator and caches
    coarsen_once(&small.graph, &cfg, 7).unwrap();

    let t_small = best_of_three(|| {
        coarsen_once(&small.graph, &cfg, 8).unwrap();
    });
    let t_large = best_of_three(|| {
        coarsen_once(&large.graph, &cfg, 8).unwrap();
    });

    let ratio = t_large / t_small.max(1e-6);
    assert!(
        ratio < 30.0,
        "10x edges cost {ratio:.1}x time ({t_small:.4}s -> {t_large:.4}s)"
    );
}

#[test]
fn cluster_restricted_knn_scales_near_linearly() {
    let small = sbm_with_edges(1_250, 16.0, 16, 3);
    let large = sbm_with_edges(12_500, 16.0, 16, 4);

    // warm up
    cluster_for_knn(&small.graph, 50, 1).unwrap();

    let t_small = best_of_three(|| {
        let part = cluster_for_knn(&small.graph, 50, 2).unwrap();
        knn_attribute_graph(small.features.as_ref().unwrap(), &part, 5).unwrap();
    });
    let t_large = best_of_three(|| {
        let part = cluster_for_knn(&large.graph, 50, 2).unwrap();
        knn_attribute_graph(large.features.as_ref().unwrap(), &part, 5).unwrap();
    });

    let ratio = t_large / t_small.max(1e-6);
    assert!(
        ratio < 20.0,
        "10x edges cost {ratio:.1}x time ({t_small:.4}s -> {t_large:.4}s)"
    );
}

//! The bit-packed reduction against naive dense elimination, Euler
//! characteristic, rigid-motion invariance of the minimal-cycle indicator,
//! and the sandwich inequalities on random clouds.

mod common;

use common::{
    dense_gf2_betti, euler_from_betti, euler_from_counts, oracle_rng, random_cloud,
    random_rotation, rotate_point,
};
use crackle::cech::build_cech;
use crackle::homology::{
    betti_numbers_full, crackle_statistics, minimal_cycle_indicator, minimal_cycle_indicator_fast,
};
use rand::Rng;

#[test]
fn bitpacked_betti_equals_dense_oracle() {
    let mut rng = oracle_rng(600);
    for trial in 0..80 {
        let d = if trial % 2 == 0 { 2 } else { 3 };
        let n = rng.random_range(1..=11usize);
        let cloud = random_cloud(&mut rng, n, d, 1.3);
        let complex = build_cech(&cloud, 1.0, n.max(1)).unwrap();
        let fast = betti_numbers_full(&complex).unwrap();
        let slow = dense_gf2_betti(&complex);
        assert_eq!(fast.beta, slow, "betti mismatch on trial {trial}");
    }
}

#[test]
fn euler_identity_on_full_complexes() {
    let mut rng = oracle_rng(601);
    for _ in 0..40 {
        let n = rng.random_range(1..=10usize);
        let cloud = random_cloud(&mut rng, n, 2, 1.3);
        let complex = build_cech(&cloud, 1.0, n.max(1)).unwrap();
        let betti = betti_numbers_full(&complex).unwrap();
        assert_eq!(
            euler_from_counts(&complex.simplex_counts()),
            euler_from_betti(&betti.beta)
        );
    }
}

/// Jittered near-minimal-cycle template so both indicator values occur.
fn cycle_template(rng: &mut rand_pcg::Pcg64, d: usize, k: usize) -> Vec<Vec<f64>> {
    let side = rng.random_range(1.55..2.05);
    let jitter = 0.04;
    let mut pts: Vec<Vec<f64>> = if k == 1 {
        vec![
            vec![0.0, 0.0],
            vec![side, 0.0],
            vec![side / 2.0, side * 3.0f64.sqrt() / 2.0],
        ]
    } else {
        vec![
            vec![0.0, 0.0, 0.0],
            vec![side, 0.0, 0.0],
            vec![side / 2.0, side * 3.0f64.sqrt() / 2.0, 0.0],
            vec![
                side / 2.0,
                side * 3.0f64.sqrt() / 6.0,
                side * (2.0f64 / 3.0).sqrt(),
            ],
        ]
    };
    for p in &mut pts {
        p.resize(d, 0.0);
        for v in p.iter_mut() {
            *v += rng.random_range(-jitter..jitter);
        }
    }
    pts
}

#[test]
fn t_k_invariant_under_rigid_motions() {
    let mut rng = oracle_rng(602);
    let mut nontrivial = 0;
    for round in 0..100 {
        let d = rng.random_range(2..=3usize);
        let k = rng.random_range(1..d);
        let owned: Vec<Vec<f64>> = if round % 2 == 0 {
            cycle_template(&mut rng, d, k)
        } else {
            let cloud = random_cloud(&mut rng, k + 2, d, 1.2);
            (0..k + 2).map(|i| cloud.point(i).to_vec()).collect()
        };
        let pts: Vec<&[f64]> = owned.iter().map(|p| p.as_slice()).collect();
        let before = minimal_cycle_indicator(&pts, k).unwrap();
        let rot = random_rotation(&mut rng, d);
        let shift: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
        let moved: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| {
                rotate_point(&rot, p)
                    .iter()
                    .zip(&shift)
                    .map(|(a, b)| a + b)
                    .collect()
            })
            .collect();
        let moved_refs: Vec<&[f64]> = moved.iter().map(|p| p.as_slice()).collect();
        let after = minimal_cycle_indicator(&moved_refs, k).unwrap();
        assert_eq!(before, after, "indicator changed under rigid motion");
        if before {
            nontrivial += 1;
        }
    }
    assert!(nontrivial > 0, "every sampled configuration was trivial");
}

#[test]
fn fast_indicator_agrees_with_homology_route() {
    let mut rng = oracle_rng(603);
    let mut ones = 0;
    for _ in 0..400 {
        let d = rng.random_range(2..=3usize);
        let k = rng.random_range(1..d);
        let spread = rng.random_range(0.6..1.8);
        let cloud = random_cloud(&mut rng, k + 2, d, spread);
        let pts: Vec<&[f64]> = (0..k + 2).map(|i| cloud.point(i)).collect();
        let slow = minimal_cycle_indicator(&pts, k).unwrap();
        let fast = minimal_cycle_indicator_fast(&pts, k);
        assert_eq!(slow, fast);
        ones += slow as usize;
    }
    assert!(ones > 0);
}

fn clustered_cloud(
    rng: &mut rand_pcg::Pcg64,
    max_cluster: usize,
) -> (crackle::PointCloud, f64) {
    let d = 2;
    let r = 10.0;
    let mut coords = Vec::new();
    for _ in 0..rng.random_range(0..5usize) {
        coords.push(rng.random_range(-2.0..2.0));
        coords.push(rng.random_range(-2.0..2.0));
    }
    let clusters = rng.random_range(1..4usize);
    for _ in 0..clusters {
        let base_r = rng.random_range(12.0..20.0);
        let base_th = rng.random_range(0.0..std::f64::consts::TAU);
        let (cx, cy) = (base_r * base_th.cos(), base_r * base_th.sin());
        for _ in 0..rng.random_range(1..=max_cluster) {
            coords.push(cx + rng.random_range(-1.1..1.1));
            coords.push(cy + rng.random_range(-1.1..1.1));
        }
    }
    let n = coords.len() / d;
    let cloud =
        crackle::PointCloud::from_coords(d, coords, crackle::PointCloud::external_meta(d, n))
            .unwrap();
    (cloud, r)
}

fn exterior_betti(cloud: &crackle::PointCloud, r: f64) -> Vec<u64> {
    let exterior = cloud.annulus_filter(r, f64::INFINITY).unwrap();
    let complex = build_cech(&exterior, 1.0, 2).unwrap();
    crackle::homology::betti_numbers(&complex, 2)
        .unwrap()
        .beta
        .iter()
        .map(|&b| b as u64)
        .collect()
}

#[test]
fn sandwich_on_sparse_exterior_clouds() {
    // With exterior components of at most k+2 = 3 points, the bracket
    // Ŝ_1 <= β_1 <= Ŝ_1 + L_1 is exact pathwise; verify it together with
    // the always-true k = 0 chain.
    let mut rng = oracle_rng(604);
    for trial in 0..80 {
        let (cloud, r) = clustered_cloud(&mut rng, 3);
        let stats = crackle_statistics(&cloud, r, 2, 64).unwrap();
        let beta = exterior_betti(&cloud, r);
        assert!(
            stats.s0_hat <= beta[0] && beta[0] <= stats.s0,
            "k=0 chain violated on trial {trial}"
        );
        let c1 = &stats.higher[0];
        let comp_sizes = exterior_component_sizes(&cloud, r);
        if comp_sizes.iter().all(|&s| s <= 3) {
            assert!(
                c1.s_hat <= beta[1] && beta[1] <= c1.s_hat + c1.l,
                "k=1 sandwich violated on trial {trial}: {} <= {} <= {} + {}",
                c1.s_hat,
                beta[1],
                c1.s_hat,
                c1.l
            );
        }
        assert!(c1.s_hat <= c1.s);
    }
}

#[test]
fn lower_bracket_holds_on_dense_exterior_clouds() {
    // Larger clusters can carry more independent loops than the single
    // connected 4-subset counter sees, so only the lower bracket and the
    // k = 0 chain are pathwise guarantees here.
    let mut rng = oracle_rng(605);
    for trial in 0..60 {
        let (cloud, r) = clustered_cloud(&mut rng, 6);
        let stats = crackle_statistics(&cloud, r, 2, 64).unwrap();
        let beta = exterior_betti(&cloud, r);
        assert!(
            stats.s0_hat <= beta[0] && beta[0] <= stats.s0,
            "k=0 chain violated on trial {trial}"
        );
        assert!(stats.higher[0].s_hat <= beta[1], "lower bracket violated");
        assert!(stats.higher[0].s_hat <= stats.higher[0].s);
    }
}

fn exterior_component_sizes(cloud: &crackle::PointCloud, r: f64) -> Vec<usize> {
    let exterior = cloud.annulus_filter(r, f64::INFINITY).unwrap();
    let edges = crackle::geometry::proximity_graph(&exterior, 1.0).unwrap();
    let mut uf = crackle::homology::UnionFind::new(exterior.len());
    for (a, b) in edges {
        uf.union(a as usize, b as usize);
    }
    let mut counts = std::collections::HashMap::new();
    for i in 0..exterior.len() {
        *counts.entry(uf.find(i)).or_insert(0usize) += 1;
    }
    counts.into_values().collect()
}

#[test]
fn upper_bracket_is_loose_outside_the_sparse_regime() {
    // Two hollow triangles sharing a threshold-length edge: one dense
    // 4-point component carrying two independent loops but only a single
    // connected 4-subset. Documents why the upper bracket is only applied
    // in the sparse regime the experiments run in.
    let coords = vec![
        99.0, 0.0, // A
        101.0, 0.0, // B
        100.0, 1.7, // C
        100.0, -1.7, // D
    ];
    let cloud =
        crackle::PointCloud::from_coords(2, coords, crackle::PointCloud::external_meta(2, 4))
            .unwrap();
    let r = 50.0;
    let beta = exterior_betti(&cloud, r);
    assert_eq!(beta[1], 2, "two independent hollow triangles");
    let stats = crackle_statistics(&cloud, r, 2, 64).unwrap();
    let c1 = &stats.higher[0];
    assert_eq!(c1.s, 2, "both triangles are minimal cycles");
    assert_eq!(c1.s_hat, 0, "neither triangle is a whole component");
    assert_eq!(c1.l, 1, "one connected 4-subset");
    assert!(c1.s_hat <= beta[1], "the lower bracket still holds");
}

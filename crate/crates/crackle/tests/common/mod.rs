//! Shared test oracles, independent of the implementation paths they check:
//! naive dense GF(2) elimination for Betti numbers, all-subsets enumeration
//! for the Čech complex, and random cloud / rotation generators.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_pcg::Pcg64;

use crackle::cech::SimplicialComplex;
use crackle::geometry::cech_face_test;
use crackle::sampler::PointCloud;

pub fn oracle_rng(seed: u64) -> Pcg64 {
    Pcg64::seed_from_u64(seed)
}

/// Uniform cloud in [-scale, scale]^d.
pub fn random_cloud(rng: &mut Pcg64, n: usize, d: usize, scale: f64) -> PointCloud {
    let coords: Vec<f64> = (0..n * d)
        .map(|_| rng.random_range(-scale..scale))
        .collect();
    PointCloud::from_coords(d, coords, PointCloud::external_meta(d, n)).unwrap()
}

/// Haar-ish random rotation from Gram-Schmidt of a Gaussian matrix.
pub fn random_rotation(rng: &mut Pcg64, d: usize) -> Vec<Vec<f64>> {
    loop {
        let mut m: Vec<Vec<f64>> = (0..d)
            .map(|_| {
                (0..d)
                    .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                    .collect()
            })
            .collect();
        let mut ok = true;
        for i in 0..d {
            for j in 0..i {
                let proj: f64 = (0..d).map(|t| m[i][t] * m[j][t]).sum();
                for t in 0..d {
                    m[i][t] -= proj * m[j][t];
                }
            }
            let norm: f64 = (0..d).map(|t| m[i][t] * m[i][t]).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            for t in 0..d {
                m[i][t] /= norm;
            }
        }
        if ok {
            return m;
        }
    }
}

pub fn rotate_point(rot: &[Vec<f64>], p: &[f64]) -> Vec<f64> {
    rot.iter()
        .map(|row| row.iter().zip(p).map(|(a, b)| a * b).sum())
        .collect()
}

/// The Čech complex by definition: every nonempty subset whose face test
/// passes, grouped by dimension. Exponential in n; for oracle use only.
pub fn brute_force_cech(cloud: &PointCloud, epsilon: f64, kmax: usize) -> Vec<Vec<Vec<u32>>> {
    let n = cloud.len();
    let mut layers: Vec<Vec<Vec<u32>>> = vec![Vec::new(); kmax + 1];
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size > kmax + 1 {
            continue;
        }
        let verts: Vec<u32> = (0..n as u32).filter(|v| mask >> v & 1 == 1).collect();
        let pts: Vec<&[f64]> = verts.iter().map(|&v| cloud.point(v as usize)).collect();
        if cech_face_test(&pts, epsilon).unwrap() {
            layers[size - 1].push(verts);
        }
    }
    for layer in &mut layers {
        layer.sort();
    }
    layers
}

/// Betti numbers by naive dense row elimination over GF(2), treating the
/// complex as full (no simplices beyond its top dimension).
pub fn dense_gf2_betti(complex: &SimplicialComplex) -> Vec<usize> {
    let top = complex.dim_cap();
    let counts: Vec<usize> = (0..=top).map(|k| complex.count(k)).collect();
    let mut ranks = vec![0usize; top + 2];
    for k in 1..=top {
        ranks[k] = dense_rank(complex, k);
    }
    (0..=top)
        .map(|k| counts[k] - ranks[k] - ranks[k + 1])
        .collect()
}

fn dense_rank(complex: &SimplicialComplex, k: usize) -> usize {
    let cols = complex.count(k);
    let rows = complex.count(k - 1);
    if cols == 0 || rows == 0 {
        return 0;
    }
    let row_index: HashMap<Vec<u32>, usize> = complex
        .simplices(k - 1)
        .enumerate()
        .map(|(i, s)| (s.to_vec(), i))
        .collect();
    let mut m = vec![vec![0u8; cols]; rows];
    for (j, s) in complex.simplices(k).enumerate() {
        for skip in 0..=k {
            let facet: Vec<u32> = s
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, v)| *v)
                .collect();
            let i = row_index[&facet];
            m[i][j] ^= 1;
        }
    }
    // row echelon over GF(2)
    let mut rank = 0;
    let mut lead = 0;
    for r in 0..rows {
        while lead < cols {
            if let Some(p) = (r..rows).find(|&i| m[i][lead] == 1) {
                m.swap(r, p);
                for i in 0..rows {
                    if i != r && m[i][lead] == 1 {
                        for c in lead..cols {
                            m[i][c] ^= m[r][c];
                        }
                    }
                }
                rank += 1;
                lead += 1;
                break;
            }
            lead += 1;
        }
        if lead >= cols {
            break;
        }
    }
    rank
}

/// Euler characteristic from simplex counts.
pub fn euler_from_counts(counts: &[usize]) -> i64 {
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}

pub fn euler_from_betti(beta: &[usize]) -> i64 {
    euler_from_counts(beta)
}

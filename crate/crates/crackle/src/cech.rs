//! Čech complex construction: a simplex enters when the minimal enclosing
//! ball of its vertices has radius at most ε. Candidates are generated by
//! incremental expansion over the proximity graph (the Rips 1-skeleton is a
//! superset of the Čech complex), with facet pruning before the ball test.

use crate::error::{CrackleError, Result};
use crate::geometry::{cech_face_test, proximity_graph};
use crate::sampler::PointCloud;

/// Dimension-graded simplex lists. `layers[k]` stores the k-simplices as a
/// flat array of sorted (k+1)-tuples of vertex indices, in lexicographic
/// order. Downward closed by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex {
    epsilon: f64,
    n_vertices: usize,
    layers: Vec<Layer>,
}

#[derive(Debug, Clone, PartialEq)]
struct Layer {
    arity: usize,
    flat: Vec<u32>,
}

impl Layer {
    fn count(&self) -> usize {
        self.flat.len() / self.arity
    }

    fn get(&self, i: usize) -> &[u32] {
        &self.flat[i * self.arity..(i + 1) * self.arity]
    }

    fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.flat.chunks_exact(self.arity)
    }

    /// Binary search for a sorted tuple; layers are lex-sorted.
    fn index_of(&self, tuple: &[u32]) -> Option<usize> {
        debug_assert_eq!(tuple.len(), self.arity);
        let n = self.count();
        let (mut lo, mut hi) = (0, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(tuple) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

impl SimplicialComplex {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Highest dimension the complex was built to (inclusive).
    pub fn dim_cap(&self) -> usize {
        self.layers.len() - 1
    }

    /// Number of k-simplices.
    pub fn count(&self, k: usize) -> usize {
        self.layers.get(k).map_or(0, Layer::count)
    }

    /// Exact simplex counts per dimension, 0..=dim_cap.
    pub fn simplex_counts(&self) -> Vec<usize> {
        self.layers.iter().map(Layer::count).collect()
    }

    pub fn simplices(&self, k: usize) -> impl Iterator<Item = &[u32]> {
        self.layers[k].iter()
    }

    pub fn simplex(&self, k: usize, i: usize) -> &[u32] {
        self.layers[k].get(i)
    }

    /// Position of a sorted tuple among the k-simplices.
    pub fn index_of(&self, k: usize, tuple: &[u32]) -> Option<usize> {
        self.layers.get(k).and_then(|l| l.index_of(tuple))
    }

    pub fn contains(&self, tuple: &[u32]) -> bool {
        if tuple.is_empty() {
            return false;
        }
        self.index_of(tuple.len() - 1, tuple).is_some()
    }

    /// Assemble from per-dimension tuple lists (test and import support).
    /// Tuples are sorted per dimension; downward closure is the caller's
    /// responsibility and is verified in debug builds.
    pub fn from_layers(epsilon: f64, n_vertices: usize, mut dims: Vec<Vec<Vec<u32>>>) -> Self {
        if dims.is_empty() {
            dims.push((0..n_vertices as u32).map(|v| vec![v]).collect());
        }
        let layers = dims
            .into_iter()
            .enumerate()
            .map(|(k, mut tuples)| {
                tuples.sort();
                tuples.dedup();
                let mut flat = Vec::with_capacity(tuples.len() * (k + 1));
                for t in tuples {
                    assert_eq!(t.len(), k + 1);
                    flat.extend_from_slice(&t);
                }
                Layer { arity: k + 1, flat }
            })
            .collect();
        let complex = Self {
            epsilon,
            n_vertices,
            layers,
        };
        debug_assert!(complex.is_downward_closed());
        complex
    }

    /// Every facet of every simplex is present.
    pub fn is_downward_closed(&self) -> bool {
        for k in 1..self.layers.len() {
            for s in self.layers[k].iter() {
                let mut facet = Vec::with_capacity(k);
                for skip in 0..=k {
                    facet.clear();
                    facet.extend(
                        s.iter()
                            .enumerate()
                            .filter(|(i, _)| *i != skip)
                            .map(|(_, v)| *v),
                    );
                    if self.layers[k - 1].index_of(&facet).is_none() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Build Č(cloud, ε) truncated at dimension `kmax`.
pub fn build_cech(cloud: &PointCloud, epsilon: f64, kmax: usize) -> Result<SimplicialComplex> {
    if !(epsilon > 0.0) {
        return Err(CrackleError::OutOfRange {
            name: "epsilon",
            value: epsilon,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }
    let n = cloud.len();
    let mut layers = Vec::with_capacity(kmax + 1);
    layers.push(Layer {
        arity: 1,
        flat: (0..n as u32).collect(),
    });
    if kmax == 0 || n == 0 {
        return Ok(SimplicialComplex {
            epsilon,
            n_vertices: n,
            layers: pad_layers(layers, kmax),
        });
    }

    let edges = proximity_graph(cloud, epsilon)?;
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut edge_flat = Vec::with_capacity(edges.len() * 2);
    for &(i, j) in &edges {
        adjacency[i as usize].push(j);
        adjacency[j as usize].push(i);
        edge_flat.push(i);
        edge_flat.push(j);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    layers.push(Layer {
        arity: 2,
        flat: edge_flat,
    });

    let mut scratch = Vec::new();
    let mut facet = Vec::new();
    for k in 2..=kmax {
        let prev = &layers[k - 1];
        let mut flat = Vec::new();
        for s in prev.iter() {
            // candidate extensions: common neighbours above the last vertex
            let last = *s.last().unwrap();
            scratch.clear();
            scratch.extend(
                adjacency[last as usize]
                    .iter()
                    .copied()
                    .filter(|&v| v > last),
            );
            for &u in &s[..s.len() - 1] {
                scratch.retain(|v| adjacency[u as usize].binary_search(v).is_ok());
                if scratch.is_empty() {
                    break;
                }
            }
            'cand: for &v in scratch.iter() {
                // facet-first pruning: all k-subtuples must already be present
                // (the facet that drops v is s itself)
                for skip in 0..s.len() {
                    facet.clear();
                    facet.extend(s.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, x)| *x));
                    facet.push(v);
                    if prev.index_of(&facet).is_none() {
                        continue 'cand;
                    }
                }
                // the expensive test last
                let mut pts: Vec<&[f64]> = s.iter().map(|&i| cloud.point(i as usize)).collect();
                pts.push(cloud.point(v as usize));
                if cech_face_test(&pts, epsilon)? {
                    flat.extend_from_slice(s);
                    flat.push(v);
                }
            }
        }
        if flat.is_empty() {
            layers.push(Layer {
                arity: k + 1,
                flat,
            });
            break;
        }
        layers.push(Layer {
            arity: k + 1,
            flat,
        });
    }
    Ok(SimplicialComplex {
        epsilon,
        n_vertices: n,
        layers: pad_layers(layers, kmax),
    })
}

fn pad_layers(mut layers: Vec<Layer>, kmax: usize) -> Vec<Layer> {
    while layers.len() <= kmax {
        let arity = layers.len() + 1;
        layers.push(Layer {
            arity,
            flat: Vec::new(),
        });
    }
    layers
}

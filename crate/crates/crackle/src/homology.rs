//! Betti numbers over GF(2) by column reduction of bit-packed boundary
//! matrices, the minimal-cycle indicator T_k, and the combinatorial cycle
//! counters S, Ŝ, L that bracket the Betti numbers of the exterior complex.

use serde::{Deserialize, Serialize};

use crate::cech::{build_cech, SimplicialComplex};
use crate::error::{CrackleError, Result};
use crate::geometry::{cech_face_test, dist, EPS_DIST};
use crate::sampler::PointCloud;

/// Coefficient field tag carried by every Betti vector.
pub const FIELD: &str = "GF(2)";

/// β_0..β_{kmax-1} of a complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiVector {
    pub beta: Vec<usize>,
    pub field: String,
}

impl BettiVector {
    fn new(beta: Vec<usize>) -> Self {
        Self {
            beta,
            field: FIELD.to_string(),
        }
    }
}

/// Union-find over vertex indices, used to cross-check β_0.
pub struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] as usize != root {
            root = self.parent[root] as usize;
        }
        let mut cur = x;
        while cur != root {
            let next = self.parent[cur] as usize;
            self.parent[cur] = root as u32;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb as u32,
            std::cmp::Ordering::Greater => self.parent[rb] = ra as u32,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra as u32;
                self.rank[ra] += 1;
            }
        }
    }

    pub fn component_count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}

/// Rank over GF(2) of the boundary matrix ∂_k of a complex, by left-to-right
/// column reduction on bit-packed columns.
fn boundary_rank(complex: &SimplicialComplex, k: usize) -> usize {
    if k == 0 || complex.count(k) == 0 || complex.count(k - 1) == 0 {
        return 0;
    }
    let rows = complex.count(k - 1);
    let words = rows.div_ceil(64);
    let mut pivot_owner: Vec<Option<u32>> = vec![None; rows];
    let mut reduced: Vec<Vec<u64>> = Vec::new();
    let mut rank = 0;
    let mut facet = Vec::with_capacity(k);
    let mut col = vec![0u64; words];
    for s in complex.simplices(k) {
        col.iter_mut().for_each(|w| *w = 0);
        for skip in 0..=k {
            facet.clear();
            facet.extend(
                s.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, v)| *v),
            );
            let row = complex
                .index_of(k - 1, &facet)
                .expect("downward closure violated: facet missing");
            col[row / 64] ^= 1u64 << (row % 64);
        }
        while let Some(low) = highest_set_bit(&col) {
            match pivot_owner[low] {
                Some(owner) => {
                    let other = &reduced[owner as usize];
                    for (w, o) in col.iter_mut().zip(other) {
                        *w ^= o;
                    }
                }
                None => {
                    pivot_owner[low] = Some(reduced.len() as u32);
                    reduced.push(col.clone());
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn highest_set_bit(col: &[u64]) -> Option<usize> {
    for (i, w) in col.iter().enumerate().rev() {
        if *w != 0 {
            return Some(i * 64 + 63 - w.leading_zeros() as usize);
        }
    }
    None
}

/// β_k = (#k-simplices) - rank ∂_k - rank ∂_{k+1} for 0 <= k < kmax.
///
/// Requires the complex built to dimension kmax so ∂_kmax is available.
/// β_0 is cross-checked against the union-find component count.
pub fn betti_numbers(complex: &SimplicialComplex, kmax: usize) -> Result<BettiVector> {
    if kmax == 0 {
        return Ok(BettiVector::new(Vec::new()));
    }
    if kmax > complex.dim_cap() {
        return Err(CrackleError::MissingBoundary {
            k: kmax - 1,
            max_dim: complex.dim_cap(),
        });
    }
    betti_upto(complex, kmax - 1, false)
}

/// Betti numbers of a complex known to be full (no simplices exist beyond
/// its top dimension), including the top dimension itself.
pub fn betti_numbers_full(complex: &SimplicialComplex) -> Result<BettiVector> {
    betti_upto(complex, complex.dim_cap(), true)
}

fn betti_upto(complex: &SimplicialComplex, k_hi: usize, full: bool) -> Result<BettiVector> {
    let mut beta = Vec::new();
    if complex.count(0) == 0 {
        return Ok(BettiVector::new(vec![0; k_hi + 1]));
    }
    let mut rank_next = boundary_rank(complex, 1);
    // union-find cross check for beta_0
    let mut uf = UnionFind::new(complex.count(0));
    if complex.dim_cap() >= 1 {
        for e in complex.simplices(1) {
            uf.union(e[0] as usize, e[1] as usize);
        }
    }
    for k in 0..=k_hi {
        let rank_k = if k == 0 {
            0
        } else {
            std::mem::replace(&mut rank_next, 0)
        };
        rank_next = if k < complex.dim_cap() {
            if k == 0 {
                rank_next
            } else {
                boundary_rank(complex, k + 1)
            }
        } else {
            debug_assert!(full || complex.count(k + 1) == 0);
            0
        };
        let b = complex.count(k) - rank_k - rank_next;
        if k == 0 {
            let components = uf.component_count();
            assert_eq!(
                b, components,
                "beta_0 from reduction disagrees with union-find"
            );
        }
        beta.push(b);
    }
    Ok(BettiVector::new(beta))
}

/// T_k: is the unit-radius Čech complex of exactly k+2 points a minimal
/// k-dimensional cycle (β_k = 1)?
pub fn minimal_cycle_indicator(points: &[&[f64]], k: usize) -> Result<bool> {
    if points.is_empty() {
        return Err(CrackleError::EmptyPointSet);
    }
    let d = points[0].len();
    if k < 1 || k > d.saturating_sub(1) {
        return Err(CrackleError::BadHomologyDegree {
            k,
            max: d.saturating_sub(1),
        });
    }
    if points.len() != k + 2 {
        return Err(CrackleError::WrongCardinality {
            k,
            expected: k + 2,
            got: points.len(),
        });
    }
    let mut coords = Vec::with_capacity(points.len() * d);
    for p in points {
        if p.len() != d {
            return Err(CrackleError::DimensionMismatch {
                expected: d,
                got: p.len(),
            });
        }
        coords.extend_from_slice(p);
    }
    let cloud = PointCloud::from_coords(d, coords, PointCloud::external_meta(d, points.len()))?;
    let complex = build_cech(&cloud, 1.0, k + 1)?;
    let betti = betti_numbers_full(&complex)?;
    Ok(betti.beta[k] == 1)
}

/// Fast equivalent of [`minimal_cycle_indicator`] for hot loops: on k+2
/// points the only possible k-cycle is the boundary of the full simplex, so
/// T_k = 1 iff every (k+1)-subset passes the unit face test and the full
/// set does not. Verified against the homology route in tests.
pub fn minimal_cycle_indicator_fast(points: &[&[f64]], k: usize) -> bool {
    debug_assert_eq!(points.len(), k + 2);
    // cheap rejection: a face of radius <= 1 forces pairwise distance <= 2
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if dist(points[i], points[j]) > 2.0 + EPS_DIST {
                return false;
            }
        }
    }
    let mut face: Vec<&[f64]> = Vec::with_capacity(k + 1);
    for skip in 0..points.len() {
        face.clear();
        face.extend(
            points
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, p)| *p),
        );
        if !cech_face_test(&face, 1.0).unwrap() {
            return false;
        }
    }
    !cech_face_test(points, 1.0).unwrap()
}

/// Per-degree subset counters for k >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCounts {
    pub k: usize,
    /// minimal k-cycles among exterior (k+2)-subsets
    pub s: u64,
    /// those that are whole connected components of the full complex
    pub s_hat: u64,
    /// connected exterior (k+3)-subsets
    pub l: u64,
}

/// The crackle statistics of one cloud at one radius.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrackleStats {
    /// exterior point count |X ∩ (B_R)^c|
    pub s0: u64,
    /// exterior points isolated in the full unit complex
    pub s0_hat: u64,
    pub higher: Vec<CycleCounts>,
}

/// Default refusal threshold for the exponential subset enumeration.
pub const DEFAULT_COMBINATORIAL_CAP: usize = 64;

/// Compute S, Ŝ and L for the points of `cloud` outside radius `r`, with
/// minimal cycles tested at unit radius, for 1 <= k <= kmax-1.
///
/// Enumeration runs per connected component of the exterior proximity
/// graph; isolation (the Ŝ conditions) is tested against the full cloud.
/// Refuses when the exterior holds more than `cap` points.
pub fn crackle_statistics(
    cloud: &PointCloud,
    r: f64,
    kmax: usize,
    cap: usize,
) -> Result<CrackleStats> {
    if !(r > 0.0) {
        return Err(CrackleError::OutOfRange {
            name: "R",
            value: r,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }
    let norms = cloud.norms();
    let exterior: Vec<usize> = (0..cloud.len()).filter(|&i| norms[i] >= r).collect();
    let m = exterior.len();
    if m > cap.min(64) {
        return Err(CrackleError::CombinatorialCap {
            count: m,
            cap: cap.min(64),
        });
    }
    // Points that could sit within distance 2 of an exterior point all have
    // norm >= r - 2 (up to slack); nothing else can break isolation.
    let near: Vec<usize> = (0..cloud.len())
        .filter(|&i| norms[i] >= r - 2.0 - 1e-6)
        .collect();

    let s0 = m as u64;
    let reach = 2.0 + EPS_DIST;
    let isolated_from_rest = |set: &[usize]| -> bool {
        for &j in &near {
            if set.contains(&j) {
                continue;
            }
            let q = cloud.point(j);
            for &i in set {
                if dist(cloud.point(i), q) <= reach {
                    return false;
                }
            }
        }
        true
    };
    let s0_hat = exterior
        .iter()
        .filter(|&&i| isolated_from_rest(&[i]))
        .count() as u64;

    // adjacency among exterior points as 64-bit masks
    let mut adj = vec![0u64; m];
    for a in 0..m {
        for b in a + 1..m {
            if dist(cloud.point(exterior[a]), cloud.point(exterior[b])) <= reach {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
        }
    }
    // connected components of the exterior graph
    let mut uf = UnionFind::new(m);
    for a in 0..m {
        for b in a + 1..m {
            if adj[a] >> b & 1 == 1 {
                uf.union(a, b);
            }
        }
    }
    let mut comps: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for a in 0..m {
        comps.entry(uf.find(a)).or_default().push(a);
    }

    let mut higher = Vec::new();
    for k in 1..kmax.max(1) {
        let mut s = 0u64;
        let mut s_hat = 0u64;
        let mut l = 0u64;
        for comp in comps.values() {
            // minimal cycles are cliques of size k+2
            if comp.len() >= k + 2 {
                for_each_combination(comp, k + 2, &mut |subset| {
                    if !is_clique(&adj, subset) {
                        return;
                    }
                    let pts: Vec<&[f64]> = subset
                        .iter()
                        .map(|&a| cloud.point(exterior[a]))
                        .collect();
                    if minimal_cycle_indicator_fast(&pts, k) {
                        s += 1;
                        if comp.len() == k + 2 {
                            let global: Vec<usize> =
                                subset.iter().map(|&a| exterior[a]).collect();
                            if isolated_from_rest(&global) {
                                s_hat += 1;
                            }
                        }
                    }
                });
            }
            if comp.len() >= k + 3 {
                for_each_combination(comp, k + 3, &mut |subset| {
                    if induced_connected(&adj, subset) {
                        l += 1;
                    }
                });
            }
        }
        debug_assert!(s_hat <= s);
        higher.push(CycleCounts { k, s, s_hat, l });
    }
    Ok(CrackleStats {
        s0,
        s0_hat,
        higher,
    })
}

fn is_clique(adj: &[u64], subset: &[usize]) -> bool {
    for (i, &a) in subset.iter().enumerate() {
        for &b in &subset[i + 1..] {
            if adj[a] >> b & 1 == 0 {
                return false;
            }
        }
    }
    true
}

fn induced_connected(adj: &[u64], subset: &[usize]) -> bool {
    let mask: u64 = subset.iter().fold(0, |acc, &a| acc | 1 << a);
    let mut seen = 1u64 << subset[0];
    loop {
        let mut next = seen;
        let mut bits = seen;
        while bits != 0 {
            let a = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            next |= adj[a] & mask;
        }
        if next == seen {
            return seen == mask;
        }
        seen = next;
    }
}

/// Visit every `size`-subset of `items` in lexicographic order.
fn for_each_combination<F: FnMut(&[usize])>(items: &[usize], size: usize, f: &mut F) {
    let n = items.len();
    if size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    let mut subset = vec![0usize; size];
    loop {
        for (slot, &i) in subset.iter_mut().zip(&idx) {
            *slot = items[i];
        }
        f(&subset);
        // advance
        let mut pos = size;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] != pos + n - size {
                break;
            }
            if pos == 0 {
                return;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

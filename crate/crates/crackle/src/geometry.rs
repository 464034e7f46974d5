//! Metric primitives: minimal enclosing balls, the Čech face test,
//! fixed-radius proximity graphs via spatial hashing, and the grid
//! coverage certificate for the core of a sample.

use std::collections::HashMap;

use crate::error::{CrackleError, Result};
use crate::sampler::PointCloud;

/// Additive slack for distance comparisons against 2ε. Inclusion decisions
/// at the boundary are measure-zero events; the slack only pins them down
/// reproducibly across platforms.
pub const EPS_DIST: f64 = 1e-9;

/// Additive slack for MEB-radius comparisons against ε.
pub const EPS_RADIUS: f64 = 1e-9;

/// Probe lattice spacing of the direct coverage check.
pub const PROBE_SPACING: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, p: &[f64], slack: f64) -> bool {
        dist(&self.center, p) <= self.radius + slack
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
}

/// Smallest enclosing ball of a nonempty point set (Welzl, move-to-front).
///
/// Handles degenerate supports (collinear / cospherical inputs) by
/// enumerating support subsets when the circumsphere system goes singular.
pub fn min_enclosing_ball(points: &[&[f64]]) -> Result<Ball> {
    if points.is_empty() {
        return Err(CrackleError::EmptyPointSet);
    }
    let d = points[0].len();
    let mut order: Vec<usize> = (0..points.len()).collect();
    if points.len() > 3 {
        // deterministic Fisher-Yates so large inputs get the expected
        // linear-time behaviour without a global RNG
        let mut state = 0x9E3779B97F4A7C15u64 ^ (points.len() as u64);
        for i in (1..order.len()).rev() {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            order.swap(i, j);
        }
    }
    let mut boundary = Vec::with_capacity(d + 1);
    Ok(welzl(points, &mut order, &mut boundary, d))
}

fn welzl(points: &[&[f64]], order: &mut [usize], boundary: &mut Vec<usize>, d: usize) -> Ball {
    let mut ball = if boundary.is_empty() {
        None
    } else {
        let support: Vec<&[f64]> = boundary.iter().map(|&i| points[i]).collect();
        Some(ball_from_support(&support))
    };
    if boundary.len() == d + 1 {
        return ball.unwrap();
    }
    for i in 0..order.len() {
        let p = order[i];
        let outside = match &ball {
            None => true,
            Some(b) => !b.contains(points[p], 1e-12 * b.radius.max(1.0)),
        };
        if outside {
            boundary.push(p);
            let sub = welzl(points, &mut order[..i], boundary, d);
            boundary.pop();
            ball = Some(sub);
            order[..=i].rotate_right(1);
        }
    }
    ball.unwrap_or_else(|| {
        let support: Vec<&[f64]> = boundary.iter().map(|&i| points[i]).collect();
        ball_from_support(&support)
    })
}

/// Smallest ball with every support point on its boundary (center in the
/// affine hull). Falls back to support-subset enumeration when the points
/// are affinely dependent.
fn ball_from_support(support: &[&[f64]]) -> Ball {
    let q0 = support[0];
    if support.len() == 1 {
        return Ball {
            center: q0.to_vec(),
            radius: 0.0,
        };
    }
    let k = support.len() - 1;
    // Solve (2 v_i . v_j) λ_j = |v_i|^2 with v_i = q_i - q0.
    let v: Vec<Vec<f64>> = support[1..]
        .iter()
        .map(|q| q.iter().zip(q0).map(|(a, b)| a - b).collect())
        .collect();
    let mut m = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            m[i][j] = 2.0 * dot(&v[i], &v[j]);
        }
        m[i][k] = dot(&v[i], &v[i]);
    }
    let scale = m
        .iter()
        .flat_map(|row| row[..k].iter())
        .fold(0.0f64, |a, &x| a.max(x.abs()));
    match solve_gauss(&mut m, k, 1e-12 * scale.max(1.0)) {
        Some(lambda) => {
            let mut center = q0.to_vec();
            for (lj, vj) in lambda.iter().zip(&v) {
                for (c, vc) in center.iter_mut().zip(vj) {
                    *c += lj * vc;
                }
            }
            let radius = support.iter().map(|q| dist(&center, q)).fold(0.0, f64::max);
            Ball { center, radius }
        }
        None => {
            // Affinely dependent support: the smallest ball through a
            // proper subset that still contains everything.
            let mut best: Option<Ball> = None;
            for skip in 0..support.len() {
                let sub: Vec<&[f64]> = support
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, q)| *q)
                    .collect();
                let cand = ball_from_support(&sub);
                if support.iter().all(|q| cand.contains(q, EPS_RADIUS)) {
                    match &best {
                        Some(b) if b.radius <= cand.radius => {}
                        _ => best = Some(cand),
                    }
                }
            }
            best.unwrap_or_else(|| Ball {
                center: q0.to_vec(),
                radius: support.iter().map(|q| dist(q0, q)).fold(0.0, f64::max),
            })
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting on a k x (k+1) system.
/// Returns None when a pivot falls below `tol` (singular system).
fn solve_gauss(m: &mut [Vec<f64>], k: usize, tol: f64) -> Option<Vec<f64>> {
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| {
            m[a][col]
                .abs()
                .partial_cmp(&m[b][col].abs())
                .unwrap()
        })?;
        if m[piv][col].abs() <= tol {
            return None;
        }
        m.swap(col, piv);
        for row in col + 1..k {
            let f = m[row][col] / m[col][col];
            for c in col..=k {
                m[row][c] -= f * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let mut acc = m[row][k];
        for c in row + 1..k {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// The Čech condition: the ε-balls around the points share a common point,
/// equivalently the minimal enclosing ball has radius at most ε.
///
/// Pairs short-circuit to the distance rule `|x - y| <= 2ε + EPS_DIST` so
/// the face test and the proximity graph agree exactly on edges.
pub fn cech_face_test(points: &[&[f64]], epsilon: f64) -> Result<bool> {
    match points.len() {
        0 => Err(CrackleError::EmptyPointSet),
        1 => Ok(true),
        2 => Ok(dist(points[0], points[1]) <= 2.0 * epsilon + EPS_DIST),
        _ => Ok(min_enclosing_ball(points)?.radius <= epsilon + EPS_RADIUS),
    }
}

/// Spatial hash over cells of a fixed side length.
pub struct SpatialHash<'a> {
    cloud: &'a PointCloud,
    cell: f64,
    map: HashMap<Vec<i64>, Vec<u32>>,
}

impl<'a> SpatialHash<'a> {
    pub fn build(cloud: &'a PointCloud, cell: f64) -> Self {
        assert!(cell > 0.0);
        let mut map: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
        for (i, p) in cloud.iter_points().enumerate() {
            map.entry(cell_key(p, cell)).or_default().push(i as u32);
        }
        Self { cloud, cell, map }
    }

    /// Indices of points within `radius` of `q` (plus `EPS_DIST` slack).
    pub fn neighbors_within(&self, q: &[f64], radius: f64) -> Vec<u32> {
        let mut out = Vec::new();
        self.for_each_candidate(q, |i, p| {
            if dist(q, p) <= radius + EPS_DIST {
                out.push(i);
            }
            false
        });
        out.sort_unstable();
        out
    }

    /// True as soon as any point lies within `radius` of `q` (no slack
    /// beyond `EPS_DIST`).
    pub fn any_within(&self, q: &[f64], radius: f64) -> bool {
        self.for_each_candidate(q, |_, p| dist(q, p) <= radius + EPS_DIST)
    }

    fn for_each_candidate<F: FnMut(u32, &[f64]) -> bool>(&self, q: &[f64], mut f: F) -> bool {
        let d = self.cloud.dim();
        let base = cell_key(q, self.cell);
        let mut offset = vec![-1i64; d];
        loop {
            let key: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
            if let Some(ids) = self.map.get(&key) {
                for &i in ids {
                    if f(i, self.cloud.point(i as usize)) {
                        return true;
                    }
                }
            }
            // odometer over {-1,0,1}^d
            let mut axis = 0;
            loop {
                if axis == d {
                    return false;
                }
                offset[axis] += 1;
                if offset[axis] <= 1 {
                    break;
                }
                offset[axis] = -1;
                axis += 1;
            }
        }
    }
}

fn cell_key(p: &[f64], cell: f64) -> Vec<i64> {
    p.iter()
        .map(|&x| {
            let v = (x / cell).floor();
            v.clamp(-4.0e18, 4.0e18) as i64
        })
        .collect()
}

/// Edges (i, j), i < j, between points at distance at most 2ε (+ slack),
/// built with a uniform spatial hash of cell side 2ε. Output in
/// lexicographic order.
pub fn proximity_graph(cloud: &PointCloud, epsilon: f64) -> Result<Vec<(u32, u32)>> {
    if !(epsilon > 0.0) {
        return Err(CrackleError::OutOfRange {
            name: "epsilon",
            value: epsilon,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }
    if cloud.is_empty() {
        return Ok(Vec::new());
    }
    let reach = 2.0 * epsilon;
    let hash = SpatialHash::build(cloud, reach);
    let mut edges = Vec::new();
    for i in 0..cloud.len() {
        let p = cloud.point(i);
        let mut js = Vec::new();
        hash.for_each_candidate(p, |j, q| {
            if (j as usize) > i && dist(p, q) <= reach + EPS_DIST {
                js.push(j);
            }
            false
        });
        js.sort_unstable();
        edges.extend(js.into_iter().map(|j| (i as u32, j)));
    }
    Ok(edges)
}

/// Grid of side `1/(2 sqrt(d))` cubes fully contained in the ball of
/// radius `r`; a cube's diagonal is 1/2, so one sample point per cube
/// certifies unit-ball coverage of the union of cubes.
#[derive(Debug, Clone)]
pub struct CoverageGrid {
    pub g: f64,
    pub r: f64,
    pub cubes: Vec<Vec<i64>>,
}

impl CoverageGrid {
    pub fn new(d: usize, r: f64) -> Self {
        let g = 1.0 / (2.0 * (d as f64).sqrt());
        debug_assert!(g * (d as f64).sqrt() <= 0.5 + 1e-12);
        let mut cubes = Vec::new();
        let lim = (r / g).ceil() as i64 + 1;
        let mut idx = vec![-lim; d];
        'outer: loop {
            // far-corner distance must stay within r
            let mut far2 = 0.0;
            for &c in &idx {
                let lo = c as f64 * g;
                let hi = (c + 1) as f64 * g;
                let far = lo.abs().max(hi.abs());
                far2 += far * far;
            }
            if far2 <= r * r {
                cubes.push(idx.clone());
            }
            let mut axis = 0;
            loop {
                if axis == d {
                    break 'outer;
                }
                idx[axis] += 1;
                if idx[axis] < lim {
                    break;
                }
                idx[axis] = -lim;
                axis += 1;
            }
        }
        Self { g, r, cubes }
    }
}

/// Result of the two coverage checks of a sampled core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CoverageCheck {
    /// every grid cube fully inside B_R holds at least one sample point
    pub certificate: bool,
    /// every probe of a 0.05-lattice inside B_R is within distance 1 of a
    /// sample point
    pub direct: bool,
    pub cube_count: usize,
    pub empty_cubes: usize,
    pub probe_count: usize,
    pub uncovered_probes: usize,
}

/// The coverage certificate from the grid argument plus the probe-based
/// direct verification. The certificate only guards the union of interior
/// cubes; the probe check covers the boundary band as well.
pub fn check_core_coverage(cloud: &PointCloud, r: f64) -> Result<CoverageCheck> {
    if !(r > 0.0) {
        return Err(CrackleError::OutOfRange {
            name: "R",
            value: r,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }
    let d = cloud.dim();
    let grid = CoverageGrid::new(d, r);
    let index: HashMap<&[i64], usize> = grid
        .cubes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_slice(), i))
        .collect();
    let mut occupied = vec![false; grid.cubes.len()];
    for p in cloud.iter_points() {
        let key = cell_key(p, grid.g);
        if let Some(&i) = index.get(key.as_slice()) {
            occupied[i] = true;
        }
    }
    let empty_cubes = occupied.iter().filter(|&&o| !o).count();
    let certificate = empty_cubes == 0;

    // Direct probe check against unit balls around the sample points.
    let hash = SpatialHash::build(cloud, 1.0);
    let mut probe_count = 0usize;
    let mut uncovered = 0usize;
    let lim = (r / PROBE_SPACING).floor() as i64;
    let mut idx = vec![-lim; d];
    'outer: loop {
        let probe: Vec<f64> = idx.iter().map(|&i| i as f64 * PROBE_SPACING).collect();
        if probe.iter().map(|v| v * v).sum::<f64>() <= r * r {
            probe_count += 1;
            if !hash.any_within(&probe, 1.0) {
                uncovered += 1;
            }
        }
        let mut axis = 0;
        loop {
            if axis == d {
                break 'outer;
            }
            idx[axis] += 1;
            if idx[axis] <= lim {
                break;
            }
            idx[axis] = -lim;
            axis += 1;
        }
    }
    Ok(CoverageCheck {
        certificate,
        direct: uncovered == 0,
        cube_count: grid.cubes.len(),
        empty_cubes,
        probe_count,
        uncovered_probes: uncovered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::PointCloud;

    fn cloud_from(d: usize, pts: &[f64]) -> PointCloud {
        let meta = PointCloud::external_meta(d, pts.len() / d);
        PointCloud::from_coords(d, pts.to_vec(), meta).unwrap()
    }

    #[test]
    fn meb_single_point() {
        let p: &[f64] = &[0.0, 0.0];
        let b = min_enclosing_ball(&[p]).unwrap();
        assert_eq!(b.center, vec![0.0, 0.0]);
        assert_eq!(b.radius, 0.0);
    }

    #[test]
    fn meb_diametral_pair() {
        let (a, b): (&[f64], &[f64]) = (&[0.0, 0.0], &[2.0, 0.0]);
        let ball = min_enclosing_ball(&[a, b]).unwrap();
        assert!((ball.radius - 1.0).abs() < 1e-12);
        assert!((ball.center[0] - 1.0).abs() < 1e-12);
        assert!(ball.center[1].abs() < 1e-12);
    }

    #[test]
    fn meb_equilateral_triangle() {
        // side sqrt(3) has circumradius 1
        let s = 3.0f64.sqrt();
        let pts = equilateral(s);
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let ball = min_enclosing_ball(&refs).unwrap();
        assert!((ball.radius - 1.0).abs() < 1e-9, "radius {}", ball.radius);
    }

    fn equilateral(side: f64) -> Vec<Vec<f64>> {
        vec![
            vec![0.0, 0.0],
            vec![side, 0.0],
            vec![side / 2.0, side * 3.0f64.sqrt() / 2.0],
        ]
    }

    #[test]
    fn meb_collinear_is_diametral() {
        let pts: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0]];
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let ball = min_enclosing_ball(&refs).unwrap();
        assert!((ball.radius - 1.5).abs() < 1e-9);
        assert!((ball.center[0] - 1.5).abs() < 1e-9);
    }

    #[test]
    fn face_test_boundary_pair() {
        let (a, b): (&[f64], &[f64]) = (&[0.0, 0.0], &[2.0, 0.0]);
        assert!(cech_face_test(&[a, b], 1.0).unwrap());
        let (a, b): (&[f64], &[f64]) = (&[0.0, 0.0], &[2.1, 0.0]);
        assert!(!cech_face_test(&[a, b], 1.0).unwrap());
    }

    #[test]
    fn face_test_triangles() {
        let t19 = equilateral(1.9);
        let refs: Vec<&[f64]> = t19.iter().map(|p| p.as_slice()).collect();
        let ball = min_enclosing_ball(&refs).unwrap();
        assert!((ball.radius - 1.9 / 3.0f64.sqrt()).abs() < 1e-9); // 1.0970
        assert!(!cech_face_test(&refs, 1.0).unwrap());

        let t15 = equilateral(1.5);
        let refs: Vec<&[f64]> = t15.iter().map(|p| p.as_slice()).collect();
        let ball = min_enclosing_ball(&refs).unwrap();
        assert!((ball.radius - 0.8660254037844387).abs() < 1e-9);
        assert!(cech_face_test(&refs, 1.0).unwrap());
    }

    #[test]
    fn proximity_threshold_pair() {
        let cloud = cloud_from(2, &[0.0, 0.0, 2.0, 0.0]);
        let edges = proximity_graph(&cloud, 1.0).unwrap();
        assert_eq!(edges, vec![(0, 1)]);
    }

    #[test]
    fn proximity_circle_12() {
        // 12 points on a circle of radius 3: only consecutive pairs are
        // within 2 (chord 1.5529), skip chords are 3.
        let mut pts = Vec::new();
        for i in 0..12 {
            let th = 2.0 * std::f64::consts::PI * i as f64 / 12.0;
            pts.push(3.0 * th.cos());
            pts.push(3.0 * th.sin());
        }
        let cloud = cloud_from(2, &pts);
        let edges = proximity_graph(&cloud, 1.0).unwrap();
        assert_eq!(edges.len(), 12);
        for (i, j) in &edges {
            assert!((j - i == 1) || (*i == 0 && *j == 11));
        }
    }

    #[test]
    fn proximity_empty() {
        let meta = PointCloud::external_meta(2, 0);
        let cloud = PointCloud::from_coords(2, vec![], meta).unwrap();
        assert!(proximity_graph(&cloud, 1.0).unwrap().is_empty());
    }

    #[test]
    fn coverage_single_point_small_ball() {
        let cloud = cloud_from(2, &[0.0, 0.0]);
        let chk = check_core_coverage(&cloud, 0.5).unwrap();
        assert!(chk.direct, "all of B_0.5 is within 1 of the origin");
    }

    #[test]
    fn coverage_empty_cloud() {
        let meta = PointCloud::external_meta(2, 0);
        let cloud = PointCloud::from_coords(2, vec![], meta).unwrap();
        let chk = check_core_coverage(&cloud, 1.0).unwrap();
        assert!(!chk.certificate);
        assert!(!chk.direct);
        assert!(chk.cube_count > 0);
    }

    #[test]
    fn coverage_deleted_cell_fails_certificate() {
        // dense grid of points, then delete everything in one interior cube
        let d = 2;
        let r = 2.0;
        let grid = CoverageGrid::new(d, r);
        let g = grid.g;
        let victim = grid
            .cubes
            .iter()
            .find(|c| c.iter().all(|&x| x == 0))
            .expect("origin cube inside B_2")
            .clone();
        let mut pts = Vec::new();
        let mut x = -2.5;
        while x < 2.5 {
            let mut y = -2.5;
            while y < 2.5 {
                let cx = (x / g).floor() as i64;
                let cy = (y / g).floor() as i64;
                if !(cx == victim[0] && cy == victim[1]) {
                    pts.push(x);
                    pts.push(y);
                }
                y += 0.05;
            }
            x += 0.05;
        }
        let cloud = cloud_from(2, &pts);
        let chk = check_core_coverage(&cloud, r).unwrap();
        assert!(!chk.certificate);
        assert_eq!(chk.empty_cubes, 1);
        // the deleted cube is tiny; its probes are still within 1 of nearby points
        assert!(chk.direct);
    }

    #[test]
    fn certificate_monotone_in_radius() {
        let cloud = cloud_from(
            2,
            &{
                let mut pts = Vec::new();
                let mut x = -3.0;
                while x < 3.0 {
                    let mut y = -3.0;
                    while y < 3.0 {
                        pts.push(x);
                        pts.push(y);
                        y += 0.2;
                    }
                    x += 0.2;
                }
                pts
            },
        );
        let big = check_core_coverage(&cloud, 2.5).unwrap();
        assert!(big.certificate);
        for r in [2.0, 1.5, 1.0, 0.5] {
            assert!(check_core_coverage(&cloud, r).unwrap().certificate);
        }
    }
}

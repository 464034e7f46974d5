//! Point-cloud generation for the three spherically symmetric noise models:
//! power-law `c_p / (1 + |x|^alpha)`, exponential `c_e e^{-|x|}`, and
//! standard Gaussian `c_g e^{-|x|^2/2}`.
//!
//! Sampling is exact where the radial law has a named distribution
//! (Gaussian: per-coordinate normals; exponential: Gamma(d, 1) radius) and
//! uses a tabulated inverse CDF for the power law. Everything is
//! deterministic under a fixed seed (see [`crate::rng`]).

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{CrackleError, Result};
use crate::numerics::{reg_lower_gamma_half, sphere_surface_area, GaussLegendre};
use crate::rng::seeded_rng;

/// Relative tolerance for the closed-form vs quadrature normalization check.
pub const NORMALIZATION_CHECK_RTOL: f64 = 1e-8;

/// Absolute CDF tolerance delivered by [`DistributionSpec::radial_quantile`].
pub const QUANTILE_CDF_TOL: f64 = 1e-10;

/// Number of equal-probability knots in the power-law quantile table.
const QUANTILE_KNOTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    PowerLaw,
    Exponential,
    Gaussian,
}

impl std::fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NoiseKind::PowerLaw => write!(f, "powerlaw"),
            NoiseKind::Exponential => write!(f, "exponential"),
            NoiseKind::Gaussian => write!(f, "gaussian"),
        }
    }
}

/// Serializable identity of a noise model (what goes into file envelopes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionParams {
    pub kind: NoiseKind,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

/// A validated noise model: parameters plus the cached normalization
/// constant and, for the power law, the cached quantile table.
#[derive(Debug, Clone)]
pub struct DistributionSpec {
    params: DistributionParams,
    c: f64,
    power_law: Option<Arc<PowerLawRadial>>,
}

impl DistributionSpec {
    pub fn new(kind: NoiseKind, d: usize, alpha: Option<f64>) -> Result<Self> {
        if d < 1 {
            return Err(CrackleError::BadDimension(d));
        }
        let alpha = match kind {
            NoiseKind::PowerLaw => {
                let a = alpha.ok_or(CrackleError::MissingAlpha)?;
                if !(a > d as f64) || !a.is_finite() {
                    return Err(CrackleError::NonIntegrableTail { alpha: a, d });
                }
                Some(a)
            }
            _ => None,
        };
        let params = DistributionParams { kind, d, alpha };
        let c = normalization_constant(kind, d, alpha)?;
        // The cached constant must integrate the density to 1; verify
        // against the independent quadrature route.
        let c_quad = normalization_constant_quadrature(kind, d, alpha)?;
        let rel = ((c - c_quad) / c).abs();
        assert!(
            rel <= NORMALIZATION_CHECK_RTOL,
            "normalization constant disagreement: closed {c} vs quadrature {c_quad} (rel {rel:.3e})"
        );
        let power_law = match kind {
            NoiseKind::PowerLaw => Some(Arc::new(PowerLawRadial::build(d, alpha.unwrap())?)),
            _ => None,
        };
        Ok(Self {
            params,
            c,
            power_law,
        })
    }

    pub fn from_params(p: DistributionParams) -> Result<Self> {
        Self::new(p.kind, p.d, p.alpha)
    }

    pub fn kind(&self) -> NoiseKind {
        self.params.kind
    }

    pub fn dim(&self) -> usize {
        self.params.d
    }

    pub fn alpha(&self) -> Option<f64> {
        self.params.alpha
    }

    pub fn params(&self) -> DistributionParams {
        self.params
    }

    /// The normalization constant c with ∫ c·shape(|x|) dx = 1.
    pub fn normalization(&self) -> f64 {
        self.c
    }

    /// Density value at a point of the ambient space.
    pub fn density(&self, x: &[f64]) -> f64 {
        let r = norm(x);
        self.c * self.shape(r)
    }

    /// Radial profile of the density without the normalization constant.
    pub fn shape(&self, r: f64) -> f64 {
        match self.params.kind {
            NoiseKind::PowerLaw => 1.0 / (1.0 + r.powf(self.params.alpha.unwrap())),
            NoiseKind::Exponential => (-r).exp(),
            NoiseKind::Gaussian => (-0.5 * r * r).exp(),
        }
    }

    /// CDF of the radius |X|.
    pub fn radial_cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let d = self.params.d;
        match self.params.kind {
            NoiseKind::PowerLaw => self.power_law.as_ref().unwrap().cdf(r),
            // |X| ~ Gamma(d, 1)
            NoiseKind::Exponential => reg_lower_gamma_half(2 * d, r),
            // |X| ~ chi_d, CDF = P(d/2, r^2/2)
            NoiseKind::Gaussian => reg_lower_gamma_half(d, 0.5 * r * r),
        }
    }

    /// Inverse of [`Self::radial_cdf`], accurate to `QUANTILE_CDF_TOL` in
    /// CDF value. `u = 1` maps to infinity.
    pub fn radial_quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(CrackleError::OutOfRange {
                name: "u",
                value: u,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        if u == 1.0 {
            return Ok(f64::INFINITY);
        }
        match self.params.kind {
            NoiseKind::PowerLaw => Ok(self.power_law.as_ref().unwrap().quantile_refined(u)),
            _ => {
                // Bisect the closed-form CDF.
                let mut hi = 1.0;
                while self.radial_cdf(hi) < u {
                    hi *= 2.0;
                    if hi > 1e300 {
                        return Ok(f64::INFINITY);
                    }
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let g = self.radial_cdf(mid);
                    if (g - u).abs() <= QUANTILE_CDF_TOL {
                        return Ok(mid);
                    }
                    if g < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= f64::EPSILON * mid.max(1.0) {
                        break;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }

    /// Draw a point cloud. i.i.d. mode draws exactly `n` points;
    /// Poissonized mode first draws N ~ Poisson(n).
    pub fn sample_cloud(&self, n: u64, poissonized: bool, seed: u64) -> PointCloud {
        let mut rng = seeded_rng(seed);
        let n_actual = if poissonized && n > 0 {
            Poisson::new(n as f64).unwrap().sample(&mut rng) as u64
        } else {
            n
        };
        let d = self.params.d;
        let mut coords = Vec::with_capacity(n_actual as usize * d);
        match self.params.kind {
            NoiseKind::Gaussian => {
                for _ in 0..n_actual * d as u64 {
                    coords.push(rng.sample::<f64, _>(StandardNormal));
                }
            }
            NoiseKind::Exponential => {
                let gamma = Gamma::new(d as f64, 1.0).unwrap();
                for _ in 0..n_actual {
                    let r = gamma.sample(&mut rng);
                    push_direction_scaled(&mut coords, d, r, &mut rng);
                }
            }
            NoiseKind::PowerLaw => {
                let table = self.power_law.as_ref().unwrap();
                for _ in 0..n_actual {
                    let u: f64 = rng.random();
                    let r = table.quantile_sampling(u);
                    push_direction_scaled(&mut coords, d, r, &mut rng);
                }
            }
        }
        let cloud = PointCloud {
            d,
            coords,
            meta: CloudMeta {
                params: self.params,
                n_requested: n,
                poissonized,
                seed,
                n_actual,
            },
            source_indices: None,
        };
        debug_assert!(cloud.coords.iter().all(|v| v.is_finite()));
        cloud
    }
}

/// Uniform direction on S^{d-1} scaled to radius `r`, appended to `coords`.
fn push_direction_scaled<R: Rng>(coords: &mut Vec<f64>, d: usize, r: f64, rng: &mut R) {
    let start = coords.len();
    let mut n2 = 0.0;
    for _ in 0..d {
        let g: f64 = rng.sample(StandardNormal);
        n2 += g * g;
        coords.push(g);
    }
    // A d-vector of independent normals is never the zero vector in
    // floating point for any practical stream; guard anyway.
    let scale = if n2 > 0.0 { r / n2.sqrt() } else { 0.0 };
    for v in &mut coords[start..] {
        *v *= scale;
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Closed-form normalization constants.
///
/// * Gaussian: (2π)^{-d/2}
/// * Exponential: 1 / (s_{d-1} Γ(d))
/// * Power law: α sin(π d / α) / (π s_{d-1}) from
///   ∫_0^∞ r^{d-1} / (1 + r^α) dr = (π/α) / sin(π d / α).
pub fn normalization_constant(kind: NoiseKind, d: usize, alpha: Option<f64>) -> Result<f64> {
    if d < 1 {
        return Err(CrackleError::BadDimension(d));
    }
    let s = sphere_surface_area(d);
    match kind {
        NoiseKind::Gaussian => Ok((2.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0)),
        NoiseKind::Exponential => Ok(1.0 / (s * crate::numerics::gamma_half_integer(2 * d))),
        NoiseKind::PowerLaw => {
            let a = alpha.ok_or(CrackleError::MissingAlpha)?;
            if !(a > d as f64) {
                return Err(CrackleError::NonIntegrableTail { alpha: a, d });
            }
            let radial = (std::f64::consts::PI / a) / (std::f64::consts::PI * d as f64 / a).sin();
            Ok(1.0 / (s * radial))
        }
    }
}

/// Normalization constant by numeric quadrature of
/// s_{d-1} ∫_0^∞ r^{d-1} shape(r) dr, with no use of the closed forms.
pub fn normalization_constant_quadrature(
    kind: NoiseKind,
    d: usize,
    alpha: Option<f64>,
) -> Result<f64> {
    if d < 1 {
        return Err(CrackleError::BadDimension(d));
    }
    let s = sphere_surface_area(d);
    let gl = GaussLegendre::new(32);
    let radial = match kind {
        NoiseKind::Gaussian => {
            let shape = |r: f64| r.powi(d as i32 - 1) * (-0.5 * r * r).exp();
            let hi = (d as f64).sqrt() + 40.0;
            panels_integral(&gl, shape, hi)
        }
        NoiseKind::Exponential => {
            let shape = |r: f64| r.powi(d as i32 - 1) * (-r).exp();
            let hi = d as f64 + 50.0 * (d as f64).sqrt() + 60.0;
            panels_integral(&gl, shape, hi)
        }
        NoiseKind::PowerLaw => {
            let a = alpha.ok_or(CrackleError::MissingAlpha)?;
            if !(a > d as f64) {
                return Err(CrackleError::NonIntegrableTail { alpha: a, d });
            }
            let shape = |r: f64| r.powf(d as f64 - 1.0) / (1.0 + r.powf(a));
            // Quadrature to r = 8, analytic alternating tail beyond.
            let cut = 8.0;
            let mut acc = 0.0;
            let panels = 64;
            for i in 0..panels {
                let a0 = cut * i as f64 / panels as f64;
                let a1 = cut * (i + 1) as f64 / panels as f64;
                acc += gl.integrate(a0, a1, shape);
            }
            acc + power_law_tail_raw(d as f64, a, cut)
        }
    };
    Ok(1.0 / (s * radial))
}

fn panels_integral<F: Fn(f64) -> f64>(gl: &GaussLegendre, f: F, hi: f64) -> f64 {
    let panels = 80;
    let mut acc = 0.0;
    for i in 0..panels {
        let a0 = hi * i as f64 / panels as f64;
        let a1 = hi * (i + 1) as f64 / panels as f64;
        acc += gl.integrate(a0, a1, &f);
    }
    acc
}

/// ∫_t^∞ r^{d-1}/(1+r^α) dr as the alternating series
/// Σ_{m>=1} (-1)^{m+1} t^{d-mα}/(mα-d); requires t^{-α} < 1/2.
fn power_law_tail_raw(d: f64, alpha: f64, t: f64) -> f64 {
    debug_assert!(t.powf(-alpha) < 0.5);
    let mut acc = 0.0;
    let mut sign = 1.0;
    for m in 1..400 {
        let ma = m as f64 * alpha;
        let term = t.powf(d - ma) / (ma - d);
        acc += sign * term;
        if term < acc.abs() * 1e-17 + 1e-300 {
            break;
        }
        sign = -sign;
    }
    acc
}

/// Tabulated radial law of the power-law model.
///
/// `mesh` holds cumulative CDF anchors (r_i, G_i) from marching
/// Gauss-Legendre quadrature; `knot_r`/`knot_slope` hold the
/// equal-probability quantile table used for O(1) sampling, with knots
/// solved to 1e-10 in CDF by bisection. Queries in the outer 1/64 of
/// either tail go through the analytic series instead of the table.
#[derive(Debug)]
struct PowerLawRadial {
    d: f64,
    alpha: f64,
    /// normalizing radial integral ∫_0^∞ r^{d-1}/(1+r^α) dr (numeric)
    total: f64,
    mesh_r: Vec<f64>,
    mesh_cdf: Vec<f64>,
    knot_r: Vec<f64>,
    knot_slope: Vec<f64>,
    gl: GaussLegendre,
}

impl PowerLawRadial {
    fn build(d_usize: usize, alpha: f64) -> Result<Self> {
        let d = d_usize as f64;
        let gl = GaussLegendre::new(16);
        let gl32 = GaussLegendre::new(32);
        let shape = |r: f64| r.powf(d - 1.0) / (1.0 + r.powf(alpha));

        // March the cumulative raw integral outward: uniform to 1, then
        // geometric steps, until the analytic tail is valid and holds less
        // than one knot interval of mass.
        let mut mesh_r = vec![0.0];
        let mut mesh_raw = vec![0.0];
        let mut r = 0.0;
        let mut raw = 0.0;
        for i in 1..=64 {
            let next = i as f64 / 64.0;
            raw += gl32.integrate(r, next, shape);
            r = next;
            mesh_r.push(r);
            mesh_raw.push(raw);
        }
        let growth = 2f64.powf(1.0 / 16.0);
        let mut tail_raw;
        loop {
            let next = r * growth;
            raw += gl32.integrate(r, next, shape);
            r = next;
            mesh_r.push(r);
            mesh_raw.push(raw);
            if r >= 4.0 {
                tail_raw = power_law_tail_raw(d, alpha, r);
                if tail_raw / (raw + tail_raw) < 1.0 / (2.0 * QUANTILE_KNOTS as f64) {
                    break;
                }
            }
            if r > 1e250 {
                return Err(CrackleError::OutOfRange {
                    name: "power-law tail quantile (alpha too close to d for f64)",
                    value: r,
                    lo: 0.0,
                    hi: 1e250,
                });
            }
        }
        let total = raw + tail_raw;
        let mesh_cdf: Vec<f64> = mesh_raw.iter().map(|v| v / total).collect();

        // Solve the equal-probability knots by bisection within mesh brackets.
        let mut knot_r = vec![0.0; QUANTILE_KNOTS + 1];
        let mut knot_slope = vec![0.0; QUANTILE_KNOTS + 1];
        let mut table = Self {
            d,
            alpha,
            total,
            mesh_r,
            mesh_cdf,
            knot_r: Vec::new(),
            knot_slope: Vec::new(),
            gl,
        };
        for j in 1..QUANTILE_KNOTS {
            let u = j as f64 / QUANTILE_KNOTS as f64;
            let rj = table.bisect_quantile(u);
            knot_r[j] = rj;
            knot_slope[j] = 1.0 / table.pdf(rj);
        }
        knot_r[QUANTILE_KNOTS] = f64::INFINITY;
        // Monotone (Fritsch-Carlson style) slope limiting for the cubic.
        let h = 1.0 / QUANTILE_KNOTS as f64;
        for j in 1..QUANTILE_KNOTS - 1 {
            let d_left = (knot_r[j] - knot_r[j - 1]) / h;
            let d_right = (knot_r[j + 1] - knot_r[j]) / h;
            let cap = 3.0 * d_left.min(d_right).max(0.0);
            if j > 1 && knot_slope[j] > cap {
                knot_slope[j] = cap;
            }
        }
        table.knot_r = knot_r;
        table.knot_slope = knot_slope;
        Ok(table)
    }

    /// Normalized radial density.
    fn pdf(&self, r: f64) -> f64 {
        r.powf(self.d - 1.0) / (1.0 + r.powf(self.alpha)) / self.total
    }

    /// CDF via mesh anchor plus a local quadrature step.
    fn cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let last = *self.mesh_r.last().unwrap();
        if r >= last {
            return 1.0 - power_law_tail_raw(self.d, self.alpha, r) / self.total;
        }
        let i = match self
            .mesh_r
            .binary_search_by(|probe| probe.partial_cmp(&r).unwrap())
        {
            Ok(i) => return self.mesh_cdf[i],
            Err(i) => i - 1,
        };
        let shape = |t: f64| t.powf(self.d - 1.0) / (1.0 + t.powf(self.alpha));
        self.mesh_cdf[i] + self.gl.integrate(self.mesh_r[i], r, shape) / self.total
    }

    /// Bisection solve of cdf(r) = u to `QUANTILE_CDF_TOL`.
    fn bisect_quantile(&self, u: f64) -> f64 {
        debug_assert!(u > 0.0 && u < 1.0);
        // Bracket from the mesh.
        let i = match self
            .mesh_cdf
            .binary_search_by(|probe| probe.partial_cmp(&u).unwrap())
        {
            Ok(i) => return self.mesh_r[i],
            Err(i) => i,
        };
        let (mut lo, mut hi) = if i == 0 {
            (0.0, self.mesh_r[0])
        } else if i >= self.mesh_r.len() {
            // Beyond the mesh: expand in the analytic tail.
            let mut lo = *self.mesh_r.last().unwrap();
            let mut hi = lo * 2.0;
            while self.cdf(hi) < u {
                lo = hi;
                hi *= 2.0;
                if hi > 1e290 {
                    return f64::INFINITY;
                }
            }
            (lo, hi)
        } else {
            (self.mesh_r[i - 1], self.mesh_r[i])
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let g = self.cdf(mid);
            if (g - u).abs() <= QUANTILE_CDF_TOL {
                return mid;
            }
            if g < u {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * mid.max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Quantile used by the exact op: table bracket + bisection refinement.
    fn quantile_refined(&self, u: f64) -> f64 {
        self.bisect_quantile(u)
    }

    /// Fast quantile for bulk sampling: analytic Newton in the outer 1/64
    /// of either tail, monotone cubic between the table knots elsewhere.
    fn quantile_sampling(&self, u: f64) -> f64 {
        debug_assert!((0.0..1.0).contains(&u));
        if u <= 0.0 {
            return 0.0;
        }
        if u < 1.0 / 64.0 {
            if let Some(r) = self.lower_series_newton(u) {
                return r;
            }
            return self.bisect_quantile(u);
        }
        if u > 1.0 - 1.0 / 64.0 {
            if let Some(r) = self.tail_series_newton(u) {
                return r;
            }
            return self.bisect_quantile(u);
        }
        let h = 1.0 / QUANTILE_KNOTS as f64;
        let j = ((u * QUANTILE_KNOTS as f64) as usize).clamp(1, QUANTILE_KNOTS - 2);
        let t = (u - j as f64 * h) / h;
        let (r0, r1) = (self.knot_r[j], self.knot_r[j + 1]);
        let (m0, m1) = (self.knot_slope[j] * h, self.knot_slope[j + 1] * h);
        // cubic Hermite basis
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * r0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * r1
            + (t3 - t2) * m1
    }

    /// Newton on the small-r alternating series of the CDF; valid only when
    /// the solution is comfortably below 1.
    fn lower_series_newton(&self, u: f64) -> Option<f64> {
        let (d, a) = (self.d, self.alpha);
        let mut r = (d * self.total * u).powf(1.0 / d);
        if !(r < 0.8) {
            return None;
        }
        for _ in 0..64 {
            let mut g = 0.0;
            let mut sign = 1.0;
            for m in 0..200 {
                let e = d + m as f64 * a;
                let term = r.powf(e) / e;
                g += sign * term;
                if term < 1e-18 * g.abs() + 1e-300 {
                    break;
                }
                sign = -sign;
            }
            g /= self.total;
            let step = (g - u) / self.pdf(r);
            r -= step;
            if !(r > 0.0 && r < 0.9) {
                return None;
            }
            if step.abs() <= 1e-15 * r {
                return Some(r);
            }
        }
        Some(r)
    }

    /// Newton in log-radius on the analytic tail; valid when r^{-alpha} < 1/2.
    fn tail_series_newton(&self, u: f64) -> Option<f64> {
        let (d, a) = (self.d, self.alpha);
        let q = (1.0 - u) * self.total; // raw tail mass target
        // leading-order start: q ≈ r^{d-a}/(a-d)
        let mut ln_r = (q * (a - d)).ln() / (d - a);
        if ln_r > 690.0 {
            return Some(f64::INFINITY);
        }
        let r0 = ln_r.exp();
        if r0.powf(-a) >= 0.5 {
            return None;
        }
        for _ in 0..64 {
            let r = ln_r.exp();
            let tail = power_law_tail_raw(d, a, r);
            // d tail / d ln r = -r * r^{d-1}/(1+r^a)
            let deriv = -r.powf(d) / (1.0 + r.powf(a));
            let step = (tail - q) / deriv;
            ln_r -= step;
            if step.abs() <= 1e-15 {
                return Some(ln_r.exp());
            }
            if ln_r > 700.0 {
                return Some(f64::INFINITY);
            }
        }
        Some(ln_r.exp())
    }
}

/// Metadata attached to every generated cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudMeta {
    #[serde(flatten)]
    pub params: DistributionParams,
    pub n_requested: u64,
    pub poissonized: bool,
    pub seed: u64,
    pub n_actual: u64,
}

/// A finite set of points in R^d, stored flat in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    d: usize,
    coords: Vec<f64>,
    pub meta: CloudMeta,
    /// Indices into the cloud this one was filtered from, if any.
    pub source_indices: Option<Vec<usize>>,
}

impl PointCloud {
    /// Wrap raw coordinates (used by file import and tests).
    pub fn from_coords(d: usize, coords: Vec<f64>, meta: CloudMeta) -> Result<Self> {
        if d < 1 {
            return Err(CrackleError::BadDimension(d));
        }
        if !coords.len().is_multiple_of(d) {
            return Err(CrackleError::DimensionMismatch {
                expected: d,
                got: coords.len() % d,
            });
        }
        if !coords.iter().all(|v| v.is_finite()) {
            return Err(CrackleError::Parse("non-finite coordinate".into()));
        }
        Ok(Self {
            d,
            coords,
            meta,
            source_indices: None,
        })
    }

    /// Metadata for a cloud not produced by a sampler.
    pub fn external_meta(d: usize, n: usize) -> CloudMeta {
        CloudMeta {
            params: DistributionParams {
                kind: NoiseKind::Gaussian,
                d,
                alpha: None,
            },
            n_requested: n as u64,
            poissonized: false,
            seed: 0,
            n_actual: n as u64,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norms(&self) -> Vec<f64> {
        self.iter_points().map(norm).collect()
    }

    /// Keep exactly the points with a <= |x| < b, remembering their
    /// original indices.
    pub fn annulus_filter(&self, a: f64, b: f64) -> Result<PointCloud> {
        if !(a >= 0.0 && a < b) {
            return Err(CrackleError::BadAnnulus { a, b });
        }
        let mut coords = Vec::new();
        let mut kept = Vec::new();
        for (i, p) in self.iter_points().enumerate() {
            let r = norm(p);
            if r >= a && r < b {
                kept.push(i);
                coords.extend_from_slice(p);
            }
        }
        let mut meta = self.meta;
        meta.n_actual = kept.len() as u64;
        Ok(PointCloud {
            d: self.d,
            coords,
            meta,
            source_indices: Some(kept),
        })
    }
}

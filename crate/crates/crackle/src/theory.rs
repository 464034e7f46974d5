//! Closed-form constants and limit formulas of the three noise models:
//! core coverage radii, per-degree critical radii, the limit constants
//! μ (closed form at k = 0, Monte Carlo for k >= 1), and the predicted
//! scaling of the expected Betti numbers outside the core.
//!
//! Iterated logarithms are natural logs throughout.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CrackleError, Result};
use crate::homology::minimal_cycle_indicator_fast;
use crate::numerics::{ball_volume, factorial, sphere_surface_area};
use crate::rng::chunk_rng;
use crate::sampler::{normalization_constant, NoiseKind};

/// Support radius of the Monte Carlo proposal for the T_k integrals: the
/// integrand vanishes whenever an offset strays further than this from the
/// origin, since a configuration with a point more than 2 from all others
/// is disconnected at unit radius and carries no minimal cycle.
pub const MU_PROPOSAL_RADIUS: f64 = 4.0;

/// Draws per Monte Carlo chunk; the chunk count is a pure function of the
/// budget, so estimates are bit-identical regardless of thread count.
const MU_CHUNK: u64 = 1 << 16;

/// δ constants of the core-radius formulas. The statement and proof forms
/// are both evaluated and must agree; a disagreement would mean a
/// transcription error.
pub fn delta_constant(kind: NoiseKind, d: usize, alpha: Option<f64>) -> Result<f64> {
    let c = normalization_constant(kind, d, alpha)?;
    let df = d as f64;
    let g = 1.0 / (2.0 * df.sqrt());
    let value = match kind {
        NoiseKind::PowerLaw => {
            let a = alpha.ok_or(CrackleError::MissingAlpha)?;
            c * a * 2f64.powi(-(d as i32)) * df.powf(-(1.0 + df / 2.0))
        }
        NoiseKind::Exponential => {
            let statement = (1.0 + df / 2.0) * df.ln() + df * 2f64.ln() - c.ln();
            let proof = df.ln() - c.ln() - df * g.ln();
            assert!(
                (statement - proof).abs() <= 1e-10 * statement.abs().max(1.0),
                "delta_e forms disagree: {statement} vs {proof}"
            );
            statement
        }
        NoiseKind::Gaussian => {
            let statement = (1.0 + df / 2.0) * df.ln() + (df - 1.0) * 2f64.ln() - c.ln();
            let proof = (df / 2.0).ln() - c.ln() - df * g.ln();
            assert!(
                (statement - proof).abs() <= 1e-10 * statement.abs().max(1.0),
                "delta_g forms disagree: {statement} vs {proof}"
            );
            statement
        }
    };
    Ok(value)
}

fn iterated_logs(n: u64, depth: u32) -> Result<f64> {
    let (formula, min_n) = match depth {
        1 => ("ln n", 2),
        2 => ("ln ln n", 3),
        _ => ("ln ln ln n", 16),
    };
    if n < min_n {
        return Err(CrackleError::IteratedLogUndefined { formula, min_n, n });
    }
    let mut v = (n as f64).ln();
    for _ in 1..depth {
        v = v.ln();
    }
    Ok(v)
}

/// Core radius R_n^c: the largest radius at which the grid argument
/// certifies that unit balls cover B_R with probability tending to one.
pub fn core_radius(kind: NoiseKind, n: u64, d: usize, alpha: Option<f64>, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(CrackleError::OutOfRange {
            name: "epsilon",
            value: epsilon,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }
    let delta = delta_constant(kind, d, alpha)?;
    let ln1 = iterated_logs(n, 1)?;
    match kind {
        NoiseKind::PowerLaw => {
            let a = alpha.ok_or(CrackleError::MissingAlpha)?;
            let ln2 = iterated_logs(n, 2)?;
            let denom = ln1 - (-epsilon).exp() * ln2;
            let arg = delta * n as f64 / denom - 1.0;
            if denom <= 0.0 || arg <= 0.0 {
                return Err(CrackleError::CoreRadiusUndefined { n, arg });
            }
            Ok(arg.powf(1.0 / a))
        }
        NoiseKind::Exponential => {
            let ln3 = iterated_logs(n, 3)?;
            let r = ln1 - ln3 - delta - epsilon;
            if r <= 0.0 {
                return Err(CrackleError::CoreRadiusUndefined { n, arg: r });
            }
            Ok(r)
        }
        NoiseKind::Gaussian => {
            let ln3 = iterated_logs(n, 3)?;
            let arg = ln1 - ln3 - delta - epsilon;
            if arg <= 0.0 {
                return Err(CrackleError::CoreRadiusUndefined { n, arg });
            }
            Ok((2.0 * arg).sqrt())
        }
    }
}

/// Critical radius R_{k,n}^ε. The exponent ε may be negative, zero or
/// positive; zero gives the radius at which E[β_k] converges to μ_k.
/// The Gaussian model defines only the k = 0 radius.
pub fn critical_radius(
    kind: NoiseKind,
    k: usize,
    n: u64,
    d: usize,
    alpha: Option<f64>,
    epsilon_exponent: f64,
) -> Result<f64> {
    if d < 1 {
        return Err(CrackleError::BadDimension(d));
    }
    if k >= d {
        return Err(CrackleError::BadHomologyDegree { k, max: d - 1 });
    }
    let df = d as f64;
    match kind {
        NoiseKind::PowerLaw => {
            let a = alpha.ok_or(CrackleError::MissingAlpha)?;
            if !(a > df) {
                return Err(CrackleError::NonIntegrableTail { alpha: a, d });
            }
            let base = if k == 0 {
                1.0 / (a - df)
            } else {
                1.0 / (a - df / (k as f64 + 2.0))
            };
            Ok((n as f64).powf(base + epsilon_exponent))
        }
        NoiseKind::Exponential => {
            let ln1 = iterated_logs(n, 1)?;
            let ln2 = iterated_logs(n, 2)?;
            let coeff = if k == 0 {
                df - 1.0 + epsilon_exponent
            } else {
                (df - 1.0) / (k as f64 + 2.0) + epsilon_exponent
            };
            Ok(ln1 + coeff * ln2)
        }
        NoiseKind::Gaussian => {
            if k > 0 {
                return Err(CrackleError::GaussianCriticalRadius(k));
            }
            let ln1 = iterated_logs(n, 1)?;
            let ln2 = iterated_logs(n, 2)?;
            let arg = 2.0 * ln1 + (df - 2.0 + epsilon_exponent) * ln2;
            if arg <= 0.0 {
                return Err(CrackleError::CoreRadiusUndefined { n, arg });
            }
            Ok(arg.sqrt())
        }
    }
}

/// A Monte Carlo (or exact) estimate of a limit constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Limit constant μ_k of the expected Betti numbers.
///
/// k = 0 has closed forms (std_error 0). For k >= 1 the T_k integral is
/// estimated by importance-weighted Monte Carlo over the bounded proposal
/// support B_4^{k+1}; for the exponential model the extra ρ integral is
/// sampled from the density (k+2) e^{-(k+2)ρ} with weight 1/(k+2).
pub fn mu_constant(
    kind: NoiseKind,
    k: usize,
    d: usize,
    alpha: Option<f64>,
    mc_budget: u64,
    seed: u64,
) -> Result<MuEstimate> {
    if d < 1 {
        return Err(CrackleError::BadDimension(d));
    }
    if k >= d {
        return Err(CrackleError::BadHomologyDegree { k, max: d - 1 });
    }
    let s = sphere_surface_area(d);
    let c = normalization_constant(kind, d, alpha)?;
    match (kind, k) {
        (NoiseKind::Gaussian, _) => Err(CrackleError::GaussianMu),
        (NoiseKind::PowerLaw, 0) => {
            let a = alpha.unwrap();
            Ok(MuEstimate {
                value: s * c / (a - d as f64),
                std_error: 0.0,
            })
        }
        (NoiseKind::Exponential, 0) => Ok(MuEstimate {
            value: s * c,
            std_error: 0.0,
        }),
        (NoiseKind::PowerLaw, _) => {
            let a = alpha.unwrap();
            let prefactor =
                s * c.powi(k as i32 + 2) / ((a * (k as f64 + 2.0) - d as f64) * factorial(k + 2));
            let (mean, se) = mc_t_k_integral(kind, k, d, mc_budget, seed);
            Ok(MuEstimate {
                value: prefactor * mean,
                std_error: prefactor * se,
            })
        }
        (NoiseKind::Exponential, _) => {
            let prefactor = s * c.powi(k as i32 + 2) / factorial(k + 2);
            let (mean, se) = mc_t_k_integral(kind, k, d, mc_budget, seed);
            Ok(MuEstimate {
                value: prefactor * mean,
                std_error: prefactor * se,
            })
        }
    }
}

/// Monte Carlo estimate of the T_k integral (power law) or the weighted
/// T_k × exponential integral. Returns (mean, standard error) of the
/// per-draw estimator whose expectation is the integral value.
fn mc_t_k_integral(kind: NoiseKind, k: usize, d: usize, budget: u64, seed: u64) -> (f64, f64) {
    assert!(budget >= 2, "mc_budget must be at least 2");
    let volume = ball_volume(d, MU_PROPOSAL_RADIUS).powi(k as i32 + 1);
    let chunks = budget.div_ceil(MU_CHUNK);
    let partials: Vec<(f64, f64, u64)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(seed, chunk);
            let lo = chunk * MU_CHUNK;
            let hi = ((chunk + 1) * MU_CHUNK).min(budget);
            let mut sum = 0.0;
            let mut sum2 = 0.0;
            let mut points: Vec<Vec<f64>> = vec![vec![0.0; d]; k + 2];
            for _ in lo..hi {
                let x = mu_draw(kind, k, d, volume, &mut rng, &mut points);
                sum += x;
                sum2 += x * x;
            }
            (sum, sum2, hi - lo)
        })
        .collect();
    // merge in chunk order for bit-stable results
    let (mut sum, mut sum2, mut count) = (0.0, 0.0, 0u64);
    for (a, b, c) in partials {
        sum += a;
        sum2 += b;
        count += c;
    }
    let n = count as f64;
    let mean = sum / n;
    let var = (sum2 - sum * sum / n).max(0.0) / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn mu_draw<R: Rng>(
    kind: NoiseKind,
    k: usize,
    d: usize,
    volume: f64,
    rng: &mut R,
    points: &mut [Vec<f64>],
) -> f64 {
    // exponential model: ρ ~ Exp(k+2) by inverse CDF, weight 1/(k+2)
    let (rho, base_weight) = match kind {
        NoiseKind::Exponential => {
            let u: f64 = rng.random();
            (
                -(-u).ln_1p() / (k as f64 + 2.0),
                volume / (k as f64 + 2.0),
            )
        }
        _ => (0.0, volume),
    };
    points[0].iter_mut().for_each(|v| *v = 0.0);
    let mut weight = base_weight;
    for i in 1..k + 2 {
        // uniform in B_4: direction from normals, radius 4 u^{1/d}
        let u: f64 = rng.random();
        let r = MU_PROPOSAL_RADIUS * u.powf(1.0 / d as f64);
        let mut n2 = 0.0;
        for slot in points[i].iter_mut() {
            let g: f64 = rng.sample(rand_distr::StandardNormal);
            *slot = g;
            n2 += g * g;
        }
        let scale = if n2 > 0.0 { r / n2.sqrt() } else { 0.0 };
        points[i].iter_mut().for_each(|v| *v *= scale);
        if kind == NoiseKind::Exponential {
            let y1 = points[i][0];
            if y1 <= -rho {
                return 0.0;
            }
            weight *= (-y1).exp();
        }
    }
    let refs: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
    if minimal_cycle_indicator_fast(&refs, k) {
        weight
    } else {
        0.0
    }
}

/// The asymptotic prediction of E[β_{k,n}] at radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BettiPrediction {
    pub value: f64,
    /// the quantity the theorem requires to vanish (n R^{-α} or n e^{-R});
    /// for the Gaussian model the expected exterior point count
    pub regime_parameter: f64,
    /// whether the regime parameter is below 1 at these (n, R)
    pub regime_ok: bool,
}

/// Scaling × μ as the prediction of E[β_{k,n}]. For the Gaussian model the
/// prediction is exactly 0 with the regime carried for context.
pub fn predicted_mean_betti(
    kind: NoiseKind,
    k: usize,
    n: u64,
    r: f64,
    d: usize,
    alpha: Option<f64>,
    mu: f64,
) -> Result<BettiPrediction> {
    if d < 1 {
        return Err(CrackleError::BadDimension(d));
    }
    if k >= d {
        return Err(CrackleError::BadHomologyDegree { k, max: d - 1 });
    }
    let nf = n as f64;
    let df = d as f64;
    let m = k as f64 + 2.0;
    match kind {
        NoiseKind::PowerLaw => {
            let a = alpha.ok_or(CrackleError::MissingAlpha)?;
            let regime = nf * r.powf(-a);
            let scaling = if k == 0 {
                nf * r.powf(df - a)
            } else {
                nf.powi(k as i32 + 2) * r.powf(df - a * m)
            };
            Ok(BettiPrediction {
                value: scaling * mu,
                regime_parameter: regime,
                regime_ok: regime < 1.0,
            })
        }
        NoiseKind::Exponential => {
            let regime = nf * (-r).exp();
            let scaling = if k == 0 {
                nf * r.powf(df - 1.0) * (-r).exp()
            } else {
                nf.powi(k as i32 + 2) * r.powf(df - 1.0) * (-m * r).exp()
            };
            Ok(BettiPrediction {
                value: scaling * mu,
                regime_parameter: regime,
                regime_ok: regime < 1.0,
            })
        }
        NoiseKind::Gaussian => {
            let regime = nf * (-0.5 * r * r).exp() * r.powf(df - 2.0);
            Ok(BettiPrediction {
                value: 0.0,
                regime_parameter: regime,
                regime_ok: regime < 1.0,
            })
        }
    }
}

/// The full radius ladder of one model at one sample size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadiiSpec {
    pub kind: NoiseKind,
    pub n: u64,
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub epsilon: f64,
    /// core radius, when defined at this n
    pub core: Option<f64>,
    /// critical radii at exponent 0 for k = 0..=d-1 (Gaussian: k = 0 only)
    pub critical: Vec<Option<f64>>,
    pub delta: f64,
}

pub fn radii_spec(
    kind: NoiseKind,
    n: u64,
    d: usize,
    alpha: Option<f64>,
    epsilon: f64,
) -> Result<RadiiSpec> {
    let delta = delta_constant(kind, d, alpha)?;
    let core = core_radius(kind, n, d, alpha, epsilon).ok();
    let critical = (0..d)
        .map(|k| critical_radius(kind, k, n, d, alpha, 0.0).ok())
        .collect();
    Ok(RadiiSpec {
        kind,
        n,
        d,
        alpha,
        epsilon,
        core,
        critical,
        delta,
    })
}

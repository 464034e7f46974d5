//! Replicated end-to-end experiments: empirical Betti numbers of the
//! exterior complex against the theoretical scalings, coverage probability
//! of the core certificate, and layer profiles over a radius grid.
//!
//! A report is a deterministic function of its configuration: trial t uses
//! seed `base_seed ^ t`, trials run on independent streams, and every
//! aggregate folds per-trial records in trial order, so thread scheduling
//! never changes a byte of the output (the wall-time field is the one
//! exception and is zeroed by [`ExperimentReport::canonical_json`]).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cech::build_cech;
use crate::error::{CrackleError, Result};
use crate::geometry::{check_core_coverage, CoverageCheck};
use crate::homology::{betti_numbers, crackle_statistics, CrackleStats, DEFAULT_COMBINATORIAL_CAP};
use crate::sampler::{DistributionParams, DistributionSpec, NoiseKind};
use crate::theory::{self, MuEstimate};

/// How one radius of an experiment is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusRule {
    Explicit(f64),
    Core { epsilon: f64 },
    Critical { k: usize, epsilon: f64 },
}

impl RadiusRule {
    pub fn resolve(&self, p: &DistributionParams, n: u64) -> Result<f64> {
        match *self {
            RadiusRule::Explicit(r) => {
                if r > 0.0 && r.is_finite() {
                    Ok(r)
                } else {
                    Err(CrackleError::OutOfRange {
                        name: "radius",
                        value: r,
                        lo: f64::MIN_POSITIVE,
                        hi: f64::INFINITY,
                    })
                }
            }
            RadiusRule::Core { epsilon } => theory::core_radius(p.kind, n, p.d, p.alpha, epsilon),
            RadiusRule::Critical { k, epsilon } => {
                theory::critical_radius(p.kind, k, n, p.d, p.alpha, epsilon)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dist: DistributionParams,
    pub n: u64,
    pub trials: u64,
    pub radii: Vec<RadiusRule>,
    pub kmax: usize,
    #[serde(default)]
    pub poissonized: bool,
    pub base_seed: u64,
    #[serde(default = "default_cap")]
    pub combinatorial_cap: usize,
    /// Monte Carlo budget for μ_k (k >= 1) in the theory block; 0 skips them.
    #[serde(default)]
    pub mu_mc_budget: u64,
    /// Skip the subset statistics entirely (layer profiles set this).
    #[serde(default)]
    pub skip_crackle: bool,
}

fn default_cap() -> usize {
    DEFAULT_COMBINATORIAL_CAP
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(CrackleError::Config("trials must be >= 1".into()));
        }
        if self.kmax > self.dist.d {
            return Err(CrackleError::Config(format!(
                "kmax = {} exceeds the ambient dimension {}",
                self.kmax, self.dist.d
            )));
        }
        if self.radii.is_empty() {
            return Err(CrackleError::Config("at least one radius is required".into()));
        }
        Ok(())
    }

    pub fn resolve_radii(&self) -> Result<Vec<f64>> {
        self.radii
            .iter()
            .map(|r| r.resolve(&self.dist, self.n))
            .collect()
    }
}

/// Outcome of one (trial, radius) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusOutcome {
    pub r: f64,
    pub exterior_count: u64,
    pub betti: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crackle: Option<CrackleStats>,
    pub crackle_skipped: bool,
    /// Ŝ_k <= β_k <= Ŝ_k + L_k (and Ŝ_0 <= β_0 <= S_0) verified exactly
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sandwich_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub n_actual: u64,
    pub outcomes: Vec<RadiusOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<CoverageCheck>,
}

/// Mean and standard error of one Betti degree at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusAggregate {
    pub r: f64,
    pub mean_exterior: f64,
    pub betti: Vec<Aggregate>,
    /// trials whose subset statistics were skipped (cap exceeded)
    pub crackle_excluded: u64,
    pub failed_trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryBlock {
    pub mu: Vec<Option<MuEstimate>>,
    pub radii: Vec<f64>,
    /// predictions[radius][k]
    pub predictions: Vec<Vec<Option<theory::BettiPrediction>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub core_radius: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub code_version: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub radii: Vec<f64>,
    pub per_trial: Vec<TrialRecord>,
    pub aggregates: Vec<RadiusAggregate>,
    pub theory: TheoryBlock,
    pub provenance: Provenance,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// JSON with the timing field zeroed; two runs of the same config must
    /// produce byte-identical canonical JSON.
    pub fn canonical_json(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.provenance.wall_time_s = 0.0;
        Ok(serde_json::to_string_pretty(&copy)?)
    }

    /// Flat per-(trial, radius) CSV rows.
    pub fn per_trial_csv(&self) -> String {
        let kmax = self.config.kmax;
        let mut head = String::from("trial,seed,n_actual,R,exterior_n");
        for k in 0..kmax {
            head.push_str(&format!(",beta_{k}"));
        }
        head.push_str(",s0,s0_hat");
        for k in 1..kmax.max(1) {
            head.push_str(&format!(",s_{k},s_hat_{k},l_{k}"));
        }
        head.push_str(",crackle_skipped\n");
        let mut out = head;
        for t in &self.per_trial {
            for o in &t.outcomes {
                out.push_str(&format!(
                    "{},{},{},{},{}",
                    t.trial,
                    t.seed,
                    t.n_actual,
                    fmt_float(o.r),
                    o.exterior_count
                ));
                for k in 0..kmax {
                    match o.betti.get(k) {
                        Some(b) => out.push_str(&format!(",{b}")),
                        None => out.push(','),
                    }
                }
                match &o.crackle {
                    Some(c) => {
                        out.push_str(&format!(",{},{}", c.s0, c.s0_hat));
                        for cc in &c.higher {
                            out.push_str(&format!(",{},{},{}", cc.s, cc.s_hat, cc.l));
                        }
                    }
                    None => {
                        out.push_str(",,");
                        for _ in 1..kmax.max(1) {
                            out.push_str(",,,");
                        }
                    }
                }
                out.push_str(&format!(",{}\n", o.crackle_skipped));
            }
        }
        out
    }
}

/// 17 significant digits: enough to reproduce the f64 bit pattern exactly.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Run the replicated crackle experiment described by `config`.
pub fn run_crackle_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = std::time::Instant::now();
    config.validate()?;
    let spec = DistributionSpec::from_params(config.dist)?;
    let radii = config.resolve_radii()?;

    let per_trial: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(config, &spec, &radii, trial, false))
        .collect();

    let aggregates = aggregate(config, &radii, &per_trial);
    let theory = theory_block(config, &radii)?;
    Ok(ExperimentReport {
        config: config.clone(),
        radii,
        per_trial,
        aggregates,
        theory,
        provenance: Provenance {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    })
}

fn run_trial(
    config: &ExperimentConfig,
    spec: &DistributionSpec,
    radii: &[f64],
    trial: u64,
    coverage: bool,
) -> TrialRecord {
    let seed = config.base_seed ^ trial;
    let cloud = spec.sample_cloud(config.n, config.poissonized, seed);
    let mut outcomes = Vec::with_capacity(radii.len());
    for &r in radii {
        outcomes.push(radius_outcome(config, &cloud, r));
    }
    let coverage = if coverage {
        check_core_coverage(&cloud, radii[0]).ok()
    } else {
        None
    };
    TrialRecord {
        trial,
        seed,
        n_actual: cloud.meta.n_actual,
        outcomes,
        coverage,
    }
}

fn radius_outcome(
    config: &ExperimentConfig,
    cloud: &crate::sampler::PointCloud,
    r: f64,
) -> RadiusOutcome {
    let run = || -> Result<RadiusOutcome> {
        let exterior = cloud.annulus_filter(r, f64::INFINITY)?;
        let complex = build_cech(&exterior, 1.0, config.kmax)?;
        let betti = betti_numbers(&complex, config.kmax)?;
        let (crackle, skipped) = if config.skip_crackle {
            (None, true)
        } else {
            match crackle_statistics(cloud, r, config.kmax, config.combinatorial_cap) {
                Ok(c) => (Some(c), false),
                Err(CrackleError::CombinatorialCap { .. }) => (None, true),
                Err(e) => return Err(e),
            }
        };
        let sandwich_ok = crackle.as_ref().map(|c| {
            let mut ok = c.s0_hat <= betti.beta[0] as u64 && betti.beta[0] as u64 <= c.s0;
            for counts in &c.higher {
                let b = betti.beta[counts.k] as u64;
                ok &= counts.s_hat <= b && b <= counts.s_hat + counts.l;
                ok &= counts.s_hat <= counts.s;
            }
            ok
        });
        Ok(RadiusOutcome {
            r,
            exterior_count: exterior.len() as u64,
            betti: betti.beta,
            crackle,
            crackle_skipped: skipped,
            sandwich_ok,
            error: None,
        })
    };
    run().unwrap_or_else(|e| RadiusOutcome {
        r,
        exterior_count: 0,
        betti: Vec::new(),
        crackle: None,
        crackle_skipped: true,
        sandwich_ok: None,
        error: Some(e.to_string()),
    })
}

fn aggregate(
    config: &ExperimentConfig,
    radii: &[f64],
    per_trial: &[TrialRecord],
) -> Vec<RadiusAggregate> {
    radii
        .iter()
        .enumerate()
        .map(|(ri, &r)| {
            let mut betti = Vec::new();
            let mut failed = 0u64;
            let mut excluded = 0u64;
            let mut ext_sum = 0.0;
            let mut good = 0u64;
            for t in per_trial {
                let o = &t.outcomes[ri];
                if o.error.is_some() {
                    failed += 1;
                    continue;
                }
                good += 1;
                ext_sum += o.exterior_count as f64;
                if o.crackle_skipped {
                    excluded += 1;
                }
            }
            for k in 0..config.kmax {
                let values: Vec<f64> = per_trial
                    .iter()
                    .filter(|t| t.outcomes[ri].error.is_none())
                    .map(|t| t.outcomes[ri].betti[k] as f64)
                    .collect();
                let n = values.len() as f64;
                let mean = values.iter().sum::<f64>() / n.max(1.0);
                let var = if values.len() > 1 {
                    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
                } else {
                    0.0
                };
                betti.push(Aggregate {
                    mean,
                    std_error: (var / n.max(1.0)).sqrt(),
                    trials: values.len() as u64,
                });
            }
            RadiusAggregate {
                r,
                mean_exterior: ext_sum / (good.max(1) as f64),
                betti,
                crackle_excluded: excluded,
                failed_trials: failed,
            }
        })
        .collect()
}

fn theory_block(config: &ExperimentConfig, radii: &[f64]) -> Result<TheoryBlock> {
    let p = config.dist;
    let mut mu: Vec<Option<MuEstimate>> = Vec::new();
    for k in 0..config.kmax {
        let est = if p.kind == NoiseKind::Gaussian {
            None
        } else if k == 0 {
            theory::mu_constant(p.kind, 0, p.d, p.alpha, 2, config.base_seed).ok()
        } else if config.mu_mc_budget > 1 {
            theory::mu_constant(p.kind, k, p.d, p.alpha, config.mu_mc_budget, config.base_seed)
                .ok()
        } else {
            None
        };
        mu.push(est);
    }
    let predictions = radii
        .iter()
        .map(|&r| {
            (0..config.kmax)
                .map(|k| {
                    let mu_k = match p.kind {
                        NoiseKind::Gaussian => 0.0,
                        _ => mu.get(k).copied().flatten().map(|m| m.value)?,
                    };
                    theory::predicted_mean_betti(p.kind, k, config.n, r, p.d, p.alpha, mu_k).ok()
                })
                .collect()
        })
        .collect();
    Ok(TheoryBlock {
        mu,
        radii: radii.to_vec(),
        predictions,
        core_radius: theory::core_radius(p.kind, config.n, p.d, p.alpha, 0.1).ok(),
    })
}

/// One row of a layer profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerRow {
    pub r: f64,
    pub mean_betti: Vec<f64>,
    pub mean_exterior: f64,
    pub trials: u64,
}

/// Mean Betti numbers per radius over a strictly decreasing radius grid.
pub fn layer_profile(
    spec_params: DistributionParams,
    n: u64,
    radii_grid: &[f64],
    kmax: usize,
    trials: u64,
    base_seed: u64,
) -> Result<Vec<LayerRow>> {
    for w in radii_grid.windows(2) {
        if !(w[1] < w[0]) {
            return Err(CrackleError::Config(
                "radii grid must be strictly decreasing".into(),
            ));
        }
    }
    let config = ExperimentConfig {
        dist: spec_params,
        n,
        trials,
        radii: radii_grid.iter().map(|&r| RadiusRule::Explicit(r)).collect(),
        kmax,
        poissonized: false,
        base_seed,
        combinatorial_cap: DEFAULT_COMBINATORIAL_CAP,
        mu_mc_budget: 0,
        skip_crackle: true,
    };
    let report = run_crackle_experiment(&config)?;
    Ok(report
        .aggregates
        .iter()
        .map(|a| LayerRow {
            r: a.r,
            mean_betti: a.betti.iter().map(|b| b.mean).collect(),
            mean_exterior: a.mean_exterior,
            trials: trials - a.failed_trials,
        })
        .collect())
}

/// CSV with the header `R,beta_0,...,beta_{kmax-1},exterior_n,trials`.
pub fn layer_profile_csv(rows: &[LayerRow], kmax: usize) -> String {
    let mut out = String::from("R");
    for k in 0..kmax {
        out.push_str(&format!(",beta_{k}"));
    }
    out.push_str(",exterior_n,trials\n");
    for row in rows {
        out.push_str(&fmt_float(row.r));
        for v in &row.mean_betti {
            out.push(',');
            out.push_str(&fmt_float(*v));
        }
        out.push_str(&format!(",{},{}\n", fmt_float(row.mean_exterior), row.trials));
    }
    out
}

/// Coverage experiment: fraction of trials whose core is certified covered.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageReport {
    pub dist: DistributionParams,
    pub n: u64,
    pub r: f64,
    pub trials: u64,
    pub base_seed: u64,
    pub p_certificate: f64,
    pub p_direct: f64,
    /// the union-bound estimate (2/g)^d R^d e^{-n g^d f(R)} of P(certificate fails)
    pub analytic_bound: f64,
    pub binomial_std_error: f64,
    pub per_trial: Vec<CoverageCheck>,
    pub provenance: Provenance,
}

impl CoverageReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn canonical_json(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.provenance.wall_time_s = 0.0;
        Ok(serde_json::to_string_pretty(&copy)?)
    }
}

pub fn coverage_probability(
    dist: DistributionParams,
    n: u64,
    r: f64,
    trials: u64,
    base_seed: u64,
) -> Result<CoverageReport> {
    let start = std::time::Instant::now();
    if trials < 1 {
        return Err(CrackleError::Config("trials must be >= 1".into()));
    }
    let spec = DistributionSpec::from_params(dist)?;
    let per_trial: Vec<CoverageCheck> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = base_seed ^ trial;
            let cloud = spec.sample_cloud(n, false, seed);
            check_core_coverage(&cloud, r)
        })
        .collect::<Result<_>>()?;
    let cert = per_trial.iter().filter(|c| c.certificate).count() as f64;
    let direct = per_trial.iter().filter(|c| c.direct).count() as f64;
    let p_certificate = cert / trials as f64;
    let p_direct = direct / trials as f64;
    let d = dist.d as f64;
    let g = 1.0 / (2.0 * d.sqrt());
    let f_r = spec.density(&std_basis_point(dist.d, r));
    let analytic_bound =
        (2.0 / g).powf(d) * r.powf(d) * (-(n as f64) * g.powf(d) * f_r).exp();
    let binomial_std_error =
        (p_certificate * (1.0 - p_certificate) / trials as f64).sqrt();
    Ok(CoverageReport {
        dist,
        n,
        r,
        trials,
        base_seed,
        p_certificate,
        p_direct,
        analytic_bound,
        binomial_std_error,
        per_trial,
        provenance: Provenance {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    })
}

fn std_basis_point(d: usize, r: f64) -> Vec<f64> {
    let mut p = vec![0.0; d];
    p[0] = r;
    p
}

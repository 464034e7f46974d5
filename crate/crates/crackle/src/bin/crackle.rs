//! Command-line surface: sampling, complex construction, Betti numbers,
//! theory evaluation, replicated experiments, layer profiles and coverage
//! probability. JSON on stdout unless `--csv`; exit 0 on success, 2 on
//! usage errors, 1 on runtime failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crackle::cech::build_cech;
use crackle::experiment::{
    coverage_probability, layer_profile, layer_profile_csv, run_crackle_experiment,
    ExperimentConfig,
};
use crackle::homology::betti_numbers;
use crackle::sampler::{DistributionParams, DistributionSpec, NoiseKind};
use crackle::theory;
use crackle::{io, CrackleError};

#[derive(Parser)]
#[command(name = "crackle", version, about = "Homology of noise: Čech complexes on heavy-tailed samples")]
struct Cli {
    /// Worker threads (default: machine parallelism; env CRACKLE_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Emit CSV instead of JSON where both exist
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DistArgs {
    /// Noise model: powerlaw | exponential | gaussian
    #[arg(long, value_parser = parse_kind)]
    dist: NoiseKind,
    /// Ambient dimension
    #[arg(long)]
    d: usize,
    /// Tail exponent (power law only)
    #[arg(long)]
    alpha: Option<f64>,
}

impl DistArgs {
    fn params(&self) -> DistributionParams {
        DistributionParams {
            kind: self.dist,
            d: self.d,
            alpha: self.alpha,
        }
    }
}

fn parse_kind(s: &str) -> Result<NoiseKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "powerlaw" | "power-law" | "pl" => Ok(NoiseKind::PowerLaw),
        "exponential" | "exp" => Ok(NoiseKind::Exponential),
        "gaussian" | "normal" => Ok(NoiseKind::Gaussian),
        other => Err(format!("unknown distribution '{other}'")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample a point cloud
    Sample {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        n: u64,
        /// Poissonize the sample size
        #[arg(long)]
        poisson: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path (stdout when absent); .json gets the envelope
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the Čech complex of a cloud file
    Cech {
        /// Cloud file (.csv or .json envelope)
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Betti numbers of a cloud (or a prebuilt complex)
    Betti {
        /// Cloud file (.csv or .json envelope)
        #[arg(long = "in", value_name = "PATH")]
        input: Option<PathBuf>,
        /// Prebuilt complex JSON
        #[arg(long)]
        complex: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Closed-form constants, radii and predictions
    Theory {
        #[command(flatten)]
        dist: DistArgs,
        /// Homology degree for μ_k
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n: Option<u64>,
        /// Exponent ε of the critical radii
        #[arg(long, default_value_t = 0.0)]
        epsilon_exp: f64,
        #[arg(long, default_value_t = 1_000_000)]
        mc_budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Replicated crackle experiment from a JSON config
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Write the full JSON report here (stdout otherwise)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean Betti profile over a decreasing radius grid
    Layers {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        n: u64,
        /// Strictly decreasing radii, comma-separated
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long, default_value_t = 20)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Coverage probability of the core at one radius
    Coverage {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        n: u64,
        /// Test radius; defaults to the core radius at ε = 0.1
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("CRACKLE_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0); // 0 = rayon default
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("crackle: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("crackle: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> crackle::Result<()> {
    match cli.command {
        Command::Sample {
            dist,
            n,
            poisson,
            seed,
            out,
        } => {
            let spec = DistributionSpec::from_params(dist.params())?;
            let cloud = spec.sample_cloud(n, poisson, seed);
            let text = if cli.csv || out.as_ref().is_some_and(|p| p.extension().is_none_or(|e| e != "json")) {
                io::cloud_to_csv(&cloud)
            } else {
                io::cloud_to_json(&cloud)?
            };
            emit(out, text)
        }
        Command::Cech {
            input,
            epsilon,
            kmax,
            out,
        } => {
            let cloud = io::read_cloud(&input)?;
            let kmax = kmax.unwrap_or(cloud.dim());
            let complex = build_cech(&cloud, epsilon, kmax)?;
            emit(out, io::complex_to_json(&complex)?)
        }
        Command::Betti {
            input,
            complex,
            epsilon,
            kmax,
        } => {
            let complex = match (input, complex) {
                (Some(path), None) => {
                    let cloud = io::read_cloud(&path)?;
                    let kmax = kmax.unwrap_or(cloud.dim());
                    build_cech(&cloud, epsilon, kmax)?
                }
                (None, Some(path)) => io::complex_from_json(&std::fs::read_to_string(path)?)?,
                _ => {
                    return Err(CrackleError::Config(
                        "exactly one of --in / --complex is required".into(),
                    ))
                }
            };
            let kmax = kmax.unwrap_or(complex.dim_cap());
            let betti = betti_numbers(&complex, kmax)?;
            let payload = serde_json::json!({
                "epsilon": complex.epsilon(),
                "counts": complex.simplex_counts(),
                "betti": betti.beta,
                "field": betti.field,
            });
            emit(None, serde_json::to_string_pretty(&payload)?)
        }
        Command::Theory {
            dist,
            k,
            n,
            epsilon_exp,
            mc_budget,
            seed,
        } => {
            let p = dist.params();
            let spec = DistributionSpec::from_params(p)?;
            let mu = match k {
                Some(k) => Some(theory::mu_constant(p.kind, k, p.d, p.alpha, mc_budget, seed)?),
                None => None,
            };
            let radii = n.map(|n| theory::radii_spec(p.kind, n, p.d, p.alpha, 0.1)).transpose()?;
            let critical_at_eps = match (n, k) {
                (Some(n), Some(k)) => {
                    theory::critical_radius(p.kind, k, n, p.d, p.alpha, epsilon_exp).ok()
                }
                _ => None,
            };
            let predictions = match (n, k, &mu, &critical_at_eps) {
                (Some(n), Some(k), Some(m), Some(r)) => Some(theory::predicted_mean_betti(
                    p.kind, k, n, *r, p.d, p.alpha, m.value,
                )?),
                _ => None,
            };
            let payload = serde_json::json!({
                "constants": {
                    "s_dminus1": crackle::numerics::sphere_surface_area(p.d),
                    "c": spec.normalization(),
                    "delta": theory::delta_constant(p.kind, p.d, p.alpha)?,
                },
                "mu": mu.map(|m| m.value),
                "mc_std_errors": mu.map(|m| m.std_error),
                "radii": radii,
                "critical_at_epsilon_exp": critical_at_eps,
                "predictions": predictions,
            });
            emit(None, serde_json::to_string_pretty(&payload)?)
        }
        Command::Experiment {
            config,
            overrides,
            out,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let mut config: ExperimentConfig = serde_json::from_str(&text)?;
            if let Some(n) = overrides.n {
                config.n = n;
            }
            if let Some(trials) = overrides.trials {
                config.trials = trials;
            }
            if let Some(seed) = overrides.seed {
                config.base_seed = seed;
            }
            let report = run_crackle_experiment(&config)?;
            let text = if cli.csv {
                report.per_trial_csv()
            } else {
                report.to_json()?
            };
            emit(out, text)
        }
        Command::Layers {
            dist,
            n,
            radii,
            kmax,
            trials,
            seed,
        } => {
            let p = dist.params();
            let kmax = kmax.unwrap_or(p.d);
            let rows = layer_profile(p, n, &radii, kmax, trials, seed)?;
            let text = if cli.csv {
                layer_profile_csv(&rows, kmax)
            } else {
                serde_json::to_string_pretty(&rows)?
            };
            emit(None, text)
        }
        Command::Coverage {
            dist,
            n,
            radius,
            trials,
            seed,
        } => {
            let p = dist.params();
            let r = match radius {
                Some(r) => r,
                None => theory::core_radius(p.kind, n, p.d, p.alpha, 0.1)?,
            };
            let report = coverage_probability(p, n, r, trials, seed)?;
            emit(None, report.to_json()?)
        }
    }
}

fn emit(out: Option<PathBuf>, text: String) -> crackle::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
        }
    }
    Ok(())
}

//! Distributional properties of the samplers: Kolmogorov-Smirnov agreement
//! of empirical radii with the radial CDF, spherical symmetry under
//! rotations, and the Poissonized size law.

mod common;

use common::{oracle_rng, random_rotation, rotate_point};
use crackle::sampler::{DistributionSpec, NoiseKind};

/// Two-sided KS statistic of sorted radii against the model's radial CDF.
fn ks_statistic(spec: &DistributionSpec, radii: &mut [f64]) -> f64 {
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = radii.len() as f64;
    let mut worst = 0.0f64;
    for (i, &r) in radii.iter().enumerate() {
        let g = spec.radial_cdf(r);
        let hi = (i as f64 + 1.0) / n - g;
        let lo = g - i as f64 / n;
        worst = worst.max(hi).max(lo);
    }
    worst
}

#[test]
fn ks_radii_below_the_999_quantile_in_99_percent_of_seeds() {
    // asymptotic 0.999 KS quantile: sqrt(-ln(0.0005)/2) / sqrt(n)
    let n = 100_000u64;
    let crit = (-(0.0005f64).ln() / 2.0).sqrt() / (n as f64).sqrt();
    for spec in [
        DistributionSpec::new(NoiseKind::Gaussian, 2, None).unwrap(),
        DistributionSpec::new(NoiseKind::Exponential, 2, None).unwrap(),
        DistributionSpec::new(NoiseKind::PowerLaw, 2, Some(4.0)).unwrap(),
    ] {
        let seeds = 100;
        let mut passes = 0;
        for seed in 0..seeds {
            let cloud = spec.sample_cloud(n, false, 9000 + seed);
            let mut radii = cloud.norms();
            if ks_statistic(&spec, &mut radii) < crit {
                passes += 1;
            }
        }
        assert!(
            passes >= 99,
            "{}: only {passes}/{seeds} seeds under the 0.999 KS quantile",
            spec.kind()
        );
    }
}

#[test]
fn rotation_preserves_radii() {
    let mut rng = oracle_rng(17);
    for spec in [
        DistributionSpec::new(NoiseKind::Gaussian, 3, None).unwrap(),
        DistributionSpec::new(NoiseKind::PowerLaw, 2, Some(4.0)).unwrap(),
    ] {
        let cloud = spec.sample_cloud(2000, false, 4);
        let rot = random_rotation(&mut rng, spec.dim());
        let mut original = cloud.norms();
        let mut rotated: Vec<f64> = cloud
            .iter_points()
            .map(|p| {
                rotate_point(&rot, p)
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        original.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rotated.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in original.iter().zip(&rotated) {
            assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }
    }
}

#[test]
fn directions_are_uniform_on_the_circle() {
    // quadrant counts of a d=2 power-law sample: chi-square-ish balance
    let spec = DistributionSpec::new(NoiseKind::PowerLaw, 2, Some(4.0)).unwrap();
    let n = 40_000;
    let cloud = spec.sample_cloud(n, false, 31);
    let mut quad = [0u64; 4];
    for p in cloud.iter_points() {
        let q = match (p[0] >= 0.0, p[1] >= 0.0) {
            (true, true) => 0,
            (false, true) => 1,
            (false, false) => 2,
            (true, false) => 3,
        };
        quad[q] += 1;
    }
    let expect = n as f64 / 4.0;
    for c in quad {
        assert!(
            (c as f64 - expect).abs() < 5.0 * expect.sqrt(),
            "quadrant counts {quad:?}"
        );
    }
}

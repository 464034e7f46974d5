//! Small numerical kernels shared by the sampler and theory modules:
//! Gauss-Legendre quadrature, gamma-family special functions restricted to
//! the integer and half-integer arguments the spherical geometry needs, and
//! the surface area of the unit sphere.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Computed by Newton iteration on the Legendre polynomial; for the orders
/// used here (<= 64) the nodes converge to machine precision in a handful
/// of steps.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 2);
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let m = order.div_ceil(2);
        for i in 0..m {
            // Chebyshev-like initial guess for the i-th root.
            let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrate `f` over [a, b] with a single panel.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gamma function at n/2 for integer n >= 1, exact closed forms.
///
/// Even arguments reduce to factorials, odd arguments to the half-integer
/// ladder Γ(k + 1/2) = (2k)! √π / (4^k k!).
pub fn gamma_half_integer(n_halves: usize) -> f64 {
    assert!(n_halves >= 1, "gamma argument must be >= 1/2");
    if n_halves.is_multiple_of(2) {
        factorial(n_halves / 2 - 1)
    } else {
        // Γ(1/2) = √π, then Γ(x+1) = x Γ(x).
        let mut value = PI.sqrt();
        let mut x = 0.5;
        for _ in 0..(n_halves / 2) {
            value *= x;
            x += 1.0;
        }
        value
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Surface area of the unit (d-1)-sphere in R^d: 2 π^{d/2} / Γ(d/2).
pub fn sphere_surface_area(d: usize) -> f64 {
    assert!(d >= 1);
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half_integer(d)
}

/// Volume of the d-ball of radius r: π^{d/2} r^d / Γ(d/2 + 1).
pub fn ball_volume(d: usize, r: f64) -> f64 {
    PI.powf(d as f64 / 2.0) * r.powi(d as i32) / gamma_half_integer(d + 2)
}

/// Regularized lower incomplete gamma P(a, x) for a = n/2, n >= 1 integer.
///
/// Uses the closed bases P(1, x) = 1 - e^{-x} and P(1/2, x) = erf(√x),
/// then climbs with P(a+1, x) = P(a, x) - x^a e^{-x} / Γ(a+1).
pub fn reg_lower_gamma_half(n_halves: usize, x: f64) -> f64 {
    assert!(n_halves >= 1);
    if x <= 0.0 {
        return 0.0;
    }
    let (mut a, mut p, base) = if n_halves.is_multiple_of(2) {
        (1.0_f64, 1.0 - (-x).exp(), 2)
    } else {
        (0.5_f64, libm::erf(x.sqrt()), 1)
    };
    // ln of x^a e^{-x} / Γ(a+1) at the current a
    let mut ln_term = a * x.ln() - x - gamma_half_integer(base + 2).ln();
    for _ in 0..(n_halves - base) / 2 {
        p -= ln_term.exp();
        ln_term += x.ln() - (a + 1.0).ln();
        a += 1.0;
    }
    p.clamp(0.0, 1.0)
}

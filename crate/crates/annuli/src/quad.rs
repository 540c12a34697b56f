//! Gauss–Legendre quadrature machinery shared by the numeric modules.

use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

static CACHE: Lazy<Mutex<HashMap<usize, Arc<GaussLegendre>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// n-point rule, computed by Newton iteration on P_n and cached per order.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    assert!(n >= 1, "quadrature order must be >= 1");
    if let Some(rule) = CACHE.lock().unwrap().get(&n) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(compute(n));
    CACHE.lock().unwrap().insert(n, Arc::clone(&rule));
    rule
}

fn compute(n: usize) -> GaussLegendre {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (p2, d2) = legendre_with_derivative(n, x);
                x -= p2 / d2;
                dp = d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_with_derivative(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (d * d);
    }
    GaussLegendre { nodes, weights }
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

/// ∫_lo^hi f(x) dx by an n-point rule on a single panel.
pub fn integrate_panel<F: FnMut(f64) -> f64>(lo: f64, hi: f64, n: usize, mut f: F) -> f64 {
    let rule = gauss_legendre(n);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut acc = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// ∫_lo^hi f dx over geometrically spaced panels (requires 0 < lo < hi).
///
/// Resolves integrands with power-law or logarithmic structure at the lower
/// endpoint; `per_decade` panels per factor of 10.
pub fn integrate_geometric<F: FnMut(f64) -> f64>(
    lo: f64,
    hi: f64,
    per_decade: usize,
    nodes: usize,
    mut f: F,
) -> f64 {
    debug_assert!(lo > 0.0 && hi > lo);
    let decades = (hi / lo).log10();
    let n_panels = ((per_decade as f64 * decades).ceil() as usize).max(1);
    let ratio = (hi / lo).powf(1.0 / n_panels as f64);
    let mut acc = 0.0;
    let mut a = lo;
    for i in 0..n_panels {
        let b = if i + 1 == n_panels { hi } else { a * ratio };
        acc += integrate_panel(a, b, nodes, &mut f);
        a = b;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn nodes_match_published_values() {
        let rule = gauss_legendre(5);
        assert_relative_eq!(rule.nodes[0], -0.9061798459386640, epsilon = 1e-14);
        assert_relative_eq!(rule.nodes[2], 0.0, epsilon = 1e-15);
        assert_relative_eq!(rule.weights[2], 0.5688888888888889, epsilon = 1e-14);
        assert_relative_eq!(rule.weights[0], 0.2369268850561891, epsilon = 1e-14);
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 3, 8, 16, 33, 64] {
            let rule = gauss_legendre(n);
            let sum: f64 = rule.weights.iter().sum();
            assert_relative_eq!(sum, 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // n-point rule is exact through degree 2n-1.
        let val = integrate_panel(0.0, 1.0, 4, |x| x.powi(7));
        assert_relative_eq!(val, 0.125, epsilon = 1e-14);
    }

    #[test]
    fn geometric_panels_handle_log_singularity() {
        // ∫_a^{1/2} dx/(x |ln x|) = ln|ln a| - ln|ln 1/2|
        let a: f64 = 1e-12;
        let exact = (a.ln().abs()).ln() - (0.5f64.ln().abs()).ln();
        let got = integrate_geometric(a, 0.5, 4, 12, |x| 1.0 / (x * x.ln().abs()));
        assert_relative_eq!(got, exact, epsilon = 1e-10);
    }
}

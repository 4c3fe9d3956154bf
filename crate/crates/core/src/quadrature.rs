//! Gauss-Legendre rules, composite Simpson, trapezoid and pairwise sums.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on the Legendre three-term recurrence,
    /// started from the Tricomi asymptotic guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let x = self.nodes.iter().map(|t| mid + half * t).collect();
        let w = self.weights.iter().map(|w| half * w).collect();
        (x, w)
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (x, w) = self.on_interval(a, b);
        let terms: Vec<f64> = x.iter().zip(&w).map(|(x, w)| w * f(*x)).collect();
        pairwise_sum(&terms)
    }

    pub fn integrate_complex(&self, a: f64, b: f64, f: impl Fn(f64) -> Complex64) -> Complex64 {
        let (x, w) = self.on_interval(a, b);
        let terms: Vec<Complex64> = x.iter().zip(&w).map(|(x, w)| f(*x) * *w).collect();
        pairwise_sum_complex(&terms)
    }
}

/// Composite rule: `panels` equal panels, each with the given Gauss-Legendre rule.
pub fn composite_nodes(rule: &GaussLegendre, a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let width = (b - a) / panels as f64;
    let mut x = Vec::with_capacity(panels * rule.nodes.len());
    let mut w = Vec::with_capacity(x.capacity());
    for k in 0..panels {
        let lo = a + k as f64 * width;
        let (px, pw) = rule.on_interval(lo, lo + width);
        x.extend(px);
        w.extend(pw);
    }
    (x, w)
}

/// `(P_n(x), P_n'(x))`.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const PAIRWISE_BLOCK: usize = 32;

/// Pairwise (cascade) summation; the tree shape depends only on the length.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= PAIRWISE_BLOCK {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

pub fn pairwise_sum_complex(v: &[Complex64]) -> Complex64 {
    if v.len() <= PAIRWISE_BLOCK {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum_complex(&v[..mid]) + pairwise_sum_complex(&v[mid..])
}

/// Composite Simpson over equally spaced samples; needs an odd count >= 3.
pub fn simpson<T>(values: &[T], spacing: f64) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "Simpson needs an odd number of samples, got {n}");
    let mut acc = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc = acc + *v * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (spacing / 3.0)
}

/// Trapezoid rule on a possibly nonuniform grid.
pub fn trapezoid(ts: &[f64], values: &[f64]) -> f64 {
    assert_eq!(ts.len(), values.len());
    let terms: Vec<f64> = ts
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .collect();
    pairwise_sum(&terms)
}

/// Trapezoid weights for a nonuniform grid.
pub fn trapezoid_weights(ts: &[f64]) -> Vec<f64> {
    let n = ts.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let dt = ts[i + 1] - ts[i];
        w[i] += 0.5 * dt;
        w[i + 1] += 0.5 * dt;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for n in [1usize, 2, 5, 12, 40] {
            let gl = GaussLegendre::new(n);
            for k in 0..(2 * n) {
                let got = gl.integrate(-1.0, 1.0, |x| x.powi(k as i32));
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "n={n} k={k} got {got}");
            }
        }
    }

    #[test]
    fn large_rules_stay_accurate() {
        let gl = GaussLegendre::new(3000);
        assert!((gl.weights.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        let v = gl.integrate(0.0, 1.0, |x| (200.0 * x).cos());
        assert!((v - (200.0f64).sin() / 200.0).abs() < 1e-13);
    }

    #[test]
    fn simpson_integrates_cubics_exactly() {
        let xs: Vec<f64> = (0..=8).map(|i| i as f64 * 0.25).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x * x - x).collect();
        assert!((simpson(&ys, 0.25) - (4.0 - 2.0)).abs() < 1e-13);
    }

    #[test]
    fn pairwise_sum_matches_naive_for_small_inputs() {
        let v: Vec<f64> = (0..1000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-12);
    }
}

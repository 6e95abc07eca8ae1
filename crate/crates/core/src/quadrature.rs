//! Gauss–Legendre rules.

use std::sync::OnceLock;

/// Nodes and weights of a Gauss–Legendre rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule on [-1, 1]. Nodes are the roots of P_n, found by Newton
    /// iteration from the Chebyshev-type initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
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

    /// `n`-point rule mapped to [a, b].
    pub fn on_interval(n: usize, a: f64, b: f64) -> Self {
        let ref_rule = Self::new(n);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        GaussLegendre {
            nodes: ref_rule.nodes.iter().map(|x| mid + half * x).collect(),
            weights: ref_rule.weights.iter().map(|w| half * w).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Integrates a scalar function with this rule.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
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
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Legendre polynomial P_m(x) for m = 0..len, written into `out`.
pub fn legendre_values(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = x;
    }
    for k in 2..out.len() {
        let kf = k as f64;
        out[k] = ((2.0 * kf - 1.0) * x * out[k - 1] - (kf - 1.0) * out[k - 2]) / kf;
    }
}

/// The fixed 64-point rule on the rescaled thickness interval (-1/2, 1/2).
pub fn thickness_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::on_interval(64, -0.5, 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(5);
        // exact up to degree 9
        let i8 = rule.integrate(|x| x.powi(8));
        assert!((i8 - 2.0 / 9.0).abs() < 1e-15);
        let i9 = rule.integrate(|x| x.powi(9));
        assert!(i9.abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 7, 16, 64] {
            let rule = GaussLegendre::on_interval(n, -0.5, 0.5);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-14, "n = {n}: {s}");
        }
    }

    #[test]
    fn sixty_four_points_resolve_trig() {
        let rule = thickness_rule();
        let pi = std::f64::consts::PI;
        let v = rule.integrate(|t| (pi / 2.0 + pi * t).sin());
        assert!((v - 2.0 / pi).abs() < 1e-15);
        let t2 = rule.integrate(|t| t * t);
        assert!((t2 - 1.0 / 12.0).abs() < 1e-16);
    }

    #[test]
    fn nodes_sorted_and_symmetric() {
        let rule = GaussLegendre::new(16);
        for i in 0..16 {
            assert!((rule.nodes[i] + rule.nodes[15 - i]).abs() < 1e-15);
            if i > 0 {
                assert!(rule.nodes[i] > rule.nodes[i - 1]);
            }
        }
    }

    #[test]
    fn legendre_values_match_closed_forms() {
        let mut p = [0.0; 4];
        legendre_values(0.3, &mut p);
        assert!((p[2] - 0.5 * (3.0 * 0.09 - 1.0)).abs() < 1e-15);
        assert!((p[3] - 0.5 * (5.0 * 0.027 - 0.9)).abs() < 1e-15);
    }
}

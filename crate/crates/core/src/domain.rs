//! Rectangular parameter domains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// ω = [a1, b1] × [a2, b2].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
}

impl Rect {
    pub fn new(a1: f64, b1: f64, a2: f64, b2: f64) -> Result<Self> {
        let ok = [a1, b1, a2, b2].iter().all(|v| v.is_finite()) && a1 < b1 && a2 < b2;
        if !ok {
            return Err(Error::param(
                "domain",
                format!("rectangle [{a1}, {b1}] x [{a2}, {b2}] is degenerate"),
            ));
        }
        Ok(Rect { a1, b1, a2, b2 })
    }

    /// [−1/2, 1/2]², unit area, centred at the origin.
    pub fn unit_centred() -> Self {
        Rect { a1: -0.5, b1: 0.5, a2: -0.5, b2: 0.5 }
    }

    pub fn area(&self) -> f64 {
        (self.b1 - self.a1) * (self.b2 - self.a2)
    }

    pub fn contains(&self, x1: f64, x2: f64) -> bool {
        (self.a1..=self.b1).contains(&x1) && (self.a2..=self.b2).contains(&x2)
    }

    /// Equispaced n1 × n2 vertex grid (row-major in x2, then x1).
    pub fn vertex_grid(&self, n1: usize, n2: usize) -> Vec<(f64, f64)> {
        let lin = |a: f64, b: f64, i: usize, n: usize| {
            if n == 1 {
                0.5 * (a + b)
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(n1 * n2);
        for j in 0..n2 {
            for i in 0..n1 {
                out.push((lin(self.a1, self.b1, i, n1), lin(self.a2, self.b2, j, n2)));
            }
        }
        out
    }

    /// Tensor-product Gauss–Legendre nodes (x1, x2, weight).
    pub fn gauss_nodes(&self, n: usize) -> Vec<(f64, f64, f64)> {
        let r1 = GaussLegendre::on_interval(n, self.a1, self.b1);
        let r2 = GaussLegendre::on_interval(n, self.a2, self.b2);
        let mut out = Vec::with_capacity(n * n);
        for (x2, w2) in r2.iter() {
            for (x1, w1) in r1.iter() {
                out.push((x1, x2, w1 * w2));
            }
        }
        out
    }
}

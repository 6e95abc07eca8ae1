#![allow(dead_code)]

use npk_core::quadrature::thickness_rule;
use npk_core::{q2, MaterialParams, QuadraticStrainSpec, Sym2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// mu = 1, gamma = 1/2, delta0 = 1.
pub fn unit_params() -> MaterialParams {
    MaterialParams::new(1.0, 2.0, 2.0, 1.0).unwrap()
}

pub fn random_sym2(rng: &mut ChaCha8Rng, scale: f64) -> Sym2 {
    Sym2::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

/// ∫ q2(D + tG + B̌(t)) dt for fixed D.
pub fn membrane_integral(d: &Sym2, g: &Sym2, b: &dyn Fn(f64) -> Sym2, params: &MaterialParams) -> f64 {
    thickness_rule().integrate(|t| q2(&(*d + *g * t + b(t)), params.mu, params.gamma()))
}

/// Derivative-free nested minimiser: coordinate descent over D with a
/// three-point parabola per coordinate, the integral re-evaluated each time.
pub fn qbar2_coordinate_descent(g: &Sym2, b: &dyn Fn(f64) -> Sym2, params: &MaterialParams) -> f64 {
    let f = |d: &Sym2| membrane_integral(d, g, b, params);
    let mut d = Sym2::ZERO;
    let mut best = f(&d);
    for _ in 0..2000 {
        let before = best;
        for i in 0..3 {
            let s = 0.1;
            let mut v = d.to_basis();
            let base = v[i];
            let eval = |x: f64, v: &mut npk_core::Vec3| {
                v[i] = x;
                f(&Sym2::from_basis(v))
            };
            let (fm, f0, fp) = (eval(base - s, &mut v), best, eval(base + s, &mut v));
            let curv = fp - 2.0 * f0 + fm;
            if curv > 0.0 {
                let x = base - 0.5 * s * (fp - fm) / curv;
                let fx = eval(x, &mut v);
                if fx < best {
                    best = fx;
                    d = Sym2::from_basis(&v);
                }
            }
        }
        if before - best <= 1e-16 * best.abs() {
            break;
        }
    }
    best
}

fn pm(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let v = rng.random_range(lo..hi);
    if rng.random_bool(0.5) { v } else { -v }
}

/// Quadratic strain specs satisfying each compatible case, `per_case` of each.
pub fn compatible_specs(rng: &mut ChaCha8Rng, per_case: usize) -> Vec<(usize, QuadraticStrainSpec)> {
    let mut out = Vec::new();
    for case in 0..4 {
        for _ in 0..per_case {
            let spec = match case {
                0 => QuadraticStrainSpec::new([0.0; 3], [0.0; 3]),
                1 => {
                    let a = pm(rng, 0.2, 2.0);
                    QuadraticStrainSpec::new([a, 0.0, 0.0], [a * a / 4.0, 0.0, 0.0])
                }
                2 => {
                    let a = pm(rng, 0.2, 2.0);
                    QuadraticStrainSpec::new([0.0, a, 0.0], [0.0, a * a / 4.0, 0.0])
                }
                _ => QuadraticStrainSpec::new([0.0, 0.0, pm(rng, 0.2, 2.0)], [0.0, 0.0, pm(rng, 0.2, 2.0)]),
            };
            out.push((case, spec));
        }
    }
    out
}

/// Specs violating every compatible case.
pub fn violating_specs(rng: &mut ChaCha8Rng, n: usize) -> Vec<QuadraticStrainSpec> {
    (0..n)
        .map(|i| match i % 4 {
            0 => QuadraticStrainSpec::new(
                [pm(rng, 0.2, 2.0), pm(rng, 0.2, 2.0), pm(rng, 0.2, 2.0)],
                [pm(rng, 0.2, 2.0), pm(rng, 0.2, 2.0), pm(rng, 0.2, 2.0)],
            ),
            1 => {
                // perturbed square in the (1,1) entry
                let a = pm(rng, 0.2, 2.0);
                QuadraticStrainSpec::new([a, 0.0, 0.0], [a * a / 4.0 + pm(rng, 0.2, 1.0), 0.0, 0.0])
            }
            2 => {
                // two in-plane squares at once
                let (a, b) = (pm(rng, 0.2, 2.0), pm(rng, 0.2, 2.0));
                QuadraticStrainSpec::new([a, b, 0.0], [a * a / 4.0, b * b / 4.0, 0.0])
            }
            _ => {
                // thickness entry plus an in-plane linear term
                QuadraticStrainSpec::new([pm(rng, 0.2, 2.0), 0.0, pm(rng, 0.2, 2.0)], [0.0, 0.0, pm(rng, 0.2, 2.0)])
            }
        })
        .collect()
}

//! The two-dimensional limit functional, its minimisation over developable
//! curvatures and the zero-stiffness family.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::Rect;
use crate::error::{Error, Result};
use crate::reduction::ReducedModel;
use crate::tensor::{q2, Mat2, Sym2};

/// Relative threshold for comparing target eigenvalues.
pub const MULTIPLICITY_TOL: f64 = 1e-10;

/// Curvature field over ω: constant, or sampled at cell centres of an
/// n1 × n2 grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CurvatureField {
    Constant { domain: Rect, value: Sym2 },
    Sampled { domain: Rect, n1: usize, n2: usize, values: Vec<Sym2> },
}

impl CurvatureField {
    pub fn constant(domain: Rect, value: Sym2) -> Self {
        CurvatureField::Constant { domain, value }
    }

    /// Samples `f` at the centres of an n1 × n2 cell grid.
    pub fn sampled(domain: Rect, n1: usize, n2: usize, f: impl Fn(f64, f64) -> Sym2) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::param("grid", "sampled field needs at least one cell"));
        }
        let d1 = (domain.b1 - domain.a1) / n1 as f64;
        let d2 = (domain.b2 - domain.a2) / n2 as f64;
        let mut values = Vec::with_capacity(n1 * n2);
        for j in 0..n2 {
            for i in 0..n1 {
                values.push(f(domain.a1 + (i as f64 + 0.5) * d1, domain.a2 + (j as f64 + 0.5) * d2));
            }
        }
        Ok(CurvatureField::Sampled { domain, n1, n2, values })
    }

    pub fn domain(&self) -> &Rect {
        match self {
            CurvatureField::Constant { domain, .. } | CurvatureField::Sampled { domain, .. } => domain,
        }
    }

    /// Samples paired with their area weights.
    fn weighted(&self) -> Vec<(Sym2, f64)> {
        match self {
            CurvatureField::Constant { domain, value } => vec![(*value, domain.area())],
            CurvatureField::Sampled { domain, n1, n2, values } => {
                let w = domain.area() / (*n1 * *n2) as f64;
                values.iter().map(|v| (*v, w)).collect()
            }
        }
    }

    /// max |det A| over the samples.
    pub fn max_abs_det(&self) -> f64 {
        self.weighted().iter().map(|(a, _)| a.det().abs()).fold(0.0, f64::max)
    }
}

/// Energy density per unit area: (1/2)α Q2(A − Ā) + β/2.
pub fn energy_density(a: &Sym2, model: &ReducedModel) -> f64 {
    0.5 * model.alpha * q2(&(*a - model.abar), model.mu, model.gamma) + 0.5 * model.beta
}

/// E^lim(A) = (1/2)∫ α Q2(A − Ā) dx' + (β/2)|ω| (zero load).
pub fn limit_energy(field: &CurvatureField, model: &ReducedModel) -> Result<f64> {
    let mut total = 0.0;
    for (a, w) in field.weighted() {
        if !a.is_finite() {
            return Err(Error::NonFinite("curvature field".into()));
        }
        total += w * energy_density(&a, model);
    }
    Ok(total)
}

/// Multiplier turning rescaled plate energies into physical ones: h0³.
pub fn physical_prefactor(h0: f64) -> f64 {
    h0 * h0 * h0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Multiplicity {
    Unique,
    Bistable,
    ContinuousFamily,
}

/// Minimisers of the energy density over {det A = 0}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimiserSet {
    pub minimisers: Vec<Sym2>,
    /// Minimal energy per unit area.
    pub energy_per_area: f64,
    pub multiplicity: Multiplicity,
    /// Nonzero eigenvalue shared by the family {R diag(k̄, 0) Rᵀ}.
    pub family_curvature: Option<f64>,
}

/// Minimises (1/2)α Q2(A − Ā) + β/2 over det A = 0.
///
/// Rank-one A = λ n⊗n: for fixed n the optimal λ is (n·Ān + γ tr Ā)/(1 + γ)
/// and the reduced objective decreases with |n·Ān + γ tr Ā|, so the optimum
/// sits on an eigenvector of Ā (or on every direction when Ā is isotropic).
pub fn minimise_over_developable(model: &ReducedModel) -> Result<MinimiserSet> {
    if !(model.alpha > 0.0) {
        return Err(Error::param("alpha", "degenerate reduced model (alpha <= 0)"));
    }
    let g = model.gamma;
    let tr = model.abar.trace();
    let ([e_lo, e_hi], v_lo) = model.abar.eigen();
    let v_hi = [-v_lo[1], v_lo[0]];
    let scale = e_lo.abs().max(e_hi.abs());
    let rank_one = |lam: f64, v: [f64; 2]| Sym2::new(lam * v[0] * v[0], lam * v[0] * v[1], lam * v[1] * v[1]);
    let lam = |e: f64| (e + g * tr) / (1.0 + g);
    let build = |minimisers: Vec<Sym2>, multiplicity, family_curvature| MinimiserSet {
        energy_per_area: energy_density(&minimisers[0], model),
        minimisers,
        multiplicity,
        family_curvature,
    };
    if scale == 0.0 {
        return Ok(build(vec![Sym2::ZERO], Multiplicity::Unique, None));
    }
    if (e_hi - e_lo).abs() <= MULTIPLICITY_TOL * scale {
        let k = lam(0.5 * (e_lo + e_hi));
        return Ok(build(
            vec![Sym2::diag(k, 0.0), Sym2::diag(0.0, k)],
            Multiplicity::ContinuousFamily,
            Some(k),
        ));
    }
    let s_lo = (e_lo + g * tr).abs();
    let s_hi = (e_hi + g * tr).abs();
    if (s_lo - s_hi).abs() <= MULTIPLICITY_TOL * s_lo.max(s_hi) {
        Ok(build(
            vec![rank_one(lam(e_lo), v_lo), rank_one(lam(e_hi), v_hi)],
            Multiplicity::Bistable,
            None,
        ))
    } else if s_lo > s_hi {
        Ok(build(vec![rank_one(lam(e_lo), v_lo)], Multiplicity::Unique, None))
    } else {
        Ok(build(vec![rank_one(lam(e_hi), v_hi)], Multiplicity::Unique, None))
    }
}

/// Result of the exhaustive scan over the developable set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub value: f64,
    pub argmins: Vec<Sym2>,
    pub step: f64,
}

/// Dense scan of det A = 0 through A = [[ξ, ζ], [ζ, η]] with ξη = ζ²:
/// a (ζ, ξ) grid with η = ζ²/ξ, plus the axis branch ξ = ζ = 0.
pub fn brute_force_developable_min(model: &ReducedModel, step: f64) -> Result<BruteForceResult> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::param("step", format!("must be > 0, got {step}")));
    }
    let ([e_lo, e_hi], _) = model.abar.eigen();
    let reach = 1.5 * (e_lo.abs() + e_hi.abs() + model.gamma * model.abar.trace().abs()) + 4.0 * step;
    let n = (reach / step).ceil() as i64;
    let f = |a: &Sym2| energy_density(a, model);

    // best point of each branch: ξ < 0, ξ > 0 (hyperbola) and ξ = 0 (axis)
    let scan = |sign: f64| -> (f64, Sym2) {
        (-n..=n)
            .into_par_iter()
            .map(|iz| {
                let zeta = iz as f64 * step;
                let mut best = (f64::INFINITY, Sym2::ZERO);
                for ix in 1..=n {
                    let xi = sign * ix as f64 * step;
                    let a = Sym2::new(xi, zeta, zeta * zeta / xi);
                    let v = f(&a);
                    if v < best.0 {
                        best = (v, a);
                    }
                }
                best
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold((f64::INFINITY, Sym2::ZERO), |acc, b| if b.0 < acc.0 { b } else { acc })
    };
    let neg = scan(-1.0);
    let pos = scan(1.0);
    let axis = (-n..=n)
        .map(|ie| {
            let a = Sym2::diag(0.0, ie as f64 * step);
            (f(&a), a)
        })
        .fold((f64::INFINITY, Sym2::ZERO), |acc, b| if b.0 < acc.0 { b } else { acc });

    let value = neg.0.min(pos.0).min(axis.0);
    let curvature = model.alpha * 2.0 * model.mu * (1.0 + 2.0 * model.gamma);
    let tol = 2.0 * step * step * curvature + 1e-14 * value.abs();
    let mut argmins: Vec<Sym2> = Vec::new();
    let mut cands = [neg, axis, pos];
    cands.sort_by(|x, y| x.0.total_cmp(&y.0));
    for (v, a) in cands {
        if v <= value + tol && argmins.iter().all(|b| (*b - a).max_abs() > 10.0 * step) {
            argmins.push(a);
        }
    }
    Ok(BruteForceResult { value, argmins, step })
}

/// k̄ of an isotropic target Ā = m0 I: m0 (1 + 2γ)/(1 + γ).
pub fn family_curvature(model: &ReducedModel) -> Result<f64> {
    let a = model.abar;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    if (a.xx - a.yy).abs() > MULTIPLICITY_TOL * scale || a.xy.abs() > MULTIPLICITY_TOL * scale {
        return Err(Error::param("model", "zero-stiffness family needs an isotropic target curvature"));
    }
    let m0 = 0.5 * (a.xx + a.yy);
    Ok(m0 * (1.0 + 2.0 * model.gamma) / (1.0 + model.gamma))
}

fn family_parts(model: &ReducedModel, s: f64) -> Result<(f64, f64, f64)> {
    let k = family_curvature(model)?;
    if !(s.abs() <= 0.5 * k.abs() * (1.0 + 1e-15)) {
        return Err(Error::param("s", format!("|s| = {} exceeds |k̄|/2 = {}", s.abs(), 0.5 * k.abs())));
    }
    let r = (k * k - 4.0 * s * s).max(0.0).sqrt();
    Ok((k, k.signum(), r))
}

/// Ā±(s) = [[(k̄ ± σr)/2, s], [s, (k̄ ∓ σr)/2]], r = √(k̄² − 4s²), σ = sgn k̄.
pub fn zero_stiffness_family(model: &ReducedModel, s: f64) -> Result<(Sym2, Sym2)> {
    let (k, sg, r) = family_parts(model, s)?;
    let plus = Sym2::new(0.5 * (k + sg * r), s, 0.5 * (k - sg * r));
    let minus = Sym2::new(0.5 * (k - sg * r), s, 0.5 * (k + sg * r));
    Ok((plus, minus))
}

/// Rotations with Ā+(s) = R+ diag(k̄, 0) R+ᵀ and Ā−(s) = R− diag(0, k̄) R−ᵀ.
pub fn family_rotations(model: &ReducedModel, s: f64) -> Result<(Mat2, Mat2)> {
    let (k, sg, r) = family_parts(model, s)?;
    let kk = k.abs();
    let c = ((kk + r) / (2.0 * kk)).sqrt();
    let q = sg * 2.0 * s / (kk + r);
    let plus = c * Mat2::new(1.0, -q, q, 1.0);
    let minus = c * Mat2::new(1.0, q, -q, 1.0);
    Ok((plus, minus))
}

/// One sample of the zero-stiffness sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySample {
    pub s: f64,
    pub plus: Sym2,
    pub minus: Sym2,
    pub energy_plus: f64,
    pub energy_minus: f64,
}

/// `n` equispaced s ∈ [−|k̄|/2, |k̄|/2], energies per unit area.
pub fn family_sweep(model: &ReducedModel, n: usize) -> Result<Vec<FamilySample>> {
    let k = family_curvature(model)?;
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let s = -0.5 * k.abs() + k.abs() * i as f64 / (n - 1) as f64;
            let (plus, minus) = zero_stiffness_family(model, s)?;
            Ok(FamilySample {
                s,
                plus,
                minus,
                energy_plus: energy_density(&plus, model),
                energy_minus: energy_density(&minus, model),
            })
        })
        .collect()
}

/// Energy per unit area of the cylinders A = diag(k, 0) and diag(0, k).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderSample {
    pub k: f64,
    pub energy_x1: f64,
    pub energy_x2: f64,
}

pub fn cylinder_sweep(model: &ReducedModel, k_min: f64, k_max: f64, n: usize) -> Vec<CylinderSample> {
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let k = k_min + (k_max - k_min) * i as f64 / (n - 1) as f64;
            CylinderSample {
                k,
                energy_x1: energy_density(&Sym2::diag(k, 0.0), model),
                energy_x2: energy_density(&Sym2::diag(0.0, k), model),
            }
        })
        .collect()
}

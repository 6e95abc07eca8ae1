//! Dimension reduction of the limit strain field to a plate density
//! Q̄2(G) = α·Q2(G − Ā) + β.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::{MaterialParams, StrainProfile, Texture};
use crate::quadrature::thickness_rule;
use crate::tensor::{q2, q2_matrix, Mat3, QuadForm2, Sym2, Vec3};

/// Relative deviation of the fitted quadratic part from α·Q2 below which the
/// model is accepted silently.
pub const STRUCTURE_TOL: f64 = 1e-8;
/// Above this deviation the field is rejected.
pub const STRUCTURE_REJECT: f64 = 1e-5;

/// The plate density Q̄2(G) = α·Q2(G − Ā) + β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedModel {
    pub alpha: f64,
    pub abar: Sym2,
    pub beta: f64,
    pub mu: f64,
    pub gamma: f64,
    pub texture: Option<Texture>,
}

impl ReducedModel {
    pub fn new(alpha: f64, abar: Sym2, beta: f64, mu: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::param("alpha", format!("must be > 0, got {alpha}")));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::param("mu", format!("must be > 0, got {mu}")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::param("gamma", format!("must lie in (0, 1), got {gamma}")));
        }
        if !abar.is_finite() || !beta.is_finite() {
            return Err(Error::NonFinite("reduced model".into()));
        }
        Ok(ReducedModel { alpha, abar, beta, mu, gamma, texture: None })
    }

    pub fn with_texture(mut self, texture: Texture) -> Self {
        self.texture = Some(texture);
        self
    }

    /// α·Q2(G − Ā) + β.
    pub fn eval(&self, g: &Sym2) -> f64 {
        self.alpha * q2(&(*g - self.abar), self.mu, self.gamma) + self.beta
    }
}

/// B̌ sampled at the 64 thickness nodes.
struct SampledField {
    values: Vec<Sym2>,
}

impl SampledField {
    fn new(bcheck: &dyn Fn(f64) -> Sym2) -> Result<Self> {
        let values: Vec<Sym2> = thickness_rule().nodes.iter().map(|&t| bcheck(t)).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("limit field B̌".into()));
        }
        Ok(SampledField { values })
    }

    /// Inner minimiser D* and the minimum of ∫ q2(D + tG + B̌(t)) dt.
    fn inner(&self, g: &Sym2, mu: f64, gamma: f64) -> Result<(Sym2, f64)> {
        let rule = thickness_rule();
        let h = q2_matrix(mu, gamma);
        // normal equations (∫H) d = −∫ H w(t), w(t) = tG + B̌(t)
        let mut lhs = Mat3::zeros();
        let mut rhs = Vec3::zeros();
        let w: Vec<Vec3> = rule
            .iter()
            .zip(&self.values)
            .map(|((t, _), b)| (*g * t + *b).to_basis())
            .collect();
        for ((_, wt), wv) in rule.iter().zip(&w) {
            lhs += wt * h;
            rhs -= wt * (h * wv);
        }
        let d = lhs
            .cholesky()
            .ok_or_else(|| Error::NoConvergence("inner minimisation (singular normal equations)".into()))?
            .solve(&rhs);
        let value: f64 = rule
            .iter()
            .zip(&w)
            .map(|((_, wt), wv)| {
                let v = d + wv;
                wt * v.dot(&(h * v))
            })
            .sum();
        if !value.is_finite() {
            return Err(Error::NonFinite("Q̄2 quadrature".into()));
        }
        Ok((Sym2::from_basis(&d), value))
    }
}

/// Q̄2(G) = min_D ∫ Q2(D + tG + B̌(t)) dt over t ∈ (−1/2, 1/2).
pub fn qbar2(g: &Sym2, bcheck: &dyn Fn(f64) -> Sym2, params: &MaterialParams) -> Result<f64> {
    let field = SampledField::new(bcheck)?;
    Ok(field.inner(g, params.mu, params.gamma())?.1)
}

/// The optimal membrane strain D* of the inner problem.
pub fn inner_minimiser_d(g: &Sym2, bcheck: &dyn Fn(f64) -> Sym2, params: &MaterialParams) -> Result<Sym2> {
    let field = SampledField::new(bcheck)?;
    Ok(field.inner(g, params.mu, params.gamma())?.0)
}

/// Recovers (α, Ā, β) from Q̄2 evaluated on a basis of Sym2.
pub fn extract_reduced_model(bcheck: &dyn Fn(f64) -> Sym2, params: &MaterialParams) -> Result<ReducedModel> {
    let field = SampledField::new(bcheck)?;
    let (mu, gamma) = (params.mu, params.gamma());
    let fit = QuadForm2::fit(|g| field.inner(g, mu, gamma).map(|r| r.1))?;
    let q = q2_matrix(mu, gamma);
    let alpha = fit.quadratic.dot(&q) / q.dot(&q);
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::NotReducible(format!("quadratic part has non-positive weight {alpha}")));
    }
    let deviation = (fit.quadratic - alpha * q).norm() / (alpha * q).norm();
    if deviation > STRUCTURE_REJECT {
        return Err(Error::NotReducible(format!(
            "quadratic part deviates from a multiple of Q2 by {deviation:e}"
        )));
    }
    if deviation > STRUCTURE_TOL {
        log::warn!("quadratic part deviates from a multiple of Q2 by {deviation:e}; using the least-squares fit");
    }
    let qinv = q
        .try_inverse()
        .ok_or_else(|| Error::NotReducible("singular Q2 matrix".into()))?;
    let abar = Sym2::from_basis(&(-(qinv * fit.linear) / (2.0 * alpha)));
    let beta = field.inner(&abar, mu, gamma)?.1;
    ReducedModel::new(alpha, abar, beta, mu, gamma)
}

/// Reduced model of a strain profile's limit field.
pub fn reduced_model_for(profile: &StrainProfile) -> Result<ReducedModel> {
    let b = |t: f64| profile.limit_b_check(t);
    Ok(extract_reduced_model(&b, &profile.params)?.with_texture(profile.texture))
}

/// Thickness moments of M̌ = (N⊗N)ˇ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub texture: Texture,
    /// ∫ M̌ dt.
    pub int_m: Sym2,
    /// ∫ t M̌ dt.
    pub int_t_m: Sym2,
    /// ∫ |M̌|² dt.
    pub int_m_norm_sq: f64,
    /// ∫ t tr M̌ dt.
    pub int_t_trace_m: f64,
}

/// One row of the moment table with its closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub name: &'static str,
    pub value: f64,
    pub exact: f64,
}

impl MomentTable {
    /// Rows paired with their closed forms.
    pub fn entries(&self) -> Vec<MomentEntry> {
        let ipi2 = 1.0 / (PI * PI);
        let row = |name, value, exact| MomentEntry { name, value, exact };
        match self.texture {
            Texture::SplayBend => vec![
                row("int_m_xx", self.int_m.xx, 0.5),
                row("int_t_m_xx", self.int_t_m.xx, -ipi2),
                row("int_m_norm_sq", self.int_m_norm_sq, 3.0 / 8.0),
                row("int_t_trace_m", self.int_t_trace_m, -ipi2),
            ],
            _ => vec![
                row("int_m_xx", self.int_m.xx, 0.5),
                row("int_m_yy", self.int_m.yy, 0.5),
                row("int_m_xy", self.int_m.xy, 1.0 / PI),
                row("int_two_m_xy", 2.0 * self.int_m.xy, 2.0 / PI),
                row("int_t_m_xx", self.int_t_m.xx, -ipi2),
                row("int_t_m_yy", self.int_t_m.yy, ipi2),
                row("int_t_m_xy", self.int_t_m.xy, 0.0),
                row("int_m_norm_sq", self.int_m_norm_sq, 1.0),
                row("int_t_trace_m", self.int_t_trace_m, 0.0),
            ],
        }
    }
}

/// Moment integrals of the splay-bend or twisted director by quadrature.
pub fn moment_integrals(texture: Texture) -> Result<MomentTable> {
    let director = match texture {
        Texture::SplayBend => crate::material::DirectorProfile::SplayBend,
        Texture::Twisted => crate::material::DirectorProfile::Twisted,
        other => {
            return Err(Error::param(
                "texture",
                format!("moment integrals are defined for splay-bend and twisted, got {other}"),
            ))
        }
    };
    let rule = thickness_rule();
    let m = |t: f64| {
        let n = director.eval(t);
        Sym2::new(n[0] * n[0], n[0] * n[1], n[1] * n[1])
    };
    let mut table = MomentTable {
        texture,
        int_m: Sym2::ZERO,
        int_t_m: Sym2::ZERO,
        int_m_norm_sq: 0.0,
        int_t_trace_m: 0.0,
    };
    for (t, w) in rule.iter() {
        let mt = m(t);
        table.int_m += mt * w;
        table.int_t_m += mt * (w * t);
        table.int_m_norm_sq += w * mt.norm_sq();
        table.int_t_trace_m += w * t * mt.trace();
    }
    Ok(table)
}

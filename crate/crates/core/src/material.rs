//! Constitutive ingredients: material parameters, director textures,
//! spontaneous-strain profiles and the stored-energy densities.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{min_eigenvalue, spd_inv_sqrt, Mat3, Sym2, Vec3};

/// Number of thickness samples used when validating a profile.
pub const PROFILE_CHECK_SAMPLES: usize = 101;

/// Shear modulus, volumetric stiffness and nematic magnitude parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub mu: f64,
    pub kappa: f64,
    pub alpha0: f64,
    pub h0: f64,
}

impl MaterialParams {
    /// Validates `mu, kappa, h0 > 0` and `alpha0 >= 0` (zero gives a
    /// stress-free flat reference).
    pub fn new(mu: f64, kappa: f64, alpha0: f64, h0: f64) -> Result<Self> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite and > 0, got {v}")))
            }
        };
        positive("mu", mu)?;
        positive("kappa", kappa)?;
        positive("h0", h0)?;
        if !(alpha0.is_finite() && alpha0 >= 0.0) {
            return Err(Error::param("alpha0", format!("must be finite and >= 0, got {alpha0}")));
        }
        Ok(MaterialParams { mu, kappa, alpha0, h0 })
    }

    /// γ = κ / (2μ + κ).
    pub fn gamma(&self) -> f64 {
        self.kappa / (2.0 * self.mu + self.kappa)
    }

    /// δ0 = α0 / (2 h0).
    pub fn delta0(&self) -> f64 {
        self.alpha0 / (2.0 * self.h0)
    }

    /// Order-parameter ratio a_h = 1 + α0 h / h0.
    pub fn a_h(&self, h: f64) -> f64 {
        1.0 + self.alpha0 * h / self.h0
    }
}

/// Through-thickness texture of the spontaneous strain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Texture {
    SplayBend,
    Twisted,
    ConstantNormal,
    Quadratic,
}

impl Texture {
    pub fn name(&self) -> &'static str {
        match self {
            Texture::SplayBend => "splay-bend",
            Texture::Twisted => "twisted",
            Texture::ConstantNormal => "constant-normal",
            Texture::Quadratic => "quadratic",
        }
    }
}

impl std::fmt::Display for Texture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Texture {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "splay-bend" => Ok(Texture::SplayBend),
            "twisted" => Ok(Texture::Twisted),
            "constant-normal" => Ok(Texture::ConstantNormal),
            "quadratic" => Ok(Texture::Quadratic),
            other => Err(Error::param("texture", format!("unknown texture `{other}`"))),
        }
    }
}

/// Director field across the rescaled thickness t ∈ (−1/2, 1/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirectorProfile {
    /// N(t) = (cos f, 0, sin f), f = π/4 + πt/2.
    SplayBend,
    /// N(t) = (cos f, sin f, 0).
    Twisted,
    /// Constant unit director.
    Constant(Vec3),
}

impl DirectorProfile {
    pub fn eval(&self, t: f64) -> Vec3 {
        let f = PI / 4.0 + PI * t / 2.0;
        match self {
            DirectorProfile::SplayBend => Vec3::new(f.cos(), 0.0, f.sin()),
            DirectorProfile::Twisted => Vec3::new(f.cos(), f.sin(), 0.0),
            DirectorProfile::Constant(n) => *n,
        }
    }

    /// dN/dt.
    pub fn derivative(&self, t: f64) -> Vec3 {
        let f = PI / 4.0 + PI * t / 2.0;
        let w = PI / 2.0;
        match self {
            DirectorProfile::SplayBend => Vec3::new(-w * f.sin(), 0.0, w * f.cos()),
            DirectorProfile::Twisted => Vec3::new(-w * f.sin(), w * f.cos(), 0.0),
            DirectorProfile::Constant(_) => Vec3::zeros(),
        }
    }
}

/// Diagonal quadratic spontaneous strain G(t) = I + t·A + t²·Bq.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticStrainSpec {
    /// Diagonal of A (1/length), ordered (1, 2, t).
    pub a: [f64; 3],
    /// Diagonal of Bq (1/length²).
    pub bq: [f64; 3],
}

impl QuadraticStrainSpec {
    pub fn new(a: [f64; 3], bq: [f64; 3]) -> Self {
        QuadraticStrainSpec { a, bq }
    }

    pub fn eval(&self, t: f64) -> Mat3 {
        Mat3::from_diagonal(&Vec3::new(
            1.0 + t * self.a[0] + t * t * self.bq[0],
            1.0 + t * self.a[1] + t * t * self.bq[1],
            1.0 + t * self.a[2] + t * t * self.bq[2],
        ))
    }

    pub fn derivative(&self, t: f64) -> Mat3 {
        Mat3::from_diagonal(&Vec3::new(
            self.a[0] + 2.0 * t * self.bq[0],
            self.a[1] + 2.0 * t * self.bq[1],
            self.a[2] + 2.0 * t * self.bq[2],
        ))
    }

    pub fn second_derivative(&self) -> Mat3 {
        Mat3::from_diagonal(&Vec3::new(2.0 * self.bq[0], 2.0 * self.bq[1], 2.0 * self.bq[2]))
    }

    /// Checks G(t) > 0 on 101 samples of [−h/2, h/2].
    pub fn validate(&self, h: f64) -> Result<()> {
        if !(self.a.iter().chain(self.bq.iter()).all(|v| v.is_finite())) {
            return Err(Error::NonFinite("quadratic strain coefficients".into()));
        }
        for i in 0..PROFILE_CHECK_SAMPLES {
            let t = -0.5 * h + h * i as f64 / (PROFILE_CHECK_SAMPLES - 1) as f64;
            let g = self.eval(t);
            if (0..3).any(|k| g[(k, k)] <= 0.0) {
                return Err(Error::NotPositiveDefinite(format!("quadratic strain at t = {t}")));
            }
        }
        Ok(())
    }
}

/// L(n) = a^{2/3} n⊗n + a^{−1/3}(I − n⊗n).
pub fn nematic_step_tensor(n: &Vec3, a: f64) -> Result<Mat3> {
    if !((n.norm() - 1.0).abs() <= 1e-10) {
        return Err(Error::param("n", format!("director must be a unit vector, |n| = {}", n.norm())));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::param("a", format!("must be > 0, got {a}")));
    }
    Ok(step_tensor_unchecked(n, a))
}

fn step_tensor_unchecked(n: &Vec3, a: f64) -> Mat3 {
    let nn = n * n.transpose();
    a.powf(2.0 / 3.0) * nn + a.powf(-1.0 / 3.0) * (Mat3::identity() - nn)
}

/// A volumetric energy W_vol: zero iff t = 1, divergent as t → 0+.
pub trait VolumetricEnergy: Send + Sync {
    fn value(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;
    /// W_vol''(1).
    fn dd1(&self) -> f64;
}

/// W_vol(t) = κ (t − 1 − log t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogVolumetric {
    pub kappa: f64,
}

impl VolumetricEnergy for LogVolumetric {
    fn value(&self, t: f64) -> f64 {
        w_vol(t, self.kappa)
    }

    fn derivative(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        self.kappa * (1.0 - 1.0 / t)
    }

    fn dd1(&self) -> f64 {
        self.kappa
    }
}

/// κ (t − 1 − log t), evaluated without cancellation near t = 1;
/// `+∞` for t ≤ 0.
pub fn w_vol(t: f64, kappa: f64) -> f64 {
    if !(t > 0.0) {
        return f64::INFINITY;
    }
    let d = t - 1.0;
    let log_t = if d.abs() < 0.5 { d.ln_1p() } else { t.ln() };
    kappa * (d - log_t)
}

pub fn w_vol_dd1(kappa: f64) -> f64 {
    kappa
}

/// Neo-Hookean-type energy with a volumetric term:
/// (μ/2)(|F|² − 3 − 2 log det F) + W_vol(det F).
pub fn w0(f: &Mat3, params: &MaterialParams) -> f64 {
    w0_with(f, params.mu, &LogVolumetric { kappa: params.kappa })
}

pub fn w0_with(f: &Mat3, mu: f64, vol: &dyn VolumetricEnergy) -> f64 {
    let j = f.determinant();
    if !(j > 0.0) {
        return f64::INFINITY;
    }
    0.5 * mu * (f.norm_squared() - 3.0 - 2.0 * j.ln()) + vol.value(j)
}

/// The energy well of the nematic density at one thickness position:
/// holds c̄⁻¹ and log √det c̄ so that the trace formula is cheap to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NematicWell {
    pub cinv: Mat3,
    pub log_sqrt_det: f64,
    pub mu: f64,
    pub kappa: f64,
}

impl NematicWell {
    pub fn new(cbar: &Mat3, mu: f64, kappa: f64) -> Result<Self> {
        if min_eigenvalue(cbar) <= 0.0 {
            return Err(Error::NotPositiveDefinite("spontaneous strain".into()));
        }
        let cinv = cbar
            .try_inverse()
            .ok_or_else(|| Error::NotPositiveDefinite("singular spontaneous strain".into()))?;
        Ok(NematicWell {
            cinv: 0.5 * (cinv + cinv.transpose()),
            log_sqrt_det: 0.5 * cbar.determinant().ln(),
            mu,
            kappa,
        })
    }

    /// (μ/2)[(FᵀF):c̄⁻¹ − 3 − 2 log J] + W_vol(J), J = det F / √det c̄.
    pub fn energy(&self, f: &Mat3) -> f64 {
        let det = f.determinant();
        if !(det > 0.0) {
            return f64::INFINITY;
        }
        let log_j = det.ln() - self.log_sqrt_det;
        let tr = (f.transpose() * f).component_mul(&self.cinv).sum();
        let d = log_j.exp_m1();
        0.5 * self.mu * (tr - 3.0 - 2.0 * log_j) + self.kappa * (d - log_j)
    }

    /// First Piola stress ∂W/∂F = μ(F c̄⁻¹ − F⁻ᵀ) + κ(J − 1)F⁻ᵀ.
    pub fn stress(&self, f: &Mat3) -> Option<Mat3> {
        let det = f.determinant();
        if !(det > 0.0) {
            return None;
        }
        let finv_t = f.try_inverse()?.transpose();
        let j = (det.ln() - self.log_sqrt_det).exp();
        Some(self.mu * (f * self.cinv - finv_t) + self.kappa * (j - 1.0) * finv_t)
    }

    /// Hessian of W with respect to the third column of F:
    /// μ (c̄⁻¹)₃₃ I + (μ + κ) g gᵀ with g the third column of F⁻ᵀ.
    pub fn third_column_hessian(&self, f: &Mat3) -> Option<Mat3> {
        let finv = f.try_inverse()?;
        let g = finv.row(2).transpose();
        Some(self.mu * self.cinv[(2, 2)] * Mat3::identity() + (self.mu + self.kappa) * g * g.transpose())
    }
}

/// A thickness-dependent spontaneous strain together with its limit fields.
#[derive(Debug, Clone, PartialEq)]
pub struct StrainProfile {
    pub texture: Texture,
    pub params: MaterialParams,
    /// Physical thickness.
    pub h: f64,
    pub director: Option<DirectorProfile>,
    pub quadratic: Option<QuadraticStrainSpec>,
}

impl StrainProfile {
    /// Splay-bend, twisted or constant-normal (n = e3) profile of thickness `h`.
    pub fn new(texture: Texture, params: MaterialParams, h: f64) -> Result<Self> {
        let director = match texture {
            Texture::SplayBend => DirectorProfile::SplayBend,
            Texture::Twisted => DirectorProfile::Twisted,
            Texture::ConstantNormal => DirectorProfile::Constant(Vec3::z()),
            Texture::Quadratic => {
                return Err(Error::param(
                    "texture",
                    "the quadratic texture needs a QuadraticStrainSpec (use StrainProfile::quadratic)",
                ))
            }
        };
        Self::build(texture, params, h, Some(director), None)
    }

    /// Constant-normal profile with an arbitrary unit director.
    pub fn constant_normal(params: MaterialParams, h: f64, n: Vec3) -> Result<Self> {
        if (n.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::param("n", "director must be a unit vector"));
        }
        Self::build(Texture::ConstantNormal, params, h, Some(DirectorProfile::Constant(n)), None)
    }

    pub fn quadratic(spec: QuadraticStrainSpec, params: MaterialParams, h: f64) -> Result<Self> {
        Self::build(Texture::Quadratic, params, h, None, Some(spec))
    }

    /// The same texture and parameters at another thickness.
    pub fn with_thickness(&self, h: f64) -> Result<Self> {
        Self::build(self.texture, self.params, h, self.director, self.quadratic)
    }

    fn build(
        texture: Texture,
        params: MaterialParams,
        h: f64,
        director: Option<DirectorProfile>,
        quadratic: Option<QuadraticStrainSpec>,
    ) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::param("h", format!("must be finite and > 0, got {h}")));
        }
        let p = StrainProfile { texture, params, h, director, quadratic };
        if let Some(q) = &p.quadratic {
            q.validate(h)?;
        }
        for i in 0..PROFILE_CHECK_SAMPLES {
            let z3 = -0.5 * h + h * i as f64 / (PROFILE_CHECK_SAMPLES - 1) as f64;
            if texture == Texture::ConstantNormal && p.order_ratio(z3) <= 0.0 {
                return Err(Error::param(
                    "h",
                    format!("order ratio becomes non-positive at z3 = {z3}"),
                ));
            }
            let c = p.c_bar(z3);
            if !c.iter().all(|v| v.is_finite()) || min_eigenvalue(&c) <= 0.0 {
                return Err(Error::NotPositiveDefinite(format!("spontaneous strain at z3 = {z3}")));
            }
        }
        Ok(p)
    }

    /// Local order ratio: a_h for splay-bend/twisted, 1 + α0 z3/h0 for the
    /// constant-normal texture, 1 for the quadratic one.
    pub fn order_ratio(&self, z3: f64) -> f64 {
        match self.texture {
            Texture::SplayBend | Texture::Twisted => self.params.a_h(self.h),
            Texture::ConstantNormal => 1.0 + self.params.alpha0 * z3 / self.params.h0,
            Texture::Quadratic => 1.0,
        }
    }

    /// Spontaneous strain c̄_h at physical height z3 ∈ (−h/2, h/2).
    pub fn c_bar(&self, z3: f64) -> Mat3 {
        match (self.texture, &self.quadratic) {
            (Texture::Quadratic, Some(q)) => q.eval(z3),
            _ => {
                let n = self.director_at(z3 / self.h);
                step_tensor_unchecked(&n, self.order_ratio(z3))
            }
        }
    }

    /// Rescaled spontaneous strain C̄_h(x3) = c̄_h(h x3).
    pub fn c_bar_rescaled(&self, x3: f64) -> Mat3 {
        self.c_bar(self.h * x3)
    }

    /// Ū_h⁻¹(z3) by exact square root and inverse.
    pub fn u_bar_inv(&self, z3: f64) -> Result<Mat3> {
        spd_inv_sqrt(&self.c_bar(z3))
    }

    pub fn well(&self, z3: f64) -> Result<NematicWell> {
        NematicWell::new(&self.c_bar(z3), self.params.mu, self.params.kappa)
    }

    /// Director at rescaled height x3 (e3 for the quadratic texture, which
    /// carries no director).
    pub fn director_at(&self, x3: f64) -> Vec3 {
        self.director.map(|d| d.eval(x3)).unwrap_or_else(Vec3::z)
    }

    /// M(x3) = N ⊗ N.
    pub fn m(&self, x3: f64) -> Mat3 {
        let n = self.director_at(x3);
        n * n.transpose()
    }

    pub fn m_check(&self, x3: f64) -> Sym2 {
        Sym2::upper_left(&self.m(x3))
    }

    /// The h → 0 limit field B(x3) with Ū_h⁻¹(h x3) = I + h B(x3) + o(h).
    pub fn limit_b(&self, x3: f64) -> Mat3 {
        let third = Mat3::identity() / 3.0;
        match self.texture {
            Texture::SplayBend | Texture::Twisted => -self.params.delta0() * (self.m(x3) - third),
            Texture::ConstantNormal => {
                (0.5 * x3 * self.params.alpha0 / self.params.h0) * (third - self.m(x3))
            }
            Texture::Quadratic => {
                let a = self.quadratic.map(|q| q.a).unwrap_or([0.0; 3]);
                Mat3::from_diagonal(&Vec3::new(a[0], a[1], a[2])) * (-0.5 * x3)
            }
        }
    }

    pub fn limit_b_check(&self, x3: f64) -> Sym2 {
        Sym2::upper_left(&self.limit_b(x3))
    }

    /// C̄_h(x3) − [I + (α0 h/h0)(N⊗N − I/3)], the remainder of the first-order
    /// expansion (splay-bend, twisted and constant-normal textures).
    pub fn linearisation_remainder(&self, x3: f64) -> Mat3 {
        let alpha = match self.texture {
            Texture::ConstantNormal => self.params.alpha0 * self.h * x3 / self.params.h0,
            _ => self.params.alpha0 * self.h / self.params.h0,
        };
        let lin = Mat3::identity() + alpha * (self.m(x3) - Mat3::identity() / 3.0);
        self.c_bar_rescaled(x3) - lin
    }
}

/// (μ/2)[(FᵀF):c̄_h⁻¹(z3) − 3 − 2 log J] + W_vol(J) with
/// J = det F/√det c̄_h(z3); `+∞` for det F ≤ 0.
pub fn w_h(z3: f64, f: &Mat3, profile: &StrainProfile) -> Result<f64> {
    Ok(profile.well(z3)?.energy(f))
}

/// B and B̌ as closures.
pub fn limit_b_field(
    profile: &StrainProfile,
) -> (impl Fn(f64) -> Mat3 + '_, impl Fn(f64) -> Sym2 + '_) {
    (move |x3| profile.limit_b(x3), move |x3| profile.limit_b_check(x3))
}

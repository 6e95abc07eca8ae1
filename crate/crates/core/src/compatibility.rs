//! Riemannian compatibility of thickness-dependent metrics.
//!
//! Metrics depend on the thickness coordinate t only (index 2), so every
//! partial derivative except ∂_t vanishes. Index order is (1, 2, t) ↦ (0, 1, 2).

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::{DirectorProfile, QuadraticStrainSpec, StrainProfile, Texture};
use crate::tensor::{min_eigenvalue, Mat3, Vec3};

/// Default number of t samples for [`ricci`].
pub const RICCI_GRID: usize = 41;
/// Relative factor of the compatibility threshold.
pub const COMPAT_TOL_FACTOR: f64 = 1e-7;
/// Finite-difference step for Ġ, relative to the slab thickness.
pub const FD_STEP_REL: f64 = 1e-5;
/// Step of the second-difference fallback for G̈, relative to the thickness.
const FD2_STEP_REL: f64 = 1e-4;
/// Tolerance on coefficient comparisons in [`classify_quadratic`].
pub const CLASSIFY_TOL: f64 = 1e-12;

type MatFn = Arc<dyn Fn(f64) -> Mat3 + Send + Sync>;

/// Symmetric positive-definite metric G(t) on t ∈ [−h/2, h/2].
#[derive(Clone)]
pub struct MetricProfile {
    g: MatFn,
    g_dot: Option<MatFn>,
    g_ddot: Option<MatFn>,
    pub h: f64,
    pub fd_step: f64,
}

impl fmt::Debug for MetricProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricProfile")
            .field("h", &self.h)
            .field("analytic_first", &self.g_dot.is_some())
            .field("analytic_second", &self.g_ddot.is_some())
            .finish()
    }
}

impl MetricProfile {
    /// Metric with finite-difference derivatives.
    pub fn new(h: f64, g: impl Fn(f64) -> Mat3 + Send + Sync + 'static) -> Result<Self> {
        Self::build(h, Arc::new(g), None, None)
    }

    /// Metric with analytic Ġ and G̈. Ġ is checked against central
    /// differences at 11 points.
    pub fn with_derivatives(
        h: f64,
        g: impl Fn(f64) -> Mat3 + Send + Sync + 'static,
        g_dot: impl Fn(f64) -> Mat3 + Send + Sync + 'static,
        g_ddot: impl Fn(f64) -> Mat3 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::build(h, Arc::new(g), Some(Arc::new(g_dot)), Some(Arc::new(g_ddot)))
    }

    fn build(h: f64, g: MatFn, g_dot: Option<MatFn>, g_ddot: Option<MatFn>) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::param("h", format!("must be finite and > 0, got {h}")));
        }
        let m = MetricProfile { g, g_dot, g_ddot, h, fd_step: FD_STEP_REL * h };
        for t in grid(h, crate::material::PROFILE_CHECK_SAMPLES) {
            let gt = m.g(t);
            if !gt.iter().all(|v| v.is_finite()) || min_eigenvalue(&gt) <= 0.0 {
                return Err(Error::NotPositiveDefinite(format!("metric at t = {t}")));
            }
        }
        if m.g_dot.is_some() {
            let scale = grid(h, 11).map(|t| m.g_dot(t).abs().max()).fold(0.0, f64::max);
            for t in grid(h, 11) {
                let err = (m.g_dot(t) - m.fd_g_dot(t)).abs().max();
                if err > 1e-6 * scale.max(f64::MIN_POSITIVE) && err > 1e-12 {
                    return Err(Error::param(
                        "g_dot",
                        format!("analytic derivative disagrees with finite differences at t = {t}"),
                    ));
                }
            }
        }
        Ok(m)
    }

    /// G ≡ I.
    pub fn identity(h: f64) -> Result<Self> {
        Self::with_derivatives(h, |_| Mat3::identity(), |_| Mat3::zeros(), |_| Mat3::zeros())
    }

    /// G(t) = I + (a − 1) n⊗n with n(t) = N(t/h) for a splay-bend or twisted
    /// director N.
    pub fn nematic(director: DirectorProfile, a: f64, h: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::param("a", format!("must be > 0, got {a}")));
        }
        Self::scaled_nematic(director, a, h, 1.0)
    }

    fn scaled_nematic(director: DirectorProfile, a: f64, h: f64, c: f64) -> Result<Self> {
        let w = std::f64::consts::FRAC_PI_2 / h;
        let n = move |t: f64| director.eval(t / h);
        let dn = move |t: f64| director.derivative(t / h) / h;
        let g = move |t: f64| {
            let v = n(t);
            c * (Mat3::identity() + (a - 1.0) * v * v.transpose())
        };
        let gd = move |t: f64| {
            let (v, d) = (n(t), dn(t));
            c * (a - 1.0) * (d * v.transpose() + v * d.transpose())
        };
        let gdd = move |t: f64| {
            let (v, d) = (n(t), dn(t));
            let dd = match director {
                DirectorProfile::Constant(_) => Vec3::zeros(),
                _ => -w * w * v,
            };
            c * (a - 1.0) * (dd * v.transpose() + 2.0 * d * d.transpose() + v * dd.transpose())
        };
        Self::with_derivatives(h, g, gd, gdd)
    }

    /// G(t) = I + t·A + t²·Bq.
    pub fn quadratic(spec: QuadraticStrainSpec, h: f64) -> Result<Self> {
        spec.validate(h)?;
        Self::with_derivatives(
            h,
            move |t| spec.eval(t),
            move |t| spec.derivative(t),
            move |_| spec.second_derivative(),
        )
    }

    /// The physical spontaneous strain c̄_h(z3) of a profile, as a metric on
    /// (−h/2, h/2).
    pub fn from_profile(profile: &StrainProfile) -> Result<Self> {
        let h = profile.h;
        match profile.texture {
            Texture::SplayBend | Texture::Twisted => {
                let a = profile.params.a_h(h);
                let director = profile.director.ok_or_else(|| Error::param("director", "missing"))?;
                Self::scaled_nematic(director, a, h, a.powf(-1.0 / 3.0))
            }
            Texture::ConstantNormal => {
                let n = profile.director_at(0.0);
                let slope = profile.params.alpha0 / profile.params.h0;
                let nn = n * n.transpose();
                let rest = Mat3::identity() - nn;
                let abar = move |t: f64| 1.0 + slope * t;
                let comb = move |t: f64, k: usize| {
                    // k-th derivative of a^{2/3} and a^{-1/3}
                    let a = abar(t);
                    let (p, q) = (2.0 / 3.0, -1.0 / 3.0);
                    let d = |e: f64| match k {
                        0 => a.powf(e),
                        1 => e * a.powf(e - 1.0) * slope,
                        _ => e * (e - 1.0) * a.powf(e - 2.0) * slope * slope,
                    };
                    d(p) * nn + d(q) * rest
                };
                Self::with_derivatives(h, move |t| comb(t, 0), move |t| comb(t, 1), move |t| comb(t, 2))
            }
            Texture::Quadratic => {
                let spec = profile.quadratic.ok_or_else(|| Error::param("quadratic", "missing spec"))?;
                Self::quadratic(spec, h)
            }
        }
    }

    pub fn g(&self, t: f64) -> Mat3 {
        (self.g)(t)
    }

    fn fd_g_dot(&self, t: f64) -> Mat3 {
        let e = self.fd_step;
        (self.g(t + e) - self.g(t - e)) / (2.0 * e)
    }

    pub fn g_dot(&self, t: f64) -> Mat3 {
        match &self.g_dot {
            Some(f) => f(t),
            None => self.fd_g_dot(t),
        }
    }

    pub fn g_ddot(&self, t: f64) -> Mat3 {
        match (&self.g_ddot, &self.g_dot) {
            (Some(f), _) => f(t),
            (None, Some(d)) => {
                let e = self.fd_step;
                (d(t + e) - d(t - e)) / (2.0 * e)
            }
            (None, None) => {
                let e = FD2_STEP_REL * self.h;
                (self.g(t + e) - 2.0 * self.g(t) + self.g(t - e)) / (e * e)
            }
        }
    }
}

/// Equispaced samples of [−h/2, h/2] including both ends.
fn grid(h: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| -0.5 * h + h * i as f64 / (n - 1) as f64)
}

pub type Array3 = [[[f64; 3]; 3]; 3];
pub type Array2 = [[f64; 3]; 3];

/// Christoffel symbols at one t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Christoffel {
    /// First kind Γ_ijl, indexed `[i][j][l]`.
    pub first: Array3,
    /// Second kind Γ_ij^k, indexed `[i][j][k]`.
    pub second: Array3,
}

/// Γ_ijl = ½(∂_i G_jl + ∂_j G_il − ∂_l G_ij) with only ∂_t nonzero.
fn first_kind(gd: &Mat3) -> Array3 {
    let mut out = [[[0.0; 3]; 3]; 3];
    let d = |i: usize| if i == 2 { 1.0 } else { 0.0 };
    for i in 0..3 {
        for j in 0..3 {
            for l in 0..3 {
                out[i][j][l] = 0.5 * (d(i) * gd[(j, l)] + d(j) * gd[(i, l)] - d(l) * gd[(i, j)]);
            }
        }
    }
    out
}

fn raise(ginv: &Mat3, first: &Array3) -> Array3 {
    let mut out = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j][k] = (0..3).map(|l| ginv[(k, l)] * first[i][j][l]).sum();
            }
        }
    }
    out
}

fn metric_inverse(g: &Mat3, t: f64) -> Result<Mat3> {
    if min_eigenvalue(g) <= 0.0 {
        return Err(Error::NotPositiveDefinite(format!("metric at t = {t}")));
    }
    g.try_inverse()
        .ok_or_else(|| Error::NotPositiveDefinite(format!("singular metric at t = {t}")))
}

pub fn christoffel(metric: &MetricProfile, t: f64) -> Result<Christoffel> {
    let ginv = metric_inverse(&metric.g(t), t)?;
    let first = first_kind(&metric.g_dot(t));
    Ok(Christoffel { first, second: raise(&ginv, &first) })
}

/// Γ_ij^k and ∂_t Γ_ij^k at t.
fn christoffel_with_derivative(metric: &MetricProfile, t: f64) -> Result<(Christoffel, Array3)> {
    let g = metric.g(t);
    let gd = metric.g_dot(t);
    let ginv = metric_inverse(&g, t)?;
    let first = first_kind(&gd);
    let second = raise(&ginv, &first);
    let dginv = -ginv * gd * ginv;
    let dfirst = first_kind(&metric.g_ddot(t));
    let a = raise(&dginv, &first);
    let b = raise(&ginv, &dfirst);
    let mut d = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                d[i][j][k] = a[i][j][k] + b[i][j][k];
            }
        }
    }
    Ok((Christoffel { first, second }, d))
}

fn ricci_from(gam: &Array3, dgam: &Array3) -> Array2 {
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            // ∂_l Γ_ij^l − ∂_j Γ_il^l with only l = t, j = t contributing
            let mut v = dgam[i][j][2];
            if j == 2 {
                v -= (0..3).map(|l| dgam[i][l][l]).sum::<f64>();
            }
            for l in 0..3 {
                for k in 0..3 {
                    v += gam[l][k][l] * gam[i][j][k] - gam[j][k][l] * gam[i][l][k];
                }
            }
            r[i][j] = v;
        }
    }
    r
}

/// Ricci tensor R_ij at one t.
pub fn ricci_at(metric: &MetricProfile, t: f64) -> Result<Array2> {
    let (c, d) = christoffel_with_derivative(metric, t)?;
    Ok(ricci_from(&c.second, &d))
}

/// Fully covariant Riemann tensor R_lijk = G_lm R^m_ijk with
/// R^m_ijk = ∂_j Γ_ik^m − ∂_k Γ_ij^m + Γ_js^m Γ_ik^s − Γ_ks^m Γ_ij^s.
pub fn riemann_at(metric: &MetricProfile, t: f64) -> Result<[[[[f64; 3]; 3]; 3]; 3]> {
    let (c, d) = christoffel_with_derivative(metric, t)?;
    let gam = c.second;
    let g = metric.g(t);
    let mut up = [[[[0.0; 3]; 3]; 3]; 3];
    for m in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let mut v = 0.0;
                    if j == 2 {
                        v += d[i][k][m];
                    }
                    if k == 2 {
                        v -= d[i][j][m];
                    }
                    for s in 0..3 {
                        v += gam[j][s][m] * gam[i][k][s] - gam[k][s][m] * gam[i][j][s];
                    }
                    up[m][i][j][k] = v;
                }
            }
        }
    }
    let mut low = [[[[0.0; 3]; 3]; 3]; 3];
    for l in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    low[l][i][j][k] = (0..3).map(|m| g[(l, m)] * up[m][i][j][k]).sum();
                }
            }
        }
    }
    Ok(low)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Compatible,
    Incompatible,
}

/// Christoffel symbols and Ricci tensor of a metric on a t-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RicciReport {
    pub t: Vec<f64>,
    pub christoffel: Vec<Array3>,
    pub ricci: Vec<Array2>,
    pub max_abs: f64,
    /// max |Ġ|² / min eig G over the grid.
    pub scale: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// Ricci tensor on the default 41-point grid with the scale-aware verdict.
pub fn ricci(metric: &MetricProfile) -> Result<RicciReport> {
    ricci_on_grid(metric, RICCI_GRID)
}

pub fn ricci_on_grid(metric: &MetricProfile, n: usize) -> Result<RicciReport> {
    if n < 2 {
        return Err(Error::param("n", "Ricci grid needs at least 2 points"));
    }
    let ts: Vec<f64> = grid(metric.h, n).collect();
    let samples: Vec<(Christoffel, Array2, f64, f64)> = ts
        .par_iter()
        .map(|&t| {
            let (c, d) = christoffel_with_derivative(metric, t)?;
            let r = ricci_from(&c.second, &d);
            let gd = metric.g_dot(t).norm_squared();
            let lmin = min_eigenvalue(&metric.g(t));
            Ok((c, r, gd, lmin))
        })
        .collect::<Result<_>>()?;
    let max_gd = samples.iter().map(|s| s.2).fold(0.0, f64::max);
    let min_l = samples.iter().map(|s| s.3).fold(f64::INFINITY, f64::min);
    let scale = max_gd / min_l;
    let tolerance = COMPAT_TOL_FACTOR * scale;
    let max_abs = samples
        .iter()
        .flat_map(|s| s.1.iter().flatten().map(|v| v.abs()))
        .fold(0.0, f64::max);
    if !max_abs.is_finite() {
        return Err(Error::NonFinite("Ricci tensor".into()));
    }
    let verdict = if max_abs <= tolerance { Verdict::Compatible } else { Verdict::Incompatible };
    Ok(RicciReport {
        t: ts,
        christoffel: samples.iter().map(|s| s.0.second).collect(),
        ricci: samples.iter().map(|s| s.1).collect(),
        max_abs,
        scale,
        tolerance,
        verdict,
    })
}

/// Cases of compatible diagonal quadratic strains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadraticCase {
    /// A = Bq = 0.
    CaseI,
    /// Only the (1,1) entry varies, as the square (1 + A11 t/2)².
    CaseII,
    /// Only the (2,2) entry varies, as the square (1 + A22 t/2)².
    CaseIII,
    /// Only the (t,t) entry varies.
    CaseIV,
    Incompatible,
}

impl QuadraticCase {
    pub fn is_compatible(&self) -> bool {
        !matches!(self, QuadraticCase::Incompatible)
    }
}

pub fn classify_quadratic(spec: &QuadraticStrainSpec) -> QuadraticCase {
    let z = |v: f64| v.abs() <= CLASSIFY_TOL;
    let [a1, a2, at] = spec.a;
    let [b1, b2, bt] = spec.bq;
    if [a1, a2, at, b1, b2, bt].iter().all(|&v| z(v)) {
        QuadraticCase::CaseI
    } else if z(a2) && z(at) && z(b2) && z(bt) && z(b1 - a1 * a1 / 4.0) && !z(b1) {
        QuadraticCase::CaseII
    } else if z(a1) && z(at) && z(b1) && z(bt) && z(b2 - a2 * a2 / 4.0) && !z(b2) {
        QuadraticCase::CaseIII
    } else if z(a1) && z(a2) && z(b1) && z(b2) && !z(at * at + bt * bt) {
        QuadraticCase::CaseIV
    } else {
        QuadraticCase::Incompatible
    }
}

/// v(s, z2, t) = γ(s) + t N(s) + z2 e2 around a planar circle γ of signed
/// curvature k, binormal e2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeDeformation {
    pub k: f64,
    pub h: f64,
    pub s_range: (f64, f64),
    pub z2_range: (f64, f64),
}

pub fn tube_deformation(
    k: f64,
    h: f64,
    s_range: (f64, f64),
    z2_range: (f64, f64),
) -> Result<TubeDeformation> {
    if !k.is_finite() || k == 0.0 {
        return Err(Error::param("k", "curvature must be finite and nonzero (k = 0 is the identity map)"));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::param("h", format!("must be > 0, got {h}")));
    }
    if k.abs() * h / 2.0 >= 1.0 {
        return Err(Error::param("k", format!("|k| h / 2 = {} must be < 1", k.abs() * h / 2.0)));
    }
    if !(s_range.0 < s_range.1 && z2_range.0 < z2_range.1) {
        return Err(Error::param("domain", "empty box"));
    }
    Ok(TubeDeformation { k, h, s_range, z2_range })
}

impl TubeDeformation {
    pub fn curve(&self, s: f64) -> Vec3 {
        let (sn, cs) = (self.k * s).sin_cos();
        Vec3::new(sn / self.k, 0.0, (cs - 1.0) / self.k)
    }

    pub fn tangent(&self, s: f64) -> Vec3 {
        let (sn, cs) = (self.k * s).sin_cos();
        Vec3::new(cs, 0.0, -sn)
    }

    /// Signed normal with T' = k N, T × N = e2.
    pub fn normal(&self, s: f64) -> Vec3 {
        let (sn, cs) = (self.k * s).sin_cos();
        Vec3::new(-sn, 0.0, -cs)
    }

    pub fn eval(&self, s: f64, z2: f64, t: f64) -> Vec3 {
        self.curve(s) + t * self.normal(s) + z2 * Vec3::y()
    }

    /// ∇v with columns ∂_s v = (1 − k t) T, ∂_{z2} v = e2, ∂_t v = N.
    pub fn gradient(&self, s: f64, _z2: f64, t: f64) -> Mat3 {
        let mut m = Mat3::zeros();
        // N' = −k T
        m.set_column(0, &(self.tangent(s) - t * self.k * self.tangent(s)));
        m.set_column(1, &Vec3::y());
        m.set_column(2, &self.normal(s));
        m
    }

    /// diag((1 − k t)², 1, 1).
    pub fn target_metric(&self, t: f64) -> Mat3 {
        Mat3::from_diagonal(&Vec3::new((1.0 - self.k * t).powi(2), 1.0, 1.0))
    }

    /// The quadratic strain realised by this tube: A = −2k e1⊗e1, Bq = k² e1⊗e1.
    pub fn quadratic_spec(&self) -> QuadraticStrainSpec {
        QuadraticStrainSpec::new([-2.0 * self.k, 0.0, 0.0], [self.k * self.k, 0.0, 0.0])
    }

    /// max |∇vᵀ∇v − G(t)| over an n³ grid of the box.
    pub fn residual(&self, n: usize) -> f64 {
        let n = n.max(2);
        let lin = |a: f64, b: f64, i: usize| a + (b - a) * i as f64 / (n - 1) as f64;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let s = lin(self.s_range.0, self.s_range.1, i);
                let mut worst: f64 = 0.0;
                for j in 0..n {
                    let z2 = lin(self.z2_range.0, self.z2_range.1, j);
                    for l in 0..n {
                        let t = lin(-0.5 * self.h, 0.5 * self.h, l);
                        let f = self.gradient(s, z2, t);
                        let r = (f.transpose() * f - self.target_metric(t)).abs().max();
                        worst = worst.max(r);
                    }
                }
                worst
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn flat_metric() {
        let m = MetricProfile::identity(0.2).unwrap();
        let c = christoffel(&m, 0.05).unwrap();
        assert!(c.second.iter().flatten().flatten().all(|v| *v == 0.0));
        let r = ricci(&m).unwrap();
        assert_eq!(r.verdict, Verdict::Compatible);
        assert!(r.max_abs < 1e-12);
    }

    #[test]
    fn splay_bend_christoffel_closed_forms() {
        let (a, h) = (1.1, 0.1);
        let m = MetricProfile::nematic(DirectorProfile::SplayBend, a, h).unwrap();
        let c = christoffel(&m, 0.0).unwrap();
        let f = PI / 4.0;
        let expect = -((a - 1.0f64).powi(2) / a) * (PI / (2.0 * h)) * f.sin().powi(2) * f.cos().powi(2);
        assert!((c.second[0][0][0] - expect).abs() < 1e-12 * expect.abs().max(1.0));
        assert!((c.second[0][0][0] + 0.035700).abs() < 1e-6);
        for t in [-0.04, 0.0, 0.013, 0.05] {
            let c = christoffel(&m, t).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        assert_eq!(c.second[i][j][k], c.second[j][i][k]);
                        if i == 1 || j == 1 || k == 1 {
                            assert!(c.second[i][j][k].abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn twisted_tt_symbols_vanish() {
        let m = MetricProfile::nematic(DirectorProfile::Twisted, 1.1, 0.1).unwrap();
        for t in [-0.05, -0.01, 0.02, 0.05] {
            let c = christoffel(&m, t).unwrap();
            for k in 0..3 {
                assert!(c.second[2][2][k].abs() < 1e-14);
            }
        }
    }

    #[test]
    fn twisted_ricci_tt_constant() {
        let (a, h) = (1.1, 0.1);
        let m = MetricProfile::nematic(DirectorProfile::Twisted, a, h).unwrap();
        let expect = -((a - 1.0f64).powi(2) / (2.0 * a)) * (PI / (2.0 * h)).powi(2);
        let r = ricci(&m).unwrap();
        assert_eq!(r.verdict, Verdict::Incompatible);
        for rij in &r.ricci {
            assert!((rij[2][2] - expect).abs() < 1e-9 * expect.abs());
        }
    }

    #[test]
    fn ricci_is_symmetric_and_contracts_riemann() {
        let m = MetricProfile::nematic(DirectorProfile::SplayBend, 1.3, 0.2).unwrap();
        for t in [-0.07, 0.0, 0.031] {
            let r = ricci_at(&m, t).unwrap();
            let riem = riemann_at(&m, t).unwrap();
            let ginv = m.g(t).try_inverse().unwrap();
            for i in 0..3 {
                for k in 0..3 {
                    assert!((r[i][k] - r[k][i]).abs() < 1e-9);
                    // R_ik = G^{lj} R_lijk
                    let c: f64 = (0..3)
                        .flat_map(|l| (0..3).map(move |j| (l, j)))
                        .map(|(l, j)| ginv[(l, j)] * riem[l][i][j][k])
                        .sum();
                    assert!((c - r[i][k]).abs() < 1e-9 * (1.0 + r[i][k].abs()));
                }
            }
        }
    }

    #[test]
    fn finite_difference_fallback_agrees() {
        let (a, h) = (1.2, 0.1);
        let analytic = MetricProfile::nematic(DirectorProfile::SplayBend, a, h).unwrap();
        let fd = MetricProfile::new(h, move |t| analytic.g(t)).unwrap();
        let analytic = MetricProfile::nematic(DirectorProfile::SplayBend, a, h).unwrap();
        let scale = ricci(&analytic).unwrap().max_abs;
        for t in [-0.03, 0.0, 0.027] {
            let ra = ricci_at(&analytic, t).unwrap();
            let rf = ricci_at(&fd, t).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((ra[i][j] - rf[i][j]).abs() < 1e-5 * scale, "{i}{j}: {} vs {} ({scale})", ra[i][j], rf[i][j]);
                }
            }
        }
    }

    #[test]
    fn wrong_analytic_derivative_rejected() {
        let r = MetricProfile::with_derivatives(
            0.1,
            |t| Mat3::identity() * (1.0 + t),
            |_| Mat3::identity() * 2.0,
            |_| Mat3::zeros(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn profile_metric_matches_strain_profile() {
        let p = crate::material::MaterialParams::new(1.0, 2.0, 0.8, 1.0).unwrap();
        for tex in [Texture::SplayBend, Texture::Twisted, Texture::ConstantNormal] {
            let prof = StrainProfile::new(tex, p, 0.1).unwrap();
            let m = MetricProfile::from_profile(&prof).unwrap();
            for z in [-0.04, 0.0, 0.03] {
                assert!((m.g(z) - prof.c_bar(z)).abs().max() < 1e-14);
            }
        }
    }

    #[test]
    fn constant_normal_is_incompatible() {
        let p = crate::material::MaterialParams::new(1.0, 2.0, 1.0, 1.0).unwrap();
        let prof = StrainProfile::new(Texture::ConstantNormal, p, 0.1).unwrap();
        let r = ricci(&MetricProfile::from_profile(&prof).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::Incompatible);
    }

    #[test]
    fn classify_examples() {
        use QuadraticCase::*;
        assert_eq!(classify_quadratic(&QuadraticStrainSpec::new([0.0; 3], [0.0; 3])), CaseI);
        let k = 0.7;
        let s = QuadraticStrainSpec::new([-2.0 * k, 0.0, 0.0], [k * k, 0.0, 0.0]);
        assert_eq!(classify_quadratic(&s), CaseII);
        let s = QuadraticStrainSpec::new([0.0, 0.4, 0.0], [0.0, 0.04, 0.0]);
        assert_eq!(classify_quadratic(&s), CaseIII);
        let s = QuadraticStrainSpec::new([0.0, 0.0, 0.3], [0.0, 0.0, -0.5]);
        assert_eq!(classify_quadratic(&s), CaseIV);
        let s = QuadraticStrainSpec::new([1.0, 0.0, 0.0], [0.0; 3]);
        assert_eq!(classify_quadratic(&s), Incompatible);
    }

    #[test]
    fn tube_examples() {
        let tube = tube_deformation(0.5, 0.2, (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        assert!(tube.residual(11) < 1e-10);
        let f = tube.gradient(0.3, 0.2, 0.0);
        assert!((f.transpose() * f - Mat3::identity()).abs().max() < 1e-15);
        let g = tube.target_metric(0.08);
        assert!((g[(0, 0)] - (1.0 - 0.08 + 0.25 * 0.0064)).abs() < 1e-15);
        assert!(tube_deformation(0.0, 0.2, (0.0, 1.0), (0.0, 1.0)).is_err());
        assert!(tube_deformation(20.0, 0.2, (0.0, 1.0), (0.0, 1.0)).is_err());
    }

    #[test]
    fn tube_gradient_matches_finite_differences() {
        let tube = tube_deformation(-0.7, 0.3, (-2.0, 2.0), (0.0, 1.0)).unwrap();
        let (s, z2, t) = (0.4, 0.3, -0.1);
        let e = 1e-6;
        let f = tube.gradient(s, z2, t);
        let cols = [
            (tube.eval(s + e, z2, t) - tube.eval(s - e, z2, t)) / (2.0 * e),
            (tube.eval(s, z2 + e, t) - tube.eval(s, z2 - e, t)) / (2.0 * e),
            (tube.eval(s, z2, t + e) - tube.eval(s, z2, t - e)) / (2.0 * e),
        ];
        for (c, fd) in cols.iter().enumerate() {
            assert!((f.column(c) - fd).norm() < 1e-9);
        }
        // the tangent rotates towards the signed normal
        let dt = (tube.tangent(s + e) - tube.tangent(s - e)) / (2.0 * e);
        assert!((dt - tube.k * tube.normal(s)).norm() < 1e-9);
        assert!((tube.tangent(s).cross(&tube.normal(s)) - Vec3::y()).norm() < 1e-15);
    }

    #[test]
    fn tube_metric_is_ricci_flat() {
        let tube = tube_deformation(0.7, 0.2, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let m = MetricProfile::quadratic(tube.quadratic_spec(), 0.2).unwrap();
        let r = ricci(&m).unwrap();
        assert_eq!(r.verdict, Verdict::Compatible);
        assert!(r.max_abs <= 1e-8 * r.scale);
    }
}

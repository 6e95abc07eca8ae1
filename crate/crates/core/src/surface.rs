//! Explicit developable isometries of a flat sheet, their fundamental forms
//! and mesh export.

use std::fmt::{self, Write as _};
use std::sync::Arc;

use nalgebra::Matrix3x2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::Rect;
use crate::error::{Error, Result};
use crate::numfmt::sig9;
use crate::plate_energy::{limit_energy, CurvatureField};
use crate::reduction::ReducedModel;
use crate::tensor::{Mat2, Mat3, Sym2, Vec3};

pub type Mat32 = Matrix3x2<f64>;

/// Position, tangent map, normal ν = ∂1y ∧ ∂2y and second fundamental form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub y: Vec3,
    pub dy: Mat32,
    pub normal: Vec3,
    pub shape: Sym2,
}

impl SurfacePoint {
    /// ∇'ν = ∇'y · A (Weingarten relation for isometries).
    pub fn dnormal(&self) -> Mat32 {
        self.dy * self.shape.to_matrix()
    }

    /// (∇'y | ν).
    pub fn frame(&self) -> Mat3 {
        let mut m = Mat3::zeros();
        m.fixed_view_mut::<3, 2>(0, 0).copy_from(&self.dy);
        m.set_column(2, &self.normal);
        m
    }
}

pub type SurfaceFn = Arc<dyn Fn(f64, f64) -> SurfacePoint + Send + Sync>;

#[derive(Clone)]
pub enum SurfaceKind {
    Plane,
    CylinderX1 { k: f64 },
    CylinderX2 { k: f64 },
    /// y^α = R_αᵀ y(Ř_α x') with y the cylinder of signed radius ρ.
    RotatedCylinder { alpha: f64, rho: f64 },
    Custom { name: String, eval: SurfaceFn },
}

impl fmt::Debug for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceKind::Plane => write!(f, "Plane"),
            SurfaceKind::CylinderX1 { k } => write!(f, "CylinderX1({k})"),
            SurfaceKind::CylinderX2 { k } => write!(f, "CylinderX2({k})"),
            SurfaceKind::RotatedCylinder { alpha, rho } => write!(f, "RotatedCylinder({alpha}, {rho})"),
            SurfaceKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// Serialisable description of a surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SurfaceDescriptor {
    Plane,
    CylinderX1 { k: f64 },
    CylinderX2 { k: f64 },
    RotatedCylinder { alpha: f64, rho: f64 },
    Custom { name: String },
}

/// x ↦ Q x + c with Q ∈ SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl RigidMotion {
    pub fn new(rotation: Mat3, translation: Vec3) -> Result<Self> {
        let orth = (rotation.transpose() * rotation - Mat3::identity()).abs().max();
        if orth > 1e-12 || (rotation.determinant() - 1.0).abs() > 1e-12 {
            return Err(Error::param("rotation", "must be a proper rotation"));
        }
        Ok(RigidMotion { rotation, translation })
    }
}

/// A parameterised isometric immersion of a rectangle.
#[derive(Debug, Clone)]
pub struct IsometrySurface {
    pub kind: SurfaceKind,
    pub domain: Rect,
    pub motion: Option<RigidMotion>,
}

pub fn plane(domain: Rect) -> IsometrySurface {
    IsometrySurface { kind: SurfaceKind::Plane, domain, motion: None }
}

/// y = (sin(k x1)/k, x2, (cos(k x1) − 1)/k), A ≡ diag(k, 0); k = 0 gives
/// the plane.
pub fn cylinder_x1(k: f64, domain: Rect) -> IsometrySurface {
    let kind = if k == 0.0 { SurfaceKind::Plane } else { SurfaceKind::CylinderX1 { k } };
    IsometrySurface { kind, domain, motion: None }
}

/// y = (x1, sin(k x2)/k, (cos(k x2) − 1)/k), A ≡ diag(0, k).
pub fn cylinder_x2(k: f64, domain: Rect) -> IsometrySurface {
    let kind = if k == 0.0 { SurfaceKind::Plane } else { SurfaceKind::CylinderX2 { k } };
    IsometrySurface { kind, domain, motion: None }
}

/// The rotated family y^α with A = Ř_αᵀ diag(1/ρ, 0) Ř_α. A negative ρ
/// bends the sheet the other way.
pub fn rotated_cylinder(alpha: f64, rho: f64, domain: Rect) -> Result<IsometrySurface> {
    if !(rho.is_finite() && rho != 0.0) || !alpha.is_finite() {
        return Err(Error::param("rho", format!("must be finite and nonzero, got {rho}")));
    }
    Ok(IsometrySurface { kind: SurfaceKind::RotatedCylinder { alpha, rho }, domain, motion: None })
}

/// A generator realising a constant developable curvature A = λ n⊗n:
/// a plane, a coordinate cylinder, or the rotated family otherwise.
pub fn developable_surface(a: &Sym2, domain: Rect) -> Result<IsometrySurface> {
    let scale = a.max_abs();
    if !a.is_finite() {
        return Err(Error::NonFinite("curvature tensor".into()));
    }
    if a.det().abs() > 1e-9 * scale * scale {
        return Err(Error::param("A", "curvature tensor is not developable (det A != 0)"));
    }
    if scale == 0.0 {
        return Ok(plane(domain));
    }
    if a.xy == 0.0 && a.yy == 0.0 {
        return Ok(cylinder_x1(a.xx, domain));
    }
    if a.xy == 0.0 && a.xx == 0.0 {
        return Ok(cylinder_x2(a.yy, domain));
    }
    let ([lo, hi], v_lo) = a.eigen();
    let (lam, n) = if hi.abs() >= lo.abs() { (hi, [-v_lo[1], v_lo[0]]) } else { (lo, v_lo) };
    // first row of Ř_α is (sin α, −cos α)
    rotated_cylinder(n[0].atan2(-n[1]), 1.0 / lam, domain)
}

pub fn custom(
    name: impl Into<String>,
    domain: Rect,
    eval: impl Fn(f64, f64) -> SurfacePoint + Send + Sync + 'static,
) -> IsometrySurface {
    IsometrySurface { kind: SurfaceKind::Custom { name: name.into(), eval: Arc::new(eval) }, domain, motion: None }
}

/// Ř_α = [[sin α, −cos α], [cos α, sin α]].
pub fn r_check(alpha: f64) -> Mat2 {
    let (s, c) = alpha.sin_cos();
    Mat2::new(s, -c, c, s)
}

fn r_alpha(alpha: f64) -> Mat3 {
    let (s, c) = alpha.sin_cos();
    Mat3::new(s, -c, 0.0, c, s, 0.0, 0.0, 0.0, 1.0)
}

fn circle_point(kx: f64, k: f64) -> (f64, f64, f64, f64) {
    // (sin/k, (cos − 1)/k, cos, sin) with a cancellation-free (cos − 1)
    let (s, c) = kx.sin_cos();
    let half = (0.5 * kx).sin();
    (s / k, -2.0 * half * half / k, c, s)
}

impl IsometrySurface {
    pub fn with_motion(mut self, motion: RigidMotion) -> Self {
        self.motion = Some(motion);
        self
    }

    pub fn descriptor(&self) -> SurfaceDescriptor {
        match &self.kind {
            SurfaceKind::Plane => SurfaceDescriptor::Plane,
            SurfaceKind::CylinderX1 { k } => SurfaceDescriptor::CylinderX1 { k: *k },
            SurfaceKind::CylinderX2 { k } => SurfaceDescriptor::CylinderX2 { k: *k },
            SurfaceKind::RotatedCylinder { alpha, rho } => {
                SurfaceDescriptor::RotatedCylinder { alpha: *alpha, rho: *rho }
            }
            SurfaceKind::Custom { name, .. } => SurfaceDescriptor::Custom { name: name.clone() },
        }
    }

    pub fn eval(&self, x1: f64, x2: f64) -> SurfacePoint {
        let p = self.eval_unmoved(x1, x2);
        match &self.motion {
            None => p,
            Some(m) => SurfacePoint {
                y: m.rotation * p.y + m.translation,
                dy: m.rotation * p.dy,
                normal: m.rotation * p.normal,
                shape: p.shape,
            },
        }
    }

    fn eval_unmoved(&self, x1: f64, x2: f64) -> SurfacePoint {
        match &self.kind {
            SurfaceKind::Plane => SurfacePoint {
                y: Vec3::new(x1, x2, 0.0),
                dy: Mat32::new(1.0, 0.0, 0.0, 1.0, 0.0, 0.0),
                normal: Vec3::z(),
                shape: Sym2::ZERO,
            },
            SurfaceKind::CylinderX1 { k } => {
                let (a, b, c, s) = circle_point(k * x1, *k);
                SurfacePoint {
                    y: Vec3::new(a, x2, b),
                    dy: Mat32::new(c, 0.0, 0.0, 1.0, -s, 0.0),
                    normal: Vec3::new(s, 0.0, c),
                    shape: Sym2::diag(*k, 0.0),
                }
            }
            SurfaceKind::CylinderX2 { k } => {
                let (a, b, c, s) = circle_point(k * x2, *k);
                SurfacePoint {
                    y: Vec3::new(x1, a, b),
                    dy: Mat32::new(1.0, 0.0, 0.0, c, 0.0, -s),
                    normal: Vec3::new(0.0, s, c),
                    shape: Sym2::diag(0.0, *k),
                }
            }
            SurfaceKind::RotatedCylinder { alpha, rho } => {
                let rc = r_check(*alpha);
                let u = rc * nalgebra::Vector2::new(x1, x2);
                let (s, c) = (u[0] / rho).sin_cos();
                let y = Vec3::new(rho * s, u[1], rho * c);
                let dy = Mat32::new(c, 0.0, 0.0, 1.0, -s, 0.0);
                let nu = Vec3::new(s, 0.0, c);
                let rt = r_alpha(*alpha).transpose();
                SurfacePoint {
                    y: rt * y,
                    dy: rt * dy * rc,
                    normal: rt * nu,
                    shape: Sym2::diag(1.0 / rho, 0.0).rotate(&rc),
                }
            }
            SurfaceKind::Custom { eval, .. } => eval(x1, x2),
        }
    }

    /// max |(∇'y)ᵀ∇'y − I| over an n × n vertex grid.
    pub fn isometry_residual(&self, n: usize) -> f64 {
        self.domain
            .vertex_grid(n, n)
            .iter()
            .map(|&(a, b)| {
                let p = self.eval(a, b);
                (p.dy.transpose() * p.dy - Mat2::identity()).abs().max()
            })
            .fold(0.0, f64::max)
    }

    /// Second fundamental form sampled at n1 × n2 cell centres.
    pub fn curvature_field(&self, n1: usize, n2: usize) -> Result<CurvatureField> {
        CurvatureField::sampled(self.domain, n1, n2, |a, b| self.eval(a, b).shape)
    }
}

/// E^lim of a surface on an n × n midpoint grid, minus ∫ f·y when a constant
/// load density f is given.
pub fn energy_of_surface(
    surface: &IsometrySurface,
    model: &ReducedModel,
    n: usize,
    load: Option<Vec3>,
) -> Result<f64> {
    let field = surface.curvature_field(n, n)?;
    let mut e = limit_energy(&field, model)?;
    if let Some(f) = load {
        let d = &surface.domain;
        let (d1, d2) = ((d.b1 - d.a1) / n as f64, (d.b2 - d.a2) / n as f64);
        let mut work = 0.0;
        for j in 0..n {
            for i in 0..n {
                let y = surface.eval(d.a1 + (i as f64 + 0.5) * d1, d.a2 + (j as f64 + 0.5) * d2).y;
                work += f.dot(&y) * d1 * d2;
            }
        }
        e -= work;
    }
    Ok(e)
}

/// Finite-difference first and second fundamental forms at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormSample {
    pub x1: f64,
    pub x2: f64,
    pub first: Mat2,
    pub second: Mat2,
    /// A one-sided stencil was used at this point.
    pub one_sided: bool,
}

/// d/dx_dir of `f` at `x` by a central stencil when both neighbours are
/// inside ω, otherwise a second-order one-sided stencil.
fn diff<F, T>(f: &F, dom: &Rect, x: (f64, f64), dir: usize, step: f64) -> (T, bool)
where
    F: Fn(f64, f64) -> T,
    T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + Copy,
{
    let shift = |s: f64| if dir == 0 { (x.0 + s, x.1) } else { (x.0, x.1 + s) };
    let inside = |p: (f64, f64)| dom.contains(p.0, p.1);
    let (p, m) = (shift(step), shift(-step));
    if inside(p) && inside(m) {
        ((f(p.0, p.1) - f(m.0, m.1)) * (0.5 / step), false)
    } else {
        let sgn = if inside(p) { 1.0 } else { -1.0 };
        let (a, b) = (shift(sgn * step), shift(2.0 * sgn * step));
        let d = (f(a.0, a.1) * 4.0 - f(x.0, x.1) * 3.0 - f(b.0, b.1)) * (sgn * 0.5 / step);
        (d, true)
    }
}

fn numeric_dy(s: &IsometrySurface, x1: f64, x2: f64, step: f64) -> (Mat32, bool) {
    let y = |a: f64, b: f64| s.eval(a, b).y;
    let (d1, o1) = diff(&y, &s.domain, (x1, x2), 0, step);
    let (d2, o2) = diff(&y, &s.domain, (x1, x2), 1, step);
    (Mat32::from_columns(&[d1, d2]), o1 || o2)
}

fn numeric_normal(s: &IsometrySurface, x1: f64, x2: f64, step: f64) -> Vec3 {
    let (dy, _) = numeric_dy(s, x1, x2, step);
    dy.column(0).cross(&dy.column(1))
}

/// I = (∇'y)ᵀ∇'y and II = (∇'y)ᵀ∇'ν from finite differences on an
/// n1 × n2 vertex grid.
pub fn fundamental_forms_numeric(surface: &IsometrySurface, n1: usize, n2: usize, step: f64) -> Vec<FormSample> {
    surface
        .domain
        .vertex_grid(n1, n2)
        .par_iter()
        .map(|&(x1, x2)| {
            let (dy, o) = numeric_dy(surface, x1, x2, step);
            let nu = |a: f64, b: f64| numeric_normal(surface, a, b, step);
            let (n1d, o1) = diff(&nu, &surface.domain, (x1, x2), 0, step);
            let (n2d, o2) = diff(&nu, &surface.domain, (x1, x2), 1, step);
            let dnu = Mat32::from_columns(&[n1d, n2d]);
            FormSample {
                x1,
                x2,
                first: dy.transpose() * dy,
                second: dy.transpose() * dnu,
                one_sided: o || o1 || o2,
            }
        })
        .collect()
}

/// Structured quad mesh of y(ω).
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub n1: usize,
    pub n2: usize,
    pub vertices: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    /// 0-based vertex indices, counter-clockwise in parameter space.
    pub faces: Vec<[usize; 4]>,
}

pub fn export_mesh(surface: &IsometrySurface, n1: usize, n2: usize) -> Result<SurfaceMesh> {
    if n1 < 2 || n2 < 2 {
        return Err(Error::param("resolution", "mesh needs at least 2 x 2 vertices"));
    }
    let pts: Vec<SurfacePoint> = surface
        .domain
        .vertex_grid(n1, n2)
        .par_iter()
        .map(|&(a, b)| surface.eval(a, b))
        .collect();
    let finite = |v: &Vec3| v.iter().all(|c| c.is_finite());
    if let Some(i) = pts.iter().position(|p| !finite(&p.y) || !finite(&p.normal)) {
        return Err(Error::NonFinite(format!("mesh vertex {i}")));
    }
    let mut faces = Vec::with_capacity((n1 - 1) * (n2 - 1));
    for j in 0..n2 - 1 {
        for i in 0..n1 - 1 {
            let v = j * n1 + i;
            faces.push([v, v + 1, v + 1 + n1, v + n1]);
        }
    }
    Ok(SurfaceMesh {
        n1,
        n2,
        vertices: pts.iter().map(|p| p.y).collect(),
        normals: pts.iter().map(|p| p.normal).collect(),
        faces,
    })
}

impl SurfaceMesh {
    /// Area of each quad (two triangles).
    pub fn face_areas(&self) -> Vec<f64> {
        self.faces
            .iter()
            .map(|f| {
                let p = |i: usize| self.vertices[f[i]];
                0.5 * (p(1) - p(0)).cross(&(p(2) - p(0))).norm() + 0.5 * (p(2) - p(0)).cross(&(p(3) - p(0))).norm()
            })
            .collect()
    }

    /// Wavefront OBJ text: `v`, `vn`, then `f i//i ...` with 1-based indices.
    pub fn to_obj(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} x {} structured mesh", self.n1, self.n2);
        for v in &self.vertices {
            let _ = writeln!(s, "v {} {} {}", sig9(v[0]), sig9(v[1]), sig9(v[2]));
        }
        for n in &self.normals {
            let _ = writeln!(s, "vn {} {} {}", sig9(n[0]), sig9(n[1]), sig9(n[2]));
        }
        for f in &self.faces {
            let _ = writeln!(
                s,
                "f {a}//{a} {b}//{b} {c}//{c} {d}//{d}",
                a = f[0] + 1,
                b = f[1] + 1,
                c = f[2] + 1,
                d = f[3] + 1
            );
        }
        s
    }
}

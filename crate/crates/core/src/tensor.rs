//! Small dense tensor algebra and the quadratic forms Q3 and Q2.
//!
//! 3×3 matrices are plain `nalgebra` values; [`Sym2`] stores a symmetric 2×2
//! tensor with a single off-diagonal entry.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix2, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat3 = Matrix3<f64>;
pub type Vec3 = Vector3<f64>;
pub type Mat2 = Matrix2<f64>;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Symmetric 2×2 tensor.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Sym2 {
    pub const ZERO: Sym2 = Sym2 { xx: 0.0, xy: 0.0, yy: 0.0 };
    pub const IDENTITY: Sym2 = Sym2 { xx: 1.0, xy: 0.0, yy: 1.0 };

    pub const fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Sym2 { xx, xy, yy }
    }

    pub const fn diag(a: f64, b: f64) -> Self {
        Sym2 { xx: a, xy: 0.0, yy: b }
    }

    /// Symmetric part of a 2×2 matrix.
    pub fn from_matrix(m: &Mat2) -> Self {
        Sym2::new(m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)])
    }

    /// Upper-left 2×2 block of the symmetric part of a 3×3 matrix.
    pub fn upper_left(m: &Mat3) -> Self {
        Sym2::new(m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)])
    }

    pub fn to_matrix(&self) -> Mat2 {
        Mat2::new(self.xx, self.xy, self.xy, self.yy)
    }

    /// Coordinates in the orthonormal basis (xx, √2·xy, yy).
    pub fn to_basis(&self) -> Vec3 {
        Vec3::new(self.xx, SQRT2 * self.xy, self.yy)
    }

    pub fn from_basis(v: &Vec3) -> Self {
        Sym2::new(v[0], v[1] / SQRT2, v[2])
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    /// Frobenius inner product.
    pub fn dot(&self, other: &Sym2) -> f64 {
        self.xx * other.xx + 2.0 * self.xy * other.xy + self.yy * other.yy
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.xx.abs().max(self.xy.abs()).max(self.yy.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.xx.is_finite() && self.xy.is_finite() && self.yy.is_finite()
    }

    /// Eigenvalues in ascending order together with the unit eigenvector of
    /// the smaller one. Diagonal inputs return exact values and axis vectors.
    pub fn eigen(&self) -> ([f64; 2], [f64; 2]) {
        if self.xy == 0.0 {
            return if self.xx <= self.yy {
                ([self.xx, self.yy], [1.0, 0.0])
            } else {
                ([self.yy, self.xx], [0.0, 1.0])
            };
        }
        let m = 0.5 * (self.xx + self.yy);
        let d = 0.5 * (self.xx - self.yy);
        let r = d.hypot(self.xy);
        // the smaller eigenvalue via the product avoids cancellation
        let (lo, hi) = if m >= 0.0 {
            let hi = m + r;
            (self.det() / hi, hi)
        } else {
            let lo = m - r;
            (lo, self.det() / lo)
        };
        // eigenvector of `lo`: rotate by half the principal angle
        let theta = 0.5 * (2.0 * self.xy).atan2(self.xx - self.yy);
        let v = [-theta.sin(), theta.cos()];
        ([lo, hi], v)
    }

    /// `Rᵀ · self · R`.
    pub fn rotate(&self, r: &Mat2) -> Sym2 {
        Sym2::from_matrix(&(r.transpose() * self.to_matrix() * r))
    }
}

impl Add for Sym2 {
    type Output = Sym2;
    fn add(self, o: Sym2) -> Sym2 {
        Sym2::new(self.xx + o.xx, self.xy + o.xy, self.yy + o.yy)
    }
}

impl AddAssign for Sym2 {
    fn add_assign(&mut self, o: Sym2) {
        *self = *self + o;
    }
}

impl Sub for Sym2 {
    type Output = Sym2;
    fn sub(self, o: Sym2) -> Sym2 {
        Sym2::new(self.xx - o.xx, self.xy - o.xy, self.yy - o.yy)
    }
}

impl Neg for Sym2 {
    type Output = Sym2;
    fn neg(self) -> Sym2 {
        Sym2::new(-self.xx, -self.xy, -self.yy)
    }
}

impl Mul<f64> for Sym2 {
    type Output = Sym2;
    fn mul(self, s: f64) -> Sym2 {
        Sym2::new(s * self.xx, s * self.xy, s * self.yy)
    }
}

impl Mul<Sym2> for f64 {
    type Output = Sym2;
    fn mul(self, g: Sym2) -> Sym2 {
        g * self
    }
}

/// Planar rotation by `theta`.
pub fn rotation2(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    Mat2::new(c, -s, s, c)
}

/// Quadratic polynomial on Sym2 in the (xx, √2·xy, yy) basis:
/// `gᵀ H g + l·g + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadForm2 {
    pub quadratic: Mat3,
    pub linear: Vec3,
    pub constant: f64,
}

impl QuadForm2 {
    pub fn new(quadratic: Mat3, linear: Vec3, constant: f64) -> Self {
        let quadratic = 0.5 * (quadratic + quadratic.transpose());
        QuadForm2 { quadratic, linear, constant }
    }

    pub fn eval(&self, g: &Sym2) -> f64 {
        let v = g.to_basis();
        v.dot(&(self.quadratic * v)) + self.linear.dot(&v) + self.constant
    }

    /// Recovers the polynomial from values at 0, ±e_i and e_i + e_j (basis
    /// coordinates). Exact for quadratic `f` up to rounding.
    pub fn fit(f: impl Fn(&Sym2) -> Result<f64>) -> Result<Self> {
        let e = |i: usize| {
            let mut v = Vec3::zeros();
            v[i] = 1.0;
            v
        };
        let at = |v: Vec3| f(&Sym2::from_basis(&v));
        let f0 = at(Vec3::zeros())?;
        let mut fp = [0.0; 3];
        let mut fm = [0.0; 3];
        for i in 0..3 {
            fp[i] = at(e(i))?;
            fm[i] = at(-e(i))?;
        }
        let mut h = Mat3::zeros();
        let mut l = Vec3::zeros();
        for i in 0..3 {
            h[(i, i)] = 0.5 * (fp[i] + fm[i]) - f0;
            l[i] = 0.5 * (fp[i] - fm[i]);
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                let fij = at(e(i) + e(j))?;
                let hij = 0.5 * (fij - f0 - l[i] - l[j] - h[(i, i)] - h[(j, j)]);
                h[(i, j)] = hij;
                h[(j, i)] = hij;
            }
        }
        Ok(QuadForm2::new(h, l, f0))
    }
}

/// Coefficient matrix of `q2` in the (xx, √2·xy, yy) basis: 2μ(I + γ v vᵀ),
/// v = (1, 0, 1).
pub fn q2_matrix(mu: f64, gamma: f64) -> Mat3 {
    let v = Vec3::new(1.0, 0.0, 1.0);
    2.0 * mu * (Mat3::identity() + gamma * v * v.transpose())
}

/// Q3(M) = 2μ|sym M|² + κ tr²M.
pub fn q3(m: &Mat3, mu: f64, kappa: f64) -> f64 {
    let s = sym(m);
    let tr = m.trace();
    2.0 * mu * s.norm_squared() + kappa * tr * tr
}

/// Q2(G) = 2μ(|G|² + γ tr²G).
pub fn q2(g: &Sym2, mu: f64, gamma: f64) -> f64 {
    let tr = g.trace();
    2.0 * mu * (g.norm_sq() + gamma * tr * tr)
}

/// Q2 obtained by minimising Q3 over the padded matrix [[G, b], [0, a]].
///
/// The objective is a quadratic in z = (a, b1, b2); its Hessian and gradient
/// are assembled from Q3 evaluations and the normal equations are solved
/// directly.
pub fn q2_via_relaxation(g: &Sym2, mu: f64, kappa: f64) -> Result<f64> {
    let padded = |z: &Vec3| {
        let mut m = Mat3::zeros();
        m[(0, 0)] = g.xx;
        m[(0, 1)] = g.xy;
        m[(1, 0)] = g.xy;
        m[(1, 1)] = g.yy;
        m[(2, 2)] = z[0];
        m[(0, 2)] = z[1];
        m[(1, 2)] = z[2];
        q3(&m, mu, kappa)
    };
    let f0 = padded(&Vec3::zeros());
    let unit = |i: usize| {
        let mut v = Vec3::zeros();
        v[i] = 1.0;
        v
    };
    let mut hess = Mat3::zeros();
    let mut grad = Vec3::zeros();
    for i in 0..3 {
        let fp = padded(&unit(i));
        let fm = padded(&-unit(i));
        grad[i] = 0.5 * (fp - fm);
        hess[(i, i)] = fp + fm - 2.0 * f0;
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            let fij = padded(&(unit(i) + unit(j)));
            let fi = padded(&unit(i));
            let fj = padded(&unit(j));
            let hij = fij - fi - fj + f0;
            hess[(i, j)] = hij;
            hess[(j, i)] = hij;
        }
    }
    let chol = hess
        .cholesky()
        .ok_or_else(|| Error::NoConvergence("q2 relaxation (Hessian not positive definite)".into()))?;
    let z = chol.solve(&(-grad));
    let value = padded(&z);
    if !value.is_finite() {
        return Err(Error::NonFinite("q2 relaxation".into()));
    }
    Ok(value.max(0.0))
}

pub fn sym(m: &Mat3) -> Mat3 {
    0.5 * (m + m.transpose())
}

/// Eigenvalues of a symmetric 3×3 matrix in descending order (trigonometric
/// closed form on the deviatoric part).
pub fn symmetric_eigenvalues(m: &Mat3) -> [f64; 3] {
    let s = sym(m);
    let p1 = s[(0, 1)].powi(2) + s[(0, 2)].powi(2) + s[(1, 2)].powi(2);
    let q = s.trace() / 3.0;
    if p1 == 0.0 {
        let mut d = [s[(0, 0)], s[(1, 1)], s[(2, 2)]];
        d.sort_by(|a, b| b.total_cmp(a));
        return d;
    }
    let p2 = (s[(0, 0)] - q).powi(2) + (s[(1, 1)] - q).powi(2) + (s[(2, 2)] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return [q; 3];
    }
    let b = (s - q * Mat3::identity()) / p;
    let r = (0.5 * b.determinant()).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let l2 = 3.0 * q - l1 - l3;
    [l1, l2, l3]
}

/// Eigen-decomposition of a symmetric 3×3 matrix: descending eigenvalues and
/// the matching orthonormal eigenvectors as columns.
///
/// The trigonometric eigenvalues locate the most isolated eigenvalue, whose
/// eigenvector is well conditioned; the remaining pair is resolved exactly as a
/// 2×2 problem on its orthogonal complement. This keeps full accuracy for
/// (nearly) repeated eigenvalues.
pub fn symmetric_eigen(m: &Mat3) -> ([f64; 3], Mat3) {
    let s = sym(m);
    let lam = symmetric_eigenvalues(&s);
    if lam[0] == lam[2] {
        return (lam, Mat3::identity());
    }
    let iso = if lam[0] - lam[1] >= lam[1] - lam[2] { 0 } else { 2 };
    let a = s - lam[iso] * Mat3::identity();
    let r0 = a.row(0).transpose();
    let r1 = a.row(1).transpose();
    let r2 = a.row(2).transpose();
    let cands = [r0.cross(&r1), r0.cross(&r2), r1.cross(&r2)];
    let best = cands
        .iter()
        .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))
        .copied()
        .unwrap_or_else(Vec3::zeros);
    let v = if best.norm() > 0.0 { best.normalize() } else { Vec3::ith(iso, 1.0) };
    let p = any_orthogonal(&v);
    let q = v.cross(&p);
    let k = Sym2::new(p.dot(&(s * p)), p.dot(&(s * q)), q.dot(&(s * q)));
    let (kl, kv) = k.eigen();
    let lo = kv[0] * p + kv[1] * q;
    let hi = q * kv[0] - p * kv[1];
    let lv = v.dot(&(s * v));
    let mut pairs = [(lv, v), (kl[1], hi), (kl[0], lo)];
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut vecs = Mat3::zeros();
    for (i, (_, w)) in pairs.iter().enumerate() {
        vecs.set_column(i, w);
    }
    ([pairs[0].0, pairs[1].0, pairs[2].0], vecs)
}

fn any_orthogonal(v: &Vec3) -> Vec3 {
    let pick = if v[0].abs() <= v[1].abs() && v[0].abs() <= v[2].abs() {
        Vec3::x()
    } else if v[1].abs() <= v[2].abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    v.cross(&pick).normalize()
}

/// Square root of a symmetric positive-definite matrix by spectral
/// decomposition.
pub fn spd_sqrt(c: &Mat3) -> Result<Mat3> {
    let c = sym(c);
    if !c.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("spd_sqrt input".into()));
    }
    let (lam, v) = symmetric_eigen(&c);
    if lam[2] <= 0.0 {
        return Err(Error::NotPositiveDefinite(format!(
            "smallest eigenvalue {:e}",
            lam[2]
        )));
    }
    let d = Mat3::from_diagonal(&Vec3::new(lam[0].sqrt(), lam[1].sqrt(), lam[2].sqrt()));
    Ok(sym(&(v * d * v.transpose())))
}

/// Inverse of an SPD square root.
pub fn spd_inv_sqrt(c: &Mat3) -> Result<Mat3> {
    spd_sqrt(c)?
        .try_inverse()
        .ok_or_else(|| Error::NotPositiveDefinite("singular square root".into()))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &Mat3) -> f64 {
    symmetric_eigen(m).0[2]
}

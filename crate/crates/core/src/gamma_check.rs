//! Numerical probe of the h → 0 scaling of the rescaled 3D energy on
//! Kirchhoff–Love ansätze built from 2D minimising surfaces.

use log::{debug, warn};
use nalgebra::{SMatrix, SVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::{NematicWell, StrainProfile};
use crate::plate_energy::limit_energy;
use crate::quadrature::{legendre_values, GaussLegendre};
use crate::reduction::{inner_minimiser_d, reduced_model_for};
use crate::surface::{IsometrySurface, Mat32};
use crate::tensor::{Mat2, Mat3, Sym2, Vec3};

/// Legendre modes P_0..P_5(2 x3) in the deviation of the third column.
pub const FIBER_TERMS: usize = 6;
const N: usize = 3 * FIBER_TERMS;
type Coeffs = [Vec3; FIBER_TERMS];
type VecN = SVector<f64, N>;
type MatN = SMatrix<f64, N, N>;

const COLUMN_MAX_ITER: usize = 50;
const MEMBRANE_FD_STEP: f64 = 1e-3;
const MEMBRANE_MAX_ITER: usize = 6;
/// Gaps below this are treated as zero and no gap exponent is fitted.
pub const GAP_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss points per in-plane direction.
    pub n_plane: usize,
    /// Gauss points through the thickness.
    pub n_thick: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { n_plane: 16, n_thick: 16 }
    }
}

/// Per-column third-column deviation δ(x3) = Σ e_m P_m(2 x3), expressed in
/// the local frame (∂1y | ∂2y | ν). The displacement it induces is
/// h R ∫₀^{x3} δ.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberCorrection {
    pub coeffs: Vec<Coeffs>,
}

impl FiberCorrection {
    pub fn zero(columns: usize) -> Self {
        FiberCorrection { coeffs: vec![[Vec3::zeros(); FIBER_TERMS]; columns] }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().flatten().map(|v| v.amax()).fold(0.0, f64::max)
    }
}

/// y_h(x', x3) = y(Φ) + h x3 ν(Φ) + h R(Φ) ∫₀^{x3} δ with Φ = (I + hD) x'.
#[derive(Debug, Clone)]
pub struct AnsatzDeformation {
    pub surface: IsometrySurface,
    pub h: f64,
    /// In-plane membrane stretch D.
    pub membrane: Sym2,
    pub fiber: FiberCorrection,
    pub quadrature: QuadratureSpec,
}

/// Precomputed in-plane data of one quadrature column.
struct Column {
    weight: f64,
    frame: Mat3,
    /// ∇'y (I + h x3 A)(I + hD) at each thickness node.
    inplane: Vec<Mat32>,
    location: (f64, f64),
}

struct Thickness {
    rule: GaussLegendre,
    phi: Vec<[f64; FIBER_TERMS]>,
    wells: Vec<NematicWell>,
}

impl Thickness {
    fn new(profile: &StrainProfile, n: usize) -> Result<Self> {
        let rule = GaussLegendre::on_interval(n, -0.5, 0.5);
        let mut phi = Vec::with_capacity(n);
        let mut wells = Vec::with_capacity(n);
        for (x3, _) in rule.iter() {
            let mut p = [0.0; FIBER_TERMS];
            legendre_values(2.0 * x3, &mut p);
            phi.push(p);
            wells.push(profile.well(profile.h * x3)?);
        }
        Ok(Thickness { rule, phi, wells })
    }
}

fn third_column(frame: &Mat3, c: &Coeffs, phi: &[f64; FIBER_TERMS]) -> Vec3 {
    let mut u = Vec3::z();
    for (e, p) in c.iter().zip(phi) {
        u += e * *p;
    }
    frame * u
}

fn assemble(inplane: &Mat32, third: &Vec3) -> Mat3 {
    let mut f = Mat3::zeros();
    f.fixed_view_mut::<3, 2>(0, 0).copy_from(inplane);
    f.set_column(2, third);
    f
}

fn column_energy(col: &Column, th: &Thickness, c: &Coeffs) -> f64 {
    let mut e = 0.0;
    for (q, (_, w)) in th.rule.iter().enumerate() {
        let f = assemble(&col.inplane[q], &third_column(&col.frame, c, &th.phi[q]));
        e += w * th.wells[q].energy(&f);
    }
    e
}

fn flatten(c: &Coeffs) -> VecN {
    VecN::from_iterator(c.iter().flat_map(|v| v.iter().copied()))
}

fn unflatten(v: &VecN) -> Coeffs {
    std::array::from_fn(|m| Vec3::new(v[3 * m], v[3 * m + 1], v[3 * m + 2]))
}

/// Newton on the 18 coefficients of one column; the fibre energy is convex
/// in them near the reference state. Returns None if no decrease is found.
fn optimise_column(col: &Column, th: &Thickness, start: &Coeffs) -> Option<(Coeffs, f64)> {
    let mut c = *start;
    let mut e = column_energy(col, th, &c);
    if !e.is_finite() {
        c = [Vec3::zeros(); FIBER_TERMS];
        e = column_energy(col, th, &c);
        if !e.is_finite() {
            return None;
        }
    }
    let rt = col.frame.transpose();
    for _ in 0..COLUMN_MAX_ITER {
        let mut g = VecN::zeros();
        let mut hess = MatN::zeros();
        for (q, (_, w)) in th.rule.iter().enumerate() {
            let f = assemble(&col.inplane[q], &third_column(&col.frame, &c, &th.phi[q]));
            let p = th.wells[q].stress(&f)?;
            let h3 = rt * th.wells[q].third_column_hessian(&f)? * col.frame;
            let s = rt * p.column(2);
            let phi = &th.phi[q];
            for m in 0..FIBER_TERMS {
                let wm = w * phi[m];
                g.fixed_rows_mut::<3>(3 * m).axpy(wm, &s, 1.0);
                for n in 0..=m {
                    let block = h3 * (wm * phi[n]);
                    let mut view = hess.fixed_view_mut::<3, 3>(3 * m, 3 * n);
                    view += block;
                }
            }
        }
        for m in 0..FIBER_TERMS {
            for n in 0..m {
                let block = hess.fixed_view::<3, 3>(3 * m, 3 * n).transpose();
                hess.fixed_view_mut::<3, 3>(3 * n, 3 * m).copy_from(&block);
            }
        }
        let step = hess.cholesky()?.solve(&(-g));
        let decrement = -g.dot(&step);
        if !(decrement > 1e-15 * e.abs()) {
            break;
        }
        let x = flatten(&c);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = unflatten(&(x + step * t));
            let et = column_energy(col, th, &trial);
            if et.is_finite() && et <= e - 1e-4 * t * decrement {
                c = trial;
                e = et;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Some((c, e))
}

impl AnsatzDeformation {
    /// Zero membrane stretch and zero fibre correction.
    pub fn new(surface: IsometrySurface, h: f64, quadrature: QuadratureSpec) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::param("h", format!("must be finite and > 0, got {h}")));
        }
        if quadrature.n_plane == 0 || quadrature.n_thick < 2 {
            return Err(Error::param("quadrature", "need n_plane >= 1 and n_thick >= 2"));
        }
        let n = quadrature.n_plane * quadrature.n_plane;
        Ok(AnsatzDeformation { surface, h, membrane: Sym2::ZERO, fiber: FiberCorrection::zero(n), quadrature })
    }

    pub fn with_membrane(mut self, d: Sym2) -> Self {
        self.membrane = d;
        self
    }

    /// In-plane quadrature columns (x1, x2, weight), row-major.
    pub fn columns(&self) -> Vec<(f64, f64, f64)> {
        self.surface.domain.gauss_nodes(self.quadrature.n_plane)
    }

    fn stretch(&self) -> Mat2 {
        Mat2::identity() + self.h * self.membrane.to_matrix()
    }

    fn column(&self, x1: f64, x2: f64, weight: f64, rule: &GaussLegendre) -> Column {
        let s = self.stretch();
        let phi = s * nalgebra::Vector2::new(x1, x2);
        let p = self.surface.eval(phi[0], phi[1]);
        let a = p.shape.to_matrix();
        let inplane = rule
            .iter()
            .map(|(x3, _)| p.dy * (Mat2::identity() + self.h * x3 * a) * s)
            .collect();
        Column { weight, frame: p.frame(), inplane, location: (x1, x2) }
    }

    /// y_h(x', x3) using the fibre correction of quadrature column `col`
    /// (None for the uncorrected ansatz).
    pub fn position(&self, x1: f64, x2: f64, x3: f64, col: Option<usize>) -> Vec3 {
        let phi = self.stretch() * nalgebra::Vector2::new(x1, x2);
        let p = self.surface.eval(phi[0], phi[1]);
        let mut y = p.y + self.h * x3 * p.normal;
        if let Some(c) = col {
            let mut big = [0.0; FIBER_TERMS + 1];
            let mut zero = [0.0; FIBER_TERMS + 1];
            legendre_values(2.0 * x3, &mut big);
            legendre_values(0.0, &mut zero);
            let mut d = Vec3::zeros();
            for (m, e) in self.fiber.coeffs[c].iter().enumerate() {
                // ∫₀^{x3} P_m(2s) ds
                let integral = if m == 0 {
                    x3
                } else {
                    let prim = |v: &[f64]| v[m + 1] - v[m - 1];
                    0.5 * (prim(&big) - prim(&zero)) / (2 * m + 1) as f64
                };
                d += e * integral;
            }
            y += self.h * p.frame() * d;
        }
        y
    }

    /// ∇_h y_h = (∇'y_h | ∂3 y_h / h) at quadrature column `col`, dropping
    /// the x'-gradient of the fibre correction.
    pub fn rescaled_gradient(&self, col: usize, x3: f64) -> Mat3 {
        let (x1, x2, w) = self.columns()[col];
        let rule = GaussLegendre { nodes: vec![x3], weights: vec![1.0] };
        let c = self.column(x1, x2, w, &rule);
        let mut phi = [0.0; FIBER_TERMS];
        legendre_values(2.0 * x3, &mut phi);
        assemble(&c.inplane[0], &third_column(&c.frame, &self.fiber.coeffs[col], &phi))
    }
}

fn check_thickness(ansatz: &AnsatzDeformation, profile: &StrainProfile) -> Result<()> {
    if (ansatz.h - profile.h).abs() > 1e-12 * profile.h {
        return Err(Error::param(
            "h",
            format!("ansatz thickness {} does not match profile thickness {}", ansatz.h, profile.h),
        ));
    }
    Ok(())
}

fn columns_for(ansatz: &AnsatzDeformation, th: &Thickness) -> Vec<Column> {
    ansatz
        .columns()
        .par_iter()
        .map(|&(x1, x2, w)| ansatz.column(x1, x2, w, &th.rule))
        .collect()
}

/// E^h(y_h)/h² by tensor-product Gauss quadrature over ω × (−1/2, 1/2).
pub fn energy3d_rescaled(ansatz: &AnsatzDeformation, profile: &StrainProfile) -> Result<f64> {
    check_thickness(ansatz, profile)?;
    let th = Thickness::new(profile, ansatz.quadrature.n_thick)?;
    let cols = columns_for(ansatz, &th);
    let per_column: Vec<Result<f64>> = cols
        .par_iter()
        .zip(ansatz.fiber.coeffs.par_iter())
        .map(|(col, c)| {
            let mut e = 0.0;
            for (q, (x3, w)) in th.rule.iter().enumerate() {
                let f = assemble(&col.inplane[q], &third_column(&col.frame, c, &th.phi[q]));
                if !(f.determinant() > 0.0) {
                    let (x1, x2) = col.location;
                    return Err(Error::NonPositiveJacobian { x1, x2, x3 });
                }
                e += w * th.wells[q].energy(&f);
            }
            Ok(col.weight * e)
        })
        .collect();
    let mut total = 0.0;
    for e in per_column {
        total += e?;
    }
    if !total.is_finite() {
        return Err(Error::NonFinite("rescaled 3D energy".into()));
    }
    Ok(total / (ansatz.h * ansatz.h))
}

fn optimise_fibers_with(ansatz: &AnsatzDeformation, th: &Thickness) -> (FiberCorrection, f64) {
    let cols = columns_for(ansatz, th);
    let results: Vec<(Coeffs, f64)> = cols
        .par_iter()
        .zip(ansatz.fiber.coeffs.par_iter())
        .map(|(col, start)| {
            let zero = [Vec3::zeros(); FIBER_TERMS];
            let e0 = column_energy(col, th, &zero);
            match optimise_column(col, th, start) {
                Some((c, e)) if e.is_finite() && !(e > e0) => (c, col.weight * e),
                _ => {
                    warn!("fibre optimisation failed at column {:?}; using zero correction", col.location);
                    (zero, col.weight * e0)
                }
            }
        })
        .collect();
    let mut total = 0.0;
    for (_, e) in &results {
        total += e;
    }
    let fiber = FiberCorrection { coeffs: results.into_iter().map(|(c, _)| c).collect() };
    (fiber, total / (ansatz.h * ansatz.h))
}

/// Minimises the fibre-integrated W^h column by column; the energy never
/// exceeds that of the zero correction.
pub fn optimise_fiber_correction(ansatz: &AnsatzDeformation, profile: &StrainProfile) -> AnsatzDeformation {
    let mut out = ansatz.clone();
    match Thickness::new(profile, ansatz.quadrature.n_thick) {
        Ok(th) => out.fiber = optimise_fibers_with(ansatz, &th).0,
        Err(e) => {
            warn!("fibre optimisation skipped: {e}");
            out.fiber = FiberCorrection::zero(ansatz.fiber.coeffs.len());
        }
    }
    out
}

/// Newton on the membrane stretch D (finite-difference derivatives), with the
/// fibre correction re-optimised at every evaluation. Starts from the
/// ansatz's current D.
pub fn optimise_membrane(ansatz: &AnsatzDeformation, profile: &StrainProfile) -> Result<AnsatzDeformation> {
    check_thickness(ansatz, profile)?;
    let th = Thickness::new(profile, ansatz.quadrature.n_thick)?;
    let mut best = ansatz.clone();
    let eval = |d: &Sym2, from: &AnsatzDeformation| {
        let mut a = from.clone();
        a.membrane = *d;
        let (fiber, e) = optimise_fibers_with(&a, &th);
        a.fiber = fiber;
        (a, e)
    };
    let (a0, mut e0) = eval(&best.membrane, &best);
    best = a0;
    if !e0.is_finite() {
        return Err(Error::NonFinite("membrane optimisation start".into()));
    }
    let eps = MEMBRANE_FD_STEP;
    for it in 0..MEMBRANE_MAX_ITER {
        let x = best.membrane.to_basis();
        let f = |v: nalgebra::Vector3<f64>| eval(&Sym2::from_basis(&v), &best).1;
        let unit = |i: usize| nalgebra::Vector3::ith(i, eps);
        let mut g = nalgebra::Vector3::zeros();
        let mut hm = nalgebra::Matrix3::zeros();
        let mut plus = [0.0; 3];
        let mut minus = [0.0; 3];
        for i in 0..3 {
            plus[i] = f(x + unit(i));
            minus[i] = f(x - unit(i));
            g[i] = (plus[i] - minus[i]) / (2.0 * eps);
            hm[(i, i)] = (plus[i] - 2.0 * e0 + minus[i]) / (eps * eps);
        }
        for i in 0..3 {
            for j in 0..i {
                let v = (f(x + unit(i) + unit(j)) - f(x + unit(i) - unit(j)) - f(x - unit(i) + unit(j))
                    + f(x - unit(i) - unit(j)))
                    / (4.0 * eps * eps);
                hm[(i, j)] = v;
                hm[(j, i)] = v;
            }
        }
        let Some(chol) = hm.cholesky() else {
            warn!("membrane Hessian not positive definite; keeping D = {:?}", best.membrane);
            break;
        };
        let step = chol.solve(&(-g));
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..8 {
            let trial = x + step * t;
            let (a, e) = eval(&Sym2::from_basis(&trial), &best);
            if e.is_finite() && e <= e0 {
                best = a;
                e0 = e;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        debug!("membrane iteration {it}: |step| = {:.3e}, E/h^2 = {e0:.12}", step.norm() * t);
        if !improved || step.norm() * t < 1e-7 {
            break;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingSample {
    pub h: f64,
    /// E^h of the optimised ansatz.
    pub energy: f64,
    /// E^h/h² of the optimised ansatz.
    pub rescaled: f64,
    /// E^h/h² of y + h x3 ν without any correction.
    pub uncorrected: f64,
    pub gap: f64,
    pub membrane: Sym2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub samples: Vec<ScalingSample>,
    /// p in |E^h/h² − E^lim| ∝ h^p; None when every gap is below GAP_FLOOR.
    pub fitted_gap_exponent: Option<f64>,
    /// Log-log slope of E^h against h.
    pub raw_energy_exponent: Option<f64>,
    /// Least-squares fit E^h/h² = L + c1 h + c2 h², evaluated at h = 0.
    pub extrapolated_limit: f64,
    /// E^lim of the surface under the reduced model of the profile.
    pub reference_limit: f64,
    /// E^h/h² is not monotone along the sweep.
    pub non_monotone: bool,
    /// The gap does not shrink monotonically as h decreases.
    pub gap_non_monotone: bool,
}

/// Least-squares slope of log y against log x.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Value at h = 0 of the least-squares polynomial c0 + c1 h + c2 h² (linear
/// when only two points are given).
pub fn richardson_limit(h: &[f64], v: &[f64]) -> Result<f64> {
    let degree = (h.len().min(3)).saturating_sub(1);
    if h.len() < 2 || h.len() != v.len() {
        return Err(Error::param("h_list", "need at least two samples"));
    }
    let scale = h.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let a = nalgebra::DMatrix::from_fn(h.len(), degree + 1, |i, j| (h[i] / scale).powi(j as i32));
    let b = nalgebra::DVector::from_column_slice(v);
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::NoConvergence(format!("Richardson fit: {e}")))?;
    Ok(sol[0])
}

fn is_monotone(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0]) || v.windows(2).all(|w| w[1] <= w[0])
}

/// Runs the optimised ansatz over a strictly decreasing list of thicknesses.
/// `base` fixes the texture and material; its thickness is replaced by each h.
pub fn scaling_study(
    base: &StrainProfile,
    surface: &IsometrySurface,
    hs: &[f64],
    quadrature: QuadratureSpec,
) -> Result<ScalingReport> {
    if hs.len() < 3 {
        return Err(Error::param("h_list", "need at least 3 thicknesses"));
    }
    if hs.iter().any(|h| !(h.is_finite() && *h > 0.0)) || hs.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::param("h_list", "thicknesses must be positive and strictly decreasing"));
    }
    let model = reduced_model_for(base)?;
    let field = surface.curvature_field(quadrature.n_plane.max(8), quadrature.n_plane.max(8))?;
    let reference = limit_energy(&field, &model)?;
    let (cx, cy) = (
        0.5 * (surface.domain.a1 + surface.domain.b1),
        0.5 * (surface.domain.a2 + surface.domain.b2),
    );
    let a_centre = surface.eval(cx, cy).shape;
    let d0 = inner_minimiser_d(&a_centre, &|x3| base.limit_b_check(x3), &base.params)?;

    let mut samples = Vec::with_capacity(hs.len());
    for &h in hs {
        let profile = base.with_thickness(h)?;
        let plain = AnsatzDeformation::new(surface.clone(), h, quadrature)?;
        let uncorrected = energy3d_rescaled(&plain, &profile)?;
        let opt = optimise_membrane(&plain.with_membrane(d0), &profile)?;
        let rescaled = energy3d_rescaled(&opt, &profile)?;
        debug!("h = {h}: E/h^2 = {rescaled:.12} (uncorrected {uncorrected:.6})");
        samples.push(ScalingSample {
            h,
            energy: rescaled * h * h,
            rescaled,
            uncorrected,
            gap: (rescaled - reference).abs(),
            membrane: opt.membrane,
        });
    }
    let h: Vec<f64> = samples.iter().map(|s| s.h).collect();
    let rescaled: Vec<f64> = samples.iter().map(|s| s.rescaled).collect();
    let energy: Vec<f64> = samples.iter().map(|s| s.energy).collect();
    let gaps: Vec<f64> = samples.iter().map(|s| s.gap).collect();
    let fitted_gap_exponent = if gaps.iter().all(|g| *g < GAP_FLOOR) {
        None
    } else {
        log_log_slope(&h, &gaps)
    };
    let non_monotone = !is_monotone(&rescaled);
    let gap_non_monotone = gaps.windows(2).any(|w| w[1] > w[0]);
    if non_monotone {
        warn!("E^h/h^2 is not monotone along the h sweep");
    }
    Ok(ScalingReport {
        fitted_gap_exponent,
        raw_energy_exponent: log_log_slope(&h, &energy),
        extrapolated_limit: richardson_limit(&h, &rescaled)?,
        reference_limit: reference,
        non_monotone,
        gap_non_monotone,
        samples,
    })
}

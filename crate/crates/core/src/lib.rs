//! Nematic plate kit.
//!
//! From three-dimensional nematic-elastomer elasticity to two-dimensional
//! plate models: spontaneous strains, Ricci compatibility checks, quadratic
//! dimension reduction, constrained curvature minimisation, minimal-energy
//! surfaces and numerical Γ-scaling checks.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod compatibility;
pub mod domain;
pub mod error;
pub mod gamma_check;
pub mod material;
pub mod numfmt;
pub mod plate_energy;
pub mod quadrature;
pub mod reduction;
pub mod surface;
pub mod tensor;

pub use compatibility::{
    classify_quadratic, ricci, ricci_on_grid, tube_deformation, MetricProfile, QuadraticCase, RicciReport,
    TubeDeformation, Verdict,
};
pub use domain::Rect;
pub use error::{Error, Result};
pub use gamma_check::{
    energy3d_rescaled, optimise_fiber_correction, optimise_membrane, scaling_study, AnsatzDeformation,
    FiberCorrection, QuadratureSpec, ScalingReport, ScalingSample,
};
pub use material::{
    limit_b_field, nematic_step_tensor, w0, w_h, w_vol, w_vol_dd1, DirectorProfile, MaterialParams,
    NematicWell, QuadraticStrainSpec, StrainProfile, Texture,
};
pub use plate_energy::{
    brute_force_developable_min, energy_density, limit_energy, minimise_over_developable, zero_stiffness_family,
    CurvatureField, MinimiserSet, Multiplicity,
};
pub use reduction::{extract_reduced_model, moment_integrals, qbar2, reduced_model_for, MomentTable, ReducedModel};
pub use surface::{
    cylinder_x1, cylinder_x2, developable_surface, energy_of_surface, export_mesh, fundamental_forms_numeric, plane, rotated_cylinder,
    IsometrySurface, RigidMotion, SurfaceDescriptor, SurfaceMesh, SurfacePoint,
};
pub use tensor::{q2, q2_via_relaxation, q3, Mat2, Mat3, QuadForm2, Sym2, Vec3};

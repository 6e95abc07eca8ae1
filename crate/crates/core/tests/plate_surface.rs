mod common;

use std::f64::consts::PI;

use common::unit_params;
use npk_core::surface::r_check;
use npk_core::{
    brute_force_developable_min, developable_surface, energy_of_surface, export_mesh, minimise_over_developable,
    reduced_model_for, rotated_cylinder, Multiplicity, MaterialParams, Rect, StrainProfile, Texture, Vec3,
};

fn models() -> Vec<(Texture, npk_core::ReducedModel)> {
    let p = unit_params();
    let cn = MaterialParams::new(1.0, 2.0, 1.0, 1.0).unwrap();
    vec![
        (Texture::SplayBend, reduced_model_for(&StrainProfile::new(Texture::SplayBend, p, 1e-3).unwrap()).unwrap()),
        (Texture::Twisted, reduced_model_for(&StrainProfile::new(Texture::Twisted, p, 1e-3).unwrap()).unwrap()),
        (
            Texture::ConstantNormal,
            reduced_model_for(&StrainProfile::new(Texture::ConstantNormal, cn, 1e-3).unwrap()).unwrap(),
        ),
    ]
}

#[test]
fn chain_from_profile_to_surface_is_consistent() {
    let dom = Rect::new(-0.5, 1.0, -0.25, 0.75).unwrap();
    for (tex, model) in models() {
        let set = minimise_over_developable(&model).unwrap();
        for a in &set.minimisers {
            let s = developable_surface(a, dom).unwrap();
            let e = energy_of_surface(&s, &model, 12, None).unwrap();
            let expect = set.energy_per_area * dom.area();
            assert!((e - expect).abs() <= 1e-9 * expect, "{tex}: {e} vs {expect}");
        }
    }
}

#[test]
fn brute_force_agrees_for_all_textures() {
    let step = 1e-3;
    for (tex, model) in models() {
        let set = minimise_over_developable(&model).unwrap();
        let bf = brute_force_developable_min(&model, step).unwrap();
        let curvature = model.alpha * 2.0 * model.mu * (1.0 + 2.0 * model.gamma);
        assert!(
            (bf.value - set.energy_per_area).abs() <= 2.0 * step * step * curvature,
            "{tex}: {} vs {}",
            bf.value,
            set.energy_per_area
        );
    }
}

#[test]
fn attainability_dichotomy() {
    let ms = models();
    let (sb, tw) = (&ms[0].1, &ms[1].1);
    assert!(sb.abar.det().abs() < 1e-14 * sb.abar.norm_sq());
    let s = minimise_over_developable(sb).unwrap();
    assert!((s.energy_per_area - sb.beta / 2.0).abs() < 1e-12 * sb.beta);
    assert!(tw.abar.det() < 0.0);
    let t = minimise_over_developable(tw).unwrap();
    assert_eq!(t.multiplicity, Multiplicity::Bistable);
    let c = 12.0 / (PI * PI);
    let gap = (1.0 / 12.0) * c * c * (1.0 + 2.0 * tw.gamma) / (1.0 + tw.gamma);
    assert!((t.energy_per_area - tw.beta / 2.0 - gap).abs() < 1e-9 * gap);
}

#[test]
fn rotated_family_energy_is_angle_independent() {
    let model = models()[2].1;
    let k = minimise_over_developable(&model).unwrap().family_curvature.unwrap();
    let dom = Rect::unit_centred();
    for rho in [1.0 / k, 1.0 / k.abs()] {
        let energies: Vec<f64> = (0..21)
            .map(|i| {
                let alpha = 0.5 * PI * i as f64 / 20.0;
                energy_of_surface(&rotated_cylinder(alpha, rho, dom).unwrap(), &model, 8, None).unwrap()
            })
            .collect();
        for e in &energies {
            assert!((e - energies[0]).abs() <= 1e-12 * energies[0]);
        }
    }
    // the curvature of y^α is Ř_αᵀ diag(1/ρ, 0) Ř_α
    let s = rotated_cylinder(0.4, 2.0, dom).unwrap().eval(0.1, 0.1).shape;
    let r = r_check(0.4);
    let expect = r.transpose() * nalgebra::Matrix2::new(0.5, 0.0, 0.0, 0.0) * r;
    assert!((s.to_matrix() - expect).abs().max() < 1e-15);
}

#[test]
fn twisted_meshes_are_exchanged_by_the_swap() {
    let model = models()[1].1;
    let set = minimise_over_developable(&model).unwrap();
    let n = 9;
    let m1 = export_mesh(&developable_surface(&set.minimisers[0], Rect::unit_centred()).unwrap(), n, n).unwrap();
    let m2 = export_mesh(&developable_surface(&set.minimisers[1], Rect::unit_centred()).unwrap(), n, n).unwrap();
    // (a, b, c) ↦ (b, a, −c) is a proper rotation
    let swap = |v: &Vec3| Vec3::new(v[1], v[0], -v[2]);
    for j in 0..n {
        for i in 0..n {
            let (a, b) = (m1.vertices[j * n + i], m2.vertices[i * n + j]);
            assert!((a - swap(&b)).norm() < 1e-14, "{a} vs {b}");
        }
    }
}

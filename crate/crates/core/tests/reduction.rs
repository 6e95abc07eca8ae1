mod common;

use common::{qbar2_coordinate_descent, random_sym2, unit_params};
use npk_core::{
    extract_reduced_model, qbar2, reduced_model_for, MaterialParams, QuadraticStrainSpec, StrainProfile, Sym2,
    Texture, Vec3,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn profiles() -> Vec<StrainProfile> {
    let p = unit_params();
    vec![
        StrainProfile::new(Texture::SplayBend, p, 0.01).unwrap(),
        StrainProfile::new(Texture::Twisted, p, 0.01).unwrap(),
        StrainProfile::new(Texture::ConstantNormal, MaterialParams::new(1.0, 2.0, 1.0, 1.0).unwrap(), 0.01).unwrap(),
        StrainProfile::constant_normal(p, 0.01, Vec3::new(0.6, 0.0, 0.8)).unwrap(),
        StrainProfile::quadratic(QuadraticStrainSpec::new([0.4, -0.3, 0.2], [1.0, 2.0, -1.0]), p, 0.1).unwrap(),
    ]
}

#[test]
fn reconstruction_identity_on_random_g() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for prof in profiles() {
        let b = |t: f64| prof.limit_b_check(t);
        let model = reduced_model_for(&prof).unwrap();
        for _ in 0..50 {
            let g = random_sym2(&mut rng, 3.0);
            let direct = qbar2(&g, &b, &prof.params).unwrap();
            let err = (direct - model.eval(&g)).abs();
            assert!(err < 1e-9 * (1.0 + direct), "{:?} G = {g:?}: {err:e}", prof.texture);
        }
    }
}

#[test]
fn normal_equations_match_coordinate_descent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let profs = profiles();
    for _ in 0..10 {
        let prof = &profs[rng.random_range(0..profs.len())];
        let g = random_sym2(&mut rng, 2.0);
        let b = |t: f64| prof.limit_b_check(t);
        let exact = qbar2(&g, &b, &prof.params).unwrap();
        let oracle = qbar2_coordinate_descent(&g, &b, &prof.params);
        assert!((exact - oracle).abs() <= 1e-7 * exact.abs().max(1e-12), "{exact} vs {oracle}");
    }
}

#[test]
fn delta0_scaling_laws() {
    for texture in [Texture::SplayBend, Texture::Twisted] {
        let mut abar = Vec::new();
        let mut beta = Vec::new();
        let d0s = [0.5, 1.0, 2.0];
        for d0 in d0s {
            let p = MaterialParams::new(1.0, 2.0, 2.0 * d0, 1.0).unwrap();
            let m = reduced_model_for(&StrainProfile::new(texture, p, 1e-3).unwrap()).unwrap();
            abar.push(m.abar.norm());
            beta.push(m.beta);
        }
        for w in 0..2 {
            let r = (d0s[w + 1] / d0s[w]).ln();
            assert!(((abar[w + 1] / abar[w]).ln() / r - 1.0).abs() < 1e-10);
            assert!(((beta[w + 1] / beta[w]).ln() / r - 2.0).abs() < 1e-10);
        }
    }
}

proptest! {
    #[test]
    fn quadratic_second_order_coefficients_play_no_role(
        a in prop::array::uniform3(-2.0f64..2.0),
        b1 in prop::array::uniform3(-3.0f64..3.0),
        b2 in prop::array::uniform3(-3.0f64..3.0),
    ) {
        let p = unit_params();
        let m1 = reduced_model_for(&StrainProfile::quadratic(QuadraticStrainSpec::new(a, b1), p, 0.1).unwrap()).unwrap();
        let m2 = reduced_model_for(&StrainProfile::quadratic(QuadraticStrainSpec::new(a, b2), p, 0.1).unwrap()).unwrap();
        prop_assert!((m1.alpha - 1.0 / 12.0).abs() < 1e-10);
        prop_assert!((m1.abar - Sym2::diag(a[0] / 2.0, a[1] / 2.0)).max_abs() < 1e-10);
        prop_assert!(m1.beta.abs() < 1e-10);
        prop_assert!((m1.abar - m2.abar).max_abs() < 1e-12 && (m1.beta - m2.beta).abs() < 1e-12);
    }

    #[test]
    fn qbar2_is_minimal_over_membrane_strains(
        g in prop::array::uniform3(-2.0f64..2.0),
        d in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let prof = StrainProfile::new(Texture::Twisted, unit_params(), 0.01).unwrap();
        let b = |t: f64| prof.limit_b_check(t);
        let g = Sym2::new(g[0], g[1], g[2]);
        let best = qbar2(&g, &b, &prof.params).unwrap();
        let other = common::membrane_integral(&Sym2::new(d[0], d[1], d[2]), &g, &b, &prof.params);
        prop_assert!(best <= other + 1e-12);
    }
}

#[test]
fn zero_field_extracts_bending_only() {
    let m = extract_reduced_model(&|_| Sym2::ZERO, &unit_params()).unwrap();
    assert!((m.alpha - 1.0 / 12.0).abs() < 1e-14);
    assert!(m.abar.max_abs() < 1e-14 && m.beta.abs() < 1e-14);
}

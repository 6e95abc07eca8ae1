use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use npk_bench::{model, profile};
use npk_core::{
    developable_surface, energy3d_rescaled, export_mesh, minimise_over_developable, reduced_model_for, ricci,
    AnsatzDeformation, MetricProfile, QuadratureSpec, Rect, Texture,
};

fn reduction(c: &mut Criterion) {
    let p = profile(Texture::SplayBend, 1e-2);
    c.bench_function("reduce/splay-bend", |b| b.iter(|| reduced_model_for(black_box(&p)).unwrap()));
}

fn minimisation(c: &mut Criterion) {
    for t in [Texture::Twisted, Texture::ConstantNormal] {
        let m = model(t);
        c.bench_function(&format!("minimise/{}", t.name()), |b| {
            b.iter(|| minimise_over_developable(black_box(&m)).unwrap())
        });
    }
}

fn curvature(c: &mut Criterion) {
    let metric = MetricProfile::from_profile(&profile(Texture::Twisted, 1e-2)).unwrap();
    c.bench_function("ricci/twisted", |b| b.iter(|| ricci(black_box(&metric)).unwrap()));
}

fn mesh(c: &mut Criterion) {
    let m = model(Texture::Twisted);
    let a = minimise_over_developable(&m).unwrap().minimisers[0];
    let s = developable_surface(&a, Rect::unit_centred()).unwrap();
    c.bench_function("mesh/65x65", |b| b.iter(|| export_mesh(black_box(&s), 65, 65).unwrap()));
}

fn column_energy(c: &mut Criterion) {
    let m = model(Texture::SplayBend);
    let a = minimise_over_developable(&m).unwrap().minimisers[0];
    let s = developable_surface(&a, Rect::unit_centred()).unwrap();
    let h = 1e-2;
    let p = profile(Texture::SplayBend, h);
    let ansatz = AnsatzDeformation::new(s, h, QuadratureSpec { n_plane: 4, n_thick: 16 }).unwrap();
    c.bench_function("energy3d/4x4x16", |b| b.iter(|| energy3d_rescaled(black_box(&ansatz), &p).unwrap()));
}

criterion_group!(benches, reduction, minimisation, curvature, mesh, column_energy);
criterion_main!(benches);

//! Acceptance runner: one PASS/FAIL line per criterion, with timings and
//! diagnostics. Exits with status 1 if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::{compatible_specs, violating_specs};
use npk_core::compatibility::ricci_at;
use npk_core::material::DirectorProfile;
use npk_core::{
    brute_force_developable_min, classify_quadratic, cylinder_x1, energy_of_surface, limit_energy,
    minimise_over_developable, moment_integrals, reduced_model_for, ricci, rotated_cylinder, scaling_study,
    tube_deformation, zero_stiffness_family, CurvatureField, MaterialParams, MetricProfile, Multiplicity,
    QuadraticStrainSpec, QuadratureSpec, Rect, ReducedModel, StrainProfile, Sym2, Texture, Verdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Report {
    checks: Vec<(String, bool)>,
    notes: Vec<String>,
}

impl Report {
    fn new() -> Self {
        Report { checks: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push((label.into(), ok));
    }

    /// |value − expected| ≤ tol·|expected| (absolute when expected = 0).
    fn close(&mut self, label: &str, value: f64, expected: f64, tol: f64) {
        let err = (value - expected).abs();
        let ok = err <= tol * expected.abs().max(if expected == 0.0 { 1.0 } else { 0.0 });
        self.check(format!("{label}: {value:.12e} vs {expected:.12e}"), ok);
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn run(id: &str, title: &str, limit: Duration, body: impl FnOnce(&mut Report)) -> bool {
    let mut r = Report::new();
    let start = Instant::now();
    body(&mut r);
    let took = start.elapsed();
    r.check(format!("runtime {took:.2?} < {limit:?}"), took < limit);
    let ok = r.checks.iter().all(|c| c.1);
    println!("{} {id} {title} ({took:.2?})", if ok { "PASS" } else { "FAIL" });
    for (label, pass) in &r.checks {
        if !pass {
            println!("    failed: {label}");
        }
    }
    for n in &r.notes {
        println!("    note: {n}");
    }
    ok
}

fn param_sets() -> Vec<MaterialParams> {
    vec![MaterialParams::new(1.0, 2.0, 2.0, 1.0).unwrap(), MaterialParams::new(1.3, 0.7, 0.9, 0.75).unwrap()]
}

fn model(texture: Texture, p: MaterialParams) -> ReducedModel {
    reduced_model_for(&StrainProfile::new(texture, p, 1e-2).unwrap()).unwrap()
}

fn rel_sym(a: &Sym2, b: &Sym2) -> f64 {
    (*a - *b).max_abs() / b.max_abs()
}

fn ac1(r: &mut Report) {
    for p in param_sets() {
        let (mu, g, d) = (p.mu, p.gamma(), p.delta0());
        let m = model(Texture::SplayBend, p);
        let abar = Sym2::diag(-12.0 * d / (PI * PI), 0.0);
        r.close("alpha", m.alpha, 1.0 / 12.0, 1e-10 * 12.0);
        r.check(format!("Abar rel err {:.2e}", rel_sym(&m.abar, &abar)), rel_sym(&m.abar, &abar) <= 1e-9);
        let stated = mu * (1.0 + g) * d * d * (PI.powi(4) - 12.0) / 4.0;
        r.close("beta (stated closed form)", m.beta, stated, 1e-9);
        let derived = mu * (1.0 + g) * d * d * (PI.powi(4) - 96.0) / (4.0 * PI.powi(4));
        r.note(format!(
            "beta = {:.12e}; mu(1+gamma)delta0^2(pi^4-96)/(4 pi^4) = {derived:.12e}, rel err {:.1e}",
            m.beta,
            (m.beta - derived).abs() / derived
        ));
    }
}

fn ac2(r: &mut Report) {
    for p in param_sets() {
        let (mu, d) = (p.mu, p.delta0());
        let m = model(Texture::Twisted, p);
        let c = 12.0 * d / (PI * PI);
        let abar = Sym2::diag(-c, c);
        r.close("alpha", m.alpha, 1.0 / 12.0, 1e-10 * 12.0);
        r.check(format!("Abar rel err {:.2e}", rel_sym(&m.abar, &abar)), rel_sym(&m.abar, &abar) <= 1e-9);
        r.close("beta", m.beta, mu * d * d * (PI.powi(4) - 4.0 * PI * PI - 48.0) / PI.powi(4), 1e-9);
    }
}

fn ac3(r: &mut Report) {
    for p in param_sets() {
        let (mu, g, d) = (p.mu, p.gamma(), p.delta0());
        let m = model(Texture::Twisted, p);
        let set = minimise_over_developable(&m).unwrap();
        let k = 12.0 * d / (PI * PI * (1.0 + g));
        r.check(
            format!("{} minimisers, {:?}", set.minimisers.len(), set.multiplicity),
            set.minimisers.len() == 2 && set.multiplicity == Multiplicity::Bistable,
        );
        let want = [Sym2::diag(-k, 0.0), Sym2::diag(0.0, k)];
        for w in want {
            let found = set.minimisers.iter().any(|a| (*a - w).max_abs() <= 1e-9);
            r.check(format!("minimiser {w:?} found"), found);
        }
        let e = mu * d * d / PI.powi(4)
            * (12.0 * (1.0 + 2.0 * g) / (1.0 + g) + (PI.powi(4) - 4.0 * PI * PI - 48.0) / 2.0);
        r.close("energy per area", set.energy_per_area, e, 1e-9);
        let bf = brute_force_developable_min(&m, 1e-3).unwrap();
        r.check(
            format!("brute force {:.9} vs {:.9}", bf.value, set.energy_per_area),
            (bf.value - set.energy_per_area).abs() <= 1e-4,
        );
        for w in want {
            let near = bf.argmins.iter().any(|a| (*a - w).max_abs() <= 1e-2);
            r.check(format!("brute-force argmin near {w:?}"), near);
        }
    }
}

fn ac4(r: &mut Report) {
    let (a, h) = (1.1, 0.1);
    let sb = MetricProfile::nematic(DirectorProfile::SplayBend, a, h).unwrap();
    let tw = MetricProfile::nematic(DirectorProfile::Twisted, a, h).unwrap();
    let ts: Vec<f64> = (0..11).map(|i| -0.5 * h + h * i as f64 / 10.0).collect();
    let stated = |t: f64| -((a - 1.0f64).powi(2) / a) * (PI / (8.0 * h)) * (PI + 2.0 * PI * t / h).sin();
    let derived = |t: f64| -PI * PI * (a - 1.0f64).powi(2) * (2.0 * PI * t / h).sin() / (16.0 * a * h * h);
    let peak = ts.iter().map(|t| stated(*t).abs()).fold(0.0, f64::max);
    let peak_d = ts.iter().map(|t| derived(*t).abs()).fold(0.0, f64::max);
    let mut worst_stated: f64 = 0.0;
    let mut worst_derived: f64 = 0.0;
    for &t in &ts {
        let ric = ricci_at(&sb, t).unwrap();
        let v = ric[0][2];
        r.check(format!("SB R_1t symmetric at t = {t:+.3}"), (ric[0][2] - ric[2][0]).abs() <= 1e-12 * peak_d);
        worst_stated = worst_stated.max((v - stated(t)).abs() / peak);
        worst_derived = worst_derived.max((v - derived(t)).abs() / peak_d);
    }
    r.check(format!("SB R_1t vs stated closed form, max rel err {worst_stated:.3e}"), worst_stated <= 1e-6);
    r.note(format!(
        "SB R_1t vs -pi^2 (a-1)^2 sin(2 pi t/h)/(16 a h^2): max rel err {worst_derived:.2e} \
         (at t = h/4: computed {:.6}, stated form {:.6})",
        ricci_at(&sb, h / 4.0).unwrap()[0][2],
        stated(h / 4.0)
    ));
    let rtt = -((a - 1.0f64).powi(2) / (2.0 * a)) * (PI / (2.0 * h)).powi(2);
    let mut worst_t: f64 = 0.0;
    for &t in &ts {
        worst_t = worst_t.max((ricci_at(&tw, t).unwrap()[2][2] - rtt).abs() / rtt.abs());
    }
    r.check(format!("twisted R_tt max rel err {worst_t:.3e}"), worst_t <= 1e-6);
    r.check("SB verdict Incompatible", ricci(&sb).unwrap().verdict == Verdict::Incompatible);
    r.check("twisted verdict Incompatible", ricci(&tw).unwrap().verdict == Verdict::Incompatible);
}

fn ac5(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let h = 0.2;
    let mut agree = 0;
    let mut total = 0;
    let mut compatible_ok = 0;
    let compatible = compatible_specs(&mut rng, 50);
    let violating = violating_specs(&mut rng, 200);
    for (spec, expect_compatible) in
        compatible.iter().map(|c| (c.1, true)).chain(violating.iter().map(|s| (*s, false)))
    {
        let class = classify_quadratic(&spec);
        let verdict = ricci(&MetricProfile::quadratic(spec, h).unwrap()).unwrap().verdict;
        total += 1;
        if class.is_compatible() == (verdict == Verdict::Compatible) {
            agree += 1;
        }
        if class.is_compatible() == expect_compatible {
            compatible_ok += 1;
        }
    }
    r.check(format!("classifier/Ricci agreement {agree}/{total}"), agree == total && total == 400);
    r.check(format!("generated case labels recovered {compatible_ok}/{total}"), compatible_ok == total);
}

fn ac6(r: &mut Report) {
    for k in [0.3, 0.7] {
        let tube = tube_deformation(k, 0.5, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let res = tube.residual(21);
        r.check(format!("k = {k}: residual {res:.2e}"), res < 1e-10);
    }
}

fn ac7(r: &mut Report) {
    let p = MaterialParams::new(1.0, 2.0, 1.0, 1.0).unwrap();
    let m = model(Texture::ConstantNormal, p);
    let set = minimise_over_developable(&m).unwrap();
    let kbar = set.family_curvature.unwrap();
    let m0 = 0.5 * m.abar.trace();
    let g = m.gamma;
    let dom = Rect::unit_centred();
    let value = (m.mu / 12.0) * m0 * m0 * (1.0 + 2.0 * g) / (1.0 + g) * dom.area();
    let mut family = Vec::new();
    for i in 0..=40 {
        let s = -0.5 * kbar.abs() + kbar.abs() * i as f64 / 40.0;
        let (plus, minus) = zero_stiffness_family(&m, s).unwrap();
        for a in [plus, minus] {
            family.push(limit_energy(&CurvatureField::constant(dom, a), &m).unwrap());
        }
    }
    let spread = |v: &[f64]| {
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(*x), h.max(*x)));
        (hi - lo) / value
    };
    r.check(format!("family spread {:.2e}", spread(&family)), spread(&family) <= 1e-12);
    r.close("family value", family[0], value, 1e-12);
    let surfaces: Vec<f64> = (0..21)
        .map(|i| {
            let alpha = 0.5 * PI * i as f64 / 20.0;
            energy_of_surface(&rotated_cylinder(alpha, 1.0 / kbar, dom).unwrap(), &m, 16, None).unwrap()
        })
        .collect();
    r.check(format!("surface spread {:.2e}", spread(&surfaces)), spread(&surfaces) <= 1e-9);
    r.close("surface value", surfaces[0], value, 1e-9);
}

fn ac8(r: &mut Report) {
    let p = MaterialParams::new(1.0, 2.0, 2.0, 1.0).unwrap();
    let (mu, g, d) = (p.mu, p.gamma(), p.delta0());
    let hs = [1e-2, 5e-3, 2.5e-3, 1e-3];
    let dom = Rect::unit_centred();
    let cases = [
        (
            Texture::SplayBend,
            -12.0 * d / (PI * PI),
            mu * (1.0 + g) * d * d * (PI.powi(4) - 12.0) / 8.0,
        ),
        (
            Texture::Twisted,
            -12.0 * d / (PI * PI * (1.0 + g)),
            mu * d * d / PI.powi(4) * (12.0 * (1.0 + 2.0 * g) / (1.0 + g) + (PI.powi(4) - 4.0 * PI * PI - 48.0) / 2.0),
        ),
    ];
    for (tex, k, closed) in cases {
        let base = StrainProfile::new(tex, p, hs[0]).unwrap();
        let rep = scaling_study(&base, &cylinder_x1(k, dom), &hs, QuadratureSpec::default()).unwrap();
        let e_lim = closed * dom.area();
        let rel = (rep.extrapolated_limit - e_lim).abs() / e_lim;
        r.check(
            format!("{tex}: extrapolated {:.9} vs closed form {e_lim:.9} (rel {rel:.2e})", rep.extrapolated_limit),
            rel <= 0.1,
        );
        let raw = rep.raw_energy_exponent.unwrap_or(f64::NAN);
        r.check(format!("{tex}: raw energy exponent {raw:.4}"), (raw - 2.0).abs() <= 0.1);
        let rel_ref = (rep.extrapolated_limit - rep.reference_limit).abs() / rep.reference_limit;
        r.note(format!(
            "{tex}: E^h/h^2 = [{}], E^lim of the reduced model {:.9} (rel {rel_ref:.2e}), gap exponent {:.3}",
            rep.samples.iter().map(|s| format!("{:.9}", s.rescaled)).collect::<Vec<_>>().join(", "),
            rep.reference_limit,
            rep.fitted_gap_exponent.unwrap_or(f64::NAN)
        ));
    }
}

fn ac9(r: &mut Report) {
    for tex in [Texture::SplayBend, Texture::Twisted] {
        for e in moment_integrals(tex).unwrap().entries() {
            r.check(
                format!("{tex} {}: {:.15} vs {:.15}", e.name, e.value, e.exact),
                (e.value - e.exact).abs() <= 1e-10,
            );
        }
    }
}

fn ac10(r: &mut Report) {
    let p = MaterialParams::new(1.0, 2.0, 2.0, 1.0).unwrap();
    let a = [0.8, -0.5, 0.3];
    let reference = reduced_model_for(&StrainProfile::quadratic(QuadraticStrainSpec::new(a, [0.0; 3]), p, 0.1).unwrap())
        .unwrap();
    let target = Sym2::diag(a[0] / 2.0, a[1] / 2.0);
    for bq in [[0.0; 3], [1.0, 2.0, -1.0], [-3.0, 0.5, 4.0], [10.0, -10.0, 0.0]] {
        let m = reduced_model_for(&StrainProfile::quadratic(QuadraticStrainSpec::new(a, bq), p, 0.1).unwrap()).unwrap();
        r.close("alpha", m.alpha, 1.0 / 12.0, 1e-10 * 12.0);
        r.check(format!("Abar {:?}", m.abar), (m.abar - target).max_abs() <= 1e-10);
        r.check(format!("beta {:.2e}", m.beta), m.beta.abs() <= 1e-10);
        r.check(
            format!("invariant under Bq = {bq:?}"),
            (m.abar - reference.abar).max_abs() <= 1e-10 && (m.beta - reference.beta).abs() <= 1e-10,
        );
    }
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        run("AC1", "splay-bend constants", s(1), ac1),
        run("AC2", "twisted constants", s(1), ac2),
        run("AC3", "twisted bistable minimisers", s(30), ac3),
        run("AC4", "Ricci of nematic metrics", s(5), ac4),
        run("AC5", "quadratic classification vs Ricci", s(20), ac5),
        run("AC6", "tube construction", s(2), ac6),
        run("AC7", "zero-stiffness family", s(5), ac7),
        run("AC8", "energy scaling on minimising cylinders", s(600), ac8),
        run("AC9", "moment integrals", s(1), ac9),
        run("AC10", "quadratic texture reduction", s(1), ac10),
    ];
    let passed = results.iter().filter(|r| **r).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}

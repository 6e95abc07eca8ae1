//! The subcommands. Each returns an [`Output`]; nothing here prints.

use npk_core::compatibility::{classify_quadratic, MetricProfile};
use npk_core::plate_energy::{cylinder_sweep, family_sweep};
use npk_core::surface::{cylinder_x2, plane};
use npk_core::{
    brute_force_developable_min, cylinder_x1, developable_surface, energy_of_surface, export_mesh,
    minimise_over_developable, moment_integrals, reduced_model_for, ricci, rotated_cylinder, scaling_study,
    IsometrySurface, MinimiserSet, Multiplicity, ReducedModel, StrainProfile, Texture,
};
use serde_json::{json, Value};

use crate::config::{RunConfig, SurfaceChoice, SweepKind};
use crate::error::{CliError, Stage};
use crate::output::{sym, Output, Table};

/// Relative tolerance of the reduce → minimise → surface energy chain.
pub const CHAIN_TOL: f64 = 1e-9;
const BRUTE_FORCE_STEP: f64 = 1e-3;

fn profile(cfg: &RunConfig, h: f64) -> Result<StrainProfile, CliError> {
    match cfg.quadratic {
        Some(spec) => StrainProfile::quadratic(spec, cfg.params, h),
        None => StrainProfile::new(cfg.texture, cfg.params, h),
    }
    .stage("strain profile")
}

fn model(cfg: &RunConfig) -> Result<ReducedModel, CliError> {
    reduced_model_for(&profile(cfg, cfg.h)?).stage("reduction")
}

fn params_json(cfg: &RunConfig) -> Value {
    let p = &cfg.params;
    json!({
        "texture": cfg.texture.name(),
        "mu": p.mu,
        "kappa": p.kappa,
        "alpha0": p.alpha0,
        "h0": p.h0,
        "gamma": p.gamma(),
        "delta0": p.delta0(),
        "h": cfg.h,
        "seed": cfg.seed,
    })
}

pub fn compat(cfg: &RunConfig) -> Result<Output, CliError> {
    let prof = profile(cfg, cfg.h)?;
    let metric = MetricProfile::from_profile(&prof).stage("metric")?;
    let rep = ricci(&metric).stage("ricci")?;
    let mut t = Table::new("ricci", vec!["t", "r11", "r12", "r1t", "r22", "r2t", "rtt"]);
    for (ti, r) in rep.t.iter().zip(&rep.ricci) {
        t.push(vec![
            (*ti).into(),
            r[0][0].into(),
            r[0][1].into(),
            r[0][2].into(),
            r[1][1].into(),
            r[1][2].into(),
            r[2][2].into(),
        ]);
    }
    let case = cfg.quadratic.map(|s| format!("{:?}", classify_quadratic(&s)));
    Ok(Output {
        command: "compat",
        summary: json!({
            "params": params_json(cfg),
            "order_ratio": prof.order_ratio(0.0),
            "verdict": format!("{:?}", rep.verdict),
            "max_abs_ricci": rep.max_abs,
            "scale": rep.scale,
            "tolerance": rep.tolerance,
            "quadratic_case": case,
        }),
        tables: vec![t],
        files: vec![],
    })
}

fn model_json(m: &ReducedModel) -> Value {
    json!({ "alpha": m.alpha, "Abar": sym(&m.abar), "beta": m.beta, "mu": m.mu, "gamma": m.gamma })
}

pub fn reduce(cfg: &RunConfig) -> Result<Output, CliError> {
    let m = model(cfg)?;
    let mut t = Table::new("model", vec!["name", "value"]);
    for (name, v) in [
        ("alpha", m.alpha),
        ("abar_xx", m.abar.xx),
        ("abar_xy", m.abar.xy),
        ("abar_yy", m.abar.yy),
        ("beta", m.beta),
        ("gamma", m.gamma),
        ("delta0", cfg.params.delta0()),
    ] {
        t.push(vec![name.into(), v.into()]);
    }
    let mut tables = vec![t];
    let mut moments = Value::Null;
    if matches!(cfg.texture, Texture::SplayBend | Texture::Twisted) {
        let entries = moment_integrals(cfg.texture).stage("moments")?.entries();
        let mut mt = Table::new("moments", vec!["name", "value", "exact"]);
        for e in &entries {
            mt.push(vec![e.name.into(), e.value.into(), e.exact.into()]);
        }
        moments = json!(entries.iter().map(|e| json!({"name": e.name, "value": e.value, "exact": e.exact})).collect::<Vec<_>>());
        tables.push(mt);
    }
    let mut summary = model_json(&m);
    summary["delta0"] = json!(cfg.params.delta0());
    summary["params"] = params_json(cfg);
    summary["moments"] = moments;
    Ok(Output { command: "reduce", summary, tables, files: vec![] })
}

fn minimiser_set(m: &ReducedModel) -> Result<MinimiserSet, CliError> {
    minimise_over_developable(m).stage("minimisation")
}

pub fn minimise(cfg: &RunConfig) -> Result<Output, CliError> {
    let m = model(cfg)?;
    let set = minimiser_set(&m)?;
    let bf = brute_force_developable_min(&m, BRUTE_FORCE_STEP).stage("brute-force check")?;
    let area = cfg.domain.area();
    let mut t = Table::new("minimisers", vec!["index", "a_xx", "a_xy", "a_yy", "curvature", "energy_per_area"]);
    for (i, a) in set.minimisers.iter().enumerate() {
        t.push(vec![i.into(), a.xx.into(), a.xy.into(), a.yy.into(), a.trace().into(), set.energy_per_area.into()]);
    }
    Ok(Output {
        command: "minimise",
        summary: json!({
            "params": params_json(cfg),
            "model": model_json(&m),
            "multiplicity": set.multiplicity,
            "minimisers": set.minimisers.iter().map(sym).collect::<Vec<_>>(),
            "curvatures": set.minimisers.iter().map(|a| a.trace()).collect::<Vec<_>>(),
            "family_curvature": set.family_curvature,
            "energy_per_area": set.energy_per_area,
            "energy": set.energy_per_area * area,
            "domain_area": area,
            "brute_force": { "step": bf.step, "value": bf.value, "difference": bf.value - set.energy_per_area },
        }),
        tables: vec![t],
        files: vec![],
    })
}

/// The configured surface and, when it is a minimiser, the minimal energy
/// per area.
fn choose_surface(cfg: &RunConfig, m: &ReducedModel) -> Result<(IsometrySurface, Option<f64>), CliError> {
    let d = cfg.domain;
    Ok(match cfg.surface {
        SurfaceChoice::Minimiser { which } => {
            let set = minimiser_set(m)?;
            let a = set.minimisers.get(which).ok_or_else(|| {
                CliError::Config(format!("field `which`: {which} out of range ({} minimisers)", set.minimisers.len()))
            })?;
            (developable_surface(a, d).stage("surface")?, Some(set.energy_per_area))
        }
        SurfaceChoice::Plane => (plane(d), None),
        SurfaceChoice::CylinderX1 { k } => (cylinder_x1(k, d), None),
        SurfaceChoice::CylinderX2 { k } => (cylinder_x2(k, d), None),
        SurfaceChoice::Rotated { alpha, rho } => (rotated_cylinder(alpha, rho, d).stage("surface")?, None),
    })
}

fn surface_summary(
    s: &IsometrySurface,
    m: &ReducedModel,
    cfg: &RunConfig,
    minimal: Option<f64>,
) -> Result<(Value, bool), CliError> {
    let n = cfg.grid.0.max(cfg.grid.1);
    let energy = energy_of_surface(s, m, n, None).stage("surface energy")?;
    let field = s.curvature_field(n, n).stage("surface curvature")?;
    let d = &s.domain;
    let centre = s.eval(0.5 * (d.a1 + d.b1), 0.5 * (d.a2 + d.b2)).shape;
    let mut ok = true;
    let chain = minimal.map(|e| {
        let expected = e * d.area();
        let rel = (energy - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        ok = rel <= CHAIN_TOL || (energy - expected).abs() <= CHAIN_TOL * f64::EPSILON;
        json!({ "minimal_energy": expected, "relative_difference": rel, "consistent": ok })
    });
    Ok((
        json!({
            "descriptor": s.descriptor(),
            "domain": [d.a1, d.b1, d.a2, d.b2],
            "second_fundamental_form_at_centre": sym(&centre),
            "max_abs_det": field.max_abs_det(),
            "isometry_residual": s.isometry_residual(n),
            "energy": energy,
            "energy_per_area": energy / d.area(),
            "chain": chain,
        }),
        ok,
    ))
}

fn mesh_table(name: String, s: &IsometrySurface, cfg: &RunConfig) -> Result<(Table, String, usize, usize), CliError> {
    let mesh = export_mesh(s, cfg.grid.0, cfg.grid.1).stage("mesh export")?;
    let mut t = Table::new(name, vec!["index", "x", "y", "z", "nx", "ny", "nz"]);
    for (i, (v, n)) in mesh.vertices.iter().zip(&mesh.normals).enumerate() {
        t.push(vec![i.into(), v[0].into(), v[1].into(), v[2].into(), n[0].into(), n[1].into(), n[2].into()]);
    }
    Ok((t, mesh.to_obj(), mesh.vertices.len(), mesh.faces.len()))
}

pub fn surface(cfg: &RunConfig) -> Result<Output, CliError> {
    let m = model(cfg)?;
    let (s, minimal) = choose_surface(cfg, &m)?;
    let (mut summary, ok) = surface_summary(&s, &m, cfg, minimal)?;
    if !ok {
        return Err(CliError::Numerical {
            stage: "surface energy check",
            source: npk_core::Error::NoConvergence("surface energy differs from the minimal energy".into()),
        });
    }
    let (t, obj, nv, nf) = mesh_table("vertices".into(), &s, cfg)?;
    summary["params"] = params_json(cfg);
    summary["mesh"] = json!({ "file": "surface.obj", "vertices": nv, "faces": nf });
    Ok(Output { command: "surface", summary, tables: vec![t], files: vec![("surface.obj".into(), obj)] })
}

pub fn sweep(cfg: &RunConfig) -> Result<Output, CliError> {
    let m = model(cfg)?;
    let kind = cfg.sweep.unwrap_or(if cfg.texture == Texture::ConstantNormal {
        SweepKind::Family
    } else {
        SweepKind::Cylinder
    });
    let n = cfg.samples;
    let (table, extra) = match kind {
        SweepKind::Cylinder => {
            let scale = m.abar.max_abs().max(0.1);
            let (lo, hi) = cfg.k_range.unwrap_or((-3.0 * scale, 3.0 * scale));
            let mut t = Table::new("sweep_cylinder", vec!["k", "energy_x1", "energy_x2"]);
            for s in cylinder_sweep(&m, lo, hi, n) {
                t.push(vec![s.k.into(), s.energy_x1.into(), s.energy_x2.into()]);
            }
            (t, json!({ "k_range": [lo, hi] }))
        }
        SweepKind::Family => {
            let mut t = Table::new(
                "sweep_family",
                vec!["s", "plus_xx", "plus_xy", "plus_yy", "minus_xx", "minus_xy", "minus_yy", "energy_plus", "energy_minus"],
            );
            for s in family_sweep(&m, n).stage("family sweep")? {
                t.push(vec![
                    s.s.into(),
                    s.plus.xx.into(),
                    s.plus.xy.into(),
                    s.plus.yy.into(),
                    s.minus.xx.into(),
                    s.minus.xy.into(),
                    s.minus.yy.into(),
                    s.energy_plus.into(),
                    s.energy_minus.into(),
                ]);
            }
            (t, Value::Null)
        }
        SweepKind::Director => {
            let prof = profile(cfg, cfg.h)?;
            let mut t = Table::new(
                "sweep_director",
                vec!["x3", "n1", "n2", "n3", "m_xx", "m_xy", "m_yy", "b_xx", "b_xy", "b_yy"],
            );
            for i in 0..n {
                let x3 = -0.5 + i as f64 / (n - 1) as f64;
                let d = prof.director_at(x3);
                let mm = prof.m_check(x3);
                let b = prof.limit_b_check(x3);
                t.push(vec![
                    x3.into(),
                    d[0].into(),
                    d[1].into(),
                    d[2].into(),
                    mm.xx.into(),
                    mm.xy.into(),
                    mm.yy.into(),
                    b.xx.into(),
                    b.xy.into(),
                    b.yy.into(),
                ]);
            }
            (t, Value::Null)
        }
    };
    Ok(Output {
        command: "sweep",
        summary: json!({
            "params": params_json(cfg),
            "model": model_json(&m),
            "kind": table.name.trim_start_matches("sweep_"),
            "samples": n,
            "range": extra,
            "file": format!("{}.csv", table.name),
        }),
        tables: vec![table],
        files: vec![],
    })
}

pub fn gamma_check(cfg: &RunConfig) -> Result<Output, CliError> {
    let m = model(cfg)?;
    let (s, _) = choose_surface(cfg, &m)?;
    let base = profile(cfg, cfg.h_list[0])?;
    let rep = scaling_study(&base, &s, &cfg.h_list, cfg.quadrature).stage("gamma-check")?;
    let mut t = Table::new("scaling", vec!["h", "energy", "energy_over_h2", "uncorrected_over_h2", "gap"]);
    for x in &rep.samples {
        t.push(vec![x.h.into(), x.energy.into(), x.rescaled.into(), x.uncorrected.into(), x.gap.into()]);
    }
    let mut summary = serde_json::to_value(&rep).expect("report serialises");
    summary["params"] = params_json(cfg);
    summary["surface"] = serde_json::to_value(s.descriptor()).expect("descriptor serialises");
    summary["quadrature"] = json!([cfg.quadrature.n_plane, cfg.quadrature.n_thick]);
    Ok(Output { command: "gamma-check", summary, tables: vec![t], files: vec![] })
}

/// compat, reduce, minimise, a surface per minimiser with the energy chain
/// check, and (unless skipped) gamma-check on the first minimiser.
pub fn report(cfg: &RunConfig) -> Result<Output, CliError> {
    let c = compat(cfg)?;
    let r = reduce(cfg)?;
    let mn = minimise(cfg)?;
    let m = model(cfg)?;
    let set = minimiser_set(&m)?;
    let mut surfaces = Vec::new();
    let mut files = Vec::new();
    let mut tables = Vec::new();
    let mut consistent = true;
    let count = if set.multiplicity == Multiplicity::ContinuousFamily { set.minimisers.len().min(2) } else { set.minimisers.len() };
    for (i, a) in set.minimisers.iter().take(count).enumerate() {
        let s = developable_surface(a, cfg.domain).stage("surface")?;
        let (mut summary, ok) = surface_summary(&s, &m, cfg, Some(set.energy_per_area))?;
        consistent &= ok;
        let name = format!("surface_{i}.obj");
        let (_, obj, nv, nf) = mesh_table(format!("vertices_{i}"), &s, cfg)?;
        summary["mesh"] = json!({ "file": name, "vertices": nv, "faces": nf });
        files.push((name, obj));
        surfaces.push(summary);
    }
    if !consistent {
        return Err(CliError::Numerical {
            stage: "report chain check",
            source: npk_core::Error::NoConvergence("surface energy differs from the minimal energy".into()),
        });
    }
    let gamma = if cfg.skip_gamma {
        Value::Null
    } else {
        let cfg0 = RunConfig { surface: SurfaceChoice::Minimiser { which: 0 }, ..cfg.clone() };
        let g = gamma_check(&cfg0)?;
        tables.extend(g.tables);
        g.summary
    };
    let mut parts = Vec::new();
    for o in [c, r, mn] {
        let mut summary = o.summary;
        if let Some(obj) = summary.as_object_mut() {
            obj.remove("params");
        }
        parts.push(summary);
        tables.extend(o.tables);
    }
    let [compat, reduce, minimise]: [Value; 3] = parts.try_into().expect("three parts");
    Ok(Output {
        command: "report",
        summary: json!({
            "params": params_json(cfg),
            "compat": compat,
            "reduce": reduce,
            "minimise": minimise,
            "surfaces": surfaces,
            "chain_consistent": consistent,
            "gamma_check": gamma,
        }),
        tables,
        files,
    })
}

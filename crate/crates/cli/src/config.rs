//! Run configuration: TOML file merged under command-line flags, then
//! validated into a [`RunConfig`].

use std::path::{Path, PathBuf};

use clap::Args;
use npk_core::{MaterialParams, QuadraticStrainSpec, QuadratureSpec, Rect, Texture};
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_H_LIST: [f64; 4] = [1e-2, 5e-3, 2.5e-3, 1e-3];

/// Every option, as given on the command line or in the TOML file.
/// Flags win over file values.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// TOML configuration file (keys are the flag names with underscores)
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// splay-bend | twisted | constant-normal | quadratic
    #[arg(long, global = true)]
    pub texture: Option<String>,
    /// Shear modulus (the energy unit)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Volumetric stiffness W_vol''(1)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Nematic order magnitude
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha0: Option<f64>,
    /// Reference thickness (the length unit)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub h0: Option<f64>,
    /// Thickness for single-thickness commands
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub h: Option<f64>,
    /// Strictly decreasing thicknesses for gamma-check, comma separated
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub h_list: Option<Vec<f64>>,
    /// Plate domain a1,b1,a2,b2
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub domain: Option<Vec<f64>>,
    /// Sampling / mesh resolution n1,n2
    #[arg(long, global = true, value_delimiter = ',')]
    pub grid: Option<Vec<usize>>,
    /// Output directory (default: print to stdout)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// json | csv (stdout format)
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Seed recorded with the outputs
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Quadratic texture: diagonal of A (a1,a2,at)
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub quad_a: Option<Vec<f64>>,
    /// Quadratic texture: diagonal of Bq (b1,b2,bt)
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub quad_b: Option<Vec<f64>>,

    /// minimiser | plane | cylinder-x1 | cylinder-x2 | rotated
    #[arg(long, global = true)]
    pub surface: Option<String>,
    /// Cylinder curvature
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// Rotation angle of the rotated cylinder
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Signed radius of the rotated cylinder
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    /// Which minimiser to use when several exist (0-based)
    #[arg(long, global = true)]
    pub which: Option<usize>,

    /// Sweep kind: cylinder | family | director
    #[arg(long, global = true)]
    pub sweep: Option<String>,
    /// Curvature range kmin,kmax of the cylinder sweep
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub k_range: Option<Vec<f64>>,
    /// Number of sweep samples
    #[arg(long, global = true)]
    pub samples: Option<usize>,

    /// gamma-check quadrature: in-plane points per direction, thickness points
    #[arg(long, global = true, value_delimiter = ',')]
    pub quad: Option<Vec<usize>>,
    /// report: skip the gamma-check stage
    #[arg(long, global = true)]
    #[serde(default)]
    pub skip_gamma: bool,
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("config: cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    /// Flag values over `file` values.
    pub fn over(self, file: Settings) -> Settings {
        Settings {
            config: self.config,
            texture: self.texture.or(file.texture),
            mu: self.mu.or(file.mu),
            kappa: self.kappa.or(file.kappa),
            alpha0: self.alpha0.or(file.alpha0),
            h0: self.h0.or(file.h0),
            h: self.h.or(file.h),
            h_list: self.h_list.or(file.h_list),
            domain: self.domain.or(file.domain),
            grid: self.grid.or(file.grid),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
            seed: self.seed.or(file.seed),
            quad_a: self.quad_a.or(file.quad_a),
            quad_b: self.quad_b.or(file.quad_b),
            surface: self.surface.or(file.surface),
            k: self.k.or(file.k),
            alpha: self.alpha.or(file.alpha),
            rho: self.rho.or(file.rho),
            which: self.which.or(file.which),
            sweep: self.sweep.or(file.sweep),
            k_range: self.k_range.or(file.k_range),
            samples: self.samples.or(file.samples),
            quad: self.quad.or(file.quad),
            skip_gamma: self.skip_gamma || file.skip_gamma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceChoice {
    Minimiser { which: usize },
    Plane,
    CylinderX1 { k: f64 },
    CylinderX2 { k: f64 },
    Rotated { alpha: f64, rho: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Cylinder,
    Family,
    Director,
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub texture: Texture,
    pub params: MaterialParams,
    pub h: f64,
    pub h_list: Vec<f64>,
    pub domain: Rect,
    pub grid: (usize, usize),
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub quadratic: Option<QuadraticStrainSpec>,
    pub surface: SurfaceChoice,
    pub sweep: Option<SweepKind>,
    pub k_range: Option<(f64, f64)>,
    pub samples: usize,
    pub quadrature: QuadratureSpec,
    pub skip_gamma: bool,
}

fn bad(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("field `{field}`: {reason}"))
}

fn positive(field: &str, v: Option<f64>, default: f64) -> Result<f64, CliError> {
    let v = v.unwrap_or(default);
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(bad(field, format!("must be finite and > 0, got {v}")))
    }
}

fn triple(field: &str, v: Option<Vec<f64>>) -> Result<Option<[f64; 3]>, CliError> {
    match v {
        None => Ok(None),
        Some(v) if v.len() == 3 && v.iter().all(|x| x.is_finite()) => Ok(Some([v[0], v[1], v[2]])),
        Some(v) => Err(bad(field, format!("expected 3 finite numbers, got {v:?}"))),
    }
}

fn need(field: &str, v: Option<f64>) -> Result<f64, CliError> {
    match v {
        Some(x) if x.is_finite() => Ok(x),
        Some(x) => Err(bad(field, format!("must be finite, got {x}"))),
        None => Err(bad(field, "is required for this surface")),
    }
}

impl RunConfig {
    pub fn from_settings(s: Settings) -> Result<Self, CliError> {
        let texture: Texture = s
            .texture
            .as_deref()
            .unwrap_or("splay-bend")
            .parse()
            .map_err(|e| bad("texture", e))?;
        let mu = positive("mu", s.mu, 1.0)?;
        let kappa = positive("kappa", s.kappa, 2.0)?;
        let alpha0 = positive("alpha0", s.alpha0, 1.0)?;
        let h0 = positive("h0", s.h0, 1.0)?;
        let params = MaterialParams::new(mu, kappa, alpha0, h0).map_err(|e| bad("params", e))?;
        let h = positive("h", s.h, 1e-2)?;
        let h_list = s.h_list.unwrap_or_else(|| DEFAULT_H_LIST.to_vec());
        if h_list.len() < 3 {
            return Err(bad("h_list", "needs at least 3 thicknesses"));
        }
        if h_list.iter().any(|v| !(v.is_finite() && *v > 0.0)) || h_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(bad("h_list", "thicknesses must be positive and strictly decreasing"));
        }
        let domain = match s.domain {
            None => Rect::unit_centred(),
            Some(d) if d.len() == 4 => Rect::new(d[0], d[1], d[2], d[3]).map_err(|e| bad("domain", e))?,
            Some(d) => return Err(bad("domain", format!("expected a1,b1,a2,b2, got {d:?}"))),
        };
        let grid = match s.grid.as_deref() {
            None => (33, 33),
            Some([a, b]) if *a >= 2 && *b >= 2 => (*a, *b),
            Some(g) => return Err(bad("grid", format!("expected n1,n2 with both >= 2, got {g:?}"))),
        };
        let format = match s.format.as_deref().unwrap_or("json") {
            "json" => Format::Json,
            "csv" => Format::Csv,
            other => return Err(bad("format", format!("expected json or csv, got `{other}`"))),
        };
        let quad_a = triple("quad_a", s.quad_a)?;
        let quad_b = triple("quad_b", s.quad_b)?;
        let quadratic = match (texture, quad_a) {
            (Texture::Quadratic, Some(a)) => Some(QuadraticStrainSpec::new(a, quad_b.unwrap_or([0.0; 3]))),
            (Texture::Quadratic, None) => return Err(bad("quad_a", "is required for the quadratic texture")),
            _ => None,
        };
        let surface = match s.surface.as_deref().unwrap_or("minimiser") {
            "minimiser" => SurfaceChoice::Minimiser { which: s.which.unwrap_or(0) },
            "plane" => SurfaceChoice::Plane,
            "cylinder-x1" => SurfaceChoice::CylinderX1 { k: need("k", s.k)? },
            "cylinder-x2" => SurfaceChoice::CylinderX2 { k: need("k", s.k)? },
            "rotated" => {
                let rho = need("rho", s.rho)?;
                if rho == 0.0 {
                    return Err(bad("rho", "must be nonzero"));
                }
                SurfaceChoice::Rotated { alpha: need("alpha", s.alpha)?, rho }
            }
            other => return Err(bad("surface", format!("unknown surface `{other}`"))),
        };
        let sweep = match s.sweep.as_deref() {
            None => None,
            Some("cylinder") => Some(SweepKind::Cylinder),
            Some("family") => Some(SweepKind::Family),
            Some("director") => Some(SweepKind::Director),
            Some(other) => return Err(bad("sweep", format!("expected cylinder, family or director, got `{other}`"))),
        };
        let k_range = match s.k_range.as_deref() {
            None => None,
            Some([a, b]) if a.is_finite() && b.is_finite() && a < b => Some((*a, *b)),
            Some(r) => return Err(bad("k_range", format!("expected kmin,kmax with kmin < kmax, got {r:?}"))),
        };
        let samples = s.samples.unwrap_or(201);
        if samples < 2 {
            return Err(bad("samples", "must be at least 2"));
        }
        let quadrature = match s.quad.as_deref() {
            None => QuadratureSpec::default(),
            Some([p, t]) if *p >= 1 && *t >= 2 => QuadratureSpec { n_plane: *p, n_thick: *t },
            Some(q) => return Err(bad("quad", format!("expected n_plane,n_thick with n_plane >= 1, n_thick >= 2, got {q:?}"))),
        };
        Ok(RunConfig {
            texture,
            params,
            h,
            h_list,
            domain,
            grid,
            out: s.out,
            format,
            seed: s.seed.unwrap_or(0),
            quadratic,
            surface,
            sweep,
            k_range,
            samples,
            quadrature,
            skip_gamma: s.skip_gamma,
        })
    }
}

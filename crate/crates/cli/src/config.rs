//! Run configuration: partial settings from flags or a key=value file,
//! merged with case defaults into a fully resolved run description.
//!
//! Precedence is flags > config file > case defaults; a `None` field means
//! "not set here, fall through".

use crate::error::CliError;
use std::path::{Path, PathBuf};
use swe_core::cases::{case_by_id, CaseSetup, TestCase};
use swe_core::solver1d::{FluxScheme, SchemeOrder};

/// Partial run settings; every field is optional so layers can be merged.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub case: Option<String>,
    pub order: Option<u32>,
    pub flux: Option<FluxScheme>,
    pub cfl: Option<f64>,
    pub g: Option<f64>,
    /// 1D resolution (number of cells).
    pub m: Option<usize>,
    /// 2D structured resolution (rectangles per side; two triangles each).
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    /// 2D mesh file, overriding nx/ny.
    pub mesh: Option<PathBuf>,
    pub output_times: Option<Vec<f64>>,
    pub out_dir: Option<PathBuf>,
    pub formats: Option<Vec<OutputFormat>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Vtk,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Vtk => "vtk",
        }
    }
}

pub fn parse_format(s: &str) -> Result<OutputFormat, CliError> {
    match s.trim() {
        "csv" => Ok(OutputFormat::Csv),
        "vtk" => Ok(OutputFormat::Vtk),
        other => Err(CliError::Usage(format!(
            "unknown output format '{other}' (expected csv or vtk)"
        ))),
    }
}

pub fn parse_flux(s: &str) -> Result<FluxScheme, CliError> {
    match s.trim() {
        "fvs-2r" => Ok(FluxScheme::FvsTwoRarefaction),
        "fvs-exact" => Ok(FluxScheme::FvsExact),
        "godunov-exact" => Ok(FluxScheme::GodunovExact),
        other => Err(CliError::Usage(format!(
            "unknown flux scheme '{other}' (expected fvs-2r, fvs-exact, or godunov-exact)"
        ))),
    }
}

pub fn flux_name(flux: FluxScheme) -> &'static str {
    match flux {
        FluxScheme::FvsTwoRarefaction => "fvs-2r",
        FluxScheme::FvsExact => "fvs-exact",
        FluxScheme::GodunovExact => "godunov-exact",
    }
}

impl RunConfig {
    /// Overlays `self` on top of `base`: set fields win, unset fall through.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            case: self.case.or(base.case),
            order: self.order.or(base.order),
            flux: self.flux.or(base.flux),
            cfl: self.cfl.or(base.cfl),
            g: self.g.or(base.g),
            m: self.m.or(base.m),
            nx: self.nx.or(base.nx),
            ny: self.ny.or(base.ny),
            mesh: self.mesh.or(base.mesh),
            output_times: self.output_times.or(base.output_times),
            out_dir: self.out_dir.or(base.out_dir),
            formats: self.formats.or(base.formats),
        }
    }
}

fn parse_number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("key '{key}': cannot parse '{value}'")))
}

pub fn parse_time_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    let times: Vec<f64> = value
        .split(',')
        .map(|t| parse_number(key, t.trim()))
        .collect::<Result<_, _>>()?;
    if times.is_empty() || !times.windows(2).all(|w| w[0] < w[1]) {
        return Err(CliError::Usage(format!(
            "key '{key}': output times must be a nonempty increasing list, got '{value}'"
        )));
    }
    if !times.iter().all(|t| t.is_finite() && *t > 0.0) {
        return Err(CliError::Usage(format!(
            "key '{key}': output times must be positive and finite, got '{value}'"
        )));
    }
    Ok(times)
}

pub fn parse_format_list(key: &str, value: &str) -> Result<Vec<OutputFormat>, CliError> {
    let formats: Vec<OutputFormat> = value
        .split(',')
        .map(parse_format)
        .collect::<Result<_, _>>()?;
    if formats.is_empty() {
        return Err(CliError::Usage(format!("key '{key}': empty format list")));
    }
    Ok(formats)
}

/// Parses a flat `key = value` config file; `#` starts a comment. Unknown
/// keys are rejected so typos surface instead of silently falling through.
pub fn parse_config_text(text: &str) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key = value", lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "case" => cfg.case = Some(value.to_string()),
            "order" => cfg.order = Some(parse_number(key, value)?),
            "flux" => cfg.flux = Some(parse_flux(value)?),
            "cfl" => cfg.cfl = Some(parse_number(key, value)?),
            "g" => cfg.g = Some(parse_number(key, value)?),
            "m" => cfg.m = Some(parse_number(key, value)?),
            "nx" => cfg.nx = Some(parse_number(key, value)?),
            "ny" => cfg.ny = Some(parse_number(key, value)?),
            "mesh" => cfg.mesh = Some(PathBuf::from(value)),
            "output_times" => cfg.output_times = Some(parse_time_list(key, value)?),
            "out_dir" => cfg.out_dir = Some(PathBuf::from(value)),
            "formats" => cfg.formats = Some(parse_format_list(key, value)?),
            other => {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key '{other}'",
                    lineno + 1
                )))
            }
        }
    }
    Ok(cfg)
}

pub fn load_config_file(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// How the spatial resolution was requested.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolution {
    Cells1D(usize),
    Grid2D { nx: usize, ny: usize },
    MeshFile(PathBuf),
}

/// Fully resolved run: the case plus every effective numeric setting.
pub struct ResolvedConfig {
    pub case: TestCase,
    pub order: SchemeOrder,
    pub flux: FluxScheme,
    pub cfl: f64,
    pub g: f64,
    pub resolution: Resolution,
    pub output_times: Vec<f64>,
    pub out_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
}

/// Applies case defaults under the merged settings and validates the result.
pub fn resolve(cfg: &RunConfig) -> Result<ResolvedConfig, CliError> {
    let id = cfg
        .case
        .as_deref()
        .ok_or_else(|| CliError::Usage("no case selected (set --case or case=...)".into()))?;
    let case = case_by_id(id)?;

    let order = match cfg.order.unwrap_or(2) {
        1 => SchemeOrder::First,
        2 => SchemeOrder::Second,
        other => {
            return Err(CliError::Usage(format!(
                "order must be 1 or 2, got {other}"
            )))
        }
    };
    let flux = cfg.flux.unwrap_or(FluxScheme::FvsTwoRarefaction);
    let cfl = cfg.cfl.unwrap_or(case.cfl);
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(CliError::Usage(format!("cfl must lie in (0, 1], got {cfl}")));
    }
    let g = cfg.g.unwrap_or(case.g);
    if !(g.is_finite() && g > 0.0) {
        return Err(CliError::Usage(format!("g must be positive, got {g}")));
    }

    let resolution = match (&case.setup, cfg.m, cfg.nx, cfg.ny, &cfg.mesh) {
        (CaseSetup::OneD(_), _, Some(_), _, _) | (CaseSetup::OneD(_), _, _, Some(_), _) => {
            return Err(CliError::Usage(
                "nx/ny apply to 2D cases; use --m for 1D resolution".into(),
            ))
        }
        (CaseSetup::OneD(_), _, _, _, Some(_)) => {
            return Err(CliError::Usage("mesh files apply to 2D cases only".into()))
        }
        (CaseSetup::OneD(c), m, _, _, _) => Resolution::Cells1D(m.unwrap_or(c.default_m)),
        (CaseSetup::TwoD(_), Some(_), _, _, _) => {
            return Err(CliError::Usage(
                "--m applies to 1D cases; use --nx/--ny or --mesh for 2D".into(),
            ))
        }
        (CaseSetup::TwoD(_), _, nx, ny, Some(path)) => {
            if nx.is_some() || ny.is_some() {
                return Err(CliError::Usage(
                    "--mesh and --nx/--ny are mutually exclusive".into(),
                ));
            }
            Resolution::MeshFile(path.clone())
        }
        (CaseSetup::TwoD(c), _, nx, ny, None) => {
            let nx = nx.unwrap_or(c.default_nx);
            Resolution::Grid2D {
                nx,
                // A square-count default keeps cells near-isotropic when
                // only one side is given.
                ny: ny.unwrap_or_else(|| {
                    if nx == c.default_nx {
                        c.default_ny
                    } else {
                        ((nx as f64 * c.ly / c.lx).round() as usize).max(2)
                    }
                }),
            }
        }
    };
    match &resolution {
        Resolution::Cells1D(m) if *m < 2 => {
            return Err(CliError::Usage(format!("resolution must be >= 2, got m = {m}")))
        }
        Resolution::Grid2D { nx, ny } if *nx < 2 || *ny < 2 => {
            return Err(CliError::Usage(format!(
                "resolution must be >= 2 per side, got {nx} x {ny}"
            )))
        }
        _ => {}
    }

    let output_times = match &cfg.output_times {
        Some(times) => {
            if !times.windows(2).all(|w| w[0] < w[1])
                || !times.iter().all(|t| t.is_finite() && *t > 0.0)
            {
                return Err(CliError::Usage(
                    "output times must be a positive increasing list".into(),
                ));
            }
            times.clone()
        }
        None => case.output_times.clone(),
    };

    let formats = match &cfg.formats {
        Some(f) => f.clone(),
        // CSV is always useful; VTK only makes sense for meshes.
        None => match case.setup {
            CaseSetup::OneD(_) => vec![OutputFormat::Csv],
            CaseSetup::TwoD(_) => vec![OutputFormat::Csv, OutputFormat::Vtk],
        },
    };
    if matches!(case.setup, CaseSetup::OneD(_)) && formats.contains(&OutputFormat::Vtk) {
        return Err(CliError::Usage("vtk output applies to 2D cases only".into()));
    }

    Ok(ResolvedConfig {
        case,
        order,
        flux,
        cfl,
        g,
        resolution,
        output_times,
        out_dir: cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("out")),
        formats,
    })
}

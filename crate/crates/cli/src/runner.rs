//! Drives a resolved configuration to its output times and collects
//! snapshots, then renders them to the requested formats plus a manifest.

use crate::config::{flux_name, OutputFormat, Resolution, ResolvedConfig};
use crate::error::CliError;
use crate::output;
use std::path::PathBuf;
use std::time::Instant;
use swe_core::cases::{init_state_1d, init_state_2d, Case2D, CaseSetup, Reference};
use swe_core::mesh::{generate_rect_mesh, load_mesh, TriMesh};
use swe_core::solver1d::{run_until, RunState1D};
use swe_core::solver2d::{run_until_2d, Bathymetry2D, Hooks2D, RunState2D};

/// Step budget per output segment; generous, but turns a hung run into an
/// error instead of a stuck process.
const MAX_STEPS: u64 = 200_000_000;

#[derive(Clone, Debug)]
pub struct Snapshot1D {
    pub time: f64,
    pub x: Vec<f64>,
    pub b: Vec<f64>,
    pub h: Vec<f64>,
    pub u: Vec<f64>,
    /// Discharge h u.
    pub q: Vec<f64>,
    pub psi: Vec<f64>,
    /// Free surface h + b.
    pub eta: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Snapshot2D {
    pub time: f64,
    pub h: Vec<f64>,
    pub qx: Vec<f64>,
    pub qy: Vec<f64>,
    pub eta: Vec<f64>,
}

pub enum SnapshotData {
    OneD(Snapshot1D),
    TwoD(Snapshot2D),
}

impl SnapshotData {
    pub fn time(&self) -> f64 {
        match self {
            SnapshotData::OneD(s) => s.time,
            SnapshotData::TwoD(s) => s.time,
        }
    }
}

/// Everything a run produced: snapshots (the first is the initial state),
/// geometry for the writers, and bookkeeping for the manifest.
pub struct RunOutcome {
    pub case_id: String,
    pub dimension: u32,
    pub snapshots: Vec<SnapshotData>,
    /// Mesh and cell bed elevations; 2D runs only.
    pub mesh: Option<TriMesh>,
    pub bed: Option<Vec<f64>>,
    pub steps: u64,
    pub wall_seconds: f64,
    pub mass_initial: f64,
    pub mass_final: f64,
}

fn snapshot_1d(state: &RunState1D, bed: &[f64]) -> Snapshot1D {
    let m = state.grid.m;
    let mut s = Snapshot1D {
        time: state.time,
        x: Vec::with_capacity(m),
        b: Vec::with_capacity(m),
        h: Vec::with_capacity(m),
        u: Vec::with_capacity(m),
        q: Vec::with_capacity(m),
        psi: Vec::with_capacity(m),
        eta: Vec::with_capacity(m),
    };
    for (i, cell) in state.interior().iter().enumerate() {
        let prim = cell.primitive();
        s.x.push(state.grid.cell_center(i));
        s.b.push(bed[i]);
        s.h.push(cell.h);
        s.u.push(prim.u);
        s.q.push(cell.hu);
        s.psi.push(prim.psi);
        s.eta.push(cell.h + bed[i]);
    }
    s
}

fn snapshot_2d(state: &RunState2D, bed: &[f64]) -> Snapshot2D {
    let n = bed.len();
    let mut s = Snapshot2D {
        time: state.time,
        h: Vec::with_capacity(n),
        qx: Vec::with_capacity(n),
        qy: Vec::with_capacity(n),
        eta: Vec::with_capacity(n),
    };
    for i in 0..n {
        let q = state.cells[i];
        s.h.push(q.h);
        s.qx.push(q.qx);
        s.qy.push(q.qy);
        s.eta.push(q.h + bed[i]);
    }
    s
}

/// Builds the mesh a 2D case runs on.
pub fn build_mesh(case: &Case2D, resolution: &Resolution) -> Result<TriMesh, CliError> {
    match resolution {
        Resolution::Grid2D { nx, ny } => {
            Ok(generate_rect_mesh(*nx, *ny, case.lx, case.ly, case.origin)?)
        }
        Resolution::MeshFile(path) => Ok(load_mesh(path)?),
        Resolution::Cells1D(_) => Err(CliError::Usage(
            "1D resolution given for a 2D case".into(),
        )),
    }
}

/// Per-cell hooks of a case, borrowed for the solver.
pub fn case_hooks(case: &Case2D) -> Hooks2D<'_> {
    Hooks2D {
        forcing: case.forcing.as_ref().map(|f| f.as_ref() as _),
        boundary: case.boundary_values.as_ref().map(|f| f.as_ref() as _),
    }
}

/// Runs the case to every output time and snapshots the state at t = 0 and
/// after each one.
pub fn run(resolved: &ResolvedConfig) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    match &resolved.case.setup {
        CaseSetup::OneD(case) => {
            let m = match resolved.resolution {
                Resolution::Cells1D(m) => m,
                _ => return Err(CliError::Usage("2D resolution given for a 1D case".into())),
            };
            let (mut state, bath) = init_state_1d(case, m)?;
            let mass_initial = state.total_mass();
            let mut snapshots = vec![SnapshotData::OneD(snapshot_1d(&state, &bath.cell))];
            for &t in &resolved.output_times {
                run_until(
                    &mut state,
                    &bath,
                    resolved.order,
                    resolved.flux,
                    resolved.g,
                    resolved.cfl,
                    t,
                    MAX_STEPS,
                )?;
                snapshots.push(SnapshotData::OneD(snapshot_1d(&state, &bath.cell)));
            }
            Ok(RunOutcome {
                case_id: resolved.case.id.to_string(),
                dimension: 1,
                snapshots,
                mesh: None,
                bed: None,
                steps: state.step,
                wall_seconds: start.elapsed().as_secs_f64(),
                mass_initial,
                mass_final: state.total_mass(),
            })
        }
        CaseSetup::TwoD(case) => {
            let mesh = build_mesh(case, &resolved.resolution)?;
            let (mut state, bath) = init_state_2d(case, &mesh)?;
            let mass_initial = state.total_mass(&mesh);
            let mut snapshots = vec![SnapshotData::TwoD(snapshot_2d(&state, &bath.cell))];
            for &t in &resolved.output_times {
                run_until_2d(
                    &mut state,
                    &mesh,
                    &bath,
                    resolved.order,
                    resolved.flux,
                    resolved.g,
                    resolved.cfl,
                    t,
                    MAX_STEPS,
                    case_hooks(case),
                )?;
                snapshots.push(SnapshotData::TwoD(snapshot_2d(&state, &bath.cell)));
            }
            let mass_final = state.total_mass(&mesh);
            Ok(RunOutcome {
                case_id: resolved.case.id.to_string(),
                dimension: 2,
                snapshots,
                mesh: Some(mesh),
                bed: Some(bath.cell),
                steps: state.step,
                wall_seconds: start.elapsed().as_secs_f64(),
                mass_initial,
                mass_final,
            })
        }
    }
}

/// Bathymetry of a resolved 2D run; used by scorers that need edge data.
pub fn bathymetry_of(case: &Case2D, mesh: &TriMesh) -> Bathymetry2D {
    Bathymetry2D::from_fn(mesh, |x, y| (case.bed)(x, y))
}

/// Writes every requested format for every snapshot plus the manifest;
/// returns the written paths (manifest last).
pub fn write_outputs(
    resolved: &ResolvedConfig,
    outcome: &RunOutcome,
) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(&resolved.out_dir)?;
    let mut files = Vec::new();
    let mut manifest = String::new();


    output::manifest_line(&mut manifest, "case", &outcome.case_id);
    output::manifest_line(&mut manifest, "dimension", outcome.dimension);
    output::manifest_line(
        &mut manifest,
        "order",
        match resolved.order {
            swe_core::solver1d::SchemeOrder::First => 1,
            swe_core::solver1d::SchemeOrder::Second => 2,
        },
    );
    output::manifest_line(&mut manifest, "flux", flux_name(resolved.flux));
    output::manifest_line(&mut manifest, "cfl", output::fmt_f64(resolved.cfl));
    output::manifest_line(&mut manifest, "g", output::fmt_f64(resolved.g));
    match &resolved.resolution {
        Resolution::Cells1D(m) => output::manifest_line(&mut manifest, "m", m),
        Resolution::Grid2D { nx, ny } => {
            output::manifest_line(&mut manifest, "nx", nx);
            output::manifest_line(&mut manifest, "ny", ny);
        }
        Resolution::MeshFile(path) => output::manifest_line(&mut manifest, "mesh", path.display()),
    }
    if let Some(mesh) = &outcome.mesh {
        output::manifest_line(&mut manifest, "cells", mesh.n_cells());
    }
    output::manifest_line(
        &mut manifest,
        "output_times",
        resolved
            .output_times
            .iter()
            .map(|t| output::fmt_f64(*t))
            .collect::<Vec<_>>()
            .join(","),
    );
    output::manifest_line(
        &mut manifest,
        "formats",
        resolved
            .formats
            .iter()
            .map(|f| f.name())
            .collect::<Vec<_>>()
            .join(","),
    );
    output::manifest_line(&mut manifest, "steps", outcome.steps);
    output::manifest_line(&mut manifest, "wall_seconds", outcome.wall_seconds);
    output::manifest_line(&mut manifest, "mass_initial", output::fmt_f64(outcome.mass_initial));
    output::manifest_line(&mut manifest, "mass_final", output::fmt_f64(outcome.mass_final));
    output::manifest_line(&mut manifest, "snapshots", outcome.snapshots.len());

    let mut file_index = 0usize;
    for (k, snap) in outcome.snapshots.iter().enumerate() {
        for format in &resolved.formats {
            let name = format!("{}_{:03}.{}", outcome.case_id, k, format.name());
            let path = resolved.out_dir.join(&name);
            let text = match (snap, format) {
                (SnapshotData::OneD(s), OutputFormat::Csv) => output::csv_1d(s),
                (SnapshotData::TwoD(s), OutputFormat::Csv) => {
                    let mesh = outcome.mesh.as_ref().expect("2D outcome keeps its mesh");
                    let bed = outcome.bed.as_ref().expect("2D outcome keeps its bed");
                    output::csv_2d(mesh, bed, s)
                }
                (SnapshotData::TwoD(s), OutputFormat::Vtk) => {
                    let mesh = outcome.mesh.as_ref().expect("2D outcome keeps its mesh");
                    let bed = outcome.bed.as_ref().expect("2D outcome keeps its bed");
                    vtk_title(&outcome.case_id, s.time, mesh, bed, s)
                }
                (SnapshotData::OneD(_), OutputFormat::Vtk) => {
                    return Err(CliError::Usage("vtk output applies to 2D cases only".into()))
                }
            };
            std::fs::write(&path, text)?;
            output::manifest_line(&mut manifest, &format!("file.{file_index}"), &name);
            output::manifest_line(
                &mut manifest,
                &format!("file.{file_index}.time"),
                output::fmt_f64(snap.time()),
            );
            files.push(path);
            file_index += 1;
        }
    }

    let manifest_path = resolved.out_dir.join("manifest.txt");
    std::fs::write(&manifest_path, manifest)?;
    files.push(manifest_path);
    Ok(files)
}

fn vtk_title(
    case_id: &str,
    time: f64,
    mesh: &TriMesh,
    bed: &[f64],
    snap: &Snapshot2D,
) -> String {
    output::vtk_2d(mesh, bed, snap, &format!("{case_id} t={time}"))
}

/// Largest surface deviation from the reference level in the final
/// snapshot; the lake-at-rest diagnostic.
pub fn lake_deviation(outcome: &RunOutcome, h0: f64) -> f64 {
    let last = outcome.snapshots.last().expect("runs snapshot at least t=0");
    let eta: &[f64] = match last {
        SnapshotData::OneD(s) => &s.eta,
        SnapshotData::TwoD(s) => &s.eta,
    };
    eta.iter().map(|e| (e - h0).abs()).fold(0.0, f64::max)
}

/// One-line run summary, plus reference-specific diagnostics.
pub fn summarize(resolved: &ResolvedConfig, outcome: &RunOutcome) -> String {
    let last_t = outcome.snapshots.last().map_or(0.0, |s| s.time());
    let mut text = format!(
        "{}: {} steps to t = {}, wall {:.3} s, relative mass drift {:.3e}",
        outcome.case_id,
        outcome.steps,
        last_t,
        outcome.wall_seconds,
        ((outcome.mass_final - outcome.mass_initial) / outcome.mass_initial).abs(),
    );
    if let Reference::LakeAtRest { h0 } = resolved.case.reference {
        text.push_str(&format!(
            "\nmax |H - H0| = {:.3e}",
            lake_deviation(outcome, h0)
        ));
    }
    text
}

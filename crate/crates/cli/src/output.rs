//! Solution writers: CSV snapshots, legacy-ASCII VTK unstructured grids,
//! and the run manifest.
//!
//! Every float is printed with 17 significant digits so files round-trip
//! to the exact f64 bit pattern; repeated runs of the same configuration
//! produce byte-identical CSV and VTK output regardless of thread count.

use crate::runner::{Snapshot1D, Snapshot2D};
use std::fmt::Write as _;
use swe_core::mesh::TriMesh;

/// Shortest-field full-precision float: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// 1D snapshot as CSV with columns x, b, h, u, q, psi, H.
pub fn csv_1d(snap: &Snapshot1D) -> String {
    let mut out = String::from("x,b,h,u,q,psi,H\n");
    for i in 0..snap.x.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(snap.x[i]),
            fmt_f64(snap.b[i]),
            fmt_f64(snap.h[i]),
            fmt_f64(snap.u[i]),
            fmt_f64(snap.q[i]),
            fmt_f64(snap.psi[i]),
            fmt_f64(snap.eta[i]),
        );
    }
    out
}

/// 2D snapshot as CSV with columns x, y, b, h, qx, qy, H over cell
/// centroids, in mesh cell order.
pub fn csv_2d(mesh: &TriMesh, bed: &[f64], snap: &Snapshot2D) -> String {
    let mut out = String::from("x,y,b,h,qx,qy,H\n");
    for i in 0..mesh.n_cells() {
        let [x, y] = mesh.centroids[i];
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(x),
            fmt_f64(y),
            fmt_f64(bed[i]),
            fmt_f64(snap.h[i]),
            fmt_f64(snap.qx[i]),
            fmt_f64(snap.qy[i]),
            fmt_f64(snap.eta[i]),
        );
    }
    out
}

/// 2D snapshot as a legacy-ASCII VTK unstructured grid with the fields
/// h, qx, qy, H, and b attached as CELL_DATA.
pub fn vtk_2d(mesh: &TriMesh, bed: &[f64], snap: &Snapshot2D, title: &str) -> String {
    let n_cells = mesh.n_cells();
    let mut out = String::new();
    let _ = writeln!(out, "# vtk DataFile Version 3.0");
    // The title line is free text but must stay on one line.
    let _ = writeln!(out, "{}", title.replace('\n', " "));
    let _ = writeln!(out, "ASCII");
    let _ = writeln!(out, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(out, "POINTS {} double", mesh.n_nodes());
    for p in &mesh.nodes {
        let _ = writeln!(out, "{} {} 0", fmt_f64(p[0]), fmt_f64(p[1]));
    }
    let _ = writeln!(out, "CELLS {} {}", n_cells, 4 * n_cells);
    for t in &mesh.tris {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(out, "CELL_TYPES {n_cells}");
    for _ in 0..n_cells {
        // 5 is VTK_TRIANGLE.
        let _ = writeln!(out, "5");
    }
    let _ = writeln!(out, "CELL_DATA {n_cells}");
    let mut scalar = |name: &str, values: &[f64]| {
        let _ = writeln!(out, "SCALARS {name} double 1");
        let _ = writeln!(out, "LOOKUP_TABLE default");
        for &v in values {
            let _ = writeln!(out, "{}", fmt_f64(v));
        }
    };
    scalar("h", &snap.h);
    scalar("qx", &snap.qx);
    scalar("qy", &snap.qy);
    scalar("H", &snap.eta);
    scalar("b", bed);
    out
}

/// One manifest line; values are written verbatim.
pub fn manifest_line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key}={value}");
}

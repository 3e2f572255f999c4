//! Unstructured triangular meshes: geometry, connectivity, structured
//! generation for rectangles, validation, and a minimal ASCII file format.
//!
//! A mesh stores counterclockwise triangles with precomputed areas,
//! centroids, and three outward edges per cell. Interior edges are
//! represented twice (once per adjacent cell, with opposite normals); the
//! derived canonical edge list visits each geometric edge exactly once so a
//! flux loop can scatter one computed flux with opposite signs, which makes
//! discrete conservation structural.
//!
//! File format: first data line "NNODES NTRIS", then NNODES lines "x y",
//! then NTRIS lines "i0 i1 i2" with 0-based node indices. Tokens are
//! whitespace-separated and '#' starts a comment. Clockwise triangles are
//! reoriented on load with a warning.

use std::fmt::Write as _;
use std::ops::{Index, IndexMut};
use std::path::Path;

use crate::state::UnitNormal;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("invalid mesh dimensions: {reason}")]
    InvalidDimensions { reason: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("triangle {tri} references node {node}, but the mesh has {nnodes} nodes")]
    NodeOutOfRange {
        tri: usize,
        node: usize,
        nnodes: usize,
    },
    #[error("edge {a}-{b} is shared by more than two triangles")]
    NonManifoldEdge { a: usize, b: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One side of a triangle, oriented outward from its owning cell.
#[derive(Clone, Copy, Debug)]
pub struct Edge {
    /// Adjacent cell across the edge; None on the domain boundary.
    pub neighbor: Option<usize>,
    /// Edge length l_ij.
    pub length: f64,
    /// Unit normal pointing out of the owning cell.
    pub normal: UnitNormal,
    /// Endpoint node indices in the owner's counterclockwise order.
    pub nodes: (usize, usize),
}

/// Triangulation with per-cell geometry and edge connectivity.
#[derive(Clone, Debug)]
pub struct TriMesh {
    pub nodes: Vec<[f64; 2]>,
    /// Node indices per triangle, counterclockwise.
    pub tris: Vec<[usize; 3]>,
    /// Signed areas as built; positive for counterclockwise triangles.
    pub areas: Vec<f64>,
    pub centroids: Vec<[f64; 2]>,
    /// Edge k of cell i runs from node tris[i][k] to tris[i][(k+1)%3].
    pub edges: Vec<[Edge; 3]>,
}

impl TriMesh {
    /// Assembles geometry and connectivity from raw nodes and triangles.
    /// Orientation and degeneracy are not corrected here; validate_mesh
    /// reports them. Out-of-range node references and edges shared by more
    /// than two triangles are structural and fail construction.
    pub fn build(nodes: Vec<[f64; 2]>, tris: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        for (t, tri) in tris.iter().enumerate() {
            for &v in tri {
                if v >= nodes.len() {
                    return Err(MeshError::NodeOutOfRange {
                        tri: t,
                        node: v,
                        nnodes: nodes.len(),
                    });
                }
            }
        }

        let mut areas = Vec::with_capacity(tris.len());
        let mut centroids = Vec::with_capacity(tris.len());
        for tri in &tris {
            let [a, b, c] = [nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]];
            areas.push(signed_area(a, b, c));
            centroids.push([
                (a[0] + b[0] + c[0]) / 3.0,
                (a[1] + b[1] + c[1]) / 3.0,
            ]);
        }

        // Pair edge slots through their undirected endpoint key.
        let mut incidence: std::collections::HashMap<(usize, usize), Vec<(usize, usize)>> =
            std::collections::HashMap::new();
        for (t, tri) in tris.iter().enumerate() {
            for k in 0..3 {
                let (n0, n1) = (tri[k], tri[(k + 1) % 3]);
                let key = (n0.min(n1), n0.max(n1));
                let slots = incidence.entry(key).or_default();
                if slots.len() == 2 {
                    return Err(MeshError::NonManifoldEdge { a: key.0, b: key.1 });
                }
                slots.push((t, k));
            }
        }

        let mut edges = Vec::with_capacity(tris.len());
        for (t, tri) in tris.iter().enumerate() {
            let mut cell_edges = [Edge {
                neighbor: None,
                length: 0.0,
                normal: UnitNormal::new(1.0, 0.0),
                nodes: (0, 0),
            }; 3];
            for (k, e) in cell_edges.iter_mut().enumerate() {
                let (n0, n1) = (tri[k], tri[(k + 1) % 3]);
                let (p0, p1) = (nodes[n0], nodes[n1]);
                let (ex, ey) = (p1[0] - p0[0], p1[1] - p0[1]);
                let length = ex.hypot(ey);
                // Outward normal of a counterclockwise polygon is the edge
                // vector rotated clockwise by 90 degrees.
                let normal = if length > 0.0 {
                    UnitNormal::from_vector(ey, -ex)
                } else {
                    UnitNormal::new(1.0, 0.0)
                };
                let key = (n0.min(n1), n0.max(n1));
                let neighbor = incidence[&key]
                    .iter()
                    .find(|&&(tn, _)| tn != t)
                    .map(|&(tn, _)| tn);
                *e = Edge {
                    neighbor,
                    length,
                    normal,
                    nodes: (n0, n1),
                };
            }
            edges.push(cell_edges);
        }

        Ok(Self {
            nodes,
            tris,
            areas,
            centroids,
            edges,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.tris.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Characteristic cell length |Omega_i| / perimeter, the radius entering
    /// the CFL condition on triangles.
    pub fn char_length(&self, i: usize) -> f64 {
        let perimeter: f64 = self.edges[i].iter().map(|e| e.length).sum();
        self.areas[i] / perimeter
    }
}

/// One value per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellField<T> {
    pub values: Vec<T>,
}

impl<T> CellField<T> {
    pub fn from_fn(mesh: &TriMesh, f: impl Fn(f64, f64) -> T) -> Self {
        Self {
            values: mesh.centroids.iter().map(|c| f(c[0], c[1])).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.values.iter()
    }
}

impl<T: Clone> CellField<T> {
    pub fn constant(mesh: &TriMesh, value: T) -> Self {
        Self {
            values: vec![value; mesh.n_cells()],
        }
    }
}

impl<T> Index<usize> for CellField<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.values[i]
    }
}

impl<T> IndexMut<usize> for CellField<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.values[i]
    }
}

/// One geometric edge of the mesh, owned by cell `left`. Interior edges
/// carry the cell on the other side; the normal points from left to right.
#[derive(Clone, Copy, Debug)]
pub struct CanonicalEdge {
    pub left: usize,
    /// Slot of this edge in the left cell's edge array.
    pub left_side: usize,
    pub right: Option<usize>,
    /// Slot of this edge in the right cell's edge array, when interior.
    pub right_side: Option<usize>,
    pub length: f64,
    pub normal: UnitNormal,
}

/// Lists every geometric edge exactly once, in a deterministic order:
/// cells in index order, slots in local order, interior edges owned by the
/// lower-indexed cell.
pub fn canonical_edges(mesh: &TriMesh) -> Vec<CanonicalEdge> {
    let mut out = Vec::new();
    for (t, cell_edges) in mesh.edges.iter().enumerate() {
        for (k, e) in cell_edges.iter().enumerate() {
            if let Some(nb) = e.neighbor {
                if nb < t {
                    continue;
                }
            }
            let right_side = e.neighbor.map(|nb| {
                let (a, b) = e.nodes;
                mesh.edges[nb]
                    .iter()
                    .position(|back| back.nodes == (b, a))
                    .expect("interior edge must appear reversed in the neighbor")
            });
            out.push(CanonicalEdge {
                left: t,
                left_side: k,
                right: e.neighbor,
                right_side,
                length: e.length,
                normal: e.normal,
            });
        }
    }
    out
}

/// Structured triangulation of a rectangle: each of the nx x ny squares is
/// split along its bottom-left to top-right diagonal.
pub fn generate_rect_mesh(
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    origin: [f64; 2],
) -> Result<TriMesh, MeshError> {
    if nx == 0 || ny == 0 {
        return Err(MeshError::InvalidDimensions {
            reason: format!("need nx, ny >= 1, got {nx} x {ny}"),
        });
    }
    if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
        return Err(MeshError::InvalidDimensions {
            reason: format!("need finite positive side lengths, got {lx} x {ly}"),
        });
    }
    let (dx, dy) = (lx / nx as f64, ly / ny as f64);
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([origin[0] + i as f64 * dx, origin[1] + j as f64 * dy]);
        }
    }
    let node_id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut tris = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b) = (node_id(i, j), node_id(i + 1, j));
            let (c, d) = (node_id(i + 1, j + 1), node_id(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    TriMesh::build(nodes, tris)
}

/// Checks every mesh invariant and returns the list of violations; an empty
/// list means the mesh is valid.
pub fn validate_mesh(mesh: &TriMesh) -> Vec<String> {
    let mut problems = Vec::new();
    for (i, p) in mesh.nodes.iter().enumerate() {
        if !(p[0].is_finite() && p[1].is_finite()) {
            problems.push(format!("node {i} has non-finite coordinates ({}, {})", p[0], p[1]));
        }
    }
    for (t, &area) in mesh.areas.iter().enumerate() {
        if !(area > 0.0) {
            problems.push(format!("cell {t} has non-positive area {area}"));
        }
    }
    for (t, cell_edges) in mesh.edges.iter().enumerate() {
        // Closed-polygon identity: the outward length-weighted normals of a
        // cell sum to zero.
        let (mut sx, mut sy) = (0.0, 0.0);
        let mut perimeter = 0.0;
        for e in cell_edges {
            sx += e.length * e.normal.nx;
            sy += e.length * e.normal.ny;
            perimeter += e.length;
        }
        let tol = 1e-12 * perimeter.max(1.0);
        if sx.abs() > tol || sy.abs() > tol {
            problems.push(format!(
                "cell {t} edge normals do not close: sum l*n = ({sx:e}, {sy:e})"
            ));
        }

        for (k, e) in cell_edges.iter().enumerate() {
            let Some(nb) = e.neighbor else { continue };
            let Some(back) = mesh.edges[nb].iter().find(|be| be.neighbor == Some(t)) else {
                problems.push(format!(
                    "cell {t} edge {k} lists neighbor {nb}, which does not list {t} back"
                ));
                continue;
            };
            if (back.length - e.length).abs() > 1e-14 * e.length.max(1.0) {
                problems.push(format!(
                    "edge between cells {t} and {nb} has mismatched lengths {} vs {}",
                    e.length, back.length
                ));
            }
            if (back.normal.nx + e.normal.nx).abs() > 1e-14
                || (back.normal.ny + e.normal.ny).abs() > 1e-14
            {
                problems.push(format!(
                    "edge between cells {t} and {nb} has non-opposite normals \
                     ({}, {}) vs ({}, {})",
                    e.normal.nx, e.normal.ny, back.normal.nx, back.normal.ny
                ));
            }
        }
    }
    problems
}

/// Writes the mesh in the ASCII node/element format. Coordinates use the
/// shortest representation that parses back to the identical float.
pub fn save_mesh(mesh: &TriMesh, path: &Path) -> Result<(), MeshError> {
    let mut out = String::new();
    let _ = writeln!(out, "# triangular mesh: nodes then elements");
    let _ = writeln!(out, "{} {}", mesh.n_nodes(), mesh.n_cells());
    for p in &mesh.nodes {
        let _ = writeln!(out, "{} {}", p[0], p[1]);
    }
    for t in &mesh.tris {
        let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads the ASCII node/element format; parse failures name the offending
/// line. Clockwise triangles are reoriented with a warning.
pub fn load_mesh(path: &Path) -> Result<TriMesh, MeshError> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text)
}

fn parse_mesh(text: &str) -> Result<TriMesh, MeshError> {
    // Data lines with their 1-based line numbers, comments stripped.
    let mut data = text
        .lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let body = line.split('#').next().unwrap_or("").trim();
            (!body.is_empty()).then_some((i + 1, body))
        });

    let (line, header) = data.next().ok_or(MeshError::Parse {
        line: 1,
        msg: "missing NNODES NTRIS header".into(),
    })?;
    let mut counts = header.split_whitespace();
    let n_nodes = parse_token::<usize>(counts.next(), line, "NNODES")?;
    let n_tris = parse_token::<usize>(counts.next(), line, "NTRIS")?;
    if counts.next().is_some() {
        return Err(MeshError::Parse {
            line,
            msg: "header has trailing tokens".into(),
        });
    }

    let mut nodes = Vec::with_capacity(n_nodes);
    for k in 0..n_nodes {
        let (line, body) = data.next().ok_or(MeshError::Parse {
            line: 0,
            msg: format!("file ends before node {k} of {n_nodes}"),
        })?;
        let mut tok = body.split_whitespace();
        let x = parse_token::<f64>(tok.next(), line, "node x")?;
        let y = parse_token::<f64>(tok.next(), line, "node y")?;
        if tok.next().is_some() {
            return Err(MeshError::Parse {
                line,
                msg: "node line has trailing tokens".into(),
            });
        }
        nodes.push([x, y]);
    }

    let mut tris = Vec::with_capacity(n_tris);
    for k in 0..n_tris {
        let (line, body) = data.next().ok_or(MeshError::Parse {
            line: 0,
            msg: format!("file ends before element {k} of {n_tris}"),
        })?;
        let mut tok = body.split_whitespace();
        let mut tri = [0usize; 3];
        for (c, slot) in tri.iter_mut().enumerate() {
            *slot = parse_token::<usize>(tok.next(), line, &format!("element index {c}"))?;
            if *slot >= n_nodes {
                return Err(MeshError::Parse {
                    line,
                    msg: format!(
                        "element references node {} but the mesh has {n_nodes} nodes",
                        *slot
                    ),
                });
            }
        }
        if tok.next().is_some() {
            return Err(MeshError::Parse {
                line,
                msg: "element line has trailing tokens".into(),
            });
        }
        if signed_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]) < 0.0 {
            log::warn!("element {k} at line {line} is clockwise; reorienting");
            tri.swap(1, 2);
        }
        tris.push(tri);
    }
    if let Some((line, _)) = data.next() {
        return Err(MeshError::Parse {
            line,
            msg: "trailing data after the last element".into(),
        });
    }
    TriMesh::build(nodes, tris)
}

fn parse_token<T: std::str::FromStr>(
    tok: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, MeshError> {
    let tok = tok.ok_or_else(|| MeshError::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| MeshError::Parse {
        line,
        msg: format!("cannot parse {what} from {tok:?}"),
    })
}

fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_splits_into_two_half_area_triangles() {
        let mesh = generate_rect_mesh(1, 1, 1.0, 1.0, [0.0, 0.0]).unwrap();
        assert_eq!(mesh.n_cells(), 2);
        assert_eq!(mesh.n_nodes(), 4);
        assert_eq!(mesh.areas, vec![0.5, 0.5]);
        assert!(validate_mesh(&mesh).is_empty());
    }

    #[test]
    fn two_by_one_counts() {
        let mesh = generate_rect_mesh(2, 1, 2.0, 1.0, [0.0, 0.0]).unwrap();
        assert_eq!(mesh.n_cells(), 4);
        assert_eq!(mesh.n_nodes(), 6);
    }

    #[test]
    fn generated_meshes_validate_and_cover_the_rectangle() {
        for (nx, ny, lx, ly) in [
            (1, 1, 1.0, 1.0),
            (7, 3, 2.5, 1.7),
            (40, 2, 25.0, 1.25),
            (12, 12, 40.0, 40.0),
        ] {
            let mesh = generate_rect_mesh(nx, ny, lx, ly, [-1.0, 0.25]).unwrap();
            assert_eq!(mesh.n_cells(), 2 * nx * ny);
            assert_eq!(mesh.n_nodes(), (nx + 1) * (ny + 1));
            let report = validate_mesh(&mesh);
            assert!(report.is_empty(), "{nx}x{ny}: {report:?}");
            let rel = (mesh.total_area() - lx * ly).abs() / (lx * ly);
            assert!(rel <= 1e-12, "{nx}x{ny}: area defect {rel:e}");
        }
        assert!(generate_rect_mesh(0, 3, 1.0, 1.0, [0.0, 0.0]).is_err());
        assert!(generate_rect_mesh(2, 2, -1.0, 1.0, [0.0, 0.0]).is_err());
    }

    #[test]
    fn interior_edges_pair_with_opposite_normals() {
        let mesh = generate_rect_mesh(5, 4, 3.0, 2.0, [0.0, 0.0]).unwrap();
        let mut n_boundary = 0;
        for (t, cell_edges) in mesh.edges.iter().enumerate() {
            for e in cell_edges {
                match e.neighbor {
                    None => n_boundary += 1,
                    Some(nb) => {
                        let back = mesh.edges[nb]
                            .iter()
                            .find(|be| be.neighbor == Some(t))
                            .expect("neighbor symmetry");
                        assert_eq!(back.length, e.length);
                        assert!((back.normal.nx + e.normal.nx).abs() <= 1e-14);
                        assert!((back.normal.ny + e.normal.ny).abs() <= 1e-14);
                    }
                }
            }
        }
        // Each rectangle side contributes one triangle edge per subdivision.
        assert_eq!(n_boundary, 2 * (5 + 4));
    }

    #[test]
    fn edge_normals_point_away_from_the_centroid() {
        let mesh = generate_rect_mesh(4, 3, 2.0, 1.5, [0.5, -0.5]).unwrap();
        for t in 0..mesh.n_cells() {
            let c = mesh.centroids[t];
            for e in &mesh.edges[t] {
                let (p0, p1) = (mesh.nodes[e.nodes.0], mesh.nodes[e.nodes.1]);
                let mid = [(p0[0] + p1[0]) / 2.0, (p0[1] + p1[1]) / 2.0];
                let dot = (mid[0] - c[0]) * e.normal.nx + (mid[1] - c[1]) * e.normal.ny;
                assert!(dot > 0.0, "cell {t} has an inward edge normal");
            }
        }
    }

    #[test]
    fn canonical_list_visits_every_edge_once() {
        let mesh = generate_rect_mesh(6, 5, 3.0, 2.5, [0.0, 0.0]).unwrap();
        let canon = canonical_edges(&mesh);
        let n_slots = 3 * mesh.n_cells();
        let n_boundary = mesh
            .edges
            .iter()
            .flatten()
            .filter(|e| e.neighbor.is_none())
            .count();
        let n_interior = (n_slots - n_boundary) / 2;
        assert_eq!(canon.len(), n_interior + n_boundary);
        // No edge key repeats, and interior edges are owned by the lower id.
        let mut seen = std::collections::HashSet::new();
        for ce in &canon {
            let e = mesh.edges[ce.left][ce.left_side];
            let key = (e.nodes.0.min(e.nodes.1), e.nodes.0.max(e.nodes.1));
            assert!(seen.insert(key), "edge {key:?} listed twice");
            if let Some(r) = ce.right {
                assert!(ce.left < r);
                // The stored right slot is the same edge traversed backwards.
                let back = mesh.edges[r][ce.right_side.unwrap()];
                assert_eq!(back.nodes, (e.nodes.1, e.nodes.0));
                assert_eq!(back.neighbor, Some(ce.left));
            } else {
                assert_eq!(ce.right_side, None);
            }
        }
    }

    #[test]
    fn char_length_of_a_right_triangle() {
        let mesh = TriMesh::build(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let expected = 0.5 / (2.0 + std::f64::consts::SQRT_2);
        assert!((mesh.char_length(0) - expected).abs() < 1e-15);
    }

    #[test]
    fn cell_fields_index_by_cell() {
        let mesh = generate_rect_mesh(3, 2, 3.0, 2.0, [0.0, 0.0]).unwrap();
        let mut f = CellField::from_fn(&mesh, |x, y| x + 10.0 * y);
        assert_eq!(f.len(), mesh.n_cells());
        let c = mesh.centroids[5];
        assert_eq!(f[5], c[0] + 10.0 * c[1]);
        f[5] = -1.0;
        assert_eq!(f[5], -1.0);
        let g = CellField::constant(&mesh, 7u32);
        assert!(g.iter().all(|&v| v == 7));
    }

    #[test]
    fn roundtrip_preserves_coordinates_and_connectivity_exactly() {
        let mesh = generate_rect_mesh(3, 3, 2.5, 1.7, [-1.0, 0.25]).unwrap();
        let path = std::env::temp_dir().join(format!("mesh_roundtrip_{}.txt", std::process::id()));
        save_mesh(&mesh, &path).unwrap();
        let loaded = load_mesh(&path).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(loaded.tris, mesh.tris);
        assert_eq!(loaded.n_nodes(), mesh.n_nodes());
        for (a, b) in loaded.nodes.iter().zip(&mesh.nodes) {
            assert_eq!(a[0].to_bits(), b[0].to_bits());
            assert_eq!(a[1].to_bits(), b[1].to_bits());
        }
    }

    #[test]
    fn parse_errors_name_the_offending_line() {
        // Node line 4 has a bad token.
        let text = "# comment\n2 1\n0 0\n1 oops\n0 1 2\n";
        match parse_mesh(text) {
            Err(MeshError::Parse { line, msg }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("node y"), "{msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        // Element line references a node that does not exist.
        let text = "3 1\n0 0\n1 0\n0 1\n0 1 7\n";
        match parse_mesh(text) {
            Err(MeshError::Parse { line, msg }) => {
                assert_eq!(line, 5);
                assert!(msg.contains("node 7"), "{msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        // Truncated file.
        let text = "3 1\n0 0\n1 0\n";
        assert!(matches!(parse_mesh(text), Err(MeshError::Parse { .. })));
    }

    #[test]
    fn clockwise_elements_are_reoriented_on_load() {
        let text = "3 1\n0 0\n1 0\n0 1\n0 2 1\n";
        let mesh = parse_mesh(text).unwrap();
        assert_eq!(mesh.tris[0], [0, 1, 2]);
        assert!(mesh.areas[0] > 0.0);
        assert!(validate_mesh(&mesh).is_empty());
    }

    #[test]
    fn validation_reports_collapsed_and_misoriented_cells() {
        // Duplicated node collapses the triangle to zero area.
        let broken = TriMesh::build(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let report = validate_mesh(&broken);
        assert!(
            report.iter().any(|p| p.contains("non-positive area")),
            "{report:?}"
        );

        // A clockwise neighbor traverses the shared edge in the same
        // direction, so the paired normals are not opposite.
        let mixed = TriMesh::build(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
            vec![[0, 1, 2], [1, 2, 3]],
        )
        .unwrap();
        let report = validate_mesh(&mixed);
        assert!(
            report.iter().any(|p| p.contains("non-opposite normals")),
            "{report:?}"
        );
    }
}

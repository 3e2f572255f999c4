//! Built-in test problems and the reference oracles used to score them:
//! the three dam-break Riemann tests, the transcritical bump, the circular
//! dam break with its radial reference solver, a manufactured solution for
//! convergence studies, and lake-at-rest setups.
//!
//! Every constructor returns a self-contained [`TestCase`]: domain, bed,
//! initial data, boundary conditions, run parameters, and a descriptor of
//! the reference solution a scorer should compare against. The oracles are
//! deterministic given their resolution parameters.

use crate::mesh::{CellField, TriMesh};
use crate::riemann::{exact_swe_solver, SolverTolerances};
use crate::solver1d::{Bathymetry1D, Bc1D, Grid1D, RunState1D, Solver1DError};
use crate::solver2d::{Bathymetry2D, Bc2D, RunState2D};
use crate::state::{celerity, PhysConstants, Primitive1D, State2D};
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("unknown case id '{id}'")]
    UnknownCase { id: String },
    #[error("Riemann test index must be 1, 2, or 3 (got {k})")]
    InvalidIndex { k: u32 },
    #[error("case dimension must be 1 or 2 (got {dim})")]
    InvalidDimension { dim: u32 },
    #[error("steady bump profile has no admissible shock position in the domain")]
    NoAdmissibleShock,
    #[error("boundary edge of cell {cell} (slot {slot}) lies on no rectangle side")]
    UnclassifiedBoundaryEdge { cell: usize, slot: usize },
}

pub type Bed1DFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Init1DFn = Arc<dyn Fn(f64) -> Primitive1D + Send + Sync>;
pub type Bed2DFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type Init2DFn = Arc<dyn Fn(f64, f64) -> State2D + Send + Sync>;
pub type Forcing2DFn = Arc<dyn Fn(f64, f64, f64) -> [f64; 3] + Send + Sync>;
pub type Boundary2DFn = Arc<dyn Fn(f64, f64, f64) -> (f64, f64, f64) + Send + Sync>;

/// One self-contained problem definition.
#[derive(Clone)]
pub struct TestCase {
    pub id: &'static str,
    pub g: f64,
    pub cfl: f64,
    /// Strictly increasing snapshot times; the last one is the final time.
    pub output_times: Vec<f64>,
    pub setup: CaseSetup,
    pub reference: Reference,
}

#[derive(Clone)]
pub enum CaseSetup {
    OneD(Case1D),
    TwoD(Case2D),
}

#[derive(Clone)]
pub struct Case1D {
    pub x_min: f64,
    pub x_max: f64,
    pub default_m: usize,
    pub bed: Bed1DFn,
    pub init: Init1DFn,
    pub bc_left: Bc1D,
    pub bc_right: Bc1D,
}

#[derive(Clone)]
pub struct Case2D {
    pub origin: [f64; 2],
    pub lx: f64,
    pub ly: f64,
    pub default_nx: usize,
    pub default_ny: usize,
    pub bed: Bed2DFn,
    pub init: Init2DFn,
    pub bc: BcLayout2D,
    /// Manufactured source term, fed to the solver hooks when present.
    pub forcing: Option<Forcing2DFn>,
    /// Prescribed (h, u, v) for Dirichlet edges.
    pub boundary_values: Option<Boundary2DFn>,
}

/// Boundary conditions of a rectangular 2D domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcLayout2D {
    Uniform(Bc2D),
    /// Per side; edges are classified by their midpoint.
    Rect {
        west: Bc2D,
        east: Bc2D,
        south: Bc2D,
        north: Bc2D,
    },
}

/// What a scorer should compare the run against.
#[derive(Clone, Debug)]
pub enum Reference {
    None,
    /// Sample the exact full-SWE solution of this initial jump at x0.
    ExactRiemann {
        left: Primitive1D,
        right: Primitive1D,
        x0: f64,
    },
    /// Steady transcritical profile from [`bump_steady_reference`].
    BumpSteady { q_in: f64, h_out: f64 },
    /// Radial profile from [`radial_reference`], about `center`.
    Radial { center: [f64; 2], r_max: f64 },
    /// Closed-form fields from [`manufactured_exact`].
    Manufactured,
    /// Flat free surface at this level with zero velocity.
    LakeAtRest { h0: f64 },
}

impl TestCase {
    pub fn dimension(&self) -> u32 {
        match self.setup {
            CaseSetup::OneD(_) => 1,
            CaseSetup::TwoD(_) => 2,
        }
    }

    /// Cheap self-check run by every constructor: ordered output times, a
    /// sane CFL number, and wet finite initial data on a sample of points.
    fn validate(self) -> Self {
        assert!(
            self.output_times.windows(2).all(|w| w[0] < w[1]),
            "{}: output times must increase",
            self.id
        );
        assert!(
            self.output_times.iter().all(|t| t.is_finite() && *t > 0.0),
            "{}: output times must be positive",
            self.id
        );
        assert!(
            self.cfl > 0.0 && self.cfl <= 1.0,
            "{}: cfl must lie in (0, 1]",
            self.id
        );
        match &self.setup {
            CaseSetup::OneD(c) => {
                assert!(c.x_max > c.x_min && c.default_m >= 2, "{}: bad domain", self.id);
                for k in 0..=16 {
                    let x = c.x_min + (c.x_max - c.x_min) * k as f64 / 16.0;
                    let p = (c.init)(x);
                    assert!(
                        p.h.is_finite() && p.h >= 0.0 && p.u.is_finite() && p.psi.is_finite(),
                        "{}: invalid initial state at x = {x}",
                        self.id
                    );
                    assert!((c.bed)(x).is_finite(), "{}: invalid bed at x = {x}", self.id);
                }
            }
            CaseSetup::TwoD(c) => {
                assert!(
                    c.lx > 0.0 && c.ly > 0.0 && c.default_nx >= 2 && c.default_ny >= 2,
                    "{}: bad domain",
                    self.id
                );
                for i in 0..=8 {
                    for j in 0..=8 {
                        let x = c.origin[0] + c.lx * i as f64 / 8.0;
                        let y = c.origin[1] + c.ly * j as f64 / 8.0;
                        let q = (c.init)(x, y);
                        assert!(
                            q.h.is_finite() && q.h >= 0.0 && q.qx.is_finite() && q.qy.is_finite(),
                            "{}: invalid initial state at ({x}, {y})",
                            self.id
                        );
                        assert!((c.bed)(x, y).is_finite(), "{}: invalid bed at ({x}, {y})", self.id);
                    }
                }
            }
        }
        self
    }
}

/// Parabolic hump on (8, 12), zero elsewhere; continuous at the junctions.
pub fn parabolic_bump_bed(x: f64) -> f64 {
    if x > 8.0 && x < 12.0 {
        0.2 - 0.05 * (x - 10.0) * (x - 10.0)
    } else {
        0.0
    }
}

/// Gaussian mound centered at the origin.
pub fn gaussian_bed(x: f64, y: f64) -> f64 {
    0.2 * (-8.0 * (x * x + y * y)).exp()
}

const BUMP_Q_IN: f64 = 0.18;
const BUMP_H_OUT: f64 = 0.33;

/// Dam-break Riemann tests 1-3: a single jump at x0 = 15 on [0, 30] with
/// a passive scalar jumping from 1 to 0 across it.
pub fn riemann_case(k: u32) -> Result<TestCase, CaseError> {
    let (left, right, t_end) = match k {
        1 => (
            Primitive1D::new(1.0, 0.0, 1.0),
            Primitive1D::new(0.1, 0.0, 0.0),
            3.0,
        ),
        2 => (
            Primitive1D::new(0.51, 2.5, 1.0),
            Primitive1D::new(0.48, -5.8, 0.0),
            3.0,
        ),
        3 => (
            Primitive1D::new(1.0, -3.0, 1.0),
            Primitive1D::new(1.0, 3.0, 0.0),
            2.0,
        ),
        _ => return Err(CaseError::InvalidIndex { k }),
    };
    let x0 = 15.0;
    let ids = ["riemann1", "riemann2", "riemann3"];
    Ok(TestCase {
        id: ids[(k - 1) as usize],
        g: PhysConstants::default().g,
        cfl: 0.9,
        output_times: vec![t_end],
        setup: CaseSetup::OneD(Case1D {
            x_min: 0.0,
            x_max: 30.0,
            default_m: 100,
            bed: Arc::new(|_| 0.0),
            init: Arc::new(move |x| if x < x0 { left } else { right }),
            bc_left: Bc1D::Transmissive,
            bc_right: Bc1D::Transmissive,
        }),
        reference: Reference::ExactRiemann { left, right, x0 },
    }
    .validate())
}

/// Transcritical flow over the parabolic bump, driven by a fixed inflow
/// discharge of 0.18 and a fixed outflow depth of 0.33 until it settles
/// into a steady profile with a stationary jump on the lee side. The 2D
/// variant runs the same data in a 25 x 1.25 channel with reflective side
/// walls and Dirichlet inflow/outflow taken from the steady profile.
pub fn bump_case(dim: u32) -> Result<TestCase, CaseError> {
    let g = PhysConstants::default().g;
    match dim {
        1 => Ok(TestCase {
            id: "bump1d",
            g,
            cfl: 0.9,
            output_times: vec![200.0],
            setup: CaseSetup::OneD(Case1D {
                x_min: 0.0,
                x_max: 25.0,
                default_m: 200,
                bed: Arc::new(parabolic_bump_bed),
                init: Arc::new(|_| Primitive1D::new(BUMP_H_OUT, BUMP_Q_IN / BUMP_H_OUT, 0.0)),
                bc_left: Bc1D::SubcriticalInflow { q: BUMP_Q_IN },
                bc_right: Bc1D::SubcriticalOutflow { h: BUMP_H_OUT },
            }),
            reference: Reference::BumpSteady {
                q_in: BUMP_Q_IN,
                h_out: BUMP_H_OUT,
            },
        }
        .validate()),
        2 => {
            let steady =
                bump_steady_reference(BUMP_Q_IN, BUMP_H_OUT, parabolic_bump_bed, 0.0, 25.0, g)
                    .expect("the published bump data is transcritical with a shock");
            let h_in = steady.h_at(0.0);
            Ok(TestCase {
                id: "bump2d",
                g,
                cfl: 0.45,
                output_times: vec![200.0],
                setup: CaseSetup::TwoD(Case2D {
                    origin: [0.0, 0.0],
                    lx: 25.0,
                    ly: 1.25,
                    default_nx: 200,
                    default_ny: 10,
                    bed: Arc::new(|x, _| parabolic_bump_bed(x)),
                    init: Arc::new(|_, _| State2D::new(BUMP_H_OUT, BUMP_Q_IN, 0.0)),
                    bc: BcLayout2D::Rect {
                        west: Bc2D::Dirichlet,
                        east: Bc2D::Dirichlet,
                        south: Bc2D::Reflective,
                        north: Bc2D::Reflective,
                    },
                    forcing: None,
                    boundary_values: Some(Arc::new(move |x, _, _| {
                        if x < 12.5 {
                            (h_in, BUMP_Q_IN / h_in, 0.0)
                        } else {
                            (BUMP_H_OUT, BUMP_Q_IN / BUMP_H_OUT, 0.0)
                        }
                    })),
                }),
                reference: Reference::BumpSteady {
                    q_in: BUMP_Q_IN,
                    h_out: BUMP_H_OUT,
                },
            }
            .validate())
        }
        _ => Err(CaseError::InvalidDimension { dim }),
    }
}

/// Circular dam break: a cylinder of depth 2.5 and radius 2.5 centered in
/// a 40 x 40 basin of depth 1, flat bed, released from rest.
pub fn circular_dam_case() -> TestCase {
    TestCase {
        id: "dam2d",
        g: PhysConstants::default().g,
        cfl: 0.45,
        output_times: (1..=8).map(|k| 0.5 * k as f64).collect(),
        setup: CaseSetup::TwoD(Case2D {
            origin: [0.0, 0.0],
            lx: 40.0,
            ly: 40.0,
            default_nx: 100,
            default_ny: 100,
            bed: Arc::new(|_, _| 0.0),
            init: Arc::new(|x, y| {
                let r2 = (x - 20.0) * (x - 20.0) + (y - 20.0) * (y - 20.0);
                State2D::new(if r2 <= 2.5 * 2.5 { 2.5 } else { 1.0 }, 0.0, 0.0)
            }),
            bc: BcLayout2D::Uniform(Bc2D::Reflective),
            forcing: None,
            boundary_values: None,
        }),
        reference: Reference::Radial {
            center: [20.0, 20.0],
            r_max: 20.0,
        },
    }
    .validate()
}

/// Time-dependent closed-form fields with an analytic balancing source:
/// the free surface rises uniformly as e^(0.1 t) over the Gaussian bed
/// while the velocity field stays frozen. Dirichlet boundaries and the
/// forcing hook both come from the closed forms.
pub fn manufactured_case() -> TestCase {
    TestCase {
        id: "manufactured",
        g: PhysConstants::default().g,
        cfl: 0.45,
        output_times: vec![1.0],
        setup: CaseSetup::TwoD(Case2D {
            origin: [0.0, 0.0],
            lx: 1.0,
            ly: 1.0,
            default_nx: 64,
            default_ny: 64,
            bed: Arc::new(gaussian_bed),
            init: Arc::new(|x, y| manufactured_exact(x, y, 0.0)),
            bc: BcLayout2D::Uniform(Bc2D::Dirichlet),
            forcing: Some(Arc::new(manufactured_forcing)),
            boundary_values: Some(Arc::new(manufactured_primitives)),
        }),
        reference: Reference::Manufactured,
    }
    .validate()
}

/// Which lake-at-rest setup to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LakeBed {
    /// Parabolic bump on [0, 25], surface at 0.5.
    Bump1D,
    /// Gaussian mound on [0, 1]^2, surface at 1.
    Gaussian2D,
}

/// Still water over a varying bed; the scheme must hold the surface flat.
pub fn lake_at_rest_case(bed: LakeBed) -> TestCase {
    let g = PhysConstants::default().g;
    match bed {
        LakeBed::Bump1D => {
            let h0 = 0.5;
            TestCase {
                id: "lake1d",
                g,
                cfl: 0.9,
                output_times: vec![1.0],
                setup: CaseSetup::OneD(Case1D {
                    x_min: 0.0,
                    x_max: 25.0,
                    default_m: 100,
                    bed: Arc::new(parabolic_bump_bed),
                    init: Arc::new(move |x| {
                        Primitive1D::new(h0 - parabolic_bump_bed(x), 0.0, 0.0)
                    }),
                    bc_left: Bc1D::Reflective,
                    bc_right: Bc1D::Reflective,
                }),
                reference: Reference::LakeAtRest { h0 },
            }
            .validate()
        }
        LakeBed::Gaussian2D => {
            let h0 = 1.0;
            TestCase {
                id: "lake2d",
                g,
                cfl: 0.45,
                output_times: vec![0.25],
                setup: CaseSetup::TwoD(Case2D {
                    origin: [0.0, 0.0],
                    lx: 1.0,
                    ly: 1.0,
                    default_nx: 20,
                    default_ny: 20,
                    bed: Arc::new(gaussian_bed),
                    init: Arc::new(move |x, y| State2D::new(h0 - gaussian_bed(x, y), 0.0, 0.0)),
                    bc: BcLayout2D::Uniform(Bc2D::Reflective),
                    forcing: None,
                    boundary_values: None,
                }),
                reference: Reference::LakeAtRest { h0 },
            }
            .validate()
        }
    }
}

pub fn case_ids() -> &'static [&'static str] {
    &[
        "riemann1",
        "riemann2",
        "riemann3",
        "bump1d",
        "bump2d",
        "dam2d",
        "manufactured",
        "lake1d",
        "lake2d",
    ]
}

pub fn case_by_id(id: &str) -> Result<TestCase, CaseError> {
    match id {
        "riemann1" => riemann_case(1),
        "riemann2" => riemann_case(2),
        "riemann3" => riemann_case(3),
        "bump1d" => bump_case(1),
        "bump2d" => bump_case(2),
        "dam2d" => Ok(circular_dam_case()),
        "manufactured" => Ok(manufactured_case()),
        "lake1d" => Ok(lake_at_rest_case(LakeBed::Bump1D)),
        "lake2d" => Ok(lake_at_rest_case(LakeBed::Gaussian2D)),
        _ => Err(CaseError::UnknownCase { id: id.to_string() }),
    }
}

/// Builds the 1D run state and bathymetry of a case at resolution m.
pub fn init_state_1d(
    case: &Case1D,
    m: usize,
) -> Result<(RunState1D, Bathymetry1D), Solver1DError> {
    let grid = Grid1D::new(case.x_min, case.x_max, m)?;
    let bath = Bathymetry1D::from_fn(&grid, |x| (case.bed)(x));
    let init = Arc::clone(&case.init);
    let state = RunState1D::new(grid, case.bc_left, case.bc_right, move |x| init(x));
    Ok((state, bath))
}

/// Builds the 2D run state (with its per-side boundary table) and the
/// bathymetry of a case on the given mesh.
pub fn init_state_2d(
    case: &Case2D,
    mesh: &TriMesh,
) -> Result<(RunState2D, Bathymetry2D), CaseError> {
    let cells = CellField::from_fn(mesh, |x, y| (case.init)(x, y));
    let mut state = RunState2D::new(mesh, cells, Bc2D::Reflective);
    state.bc = rect_bc_table(mesh, case)?;
    let bath = Bathymetry2D::from_fn(mesh, |x, y| (case.bed)(x, y));
    Ok((state, bath))
}

/// Boundary-condition table for a rectangle-shaped mesh: every boundary
/// edge is matched to the west/east/south/north side by its midpoint.
pub fn rect_bc_table(
    mesh: &TriMesh,
    case: &Case2D,
) -> Result<Vec<[Option<Bc2D>; 3]>, CaseError> {
    let (x0, y0) = (case.origin[0], case.origin[1]);
    let (x1, y1) = (x0 + case.lx, y0 + case.ly);
    let tol = 1e-9 * case.lx.max(case.ly);
    let mut table = vec![[None; 3]; mesh.n_cells()];
    for i in 0..mesh.n_cells() {
        for (k, e) in mesh.edges[i].iter().enumerate() {
            if e.neighbor.is_some() {
                continue;
            }
            let (a, b) = e.nodes;
            let mx = 0.5 * (mesh.nodes[a][0] + mesh.nodes[b][0]);
            let my = 0.5 * (mesh.nodes[a][1] + mesh.nodes[b][1]);
            let bc = match case.bc {
                BcLayout2D::Uniform(bc) => bc,
                BcLayout2D::Rect {
                    west,
                    east,
                    south,
                    north,
                } => {
                    if (mx - x0).abs() <= tol {
                        west
                    } else if (mx - x1).abs() <= tol {
                        east
                    } else if (my - y0).abs() <= tol {
                        south
                    } else if (my - y1).abs() <= tol {
                        north
                    } else {
                        return Err(CaseError::UnclassifiedBoundaryEdge { cell: i, slot: k });
                    }
                }
            };
            table[i][k] = Some(bc);
        }
    }
    Ok(table)
}

/// Steady transcritical reference profile over an arbitrary single-crest
/// bed, built from the steady-state invariants: constant discharge q and
/// constant specific energy E = q^2/(2h^2) + g (h + b) per smooth region,
/// critical transition at the crest, and a stationary jump where the
/// momentum function q^2/h + g h^2/2 of the supercritical branch meets the
/// subcritical branch carried back from the outlet.
pub struct BumpSteadyReference {
    pub q: f64,
    pub g: f64,
    /// Critical depth (q^2/g)^(1/3).
    pub h_crit: f64,
    pub crest_x: f64,
    pub crest_b: f64,
    /// Energy of the critical crest flow; rules upstream of the jump.
    pub e_crest: f64,
    /// Energy carried in from the outlet; rules downstream of the jump.
    pub e_out: f64,
    /// None when the outlet energy admits a fully subcritical profile.
    pub shock: Option<ShockData>,
    bed: Bed1DFn,
}

#[derive(Clone, Copy, Debug)]
pub struct ShockData {
    pub x: f64,
    /// Supercritical depth immediately upstream of the jump.
    pub h_upstream: f64,
    /// Subcritical depth immediately downstream of the jump.
    pub h_downstream: f64,
}

impl BumpSteadyReference {
    /// Depth of the steady profile at x.
    pub fn h_at(&self, x: f64) -> f64 {
        let b = (self.bed)(x);
        match &self.shock {
            None => energy_depth(self.q, self.g, self.e_out, b, Branch::Subcritical),
            Some(s) => {
                if x <= self.crest_x {
                    energy_depth(self.q, self.g, self.e_crest, b, Branch::Subcritical)
                } else if x < s.x {
                    energy_depth(self.q, self.g, self.e_crest, b, Branch::Supercritical)
                } else {
                    energy_depth(self.q, self.g, self.e_out, b, Branch::Subcritical)
                }
            }
        }
    }

    pub fn sample(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.h_at(x)).collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Branch {
    Subcritical,
    Supercritical,
}

/// Root of q^2/(2h^2) + g(h + b) = e on the requested branch, split at the
/// critical depth. Callers guarantee e >= e_min(b) so a root exists.
fn energy_depth(q: f64, g: f64, e: f64, b: f64, branch: Branch) -> f64 {
    let h_crit = (q * q / g).cbrt();
    let f = |h: f64| q * q / (2.0 * h * h) + g * (h + b) - e;
    let (mut lo, mut hi) = match branch {
        // f(h_crit) <= 0 and f grows ~ g h for large h.
        Branch::Subcritical => (h_crit, (e - g * b) / g + h_crit),
        // f -> +inf as h -> 0+.
        Branch::Supercritical => (1e-12 * h_crit, h_crit),
    };
    debug_assert!(f(lo.max(hi)) * 0.0 == 0.0, "energy equation stays finite");
    for _ in 0..200 {
        if (hi - lo) <= 1e-16 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let positive = f(mid) > 0.0;
        // The subcritical branch rises with h, the supercritical one falls.
        let root_below = match branch {
            Branch::Subcritical => positive,
            Branch::Supercritical => !positive,
        };
        if root_below {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Momentum function of a steady jump; equal on both sides of a
/// stationary hydraulic shock.
fn momentum_function(q: f64, g: f64, h: f64) -> f64 {
    q * q / h + 0.5 * g * h * h
}

/// Builds the steady reference for inflow discharge q_in and outlet depth
/// h_out over `bed` on [x_min, x_max]. Returns the fully subcritical
/// profile when the outlet energy clears the crest; otherwise places the
/// stationary jump, or fails when no position balances momentum.
pub fn bump_steady_reference(
    q_in: f64,
    h_out: f64,
    bed: impl Fn(f64) -> f64 + Send + Sync + 'static,
    x_min: f64,
    x_max: f64,
    g: f64,
) -> Result<BumpSteadyReference, CaseError> {
    assert!(q_in > 0.0 && h_out > 0.0 && g > 0.0 && x_max > x_min);
    let bed: Bed1DFn = Arc::new(bed);

    // Crest: coarse scan, then ternary refinement of the best interval.
    const SCAN: usize = 4096;
    let xs = |k: usize| x_min + (x_max - x_min) * k as f64 / SCAN as f64;
    let mut best = 0usize;
    for k in 0..=SCAN {
        if bed(xs(k)) > bed(xs(best)) {
            best = k;
        }
    }
    let (mut lo, mut hi) = (xs(best.saturating_sub(1)), xs((best + 1).min(SCAN)));
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if bed(m1) < bed(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let crest_x = 0.5 * (lo + hi);
    let crest_b = bed(crest_x);

    let h_crit = (q_in * q_in / g).cbrt();
    let e_crest = q_in * q_in / (2.0 * h_crit * h_crit) + g * (h_crit + crest_b);
    let e_out = q_in * q_in / (2.0 * h_out * h_out) + g * (h_out + bed(x_max));

    if e_out >= e_crest {
        // The outlet energy clears the crest: subcritical everywhere.
        return Ok(BumpSteadyReference {
            q: q_in,
            g,
            h_crit,
            crest_x,
            crest_b,
            e_crest,
            e_out,
            shock: None,
            bed,
        });
    }

    // Jump placement: scan downstream of the crest for a sign change of
    // the momentum mismatch between the supercritical profile (energy
    // e_crest) and the subcritical profile carried back from the outlet
    // (energy e_out). The latter only exists where the bed is low enough.
    let e_min = move |b: f64| q_in * q_in / (2.0 * h_crit * h_crit) + g * (h_crit + b);
    let mismatch = |x: f64| -> Option<f64> {
        let b = bed(x);
        if e_min(b) > e_out {
            return None;
        }
        let h_sup = energy_depth(q_in, g, e_crest, b, Branch::Supercritical);
        let h_sub = energy_depth(q_in, g, e_out, b, Branch::Subcritical);
        Some(momentum_function(q_in, g, h_sup) - momentum_function(q_in, g, h_sub))
    };
    let mut bracket = None;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=SCAN {
        let x = crest_x + (x_max - crest_x) * k as f64 / SCAN as f64;
        if let Some(phi) = mismatch(x) {
            if let Some((xp, pp)) = prev {
                if pp == 0.0 || pp.signum() != phi.signum() {
                    bracket = Some((xp, x));
                    break;
                }
            }
            prev = Some((x, phi));
        }
    }
    let (mut lo, mut hi) = bracket.ok_or(CaseError::NoAdmissibleShock)?;
    let phi_lo = mismatch(lo).expect("bracket endpoints are admissible");
    for _ in 0..200 {
        if (hi - lo) <= 1e-14 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let phi = mismatch(mid).expect("bracket stays admissible");
        if phi.signum() == phi_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x_shock = 0.5 * (lo + hi);
    let b_s = bed(x_shock);
    let shock = ShockData {
        x: x_shock,
        h_upstream: energy_depth(q_in, g, e_crest, b_s, Branch::Supercritical),
        h_downstream: energy_depth(q_in, g, e_out, b_s, Branch::Subcritical),
    };
    Ok(BumpSteadyReference {
        q: q_in,
        g,
        h_crit,
        crest_x,
        crest_b,
        e_crest,
        e_out,
        shock: Some(shock),
        bed,
    })
}

/// Radially symmetric dam-break solution on cell centers.
pub struct RadialSolution {
    pub r: Vec<f64>,
    pub h: Vec<f64>,
    pub u: Vec<f64>,
    /// Relative drift of the cylindrical volume integral sum(h r dr).
    pub mass_rel_drift: f64,
}

/// First-order Godunov solver of the radially symmetric shallow water
/// equations for the circular dam-break data, written in the conservation
/// variables (r h, r h u):
///
///   d/dt (r h)  + d/dr (r h u)                 = 0
///   d/dt (r h u) + d/dr (r (h u^2 + g h^2/2))  = g h^2 / 2
///
/// Interface Riemann problems are solved on the unweighted states and the
/// fluxes scaled by the interface radius, so the axis interface (r = 0)
/// drops out, which is the symmetry condition, and the cylindrical volume
/// is conserved to round-off until waves reach the outer rim. The source
/// and the 1/r recovery use cell-center radii, the first at dr/2.
pub fn radial_dam_solution(n_cells: usize, t_end: f64) -> RadialSolution {
    assert!(n_cells >= 2 && t_end >= 0.0 && t_end.is_finite());
    const R_MAX: f64 = 20.0;
    const R_DAM: f64 = 2.5;
    const H_IN: f64 = 2.5;
    const H_OUT: f64 = 1.0;
    let g = PhysConstants::default().g;
    let cfl = 0.9;
    let n = n_cells;
    let dr = R_MAX / n as f64;
    let centers: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * dr).collect();
    let mut h: Vec<f64> = centers
        .iter()
        .map(|&r| if r < R_DAM { H_IN } else { H_OUT })
        .collect();
    let mut q = vec![0.0f64; n];
    let mass = |h: &[f64]| -> f64 {
        h.iter().zip(&centers).map(|(hh, rr)| hh * rr).sum::<f64>() * dr
    };
    let mass0 = mass(&h);
    let tols = SolverTolerances::default();
    let mut flux = vec![[0.0f64; 2]; n + 1];
    let mut t = 0.0;
    let mut steps = 0u64;
    while t < t_end {
        steps += 1;
        assert!(steps < 10_000_000, "radial reference exceeded its step guard");
        let mut dt = f64::INFINITY;
        for i in 0..n {
            let u = q[i] / h[i];
            dt = dt.min(cfl * dr / (u.abs() + celerity(h[i], g)));
        }
        let last = dt >= t_end - t;
        if last {
            dt = t_end - t;
        }
        for k in 1..=n {
            let li = k - 1;
            let left = Primitive1D::new(h[li], q[li] / h[li], 0.0);
            let right = if k == n {
                left
            } else {
                Primitive1D::new(h[k], q[k] / h[k], 0.0)
            };
            let f = exact_swe_solver(left, right, g, tols)
                .expect("radial dam-break states stay wet")
                .godunov_flux();
            flux[k] = [f[0], f[1]];
        }
        for i in 0..n {
            let r_l = i as f64 * dr;
            let r_r = (i + 1) as f64 * dr;
            let ri = centers[i];
            let rdt = dt / (ri * dr);
            h[i] -= rdt * (r_r * flux[i + 1][0] - r_l * flux[i][0]);
            q[i] -= rdt * (r_r * flux[i + 1][1] - r_l * flux[i][1]);
            q[i] += dt * 0.5 * g * h[i] * h[i] / ri;
            assert!(h[i] > 0.0, "radial reference dried out at r = {ri}");
        }
        t = if last { t_end } else { t + dt };
    }
    let mass_rel_drift = (mass(&h) - mass0).abs() / mass0;
    let u = h.iter().zip(&q).map(|(hh, qq)| qq / hh).collect();
    RadialSolution {
        r: centers,
        h,
        u,
        mass_rel_drift,
    }
}

impl RadialSolution {
    /// Linear interpolation on cell centers, clamped at both ends; the
    /// inner clamp is the symmetry condition at the axis.
    pub fn sample(&self, r: f64) -> (f64, f64) {
        assert!(r.is_finite() && r >= 0.0, "radius must be nonnegative");
        let n = self.r.len();
        if r <= self.r[0] {
            return (self.h[0], self.u[0]);
        }
        if r >= self.r[n - 1] {
            return (self.h[n - 1], self.u[n - 1]);
        }
        let dr = self.r[1] - self.r[0];
        let pos = (r - self.r[0]) / dr;
        let i = (pos.floor() as usize).min(n - 2);
        let w = pos - i as f64;
        (
            self.h[i] * (1.0 - w) + self.h[i + 1] * w,
            self.u[i] * (1.0 - w) + self.u[i + 1] * w,
        )
    }
}

/// Radial dam-break profiles (h, u_r) on `r_grid` at time t, from the
/// default 4000-cell solve.
pub fn radial_reference(r_grid: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
    radial_reference_n(r_grid, t, 4000)
}

/// [`radial_reference`] at an explicit resolution.
pub fn radial_reference_n(r_grid: &[f64], t: f64, n_cells: usize) -> (Vec<f64>, Vec<f64>) {
    let sol = radial_dam_solution(n_cells, t);
    let mut hs = Vec::with_capacity(r_grid.len());
    let mut us = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let (h, u) = sol.sample(r);
        hs.push(h);
        us.push(u);
    }
    (hs, us)
}

/// Closed-form manufactured state: the free surface h + b rises uniformly
/// as e^(0.1 t) over the Gaussian bed while u and v stay frozen in time.
pub fn manufactured_exact(x: f64, y: f64, t: f64) -> State2D {
    let (h, u, v) = manufactured_primitives(x, y, t);
    State2D::new(h, h * u, h * v)
}

/// Primitive (h, u, v) of the manufactured solution.
pub fn manufactured_primitives(x: f64, y: f64, t: f64) -> (f64, f64, f64) {
    let h = (0.1 * t).exp() - gaussian_bed(x, y);
    let u = 0.2 + 0.1 * (PI * x).sin();
    let v = 0.2 + 0.1 * (PI * y).sin();
    (h, u, v)
}

/// Conservative source that balances the manufactured fields:
/// S = dQ/dt + dFx/dx + dFy/dy minus the bed-slope source, in closed form.
/// The free surface is spatially uniform, so the pressure gradient cancels
/// the bed source exactly and gravity drops out of the result.
pub fn manufactured_forcing(x: f64, y: f64, t: f64) -> [f64; 3] {
    let b = gaussian_bed(x, y);
    let e = (0.1 * t).exp();
    let h = e - b;
    let ht = 0.1 * e;
    // dh/dx = -db/dx and db/dx = -16 x b for the Gaussian bed.
    let hx = 16.0 * x * b;
    let hy = 16.0 * y * b;
    let u = 0.2 + 0.1 * (PI * x).sin();
    let ux = 0.1 * PI * (PI * x).cos();
    let v = 0.2 + 0.1 * (PI * y).sin();
    let vy = 0.1 * PI * (PI * y).cos();
    [
        ht + u * hx + h * ux + v * hy + h * vy,
        u * ht + u * u * hx + 2.0 * h * u * ux + u * v * hy + h * u * vy,
        v * ht + u * v * hx + h * v * ux + v * v * hy + 2.0 * h * v * vy,
    ]
}

/// Reference profile as CSV with full float precision: header plus one row
/// per coordinate, columns coordinate, h, u and optionally v.
pub fn profile_to_csv(coord_name: &str, coord: &[f64], h: &[f64], u: &[f64], v: Option<&[f64]>) -> String {
    assert_eq!(coord.len(), h.len());
    assert_eq!(coord.len(), u.len());
    if let Some(v) = v {
        assert_eq!(coord.len(), v.len());
    }
    let mut out = String::new();
    out.push_str(coord_name);
    out.push_str(",h,u");
    if v.is_some() {
        out.push_str(",v");
    }
    out.push('\n');
    for i in 0..coord.len() {
        out.push_str(&format!("{:.16e},{:.16e},{:.16e}", coord[i], h[i], u[i]));
        if let Some(v) = v {
            out.push_str(&format!(",{:.16e}", v[i]));
        }
        out.push('\n');
    }
    out
}

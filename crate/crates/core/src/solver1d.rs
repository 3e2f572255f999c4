//! 1D finite-volume driver: grids, CFL time stepping, boundary conditions,
//! first- and second-order conservative updates, and the well-balanced
//! bathymetry source.
//!
//! The update for interior cell i is
//!
//!   Q_i^{n+1} = Q_i^n - (dt/dx) (F_{i+1/2} - F_{i-1/2}) + dt S_i,
//!
//! with the interface flux assembled from hydrostatically reconstructed
//! side states: at each interface the bed elevation is b_hat = max of the
//! two side values and the side depths are clipped to
//! h* = max(0, H - b_hat) with H = h + b the free surface. The momentum
//! source of cell i combines the clipped own-side pressure difference
//! g/(2 dx) [(h*_{i,R})^2 - (h*_{i,L})^2] with the second-order correction
//! pair (reconstructed-pressure mismatch plus centered bed source), written
//! in the factored form
//!
//!   press_i = g/2 (h_{i,L} + h_{i,R}) (H_{i,R} - H_{i,L})
//!
//! over the cell's own unclipped face traces. At rest H_{i,R} = H_{i,L}
//! bit for bit and the clipped pressures cancel the interface fluxes
//! exactly, so lake-at-rest data is a fixed point (C-property) at both
//! orders; with zero slopes press_i vanishes and the first-order scheme
//! is recovered unchanged.
//!
//! Second order is a one-step MUSCL scheme: minmod-limited slopes of the
//! primitives (h, u, psi) and of the free surface H, followed by a
//! half-time-step predictor in primitive form,
//!
//!   dh/dt = -(h u_x + u h_x),  du/dt = -u u_x - g H_x,  dpsi/dt = -u psi_x,
//!
//! applied to both face traces. Zero slopes make every term of the
//! predictor and reconstruction degenerate to the cell value, so the
//! second-order step reproduces the first-order step bit-for-bit.
//!
//! States are stored with two ghost layers per side; global index
//! idx = i + NG addresses interior cell i.

use crate::riemann::{
    exact_swe_solver, fvs_interface_flux, FluxMode, RiemannError, SolverTolerances,
};
use crate::state::{celerity, Primitive1D, State1D, H_DRY};
use thiserror::Error;

/// Ghost layers on each side of the interior cells (reconstruction stencil).
pub const NG: usize = 2;

/// Depths produced by an update below this threshold abort the run; depths
/// in [-NEG_DEPTH_ABORT, 0) are round-off and are clamped to a dry cell.
pub const NEG_DEPTH_ABORT: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum Solver1DError {
    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },
    #[error("no wet cells at t = {time} s: cannot form a CFL time step")]
    AllDry { time: f64 },
    #[error("depth {h} in cell {cell} at t = {time} s is below the -1e-12 m clamp window")]
    NegativeDepth { cell: usize, time: f64, h: f64 },
    #[error("step budget of {max_steps} exhausted at t = {time} s")]
    StepBudget { max_steps: u64, time: f64 },
    #[error(transparent)]
    Riemann(#[from] RiemannError),
}

/// Uniform 1D grid of M cells on [x_min, x_max].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub m: usize,
    pub dx: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, m: usize) -> Result<Self, Solver1DError> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Solver1DError::InvalidGrid {
                reason: format!("need finite x_min < x_max, got [{x_min}, {x_max}]"),
            });
        }
        if m < 2 {
            return Err(Solver1DError::InvalidGrid {
                reason: format!("need at least 2 cells, got {m}"),
            });
        }
        Ok(Self {
            x_min,
            x_max,
            m,
            dx: (x_max - x_min) / m as f64,
        })
    }

    /// Center of interior cell i.
    pub fn cell_center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    /// Position of interface k (k = 0..=M).
    pub fn interface_x(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx
    }

    /// Center of the ghost-extended cell at global index idx.
    pub fn ghost_center(&self, idx: usize) -> f64 {
        self.x_min + (idx as f64 - NG as f64 + 0.5) * self.dx
    }
}

/// Bed elevation sampled at cell centers (ghost-extended) and stored per
/// interface as the hydrostatic value max(b_i, b_j) the first-order scheme
/// sees there. Ghost entries mirror the interior so every boundary type
/// keeps the free surface consistent across the boundary.
#[derive(Clone, Debug)]
pub struct Bathymetry1D {
    /// Per-cell elevation, length M + 2 NG.
    pub cell: Vec<f64>,
    /// Per-interface elevation max(b_left, b_right), length M + 1.
    pub face: Vec<f64>,
}

impl Bathymetry1D {
    pub fn flat(grid: &Grid1D) -> Self {
        Self {
            cell: vec![0.0; grid.m + 2 * NG],
            face: vec![0.0; grid.m + 1],
        }
    }

    pub fn from_fn(grid: &Grid1D, b: impl Fn(f64) -> f64) -> Self {
        let m = grid.m;
        let mut cell = vec![0.0; m + 2 * NG];
        for i in 0..m {
            cell[i + NG] = b(grid.cell_center(i));
        }
        // Mirror into the ghosts.
        for k in 0..NG {
            cell[NG - 1 - k] = cell[NG + k];
            cell[NG + m + k] = cell[NG + m - 1 - k];
        }
        let face = (0..=m).map(|k| cell[k + 1].max(cell[k + 2])).collect();
        Self { cell, face }
    }
}

/// Boundary condition for one end of the domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bc1D {
    /// Ghosts copy the adjacent interior cell (transparent outflow).
    Transmissive,
    /// Ghosts mirror the interior with negated discharge (solid wall).
    Reflective,
    /// Fixed boundary discharge; the ghost depth extrapolates the outgoing
    /// characteristic invariant u -+ 2c, the scalar the interior value.
    SubcriticalInflow { q: f64 },
    /// Fixed boundary depth; the ghost velocity extrapolates the outgoing
    /// invariant, the scalar the interior value.
    SubcriticalOutflow { h: f64 },
}

/// Interface flux selector for the conservative update.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FluxScheme {
    /// Split flux with the closed-form two-rarefaction star state.
    #[default]
    FvsTwoRarefaction,
    /// Split flux with the Newton star state.
    FvsExact,
    /// Physical flux of the exact solver's solution sampled at xi = 0.
    GodunovExact,
}

/// Spatial/temporal order of the update.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SchemeOrder {
    #[default]
    First,
    Second,
}

/// Evolving 1D run: time, step count, ghost-extended cell states, and the
/// active boundary conditions.
#[derive(Clone, Debug)]
pub struct RunState1D {
    pub grid: Grid1D,
    pub time: f64,
    pub step: u64,
    /// Length M + 2 NG; interior cell i lives at index i + NG.
    pub cells: Vec<State1D>,
    pub bc_left: Bc1D,
    pub bc_right: Bc1D,
}

impl RunState1D {
    /// Initializes the interior from a primitive-valued function of x.
    /// Ghosts stay at the default state until [`apply_bc`] runs; every step
    /// refills them before computing fluxes.
    pub fn new(
        grid: Grid1D,
        bc_left: Bc1D,
        bc_right: Bc1D,
        init: impl Fn(f64) -> Primitive1D,
    ) -> Self {
        let mut cells = vec![State1D::default(); grid.m + 2 * NG];
        for (i, c) in cells.iter_mut().skip(NG).take(grid.m).enumerate() {
            *c = init(grid.cell_center(i)).conserved();
        }
        Self {
            grid,
            time: 0.0,
            step: 0,
            cells,
            bc_left,
            bc_right,
        }
    }

    pub fn interior(&self) -> &[State1D] {
        &self.cells[NG..NG + self.grid.m]
    }

    pub fn interior_mut(&mut self) -> &mut [State1D] {
        let m = self.grid.m;
        &mut self.cells[NG..NG + m]
    }

    /// Total water volume per unit width, sum of h dx over the interior.
    pub fn total_mass(&self) -> f64 {
        self.interior().iter().map(|q| q.h).sum::<f64>() * self.grid.dx
    }

    /// Total scalar mass, sum of h psi dx over the interior.
    pub fn total_scalar_mass(&self) -> f64 {
        self.interior().iter().map(|q| q.hpsi).sum::<f64>() * self.grid.dx
    }
}

/// Ghost depth of a fixed-discharge boundary: solves
/// q/h + 2 n sqrt(g h) = u0 + 2 n c0 for h, extrapolating the outgoing
/// invariant from the first interior cell. n is the outward normal (-1 left,
/// +1 right); for subcritical inflow data f is monotone in h, so the
/// safeguarded Newton iteration converges from the interior depth.
fn inflow_ghost_depth(q: f64, h0: f64, u0: f64, g: f64, n: f64) -> f64 {
    let k = u0 + 2.0 * n * (g * h0).sqrt();
    let mut h = h0;
    for _ in 0..30 {
        let c = (g * h).sqrt();
        let f = q / h + 2.0 * n * c - k;
        let df = -q / (h * h) + n * c / h;
        let mut next = h - f / df;
        if !next.is_finite() || next <= 0.0 {
            next = 0.5 * h;
        }
        if (next - h).abs() <= 1e-13 * next.max(1.0) {
            return next;
        }
        h = next;
    }
    h
}

/// Ghost state outside a boundary with outward normal n, built from the
/// adjacent interior cell.
fn ghost_value(bc: Bc1D, interior: State1D, g: f64, n: f64) -> State1D {
    match bc {
        Bc1D::Transmissive => interior,
        Bc1D::Reflective => State1D::new(interior.h, -interior.hu, interior.hpsi),
        Bc1D::SubcriticalInflow { q } => {
            let p = interior.primitive();
            if p.h > H_DRY {
                let h = inflow_ghost_depth(q, p.h, p.u, g, n);
                State1D::new(h, q, h * p.psi)
            } else {
                State1D::new(p.h, q, interior.hpsi)
            }
        }
        Bc1D::SubcriticalOutflow { h } => {
            let p = interior.primitive();
            let u = p.u + 2.0 * n * ((g * p.h).sqrt() - (g * h).sqrt());
            State1D::new(h, h * u, h * p.psi)
        }
    }
}

/// Fills both ghost layers on each side. Reflective walls mirror the
/// interior layer by layer (exact wall symmetry); all other kinds replicate
/// one ghost state derived from the adjacent interior cell.
pub fn apply_bc(state: &mut RunState1D, left: Bc1D, right: Bc1D, g: f64) {
    let m = state.grid.m;
    if left == Bc1D::Reflective {
        for k in 0..NG {
            let q = state.cells[NG + k];
            state.cells[NG - 1 - k] = State1D::new(q.h, -q.hu, q.hpsi);
        }
    } else {
        let gv = ghost_value(left, state.cells[NG], g, -1.0);
        for k in 0..NG {
            state.cells[NG - 1 - k] = gv;
        }
    }
    if right == Bc1D::Reflective {
        for k in 0..NG {
            let q = state.cells[NG + m - 1 - k];
            state.cells[NG + m + k] = State1D::new(q.h, -q.hu, q.hpsi);
        }
    } else {
        let gv = ghost_value(right, state.cells[NG + m - 1], g, 1.0);
        for k in 0..NG {
            state.cells[NG + m + k] = gv;
        }
    }
}

/// CFL time step dt = cfl dx / max_i(|u_i| + c_i) over wet interior cells,
/// optionally capped so the next output time is hit exactly.
pub fn compute_dt(
    state: &RunState1D,
    g: f64,
    cfl: f64,
    next_output: Option<f64>,
) -> Result<f64, Solver1DError> {
    debug_assert!(cfl > 0.0, "CFL coefficient must be positive");
    let mut smax: f64 = 0.0;
    let mut wet = false;
    for q in state.interior() {
        if q.h > H_DRY {
            wet = true;
            smax = smax.max(q.velocity().abs() + celerity(q.h, g));
        }
    }
    if !wet {
        return Err(Solver1DError::AllDry { time: state.time });
    }
    let mut dt = cfl * state.grid.dx / smax;
    if let Some(t_next) = next_output {
        if t_next > state.time {
            dt = dt.min(t_next - state.time);
        }
    }
    Ok(dt)
}

fn minmod(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 {
        a.min(b)
    } else if a < 0.0 && b < 0.0 {
        a.max(b)
    } else {
        0.0
    }
}

/// Half-step-evolved face traces of one cell. `eta` is the free surface
/// H = h + b; the Riemann side depths are recovered as max(0, eta - b_hat).
#[derive(Clone, Copy, Debug, Default)]
struct FaceTrace {
    b_l: f64,
    b_r: f64,
    eta_l: f64,
    eta_r: f64,
    u_l: f64,
    u_r: f64,
    psi_l: f64,
    psi_r: f64,
}

/// Hydrostatically clipped interface inputs and per-cell own-side depths.
struct Traces {
    /// Riemann inputs per interface k = 0..=M.
    left_in: Vec<Primitive1D>,
    right_in: Vec<Primitive1D>,
    /// Clipped depth on a cell's own side of its left/right face, indexed by
    /// global cell index; feeds the momentum source.
    own_l: Vec<f64>,
    own_r: Vec<f64>,
    /// Per-cell factored pressure/bed term g/2 (h_L + h_R)(H_R - H_L) over
    /// the cell's own unclipped reconstructed faces. Zero with zero slopes.
    press: Vec<f64>,
}

fn face_traces(
    state: &RunState1D,
    bath: &Bathymetry1D,
    order: SchemeOrder,
    g: f64,
    dt: f64,
) -> Traces {
    let m = state.grid.m;
    let n = m + 2 * NG;
    let dx = state.grid.dx;
    debug_assert_eq!(state.cells.len(), n);
    debug_assert_eq!(bath.cell.len(), n);

    // Primitives plus the free surface per cell: (h, u, psi, H).
    let mut w = Vec::with_capacity(n);
    for idx in 0..n {
        let p = state.cells[idx].primitive();
        w.push([p.h, p.u, p.psi, p.h + bath.cell[idx]]);
    }

    // Minmod-limited slopes; first order leaves them at zero, which makes
    // every face expression below collapse to the cell value exactly.
    let mut sl = vec![[0.0; 4]; n];
    if order == SchemeOrder::Second {
        for idx in 1..n - 1 {
            for c in 0..4 {
                let d_up = (w[idx][c] - w[idx - 1][c]) / dx;
                let d_dn = (w[idx + 1][c] - w[idx][c]) / dx;
                sl[idx][c] = minmod(d_up, d_dn);
            }
        }
    }

    let hdx = 0.5 * dx;
    let hdt = 0.5 * dt;
    let mut face = vec![FaceTrace::default(); n];
    for idx in 1..n - 1 {
        let [h, u, psi, eta] = w[idx];
        let [sh, su, spsi, seta] = sl[idx];
        // Bed slope as the difference of the H and h slopes, so the face bed
        // values are exact cell values whenever the slopes vanish.
        let sb = seta - sh;
        let b = bath.cell[idx];
        let dh = -(h * su + u * sh);
        let du = -u * su - g * seta;
        let dpsi = -u * spsi;
        face[idx] = FaceTrace {
            b_l: b - hdx * sb,
            b_r: b + hdx * sb,
            eta_l: (eta - hdx * seta) + hdt * dh,
            eta_r: (eta + hdx * seta) + hdt * dh,
            u_l: (u - hdx * su) + hdt * du,
            u_r: (u + hdx * su) + hdt * du,
            psi_l: (psi - hdx * spsi) + hdt * dpsi,
            psi_r: (psi + hdx * spsi) + hdt * dpsi,
        };
    }

    let mut press = vec![0.0; n];
    for idx in 1..n - 1 {
        let f = &face[idx];
        let h_l = (f.eta_l - f.b_l).max(0.0);
        let h_r = (f.eta_r - f.b_r).max(0.0);
        press[idx] = 0.5 * g * (h_l + h_r) * (f.eta_r - f.eta_l);
    }

    let mut left_in = Vec::with_capacity(m + 1);
    let mut right_in = Vec::with_capacity(m + 1);
    let mut own_l = vec![0.0; n];
    let mut own_r = vec![0.0; n];
    for k in 0..=m {
        let li = k + NG - 1;
        let ri = k + NG;
        let (fl, fr) = (&face[li], &face[ri]);
        let b_hat = fl.b_r.max(fr.b_l);
        let hs_l = (fl.eta_r - b_hat).max(0.0);
        let hs_r = (fr.eta_l - b_hat).max(0.0);
        own_r[li] = hs_l;
        own_l[ri] = hs_r;
        left_in.push(Primitive1D::new(hs_l, fl.u_r, fl.psi_r));
        right_in.push(Primitive1D::new(hs_r, fr.u_l, fr.psi_l));
    }
    Traces {
        left_in,
        right_in,
        own_l,
        own_r,
        press,
    }
}

fn interface_flux(
    left: Primitive1D,
    right: Primitive1D,
    g: f64,
    scheme: FluxScheme,
) -> Result<[f64; 3], RiemannError> {
    match scheme {
        FluxScheme::FvsTwoRarefaction => fvs_interface_flux(left, right, g, FluxMode::TwoRarefaction),
        FluxScheme::FvsExact => fvs_interface_flux(left, right, g, FluxMode::ExactNewton),
        FluxScheme::GodunovExact => {
            Ok(exact_swe_solver(left, right, g, SolverTolerances::default())?.godunov_flux())
        }
    }
}

fn depth_policy(h: f64, hu: f64, hpsi: f64, cell: usize, time: f64) -> Result<State1D, Solver1DError> {
    if h < -NEG_DEPTH_ABORT || !h.is_finite() {
        return Err(Solver1DError::NegativeDepth { cell, time, h });
    }
    if h < 0.0 {
        return Ok(State1D::new(0.0, 0.0, 0.0));
    }
    Ok(State1D::new(h, hu, hpsi))
}

fn advance(
    state: &mut RunState1D,
    bath: &Bathymetry1D,
    order: SchemeOrder,
    flux: FluxScheme,
    g: f64,
    dt: f64,
) -> Result<(), Solver1DError> {
    apply_bc(state, state.bc_left, state.bc_right, g);
    let tr = face_traces(state, bath, order, g, dt);
    let m = state.grid.m;
    let mut fluxes = vec![[0.0; 3]; m + 1];
    for k in 0..=m {
        fluxes[k] = interface_flux(tr.left_in[k], tr.right_in[k], g, flux)?;
    }
    let r = dt / state.grid.dx;
    for i in 0..m {
        let idx = i + NG;
        let q = state.cells[idx];
        let (fl, fr) = (fluxes[i], fluxes[i + 1]);
        // Own-side hydrostatic pressures; the grouping (flux - pressure) per
        // face makes the momentum balance cancel exactly at rest, and the
        // factored press term carries the reconstructed pressure difference
        // and the centered bed source together.
        let px_l = 0.5 * g * tr.own_l[idx] * tr.own_l[idx];
        let px_r = 0.5 * g * tr.own_r[idx] * tr.own_r[idx];
        let h = q.h - r * (fr[0] - fl[0]);
        let hu = q.hu - r * ((fr[1] - px_r) - (fl[1] - px_l)) - r * tr.press[idx];
        let hpsi = q.hpsi - r * (fr[2] - fl[2]);
        state.cells[idx] = depth_policy(h, hu, hpsi, i, state.time)?;
    }
    state.time += dt;
    state.step += 1;
    Ok(())
}

/// First-order conservative step.
pub fn step_first_order(
    state: &mut RunState1D,
    bath: &Bathymetry1D,
    flux: FluxScheme,
    g: f64,
    dt: f64,
) -> Result<(), Solver1DError> {
    advance(state, bath, SchemeOrder::First, flux, g, dt)
}

/// One-step second-order (MUSCL + half-step predictor) update. With zero
/// reconstruction slopes this reproduces [`step_first_order`] bit-for-bit.
pub fn step_second_order(
    state: &mut RunState1D,
    bath: &Bathymetry1D,
    flux: FluxScheme,
    g: f64,
    dt: f64,
) -> Result<(), Solver1DError> {
    advance(state, bath, SchemeOrder::Second, flux, g, dt)
}

/// Order-dispatching step.
pub fn step(
    state: &mut RunState1D,
    bath: &Bathymetry1D,
    order: SchemeOrder,
    flux: FluxScheme,
    g: f64,
    dt: f64,
) -> Result<(), Solver1DError> {
    advance(state, bath, order, flux, g, dt)
}

/// Per-cell source contribution of the bed slope for the current state, as
/// the integrated step applies it at the start of a step: (0, s_i, 0) with
/// s_i = g/(2 dx) [(h*_{i,R})^2 - (h*_{i,L})^2] from the hydrostatically
/// clipped own-side face depths, minus the factored reconstruction term.
/// Flat beds yield exact zeros at first order and round-off-level values
/// at second order.
pub fn bed_source(
    state: &RunState1D,
    bath: &Bathymetry1D,
    order: SchemeOrder,
) -> Vec<[f64; 3]> {
    let g = crate::state::PhysConstants::default().g;
    bed_source_with_g(state, bath, order, g)
}

/// [`bed_source`] with an explicit gravitational constant.
pub fn bed_source_with_g(
    state: &RunState1D,
    bath: &Bathymetry1D,
    order: SchemeOrder,
    g: f64,
) -> Vec<[f64; 3]> {
    // Ghosts of the caller's state may be stale; trace a filled copy with
    // dt = 0, which keeps the half-step predictor at the identity.
    let mut filled = state.clone();
    let (bl, br) = (filled.bc_left, filled.bc_right);
    apply_bc(&mut filled, bl, br, g);
    let tr = face_traces(&filled, bath, order, g, 0.0);
    let dx = state.grid.dx;
    (0..state.grid.m)
        .map(|i| {
            let idx = i + NG;
            let px_l = 0.5 * g * tr.own_l[idx] * tr.own_l[idx];
            let px_r = 0.5 * g * tr.own_r[idx] * tr.own_r[idx];
            [0.0, ((px_r - px_l) - tr.press[idx]) / dx, 0.0]
        })
        .collect()
}

/// Advances the state to exactly t_end with CFL-limited steps, snapping the
/// final time against the capped last step's round-off.
#[allow(clippy::too_many_arguments)]
pub fn run_until(
    state: &mut RunState1D,
    bath: &Bathymetry1D,
    order: SchemeOrder,
    flux: FluxScheme,
    g: f64,
    cfl: f64,
    t_end: f64,
    max_steps: u64,
) -> Result<(), Solver1DError> {
    let mut steps = 0u64;
    while state.time < t_end {
        if steps >= max_steps {
            return Err(Solver1DError::StepBudget {
                max_steps,
                time: state.time,
            });
        }
        let dt = compute_dt(state, g, cfl, Some(t_end))?;
        advance(state, bath, order, flux, g, dt)?;
        steps += 1;
        if (t_end - state.time).abs() <= 4.0 * f64::EPSILON * t_end.abs().max(1.0) {
            state.time = t_end;
        }
    }
    Ok(())
}

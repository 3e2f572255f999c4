//! Finite-volume solver for the shallow water equations built on an
//! advection-pressure flux-vector splitting.
//!
//! The physical flux is split into an advection part (pure transport at the
//! interface volume flux) and a pressure part (mass flux and hydrostatic
//! pressure). The pressure subsystem is always subcritical, so its interface
//! state comes straight from a star-state solver with no wave sampling; the
//! advection part is upwinded by the sign of the interface discharge.
//!
//! Layout:
//! - [`state`]: state vectors, physical and split fluxes, normal rotations
//! - [`riemann`]: pressure-system star solvers (closed-form two-rarefaction
//!   and Newton), the full-SWE exact solver, and the split interface flux
//! - [`solver1d`]: well-balanced first/second-order 1D driver
//! - [`mesh`]: unstructured triangular meshes with edge-based connectivity
//! - [`solver2d`]: edge-based 2D driver on triangular meshes
//! - [`cases`]: canonical test problems and their reference solutions

pub mod cases;
pub mod mesh;
pub mod riemann;
pub mod solver1d;
pub mod solver2d;
pub mod state;

//! State vectors, physical fluxes, the advection-pressure flux splitting,
//! and rotation to/from edge-normal frames.
//!
//! Conserved 1D variables are (h, hu, h psi) with a passively advected
//! scalar psi; 2D variables are (h, qx, qy) with discharges q = h v.
//! The splitting used throughout is
//!
//!   F = F_a + F_p,   1D: F_a = (0, hu^2/h, hu psi),  F_p = (hu, g h^2/2, 0)
//!
//! and the obvious per-direction analogue in 2D. The split parts are written
//! with exactly the same component expressions as the full fluxes so that
//! F_a + F_p reproduces F bit-for-bit; keep the expressions in sync when
//! editing either side.

/// Depth below which a cell is treated as dry: velocities and scalar
/// concentrations recovered from conserved variables are zeroed and fluxes
/// vanish.
pub const H_DRY: f64 = 1e-10;

/// Physical constants shared by every solver component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysConstants {
    /// Gravitational acceleration [m/s^2].
    pub g: f64,
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self { g: 9.81 }
    }
}

/// Conserved 1D state (depth, discharge, scalar mass).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct State1D {
    pub h: f64,
    pub hu: f64,
    pub hpsi: f64,
}

/// Primitive 1D state (depth, velocity, scalar concentration).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Primitive1D {
    pub h: f64,
    pub u: f64,
    pub psi: f64,
}

/// Conserved 2D state (depth, x-discharge, y-discharge).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct State2D {
    pub h: f64,
    pub qx: f64,
    pub qy: f64,
}

impl State1D {
    pub fn new(h: f64, hu: f64, hpsi: f64) -> Self {
        Self { h, hu, hpsi }
    }

    /// Velocity with the dry guard: u = hu/h for h > H_DRY, else 0.
    pub fn velocity(&self) -> f64 {
        if self.h > H_DRY {
            self.hu / self.h
        } else {
            0.0
        }
    }

    /// Primitive variables with dry-guarded division.
    pub fn primitive(&self) -> Primitive1D {
        if self.h > H_DRY {
            Primitive1D {
                h: self.h,
                u: self.hu / self.h,
                psi: self.hpsi / self.h,
            }
        } else {
            Primitive1D {
                h: self.h.max(0.0),
                u: 0.0,
                psi: 0.0,
            }
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.h, self.hu, self.hpsi]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self {
            h: a[0],
            hu: a[1],
            hpsi: a[2],
        }
    }
}

impl Primitive1D {
    pub fn new(h: f64, u: f64, psi: f64) -> Self {
        Self { h, u, psi }
    }

    pub fn conserved(&self) -> State1D {
        State1D {
            h: self.h,
            hu: self.h * self.u,
            hpsi: self.h * self.psi,
        }
    }

    /// Discharge q = h u.
    pub fn q(&self) -> f64 {
        self.h * self.u
    }
}

impl State2D {
    pub fn new(h: f64, qx: f64, qy: f64) -> Self {
        Self { h, qx, qy }
    }

    /// Velocity components with the dry guard.
    pub fn velocity(&self) -> (f64, f64) {
        if self.h > H_DRY {
            (self.qx / self.h, self.qy / self.h)
        } else {
            (0.0, 0.0)
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.h, self.qx, self.qy]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self {
            h: a[0],
            qx: a[1],
            qy: a[2],
        }
    }
}

/// Unit outward normal of an edge. Invariant: nx^2 + ny^2 = 1 to round-off.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitNormal {
    pub nx: f64,
    pub ny: f64,
}

impl UnitNormal {
    /// Wraps components that are already normalized.
    pub fn new(nx: f64, ny: f64) -> Self {
        debug_assert!(
            (nx * nx + ny * ny - 1.0).abs() < 1e-12,
            "normal ({nx}, {ny}) is not unit length"
        );
        Self { nx, ny }
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn from_vector(vx: f64, vy: f64) -> Self {
        let len = vx.hypot(vy);
        assert!(len > 0.0, "cannot normalize a zero vector");
        Self {
            nx: vx / len,
            ny: vy / len,
        }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self {
            nx: theta.cos(),
            ny: theta.sin(),
        }
    }

    /// Angle against the x-axis, in (-pi, pi].
    pub fn theta(&self) -> f64 {
        self.ny.atan2(self.nx)
    }
}

/// Gravity wave celerity c = sqrt(g h). Panics on negative depth.
pub fn celerity(h: f64, g: f64) -> f64 {
    assert!(h >= 0.0, "negative depth {h} passed to celerity");
    (g * h).sqrt()
}

/// Full physical 1D flux (hu, hu^2/h + g h^2/2, hu psi). Dry states
/// (h <= H_DRY) yield the zero flux.
pub fn flux_1d(q: State1D, g: f64) -> [f64; 3] {
    if q.h <= H_DRY {
        return [0.0; 3];
    }
    [
        q.hu,
        q.hu * q.hu / q.h + 0.5 * g * q.h * q.h,
        q.hu * q.hpsi / q.h,
    ]
}

/// Advection-pressure splitting of the 1D flux: returns (advective part,
/// pressure part). The parts sum to `flux_1d` bit-for-bit.
pub fn split_flux_1d(q: State1D, g: f64) -> ([f64; 3], [f64; 3]) {
    if q.h <= H_DRY {
        return ([0.0; 3], [0.0; 3]);
    }
    let advective = [0.0, q.hu * q.hu / q.h, q.hu * q.hpsi / q.h];
    let pressure = [q.hu, 0.5 * g * q.h * q.h, 0.0];
    (advective, pressure)
}

/// Full physical 2D flux: returns (Fx, Fy). Dry states yield zero fluxes.
pub fn flux_2d(q: State2D, g: f64) -> ([f64; 3], [f64; 3]) {
    if q.h <= H_DRY {
        return ([0.0; 3], [0.0; 3]);
    }
    let fx = [
        q.qx,
        q.qx * q.qx / q.h + 0.5 * g * q.h * q.h,
        q.qx * q.qy / q.h,
    ];
    let fy = [
        q.qy,
        q.qx * q.qy / q.h,
        q.qy * q.qy / q.h + 0.5 * g * q.h * q.h,
    ];
    (fx, fy)
}

/// Advection-pressure splitting of the 2D flux: returns ((Fx_a, Fx_p),
/// (Fy_a, Fy_p)). The parts sum to `flux_2d` bit-for-bit per direction.
#[allow(clippy::type_complexity)]
pub fn split_flux_2d(q: State2D, g: f64) -> (([f64; 3], [f64; 3]), ([f64; 3], [f64; 3])) {
    if q.h <= H_DRY {
        return (([0.0; 3], [0.0; 3]), ([0.0; 3], [0.0; 3]));
    }
    let fx_a = [0.0, q.qx * q.qx / q.h, q.qx * q.qy / q.h];
    let fx_p = [q.qx, 0.5 * g * q.h * q.h, 0.0];
    let fy_a = [0.0, q.qx * q.qy / q.h, q.qy * q.qy / q.h];
    let fy_p = [q.qy, 0.0, 0.5 * g * q.h * q.h];
    ((fx_a, fx_p), (fy_a, fy_p))
}

/// Rotates a 2D state into the frame of `n`: (h, q_n, q_t) with q_n the
/// discharge along the normal and q_t along the tangent.
pub fn rotate(q: State2D, n: UnitNormal) -> State2D {
    State2D {
        h: q.h,
        qx: n.nx * q.qx + n.ny * q.qy,
        qy: -n.ny * q.qx + n.nx * q.qy,
    }
}

/// Inverse of [`rotate`].
pub fn rotate_back(q: State2D, n: UnitNormal) -> State2D {
    State2D {
        h: q.h,
        qx: n.nx * q.qx - n.ny * q.qy,
        qy: n.ny * q.qx + n.nx * q.qy,
    }
}

/// Rotates a flux vector computed in the normal frame back to x-y components.
/// The scalar (mass) component is frame invariant; the momentum pair rotates
/// like a vector.
pub fn rotate_back_flux(f: [f64; 3], n: UnitNormal) -> [f64; 3] {
    [
        f[0],
        n.nx * f[1] - n.ny * f[2],
        n.ny * f[1] + n.nx * f[2],
    ]
}

/// Componentwise a + b for flux vectors.
pub fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Componentwise a - b for flux vectors.
pub fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Componentwise s * a for flux vectors.
pub fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    [s * a[0], s * a[1], s * a[2]]
}

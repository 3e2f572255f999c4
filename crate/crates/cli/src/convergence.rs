//! Mesh-refinement study against the manufactured solution: runs the
//! case on a family of structured meshes, scores the x-discharge against
//! the closed form at the final time, and reports observed orders.

use crate::error::CliError;
use crate::norms::{observed_order, weighted_norms, NormTriple};
use crate::runner::case_hooks;
use std::fmt::Write as _;
use swe_core::cases::{init_state_2d, manufactured_case, manufactured_exact, CaseSetup};
use swe_core::mesh::generate_rect_mesh;
use swe_core::solver1d::{FluxScheme, SchemeOrder};
use swe_core::solver2d::run_until_2d;

const MAX_STEPS: u64 = 200_000_000;

#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRow {
    pub nx: usize,
    pub dx: f64,
    pub norms: NormTriple,
    /// L1 order against the previous (coarser) row.
    pub order_l1: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    /// Variable the errors score; q_x for the manufactured case.
    pub variable: &'static str,
    pub t_end: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceStudy {
    /// Order observed on the two finest meshes.
    pub fn finest_order(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.order_l1)
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>6} {:>12} {:>14} {:>14} {:>14} {:>8}",
            "nx", "dx", "L1", "L2", "Linf", "order"
        );
        for row in &self.rows {
            let order = row
                .order_l1
                .map_or_else(|| "-".to_string(), |o| format!("{o:.3}"));
            let _ = writeln!(
                out,
                "{:>6} {:>12.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>8}",
                row.nx, row.dx, row.norms.l1, row.norms.l2, row.norms.linf, order
            );
        }
        out
    }
}

/// Runs the manufactured case at each resolution (ny = nx) to T = 1 and
/// scores q_x at cell centroids against the closed form.
pub fn manufactured_convergence(
    order: SchemeOrder,
    flux: FluxScheme,
    resolutions: &[usize],
) -> Result<ConvergenceStudy, CliError> {
    if resolutions.len() < 2 || !resolutions.windows(2).all(|w| w[0] < w[1]) {
        return Err(CliError::Usage(
            "convergence needs at least two increasing resolutions".into(),
        ));
    }
    let case = manufactured_case();
    let CaseSetup::TwoD(setup) = &case.setup else {
        unreachable!("the manufactured case is two-dimensional");
    };
    let t_end = *case.output_times.last().expect("case has a final time");

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(resolutions.len());
    for &nx in resolutions {
        if nx < 2 {
            return Err(CliError::Usage(format!("resolution must be >= 2, got {nx}")));
        }
        let mesh = generate_rect_mesh(nx, nx, setup.lx, setup.ly, setup.origin)?;
        let (mut state, bath) = init_state_2d(setup, &mesh)?;
        run_until_2d(
            &mut state,
            &mesh,
            &bath,
            order,
            flux,
            case.g,
            case.cfl,
            t_end,
            MAX_STEPS,
            case_hooks(setup),
        )?;
        let mut errors = Vec::with_capacity(mesh.n_cells());
        for i in 0..mesh.n_cells() {
            let [x, y] = mesh.centroids[i];
            let exact = manufactured_exact(x, y, t_end);
            errors.push(state.cells[i].qx - exact.qx);
        }
        let norms = weighted_norms(&errors, &mesh.areas);
        let dx = setup.lx / nx as f64;
        let order_l1 = rows
            .last()
            .map(|prev: &ConvergenceRow| observed_order(prev.norms.l1, norms.l1, prev.dx, dx));
        rows.push(ConvergenceRow {
            nx,
            dx,
            norms,
            order_l1,
        });
    }
    Ok(ConvergenceStudy {
        variable: "qx",
        t_end,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn study_rejects_degenerate_mesh_families() {
        assert!(matches!(
            manufactured_convergence(SchemeOrder::First, FluxScheme::FvsTwoRarefaction, &[16]),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            manufactured_convergence(
                SchemeOrder::First,
                FluxScheme::FvsTwoRarefaction,
                &[32, 16]
            ),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn coarse_study_converges_toward_first_order() {
        let study = manufactured_convergence(
            SchemeOrder::First,
            FluxScheme::FvsTwoRarefaction,
            &[8, 16],
        )
        .unwrap();
        println!("{}", study.table());
        assert_eq!(study.rows.len(), 2);
        assert!(study.rows[0].order_l1.is_none());
        let order = study.finest_order().unwrap();
        // Coarse meshes only bracket the asymptotic rate loosely.
        assert!(order > 0.4 && order < 1.6, "observed order {order}");
        assert!(study.rows[1].norms.l1 < study.rows[0].norms.l1);
    }
}

//! Volume-weighted error norms and observed convergence orders.

/// L1, L2, and Linf of one error field. The weighted norms are
///
///   L1 = sum |e_i| w_i / sum w_i,   L2 = sqrt(sum e_i^2 w_i / sum w_i),
///
/// with w_i the cell volume (dx in 1D, the triangle area in 2D); Linf is
/// the plain maximum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormTriple {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

pub fn weighted_norms(errors: &[f64], weights: &[f64]) -> NormTriple {
    assert_eq!(errors.len(), weights.len(), "one weight per error entry");
    assert!(!errors.is_empty(), "norms of an empty field are undefined");
    let total: f64 = weights.iter().sum();
    assert!(total > 0.0, "weights must have positive total volume");
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    let mut linf: f64 = 0.0;
    for (&e, &w) in errors.iter().zip(weights) {
        l1 += e.abs() * w;
        l2 += e * e * w;
        linf = linf.max(e.abs());
    }
    NormTriple {
        l1: l1 / total,
        l2: (l2 / total).sqrt(),
        linf,
    }
}

/// Error norms of one variable against its reference.
#[derive(Clone, Debug)]
pub struct VariableError {
    pub variable: String,
    pub norms: NormTriple,
}

/// Per-variable error norms of one run, plus observed orders when the
/// report came from a mesh family.
#[derive(Clone, Debug, Default)]
pub struct ErrorReport {
    pub rows: Vec<VariableError>,
}

impl ErrorReport {
    pub fn push(&mut self, variable: impl Into<String>, norms: NormTriple) {
        self.rows.push(VariableError {
            variable: variable.into(),
            norms,
        });
    }

    pub fn get(&self, variable: &str) -> Option<&NormTriple> {
        self.rows
            .iter()
            .find(|r| r.variable == variable)
            .map(|r| &r.norms)
    }
}

/// Observed order between two meshes: log(e_coarse/e_fine) / log(dx_coarse/dx_fine).
pub fn observed_order(e_coarse: f64, e_fine: f64, dx_coarse: f64, dx_fine: f64) -> f64 {
    assert!(dx_coarse > dx_fine && dx_fine > 0.0, "meshes must refine");
    (e_coarse / e_fine).ln() / (dx_coarse / dx_fine).ln()
}

//! Verification of candidate solutions: gradients, viscosity inequalities,
//! orientation, semiconcavity, calibrated rays, level sets and the
//! orientation-changing set.

mod changing;
mod gradient;
mod level_set;
mod orientation;
mod rays;
mod semiconcavity;
mod viscosity;

pub use changing::{changing_set_report, ChangingSet};
pub use gradient::{
    eikonal_residual, gradient_map, gradient_probe, limiting_gradients, GradientSample, LimitingGradientSet,
    ResidualReport, CLUSTER_RADIUS, PROBE_MARGIN_CELLS,
};
pub use level_set::{extract_level_set, level_set_report, LevelSetReport};
pub use orientation::{
    node_labels, orientation_report, LabelCounts, NodeLabel, OrientationReport, TraceSummary, Verdict,
};
pub use rays::{trace_calibrated_ray, RayReport};
pub use semiconcavity::{semiconcavity_probe, Chord, SemiconcavityReport, SEMICONCAVITY_CONSTANTS};
pub use viscosity::{viscosity_check, ViscosityProbe};

use crate::field::ScalarField;
use crate::geometry::{Event, Spacetime};

/// Whether the field is defined on the axis-aligned cross and corners at
/// `cells` grid cells from `e`.
pub(crate) fn has_margin(st: &Spacetime, u: &ScalarField, e: &Event, cells: f64) -> bool {
    let (ht, hx) = (cells * u.grid.dt(), cells * u.grid.dx());
    [(0.0, 0.0), (ht, 0.0), (-ht, 0.0), (0.0, hx), (0.0, -hx), (ht, hx), (ht, -hx), (-ht, hx), (-ht, -hx)].iter().all(
        |&(dt, dx)| {
            let q = e.offset(dt, dx);
            st.contains(&q) && u.interpolate(&q).is_some()
        },
    )
}

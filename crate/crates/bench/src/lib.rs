//! Fixtures shared by the benchmarks.

use eikonal_core::solutions::{analytic_solution, AnalyticField, AnalyticKind};
use eikonal_core::{Grid, ScalarField, Slab, Spacetime};

pub fn unit_minkowski() -> Spacetime {
    Spacetime::minkowski2(Slab::new(-1.0, 1.0, -1.0, 1.0))
}

pub fn unit_grid(cells_per_unit: usize) -> Grid {
    Grid::with_resolution(Slab::new(-1.0, 1.0, -1.0, 1.0), cells_per_unit).expect("valid grid")
}

pub fn catalog_field(st: &Spacetime, cells_per_unit: usize, kind: AnalyticKind) -> ScalarField {
    analytic_solution(st, &unit_grid(cells_per_unit), &AnalyticField::new(kind))
}

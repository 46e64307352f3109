use serde::{Deserialize, Serialize};

use super::level_set::pairwise_acausal;
use super::orientation::{count_labels, node_labels, NodeLabel};
use crate::error::{Error, Result};
use crate::geometry::{Event, Spacetime};
use crate::grid::Grid;
use crate::solutions::FieldExpr;

/// Half-height, in cells, of the timelike segments used by the edge test.
const TUBE_CELLS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangingSet {
    pub grid: Grid,
    /// Nodes labelled `Changing`. The band is the true set inflated by about
    /// one cell on each side.
    pub flagged: Vec<bool>,
    pub flagged_count: usize,
    /// 4-connected components of the labelled, unflagged nodes.
    pub components: usize,
    pub acausal: bool,
    pub edgeless: bool,
    pub partial_cauchy: bool,
    /// `(Δx, flagged area fraction)` on the base grid and each halving.
    pub measure_trend: Vec<(f64, f64)>,
    pub null_limit_count: usize,
}

impl ChangingSet {
    pub fn is_empty(&self) -> bool {
        self.flagged_count == 0
    }

    pub fn flagged_events(&self) -> Vec<Event> {
        (0..self.grid.len())
            .filter(|&k| self.flagged[k])
            .map(|k| {
                let (j, i) = self.grid.split(k);
                self.grid.event(j, i)
            })
            .collect()
    }

    pub fn trend_decreasing(&self) -> bool {
        self.measure_trend.windows(2).all(|w| w[1].1 < w[0].1)
    }
}

fn flagged_fraction(labels: &[NodeLabel]) -> f64 {
    let c = count_labels(labels);
    let inside = labels.len() - c.undetermined;
    if inside == 0 {
        0.0
    } else {
        c.changing as f64 / inside as f64
    }
}

/// Component ids over nodes for which `open` holds.
fn components(grid: &Grid, open: &[bool]) -> (Vec<Option<usize>>, usize) {
    let mut id = vec![None; grid.len()];
    let mut n = 0;
    let mut stack = Vec::new();
    for start in 0..grid.len() {
        if !open[start] || id[start].is_some() {
            continue;
        }
        id[start] = Some(n);
        stack.push(start);
        while let Some(k) = stack.pop() {
            let (j, i) = grid.split(k);
            let mut nb = Vec::with_capacity(4);
            if j > 0 {
                nb.push(grid.index(j - 1, i));
            }
            if j + 1 < grid.nt {
                nb.push(grid.index(j + 1, i));
            }
            if i > 0 {
                nb.push(grid.index(j, i - 1));
            }
            if i + 1 < grid.nx {
                nb.push(grid.index(j, i + 1));
            }
            for m in nb {
                if open[m] && id[m].is_none() {
                    id[m] = Some(n);
                    stack.push(m);
                }
            }
        }
        n += 1;
    }
    (id, n)
}

/// Midpoints of the vertical runs of flagged nodes in each column.
fn thinned(grid: &Grid, flagged: &[bool]) -> Vec<Event> {
    let mut out = Vec::new();
    for i in 0..grid.nx {
        let mut j = 0;
        while j < grid.nt {
            if !flagged[grid.index(j, i)] {
                j += 1;
                continue;
            }
            let start = j;
            while j < grid.nt && flagged[grid.index(j, i)] {
                j += 1;
            }
            let mid = 0.5 * (grid.t(start) + grid.t(j - 1));
            out.push(Event::new(mid, grid.x(i)));
        }
    }
    out
}

/// Orientation-changing set of a field, with its causal structure on `grid`
/// and the flagged area fraction under `refinements` halvings.
pub fn changing_set_report(st: &Spacetime, u: &FieldExpr, grid: &Grid, refinements: usize) -> Result<ChangingSet> {
    let field = u.sample(st, grid)?;
    let labels = node_labels(st, &field);
    let counts = count_labels(&labels);
    let flagged: Vec<bool> = labels.iter().map(|l| *l == NodeLabel::Changing).collect();

    let open: Vec<bool> = labels
        .iter()
        .map(|l| matches!(l, NodeLabel::PastDirected | NodeLabel::FutureDirected | NodeLabel::NullLimit))
        .collect();
    let (ids, n_components) = components(grid, &open);

    let mids = thinned(grid, &flagged);
    let acausal = pairwise_acausal(st, &mids, grid.dx());

    // every column carrying labelled nodes must be crossed, and timelike
    // segments through the band must join distinct components
    let column_labelled = |i: usize| (0..grid.nt).any(|j| labels[grid.index(j, i)] != NodeLabel::Undetermined);
    let column_flagged = |i: usize| (0..grid.nt).any(|j| flagged[grid.index(j, i)]);
    let covered = mids.is_empty() || (0..grid.nx).filter(|&i| column_labelled(i)).all(column_flagged);
    let h = TUBE_CELLS * grid.dt();
    let tubes = mids.iter().all(|p| {
        let c = st.cone_slope(p);
        [-0.5, 0.0, 0.5].iter().all(|&v| {
            let a = p.offset(-h, -v * c * h);
            let b = p.offset(h, v * c * h);
            let id_at = |e: &Event| grid.nearest(e).and_then(|(j, i)| ids[grid.index(j, i)]);
            match (id_at(&a), id_at(&b)) {
                (Some(x), Some(y)) => x != y,
                _ => true,
            }
        })
    });
    let edgeless = covered && tubes;

    let mut measure_trend = vec![(grid.dx(), flagged_fraction(&labels))];
    let mut g = *grid;
    for _ in 0..refinements {
        g = g.refined();
        let f = u.sample(st, &g)?;
        measure_trend.push((g.dx(), flagged_fraction(&node_labels(st, &f))));
    }
    if measure_trend.iter().any(|(_, f)| !f.is_finite()) {
        return Err(Error::DegenerateField(Event::new(grid.t_min, grid.x_min)));
    }

    Ok(ChangingSet {
        grid: *grid,
        flagged_count: counts.changing,
        flagged,
        components: n_components,
        acausal,
        edgeless,
        partial_cauchy: acausal && edgeless,
        measure_trend,
        null_limit_count: counts.null_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Slab;
    use crate::solutions::{AnalyticField, AnalyticKind};

    fn unit() -> (Spacetime, Grid) {
        let st = Spacetime::minkowski2(Slab::new(-1.0, 1.0, -1.0, 1.0));
        let g = Grid::with_resolution(st.slab, 32).unwrap();
        (st, g)
    }

    #[test]
    fn abs_time_band() {
        let (st, g) = unit();
        let r = changing_set_report(&st, &AnalyticField::new(AnalyticKind::AbsTime).into(), &g, 2).unwrap();
        assert!(r.flagged_events().iter().all(|e| e.t.abs() <= g.dt() + 1e-12));
        assert_eq!(r.components, 2);
        assert!(r.acausal && r.edgeless && r.partial_cauchy);
        assert!(r.trend_decreasing(), "{:?}", r.measure_trend);
    }

    #[test]
    fn wedge_and_time() {
        let (st, g) = unit();
        let r = changing_set_report(&st, &AnalyticField::new(AnalyticKind::Wedge).into(), &g, 0).unwrap();
        assert!(r.flagged_events().iter().all(|e| e.t.abs() <= 2.0 * g.dt() + 1e-12));
        assert_eq!(r.components, 2);
        assert!(r.partial_cauchy);
        let r = changing_set_report(&st, &AnalyticField::new(AnalyticKind::CoordinateTime).into(), &g, 0).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.components, 1);
    }
}

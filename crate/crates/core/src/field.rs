use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Event, Slab, Spacetime};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Constructed,
    Analytic,
    Composed,
    Ingested,
}

/// Grid-sampled candidate solution with bilinear interpolation.
///
/// Nodes outside the spacetime domain, and nodes where a construction has no
/// value, hold `NaN` and count as undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub provenance: Provenance,
    /// Largest difference quotient between adjacent defined nodes, measured
    /// with the auxiliary metric.
    pub lipschitz: f64,
}

impl ScalarField {
    pub fn new(st: &Spacetime, grid: Grid, mut values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        for (k, v) in values.iter_mut().enumerate() {
            let (j, i) = grid.split(k);
            if !st.contains(&grid.event(j, i)) {
                *v = f64::NAN;
            }
        }
        let lipschitz = lipschitz_bound(st, &grid, &values, None);
        Ok(ScalarField { grid, values, provenance, lipschitz })
    }

    pub fn from_fn<F: Fn(&Event) -> f64>(st: &Spacetime, grid: Grid, provenance: Provenance, f: F) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                let (j, i) = grid.split(k);
                f(&grid.event(j, i))
            })
            .collect();
        Self::new(st, grid, values, provenance).expect("length matches by construction")
    }

    #[inline]
    pub fn get(&self, j: usize, i: usize) -> Option<f64> {
        let v = self.values[self.grid.index(j, i)];
        v.is_finite().then_some(v)
    }

    pub fn is_defined(&self, j: usize, i: usize) -> bool {
        self.values[self.grid.index(j, i)].is_finite()
    }

    pub fn defined_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_finite()).count()
    }

    /// Bilinear interpolation; `None` when a corner with positive weight is
    /// undefined or the event is off the grid.
    pub fn interpolate(&self, e: &Event) -> Option<f64> {
        bilinear(&self.grid, &self.values, e)
    }

    /// Lipschitz bound restricted to nodes inside `window`.
    pub fn lipschitz_in(&self, st: &Spacetime, window: &Slab) -> f64 {
        lipschitz_bound(st, &self.grid, &self.values, Some(window))
    }

    /// Largest nodewise difference over nodes defined in both fields.
    pub fn sup_diff(&self, other: &ScalarField, window: Option<&Slab>) -> Result<f64> {
        if !self.grid.same_shape(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let mut m: f64 = 0.0;
        for k in 0..self.grid.len() {
            let (a, b) = (self.values[k], other.values[k]);
            if !(a.is_finite() && b.is_finite()) {
                continue;
            }
            if let Some(w) = window {
                let (j, i) = self.grid.split(k);
                if !w.contains(&self.grid.event(j, i)) {
                    continue;
                }
            }
            m = m.max((a - b).abs());
        }
        Ok(m)
    }

    /// Pointwise map keeping undefined nodes undefined.
    pub fn map(&self, st: &Spacetime, provenance: Provenance, f: impl Fn(f64) -> f64) -> ScalarField {
        let values = self.values.iter().map(|&v| if v.is_finite() { f(v) } else { f64::NAN }).collect();
        ScalarField::new(st, self.grid, values, provenance).expect("same grid")
    }

    /// Resamples onto another grid by bilinear interpolation.
    pub fn resample(&self, st: &Spacetime, grid: Grid) -> ScalarField {
        ScalarField::from_fn(st, grid, self.provenance, |e| self.interpolate(e).unwrap_or(f64::NAN))
    }
}

pub(crate) fn bilinear(grid: &Grid, values: &[f64], e: &Event) -> Option<f64> {
    let (fj, fi) = grid.locate(e);
    let (nt, nx) = (grid.nt as f64, grid.nx as f64);
    const SLACK: f64 = 1e-9;
    if fj < -SLACK || fi < -SLACK || fj > nt - 1.0 + SLACK || fi > nx - 1.0 + SLACK {
        return None;
    }
    let fj = fj.clamp(0.0, nt - 1.0);
    let fi = fi.clamp(0.0, nx - 1.0);
    let j0 = (fj.floor() as usize).min(grid.nt - 2);
    let i0 = (fi.floor() as usize).min(grid.nx - 2);
    let wt = fj - j0 as f64;
    let wx = fi - i0 as f64;
    let mut acc = 0.0;
    for (dj, w1) in [(0usize, 1.0 - wt), (1, wt)] {
        if w1 <= 1e-12 {
            continue;
        }
        for (di, w2) in [(0usize, 1.0 - wx), (1, wx)] {
            if w2 <= 1e-12 {
                continue;
            }
            let v = values[grid.index(j0 + dj, i0 + di)];
            if !v.is_finite() {
                return None;
            }
            acc += w1 * w2 * v;
        }
    }
    Some(acc)
}

fn lipschitz_bound(st: &Spacetime, grid: &Grid, values: &[f64], window: Option<&Slab>) -> f64 {
    let inside = |j: usize, i: usize| window.is_none_or(|w| w.contains(&grid.event(j, i)));
    let mut lip: f64 = 0.0;
    for j in 0..grid.nt {
        for i in 0..grid.nx {
            let v = values[grid.index(j, i)];
            if !v.is_finite() || !inside(j, i) {
                continue;
            }
            let p = grid.event(j, i);
            if j + 1 < grid.nt && inside(j + 1, i) {
                let w = values[grid.index(j + 1, i)];
                if w.is_finite() {
                    lip = lip.max((w - v).abs() / st.h_distance(&p, &grid.event(j + 1, i)));
                }
            }
            if i + 1 < grid.nx && inside(j, i + 1) {
                let w = values[grid.index(j, i + 1)];
                if w.is_finite() {
                    lip = lip.max((w - v).abs() / st.h_distance(&p, &grid.event(j, i + 1)));
                }
            }
        }
    }
    lip
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilinear_is_exact_on_bilinear_functions() {
        let st = Spacetime::minkowski2(Slab::new(-1.0, 1.0, -1.0, 1.0));
        let g = Grid::new(st.slab, 17, 33).unwrap();
        let f = ScalarField::from_fn(&st, g, Provenance::Analytic, |e| 2.0 * e.t - 3.0 * e.x + e.t * e.x);
        let p = Event::new(0.123, -0.456);
        assert!((f.interpolate(&p).unwrap() - (2.0 * p.t - 3.0 * p.x + p.t * p.x)).abs() < 1e-12);
        assert!(f.interpolate(&Event::new(1.0, 1.0)).is_some());
        assert!(f.interpolate(&Event::new(1.01, 0.0)).is_none());
    }

    #[test]
    fn undefined_outside_mask() {
        let st = Spacetime::diamond();
        let g = Grid::new(st.slab, 33, 33).unwrap();
        let f = ScalarField::from_fn(&st, g, Provenance::Analytic, |e| e.t);
        assert!(f.get(0, 0).is_none());
        assert_eq!(f.get(16, 16), Some(0.0));
        assert!((f.lipschitz - 1.0).abs() < 1e-12);
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Event, Slab, Spacetime};

/// Uniform tensor-product grid over a slab. Node `(j, i)` sits at
/// `(t_min + j dt, x_min + i dx)`; `j` indexes time slices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub t_min: f64,
    pub t_max: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub nt: usize,
    pub nx: usize,
}

impl Grid {
    pub fn new(slab: Slab, nt: usize, nx: usize) -> Result<Self> {
        if nt < 2 || nx < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 nodes per axis, got {nt}x{nx}")));
        }
        if !slab.is_valid() {
            return Err(Error::InvalidGrid("empty slab".into()));
        }
        Ok(Grid { t_min: slab.t_min, t_max: slab.t_max, x_min: slab.x_min, x_max: slab.x_max, nt, nx })
    }

    /// Grid with `cells` intervals per unit length on both axes.
    pub fn with_resolution(slab: Slab, cells_per_unit: usize) -> Result<Self> {
        let nt = ((slab.t_max - slab.t_min) * cells_per_unit as f64).round() as usize + 1;
        let nx = ((slab.x_max - slab.x_min) * cells_per_unit as f64).round() as usize + 1;
        Self::new(slab, nt, nx)
    }

    pub fn slab(&self) -> Slab {
        Slab::new(self.t_min, self.t_max, self.x_min, self.x_max)
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / (self.nt - 1) as f64
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    #[inline]
    pub fn t(&self, j: usize) -> f64 {
        self.t_min + j as f64 * self.dt()
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    #[inline]
    pub fn event(&self, j: usize, i: usize) -> Event {
        Event::new(self.t(j), self.x(i))
    }

    #[inline]
    pub fn index(&self, j: usize, i: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nt * self.nx
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.nx, idx % self.nx)
    }

    /// Fractional node coordinates of an event.
    #[inline]
    pub fn locate(&self, e: &Event) -> (f64, f64) {
        ((e.t - self.t_min) / self.dt(), (e.x - self.x_min) / self.dx())
    }

    /// Nearest node, if the event is inside the grid bounds.
    pub fn nearest(&self, e: &Event) -> Option<(usize, usize)> {
        let (fj, fi) = self.locate(e);
        let (j, i) = (fj.round(), fi.round());
        if j < 0.0 || i < 0.0 || j > (self.nt - 1) as f64 || i > (self.nx - 1) as f64 {
            return None;
        }
        Some((j as usize, i as usize))
    }

    pub fn contains(&self, e: &Event) -> bool {
        self.slab().contains(e)
    }

    /// Grid with every spacing halved.
    pub fn refined(&self) -> Grid {
        Grid { nt: 2 * (self.nt - 1) + 1, nx: 2 * (self.nx - 1) + 1, ..*self }
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.nt == other.nt
            && self.nx == other.nx
            && (self.t_min - other.t_min).abs() < 1e-12
            && (self.t_max - other.t_max).abs() < 1e-12
            && (self.x_min - other.x_min).abs() < 1e-12
            && (self.x_max - other.x_max).abs() < 1e-12
    }

    /// Largest coordinate light speed over the nodes.
    pub fn sup_cone_slope(&self, st: &Spacetime) -> f64 {
        let mut s: f64 = 0.0;
        for j in 0..self.nt {
            for i in 0..self.nx {
                s = s.max(st.cone_slope(&self.event(j, i)));
            }
        }
        s
    }

    /// Enforces `dt * sup(β/a) <= dx * cone_factor`.
    pub fn check_cone(&self, st: &Spacetime, cone_factor: f64) -> Result<()> {
        if !(cone_factor > 0.0 && cone_factor <= 1.0) {
            return Err(Error::InvalidParameter(format!("cone_factor {cone_factor} not in (0, 1]")));
        }
        let lhs = self.dt() * self.sup_cone_slope(st);
        let rhs = self.dx() * cone_factor;
        if lhs > rhs * (1.0 + 1e-12) {
            Err(Error::ConeCondition { lhs, rhs })
        } else {
            Ok(())
        }
    }

    /// `true` at nodes inside the spacetime domain.
    pub fn domain_mask(&self, st: &Spacetime) -> Vec<bool> {
        (0..self.len())
            .map(|k| {
                let (j, i) = self.split(k);
                st.contains(&self.event(j, i))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_of_nodes() {
        let g = Grid::with_resolution(Slab::new(-1.0, 1.0, -1.0, 1.0), 128).unwrap();
        assert_eq!((g.nt, g.nx), (257, 257));
        assert!((g.dt() - 1.0 / 128.0).abs() < 1e-15);
        assert_eq!(g.t(128), 0.0);
        assert_eq!(g.nearest(&Event::new(0.001, -0.999)), Some((128, 0)));
        assert_eq!(g.nearest(&Event::new(1.5, 0.0)), None);
        let r = g.refined();
        assert!((r.dx() - 0.5 * g.dx()).abs() < 1e-15);
    }

    #[test]
    fn cone_condition() {
        let st = Spacetime::minkowski2(Slab::new(-1.0, 1.0, -1.0, 1.0));
        let ok = Grid::new(st.slab, 257, 257).unwrap();
        assert!(ok.check_cone(&st, 1.0).is_ok());
        let bad = Grid::new(st.slab, 129, 257).unwrap();
        assert!(matches!(bad.check_cone(&st, 1.0), Err(Error::ConeCondition { .. })));
        let ds = Spacetime::desitter_toy(Slab::new(-1.0, 1.0, -1.0, 1.0));
        assert!(ok.check_cone(&ds, 1.0).is_err());
    }
}

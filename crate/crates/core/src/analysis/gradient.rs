use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::has_margin;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::{raise_unchecked, Covector, Event, Slab, Spacetime, TangentVec};

/// Probes need the field this many cells around the probe point.
pub const PROBE_MARGIN_CELLS: f64 = 3.0;
/// h-radius for merging gradients into one limiting-gradient representative.
pub const CLUSTER_RADIUS: f64 = 0.1;

const RING_CELLS: [f64; 4] = [8.0, 6.0, 4.0, 2.0];
const RING_ANGLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientSample {
    pub event: Event,
    pub du: Covector,
    pub grad: TangentVec,
    pub differentiable: bool,
    /// Largest probe radius at which one-sided and central estimates agreed
    /// (0 when they never did).
    pub scale: f64,
}

/// Finite-difference differential at `e`.
///
/// Forward, backward and central quotients are taken at radii 4, 2 and 1
/// cells along each axis. The point counts as differentiable when forward and
/// backward quotients agree at the two finest radii and the central
/// quotients agree across them, all within `10 Δx L`, where `L` is the
/// largest difference quotient seen by the probe.
pub fn gradient_probe(st: &Spacetime, u: &ScalarField, e: &Event) -> Result<GradientSample> {
    let Some(u0) = u.interpolate(e).filter(|_| st.contains(e)) else {
        return Err(Error::OutsideDomain(*e));
    };
    if !has_margin(st, u, e, PROBE_MARGIN_CELLS) {
        return Err(Error::InsufficientMargin { event: *e, margin: PROBE_MARGIN_CELLS * u.grid.dx() });
    }
    let at = |dt: f64, dx: f64| u.interpolate(&e.offset(dt, dx));
    // quotients[axis][scale] = (forward, backward, central), scales 4, 2, 1
    let mut q = [[None; 3]; 2];
    let mut lip: f64 = 0.0;
    for (axis, h) in [u.grid.dt(), u.grid.dx()].into_iter().enumerate() {
        for (k, m) in [4.0, 2.0, 1.0].into_iter().enumerate() {
            let r = m * h;
            let (plus, minus) = if axis == 0 { (at(r, 0.0), at(-r, 0.0)) } else { (at(0.0, r), at(0.0, -r)) };
            if let (Some(p), Some(n)) = (plus, minus) {
                let (f, b) = ((p - u0) / r, (u0 - n) / r);
                lip = lip.max(f.abs()).max(b.abs());
                q[axis][k] = Some((f, b, 0.5 * (f + b)));
            }
        }
    }
    let tol = 10.0 * u.grid.dx() * lip;
    let one_sided = |k: usize| q.iter().all(|a| a[k].is_some_and(|(f, b, _)| (f - b).abs() <= tol));
    let central = |k: usize, l: usize| {
        q.iter().all(|a| match (a[k], a[l]) {
            (Some(x), Some(y)) => (x.2 - y.2).abs() <= tol,
            _ => false,
        })
    };
    let differentiable = one_sided(1) && one_sided(2) && central(1, 2);
    let scale = if !differentiable {
        0.0
    } else if one_sided(0) && central(0, 1) {
        4.0 * u.grid.dx()
    } else {
        2.0 * u.grid.dx()
    };
    let (ct, cx) = match (q[0][2], q[1][2]) {
        (Some(a), Some(b)) => (a.2, b.2),
        _ => return Err(Error::InsufficientMargin { event: *e, margin: u.grid.dx() }),
    };
    let du = Covector::new(*e, ct, cx);
    Ok(GradientSample { event: *e, du, grad: raise_unchecked(st, &du), differentiable, scale })
}

/// [`gradient_probe`] at every node; `None` where the probe has no margin.
pub fn gradient_map(st: &Spacetime, u: &ScalarField) -> Vec<Option<GradientSample>> {
    let g = u.grid;
    (0..g.len())
        .into_par_iter()
        .map(|k| {
            let (j, i) = g.split(k);
            u.get(j, i)?;
            gradient_probe(st, u, &g.event(j, i)).ok()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitingGradientSet {
    pub event: Event,
    /// Cluster leaders, pairwise farther apart than `cluster_radius`.
    pub vectors: Vec<TangentVec>,
    /// Number of probe gradients per cluster.
    pub counts: Vec<usize>,
    /// `g(V, V) + 1` per representative.
    pub residuals: Vec<f64>,
    pub cluster_radius: f64,
}

impl LimitingGradientSet {
    pub fn covectors(&self, st: &Spacetime) -> Vec<Covector> {
        self.vectors.iter().map(|v| crate::geometry::lower(st, v)).collect()
    }
}

/// Greedy leader clustering in the auxiliary norm at `base`.
pub(crate) fn cluster(
    st: &Spacetime,
    base: &Event,
    grads: &[TangentVec],
    radius: f64,
) -> (Vec<TangentVec>, Vec<usize>) {
    let mut leaders: Vec<TangentVec> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for v in grads {
        let hit = leaders.iter().position(|l| {
            let d = TangentVec::new(*base, v.vt - l.vt, v.vx - l.vx);
            st.h_norm(&d) <= radius
        });
        match hit {
            Some(k) => counts[k] += 1,
            None => {
                leaders.push(TangentVec::new(*base, v.vt, v.vx));
                counts.push(1);
            }
        }
    }
    (leaders, counts)
}

/// Gradients at differentiable points on rings of 8, 6, 4 and 2 cells
/// around `e`, clustered.
pub fn limiting_gradients(st: &Spacetime, u: &ScalarField, e: &Event) -> Result<LimitingGradientSet> {
    if !st.contains(e) || u.interpolate(e).is_none() {
        return Err(Error::OutsideDomain(*e));
    }
    if !has_margin(st, u, e, PROBE_MARGIN_CELLS) {
        return Err(Error::InsufficientMargin { event: *e, margin: PROBE_MARGIN_CELLS * u.grid.dx() });
    }
    let (dt, dx) = (u.grid.dt(), u.grid.dx());
    let mut grads = Vec::new();
    for r in RING_CELLS {
        for k in 0..RING_ANGLES {
            let phi = std::f64::consts::TAU * k as f64 / RING_ANGLES as f64;
            let q = e.offset(r * dt * phi.cos(), r * dx * phi.sin());
            if let Ok(s) = gradient_probe(st, u, &q) {
                if s.differentiable {
                    grads.push(s.grad);
                }
            }
        }
    }
    if grads.is_empty() {
        return Err(Error::DegenerateField(*e));
    }
    let (vectors, counts) = cluster(st, e, &grads, CLUSTER_RADIUS);
    let residuals = vectors.iter().map(|v| st.norm2(v) + 1.0).collect();
    Ok(LimitingGradientSet { event: *e, vectors, counts, residuals, cluster_radius: CLUSTER_RADIUS })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `g(∇u, ∇u) + 1` at differentiable nodes of the region, `None`
    /// elsewhere.
    pub values: Vec<Option<f64>>,
    pub count: usize,
    pub sup_abs: f64,
    pub mean_abs: f64,
    pub min: f64,
    pub max: f64,
}

/// Eikonal residual at the differentiable nodes inside `region` (the whole
/// grid when `None`).
pub fn eikonal_residual(st: &Spacetime, u: &ScalarField, region: Option<&Slab>) -> ResidualReport {
    let g = u.grid;
    let values: Vec<Option<f64>> = (0..g.len())
        .into_par_iter()
        .map(|k| {
            let (j, i) = g.split(k);
            let e = g.event(j, i);
            if region.is_some_and(|r| !r.contains(&e)) {
                return None;
            }
            u.get(j, i)?;
            let s = gradient_probe(st, u, &e).ok()?;
            s.differentiable.then(|| st.covector_norm2(&s.du) + 1.0)
        })
        .collect();
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let count = present.len();
    let sup_abs = present.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mean_abs = if count > 0 { present.iter().map(|v| v.abs()).sum::<f64>() / count as f64 } else { 0.0 };
    let min = present.iter().copied().fold(f64::INFINITY, f64::min);
    let max = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ResidualReport { values, count, sup_abs, mean_abs, min, max }
}

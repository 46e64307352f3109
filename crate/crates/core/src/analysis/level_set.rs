use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{dependence_domain, discretely_related, distance_to_set, level_nodes, Direction, Target};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::{Event, Spacetime};
use crate::grid::Grid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSetReport {
    pub s: f64,
    pub polylines: Vec<Vec<Event>>,
    pub closed: bool,
    pub acausal: bool,
    pub edgeless: bool,
    pub is_cauchy: bool,
    pub partial_cauchy: bool,
    /// `sup |u − (s − d(·, {u = s}))|` over the nodes of `D⁻({u = s})`;
    /// `None` when the domain of dependence or the distance is unavailable.
    pub distance_like_residual: Option<f64>,
}

/// Grid edge carrying a crossing: `(j, i, vertical)`; horizontal edges join
/// `(j, i)`–`(j, i+1)`, vertical ones `(j, i)`–`(j+1, i)`.
type EdgeId = (usize, usize, bool);

struct Marching {
    segments: Vec<(EdgeId, EdgeId)>,
    points: HashMap<EdgeId, Event>,
}

fn march(u: &ScalarField, s: f64) -> Marching {
    let g = &u.grid;
    let mut segments = Vec::new();
    let mut points = HashMap::new();
    let pos = |v: f64| v >= s;
    for j in 0..g.nt - 1 {
        for i in 0..g.nx - 1 {
            let (Some(c00), Some(c01), Some(c10), Some(c11)) =
                (u.get(j, i), u.get(j, i + 1), u.get(j + 1, i), u.get(j + 1, i + 1))
            else {
                continue;
            };
            // edges in cyclic order: bottom, right, top, left
            let edges: [(EdgeId, f64, f64, Event, Event); 4] = [
                ((j, i, false), c00, c01, g.event(j, i), g.event(j, i + 1)),
                ((j, i + 1, true), c01, c11, g.event(j, i + 1), g.event(j + 1, i + 1)),
                ((j + 1, i, false), c10, c11, g.event(j + 1, i), g.event(j + 1, i + 1)),
                ((j, i, true), c00, c10, g.event(j, i), g.event(j + 1, i)),
            ];
            let mut hits = Vec::new();
            for (id, va, vb, a, b) in edges {
                if pos(va) != pos(vb) {
                    let w = (s - va) / (vb - va);
                    points.entry(id).or_insert(Event::new(a.t + w * (b.t - a.t), a.x + w * (b.x - a.x)));
                    hits.push(id);
                }
            }
            match hits.len() {
                2 => segments.push((hits[0], hits[1])),
                4 => {
                    // saddle: pair by the centre value
                    let centre = 0.25 * (c00 + c01 + c10 + c11);
                    if pos(centre) == pos(c00) {
                        segments.push((hits[0], hits[1]));
                        segments.push((hits[2], hits[3]));
                    } else {
                        segments.push((hits[0], hits[3]));
                        segments.push((hits[1], hits[2]));
                    }
                }
                _ => {}
            }
        }
    }
    Marching { segments, points }
}

/// Chains of edge ids; the flag marks closed chains.
fn chains(m: &Marching) -> Vec<(Vec<EdgeId>, bool)> {
    let mut adj: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in m.segments.iter().enumerate() {
        adj.entry(*a).or_default().push(k);
        adj.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; m.segments.len()];
    let mut out = Vec::new();
    // open chains first (start at degree-one edges), then loops
    let mut starts: Vec<EdgeId> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(k, _)| *k).collect();
    starts.sort_unstable();
    let mut all: Vec<EdgeId> = adj.keys().copied().collect();
    all.sort_unstable();
    starts.extend(all);
    for start in starts {
        let Some(&first) = adj[&start].iter().find(|&&k| !used[k]) else { continue };
        let mut chain = vec![start];
        let mut cur = start;
        let mut seg = Some(first);
        while let Some(k) = seg {
            used[k] = true;
            let (a, b) = m.segments[k];
            let next = if a == cur { b } else { a };
            chain.push(next);
            cur = next;
            seg = adj[&cur].iter().copied().find(|&k| !used[k]);
        }
        let closed = chain.len() > 2 && chain.first() == chain.last();
        out.push((chain, closed));
    }
    out
}

/// Polylines of `{u = s}` by marching squares.
pub fn extract_level_set(u: &ScalarField, s: f64) -> Vec<Vec<Event>> {
    let m = march(u, s);
    chains(&m).into_iter().map(|(c, _)| c.iter().map(|id| m.points[id]).collect()).collect()
}

/// Whether the cell on the far side of a chain-end edge is missing (off the
/// grid or with an undefined corner).
fn ends_at_boundary(u: &ScalarField, id: EdgeId) -> bool {
    let g = &u.grid;
    let (j, i, vertical) = id;
    let cell_ok = |j: isize, i: isize| {
        j >= 0
            && i >= 0
            && (j as usize) + 1 < g.nt
            && (i as usize) + 1 < g.nx
            && [(0, 0), (0, 1), (1, 0), (1, 1)].iter().all(|&(a, b)| u.is_defined(j as usize + a, i as usize + b))
    };
    let (j, i) = (j as isize, i as isize);
    let cells = if vertical { [(j, i - 1), (j, i)] } else { [(j - 1, i), (j, i)] };
    !cells.iter().all(|&(a, b)| cell_ok(a, b))
}

/// Timelike segments of half-height `cells` slices through `p` must see
/// `u − s` change sign wherever both ends are defined.
pub(crate) fn tube_crossings_ok(st: &Spacetime, u: &ScalarField, p: &Event, s: f64, cells: f64) -> bool {
    let h = cells * u.grid.dt();
    let c = st.cone_slope(p);
    [-0.5, 0.0, 0.5].iter().all(|&v| {
        let a = p.offset(-h, -v * c * h);
        let b = p.offset(h, v * c * h);
        if !(st.contains(&a) && st.contains(&b)) {
            return true;
        }
        match (u.interpolate(&a), u.interpolate(&b)) {
            (Some(ua), Some(ub)) => (ua - s) * (ub - s) < 0.0,
            _ => true,
        }
    })
}

pub(crate) fn pairwise_acausal(st: &Spacetime, pts: &[Event], band: f64) -> bool {
    !pts.par_iter().enumerate().any(|(k, p)| pts[k + 1..].iter().any(|q| discretely_related(st, p, q, band)))
}

/// Causal status of the level set `{u = s}`.
pub fn level_set_report(st: &Spacetime, u: &ScalarField, s: f64) -> Result<LevelSetReport> {
    let m = march(u, s);
    if m.segments.is_empty() {
        return Err(Error::EmptyLevelSet(s));
    }
    let ch = chains(&m);
    let polylines: Vec<Vec<Event>> = ch.iter().map(|(c, _)| c.iter().map(|id| m.points[id]).collect()).collect();
    let closed = ch.iter().all(|(_, c)| *c);
    let samples: Vec<Event> = m.points.values().copied().collect();
    let grid: Grid = u.grid;
    let acausal = pairwise_acausal(st, &samples, grid.dx());

    let ends_ok = ch
        .iter()
        .filter(|(_, c)| !*c)
        .all(|(c, _)| ends_at_boundary(u, c[0]) && ends_at_boundary(u, *c.last().unwrap()));
    let stride = (samples.len() / 64).max(1);
    let tubes_ok = samples.iter().step_by(stride).all(|p| tube_crossings_ok(st, u, p, s, 3.0));
    let edgeless = ends_ok && tubes_ok;

    let nodes = level_nodes(st, u, s);
    let (is_cauchy, residual) = match dependence_domain(st, &grid, &nodes) {
        Ok(dep) => {
            let residual =
                distance_to_set(st, &grid, &Target::FieldLevel { field: u, s }, Direction::ToFuture).ok().map(|d| {
                    (0..grid.len())
                        .filter(|&k| dep.dminus[k])
                        .filter_map(|k| {
                            let (j, i) = grid.split(k);
                            let (uv, dv) = (u.get(j, i)?, d.get(j, i)?);
                            (uv <= s).then(|| (uv - (s - dv)).abs())
                        })
                        .fold(0.0, f64::max)
                });
            (dep.is_cauchy, residual)
        }
        Err(_) => (false, None),
    };
    Ok(LevelSetReport {
        s,
        polylines,
        closed,
        acausal,
        edgeless,
        is_cauchy,
        partial_cauchy: acausal && edgeless,
        distance_like_residual: residual,
    })
}

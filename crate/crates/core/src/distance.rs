//! Lorentzian time separation by semi-Lagrangian dynamic programming over
//! time slices, discrete causal futures/pasts and domains of dependence.
//!
//! The recursion for the distance to a set `S` in the future is
//!
//! ```text
//! V(t, x) = max_{|v| ≤ β/a} [ √(β² − a² v²) Δt + V(t + Δt, x + v Δt) ]
//! ```
//!
//! with `V = 0` on `S`. A step whose segment crosses `S` contributes only the
//! proper time up to the crossing. Values on the next slice are linearly
//! interpolated in `x`; nodes just beyond `S` carry a negative extension
//! (minus the proper time back to `S`) so that interpolation stays
//! consistent near the target.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geodesics::shoot_between;
use crate::geometry::{CausalRelation, Event, Slab, Spacetime, TemporalFunction};
use crate::grid::Grid;

/// Velocity samples per node before the golden-section polish.
pub const VELOCITY_SAMPLES: usize = 65;

const GOLDEN_ITERS: usize = 24;
const ON_TARGET: f64 = 1e-13;
/// Nodes within this many slices, or within [`SEED_WINDOW`] in time, of a
/// point target are filled directly instead of by the recursion.
const SEED_SLICES: usize = 4;
const SEED_WINDOW: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `d(p, S)` for `p` in the past of `S`.
    ToFuture,
    /// `d(S, p)` for `p` in the future of `S`.
    ToPast,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::ToFuture => 1.0,
            Direction::ToPast => -1.0,
        }
    }
}

/// Target set of a distance computation.
#[derive(Debug, Clone)]
pub enum Target<'a> {
    /// Level set `{τ = s}`.
    Temporal {
        tau: TemporalFunction,
        s: f64,
    },
    /// Level set `{u = s}` of a sampled field.
    FieldLevel {
        field: &'a ScalarField,
        s: f64,
    },
    /// Graph `t = f(x)` through the vertices (x strictly increasing).
    Polyline(Vec<Event>),
    Point(Event),
}

impl Target<'_> {
    pub fn describe(&self) -> String {
        match self {
            Target::Temporal { tau, s } => format!("level set {s} of {tau:?}"),
            Target::FieldLevel { s, .. } => format!("level set {s} of a sampled field"),
            Target::Polyline(v) => format!("polyline with {} vertices", v.len()),
            Target::Point(p) => format!("point ({}, {})", p.t, p.x),
        }
    }

    /// Signed level function: zero on `S`, positive to its future.
    fn level(&self, e: &Event) -> Option<f64> {
        match self {
            Target::Temporal { tau, s } => Some(tau.value(e) - s),
            Target::FieldLevel { field, s } => field.interpolate(e).map(|u| u - s),
            Target::Polyline(v) => polyline_level(v, e),
            Target::Point(_) => None,
        }
    }

    /// Level function continued past the ends of a polyline along its end
    /// segments.
    fn extended_level(&self, e: &Event) -> Option<f64> {
        match self {
            Target::Polyline(v) if v.len() >= 2 => Some(polyline_graph(v, e)),
            _ => self.level(e),
        }
    }

    /// Nodes where the target itself cannot be evaluated are outside the
    /// computation.
    fn node_valid(&self, grid: &Grid, j: usize, i: usize) -> bool {
        match self {
            Target::FieldLevel { field, .. } => field.grid.same_shape(grid) && field.is_defined(j, i),
            _ => true,
        }
    }
}

fn polyline_level(v: &[Event], e: &Event) -> Option<f64> {
    if v.len() < 2 || e.x < v[0].x || e.x > v[v.len() - 1].x {
        return None;
    }
    Some(polyline_graph(v, e))
}

fn polyline_graph(v: &[Event], e: &Event) -> f64 {
    let k = v.partition_point(|p| p.x < e.x).clamp(1, v.len() - 1);
    let (a, b) = (&v[k - 1], &v[k]);
    let w = (e.x - a.x) / (b.x - a.x);
    e.t - (a.t + w * (b.t - a.t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceField {
    pub grid: Grid,
    pub target: String,
    pub direction: Direction,
    /// `None` marks nodes with no discrete causal path to the target.
    pub values: Vec<Option<f64>>,
}

impl DistanceField {
    pub fn get(&self, j: usize, i: usize) -> Option<f64> {
        self.values[self.grid.index(j, i)]
    }

    /// Bilinear interpolation over reachable nodes.
    pub fn interpolate(&self, e: &Event) -> Option<f64> {
        let vals: Vec<f64> = self.values.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
        crate::field::bilinear(&self.grid, &vals, e)
    }

    /// Same as [`interpolate`](Self::interpolate) without the temporary
    /// allocation, for repeated queries.
    pub fn sampler(&self) -> impl Fn(&Event) -> Option<f64> + '_ {
        let vals: Vec<f64> = self.values.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
        move |e| crate::field::bilinear(&self.grid, &vals, e)
    }

    pub fn reachable_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// `t,x,value` rows with `unreachable` for missing values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,value\n");
        for (k, v) in self.values.iter().enumerate() {
            let (j, i) = self.grid.split(k);
            match v {
                Some(v) => out.push_str(&format!("{},{},{}\n", self.grid.t(j), self.grid.x(i), v)),
                None => out.push_str(&format!("{},{},unreachable\n", self.grid.t(j), self.grid.x(i))),
            }
        }
        out
    }
}

/// Semi-Lagrangian time-separation field to `target`.
pub fn distance_to_set(
    st: &Spacetime,
    grid: &Grid,
    target: &Target<'_>,
    direction: Direction,
) -> Result<DistanceField> {
    grid.check_cone(st, 1.0)?;
    check_target(st, grid, target)?;
    let sigma = direction.sign();
    let (dt, dx) = (grid.dt(), grid.dx());
    let nx = grid.nx;
    let slices: Vec<usize> = match direction {
        Direction::ToFuture => (0..grid.nt).rev().collect(),
        Direction::ToPast => (0..grid.nt).collect(),
    };

    // ψ = σ·φ is negative before the target in sweep order
    let psi = |e: &Event| target.level(e).map(|v| sigma * v);
    let psi_ext = |e: &Event| target.extended_level(e).map(|v| sigma * v);
    let valid = |j: usize, i: usize| st.contains(&grid.event(j, i)) && target.node_valid(grid, j, i);

    let reach = reachable_nodes(st, grid, target, direction, &psi, &valid);
    let mut values: Vec<Option<f64>> = vec![None; grid.len()];
    // extension values on nodes just beyond the target
    let mut ext: Vec<Option<f64>> = vec![None; grid.len()];

    for (step, &j) in slices.iter().enumerate() {
        let t = grid.t(j);
        let prev = if step == 0 { None } else { Some(slices[step - 1]) };
        let row: Vec<(Option<f64>, Option<f64>)> = (0..nx)
            .into_par_iter()
            .map(|i| {
                if !valid(j, i) {
                    return (None, None);
                }
                let p = grid.event(j, i);
                if let Target::Point(q) = target {
                    if let Some(seed) = point_seed(st, &p, q, sigma, dt) {
                        return (seed, None);
                    }
                }
                let here = psi(&p);
                if let Some(h) = here {
                    if h.abs() <= ON_TARGET {
                        return (Some(0.0), None);
                    }
                    if h > 0.0 {
                        return (None, beyond_extension(st, &p, sigma, dt, &psi));
                    }
                } else if psi_ext(&p).is_some_and(|h| h > ON_TARGET) {
                    // past the end of a partial target: extension values keep
                    // the scheme monotone in the target
                    return (None, beyond_extension(st, &p, sigma, dt, &psi_ext));
                }
                if !reach[grid.index(j, i)] {
                    return (None, None);
                }
                let Some(jn) = prev else {
                    return (None, None);
                };
                let next_val = |xq: f64| -> Option<f64> {
                    let fi = (xq - grid.x_min) / dx;
                    if fi < -1e-9 || fi > (nx - 1) as f64 + 1e-9 {
                        return None;
                    }
                    let fi = fi.clamp(0.0, (nx - 1) as f64);
                    let i0 = (fi.floor() as usize).min(nx - 2);
                    let w = fi - i0 as f64;
                    // in-domain nodes outside the causal reach of the target
                    // sit beyond the null frontier where the distance is zero
                    let node = |ii: usize| {
                        let k = grid.index(jn, ii);
                        match (values[k].or(ext[k]), valid(jn, ii)) {
                            (Some(v), _) => Some(v),
                            (None, true) if !reach[k] => Some(0.0),
                            _ => None,
                        }
                    };
                    let mut acc = 0.0;
                    for (ii, ww) in [(i0, 1.0 - w), (i0 + 1, w)] {
                        if ww <= 1e-12 {
                            continue;
                        }
                        acc += ww * node(ii)?;
                    }
                    Some(acc)
                };
                let beta = st.beta(&p);
                let a = st.a(&p);
                let c = beta / a;
                let tn = grid.t(jn);
                let here_ext = psi_ext(&p);
                let candidate = |v: f64| -> Option<f64> {
                    let e = Event::new(tn, p.x + v * dt);
                    if !st.contains(&e) || !grid.contains(&e) {
                        return None;
                    }
                    let len = (beta * beta - a * a * v * v).max(0.0).sqrt() * dt;
                    if let (Some(h0), Some(h1)) = (here_ext, psi_ext(&e)) {
                        if h1 >= 0.0 {
                            let lam = crossing(h0, h1, |w| psi_ext(&Event::new(t + w * (tn - t), p.x + w * v * dt)));
                            return Some(lam * len);
                        }
                    }
                    next_val(e.x).map(|vn| len + vn)
                };
                // frontier nodes whose stencil sees no reachable value
                (Some(maximize(c, &candidate).unwrap_or(0.0).max(0.0)), None)
            })
            .collect();
        for (i, (v, e)) in row.into_iter().enumerate() {
            values[grid.index(j, i)] = v;
            ext[grid.index(j, i)] = e;
        }
    }

    Ok(DistanceField { grid: *grid, target: target.describe(), direction, values })
}

fn check_target(st: &Spacetime, grid: &Grid, target: &Target<'_>) -> Result<()> {
    match target {
        Target::Point(q) => {
            if st.contains(q) && grid.contains(q) {
                Ok(())
            } else {
                Err(Error::EmptyTarget)
            }
        }
        Target::Polyline(v) => {
            if v.len() < 2 || v.windows(2).any(|w| w[1].x <= w[0].x) {
                return Err(Error::InvalidParameter("polyline target must be a graph over x".into()));
            }
            if v[v.len() - 1].x < grid.x_min || v[0].x > grid.x_max {
                return Err(Error::EmptyTarget);
            }
            Ok(())
        }
        _ => {
            let (mut neg, mut pos) = (false, false);
            for j in 0..grid.nt {
                for i in 0..grid.nx {
                    let e = grid.event(j, i);
                    if !st.contains(&e) || !target.node_valid(grid, j, i) {
                        continue;
                    }
                    if let Some(v) = target.level(&e) {
                        neg |= v <= 0.0;
                        pos |= v >= 0.0;
                    }
                }
            }
            if neg && pos {
                Ok(())
            } else {
                Err(Error::EmptyTarget)
            }
        }
    }
}

/// Direct distance for nodes near a point target: closed form on flat
/// metrics, shooting otherwise with a frozen-coefficient fallback. `None`
/// for nodes left to the recursion.
fn point_seed(st: &Spacetime, p: &Event, q: &Event, sigma: f64, dt: f64) -> Option<Option<f64>> {
    let lag = sigma * (q.t - p.t);
    if lag.abs() < 1e-12 && (q.x - p.x).abs() < 1e-12 {
        return Some(Some(0.0));
    }
    if lag <= 1e-12 {
        return Some(None);
    }
    if lag > (SEED_SLICES as f64 * dt).max(SEED_WINDOW) + 1e-12 {
        return None;
    }
    let frozen = |at: &Event| {
        let (b, a) = (st.beta(at), st.a(at));
        let n = b * b * lag * lag - a * a * (q.x - p.x).powi(2);
        (n > 0.0).then(|| n.sqrt())
    };
    if st.lapse.is_constant() && st.scale.is_constant() {
        return Some(frozen(p));
    }
    let (a, b) = if sigma > 0.0 { (p, q) } else { (q, p) };
    match st.relation(a, b, 0.0) {
        CausalRelation::Chronological => {}
        _ => return Some(None),
    }
    let mid = Event::new(0.5 * (p.t + q.t), 0.5 * (p.x + q.x));
    Some(shoot_between(st, a, b, 1e-10).map(|r| r.length()).ok().or_else(|| frozen(&mid)))
}

fn beyond_extension(
    st: &Spacetime,
    p: &Event,
    sigma: f64,
    dt: f64,
    psi: &dyn Fn(&Event) -> Option<f64>,
) -> Option<f64> {
    let back = Event::new(p.t - sigma * dt, p.x);
    let h0 = psi(&back)?;
    let h1 = psi(p)?;
    if h0 >= 0.0 {
        return None;
    }
    let lam = crossing(h0, h1, |w| psi(&Event::new(back.t + w * (p.t - back.t), p.x)));
    Some(-(1.0 - lam) * st.beta(p) * dt)
}

/// Root of `f` on `[0, 1]` given `f(0) = h0 < 0 <= f(1) = h1`.
fn crossing(h0: f64, h1: f64, f: impl Fn(f64) -> Option<f64>) -> f64 {
    if h1 <= 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (mut flo, mut fhi) = (h0, h1);
    for _ in 0..50 {
        let m = (lo - flo * (hi - lo) / (fhi - flo)).clamp(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
        let Some(fm) = f(m) else { break };
        if fm < 0.0 {
            lo = m;
            flo = fm;
        } else {
            hi = m;
            fhi = fm;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Maximizes `f` over `[-c, c]` by uniform sampling plus a golden-section
/// polish around the best sample.
fn maximize(c: f64, f: &dyn Fn(f64) -> Option<f64>) -> Option<f64> {
    let n = VELOCITY_SAMPLES;
    let vs: Vec<f64> = (0..n).map(|k| c * (-1.0 + 2.0 * k as f64 / (n - 1) as f64)).collect();
    let mut best: Option<(usize, f64)> = None;
    for (k, &v) in vs.iter().enumerate() {
        if let Some(val) = f(v) {
            if best.is_none_or(|(_, b)| val > b) {
                best = Some((k, val));
            }
        }
    }
    let (k, mut val) = best?;
    let score = |v: f64| f(v).unwrap_or(f64::NEG_INFINITY);
    let mut lo = vs[k.saturating_sub(1)];
    let mut hi = vs[(k + 1).min(n - 1)];
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = score(x1);
    let mut f2 = score(x2);
    for _ in 0..GOLDEN_ITERS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = score(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = score(x1);
        }
    }
    val = val.max(f1).max(f2);
    Some(val)
}

/// Time separation `d(p, q)`, zero when `q` is not in the chronological
/// future of `p` (null-related pairs have zero length as well).
///
/// The value comes from a maximal geodesic found by shooting; if shooting
/// fails the grid estimate of [`point_distance_dp`] is returned.
pub fn point_distance(st: &Spacetime, p: &Event, q: &Event) -> f64 {
    if st.relation(p, q, 1e-12) != CausalRelation::Chronological {
        return 0.0;
    }
    match shoot_between(st, p, q, 1e-10) {
        Ok(ray) => ray.length(),
        Err(_) => point_distance_dp(st, p, q, 128).unwrap_or(0.0),
    }
}

/// Pure grid estimate of `d(p, q)` at `cells_per_unit` resolution in time.
pub fn point_distance_dp(st: &Spacetime, p: &Event, q: &Event, cells_per_unit: usize) -> Option<f64> {
    if st.relation(p, q, 1e-12) != CausalRelation::Chronological {
        return Some(0.0);
    }
    let span = q.t - p.t;
    let nt = ((span * cells_per_unit as f64).ceil() as usize).max(8) + 1;
    let dt = span / (nt - 1) as f64;
    let dx = dt * sup_slope_between(st, p, q);
    let (l, r) = st.null_bounds(p, q.t);
    let cells_left = ((p.x - l.min(q.x)) / dx).ceil() as usize + 2;
    let cells_right = ((r.max(q.x) - p.x) / dx).ceil() as usize + 2;
    let grid = Grid {
        t_min: p.t,
        t_max: q.t,
        x_min: p.x - cells_left as f64 * dx,
        x_max: p.x + cells_right as f64 * dx,
        nt,
        nx: cells_left + cells_right + 1,
    };
    let st_local = Spacetime { slab: grid.slab(), ..st.clone() };
    let field = distance_to_set(&st_local, &grid, &Target::Point(*q), Direction::ToFuture).ok()?;
    field.get(0, cells_left)
}

fn sup_slope_between(st: &Spacetime, p: &Event, q: &Event) -> f64 {
    let (l, r) = st.null_bounds(p, q.t);
    let mut s: f64 = 0.0;
    for k in 0..=32 {
        let t = p.t + (q.t - p.t) * k as f64 / 32.0;
        for x in [l, p.x, q.x, r] {
            s = s.max(st.cone_slope(&Event::new(t, x)));
        }
    }
    s * 1.000_001
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskDirection {
    FutureOf,
    PastOf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalMask {
    pub grid: Grid,
    pub reachable: Vec<bool>,
    pub direction: MaskDirection,
}

impl CausalMask {
    pub fn contains(&self, j: usize, i: usize) -> bool {
        self.reachable[self.grid.index(j, i)]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,value\n");
        for (k, r) in self.reachable.iter().enumerate() {
            let (j, i) = self.grid.split(k);
            out.push_str(&format!("{},{},{}\n", self.grid.t(j), self.grid.x(i), u8::from(*r)));
        }
        out
    }
}

/// In-domain x-intervals of one slice, from runs of in-domain nodes.
fn domain_runs(st: &Spacetime, grid: &Grid, j: usize) -> Vec<(f64, f64)> {
    let mut runs = Vec::new();
    let mut start: Option<usize> = None;
    for i in 0..=grid.nx {
        let inside = i < grid.nx && st.contains(&grid.event(j, i));
        match (inside, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((grid.x(s), grid.x(i - 1)));
                start = None;
            }
            _ => {}
        }
    }
    runs
}

fn merge(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (l, r) in iv {
        match out.last_mut() {
            Some(last) if l <= last.1 + 1e-12 => last.1 = last.1.max(r),
            _ => out.push((l, r)),
        }
    }
    out
}

/// Interval `[l, r]` at time `t` from which causal reach is propagated.
#[derive(Debug, Clone, Copy)]
struct Seed {
    t: f64,
    l: f64,
    r: f64,
}

/// Slice-by-slice propagation of reachable x-intervals along the local null
/// cones, clipped to the domain. Sweeps forward in time when `forward`.
fn sweep_intervals(st: &Spacetime, grid: &Grid, seeds: &[Seed], forward: bool) -> Vec<bool> {
    let order: Vec<usize> = if forward { (0..grid.nt).collect() } else { (0..grid.nt).rev().collect() };
    let mut reachable = vec![false; grid.len()];
    let mut current: Vec<(f64, f64)> = Vec::new();
    let (dx, tol) = (grid.dx(), 1e-9 * grid.dx());
    let eps = 1e-9 * grid.dt();
    let push = |iv: &mut Vec<(f64, f64)>, from: f64, l: f64, r: f64, t: f64| {
        iv.push((st.null_bounds(&Event::new(from, l), t).0, st.null_bounds(&Event::new(from, r), t).1));
    };
    for (step, &j) in order.iter().enumerate() {
        let t = grid.t(j);
        let mut iv: Vec<(f64, f64)> = Vec::new();
        let fresh: Box<dyn Fn(f64) -> bool> = if step == 0 {
            Box::new(|ts: f64| (ts - t).abs() <= eps)
        } else {
            let tp = grid.t(order[step - 1]);
            for &(l, r) in &current {
                push(&mut iv, tp, l, r, t);
            }
            if forward {
                Box::new(move |ts: f64| ts > tp + eps && ts <= t + eps)
            } else {
                Box::new(move |ts: f64| ts < tp - eps && ts >= t - eps)
            }
        };
        for sd in seeds.iter().filter(|sd| fresh(sd.t)) {
            push(&mut iv, sd.t, sd.l, sd.r, t);
        }
        let iv = merge(iv);
        let runs = domain_runs(st, grid, j);
        // clip to the domain; an interval leaving one run does not jump to another
        let mut clipped = Vec::new();
        for &(l, r) in &iv {
            for &(a, b) in &runs {
                let (lo, hi) = (l.max(a - 0.5 * dx), r.min(b + 0.5 * dx));
                if lo <= hi {
                    clipped.push((lo, hi));
                }
            }
        }
        current = merge(clipped);
        for i in 0..grid.nx {
            let x = grid.x(i);
            if st.contains(&grid.event(j, i)) && current.iter().any(|&(l, r)| x >= l - tol && x <= r + tol) {
                reachable[grid.index(j, i)] = true;
            }
        }
    }
    reachable
}

/// Discrete causal future or past of a set of nodes.
pub fn causal_mask(
    st: &Spacetime,
    grid: &Grid,
    seeds: &[(usize, usize)],
    direction: MaskDirection,
) -> Result<CausalMask> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("causal_mask needs at least one seed".into()));
    }
    let seeds: Vec<Seed> = seeds
        .iter()
        .filter(|&&(j, i)| j < grid.nt && i < grid.nx && st.contains(&grid.event(j, i)))
        .map(|&(j, i)| Seed { t: grid.t(j), l: grid.x(i), r: grid.x(i) })
        .collect();
    let reachable = sweep_intervals(st, grid, &seeds, direction == MaskDirection::FutureOf);
    Ok(CausalMask { grid: *grid, reachable, direction })
}

/// Nodes from which a causal curve in the sweep direction meets the target.
/// Seeds are the runs of nodes on or beyond the target, widened to the
/// interpolated crossing between nodes.
fn reachable_nodes(
    st: &Spacetime,
    grid: &Grid,
    target: &Target<'_>,
    direction: Direction,
    psi: &(dyn Fn(&Event) -> Option<f64> + Sync),
    valid: &(dyn Fn(usize, usize) -> bool + Sync),
) -> Vec<bool> {
    let backwards = direction == Direction::ToFuture;
    let seeds: Vec<Seed> = match target {
        Target::Point(q) => vec![Seed { t: q.t, l: q.x, r: q.x }],
        _ => (0..grid.nt)
            .into_par_iter()
            .flat_map_iter(|j| {
                let t = grid.t(j);
                let past_target =
                    |j: usize, i: usize| valid(j, i) && psi(&grid.event(j, i)).is_some_and(|h| h >= -ON_TARGET);
                // only the first node past the target in sweep order marks
                // the crossing; later ones would seed spurious reach
                let before = if backwards { j.checked_sub(1) } else { Some(j + 1).filter(|&jb| jb < grid.nt) };
                let beyond = |i: usize| past_target(j, i) && !before.is_some_and(|jb| past_target(jb, i));
                let edge = |inside: usize, outside: usize| -> f64 {
                    let (xa, xb) = (grid.x(inside), grid.x(outside));
                    let f = |x: f64| psi(&Event::new(t, x));
                    match (f(xb), f(xa)) {
                        (Some(hb), Some(ha)) if valid(j, outside) && hb < 0.0 => {
                            let lam = crossing(hb, ha, |w| f(xb + w * (xa - xb)));
                            xb + lam * (xa - xb)
                        }
                        _ => xa,
                    }
                };
                let mut out = Vec::new();
                let mut i = 0;
                while i < grid.nx {
                    if !beyond(i) {
                        i += 1;
                        continue;
                    }
                    let start = i;
                    while i + 1 < grid.nx && beyond(i + 1) {
                        i += 1;
                    }
                    let l = if start > 0 { edge(start, start - 1) } else { grid.x(start) };
                    let r = if i + 1 < grid.nx { edge(i, i + 1) } else { grid.x(i) };
                    out.push(Seed { t, l, r });
                    i += 1;
                }
                out
            })
            .collect(),
    };
    sweep_intervals(st, grid, &seeds, !backwards)
}

/// Whether two events are causally related once a band of `band` in `x`
/// around the null cone is discounted.
pub fn discretely_related(st: &Spacetime, p: &Event, q: &Event, band: f64) -> bool {
    let (a, b) = if p.t <= q.t { (p, q) } else { (q, p) };
    st.relation(a, b, band) == CausalRelation::Chronological
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceReport {
    pub dminus: Vec<bool>,
    pub dplus: Vec<bool>,
    pub is_cauchy: bool,
}

/// Discrete domains of dependence of a node set. A node belongs to `D⁻(S)`
/// when every forward stencil path from it meets `S` before leaving the
/// domain; stencil successors beyond the spatial ends of the grid window are
/// not followed.
pub fn dependence_domain(st: &Spacetime, grid: &Grid, s: &[bool]) -> Result<DependenceReport> {
    if s.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let members: Vec<Event> = (0..grid.len())
        .filter(|&k| s[k])
        .map(|k| {
            let (j, i) = grid.split(k);
            grid.event(j, i)
        })
        .collect();
    if members.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let band = grid.dx();
    let clash = members
        .par_iter()
        .enumerate()
        .any(|(a, p)| members[a + 1..].iter().any(|q| discretely_related(st, p, q, band)));
    if clash {
        return Err(Error::NotAchronal);
    }
    let inside: Vec<bool> = grid.domain_mask(st);
    let dminus = sweep_safe(st, grid, s, &inside, 1);
    let dplus = sweep_safe(st, grid, s, &inside, -1);
    let is_cauchy = (0..grid.len()).all(|k| !inside[k] || dminus[k] || dplus[k]);
    Ok(DependenceReport { dminus, dplus, is_cauchy })
}

fn stencil(st: &Spacetime, grid: &Grid, j: usize, i: usize, jn: usize) -> (isize, isize) {
    let p = grid.event(j, i);
    let (l, r) = st.null_bounds(&p, grid.t(jn));
    let lo = ((l - grid.x_min) / grid.dx() + 1e-9).floor() as isize;
    let hi = ((r - grid.x_min) / grid.dx() - 1e-9).ceil() as isize;
    (lo, hi)
}

fn sweep_safe(st: &Spacetime, grid: &Grid, s: &[bool], inside: &[bool], sigma: isize) -> Vec<bool> {
    let mut safe = vec![false; grid.len()];
    let order: Vec<usize> = if sigma > 0 { (0..grid.nt).rev().collect() } else { (0..grid.nt).collect() };
    for &j in &order {
        let jn = j as isize + sigma;
        let row: Vec<bool> = (0..grid.nx)
            .into_par_iter()
            .map(|i| {
                let k = grid.index(j, i);
                if s[k] {
                    return true;
                }
                if !inside[k] || jn < 0 || jn >= grid.nt as isize {
                    return false;
                }
                let jn = jn as usize;
                let (lo, hi) = stencil(st, grid, j, i, jn);
                let lo = lo.max(0) as usize;
                let hi = hi.min(grid.nx as isize - 1);
                if hi < lo as isize {
                    return false;
                }
                (lo..=hi as usize).all(|ii| {
                    let kn = grid.index(jn, ii);
                    inside[kn] && safe[kn]
                })
            })
            .collect();
        for (i, v) in row.into_iter().enumerate() {
            safe[grid.index(j, i)] = v;
        }
    }
    safe
}

/// Thick node representation of the level set `{u = s}`: nodes on it, plus
/// nodes below it with a forward stencil neighbour above it. Every forward
/// stencil path crossing the level set passes through one of these nodes.
pub fn level_nodes(st: &Spacetime, u: &ScalarField, s: f64) -> Vec<bool> {
    let grid = &u.grid;
    let mut out = vec![false; grid.len()];
    for j in 0..grid.nt {
        for i in 0..grid.nx {
            let Some(v) = u.get(j, i) else { continue };
            let k = grid.index(j, i);
            if v == s {
                out[k] = true;
                continue;
            }
            if v > s || j + 1 >= grid.nt {
                continue;
            }
            let (lo, hi) = stencil(st, grid, j, i, j + 1);
            let lo = lo.max(0) as usize;
            let hi = hi.min(grid.nx as isize - 1);
            if hi < lo as isize {
                continue;
            }
            out[k] = (lo..=hi as usize).any(|ii| u.get(j + 1, ii).is_some_and(|w| w > s));
        }
    }
    out
}

/// Extends `grid` in time (keeping its spacing) until it covers `t_reach`,
/// never beyond the slab.
pub(crate) fn extend_in_time(grid: &Grid, slab: &Slab, t_reach: f64, forward: bool) -> Grid {
    let dt = grid.dt();
    if forward {
        let target = t_reach.min(slab.t_max);
        if target <= grid.t_max {
            return *grid;
        }
        let extra = ((target - grid.t_max) / dt - 1e-9).ceil() as usize + 1;
        Grid { t_max: grid.t_max + extra as f64 * dt, nt: grid.nt + extra, ..*grid }
    } else {
        let target = t_reach.max(slab.t_min);
        if target >= grid.t_min {
            return *grid;
        }
        let extra = ((grid.t_min - target) / dt - 1e-9).ceil() as usize + 1;
        Grid { t_min: grid.t_min - extra as f64 * dt, nt: grid.nt + extra, ..*grid }
    }
}

//! Candidate solutions: limits of distance differences to receding level
//! sets, the Lax–Oleinik operator, the closed-form catalog and min/max
//! compositions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{distance_to_set, extend_in_time, Direction, DistanceField, Target};
use crate::error::{Error, Result};
use crate::field::{bilinear, Provenance, ScalarField};
use crate::geometry::{Event, Slab, Spacetime, TemporalFunction};
use crate::grid::Grid;

/// Allowed relative growth of the Lipschitz bound across iterates.
pub const LIPSCHITZ_DRIFT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitDirection {
    /// `u⁺_s(p) = d(x0, τ_s) − d(p, τ_s)`, `s → +∞`.
    Plus,
    /// `u⁻_s(p) = d(τ_s, x0) − d(τ_s, p)`, `s → −∞`.
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub s: f64,
    /// Sup difference to the previous iterate; `None` for the first one.
    pub sup_diff: Option<f64>,
    pub lipschitz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceLog {
    pub entries: Vec<LogEntry>,
    pub tolerance: f64,
    pub converged: bool,
    /// Lipschitz bounds stay within [`LIPSCHITZ_DRIFT`] of the first one.
    pub equi_lipschitz: bool,
}

impl ConvergenceLog {
    pub fn lipschitz_drift(&self) -> f64 {
        let first = self.entries.first().map_or(0.0, |e| e.lipschitz);
        if first <= 0.0 {
            return 0.0;
        }
        self.entries.iter().map(|e| (e.lipschitz - first).abs() / first).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Default)]
pub struct LimitOptions {
    /// Window for sup differences and Lipschitz bounds; the whole grid when
    /// unset.
    pub probe: Option<Slab>,
}

/// Earliest (`earliest = true`) or latest time of the level set `{τ = s}`
/// over `x ∈ [x_min, x_max]`.
fn level_time(tau: &TemporalFunction, s: f64, x_min: f64, x_max: f64, earliest: bool) -> f64 {
    match tau {
        TemporalFunction::ScaledTime { k } => s / k,
        TemporalFunction::DiamondTime => {
            // t = s (1 − x²): extremal at x = 0 or at the largest |x|
            let xm = x_min.abs().max(x_max.abs()).min(1.0);
            let (a, b) = (s, s * (1.0 - xm * xm));
            if earliest {
                a.min(b)
            } else {
                a.max(b)
            }
        }
    }
}

/// One iterate `u±_{τ_s}` on `grid`, from a distance field on a grid
/// extended in time to reach the level set.
pub fn limit_iterate(
    st: &Spacetime,
    tau: &TemporalFunction,
    x0: &Event,
    s: f64,
    grid: &Grid,
    direction: LimitDirection,
) -> Result<ScalarField> {
    let forward = direction == LimitDirection::Plus;
    let reach = level_time(tau, s, grid.x_min, grid.x_max, !forward);
    let slab = st.slab;
    if (forward && reach > slab.t_max + 1e-12) || (!forward && reach < slab.t_min - 1e-12) {
        return Err(Error::LevelSetMissing(s));
    }
    let ext = extend_in_time(grid, &slab, level_time(tau, s, grid.x_min, grid.x_max, forward), forward);
    let offset = if forward { 0 } else { ext.nt - grid.nt };
    let dir = if forward { Direction::ToFuture } else { Direction::ToPast };
    let target = Target::Temporal { tau: *tau, s };
    let d: DistanceField = distance_to_set(st, &ext, &target, dir).map_err(|e| match e {
        Error::EmptyTarget => Error::LevelSetMissing(s),
        other => other,
    })?;
    let anchor = d.interpolate(x0).ok_or(Error::OutsideDomain(*x0))?;
    let values = (0..grid.len())
        .map(|k| {
            let (j, i) = grid.split(k);
            d.get(j + offset, i).map_or(f64::NAN, |v| anchor - v)
        })
        .collect();
    ScalarField::new(st, *grid, values, Provenance::Constructed)
}

/// Limit of `u±_{τ_s}` along `s_list` (increasing for `Plus`, decreasing
/// for `Minus`). Returns the last iterate; non-convergence is reported in
/// the log rather than as an error.
pub fn build_limit_solution(
    st: &Spacetime,
    tau: &TemporalFunction,
    x0: &Event,
    s_list: &[f64],
    grid: &Grid,
    direction: LimitDirection,
) -> Result<(ScalarField, ConvergenceLog)> {
    build_limit_solution_with(st, tau, x0, s_list, grid, direction, &LimitOptions::default())
}

pub fn build_limit_solution_with(
    st: &Spacetime,
    tau: &TemporalFunction,
    x0: &Event,
    s_list: &[f64],
    grid: &Grid,
    direction: LimitDirection,
    opts: &LimitOptions,
) -> Result<(ScalarField, ConvergenceLog)> {
    if s_list.is_empty() {
        return Err(Error::InvalidParameter("empty s_list".into()));
    }
    let monotone = s_list.windows(2).all(|w| match direction {
        LimitDirection::Plus => w[1] > w[0],
        LimitDirection::Minus => w[1] < w[0],
    });
    if !monotone {
        return Err(Error::InvalidParameter("s_list must move monotonically towards the limit".into()));
    }
    if !st.contains(x0) || !grid.contains(x0) {
        return Err(Error::OutsideDomain(*x0));
    }
    let tolerance = 1e-6 + 4.0 * grid.dt();
    let mut entries = Vec::with_capacity(s_list.len());
    let mut last: Option<ScalarField> = None;
    for &s in s_list {
        let u = limit_iterate(st, tau, x0, s, grid, direction)?;
        let lipschitz = match &opts.probe {
            Some(w) => u.lipschitz_in(st, w),
            None => u.lipschitz,
        };
        let sup_diff = match &last {
            Some(prev) => Some(u.sup_diff(prev, opts.probe.as_ref())?),
            None => None,
        };
        entries.push(LogEntry { s, sup_diff, lipschitz });
        last = Some(u);
    }
    let converged = entries.last().and_then(|e| e.sup_diff).is_some_and(|d| d <= tolerance);
    let mut log = ConvergenceLog { entries, tolerance, converged, equi_lipschitz: true };
    log.equi_lipschitz = log.lipschitz_drift() <= LIPSCHITZ_DRIFT;
    Ok((last.expect("s_list is non-empty"), log))
}

/// Closed-form members of the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticKind {
    /// `u = t`
    CoordinateTime,
    /// `u = t cosh θ − x sinh θ`
    Boost { theta: f64 },
    /// `u = |t|`
    AbsTime,
    /// `u = √2 |t| − |x|`
    Wedge,
    /// `u = 1 − √((1 − t)² − x²)`
    DiamondVertex,
}

/// Catalog member times a constant factor (negative controls use factors
/// other than one).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticField {
    #[serde(flatten)]
    pub kind: AnalyticKind,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

impl AnalyticField {
    pub const fn new(kind: AnalyticKind) -> Self {
        AnalyticField { kind, scale: 1.0 }
    }

    pub const fn scaled(kind: AnalyticKind, scale: f64) -> Self {
        AnalyticField { kind, scale }
    }

    /// Parses `coordinate_time`, `boost(θ)`, `abs_time`, `wedge`,
    /// `diamond_vertex`, optionally prefixed by `-`.
    pub fn from_key(key: &str) -> Result<Self> {
        let key = key.trim();
        let (scale, body) = match key.strip_prefix('-') {
            Some(rest) => (-1.0, rest.trim()),
            None => (1.0, key),
        };
        let kind = match body {
            "coordinate_time" => AnalyticKind::CoordinateTime,
            "abs_time" => AnalyticKind::AbsTime,
            "wedge" => AnalyticKind::Wedge,
            "diamond_vertex" => AnalyticKind::DiamondVertex,
            _ => {
                let theta = body
                    .strip_prefix("boost(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|r| r.trim().parse::<f64>().ok())
                    .filter(|t| t.is_finite())
                    .ok_or_else(|| Error::UnknownKey(key.to_string()))?;
                AnalyticKind::Boost { theta }
            }
        };
        Ok(AnalyticField { kind, scale })
    }

    pub fn value(&self, e: &Event) -> f64 {
        let (t, x) = (e.t, e.x);
        let v = match self.kind {
            AnalyticKind::CoordinateTime => t,
            AnalyticKind::Boost { theta } => t * theta.cosh() - x * theta.sinh(),
            AnalyticKind::AbsTime => t.abs(),
            AnalyticKind::Wedge => 2f64.sqrt() * t.abs() - x.abs(),
            AnalyticKind::DiamondVertex => {
                let q = (1.0 - t).powi(2) - x * x;
                if q < 0.0 || t > 1.0 {
                    f64::NAN
                } else {
                    1.0 - q.sqrt()
                }
            }
        };
        self.scale * v
    }

    /// Differential `(∂_t u, ∂_x u)` where the closed form is smooth.
    pub fn differential(&self, e: &Event) -> Option<(f64, f64)> {
        let (t, x) = (e.t, e.x);
        let d = match self.kind {
            AnalyticKind::CoordinateTime => (1.0, 0.0),
            AnalyticKind::Boost { theta } => (theta.cosh(), -theta.sinh()),
            AnalyticKind::AbsTime if t != 0.0 => (t.signum(), 0.0),
            AnalyticKind::Wedge if t != 0.0 && x != 0.0 => (2f64.sqrt() * t.signum(), -x.signum()),
            AnalyticKind::DiamondVertex => {
                let r = ((1.0 - t).powi(2) - x * x).sqrt();
                if !(r > 0.0) || t > 1.0 {
                    return None;
                }
                ((1.0 - t) / r, x / r)
            }
            _ => return None,
        };
        Some((self.scale * d.0, self.scale * d.1))
    }

    pub fn name(&self) -> String {
        let base = match self.kind {
            AnalyticKind::CoordinateTime => "coordinate_time".to_string(),
            AnalyticKind::Boost { theta } => format!("boost({theta})"),
            AnalyticKind::AbsTime => "abs_time".to_string(),
            AnalyticKind::Wedge => "wedge".to_string(),
            AnalyticKind::DiamondVertex => "diamond_vertex".to_string(),
        };
        if self.scale == 1.0 {
            base
        } else if self.scale == -1.0 {
            format!("-{base}")
        } else {
            format!("{}*{base}", self.scale)
        }
    }
}

pub fn analytic_solution(st: &Spacetime, grid: &Grid, f: &AnalyticField) -> ScalarField {
    ScalarField::from_fn(st, *grid, Provenance::Analytic, |e| f.value(e))
}

/// Output of [`lax_oleinik_apply`].
#[derive(Debug, Clone, PartialEq)]
pub struct LaxOleinik {
    pub field: ScalarField,
    /// Nodes whose minimizing paths were cut short by the grid, the domain
    /// or the rapidity cap.
    pub boundary: Vec<bool>,
    pub steps: usize,
}

impl LaxOleinik {
    /// Sup difference to `u` over nodes not influenced by the boundary.
    pub fn interior_sup_diff(&self, u: &ScalarField) -> Result<f64> {
        if !self.field.grid.same_shape(&u.grid) {
            return Err(Error::GridMismatch);
        }
        let mut m: f64 = 0.0;
        for k in 0..u.grid.len() {
            let (a, b) = (self.field.values[k], u.values[k]);
            if !self.boundary[k] && a.is_finite() && b.is_finite() {
                m = m.max((a - b).abs());
            }
        }
        Ok(m)
    }
}

/// Largest rapidity of a single proper-time step.
pub const RAPIDITY_CAP: f64 = 2.0;
const RAPIDITY_SAMPLES: usize = 33;

/// `ũ(p) = inf u(end) − t` over future-directed timelike paths from `p` of
/// proper time `t`, as `n = ceil(t/Δt)` steps of proper time `δ = t/n` along
/// straight segments of rapidity `θ`.
pub fn lax_oleinik_apply(st: &Spacetime, u: &ScalarField, t: f64) -> Result<LaxOleinik> {
    let grid = u.grid;
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("proper time {t} must be positive")));
    }
    let beta_min = (0..grid.len())
        .map(|k| {
            let (j, i) = grid.split(k);
            st.beta(&grid.event(j, i))
        })
        .fold(f64::INFINITY, f64::min);
    let bound = (grid.t_max - grid.t_min) * beta_min;
    if t > bound {
        return Err(Error::ProperTimeTooLarge { t, bound });
    }
    let steps = (t / grid.dt() - 1e-9).ceil().max(1.0) as usize;
    let delta = t / steps as f64;
    let mut w = u.values.clone();
    let mut infl = vec![false; grid.len()];
    for _ in 0..steps {
        let next: Vec<(f64, bool)> = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let (j, i) = grid.split(k);
                if !w[k].is_finite() {
                    return (f64::NAN, true);
                }
                let p = grid.event(j, i);
                let (b, a) = (st.beta(&p), st.a(&p));
                let end = |th: f64| Event::new(p.t + delta * th.cosh() / b, p.x + delta * th.sinh() / a);
                let cost = |th: f64| -> Option<f64> {
                    let e = end(th);
                    if !st.contains(&e) {
                        return None;
                    }
                    bilinear(&grid, &w, &e)
                };
                let ths: Vec<f64> = (0..RAPIDITY_SAMPLES)
                    .map(|m| RAPIDITY_CAP * (-1.0 + 2.0 * m as f64 / (RAPIDITY_SAMPLES - 1) as f64))
                    .collect();
                let vals: Vec<Option<f64>> = ths.iter().map(|&th| cost(th)).collect();
                let Some((m, _)) =
                    vals.iter().enumerate().filter_map(|(m, v)| v.map(|v| (m, v))).min_by(|a, b| a.1.total_cmp(&b.1))
                else {
                    return (f64::NAN, true);
                };
                // the minimizer is trusted only strictly inside the feasible range
                let at_edge = m == 0 || m == ths.len() - 1 || vals[m - 1].is_none() || vals[m + 1].is_none();
                let (th, val) = golden_min(ths[m.saturating_sub(1)], ths[(m + 1).min(ths.len() - 1)], &|th| {
                    cost(th).unwrap_or(f64::INFINITY)
                });
                let (th, val) = if val <= vals[m].unwrap() { (th, val) } else { (ths[m], vals[m].unwrap()) };
                let influenced = at_edge || corners_influenced(&grid, &infl, &end(th));
                (val - delta, influenced)
            })
            .collect();
        for (k, (v, f)) in next.into_iter().enumerate() {
            w[k] = v;
            infl[k] = f;
        }
    }
    let field = ScalarField::new(st, grid, w, Provenance::Constructed)?;
    Ok(LaxOleinik { field, boundary: infl, steps })
}

fn corners_influenced(grid: &Grid, infl: &[bool], e: &Event) -> bool {
    let (fj, fi) = grid.locate(e);
    let j0 = (fj.floor().max(0.0) as usize).min(grid.nt - 1);
    let i0 = (fi.floor().max(0.0) as usize).min(grid.nx - 1);
    let j1 = (j0 + 1).min(grid.nt - 1);
    let i1 = (i0 + 1).min(grid.nx - 1);
    [(j0, i0), (j0, i1), (j1, i0), (j1, i1)].iter().any(|&(j, i)| infl[grid.index(j, i)])
}

fn golden_min(mut lo: f64, mut hi: f64, f: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..30 {
        if f1 > f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremum {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    pub field: ScalarField,
    /// Nodes with `|u1 − u2| ≤ 2Δt`.
    pub equality: Vec<bool>,
}

pub fn compose_extremum(st: &Spacetime, kind: Extremum, u1: &ScalarField, u2: &ScalarField) -> Result<Composition> {
    if !u1.grid.same_shape(&u2.grid) {
        return Err(Error::GridMismatch);
    }
    let eps = 2.0 * u1.grid.dt();
    let mut equality = vec![false; u1.grid.len()];
    let values = u1
        .values
        .iter()
        .zip(&u2.values)
        .enumerate()
        .map(|(k, (&a, &b))| {
            if !(a.is_finite() && b.is_finite()) {
                return f64::NAN;
            }
            equality[k] = (a - b).abs() <= eps;
            match kind {
                Extremum::Min => a.min(b),
                Extremum::Max => a.max(b),
            }
        })
        .collect();
    let field = ScalarField::new(st, u1.grid, values, Provenance::Composed)?;
    Ok(Composition { field, equality })
}

/// Recipe for a field that can be re-sampled on any grid.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldExpr {
    Analytic(AnalyticField),
    Compose(Extremum, Box<FieldExpr>, Box<FieldExpr>),
    /// Bilinear resampling of a stored field.
    Sampled(ScalarField),
}

impl FieldExpr {
    pub fn sample(&self, st: &Spacetime, grid: &Grid) -> Result<ScalarField> {
        match self {
            FieldExpr::Analytic(f) => Ok(analytic_solution(st, grid, f)),
            FieldExpr::Compose(kind, a, b) => {
                Ok(compose_extremum(st, *kind, &a.sample(st, grid)?, &b.sample(st, grid)?)?.field)
            }
            FieldExpr::Sampled(f) => {
                if f.grid.same_shape(grid) {
                    Ok(f.clone())
                } else {
                    Ok(f.resample(st, *grid))
                }
            }
        }
    }
}

impl From<AnalyticField> for FieldExpr {
    fn from(f: AnalyticField) -> Self {
        FieldExpr::Analytic(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> (Spacetime, Grid) {
        let st = Spacetime::minkowski2(Slab::new(-1.0, 1.0, -1.0, 1.0));
        let g = Grid::with_resolution(st.slab, 64).unwrap();
        (st, g)
    }

    #[test]
    fn catalog_values() {
        let e = Event::new(0.3, -0.7);
        assert_eq!(AnalyticField::from_key("coordinate_time").unwrap().value(&e), 0.3);
        let w = AnalyticField::from_key("wedge").unwrap().value(&Event::new(1.0, 1.0));
        assert!((w - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let b = AnalyticField::from_key("boost(1)").unwrap().value(&Event::new(1.0, 0.0));
        assert!((b - 1f64.cosh()).abs() < 1e-15);
        assert_eq!(AnalyticField::from_key("-abs_time").unwrap().value(&Event::new(-0.5, 0.0)), -0.5);
        assert!(matches!(AnalyticField::from_key("parabola"), Err(Error::UnknownKey(_))));
        assert!(AnalyticField::from_key("boost(x)").is_err());
    }

    #[test]
    fn u_plus_on_minkowski_is_time() {
        let st = Spacetime::minkowski2(Slab::new(-10.0, 10.0, -10.0, 10.0));
        let g = Grid::with_resolution(Slab::new(-1.0, 1.0, -1.0, 1.0), 32).unwrap();
        let tau = TemporalFunction::ScaledTime { k: 2f64.sqrt() };
        let (u, log) =
            build_limit_solution(&st, &tau, &Event::new(0.0, 0.0), &[2.0, 4.0, 8.0], &g, LimitDirection::Plus).unwrap();
        let oracle = analytic_solution(&st, &g, &AnalyticField::new(AnalyticKind::CoordinateTime));
        assert!(u.sup_diff(&oracle, None).unwrap() <= 2.0 * g.dt() + 1e-6);
        assert!(log.converged && log.equi_lipschitz);
        assert!(log.entries[1..].iter().all(|e| e.sup_diff.unwrap() <= 1e-6));
    }

    #[test]
    fn u_minus_on_minkowski_is_minus_time() {
        let st = Spacetime::minkowski2(Slab::new(-10.0, 10.0, -10.0, 10.0));
        let g = Grid::with_resolution(Slab::new(-1.0, 1.0, -1.0, 1.0), 32).unwrap();
        let tau = TemporalFunction::ScaledTime { k: 2f64.sqrt() };
        let (u, _) =
            build_limit_solution(&st, &tau, &Event::new(0.0, 0.0), &[-2.0, -4.0, -8.0], &g, LimitDirection::Minus)
                .unwrap();
        let oracle = analytic_solution(&st, &g, &AnalyticField::scaled(AnalyticKind::CoordinateTime, -1.0));
        assert!(u.sup_diff(&oracle, None).unwrap() <= 2.0 * g.dt() + 1e-6);
    }

    #[test]
    fn limit_errors() {
        let (st, g) = unit();
        let tau = TemporalFunction::ScaledTime { k: 1.0 };
        let o = Event::new(0.0, 0.0);
        assert_eq!(
            build_limit_solution(&st, &tau, &o, &[5.0], &g, LimitDirection::Plus).unwrap_err(),
            Error::LevelSetMissing(5.0)
        );
        assert!(build_limit_solution(&st, &tau, &o, &[0.5, 0.2], &g, LimitDirection::Plus).is_err());
    }

    #[test]
    fn lax_oleinik_fixed_points() {
        let (st, g) = unit();
        let u = analytic_solution(&st, &g, &AnalyticField::new(AnalyticKind::CoordinateTime));
        let lo = lax_oleinik_apply(&st, &u, 0.25).unwrap();
        let o = g.nearest(&Event::new(0.0, 0.0)).unwrap();
        assert!(lo.field.get(o.0, o.1).unwrap().abs() <= 2.0 * g.dt());
        assert!(lo.interior_sup_diff(&u).unwrap() <= 3.0 * g.dt());
        let b = analytic_solution(&st, &g, &AnalyticField::new(AnalyticKind::Boost { theta: 1.0 }));
        let lo = lax_oleinik_apply(&st, &b, 0.1).unwrap();
        assert!(lo.interior_sup_diff(&b).unwrap() <= 3.0 * g.dt());
        let m = analytic_solution(&st, &g, &AnalyticField::scaled(AnalyticKind::CoordinateTime, -1.0));
        let lo = lax_oleinik_apply(&st, &m, 0.1).unwrap();
        assert!(lo.field.sup_diff(&m, None).unwrap() >= 0.1 - 3.0 * g.dt());
        assert!(matches!(lax_oleinik_apply(&st, &u, 3.0), Err(Error::ProperTimeTooLarge { .. })));
    }

    #[test]
    fn compositions() {
        let (st, g) = unit();
        let t = analytic_solution(&st, &g, &AnalyticField::new(AnalyticKind::CoordinateTime));
        let mt = analytic_solution(&st, &g, &AnalyticField::scaled(AnalyticKind::CoordinateTime, -1.0));
        let abs = analytic_solution(&st, &g, &AnalyticField::new(AnalyticKind::AbsTime));
        let c = compose_extremum(&st, Extremum::Max, &t, &mt).unwrap();
        assert_eq!(c.field.values, abs.values);
        assert_eq!(c.field.provenance, Provenance::Composed);
        let idem = compose_extremum(&st, Extremum::Min, &t, &t).unwrap();
        assert_eq!(idem.field.values, t.values);
        assert!(idem.equality.iter().all(|&e| e));
        let other = Grid::with_resolution(st.slab, 32).unwrap();
        let small = analytic_solution(&st, &other, &AnalyticField::new(AnalyticKind::AbsTime));
        assert_eq!(compose_extremum(&st, Extremum::Min, &t, &small).unwrap_err(), Error::GridMismatch);
    }
}

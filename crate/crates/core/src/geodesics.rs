//! Christoffel symbols, timelike geodesics, length functionals and two-point
//! shooting for maximal segments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    classify_vector, CausalKind, CausalRelation, Event, MetricKind, Spacetime, TangentVec, TimeOrientation,
};

/// Step of the central differences used for metric derivatives.
pub const FD_STEP: f64 = 1e-5;

/// Allowed drift of `g(γ', γ') + 1` along an integrated ray.
pub const EPS_NORM: f64 = 1e-7;

pub const SHOOT_MAX_ITER: usize = 200;

/// `gamma[k][i][j] = Γ^k_{ij}` with index 0 = t, 1 = x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffels(pub [[[f64; 2]; 2]; 2]);

impl Christoffels {
    /// `-Γ^k_{ij} v^i v^j`.
    #[inline]
    fn acceleration(&self, vt: f64, vx: f64) -> (f64, f64) {
        let g = &self.0;
        let v = [vt, vx];
        let mut out = [0.0; 2];
        for (k, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    s += g[k][i][j] * v[i] * v[j];
                }
            }
            *o = -s;
        }
        (out[0], out[1])
    }
}

pub fn christoffels_at(st: &Spacetime, e: &Event) -> Result<Christoffels> {
    let h = FD_STEP;
    let probes = [e.offset(h, 0.0), e.offset(-h, 0.0), e.offset(0.0, h), e.offset(0.0, -h)];
    if !st.contains(e) || probes.iter().any(|p| !st.contains(p)) {
        return Err(Error::InsufficientMargin { event: *e, margin: h });
    }
    Ok(christoffels_unchecked(st, e))
}

fn christoffels_unchecked(st: &Spacetime, e: &Event) -> Christoffels {
    let h = FD_STEP;
    let gtt = |p: &Event| -st.beta(p).powi(2);
    let gxx = |p: &Event| st.a(p).powi(2);
    let d = |f: &dyn Fn(&Event) -> f64, dt: f64, dx: f64| (f(&e.offset(dt, dx)) - f(&e.offset(-dt, -dx))) / (2.0 * h);
    let dt_gtt = d(&gtt, h, 0.0);
    let dx_gtt = d(&gtt, 0.0, h);
    let dt_gxx = d(&gxx, h, 0.0);
    let dx_gxx = d(&gxx, 0.0, h);
    let inv_tt = 1.0 / gtt(e);
    let inv_xx = 1.0 / gxx(e);

    let mut g = [[[0.0; 2]; 2]; 2];
    g[0][0][0] = 0.5 * inv_tt * dt_gtt;
    g[0][0][1] = 0.5 * inv_tt * dx_gtt;
    g[0][1][0] = g[0][0][1];
    g[0][1][1] = -0.5 * inv_tt * dt_gxx;
    g[1][0][0] = -0.5 * inv_xx * dx_gtt;
    g[1][0][1] = 0.5 * inv_xx * dt_gxx;
    g[1][1][0] = g[1][0][1];
    g[1][1][1] = 0.5 * inv_xx * dx_gxx;
    Christoffels(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaySample {
    /// Proper time from the start of the ray.
    pub s: f64,
    pub event: Event,
    pub tangent: TangentVec,
}

/// Discretized unit-speed timelike geodesic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub samples: Vec<RaySample>,
    pub orientation: TimeOrientation,
    /// Integration stopped because the next step would leave the domain.
    pub exited_domain: bool,
}

impl Ray {
    pub fn start(&self) -> Event {
        self.samples[0].event
    }

    pub fn end(&self) -> Event {
        self.samples.last().expect("rays are never empty").event
    }

    /// Proper time spanned by the samples.
    pub fn length(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.s)
    }

    pub fn max_norm_drift(&self, st: &Spacetime) -> f64 {
        self.samples.iter().map(|s| (st.norm2(&s.tangent) + 1.0).abs()).fold(0.0, f64::max)
    }

    /// Event at proper time `s` by linear interpolation between samples.
    pub fn event_at(&self, s: f64) -> Option<Event> {
        let k = self.samples.partition_point(|r| r.s < s);
        if k == 0 {
            return (s >= self.samples[0].s - 1e-12).then_some(self.samples[0].event);
        }
        if k >= self.samples.len() {
            let last = self.samples.last()?;
            return ((s - last.s).abs() < 1e-12).then_some(last.event);
        }
        let (a, b) = (&self.samples[k - 1], &self.samples[k]);
        let w = (s - a.s) / (b.s - a.s);
        Some(Event::new(a.event.t + w * (b.event.t - a.event.t), a.event.x + w * (b.event.x - a.event.x)))
    }

    /// CSV rows `s,t,x,vt,vx` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,t,x,vt,vx\n");
        for r in &self.samples {
            out.push_str(&format!("{},{},{},{},{}\n", r.s, r.event.t, r.event.x, r.tangent.vt, r.tangent.vx));
        }
        out
    }
}

#[derive(Clone, Copy)]
struct State {
    t: f64,
    x: f64,
    vt: f64,
    vx: f64,
}

fn rk4_step(st: &Spacetime, s: &State, h: f64, inside: &dyn Fn(&Event) -> bool) -> Option<State> {
    let f = |y: &State| -> Option<[f64; 4]> {
        let e = Event::new(y.t, y.x);
        if !inside(&e) {
            return None;
        }
        let c = christoffels_at(st, &e).ok()?;
        let (at, ax) = c.acceleration(y.vt, y.vx);
        Some([y.vt, y.vx, at, ax])
    };
    let add = |y: &State, k: &[f64; 4], w: f64| State {
        t: y.t + w * k[0],
        x: y.x + w * k[1],
        vt: y.vt + w * k[2],
        vx: y.vx + w * k[3],
    };
    let k1 = f(s)?;
    let k2 = f(&add(s, &k1, 0.5 * h))?;
    let k3 = f(&add(s, &k2, 0.5 * h))?;
    let k4 = f(&add(s, &k3, h))?;
    let mut k = [0.0; 4];
    for i in 0..4 {
        k[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    }
    let next = add(s, &k, h);
    inside(&Event::new(next.t, next.x)).then_some(next)
}

fn check_initial(st: &Spacetime, e: &Event, v: &TangentVec) -> Result<TimeOrientation> {
    if !st.contains(e) {
        return Err(Error::OutsideDomain(*e));
    }
    let norm = st.norm2(v);
    let class = classify_vector(st, v);
    if class.kind != CausalKind::Timelike || (norm + 1.0).abs() > 1e-9 {
        return Err(Error::NotUnitTimelike { norm });
    }
    Ok(class.orientation)
}

/// Integrates the geodesic equation with classical RK4 in proper time,
/// stopping early (and flagging it) when the domain is left.
pub fn integrate_geodesic(st: &Spacetime, e: &Event, v: &TangentVec, span: f64, step: f64) -> Result<Ray> {
    integrate_geodesic_within(st, e, v, span, step, &|p| st.contains(p))
}

/// As [`integrate_geodesic`] with an additional domain predicate (e.g. the
/// support of a sampled field).
pub fn integrate_geodesic_within(
    st: &Spacetime,
    e: &Event,
    v: &TangentVec,
    span: f64,
    step: f64,
    inside: &dyn Fn(&Event) -> bool,
) -> Result<Ray> {
    let orientation = check_initial(st, e, v)?;
    if !(span > 0.0 && step > 0.0) {
        return Err(Error::InvalidParameter("span and step must be positive".into()));
    }
    let n = (span / step).ceil() as usize;
    let h = span / n as f64;
    let mut state = State { t: e.t, x: e.x, vt: v.vt, vx: v.vx };
    let mut samples = Vec::with_capacity(n + 1);
    let sample = |s: f64, y: &State| {
        let ev = Event::new(y.t, y.x);
        RaySample { s, event: ev, tangent: TangentVec::new(ev, y.vt, y.vx) }
    };
    samples.push(sample(0.0, &state));
    let mut exited = false;
    for k in 1..=n {
        match rk4_step(st, &state, h, inside) {
            Some(next) => {
                state = next;
                samples.push(sample(k as f64 * h, &state));
            }
            None => {
                exited = true;
                break;
            }
        }
    }
    Ok(Ray { samples, orientation, exited_domain: exited })
}

/// Piecewise-linear curve with strictly increasing parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    samples: Vec<(f64, Event)>,
}

impl Curve {
    pub fn new(samples: Vec<(f64, Event)>) -> Result<Self> {
        if samples.len() < 2 || samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::NonMonotoneCurve);
        }
        Ok(Curve { samples })
    }

    /// Straight chart segment sampled at `n + 1` uniformly spaced parameters.
    pub fn segment(p: Event, q: Event, n: usize) -> Self {
        let samples = (0..=n)
            .map(|k| {
                let w = k as f64 / n as f64;
                (w, Event::new(p.t + w * (q.t - p.t), p.x + w * (q.x - p.x)))
            })
            .collect();
        Curve { samples }
    }

    pub fn samples(&self) -> &[(f64, Event)] {
        &self.samples
    }
}

/// Composite trapezoid of `√(-g(γ',γ'))` (Lorentz) or `√h(γ',γ')` (Riemann).
pub fn curve_length(st: &Spacetime, kind: MetricKind, c: &Curve) -> Result<f64> {
    let mut total = 0.0;
    for (idx, w) in c.samples.windows(2).enumerate() {
        let (s0, p) = w[0];
        let (s1, q) = w[1];
        let ds = s1 - s0;
        let (vt, vx) = ((q.t - p.t) / ds, (q.x - p.x) / ds);
        let integrand = |e: &Event| -> Result<f64> {
            match kind {
                MetricKind::Lorentz => {
                    let n = st.lorentz(e, vt, vx, vt, vx);
                    let scale = st.riemann(e, vt, vx, vt, vx);
                    if n > 1e-12 * scale.max(1e-300) {
                        return Err(Error::SpacelikeSegment { index: idx });
                    }
                    Ok((-n).max(0.0).sqrt())
                }
                MetricKind::Riemann => Ok(st.riemann(e, vt, vx, vt, vx).sqrt()),
            }
        };
        total += 0.5 * (integrand(&p)? + integrand(&q)?) * ds;
    }
    Ok(total)
}

enum Shot {
    Landed {
        ray: Ray,
        x: f64,
    },
    /// Left the domain before reaching the target time; `side` is the sign
    /// of the spatial velocity at exit.
    Exited {
        side: f64,
    },
}

fn fire(st: &Spacetime, p: &Event, t_target: f64, rapidity: f64) -> Shot {
    let (b, a) = (st.beta(p), st.a(p));
    let v0 = TangentVec::new(*p, rapidity.cosh() / b, rapidity.sinh() / a);
    let inside = |e: &Event| st.contains(e);
    let h = ((t_target - p.t) / (128.0 * v0.vt)).clamp(1e-5, 1e-2);
    let mut s = 0.0;
    let mut state = State { t: p.t, x: p.x, vt: v0.vt, vx: v0.vx };
    let mut samples = vec![RaySample { s, event: *p, tangent: v0 }];
    let push = |samples: &mut Vec<RaySample>, s: f64, y: &State| {
        let e = Event::new(y.t, y.x);
        samples.push(RaySample { s, event: e, tangent: TangentVec::new(e, y.vt, y.vx) });
    };
    let max_steps = 1_000_000;
    for _ in 0..max_steps {
        let Some(next) = rk4_step(st, &state, h, &inside) else {
            return Shot::Exited { side: state.vx.signum() };
        };
        if next.t >= t_target {
            // land exactly on the target slice
            let mut ds = (t_target - state.t) / state.vt;
            let mut landed = state;
            for _ in 0..4 {
                match rk4_step(st, &state, ds, &|e: &Event| st.slab.contains(e) || inside(e)) {
                    Some(y) => {
                        landed = y;
                        ds += (t_target - y.t) / y.vt;
                    }
                    None => return Shot::Exited { side: state.vx.signum() },
                }
            }
            s += ds;
            push(&mut samples, s, &landed);
            let x = landed.x;
            return Shot::Landed {
                ray: Ray { samples, orientation: TimeOrientation::Future, exited_domain: false },
                x,
            };
        }
        state = next;
        s += h;
        push(&mut samples, s, &state);
    }
    Shot::Exited { side: state.vx.signum() }
}

/// Maximal timelike geodesic from `p` to `q` by a root find on the initial
/// rapidity. The returned ray ends within `tol` of `q`.
pub fn shoot_between(st: &Spacetime, p: &Event, q: &Event, tol: f64) -> Result<Ray> {
    if !st.contains(p) {
        return Err(Error::OutsideDomain(*p));
    }
    if !st.contains(q) {
        return Err(Error::OutsideDomain(*q));
    }
    if st.relation(p, q, 0.0) != CausalRelation::Chronological {
        return Err(Error::NotChronological);
    }
    let miss = |shot: &Shot| match shot {
        Shot::Landed { x, .. } => x - q.x,
        Shot::Exited { side } => side * f64::INFINITY,
    };
    let slope = (st.a(p) / st.beta(p)) * (q.x - p.x) / (q.t - p.t);
    let guess = slope.clamp(-0.999_999_9, 0.999_999_9).atanh();

    let mut iterations = 0;
    let mut lo = guess - 0.25;
    let mut hi = guess + 0.25;
    let mut f_lo = miss(&fire(st, p, q.t, lo));
    let mut f_hi = miss(&fire(st, p, q.t, hi));
    while !(f_lo <= 0.0 && f_hi >= 0.0) {
        iterations += 1;
        if iterations > SHOOT_MAX_ITER {
            return Err(Error::ShootingFailed { iterations, miss: f_lo.abs().min(f_hi.abs()) });
        }
        let width = hi - lo;
        if f_lo > 0.0 {
            lo -= width;
            f_lo = miss(&fire(st, p, q.t, lo));
        }
        if f_hi < 0.0 {
            hi += width;
            f_hi = miss(&fire(st, p, q.t, hi));
        }
    }

    // Illinois regula falsi, falling back to bisection on infinite values
    let mut side = 0i8;
    let mut best: Option<(f64, Ray)> = None;
    while iterations < SHOOT_MAX_ITER {
        iterations += 1;
        let mid = if f_lo.is_finite() && f_hi.is_finite() && f_hi != f_lo {
            let m = hi - f_hi * (hi - lo) / (f_hi - f_lo);
            if m > lo && m < hi {
                m
            } else {
                0.5 * (lo + hi)
            }
        } else {
            0.5 * (lo + hi)
        };
        let shot = fire(st, p, q.t, mid);
        let f_mid = miss(&shot);
        if let Shot::Landed { ray, .. } = shot {
            if best.as_ref().is_none_or(|(m, _)| f_mid.abs() < *m) {
                best = Some((f_mid.abs(), ray));
            }
        }
        if f_mid.abs() <= tol {
            let (_, ray) = best.expect("landed shot recorded");
            return Ok(ray);
        }
        if f_mid < 0.0 {
            lo = mid;
            f_lo = f_mid;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            f_hi = f_mid;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Err(Error::ShootingFailed { iterations, miss: best.map_or(f64::INFINITY, |(m, _)| m) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Slab;

    fn mink() -> Spacetime {
        Spacetime::minkowski2(Slab::new(-3.0, 3.0, -3.0, 3.0))
    }

    #[test]
    fn flat_christoffels_vanish() {
        let c = christoffels_at(&mink(), &Event::new(0.3, -0.2)).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert!(c.0[k][i][j].abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn desitter_christoffels() {
        let ds = Spacetime::desitter_toy(Slab::new(-1.0, 1.0, -1.0, 1.0));
        let c = christoffels_at(&ds, &Event::new(0.0, 0.0)).unwrap().0;
        assert!((c[0][1][1] - 1.0).abs() < 1e-6);
        assert!((c[1][0][1] - 1.0).abs() < 1e-6);
        assert!((c[1][1][0] - 1.0).abs() < 1e-6);
        for (k, i, j) in [(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1)] {
            assert!(c[k][i][j].abs() < 1e-6, "{k}{i}{j}");
        }
    }

    #[test]
    fn margin_error_on_diamond_boundary() {
        let d = Spacetime::diamond();
        assert!(matches!(christoffels_at(&d, &Event::new(0.5, 0.5)), Err(Error::InsufficientMargin { .. })));
    }

    #[test]
    fn straight_rays() {
        let st = mink();
        let o = Event::new(0.0, 0.0);
        let r = integrate_geodesic(&st, &o, &TangentVec::new(o, 1.0, 0.0), 1.0, 1e-2).unwrap();
        let e = r.end();
        assert!((e.t - 1.0).abs() < 1e-10 && e.x.abs() < 1e-10);
        let v = TangentVec::new(o, 1f64.cosh(), 1f64.sinh());
        let r = integrate_geodesic(&st, &o, &v, 1.0, 1e-2).unwrap();
        let e = r.end();
        assert!((e.t - 1f64.cosh()).abs() < 1e-8 && (e.x - 1f64.sinh()).abs() < 1e-8);
        assert!(!r.exited_domain);
    }

    #[test]
    fn diamond_exit_is_flagged() {
        let d = Spacetime::diamond();
        let o = Event::new(0.0, 0.0);
        let r = integrate_geodesic(&d, &o, &TangentVec::new(o, 1.0, 0.0), 2.0, 1e-3).unwrap();
        assert!(r.exited_domain);
        assert!(r.end().t < 1.0 && r.end().t > 0.99);
    }

    #[test]
    fn rejects_non_unit_vectors() {
        let st = mink();
        let o = Event::new(0.0, 0.0);
        assert!(integrate_geodesic(&st, &o, &TangentVec::new(o, 2.0, 0.0), 1.0, 0.1).is_err());
        assert!(integrate_geodesic(&st, &o, &TangentVec::new(o, 0.0, 1.0), 1.0, 0.1).is_err());
    }

    #[test]
    fn lengths() {
        let st = mink();
        let o = Event::new(0.0, 0.0);
        let c = Curve::segment(o, Event::new(2.0, 0.0), 4);
        assert!((curve_length(&st, MetricKind::Lorentz, &c).unwrap() - 2.0).abs() < 1e-12);
        let c = Curve::segment(o, Event::new(2.0, 1.0), 4);
        assert!((curve_length(&st, MetricKind::Lorentz, &c).unwrap() - 3f64.sqrt()).abs() < 1e-12);
        assert!((curve_length(&st, MetricKind::Riemann, &c).unwrap() - 5f64.sqrt()).abs() < 1e-12);
        let c = Curve::segment(o, Event::new(0.5, 1.0), 4);
        assert!(matches!(curve_length(&st, MetricKind::Lorentz, &c), Err(Error::SpacelikeSegment { .. })));
        assert!(Curve::new(vec![(0.0, o), (0.0, o)]).is_err());
    }

    #[test]
    fn shooting_examples() {
        let st = mink();
        let o = Event::new(0.0, 0.0);
        let r = shoot_between(&st, &o, &Event::new(2.0, 1.0), 1e-9).unwrap();
        assert!((r.length() - 3f64.sqrt()).abs() < 1e-6);
        let t0 = r.samples[0].tangent;
        assert!((t0.vx.asinh() - 0.5f64.atanh()).abs() < 1e-6);
        let r = shoot_between(&st, &o, &Event::new(1.0, 0.0), 1e-9).unwrap();
        assert!((r.length() - 1.0).abs() < 1e-9);
        assert_eq!(shoot_between(&st, &o, &Event::new(0.0, 1.0), 1e-9).unwrap_err(), Error::NotChronological);
    }

    #[test]
    fn desitter_shooting_lands() {
        let ds = Spacetime::desitter_toy(Slab::new(-1.0, 2.0, -2.0, 2.0));
        let p = Event::new(0.0, 0.0);
        let q = Event::new(1.0, 0.3);
        let r = shoot_between(&ds, &p, &q, 1e-9).unwrap();
        assert!(r.end().chart_distance(&q) < 1e-9);
        assert!(r.max_norm_drift(&ds) < EPS_NORM);
        // comoving worldline is a geodesic
        let r = shoot_between(&ds, &p, &Event::new(1.0, 0.0), 1e-10).unwrap();
        assert!((r.length() - 1.0).abs() < 1e-8);
    }
}

//! Spacetimes in diagonal lapse/scale form `g = -β² dt² + a² dx²`, tangent
//! and cotangent vectors, causal classification and temporal functions.
//!
//! Chart coordinates are `(t, x)` with the future pointing towards increasing
//! `t`. All catalog metrics are analytic, so every object here is `Copy` or
//! cheaply clonable and every operation is a pure function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the band around the null cone inside which a vector is
/// reported as lightlike.
pub const EPS_NULL: f64 = 1e-9;

/// Tolerance used by [`validate_temporal`].
pub const STEEP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub x: f64,
}

impl Event {
    pub const fn new(t: f64, x: f64) -> Self {
        Event { t, x }
    }

    pub fn offset(&self, dt: f64, dx: f64) -> Event {
        Event::new(self.t + dt, self.x + dx)
    }

    /// Chart-Euclidean distance.
    pub fn chart_distance(&self, other: &Event) -> f64 {
        (self.t - other.t).hypot(self.x - other.x)
    }
}

/// Contravariant vector `vt ∂_t + vx ∂_x` at `base`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVec {
    pub base: Event,
    pub vt: f64,
    pub vx: f64,
}

impl TangentVec {
    pub const fn new(base: Event, vt: f64, vx: f64) -> Self {
        TangentVec { base, vt, vx }
    }

    pub fn scaled(&self, k: f64) -> TangentVec {
        TangentVec::new(self.base, k * self.vt, k * self.vx)
    }

    pub fn neg(&self) -> TangentVec {
        self.scaled(-1.0)
    }

    pub fn is_finite(&self) -> bool {
        self.vt.is_finite() && self.vx.is_finite()
    }
}

/// Covariant components of `du = pt dt + px dx` at `base`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covector {
    pub base: Event,
    pub pt: f64,
    pub px: f64,
}

impl Covector {
    pub const fn new(base: Event, pt: f64, px: f64) -> Self {
        Covector { base, pt, px }
    }

    /// Pairing `p(V)`.
    pub fn apply(&self, v: &TangentVec) -> f64 {
        self.pt * v.vt + self.px * v.vx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalKind {
    Timelike,
    Lightlike,
    Spacelike,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TimeOrientation {
    Future,
    Past,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CausalClass {
    pub kind: CausalKind,
    pub orientation: TimeOrientation,
}

impl CausalClass {
    pub fn is_causal(&self) -> bool {
        matches!(self.kind, CausalKind::Timelike | CausalKind::Lightlike)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricKind {
    Lorentz,
    Riemann,
}

/// Analytic positive profile used for the lapse `β` and the scale `a`:
/// `amp * exp(rate_t * t + rate_x * x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub amp: f64,
    pub rate_t: f64,
    pub rate_x: f64,
}

impl Profile {
    pub const fn constant(c: f64) -> Self {
        Profile { amp: c, rate_t: 0.0, rate_x: 0.0 }
    }

    pub const fn exp_t(amp: f64, rate: f64) -> Self {
        Profile { amp, rate_t: rate, rate_x: 0.0 }
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        if self.rate_t == 0.0 && self.rate_x == 0.0 {
            self.amp
        } else {
            self.amp * (self.rate_t * t + self.rate_x * x).exp()
        }
    }

    pub fn depends_on_x(&self) -> bool {
        self.rate_x != 0.0
    }

    pub fn is_constant(&self) -> bool {
        self.rate_t == 0.0 && self.rate_x == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slab {
    pub t_min: f64,
    pub t_max: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl Slab {
    pub const fn new(t_min: f64, t_max: f64, x_min: f64, x_max: f64) -> Self {
        Slab { t_min, t_max, x_min, x_max }
    }

    pub fn contains(&self, e: &Event) -> bool {
        e.t >= self.t_min && e.t <= self.t_max && e.x >= self.x_min && e.x <= self.x_max
    }

    pub fn is_valid(&self) -> bool {
        self.t_min < self.t_max && self.x_min < self.x_max
    }
}

/// Open region of the slab that plays the role of the manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Mask {
    Full,
    /// `|t - center_t| + |x - center_x| < radius`.
    Diamond {
        center_t: f64,
        center_x: f64,
        radius: f64,
    },
}

impl Mask {
    pub fn contains(&self, e: &Event) -> bool {
        match *self {
            Mask::Full => true,
            Mask::Diamond { center_t, center_x, radius } => (e.t - center_t).abs() + (e.x - center_x).abs() < radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxMetric {
    /// `h = dt² + dx²`.
    #[default]
    EuclidChart,
    /// `h = β² dt² + a² dx²`.
    LapseScale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spacetime {
    pub name: String,
    pub lapse: Profile,
    pub scale: Profile,
    pub mask: Mask,
    pub slab: Slab,
    pub aux: AuxMetric,
}

impl Spacetime {
    /// Flat `-dt² + dx²` on the given slab.
    pub fn minkowski2(slab: Slab) -> Self {
        Spacetime {
            name: "minkowski2".into(),
            lapse: Profile::constant(1.0),
            scale: Profile::constant(1.0),
            mask: Mask::Full,
            slab,
            aux: AuxMetric::EuclidChart,
        }
    }

    /// `I⁺((-1,0)) ∩ I⁻((1,0))` in two-dimensional Minkowski space.
    pub fn diamond() -> Self {
        Spacetime {
            name: "diamond".into(),
            lapse: Profile::constant(1.0),
            scale: Profile::constant(1.0),
            mask: Mask::Diamond { center_t: 0.0, center_x: 0.0, radius: 1.0 },
            slab: Slab::new(-1.0, 1.0, -1.0, 1.0),
            aux: AuxMetric::EuclidChart,
        }
    }

    /// `-dt² + e^{2t} dx²`.
    pub fn desitter_toy(slab: Slab) -> Self {
        Spacetime {
            name: "desitter-toy".into(),
            lapse: Profile::constant(1.0),
            scale: Profile::exp_t(1.0, 1.0),
            mask: Mask::Full,
            slab,
            aux: AuxMetric::EuclidChart,
        }
    }

    pub fn default_slab(key: &str) -> Option<Slab> {
        match key {
            "minkowski2" => Some(Slab::new(-10.0, 10.0, -10.0, 10.0)),
            "diamond" => Some(Slab::new(-1.0, 1.0, -1.0, 1.0)),
            "desitter-toy" => Some(Slab::new(-1.0, 3.0, -4.0, 4.0)),
            _ => None,
        }
    }

    /// Builds a catalog spacetime; `slab` overrides the default slab where the
    /// scenario allows it (the diamond always uses its own).
    pub fn from_key(key: &str, slab: Option<Slab>) -> Result<Self> {
        let default = Self::default_slab(key).ok_or_else(|| Error::UnknownKey(key.to_string()))?;
        let slab = slab.unwrap_or(default);
        if !slab.is_valid() {
            return Err(Error::InvalidParameter("empty slab".into()));
        }
        Ok(match key {
            "minkowski2" => Self::minkowski2(slab),
            "diamond" => Self::diamond(),
            "desitter-toy" => Self::desitter_toy(slab),
            _ => unreachable!(),
        })
    }

    pub fn with_aux(mut self, aux: AuxMetric) -> Self {
        self.aux = aux;
        self
    }

    #[inline]
    pub fn beta(&self, e: &Event) -> f64 {
        self.lapse.eval(e.t, e.x)
    }

    #[inline]
    pub fn a(&self, e: &Event) -> f64 {
        self.scale.eval(e.t, e.x)
    }

    /// Coordinate light speed `|dx/dt|` along null directions.
    #[inline]
    pub fn cone_slope(&self, e: &Event) -> f64 {
        self.beta(e) / self.a(e)
    }

    pub fn contains(&self, e: &Event) -> bool {
        self.slab.contains(e) && self.mask.contains(e)
    }

    fn require(&self, e: &Event) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(*e))
        }
    }

    /// True when neither profile depends on `x`, so null curves from any
    /// event are translates of each other.
    pub fn is_x_homogeneous(&self) -> bool {
        !self.lapse.depends_on_x() && !self.scale.depends_on_x()
    }

    /// `g(V, W)` without domain checks.
    #[inline]
    pub fn lorentz(&self, base: &Event, vt: f64, vx: f64, wt: f64, wx: f64) -> f64 {
        let b = self.beta(base);
        let a = self.a(base);
        -b * b * vt * wt + a * a * vx * wx
    }

    /// `h(V, W)` without domain checks.
    #[inline]
    pub fn riemann(&self, base: &Event, vt: f64, vx: f64, wt: f64, wx: f64) -> f64 {
        match self.aux {
            AuxMetric::EuclidChart => vt * wt + vx * wx,
            AuxMetric::LapseScale => {
                let b = self.beta(base);
                let a = self.a(base);
                b * b * vt * wt + a * a * vx * wx
            }
        }
    }

    pub fn h_norm(&self, v: &TangentVec) -> f64 {
        self.riemann(&v.base, v.vt, v.vx, v.vt, v.vx).sqrt()
    }

    /// `g(V,V)` without domain checks.
    pub fn norm2(&self, v: &TangentVec) -> f64 {
        self.lorentz(&v.base, v.vt, v.vx, v.vt, v.vx)
    }

    /// `g(du♯, du♯) = -pt²/β² + px²/a²`.
    pub fn covector_norm2(&self, p: &Covector) -> f64 {
        let b = self.beta(&p.base);
        let a = self.a(&p.base);
        -p.pt * p.pt / (b * b) + p.px * p.px / (a * a)
    }

    /// Riemannian (aux) distance between two nearby events, measured with
    /// the aux metric frozen at their midpoint.
    pub fn h_distance(&self, p: &Event, q: &Event) -> f64 {
        let mid = Event::new(0.5 * (p.t + q.t), 0.5 * (p.x + q.x));
        let (dt, dx) = (q.t - p.t, q.x - p.x);
        self.riemann(&mid, dt, dx, dt, dx).sqrt()
    }

    /// Left and right null curves through `p` evaluated at time `t`
    /// (either direction in time).
    pub fn null_bounds(&self, p: &Event, t: f64) -> (f64, f64) {
        if (t - p.t).abs() == 0.0 {
            return (p.x, p.x);
        }
        if self.is_x_homogeneous() {
            let w = self.cone_width(p.t, t);
            return (p.x - w, p.x + w);
        }
        let left = self.integrate_null(p, t, -1.0);
        let right = self.integrate_null(p, t, 1.0);
        (left.min(right), left.max(right))
    }

    /// `∫ β/a dt` between `t0` and `t1` (absolute value) for x-homogeneous
    /// metrics, where the integrand is a single exponential.
    fn cone_width(&self, t0: f64, t1: f64) -> f64 {
        let c = self.lapse.amp / self.scale.amp;
        let k = self.lapse.rate_t - self.scale.rate_t;
        if k == 0.0 {
            return c * (t1 - t0).abs();
        }
        (c * ((k * t1).exp() - (k * t0).exp()) / k).abs()
    }

    fn integrate_null(&self, p: &Event, t: f64, side: f64) -> f64 {
        let n = (((t - p.t).abs() / 0.01).ceil() as usize).max(4);
        let h = (t - p.t) / n as f64;
        let rhs = |tt: f64, xx: f64| side * self.lapse.eval(tt, xx) / self.scale.eval(tt, xx);
        let (mut tt, mut xx) = (p.t, p.x);
        let sgn = h.signum();
        for _ in 0..n {
            // dx/dt; the sign of dt flips the side when integrating backwards
            let k1 = sgn * rhs(tt, xx);
            let k2 = sgn * rhs(tt + 0.5 * h, xx + 0.5 * h.abs() * k1);
            let k3 = sgn * rhs(tt + 0.5 * h, xx + 0.5 * h.abs() * k2);
            let k4 = sgn * rhs(tt + h, xx + h.abs() * k3);
            xx += h.abs() * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
            tt += h;
        }
        xx
    }

    /// Causal relation of `q` relative to `p` with a tolerance band of
    /// half-width `tol` (in `x`) around the null cone.
    pub fn relation(&self, p: &Event, q: &Event, tol: f64) -> CausalRelation {
        if p == q {
            return CausalRelation::Null;
        }
        if q.t < p.t {
            return CausalRelation::Unrelated;
        }
        let (l, r) = self.null_bounds(p, q.t);
        if q.x > l + tol && q.x < r - tol {
            CausalRelation::Chronological
        } else if q.x >= l - tol && q.x <= r + tol {
            CausalRelation::Null
        } else {
            CausalRelation::Unrelated
        }
    }
}

/// Relation of a second event to a first one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalRelation {
    /// Strictly inside the future cone.
    Chronological,
    /// On the future null cone (within tolerance), including equality.
    Null,
    Unrelated,
}

impl CausalRelation {
    pub fn is_causal(&self) -> bool {
        !matches!(self, CausalRelation::Unrelated)
    }
}

pub fn inner_product(st: &Spacetime, kind: MetricKind, v: &TangentVec, w: &TangentVec) -> Result<f64> {
    if v.base != w.base {
        return Err(Error::BaseMismatch);
    }
    st.require(&v.base)?;
    Ok(match kind {
        MetricKind::Lorentz => st.lorentz(&v.base, v.vt, v.vx, w.vt, w.vx),
        MetricKind::Riemann => st.riemann(&v.base, v.vt, v.vx, w.vt, w.vx),
    })
}

/// Causal character with an [`EPS_NULL`] band, relative to the `h`-size of
/// the vector. Orientation is read off `vt` (the time orientation is `∂_t`).
pub fn classify_vector(st: &Spacetime, v: &TangentVec) -> CausalClass {
    classify_with(st, v, EPS_NULL)
}

pub fn classify_with(st: &Spacetime, v: &TangentVec, eps: f64) -> CausalClass {
    if v.vt == 0.0 && v.vx == 0.0 {
        return CausalClass { kind: CausalKind::Zero, orientation: TimeOrientation::None };
    }
    let n = st.norm2(v);
    let scale = st.riemann(&v.base, v.vt, v.vx, v.vt, v.vx).max(f64::MIN_POSITIVE);
    let kind = if n.abs() <= eps * scale {
        CausalKind::Lightlike
    } else if n < 0.0 {
        CausalKind::Timelike
    } else {
        CausalKind::Spacelike
    };
    let orientation = match kind {
        CausalKind::Timelike | CausalKind::Lightlike => {
            if v.vt > 0.0 {
                TimeOrientation::Future
            } else {
                TimeOrientation::Past
            }
        }
        _ => TimeOrientation::None,
    };
    CausalClass { kind, orientation }
}

/// Metric dual `du ↦ ∇u`.
pub fn raise_gradient(st: &Spacetime, p: &Covector) -> Result<TangentVec> {
    st.require(&p.base)?;
    Ok(raise_unchecked(st, p))
}

#[inline]
pub(crate) fn raise_unchecked(st: &Spacetime, p: &Covector) -> TangentVec {
    let b = st.beta(&p.base);
    let a = st.a(&p.base);
    TangentVec::new(p.base, -p.pt / (b * b), p.px / (a * a))
}

/// Inverse of [`raise_gradient`].
pub fn lower(st: &Spacetime, v: &TangentVec) -> Covector {
    let b = st.beta(&v.base);
    let a = st.a(&v.base);
    Covector::new(v.base, -b * b * v.vt, a * a * v.vx)
}

/// Catalog temporal functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "key", rename_all = "snake_case")]
pub enum TemporalFunction {
    /// `τ = k t`.
    ScaledTime { k: f64 },
    /// `τ = t / (1 - x²)` on the diamond; level sets join the spatial
    /// vertices `(0, ±1)`.
    DiamondTime,
}

impl TemporalFunction {
    pub fn value(&self, e: &Event) -> f64 {
        match *self {
            TemporalFunction::ScaledTime { k } => k * e.t,
            TemporalFunction::DiamondTime => e.t / (1.0 - e.x * e.x),
        }
    }

    pub fn differential(&self, e: &Event) -> Covector {
        match *self {
            TemporalFunction::ScaledTime { k } => Covector::new(*e, k, 0.0),
            TemporalFunction::DiamondTime => {
                let q = 1.0 - e.x * e.x;
                Covector::new(*e, 1.0 / q, 2.0 * e.t * e.x / (q * q))
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> ScaledTemporal {
        ScaledTemporal { inner: *self, factor }
    }
}

/// `factor * τ`; used to check that steepness survives scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledTemporal {
    pub inner: TemporalFunction,
    pub factor: f64,
}

pub trait Temporal {
    fn value(&self, e: &Event) -> f64;
    fn differential(&self, e: &Event) -> Covector;
}

impl Temporal for TemporalFunction {
    fn value(&self, e: &Event) -> f64 {
        TemporalFunction::value(self, e)
    }
    fn differential(&self, e: &Event) -> Covector {
        TemporalFunction::differential(self, e)
    }
}

impl Temporal for ScaledTemporal {
    fn value(&self, e: &Event) -> f64 {
        self.factor * self.inner.value(e)
    }
    fn differential(&self, e: &Event) -> Covector {
        let d = self.inner.differential(e);
        Covector::new(d.base, self.factor * d.pt, self.factor * d.px)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalReport {
    pub steep: bool,
    pub witness: Option<TangentVec>,
    pub monotone: bool,
}

/// Checks `|dτ(V)| ≥ max{√(-g(V,V)), |V|_h}` and `dτ(V) > 0` on the samples.
pub fn validate_temporal<T: Temporal + ?Sized>(
    st: &Spacetime,
    tau: &T,
    samples: &[TangentVec],
) -> Result<TemporalReport> {
    let mut steep = true;
    let mut witness = None;
    let mut monotone = true;
    for v in samples {
        st.require(&v.base)?;
        if classify_vector(st, v).kind != CausalKind::Timelike {
            return Err(Error::NotTimelike { vt: v.vt, vx: v.vx });
        }
        let dv = tau.differential(&v.base).apply(v);
        let bound = (-st.norm2(v)).sqrt().max(st.h_norm(v));
        if dv.abs() < bound - STEEP_TOL && steep {
            steep = false;
            witness = Some(*v);
        }
        if dv <= 0.0 {
            monotone = false;
        }
    }
    Ok(TemporalReport { steep, witness, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mink() -> Spacetime {
        Spacetime::minkowski2(Slab::new(-2.0, 2.0, -2.0, 2.0))
    }

    #[test]
    fn inner_products() {
        let st = mink();
        let o = Event::new(0.0, 0.0);
        let v = TangentVec::new(o, 1.0, 0.0);
        assert_eq!(inner_product(&st, MetricKind::Lorentz, &v, &v).unwrap(), -1.0);
        let n = TangentVec::new(o, 1.0, 1.0);
        assert_eq!(inner_product(&st, MetricKind::Lorentz, &n, &n).unwrap(), 0.0);

        let ds = Spacetime::desitter_toy(Slab::new(-1.0, 2.0, -2.0, 2.0));
        let e = Event::new(1.0, 0.0);
        let w = TangentVec::new(e, 0.0, 1.0);
        let g = inner_product(&ds, MetricKind::Lorentz, &w, &w).unwrap();
        assert!((g - 1f64.exp().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn inner_product_errors() {
        let st = mink();
        let a = TangentVec::new(Event::new(0.0, 0.0), 1.0, 0.0);
        let b = TangentVec::new(Event::new(0.1, 0.0), 1.0, 0.0);
        assert_eq!(inner_product(&st, MetricKind::Lorentz, &a, &b), Err(Error::BaseMismatch));
        let far = TangentVec::new(Event::new(5.0, 0.0), 1.0, 0.0);
        assert!(matches!(inner_product(&st, MetricKind::Lorentz, &far, &far), Err(Error::OutsideDomain(_))));
        let d = Spacetime::diamond();
        let corner = TangentVec::new(Event::new(0.9, 0.9), 1.0, 0.0);
        assert!(inner_product(&d, MetricKind::Riemann, &corner, &corner).is_err());
    }

    #[test]
    fn classification_examples() {
        let st = mink();
        let o = Event::new(0.0, 0.0);
        let c = classify_vector(&st, &TangentVec::new(o, 1.0, 0.0));
        assert_eq!((c.kind, c.orientation), (CausalKind::Timelike, TimeOrientation::Future));
        let c = classify_vector(&st, &TangentVec::new(o, -1.0, 1.0));
        assert_eq!((c.kind, c.orientation), (CausalKind::Lightlike, TimeOrientation::Past));
        let c = classify_vector(&st, &TangentVec::new(o, 0.0, 1.0));
        assert_eq!((c.kind, c.orientation), (CausalKind::Spacelike, TimeOrientation::None));
        let c = classify_vector(&st, &TangentVec::new(o, 0.0, 0.0));
        assert_eq!((c.kind, c.orientation), (CausalKind::Zero, TimeOrientation::None));
    }

    #[test]
    fn raising_examples() {
        let st = mink();
        let o = Event::new(0.0, 0.0);
        let g = raise_gradient(&st, &Covector::new(o, 1.0, 0.0)).unwrap();
        assert_eq!((g.vt, g.vx), (-1.0, 0.0));
        let s2 = 2f64.sqrt();
        let g = raise_gradient(&st, &Covector::new(Event::new(0.5, 0.5), s2, -1.0)).unwrap();
        assert!((g.vt + s2).abs() < 1e-15 && (g.vx + 1.0).abs() < 1e-15);
        assert!((st.norm2(&g) + 1.0).abs() < 1e-12);
        let ds = Spacetime::desitter_toy(Slab::new(-1.0, 2.0, -2.0, 2.0));
        let g = raise_gradient(&ds, &Covector::new(o, 0.0, 1.0)).unwrap();
        assert_eq!((g.vt, g.vx), (0.0, 1.0));
    }

    #[test]
    fn steepness_witness() {
        let st = mink();
        let v = TangentVec::new(Event::new(0.0, 0.0), 1.0, 0.5);
        let r = validate_temporal(&st, &TemporalFunction::ScaledTime { k: 1.0 }, &[v]).unwrap();
        assert!(!r.steep);
        assert_eq!(r.witness, Some(v));
        assert!(r.monotone);
        let r = validate_temporal(&st, &TemporalFunction::ScaledTime { k: 1.0 }, &[TangentVec::new(v.base, 1.0, 0.0)])
            .unwrap();
        assert!(r.monotone && r.steep);
        let bad = TangentVec::new(v.base, 0.0, 1.0);
        assert!(matches!(
            validate_temporal(&st, &TemporalFunction::ScaledTime { k: 1.0 }, &[bad]),
            Err(Error::NotTimelike { .. })
        ));
    }

    #[test]
    fn diamond_time_has_timelike_differential() {
        let st = Spacetime::diamond();
        for &(t, x) in &[(0.0, 0.0), (0.5, 0.3), (-0.7, 0.25), (0.1, -0.85)] {
            let e = Event::new(t, x);
            let v = raise_gradient(&st, &TemporalFunction::DiamondTime.differential(&e)).unwrap();
            let c = classify_vector(&st, &v);
            assert_eq!(c.kind, CausalKind::Timelike);
            assert_eq!(c.orientation, TimeOrientation::Past);
        }
    }

    #[test]
    fn null_bounds_desitter() {
        let ds = Spacetime::desitter_toy(Slab::new(-1.0, 2.0, -2.0, 2.0));
        let (l, r) = ds.null_bounds(&Event::new(0.0, 0.0), 1.0);
        let w = 1.0 - (-1f64).exp();
        assert!((r - w).abs() < 1e-10 && (l + w).abs() < 1e-10);
    }

    #[test]
    fn relations() {
        let st = mink();
        let o = Event::new(0.0, 0.0);
        assert_eq!(st.relation(&o, &Event::new(2.0, 1.0), 1e-12), CausalRelation::Chronological);
        assert_eq!(st.relation(&o, &Event::new(1.0, 1.0), 1e-12), CausalRelation::Null);
        assert_eq!(st.relation(&o, &Event::new(0.0, 1.0), 1e-12), CausalRelation::Unrelated);
        assert_eq!(st.relation(&o, &Event::new(-1.0, 0.0), 1e-12), CausalRelation::Unrelated);
    }
}

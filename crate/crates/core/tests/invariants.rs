use std::sync::OnceLock;

use eikonal_core::analysis::{orientation_report, Verdict};
use eikonal_core::distance::{causal_mask, distance_to_set, point_distance, Direction, MaskDirection, Target};
use eikonal_core::solutions::{
    analytic_solution, build_limit_solution_with, lax_oleinik_apply, AnalyticField, AnalyticKind, ConvergenceLog,
    LimitDirection, LimitOptions,
};
use eikonal_core::{Event, Grid, ScalarField, Slab, Spacetime, TemporalFunction};
use proptest::prelude::*;

const DT: f64 = 1.0 / 64.0;

fn unit() -> Slab {
    Slab::new(-1.0, 1.0, -1.0, 1.0)
}

fn minkowski() -> Spacetime {
    Spacetime::minkowski2(Slab::new(-10.0, 10.0, -10.0, 10.0))
}

fn desitter() -> Spacetime {
    Spacetime::desitter_toy(Slab::new(-1.0, 3.0, -4.0, 4.0))
}

struct Constructed {
    st: Spacetime,
    u: ScalarField,
    log: ConvergenceLog,
    x0: Event,
    window: Slab,
}

fn u_plus() -> &'static Constructed {
    static C: OnceLock<Constructed> = OnceLock::new();
    C.get_or_init(|| {
        let st = minkowski();
        let g = Grid::with_resolution(unit(), 32).unwrap();
        let x0 = Event::new(0.0, 0.0);
        let window = Slab::new(-0.5, 0.5, -0.5, 0.5);
        let tau = TemporalFunction::ScaledTime { k: 2f64.sqrt() };
        let opts = LimitOptions { probe: Some(window) };
        let (u, log) =
            build_limit_solution_with(&st, &tau, &x0, &[2.0, 4.0, 8.0], &g, LimitDirection::Plus, &opts).unwrap();
        Constructed { st, u, log, x0, window }
    })
}

fn diamond_limit() -> &'static Constructed {
    static C: OnceLock<Constructed> = OnceLock::new();
    C.get_or_init(|| {
        let st = Spacetime::diamond();
        let g = Grid::with_resolution(st.slab, 128).unwrap();
        let x0 = Event::new(0.0, 0.0);
        let window = Slab::new(-1.0, 0.5, -0.4, 0.4);
        let opts = LimitOptions { probe: Some(window) };
        let (u, log) = build_limit_solution_with(
            &st,
            &TemporalFunction::DiamondTime,
            &x0,
            &[0.95, 0.98, 0.99],
            &g,
            LimitDirection::Plus,
            &opts,
        )
        .unwrap();
        Constructed { st, u, log, x0, window }
    })
}

/// Event `len` later than `p`, at fraction `v` of the way from `p.x` to the
/// edge of its future cone.
fn ahead(st: &Spacetime, p: &Event, len: f64, v: f64) -> Event {
    let (l, r) = st.null_bounds(p, p.t + len);
    p.offset(len, v * if v < 0.0 { p.x - l } else { r - p.x })
}

#[test]
fn anchors_vanish() {
    for c in [u_plus(), diamond_limit()] {
        assert!(c.u.interpolate(&c.x0).unwrap().abs() <= 2.0 * c.u.grid.dt());
    }
}

#[test]
fn constructed_fields_are_equi_lipschitz() {
    for c in [u_plus(), diamond_limit()] {
        assert!(c.log.equi_lipschitz, "drift {}", c.log.lipschitz_drift());
        assert!(c.log.converged);
    }
}

#[test]
fn slice_distance_refines_exactly() {
    // proper time to a constant-time slice is 1 - t on both metrics
    for st in [minkowski(), desitter()] {
        for n in [16, 32] {
            // dt small enough for the cone condition where a = e^t is smallest
            let g = Grid::new(unit(), 3 * n + 1, n + 1).unwrap();
            let tau = TemporalFunction::ScaledTime { k: 1.0 };
            let d = distance_to_set(&st, &g, &Target::Temporal { tau, s: 1.0 }, Direction::ToFuture).unwrap();
            for k in 0..g.len() {
                let (j, i) = g.split(k);
                if let Some(v) = d.get(j, i) {
                    assert!((v - (1.0 - g.t(j))).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn orientation_matches_monotonicity_across_catalog() {
    let st = Spacetime::minkowski2(unit());
    let g = Grid::with_resolution(unit(), 32).unwrap();
    let cases = [
        (AnalyticField::new(AnalyticKind::CoordinateTime), Some(Verdict::ConsistentPast)),
        (AnalyticField::new(AnalyticKind::Boost { theta: 0.5 }), Some(Verdict::ConsistentPast)),
        (AnalyticField::new(AnalyticKind::Boost { theta: -1.0 }), Some(Verdict::ConsistentPast)),
        (AnalyticField::scaled(AnalyticKind::CoordinateTime, -1.0), Some(Verdict::ConsistentFuture)),
        (AnalyticField::scaled(AnalyticKind::Boost { theta: 0.5 }, -1.0), Some(Verdict::ConsistentFuture)),
        (AnalyticField::new(AnalyticKind::AbsTime), Some(Verdict::NonConsistent)),
        (AnalyticField::new(AnalyticKind::Wedge), Some(Verdict::NonConsistent)),
    ];
    for (f, want) in cases {
        let u = analytic_solution(&st, &g, &f);
        for seed in 0..3 {
            let r = orientation_report(&st, &u, seed);
            assert_eq!(Some(r.verdict), want, "{}", f.name());
            assert!(r.traces.consistent, "{} seed {seed}", f.name());
            assert_eq!(r.traces.traces, 50);
        }
    }
    let d = Spacetime::diamond();
    let gd = Grid::with_resolution(d.slab, 64).unwrap();
    let v = analytic_solution(&d, &gd, &AnalyticField::new(AnalyticKind::DiamondVertex));
    let r = orientation_report(&d, &v, 1);
    assert_eq!(r.verdict, Verdict::ConsistentPast);
    assert!(r.traces.consistent && r.traces.all_increasing);
    for c in [u_plus(), diamond_limit()] {
        let r = orientation_report(&c.st, &c.u, 2);
        assert_eq!(r.verdict, Verdict::ConsistentPast);
        assert!(r.traces.all_increasing);
    }
}

#[test]
fn lax_oleinik_semigroup() {
    let st = Spacetime::minkowski2(unit());
    let g = Grid::with_resolution(unit(), 64).unwrap();
    for f in [AnalyticField::new(AnalyticKind::CoordinateTime), AnalyticField::new(AnalyticKind::Boost { theta: 0.5 })]
    {
        let u = analytic_solution(&st, &g, &f);
        let once = lax_oleinik_apply(&st, &u, 0.2).unwrap();
        let half = lax_oleinik_apply(&st, &u, 0.1).unwrap();
        let twice = lax_oleinik_apply(&st, &half.field, 0.1).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..g.len() {
            if once.boundary[k] || twice.boundary[k] || half.boundary[k] {
                continue;
            }
            let (a, b) = (once.field.values[k], twice.field.values[k]);
            if a.is_finite() && b.is_finite() {
                worst = worst.max((a - b).abs());
            }
        }
        assert!(worst <= 5.0 * g.dt(), "{}: {worst}", f.name());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reverse_triangle(
        ds in any::<bool>(),
        t0 in -0.5f64..0.5, x0 in -0.5f64..0.5,
        l1 in 0.05f64..0.6, v1 in -0.9f64..0.9,
        l2 in 0.05f64..0.6, v2 in -0.9f64..0.9,
    ) {
        let st = if ds { desitter() } else { minkowski() };
        let p = Event::new(t0, x0);
        let q = ahead(&st, &p, l1, v1);
        let r = ahead(&st, &q, l2, v2);
        let (pq, qr, pr) = (point_distance(&st, &p, &q), point_distance(&st, &q, &r), point_distance(&st, &p, &r));
        prop_assert!(pq > 0.0 && qr > 0.0);
        prop_assert!(pq + qr <= pr + 3.0 * DT, "{pq} + {qr} > {pr}");
    }

    #[test]
    fn distance_is_zero_off_the_cone(t0 in -0.5f64..0.5, x0 in -0.5f64..0.5, l in 0.05f64..0.6, v in 1.05f64..3.0, back in any::<bool>()) {
        let st = desitter();
        let p = Event::new(t0, x0);
        let (lo, hi) = st.null_bounds(&p, p.t + l);
        let q = p.offset(l, v * (hi - p.x).max(p.x - lo));
        prop_assert_eq!(point_distance(&st, &p, &q), 0.0);
        if back {
            prop_assert_eq!(point_distance(&st, &ahead(&st, &p, l, 0.3), &p), 0.0);
        }
    }

    #[test]
    fn lemma_inequality_on_constructed_fields(
        diamond in any::<bool>(),
        ft in 0.0f64..1.0, fx in 0.0f64..1.0,
        l in 0.02f64..0.5, v in -1.0f64..1.0,
    ) {
        let c = if diamond { diamond_limit() } else { u_plus() };
        let w = &c.window;
        let p = Event::new(w.t_min + ft * (w.t_max - w.t_min), w.x_min + fx * (w.x_max - w.x_min));
        let q = ahead(&c.st, &p, l, v);
        let (Some(up), Some(uq)) = (c.u.interpolate(&p), c.u.interpolate(&q)) else { return Ok(()) };
        if !(c.st.contains(&p) && c.st.contains(&q)) {
            return Ok(());
        }
        let d = point_distance(&c.st, &p, &q);
        prop_assert!(uq - up >= d - 3.0 * c.u.grid.dt(), "{} < {}", uq - up, d);
    }

    #[test]
    fn distance_below_temporal_gap(s in 0.2f64..0.9, k in 1.2f64..2.0) {
        let st = minkowski();
        let g = Grid::with_resolution(unit(), 32).unwrap();
        let tau = TemporalFunction::ScaledTime { k };
        let d = distance_to_set(&st, &g, &Target::Temporal { tau, s }, Direction::ToFuture).unwrap();
        for k2 in 0..g.len() {
            let (j, i) = g.split(k2);
            if let Some(v) = d.get(j, i) {
                let gap = s - k * g.t(j);
                if gap >= 0.0 {
                    prop_assert!(v <= gap + 2.0 * g.dt());
                }
            }
        }
    }

    #[test]
    fn larger_targets_are_closer(xa in -0.8f64..-0.1, xb in 0.1f64..0.8, t1 in 0.3f64..0.9, slope in -0.3f64..0.3) {
        let st = minkowski();
        let g = Grid::with_resolution(unit(), 32).unwrap();
        let line = |x: f64| Event::new(t1 + slope * x, x);
        let small = Target::Polyline(vec![line(xa), line(xb)]);
        let large = Target::Polyline(vec![line(-1.0), line(xa), line(xb), line(1.0)]);
        let ds = distance_to_set(&st, &g, &small, Direction::ToFuture).unwrap();
        let dl = distance_to_set(&st, &g, &large, Direction::ToFuture).unwrap();
        for k in 0..g.len() {
            let (j, i) = g.split(k);
            if let Some(a) = ds.get(j, i) {
                let b = dl.get(j, i);
                prop_assert!(b.is_some());
                prop_assert!(a <= b.unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn positive_distance_matches_mask(jp in 8usize..24, ip in 8usize..24, ft in 0.0f64..1.0, fx in -1.0f64..1.0) {
        let st = minkowski();
        let g = Grid::with_resolution(unit(), 16).unwrap();
        let p = g.event(jp, ip);
        let mask = causal_mask(&st, &g, &[(jp, ip)], MaskDirection::FutureOf).unwrap();
        let q = Event::new(p.t + ft * (g.t_max - p.t), p.x + fx * (g.x_max - g.x_min));
        let Some((jq, iq)) = g.nearest(&q) else { return Ok(()) };
        let qn = g.event(jq, iq);
        let (l, r) = st.null_bounds(&p, qn.t);
        let band = 2.0 * g.dx();
        if qn.x < l - band || qn.x > r + band {
            prop_assert!(!mask.contains(jq, iq));
            prop_assert_eq!(point_distance(&st, &p, &qn), 0.0);
        } else if qn.x > l + band && qn.x < r - band {
            prop_assert!(mask.contains(jq, iq));
            prop_assert!(point_distance(&st, &p, &qn) > 0.0);
        }
    }
}

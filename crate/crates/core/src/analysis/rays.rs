use serde::{Deserialize, Serialize};

use super::gradient::{gradient_probe, limiting_gradients};
use super::has_margin;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geodesics::{integrate_geodesic_within, Ray};
use crate::geometry::{Event, Spacetime, TangentVec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayReport {
    pub event: Event,
    pub rays: Vec<Ray>,
    /// `sup_s |u(γ(s)) − u(e) − s|` per ray.
    pub calibration_residuals: Vec<f64>,
    pub unique: bool,
    /// Interior samples are differentiable points with `γ̇ ≈ −∇u`.
    pub differentiable_along: bool,
    /// Largest `|γ̇ + ∇u|_h` seen at interior samples.
    pub max_alignment_error: f64,
}

/// Geodesics from `e` with initial tangent `−V/√(−g(V,V))` for each timelike
/// limiting gradient `V` (the gradient itself at differentiable points),
/// integrated until they leave the support of `u`.
pub fn trace_calibrated_ray(st: &Spacetime, u: &ScalarField, e: &Event) -> Result<RayReport> {
    let gp = gradient_probe(st, u, e)?;
    let reps: Vec<TangentVec> = if gp.differentiable { vec![gp.grad] } else { limiting_gradients(st, u, e)?.vectors };
    let timelike: Vec<TangentVec> = reps.into_iter().filter(|v| st.norm2(v) < 0.0).collect();
    if timelike.is_empty() {
        return Err(Error::NoTimelikeRepresentative(*e));
    }
    let u0 = u.interpolate(e).ok_or(Error::OutsideDomain(*e))?;
    let g = u.grid;
    let step = 0.5 * g.dt().min(g.dx());
    let span = 2.0 * ((g.t_max - g.t_min) + (g.x_max - g.x_min));
    let inside = |p: &Event| st.contains(p) && u.interpolate(p).is_some();
    let skip = 4.0 * g.dt().max(g.dx());
    let mut rays = Vec::new();
    let mut residuals = Vec::new();
    let mut along = true;
    let mut align: f64 = 0.0;
    for v in &timelike {
        let n = (-st.norm2(v)).sqrt();
        let tangent = TangentVec::new(*e, -v.vt / n, -v.vx / n);
        let ray = integrate_geodesic_within(st, e, &tangent, span, step, &inside)?;
        let mut res: f64 = 0.0;
        for s in &ray.samples {
            if let Some(val) = u.interpolate(&s.event) {
                res = res.max((val - u0 - s.s).abs());
            }
            let interior = s.event.chart_distance(e) > skip && (ray.length() - s.s) > skip;
            if interior && has_margin(st, u, &s.event, 3.0) {
                let Ok(q) = gradient_probe(st, u, &s.event) else { continue };
                let lip = st.h_norm(&q.grad).max(1.0);
                let d = TangentVec::new(s.event, s.tangent.vt + q.grad.vt, s.tangent.vx + q.grad.vx);
                let err = st.h_norm(&d);
                align = align.max(err);
                if !q.differentiable || err > 10.0 * g.dx() * lip {
                    along = false;
                }
            }
        }
        residuals.push(res);
        rays.push(ray);
    }
    Ok(RayReport {
        event: *e,
        unique: rays.len() == 1,
        rays,
        calibration_residuals: residuals,
        differentiable_along: along,
        max_alignment_error: align,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Slab;
    use crate::grid::Grid;
    use crate::solutions::{analytic_solution, AnalyticField, AnalyticKind};

    #[test]
    fn rays() {
        let st = Spacetime::minkowski2(Slab::new(-1.0, 1.0, -1.0, 1.0));
        let g = Grid::with_resolution(st.slab, 128).unwrap();
        let u = analytic_solution(&st, &g, &AnalyticField::new(AnalyticKind::CoordinateTime));
        let r = trace_calibrated_ray(&st, &u, &Event::new(0.0, 0.0)).unwrap();
        assert!(r.unique && r.differentiable_along);
        assert!(r.calibration_residuals[0] <= 2.0 * g.dx());
        assert!((r.rays[0].end().t - 1.0).abs() < 2.0 * g.dt() && r.rays[0].end().x.abs() < 1e-12);

        let u = analytic_solution(&st, &g, &AnalyticField::new(AnalyticKind::AbsTime));
        let r = trace_calibrated_ray(&st, &u, &Event::new(0.0, 0.2)).unwrap();
        assert_eq!(r.rays.len(), 2);
        assert!(!r.unique);

        let d = Spacetime::diamond();
        let g = Grid::with_resolution(d.slab, 128).unwrap();
        let u = analytic_solution(&d, &g, &AnalyticField::new(AnalyticKind::DiamondVertex));
        let r = trace_calibrated_ray(&d, &u, &Event::new(-0.5, 0.0)).unwrap();
        assert!(r.unique && r.calibration_residuals[0] <= 3.0 * g.dx(), "{:?}", r.calibration_residuals);
        assert!(r.rays[0].samples.iter().all(|s| s.event.x.abs() < 1e-6));
    }
}

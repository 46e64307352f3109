use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gradient::{gradient_probe, limiting_gradients};
use super::has_margin;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::{raise_unchecked, Covector, Event, Spacetime, TangentVec};

const DISC_CELLS: [f64; 3] = [8.0, 4.0, 2.0];
const DISC_ANGLES: usize = 16;
const HULL_STEPS: usize = 8;

/// Outcome at one probe point. `sub_ok` is the subsolution inequality
/// `g(V,V) ≤ −1` over the superdifferential `∇⁺u`; `super_ok` is the
/// supersolution inequality `g(V,V) ≥ −1` over the subdifferential `∇⁻u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViscosityProbe {
    pub event: Event,
    pub sub_ok: bool,
    pub super_ok: bool,
    /// `∇⁺u` came out empty.
    pub vacuous_super: bool,
    /// `∇⁻u` came out empty.
    pub vacuous_sub: bool,
    pub supergradients: Vec<TangentVec>,
    pub subgradients: Vec<TangentVec>,
    pub tolerance: f64,
}

impl ViscosityProbe {
    pub fn passes(&self) -> bool {
        self.sub_ok && self.super_ok
    }
}

/// Estimates `∇⁺u` and `∇⁻u` at each probe and tests the viscosity
/// inequalities on the accepted gradients.
///
/// Candidate slopes are the gradient at differentiable points and samples
/// of the convex hull of the limiting gradients elsewhere. A slope `p` is a
/// supergradient when `u(e + d) − u(e) − p(d) ≤ ε|d|_h` on every ring of the
/// disc of radius `R`, for two consecutive radii `R` in 8, 4, 2 cells (and
/// symmetrically for subgradients), with `ε = 10 Δx max(L, 1)`.
pub fn viscosity_check(st: &Spacetime, u: &ScalarField, probes: &[Event]) -> Result<Vec<ViscosityProbe>> {
    probes.par_iter().map(|e| check_one(st, u, e)).collect()
}

fn check_one(st: &Spacetime, u: &ScalarField, e: &Event) -> Result<ViscosityProbe> {
    let Some(u0) = u.interpolate(e).filter(|_| st.contains(e)) else {
        return Err(Error::OutsideDomain(*e));
    };
    if !has_margin(st, u, e, DISC_CELLS[0]) {
        return Err(Error::InsufficientMargin { event: *e, margin: DISC_CELLS[0] * u.grid.dx() });
    }
    let gp = gradient_probe(st, u, e)?;
    let candidates: Vec<Covector> =
        if gp.differentiable { vec![gp.du] } else { hull_samples(&limiting_gradients(st, u, e)?.covectors(st)) };
    let lip = candidates.iter().map(|p| p.pt.hypot(p.px)).fold(0.0, f64::max).max(1e-12);
    let dx = u.grid.dx();
    let tol_fit = 1e-9 + 1e-3 * dx * lip;
    let tol_g = 10.0 * dx * lip.max(1.0);

    // disc samples on rings of 1..=8 cells
    let (ht, hx) = (u.grid.dt(), u.grid.dx());
    let mut disc: Vec<(f64, f64, f64, f64)> = Vec::new(); // (ring cells, dt, dx, value)
    for ring in 1..=DISC_CELLS[0] as usize {
        for a in 0..DISC_ANGLES {
            let phi = std::f64::consts::TAU * (a as f64 + 0.5 * (ring % 2) as f64) / DISC_ANGLES as f64;
            let (dt, dxx) = (ring as f64 * ht * phi.cos(), ring as f64 * hx * phi.sin());
            if let Some(v) = u.interpolate(&e.offset(dt, dxx)) {
                disc.push((ring as f64, dt, dxx, v));
            }
        }
    }
    // largest one-sided slope defect of `p` from above (sign 1) or below
    // (sign -1) on the disc of radius r cells
    let defect = |p: &Covector, sign: f64, r: f64| -> f64 {
        disc.iter()
            .filter(|d| d.0 <= r + 1e-9)
            .map(|&(_, dt, dxx, v)| {
                let lin = u0 + p.pt * dt + p.px * dxx;
                (sign * (v - lin) - tol_fit) / st.riemann(e, dt, dxx, dt, dxx).sqrt()
            })
            .fold(0.0, f64::max)
    };
    let accepted = |p: &Covector, sign: f64| -> bool {
        let ok: Vec<bool> = DISC_CELLS.iter().map(|&r| defect(p, sign, r) <= tol_g).collect();
        ok.windows(2).any(|w| w[0] && w[1])
    };
    let supergradients: Vec<TangentVec> =
        candidates.iter().filter(|p| accepted(p, 1.0)).map(|p| raise_unchecked(st, p)).collect();
    let subgradients: Vec<TangentVec> =
        candidates.iter().filter(|p| accepted(p, -1.0)).map(|p| raise_unchecked(st, p)).collect();
    let sub_ok = supergradients.iter().all(|v| st.norm2(v) <= -1.0 + tol_g);
    let super_ok = subgradients.iter().all(|v| st.norm2(v) >= -1.0 - tol_g);
    Ok(ViscosityProbe {
        event: *e,
        sub_ok,
        super_ok,
        vacuous_super: supergradients.is_empty(),
        vacuous_sub: subgradients.is_empty(),
        supergradients,
        subgradients,
        tolerance: tol_g,
    })
}

/// Vertices, points on every edge between vertices, and the centroid with
/// its segments to the vertices.
fn hull_samples(c: &[Covector]) -> Vec<Covector> {
    let mut out = c.to_vec();
    let mix = |a: &Covector, b: &Covector, w: f64| {
        Covector::new(a.base, (1.0 - w) * a.pt + w * b.pt, (1.0 - w) * a.px + w * b.px)
    };
    for (k, a) in c.iter().enumerate() {
        for b in &c[k + 1..] {
            for s in 1..HULL_STEPS {
                out.push(mix(a, b, s as f64 / HULL_STEPS as f64));
            }
        }
    }
    if c.len() >= 3 {
        let n = c.len() as f64;
        let g =
            Covector::new(c[0].base, c.iter().map(|p| p.pt).sum::<f64>() / n, c.iter().map(|p| p.px).sum::<f64>() / n);
        out.push(g);
        for a in c {
            out.push(mix(&g, a, 0.5));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Slab;
    use crate::grid::Grid;
    use crate::solutions::{analytic_solution, AnalyticField, AnalyticKind};

    fn field(kind: AnalyticKind, scale: f64) -> (Spacetime, ScalarField) {
        let st = Spacetime::minkowski2(Slab::new(-1.0, 1.0, -1.0, 1.0));
        let g = Grid::with_resolution(st.slab, 128).unwrap();
        let u = analytic_solution(&st, &g, &AnalyticField::scaled(kind, scale));
        (st, u)
    }

    #[test]
    fn wedge_origin_is_vacuous() {
        let (st, u) = field(AnalyticKind::Wedge, 1.0);
        let r = &viscosity_check(&st, &u, &[Event::new(0.0, 0.0)]).unwrap()[0];
        assert!(r.vacuous_super && r.vacuous_sub && r.passes(), "{r:?}");
    }

    #[test]
    fn kinks() {
        let (st, u) = field(AnalyticKind::AbsTime, 1.0);
        let r = &viscosity_check(&st, &u, &[Event::new(0.0, 0.3)]).unwrap()[0];
        assert!(r.passes() && r.vacuous_super && !r.vacuous_sub, "{r:?}");
        let (st, u) = field(AnalyticKind::AbsTime, -1.0);
        let r = &viscosity_check(&st, &u, &[Event::new(0.0, 0.3)]).unwrap()[0];
        assert!(!r.sub_ok, "{r:?}");
        let (st, u) = field(AnalyticKind::Wedge, 1.0);
        let r = viscosity_check(&st, &u, &[Event::new(0.3, 0.0), Event::new(0.0, 0.3), Event::new(0.4, 0.2)]).unwrap();
        assert!(r.iter().all(|p| p.passes()), "{r:?}");
    }

    #[test]
    fn margins() {
        let (st, u) = field(AnalyticKind::CoordinateTime, 1.0);
        assert!(matches!(viscosity_check(&st, &u, &[Event::new(0.97, 0.0)]), Err(Error::InsufficientMargin { .. })));
    }
}

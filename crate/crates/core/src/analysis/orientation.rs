use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gradient::gradient_map;
use crate::field::ScalarField;
use crate::geometry::{Event, Spacetime, TangentVec};
use crate::grid::Grid;

/// Cells around a node whose gradients decide its label.
pub(crate) const LABEL_RADIUS: usize = 3;
/// Gradients with `|g(V,V)| ≤ NULL_BAND · h(V,V)` count as near-lightlike.
pub(crate) const NULL_BAND: f64 = 0.1;
const TRACES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeLabel {
    PastDirected,
    FutureDirected,
    Changing,
    NullLimit,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConsistentPast,
    ConsistentFuture,
    NonConsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabelCounts {
    pub past: usize,
    pub future: usize,
    pub changing: usize,
    pub null_limit: usize,
    pub undetermined: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub traces: usize,
    pub all_increasing: bool,
    pub all_decreasing: bool,
    /// Increasing traces exactly for a past verdict, decreasing exactly for a
    /// future one.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationReport {
    pub grid: Grid,
    pub labels: Vec<NodeLabel>,
    pub counts: LabelCounts,
    pub verdict: Verdict,
    pub traces: TraceSummary,
}

/// Per-node orientation from the gradients at differentiable nodes within
/// [`LABEL_RADIUS`] cells.
pub fn node_labels(st: &Spacetime, u: &ScalarField) -> Vec<NodeLabel> {
    let g = u.grid;
    let grads = gradient_map(st, u);
    // 0 = not differentiable, 1 past, 2 future, 3 near-null, 4 spacelike
    let kind: Vec<u8> = grads
        .iter()
        .map(|s| match s {
            Some(s) if s.differentiable => classify(st, &s.grad),
            _ => 0,
        })
        .collect();
    let r = LABEL_RADIUS as isize;
    (0..g.len())
        .into_par_iter()
        .map(|k| {
            let (j, i) = g.split(k);
            if u.get(j, i).is_none() {
                return NodeLabel::Undetermined;
            }
            let (mut past, mut future, mut null) = (false, false, false);
            for dj in -r..=r {
                for di in -r..=r {
                    let (jj, ii) = (j as isize + dj, i as isize + di);
                    if jj < 0 || ii < 0 || jj >= g.nt as isize || ii >= g.nx as isize {
                        continue;
                    }
                    match kind[g.index(jj as usize, ii as usize)] {
                        1 => past = true,
                        2 => future = true,
                        3 => null = true,
                        _ => {}
                    }
                }
            }
            if past && future {
                NodeLabel::Changing
            } else if null {
                NodeLabel::NullLimit
            } else if past {
                NodeLabel::PastDirected
            } else if future {
                NodeLabel::FutureDirected
            } else {
                NodeLabel::Undetermined
            }
        })
        .collect()
}

fn classify(st: &Spacetime, v: &TangentVec) -> u8 {
    let n = st.norm2(v);
    let h = st.riemann(&v.base, v.vt, v.vx, v.vt, v.vx);
    if n.abs() <= NULL_BAND * h {
        3
    } else if n > 0.0 {
        4
    } else if v.vt < 0.0 {
        1
    } else {
        2
    }
}

pub(crate) fn count_labels(labels: &[NodeLabel]) -> LabelCounts {
    let mut c = LabelCounts::default();
    for l in labels {
        match l {
            NodeLabel::PastDirected => c.past += 1,
            NodeLabel::FutureDirected => c.future += 1,
            NodeLabel::Changing => c.changing += 1,
            NodeLabel::NullLimit => c.null_limit += 1,
            NodeLabel::Undetermined => c.undetermined += 1,
        }
    }
    c
}

/// Node labels, the global verdict, and a monotonicity check of `u` along
/// 50 random future-directed timelike polylines.
pub fn orientation_report(st: &Spacetime, u: &ScalarField, seed: u64) -> OrientationReport {
    let labels = node_labels(st, u);
    let counts = count_labels(&labels);
    let verdict = if counts.changing > 0 {
        Verdict::NonConsistent
    } else if counts.past > 0 && counts.future == 0 {
        Verdict::ConsistentPast
    } else if counts.future > 0 && counts.past == 0 {
        Verdict::ConsistentFuture
    } else {
        Verdict::NonConsistent
    };
    let (mut inc, mut dec) = (true, true);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut traces = 0;
    for _ in 0..TRACES {
        let Some(vals) = random_trace(st, u, &mut rng) else { continue };
        traces += 1;
        inc &= vals.windows(2).all(|w| w[1] > w[0]);
        dec &= vals.windows(2).all(|w| w[1] < w[0]);
    }
    let consistent = (verdict == Verdict::ConsistentPast) == inc && (verdict == Verdict::ConsistentFuture) == dec;
    OrientationReport {
        grid: u.grid,
        labels,
        counts,
        verdict,
        traces: TraceSummary { traces, all_increasing: inc, all_decreasing: dec, consistent },
    }
}

/// Values of `u` along a random future-directed timelike polyline.
fn random_trace(st: &Spacetime, u: &ScalarField, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let g = u.grid;
    let span = g.t_max - g.t_min;
    let step = span / 64.0;
    for _ in 0..1000 {
        let mut p = Event::new(rng.gen_range(g.t_min..g.t_max - 0.25 * span), rng.gen_range(g.x_min..g.x_max));
        if !st.contains(&p) || u.interpolate(&p).is_none() {
            continue;
        }
        let mut vals = vec![u.interpolate(&p)?];
        for _ in 0..48 {
            let v = st.cone_slope(&p) * rng.gen_range(-0.8..0.8);
            let q = p.offset(step, v * step);
            let seg: Option<Vec<f64>> = (1..=4)
                .map(|k| {
                    let w = k as f64 / 4.0;
                    let e = p.offset(w * step, w * v * step);
                    if st.contains(&e) {
                        u.interpolate(&e)
                    } else {
                        None
                    }
                })
                .collect();
            match seg {
                Some(s) => vals.extend(s),
                None => break,
            }
            p = q;
        }
        if vals.len() >= 5 {
            return Some(vals);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Slab;
    use crate::solutions::{analytic_solution, AnalyticField, AnalyticKind};

    fn report(kind: AnalyticKind, scale: f64) -> OrientationReport {
        let st = Spacetime::minkowski2(Slab::new(-1.0, 1.0, -1.0, 1.0));
        let g = Grid::with_resolution(st.slab, 64).unwrap();
        orientation_report(&st, &analytic_solution(&st, &g, &AnalyticField::scaled(kind, scale)), 7)
    }

    #[test]
    fn verdicts() {
        let r = report(AnalyticKind::CoordinateTime, 1.0);
        assert_eq!(r.verdict, Verdict::ConsistentPast);
        assert!(r.traces.all_increasing && r.traces.consistent && r.traces.traces == 50);
        let r = report(AnalyticKind::Boost { theta: 0.7 }, 1.0);
        assert_eq!(r.verdict, Verdict::ConsistentPast);
        let r = report(AnalyticKind::CoordinateTime, -1.0);
        assert_eq!(r.verdict, Verdict::ConsistentFuture);
        assert!(r.traces.all_decreasing && r.traces.consistent);
        let r = report(AnalyticKind::AbsTime, 1.0);
        assert_eq!(r.verdict, Verdict::NonConsistent);
        assert!(!r.traces.all_increasing && !r.traces.all_decreasing && r.traces.consistent);
        // the changing band is the node row t = 0 and its neighbours
        for (k, l) in r.labels.iter().enumerate() {
            let (j, _) = r.grid.split(k);
            assert_eq!(*l == NodeLabel::Changing, r.grid.t(j).abs() <= r.grid.dt() + 1e-12);
        }
    }
}

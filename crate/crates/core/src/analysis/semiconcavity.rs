use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::{Event, Slab, Spacetime, TangentVec};

/// Semiconcavity constants tried at every scale.
pub const SEMICONCAVITY_CONSTANTS: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];
const CHORDS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chord {
    pub a: Event,
    pub b: Event,
    pub lambda: f64,
    /// Interpolated value minus `u` at the interior point.
    pub deficit: f64,
    /// Smallest constant for which this chord satisfies the inequality.
    pub c_needed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleResult {
    pub scale: f64,
    /// Smallest constant from [`SEMICONCAVITY_CONSTANTS`] that works for all
    /// chords, if any.
    pub constant: Option<f64>,
    pub c_needed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiconcavityReport {
    pub region: Slab,
    pub scales: Vec<ScaleResult>,
    /// Chord with the largest required constant over all scales.
    pub witness: Option<Chord>,
}

impl SemiconcavityReport {
    pub fn passes_at(&self, scale: f64) -> Option<bool> {
        self.scales.iter().find(|s| s.scale == scale).map(|s| s.constant.is_some())
    }

    pub fn passes_everywhere(&self) -> bool {
        self.scales.iter().all(|s| s.constant.is_some())
    }
}

/// Tests `u(γ(λ)) ≥ (1−λ)u(a) + λu(b) − (c/2)λ(1−λ)|b − a|²_h` on random
/// straight chords centred in `region`, with lengths log-uniform between
/// `Δx/16` and the scale.
pub fn semiconcavity_probe(
    st: &Spacetime,
    u: &ScalarField,
    region: &Slab,
    scales: &[f64],
    seed: u64,
) -> Result<SemiconcavityReport> {
    if !region.is_valid() {
        return Err(Error::InvalidParameter("empty region".into()));
    }
    let corners = [
        Event::new(region.t_min, region.x_min),
        Event::new(region.t_min, region.x_max),
        Event::new(region.t_max, region.x_min),
        Event::new(region.t_max, region.x_max),
    ];
    if corners.iter().any(|c| !st.contains(c) || u.interpolate(c).is_none()) {
        return Err(Error::RegionOutsideField);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lmin = u.grid.dx() / 16.0;
    let mut out = Vec::with_capacity(scales.len());
    let mut witness: Option<Chord> = None;
    for &delta in scales {
        if !(delta > lmin) {
            return Err(Error::InvalidParameter(format!("scale {delta} below the chord floor {lmin}")));
        }
        let mut worst: f64 = 0.0;
        for _ in 0..CHORDS {
            let m = Event::new(rng.gen_range(region.t_min..=region.t_max), rng.gen_range(region.x_min..=region.x_max));
            let len = (rng.gen_range(lmin.ln()..=delta.ln())).exp();
            let phi = rng.gen_range(0.0..std::f64::consts::PI);
            let lambda = rng.gen_range(0.25..=0.75);
            let (ct, cx) = (0.5 * len * phi.cos(), 0.5 * len * phi.sin());
            let a = m.offset(-ct, -cx);
            let b = m.offset(ct, cx);
            let p = Event::new(a.t + lambda * (b.t - a.t), a.x + lambda * (b.x - a.x));
            let (Some(ua), Some(ub), Some(up)) = (u.interpolate(&a), u.interpolate(&b), u.interpolate(&p)) else {
                return Err(Error::RegionOutsideField);
            };
            let deficit = (1.0 - lambda) * ua + lambda * ub - up;
            let h2 = st.h_norm(&TangentVec::new(m, b.t - a.t, b.x - a.x)).powi(2);
            let slack = 1e-12 * (1.0 + up.abs());
            let c_needed = (2.0 * (deficit - slack) / (lambda * (1.0 - lambda) * h2)).max(0.0);
            worst = worst.max(c_needed);
            if witness.is_none_or(|w| c_needed > w.c_needed) {
                witness = Some(Chord { a, b, lambda, deficit, c_needed });
            }
        }
        let constant = SEMICONCAVITY_CONSTANTS.iter().copied().find(|&c| c >= worst);
        out.push(ScaleResult { scale: delta, constant, c_needed: worst });
    }
    Ok(SemiconcavityReport { region: *region, scales: out, witness })
}

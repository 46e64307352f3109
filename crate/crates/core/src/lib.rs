//! Global viscosity solutions of the Lorentzian eikonal equation
//! `g(∇u, ∇u) = -1` on globally hyperbolic 1+1 spacetimes.

// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod distance;
pub mod error;
pub mod export;
pub mod field;
pub mod geodesics;
pub mod geometry;
pub mod grid;
pub mod solutions;

pub use error::{Error, Result};
pub use field::{Provenance, ScalarField};
pub use geometry::{
    CausalClass, CausalKind, CausalRelation, Covector, Event, MetricKind, Slab, Spacetime, TangentVec,
    TemporalFunction, TimeOrientation,
};
pub use grid::Grid;

use thiserror::Error;

use crate::geometry::Event;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("event ({}, {}) lies outside the spacetime domain", .0.t, .0.x)]
    OutsideDomain(Event),

    #[error("tangent vectors are based at different events")]
    BaseMismatch,

    #[error("sample vector ({vt}, {vx}) is not timelike")]
    NotTimelike { vt: f64, vx: f64 },

    #[error("initial vector is not unit timelike: g(V,V) = {norm}")]
    NotUnitTimelike { norm: f64 },

    #[error("event ({}, {}) is closer than {margin} to the domain boundary", .event.t, .event.x)]
    InsufficientMargin { event: Event, margin: f64 },

    #[error("spacelike segment in a Lorentzian length computation (segment {index})")]
    SpacelikeSegment { index: usize },

    #[error("curve parameters must be strictly increasing")]
    NonMonotoneCurve,

    #[error("events are not chronologically related")]
    NotChronological,

    #[error("shooting did not converge after {iterations} iterations (miss {miss})")]
    ShootingFailed { iterations: usize, miss: f64 },

    #[error("grid violates the cone condition: dt * sup(beta/a) = {lhs} > dx * cone_factor = {rhs}")]
    ConeCondition { lhs: f64, rhs: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grids do not match")]
    GridMismatch,

    #[error("target set is empty or does not meet the grid")]
    EmptyTarget,

    #[error("level set {0} does not meet the slab")]
    LevelSetMissing(f64),

    #[error("node set is not achronal")]
    NotAchronal,

    #[error("unknown catalog key `{0}`")]
    UnknownKey(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("proper time {t} exceeds the slab bound {bound}")]
    ProperTimeTooLarge { t: f64, bound: f64 },

    #[error("no differentiable neighbours around ({}, {})", .0.t, .0.x)]
    DegenerateField(Event),

    #[error("no timelike limiting gradient at ({}, {})", .0.t, .0.x)]
    NoTimelikeRepresentative(Event),

    #[error("level set u = {0} is empty")]
    EmptyLevelSet(f64),

    #[error("region leaves the domain of the field")]
    RegionOutsideField,

    #[error("malformed field data: {0}")]
    Parse(String),
}

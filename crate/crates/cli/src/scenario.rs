//! Scenario file schema.

use std::collections::HashSet;

use eikonal_core::analysis::Verdict;
use eikonal_core::distance::Direction;
use eikonal_core::geometry::AuxMetric;
use eikonal_core::solutions::{Extremum, LimitDirection};
use eikonal_core::{Slab, TemporalFunction};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub spacetime: SpacetimeSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub temporal: Option<TemporalFunction>,
    #[serde(default)]
    pub anchor: Option<[f64; 2]>,
    #[serde(default)]
    pub s_list: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub fields: Vec<FieldSpec>,
    #[serde(default)]
    pub analyses: Vec<Analysis>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacetimeSpec {
    pub key: String,
    /// `[t_min, t_max, x_min, x_max]`
    #[serde(default)]
    pub slab: Option<[f64; 4]>,
    #[serde(default)]
    pub aux: AuxMetric,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Defaults to the spacetime slab.
    #[serde(default)]
    pub slab: Option<[f64; 4]>,
    #[serde(default)]
    pub cells_per_unit: Option<usize>,
    #[serde(default)]
    pub nt: Option<usize>,
    #[serde(default)]
    pub nx: Option<usize>,
    #[serde(default = "one")]
    pub cone_factor: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub name: String,
    pub source: Source,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    Catalog {
        key: String,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Path relative to the scenario file.
    Csv {
        path: String,
    },
    Compose {
        op: Extremum,
        of: [String; 2],
    },
    Limit {
        direction: LimitDirection,
        #[serde(default)]
        probe: Option<[f64; 4]>,
        #[serde(default = "yes")]
        require_convergence: bool,
    },
}

fn yes() -> bool {
    true
}

fn default_refinements() -> usize {
    2
}

fn default_samples() -> usize {
    1000
}

fn default_fixed_point_cells() -> f64 {
    3.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Analysis {
    Residual {
        field: String,
        #[serde(default)]
        window: Option<[f64; 4]>,
        #[serde(default)]
        max: Option<f64>,
    },
    Compare {
        field: String,
        reference: String,
        #[serde(default)]
        window: Option<[f64; 4]>,
        max: f64,
    },
    Viscosity {
        field: String,
        #[serde(default)]
        probes: Vec<[f64; 2]>,
        #[serde(default)]
        random: usize,
        #[serde(default = "yes")]
        expect_pass: bool,
        #[serde(default)]
        expect_vacuous: Vec<[f64; 2]>,
    },
    Orientation {
        field: String,
        #[serde(default)]
        expect: Option<Verdict>,
    },
    LevelSets {
        field: String,
        values: Vec<f64>,
        #[serde(default)]
        expect_cauchy: Option<Vec<bool>>,
    },
    ChangingSet {
        field: String,
        #[serde(default = "default_refinements")]
        refinements: usize,
        #[serde(default)]
        expect_empty: Option<bool>,
    },
    Semiconcavity {
        field: String,
        region: [f64; 4],
        scales: Vec<f64>,
        #[serde(default)]
        expect_pass: Option<bool>,
    },
    Rays {
        field: String,
        starts: Vec<[f64; 2]>,
    },
    Temporal {
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default)]
        expect_steep: Option<bool>,
    },
    Distance {
        name: String,
        target: TargetSpec,
        direction: Direction,
    },
    LaxOleinik {
        field: String,
        t: f64,
        #[serde(default = "default_fixed_point_cells")]
        max_cells: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    Point { event: [f64; 2] },
    Level { s: f64 },
}

impl Analysis {
    pub fn field(&self) -> Option<&str> {
        match self {
            Analysis::Residual { field, .. }
            | Analysis::Compare { field, .. }
            | Analysis::Viscosity { field, .. }
            | Analysis::Orientation { field, .. }
            | Analysis::LevelSets { field, .. }
            | Analysis::ChangingSet { field, .. }
            | Analysis::Semiconcavity { field, .. }
            | Analysis::Rays { field, .. }
            | Analysis::LaxOleinik { field, .. } => Some(field),
            Analysis::Temporal { .. } | Analysis::Distance { .. } => None,
        }
    }
}

pub fn slab(v: &[f64; 4]) -> Slab {
    Slab::new(v[0], v[1], v[2], v[3])
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl Scenario {
    /// Cross-reference checks serde cannot express; errors name the
    /// offending key.
    pub fn validate(&self) -> Result<(), String> {
        for (key, s) in [("spacetime.slab", &self.spacetime.slab), ("grid.slab", &self.grid.slab)] {
            if let Some(s) = s {
                if !slab(s).is_valid() {
                    return Err(format!("`{key}`: empty slab"));
                }
            }
        }
        match (self.grid.cells_per_unit, self.grid.nt, self.grid.nx) {
            (Some(n), None, None) if n > 0 => {}
            (None, Some(nt), Some(nx)) if nt >= 2 && nx >= 2 => {}
            _ => return Err("`grid`: give either `cells_per_unit` (> 0) or both `nt` and `nx` (>= 2)".into()),
        }
        let mut names = HashSet::new();
        let mut limits = 0;
        for (k, f) in self.fields.iter().enumerate() {
            if !valid_name(&f.name) {
                return Err(format!("`fields[{k}].name`: `{}` is not a plain identifier", f.name));
            }
            match &f.source {
                Source::Compose { of, .. } => {
                    for r in of {
                        if !names.contains(r.as_str()) {
                            return Err(format!("`fields[{k}].source.of`: no earlier field named `{r}`"));
                        }
                    }
                }
                Source::Limit { .. } => {
                    limits += 1;
                    if self.temporal.is_none() {
                        return Err(format!("`fields[{k}]`: limit fields need `temporal`"));
                    }
                    if self.anchor.is_none() {
                        return Err(format!("`fields[{k}]`: limit fields need `anchor`"));
                    }
                    if self.s_list.is_empty() {
                        return Err(format!("`fields[{k}]`: limit fields need a non-empty `s_list`"));
                    }
                }
                Source::Catalog { .. } | Source::Csv { .. } => {}
            }
            if !names.insert(f.name.as_str()) {
                return Err(format!("`fields[{k}].name`: duplicate field `{}`", f.name));
            }
        }
        if limits > 1 {
            return Err("`fields`: at most one limit field per scenario".into());
        }
        for (k, a) in self.analyses.iter().enumerate() {
            if let Some(f) = a.field() {
                if !names.contains(f) {
                    return Err(format!("`analyses[{k}].field`: no field named `{f}`"));
                }
            }
            match a {
                Analysis::Temporal { .. } if self.temporal.is_none() => {
                    return Err(format!("`analyses[{k}]`: temporal checks need `temporal`"));
                }
                Analysis::Distance { name, target, .. } => {
                    if !valid_name(name) {
                        return Err(format!("`analyses[{k}].name`: `{name}` is not a plain identifier"));
                    }
                    if matches!(target, TargetSpec::Level { .. }) && self.temporal.is_none() {
                        return Err(format!("`analyses[{k}].target`: level targets need `temporal`"));
                    }
                }
                Analysis::LevelSets { values, expect_cauchy: Some(e), .. } if e.len() != values.len() => {
                    return Err(format!("`analyses[{k}].expect_cauchy`: expected {} entries", values.len()));
                }
                Analysis::Semiconcavity { region, .. } if !slab(region).is_valid() => {
                    return Err(format!("`analyses[{k}].region`: empty slab"));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

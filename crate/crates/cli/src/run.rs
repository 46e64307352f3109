//! Executes a validated scenario and writes its outputs.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use eikonal_core::analysis::{
    changing_set_report, eikonal_residual, level_set_report, orientation_report, semiconcavity_probe,
    trace_calibrated_ray, viscosity_check,
};
use eikonal_core::distance::{distance_to_set, Target};
use eikonal_core::export::{field_from_csv, field_to_csv, orientation_json, to_json};
use eikonal_core::geometry::{validate_temporal, EPS_NULL, STEEP_TOL};
use eikonal_core::solutions::{
    analytic_solution, build_limit_solution_with, compose_extremum, lax_oleinik_apply, AnalyticField, FieldExpr,
    LimitOptions, LIPSCHITZ_DRIFT,
};
use eikonal_core::{Event, Grid, ScalarField, Spacetime, TangentVec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::scenario::{slab, Analysis, Scenario, Source, TargetSpec};

/// Random viscosity probes stay this many cells inside the grid.
const PROBE_MARGIN_CELLS: f64 = 10.0;

pub struct Options {
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub refine: u32,
    pub strict: bool,
}

#[derive(Debug)]
pub enum Failure {
    /// Bad scenario, bad input data or an analysis that cannot run.
    Config(String),
    /// Every step ran but some assertions failed.
    Assertions(Vec<String>),
}

#[derive(Debug, Clone, Serialize)]
struct Assertion {
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    scenario: &'a str,
    seed: u64,
    refine: u32,
    strict: bool,
    grid: Grid,
    tolerances: &'a BTreeMap<String, f64>,
    outputs: &'a [String],
    assertions: &'a [Assertion],
    warnings: &'a [String],
    passed: bool,
}

struct Named {
    field: ScalarField,
    expr: FieldExpr,
}

struct Run<'a> {
    sc: &'a Scenario,
    dir: &'a Path,
    out: PathBuf,
    st: Spacetime,
    grid: Grid,
    seed: u64,
    fields: HashMap<String, Named>,
    outputs: Vec<String>,
    assertions: Vec<Assertion>,
    warnings: Vec<String>,
    tolerances: BTreeMap<String, f64>,
    timings: Vec<(String, f64)>,
}

fn config<E: std::fmt::Display>(ctx: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Config(format!("{ctx}: {e}"))
}

fn event(v: &[f64; 2]) -> Event {
    Event::new(v[0], v[1])
}

pub fn build_grid(sc: &Scenario, st: &Spacetime, refine: u32) -> Result<Grid, Failure> {
    let s = sc.grid.slab.as_ref().map_or(st.slab, slab);
    let g = match (sc.grid.cells_per_unit, sc.grid.nt, sc.grid.nx) {
        (Some(n), _, _) => Grid::with_resolution(s, n << refine),
        (_, Some(nt), Some(nx)) => Grid::new(s, nt, nx).map(|g| (0..refine).fold(g, |g, _| g.refined())),
        _ => unreachable!("validated"),
    }
    .map_err(config("`grid`"))?;
    g.check_cone(st, sc.grid.cone_factor).map_err(config("`grid`"))?;
    Ok(g)
}

pub fn run(sc: &Scenario, scenario_dir: &Path, opts: &Options) -> Result<(), Failure> {
    let st = Spacetime::from_key(&sc.spacetime.key, sc.spacetime.slab.as_ref().map(slab))
        .map_err(config("`spacetime.key`"))?
        .with_aux(sc.spacetime.aux);
    let grid = build_grid(sc, &st, opts.refine)?;
    fs::create_dir_all(&opts.out).map_err(config(&format!("creating {}", opts.out.display())))?;
    let mut run = Run {
        sc,
        dir: scenario_dir,
        out: opts.out.clone(),
        st,
        grid,
        seed: opts.seed.unwrap_or(sc.seed),
        fields: HashMap::new(),
        outputs: Vec::new(),
        assertions: Vec::new(),
        warnings: Vec::new(),
        tolerances: BTreeMap::new(),
        timings: Vec::new(),
    };
    run.tolerances.insert("cone_factor".into(), sc.grid.cone_factor);
    run.tolerances.insert("eps_null".into(), EPS_NULL);
    run.tolerances.insert("steep_tol".into(), STEEP_TOL);
    run.tolerances.insert("lipschitz_drift".into(), LIPSCHITZ_DRIFT);
    for f in &sc.fields {
        let t0 = Instant::now();
        run.build_field(&f.name, &f.source)?;
        run.timings.push((format!("field {}", f.name), t0.elapsed().as_secs_f64()));
    }
    for (k, a) in sc.analyses.iter().enumerate() {
        let t0 = Instant::now();
        run.analyse(k, a)?;
        run.timings.push((format!("analysis {k}"), t0.elapsed().as_secs_f64()));
    }
    run.finish(opts)
}

impl Run<'_> {
    fn write(&mut self, name: &str, text: &str) -> Result<(), Failure> {
        let path = self.out.join(name);
        fs::write(&path, text).map_err(config(&format!("writing {}", path.display())))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, kind: &str, data: &T) -> Result<(), Failure> {
        let text = to_json(kind, data).map_err(config(name))?;
        self.write(name, &text)
    }

    fn check(&mut self, name: String, pass: bool, detail: String) {
        self.assertions.push(Assertion { name, pass, detail });
    }

    fn field(&self, name: &str) -> &Named {
        &self.fields[name]
    }

    fn build_field(&mut self, name: &str, source: &Source) -> Result<(), Failure> {
        let ctx = format!("field `{name}`");
        let (field, expr) = match source {
            Source::Catalog { key, scale } => {
                let mut f = AnalyticField::from_key(key).map_err(config(&ctx))?;
                f.scale *= scale;
                (analytic_solution(&self.st, &self.grid, &f), FieldExpr::Analytic(f))
            }
            Source::Csv { path } => {
                let p = self.dir.join(path);
                let text = fs::read_to_string(&p).map_err(config(&format!("{ctx}: reading {}", p.display())))?;
                let f = field_from_csv(&self.st, &text).map_err(config(&ctx))?;
                let on_grid = if f.grid.same_shape(&self.grid) { f.clone() } else { f.resample(&self.st, self.grid) };
                (on_grid, FieldExpr::Sampled(f))
            }
            Source::Compose { op, of } => {
                let (a, b) = (self.field(&of[0]), self.field(&of[1]));
                let c = compose_extremum(&self.st, *op, &a.field, &b.field).map_err(config(&ctx))?;
                let expr = FieldExpr::Compose(*op, Box::new(a.expr.clone()), Box::new(b.expr.clone()));
                (c.field, expr)
            }
            Source::Limit { direction, probe, require_convergence } => {
                let sc = self.sc;
                let opts = LimitOptions { probe: probe.as_ref().map(slab) };
                let (u, log) = build_limit_solution_with(
                    &self.st,
                    sc.temporal.as_ref().expect("validated"),
                    &event(sc.anchor.as_ref().expect("validated")),
                    &sc.s_list,
                    &self.grid,
                    *direction,
                    &opts,
                )
                .map_err(config(&ctx))?;
                self.tolerances.insert(format!("{name}.convergence"), log.tolerance);
                if *require_convergence {
                    let last = log.entries.last().and_then(|e| e.sup_diff).map_or("n/a".into(), |d| format!("{d:.3e}"));
                    self.check(format!("{name} converges"), log.converged, format!("last iterate difference {last}"));
                }
                if !log.equi_lipschitz {
                    self.warnings.push(format!(
                        "{name}: Lipschitz drift {:.3} exceeds {LIPSCHITZ_DRIFT}",
                        log.lipschitz_drift()
                    ));
                }
                self.write_json("convergence.json", "convergence", &log)?;
                let expr = FieldExpr::Sampled(u.clone());
                (u, expr)
            }
        };
        self.write(&format!("{name}.csv"), &field_to_csv(&field))?;
        self.fields.insert(name.to_string(), Named { field, expr });
        Ok(())
    }

    fn random_probes(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<Event> {
        let g = self.grid.slab();
        let m = PROBE_MARGIN_CELLS * self.grid.dx().max(self.grid.dt());
        let mut out = Vec::with_capacity(n);
        let mut tries = 0;
        while out.len() < n && tries < 100 * n && g.t_max - g.t_min > 2.0 * m && g.x_max - g.x_min > 2.0 * m {
            tries += 1;
            let e = Event::new(rng.gen_range(g.t_min + m..g.t_max - m), rng.gen_range(g.x_min + m..g.x_max - m));
            if self.st.contains(&e) {
                out.push(e);
            }
        }
        out
    }

    fn analyse(&mut self, k: usize, a: &Analysis) -> Result<(), Failure> {
        let ctx = format!("`analyses[{k}]`");
        let seed = self.seed.wrapping_add(k as u64);
        match a {
            Analysis::Residual { field, window, max } => {
                let w = window.as_ref().map(slab);
                let r = eikonal_residual(&self.st, &self.field(field).field, w.as_ref());
                let summary = serde_json::json!({
                    "field": field, "count": r.count, "sup_abs": r.sup_abs,
                    "mean_abs": r.mean_abs, "min": r.min, "max": r.max,
                });
                self.write_json(&format!("residual_{field}.json"), "residual", &summary)?;
                if let Some(m) = max {
                    self.tolerances.insert(format!("residual_{field}.max"), *m);
                    self.check(
                        format!("residual of {field}"),
                        r.count > 0 && r.sup_abs <= *m,
                        format!("sup {:.3e} over {} nodes", r.sup_abs, r.count),
                    );
                }
            }
            Analysis::Compare { field, reference, window, max } => {
                let f = AnalyticField::from_key(reference).map_err(config(&ctx))?;
                let oracle = analytic_solution(&self.st, &self.grid, &f);
                let w = window.as_ref().map(slab);
                let d = self.field(field).field.sup_diff(&oracle, w.as_ref()).map_err(config(&ctx))?;
                self.tolerances.insert(format!("compare_{field}.max"), *max);
                let summary = serde_json::json!({ "field": field, "reference": f.name(), "sup_diff": d });
                self.write_json(&format!("compare_{field}.json"), "comparison", &summary)?;
                self.check(format!("{field} matches {}", f.name()), d <= *max, format!("sup diff {d:.3e}"));
            }
            Analysis::Viscosity { field, probes, random, expect_pass, expect_vacuous } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut pts: Vec<Event> = probes.iter().chain(expect_vacuous).map(event).collect();
                pts.extend(self.random_probes(*random, &mut rng));
                if pts.len() < probes.len() + expect_vacuous.len() + random {
                    self.warnings.push(format!(
                        "{ctx}: only {} random probes fit inside the grid",
                        pts.len() - probes.len() - expect_vacuous.len()
                    ));
                }
                let report = viscosity_check(&self.st, &self.field(field).field, &pts).map_err(config(&ctx))?;
                if let Some(p) = report.first() {
                    self.tolerances.insert(format!("viscosity_{field}.gradient"), p.tolerance);
                }
                self.write_json(&format!("viscosity_{field}.json"), "viscosity", &report)?;
                let failures = report.iter().filter(|p| !p.passes()).count();
                self.check(
                    format!("{field} viscosity {}", if *expect_pass { "passes" } else { "fails" }),
                    (failures == 0) == *expect_pass,
                    format!("{failures} of {} probes fail", report.len()),
                );
                for (p, e) in report[probes.len()..].iter().zip(expect_vacuous) {
                    self.check(
                        format!("{field} vacuous at ({}, {})", e[0], e[1]),
                        p.vacuous_sub && p.vacuous_super,
                        format!("vacuous sub {} super {}", p.vacuous_sub, p.vacuous_super),
                    );
                }
            }
            Analysis::Orientation { field, expect } => {
                let r = orientation_report(&self.st, &self.field(field).field, seed);
                let text = orientation_json(&r).map_err(config(&ctx))?;
                self.write(&format!("orientation_{field}.json"), &text)?;
                if let Some(v) = expect {
                    self.check(format!("{field} orientation"), r.verdict == *v, format!("{:?}", r.verdict));
                }
            }
            Analysis::LevelSets { field, values, expect_cauchy } => {
                let mut reports = Vec::new();
                for (n, &s) in values.iter().enumerate() {
                    match level_set_report(&self.st, &self.field(field).field, s) {
                        Ok(r) => {
                            if let Some(e) = expect_cauchy {
                                self.check(
                                    format!("{field} level {s} cauchy {}", e[n]),
                                    r.is_cauchy == e[n],
                                    format!("cauchy {}", r.is_cauchy),
                                );
                            }
                            reports.push(serde_json::to_value(&r).map_err(config(&ctx))?);
                        }
                        Err(err) => {
                            self.warnings.push(format!("{ctx}: level {s}: {err}"));
                            if let Some(e) = expect_cauchy {
                                self.check(format!("{field} level {s} cauchy {}", e[n]), false, err.to_string());
                            }
                            reports.push(serde_json::json!({ "s": s, "error": err.to_string() }));
                        }
                    }
                }
                self.write_json(&format!("level_sets_{field}.json"), "level_sets", &reports)?;
            }
            Analysis::ChangingSet { field, refinements, expect_empty } => {
                let expr = self.field(field).expr.clone();
                let r = changing_set_report(&self.st, &expr, &self.grid, *refinements).map_err(config(&ctx))?;
                self.write_json(&format!("changing_set_{field}.json"), "changing_set", &r)?;
                if let Some(e) = expect_empty {
                    self.check(
                        format!("{field} changing set empty {e}"),
                        r.is_empty() == *e,
                        format!("{} flagged nodes", r.flagged_count),
                    );
                }
                if !r.is_empty() && !r.trend_decreasing() {
                    self.warnings.push(format!("{ctx}: flagged measure does not shrink under refinement"));
                }
            }
            Analysis::Semiconcavity { field, region, scales, expect_pass } => {
                let r = semiconcavity_probe(&self.st, &self.field(field).field, &slab(region), scales, seed)
                    .map_err(config(&ctx))?;
                self.write_json(&format!("semiconcavity_{field}.json"), "semiconcavity", &r)?;
                if let Some(e) = expect_pass {
                    self.check(
                        format!("{field} semiconcave {e}"),
                        r.passes_everywhere() == *e,
                        format!("passes {}", r.passes_everywhere()),
                    );
                }
            }
            Analysis::Rays { field, starts } => {
                let mut summaries = Vec::new();
                for (n, s) in starts.iter().enumerate() {
                    let r =
                        trace_calibrated_ray(&self.st, &self.field(field).field, &event(s)).map_err(config(&ctx))?;
                    let mut files = Vec::new();
                    for (m, ray) in r.rays.iter().enumerate() {
                        let name = format!("ray_{field}_{n}_{m}.csv");
                        self.write(&name, &ray.to_csv())?;
                        files.push(name);
                    }
                    summaries.push(serde_json::json!({
                        "event": r.event, "rays": files, "calibration_residuals": r.calibration_residuals,
                        "unique": r.unique, "differentiable_along": r.differentiable_along,
                        "max_alignment_error": r.max_alignment_error,
                    }));
                }
                self.write_json(&format!("rays_{field}.json"), "rays", &summaries)?;
            }
            Analysis::Temporal { samples, expect_steep } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let g = self.grid.slab();
                let mut vs = Vec::with_capacity(*samples);
                while vs.len() < *samples {
                    let base = Event::new(rng.gen_range(g.t_min..g.t_max), rng.gen_range(g.x_min..g.x_max));
                    if !self.st.contains(&base) {
                        continue;
                    }
                    let vt = rng.gen_range(0.1..2.0);
                    vs.push(TangentVec::new(base, vt, vt * self.st.cone_slope(&base) * rng.gen_range(-0.99..0.99)));
                }
                let tau = self.sc.temporal.as_ref().expect("validated");
                let r = validate_temporal(&self.st, tau, &vs).map_err(config(&ctx))?;
                self.write_json("temporal.json", "temporal", &r)?;
                if let Some(e) = expect_steep {
                    self.check(
                        format!("temporal function steep {e}"),
                        r.steep == *e && r.monotone,
                        format!("steep {} monotone {}", r.steep, r.monotone),
                    );
                }
            }
            Analysis::Distance { name, target, direction } => {
                let t = match target {
                    TargetSpec::Point { event: e } => Target::Point(event(e)),
                    TargetSpec::Level { s } => {
                        Target::Temporal { tau: *self.sc.temporal.as_ref().expect("validated"), s: *s }
                    }
                };
                let d = distance_to_set(&self.st, &self.grid, &t, *direction).map_err(config(&ctx))?;
                self.write(&format!("{name}.csv"), &d.to_csv())?;
            }
            Analysis::LaxOleinik { field, t, max_cells } => {
                let u = &self.field(field).field;
                let lo = lax_oleinik_apply(&self.st, u, *t).map_err(config(&ctx))?;
                let d = lo.interior_sup_diff(u).map_err(config(&ctx))?;
                let interior = lo.boundary.iter().filter(|b| !**b).count();
                let tol = max_cells * self.grid.dt();
                self.tolerances.insert(format!("lax_oleinik_{field}.max"), tol);
                let summary = serde_json::json!({ "field": field, "t": t, "steps": lo.steps, "interior_nodes": interior, "sup_diff": d });
                self.write_json(&format!("lax_oleinik_{field}.json"), "lax_oleinik", &summary)?;
                if interior == 0 {
                    self.warnings.push(format!("{ctx}: every node is boundary-influenced"));
                }
                self.check(
                    format!("{field} is a Lax-Oleinik fixed point"),
                    interior > 0 && d <= tol,
                    format!("sup diff {d:.3e} over {interior} nodes"),
                );
            }
        }
        Ok(())
    }

    fn finish(mut self, opts: &Options) -> Result<(), Failure> {
        let mut failed: Vec<String> =
            self.assertions.iter().filter(|a| !a.pass).map(|a| format!("{}: {}", a.name, a.detail)).collect();
        if opts.strict {
            failed.extend(self.warnings.iter().map(|w| format!("warning: {w}")));
        }
        self.outputs.push("manifest.json".into());
        let manifest = Manifest {
            tool: "eikonal",
            version: env!("CARGO_PKG_VERSION"),
            scenario: &self.sc.name,
            seed: self.seed,
            refine: opts.refine,
            strict: opts.strict,
            grid: self.grid,
            tolerances: &self.tolerances,
            outputs: &self.outputs,
            assertions: &self.assertions,
            warnings: &self.warnings,
            passed: failed.is_empty(),
        };
        let text = to_json("manifest", &manifest).map_err(config("manifest"))?;
        let timings: String = self.timings.iter().map(|(k, s)| format!("{k}\t{s:.3}\n")).collect();
        fs::write(self.out.join("manifest.json"), text).map_err(config("writing manifest"))?;
        fs::write(self.out.join("timings.log"), timings).map_err(config("writing timings"))?;
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Failure::Assertions(failed))
        }
    }
}

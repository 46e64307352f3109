//! CSV and JSON serialization of fields and reports.

use serde::{Deserialize, Serialize};

use crate::analysis::{NodeLabel, OrientationReport};
use crate::error::{Error, Result};
use crate::field::{Provenance, ScalarField};
use crate::geometry::{Slab, Spacetime};
use crate::grid::Grid;

pub const SCHEMA_VERSION: u32 = 1;

/// `t,x,value` rows with `undefined` at undefined nodes.
pub fn field_to_csv(u: &ScalarField) -> String {
    let g = &u.grid;
    let mut out = String::from("t,x,value\n");
    for k in 0..g.len() {
        let (j, i) = g.split(k);
        match u.get(j, i) {
            Some(v) => out.push_str(&format!("{},{},{}\n", g.t(j), g.x(i), v)),
            None => out.push_str(&format!("{},{},undefined\n", g.t(j), g.x(i))),
        }
    }
    out
}

/// Reads a `t,x,value` table covering a full tensor grid, in any row order.
/// Non-numeric values mark undefined nodes.
pub fn field_from_csv(st: &Spacetime, text: &str) -> Result<ScalarField> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["t", "x", "value"] {
        return Err(Error::Parse(format!(
            "expected header t,x,value, got {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let num = |k: usize| -> Result<f64> {
            rec[k].parse::<f64>().map_err(|_| Error::Parse(format!("row {}: bad coordinate `{}`", n + 2, &rec[k])))
        };
        rows.push((num(0)?, num(1)?, rec[2].parse::<f64>().unwrap_or(f64::NAN)));
    }
    let axis = |pick: fn(&(f64, f64, f64)) -> f64| {
        let mut v: Vec<f64> = rows.iter().map(pick).collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        v
    };
    let (ts, xs) = (axis(|r| r.0), axis(|r| r.1));
    if ts.len() < 2 || xs.len() < 2 || ts.len() * xs.len() != rows.len() {
        return Err(Error::Parse(format!("{} rows do not form a {}x{} grid", rows.len(), ts.len(), xs.len())));
    }
    let grid = Grid::new(Slab::new(ts[0], ts[ts.len() - 1], xs[0], xs[xs.len() - 1]), ts.len(), xs.len())?;
    let (dt, dx) = (grid.dt(), grid.dx());
    let uniform = |v: &[f64], h: f64| v.windows(2).all(|w| ((w[1] - w[0]) - h).abs() < 1e-6 * h);
    if !uniform(&ts, dt) || !uniform(&xs, dx) {
        return Err(Error::Parse("grid spacing is not uniform".into()));
    }
    let mut values = vec![f64::NAN; grid.len()];
    let mut seen = vec![false; grid.len()];
    for (t, x, v) in rows {
        let (fj, fi) = grid.locate(&crate::geometry::Event::new(t, x));
        let k = grid.index(fj.round() as usize, fi.round() as usize);
        if seen[k] {
            return Err(Error::Parse(format!("duplicate node ({t}, {x})")));
        }
        seen[k] = true;
        values[k] = v;
    }
    ScalarField::new(st, grid, values, Provenance::Ingested)
}

/// Versioned JSON envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub schema_version: u32,
    pub kind: String,
    pub data: T,
}

pub fn to_json<T: Serialize>(kind: &str, data: &T) -> Result<String> {
    let doc = Document { schema_version: SCHEMA_VERSION, kind: kind.to_string(), data };
    serde_json::to_string_pretty(&doc).map(|s| s + "\n").map_err(|e| Error::Parse(e.to_string()))
}

/// Run-length encoding in node order.
pub fn run_length(labels: &[NodeLabel]) -> Vec<(NodeLabel, usize)> {
    let mut out: Vec<(NodeLabel, usize)> = Vec::new();
    for &l in labels {
        match out.last_mut() {
            Some((m, n)) if *m == l => *n += 1,
            _ => out.push((l, 1)),
        }
    }
    out
}

pub fn run_length_decode(runs: &[(NodeLabel, usize)]) -> Vec<NodeLabel> {
    runs.iter().flat_map(|&(l, n)| std::iter::repeat_n(l, n)).collect()
}

/// Orientation report with labels run-length encoded in row-major order.
pub fn orientation_json(r: &OrientationReport) -> Result<String> {
    #[derive(Serialize)]
    struct Compact<'a> {
        grid: &'a Grid,
        counts: &'a crate::analysis::LabelCounts,
        verdict: crate::analysis::Verdict,
        traces: &'a crate::analysis::TraceSummary,
        labels: Vec<(NodeLabel, usize)>,
    }
    to_json(
        "orientation",
        &Compact {
            grid: &r.grid,
            counts: &r.counts,
            verdict: r.verdict,
            traces: &r.traces,
            labels: run_length(&r.labels),
        },
    )
}

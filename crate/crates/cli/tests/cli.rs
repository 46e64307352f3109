use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json"))
}

fn eikonal(scenario: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eikonal"))
        .arg("--scenario")
        .arg(scenario)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_scenario(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("scenario.json");
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn bundled_corpus_exit_codes() {
    let expected = [
        ("minkowski_uplus", 0),
        ("wedge_verify", 0),
        ("abs_time_extrema", 0),
        ("diamond_vertex", 0),
        ("cone_broken", 1),
        ("negative_control", 2),
    ];
    for (name, want) in expected {
        let out = TempDir::new().unwrap();
        let o = eikonal(&scenario(name), out.path(), &[]);
        assert_eq!(code(&o), want, "{name}: {}", stderr(&o));
        if want != 1 {
            let m = json(&out.path().join("manifest.json"));
            assert_eq!(m["data"]["passed"], Value::Bool(want == 0), "{name}");
            assert!(out.path().join("timings.log").exists());
        }
    }
}

#[test]
fn minkowski_uplus_outputs() {
    let out = TempDir::new().unwrap();
    let o = eikonal(&scenario("minkowski_uplus"), out.path(), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(out.path().join("u_plus.csv")).unwrap();
    assert!(csv.starts_with("t,x,value\n"));
    assert_eq!(csv.lines().count(), 1 + 65 * 65);
    let conv = json(&out.path().join("convergence.json"));
    assert_eq!(conv["schema_version"], 1);
    assert_eq!(conv["data"]["converged"], true);
    let m = json(&out.path().join("manifest.json"));
    let tol = m["data"]["tolerances"].as_object().unwrap();
    assert!(tol.contains_key("u_plus.convergence") && tol.contains_key("compare_u_plus.max"));
}

#[test]
fn wedge_origin_probe_is_vacuous() {
    let out = TempDir::new().unwrap();
    let o = eikonal(&scenario("wedge_verify"), out.path(), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let probes = json(&out.path().join("viscosity_wedge.json"));
    let origin = &probes["data"][0];
    assert_eq!(origin["event"]["t"], 0.0);
    assert_eq!(origin["event"]["x"], 0.0);
    assert_eq!(origin["vacuous_sub"], true);
    assert_eq!(origin["vacuous_super"], true);
}

fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "timings.log")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn runs_are_byte_identical() {
    for name in ["minkowski_uplus", "abs_time_extrema"] {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        assert_eq!(code(&eikonal(&scenario(name), a.path(), &["--seed", "99"])), 0);
        assert_eq!(code(&eikonal(&scenario(name), b.path(), &["--seed", "99"])), 0);
        let (oa, ob) = (outputs(a.path()), outputs(b.path()));
        assert!(oa.len() > 3);
        assert_eq!(oa, ob, "{name}");
    }
}

#[test]
fn seed_flag_overrides_scenario_seed() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    assert_eq!(code(&eikonal(&scenario("abs_time_extrema"), a.path(), &[])), 0);
    assert_eq!(code(&eikonal(&scenario("abs_time_extrema"), b.path(), &["--seed", "12345"])), 0);
    assert_eq!(json(&a.path().join("manifest.json"))["data"]["seed"], 3);
    assert_eq!(json(&b.path().join("manifest.json"))["data"]["seed"], 12345);
    let probes = |d: &Path| fs::read(d.join("viscosity_abs_time.json")).unwrap();
    assert_ne!(probes(a.path()), probes(b.path()));
}

#[test]
fn refine_halves_the_grid() {
    let out = TempDir::new().unwrap();
    assert_eq!(code(&eikonal(&scenario("minkowski_uplus"), out.path(), &["--refine", "1"])), 0);
    let m = json(&out.path().join("manifest.json"));
    assert_eq!(m["data"]["grid"]["nt"], 129);
    assert_eq!(m["data"]["refine"], 1);
}

#[test]
fn unknown_key_names_the_key() {
    let dir = TempDir::new().unwrap();
    let p = write_scenario(
        dir.path(),
        r#"{ "name": "x", "spacetime": { "key": "minkowski2" }, "grid": { "cells_per_unit": 8 }, "colour": 1 }"#,
    );
    let o = eikonal(&p, &dir.path().join("out"), &[]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));
}

#[test]
fn configuration_errors_exit_one() {
    let bodies = [
        (
            r#"{ "name": "x", "spacetime": { "key": "anti-de-sitter" }, "grid": { "cells_per_unit": 8 } }"#,
            "anti-de-sitter",
        ),
        (
            r#"{ "name": "x", "spacetime": { "key": "minkowski2", "slab": [-1, 1, -1, 1] }, "grid": { "cells_per_unit": 8 },
                "analyses": [{ "type": "residual", "field": "missing" }] }"#,
            "analyses[0].field",
        ),
        (
            r#"{ "name": "x", "spacetime": { "key": "minkowski2", "slab": [-1, 1, -1, 1] }, "grid": { "cells_per_unit": 8 },
                "fields": [{ "name": "u", "source": { "type": "catalog", "key": "parabola" } }] }"#,
            "parabola",
        ),
        (
            r#"{ "name": "x", "spacetime": { "key": "minkowski2", "slab": [-1, 1, -1, 1] }, "grid": { "cells_per_unit": 8 },
                "fields": [{ "name": "u", "source": { "type": "limit", "direction": "plus" } }] }"#,
            "temporal",
        ),
        (
            r#"{ "name": "x", "spacetime": { "key": "minkowski2", "slab": [-1, 1, -1, 1] }, "grid": { "cells_per_unit": 8 },
                "fields": [{ "name": "u", "source": { "type": "csv", "path": "nowhere.csv" } }] }"#,
            "nowhere.csv",
        ),
    ];
    for (body, needle) in bodies {
        let dir = TempDir::new().unwrap();
        let p = write_scenario(dir.path(), body);
        let o = eikonal(&p, &dir.path().join("out"), &[]);
        assert_eq!(code(&o), 1, "{body}");
        assert!(stderr(&o).contains(needle), "{needle}: {}", stderr(&o));
    }
}

#[test]
fn strict_turns_warnings_into_failures() {
    let dir = TempDir::new().unwrap();
    // the probe margin leaves no room for random probes on this small grid
    let p = write_scenario(
        dir.path(),
        r#"{ "name": "tight", "spacetime": { "key": "minkowski2", "slab": [-1, 1, -1, 1] },
             "grid": { "slab": [-0.15, 0.15, -0.15, 0.15], "cells_per_unit": 64 },
             "fields": [{ "name": "t", "source": { "type": "catalog", "key": "coordinate_time" } }],
             "analyses": [{ "type": "viscosity", "field": "t", "probes": [[0.0, 0.0]], "random": 5 }] }"#,
    );
    let out = dir.path().join("out");
    assert_eq!(code(&eikonal(&p, &out, &[])), 0);
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["data"]["warnings"].as_array().unwrap().len(), 1);
    let o = eikonal(&p, &out, &["--strict"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn exported_fields_can_be_ingested() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("first");
    assert_eq!(code(&eikonal(&scenario("abs_time_extrema"), &first, &[])), 0);
    let p = write_scenario(
        dir.path(),
        r#"{ "name": "ingest", "spacetime": { "key": "minkowski2", "slab": [-1, 1, -1, 1] },
             "grid": { "cells_per_unit": 64 },
             "fields": [{ "name": "u", "source": { "type": "csv", "path": "first/abs_time.csv" } }],
             "analyses": [{ "type": "compare", "field": "u", "reference": "abs_time", "max": 1e-12 }] }"#,
    );
    let o = eikonal(&p, &dir.path().join("second"), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

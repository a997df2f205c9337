use std::fs;

use netconcord::io::{self, EstimateSummary, Format};
use netconcord::sim::{run_coverage_experiment_with, GraphSpec, SimulationConfig};
use netconcord::{
    erdos_renyi, estimate_gc, generate_outcomes, infer, DgpConfig, Execution, InferenceOptions,
    InferenceResult, SimulationReport,
};
use serde_json::Value;

fn inference() -> InferenceResult {
    let g = erdos_renyi(80, 3.0, 2).unwrap();
    let y = generate_outcomes(&g, &DgpConfig { c: 0.4, seed: 5 }).unwrap();
    let opts = InferenceOptions {
        permutations: 200,
        seed: 77,
        ..InferenceOptions::default()
    };
    infer(&g, &y, &opts).unwrap().interval
}

fn report() -> SimulationReport {
    let cfg = SimulationConfig {
        mc_reps: 12,
        permutations: 40,
        true_gc_reps: 400,
        ..SimulationConfig::new(GraphSpec::BarabasiAlbert { n: 60, m: 2 }, 0.4, 3)
    };
    run_coverage_experiment_with(&cfg, Execution::Parallel).unwrap()
}

#[test]
fn rendering_is_byte_stable() {
    let r = inference();
    for format in [Format::Json, Format::Csv] {
        assert_eq!(io::render(&r, format).unwrap(), io::render(&r, format).unwrap());
    }
    let again = inference();
    assert_eq!(io::render(&r, Format::Json).unwrap(), io::render(&again, Format::Json).unwrap());
}

#[test]
fn inference_csv_leads_with_audit_columns() {
    let r = inference();
    let text = io::render(&r, Format::Csv).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(
        &header[..7],
        ["c_hat", "ci_lower", "ci_upper", "p_value", "alpha", "B", "seed"]
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), header.len());
    assert_eq!(row[0].parse::<f64>().unwrap(), r.c_hat);
    assert_eq!(row[5], "200");
    assert_eq!(row[6], "77");
    assert!(lines.next().is_none());
}

#[test]
fn json_round_trip_is_exact() {
    let r = inference();
    let text = io::render(&r, Format::Json).unwrap();
    let back: InferenceResult = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);

    let s = report();
    let text = io::render(&s, Format::Json).unwrap();
    let back: SimulationReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);

    let g = erdos_renyi(30, 2.0, 1).unwrap();
    let y = generate_outcomes(&g, &DgpConfig { c: 0.2, seed: 1 }).unwrap();
    let e = EstimateSummary::from(&estimate_gc(&g, &y).unwrap());
    let back: EstimateSummary = serde_json::from_str(&io::render(&e, Format::Json).unwrap()).unwrap();
    assert_eq!(back, e);
}

#[test]
fn emit_writes_the_rendered_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let r = inference();
    io::emit_report(&r, Format::Csv, Some(&path)).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), io::render(&r, Format::Csv).unwrap());
}

#[test]
fn simulation_report_matches_shipped_schema() {
    let schema: Value = serde_json::from_str(
        &fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schemas/simulation_report.schema.json"))
            .unwrap(),
    )
    .unwrap();
    let doc: Value = serde_json::from_str(&io::render(&report(), Format::Json).unwrap()).unwrap();
    let mut errors = Vec::new();
    validate(&schema, &doc, "$", &mut errors);
    assert!(errors.is_empty(), "{errors:#?}");

    // the validator does reject bad documents
    let mut bad = doc.clone();
    bad["coverage_perm"] = Value::from(1.5);
    bad.as_object_mut().unwrap().remove("wall_time");
    bad["extra"] = Value::from(0);
    let mut errors = Vec::new();
    validate(&schema, &bad, "$", &mut errors);
    assert_eq!(errors.len(), 3, "{errors:#?}");
}

/// The subset of JSON Schema used by the shipped schema: type, const, enum,
/// required, properties, additionalProperties = false, and numeric bounds.
fn validate(schema: &Value, doc: &Value, at: &str, errors: &mut Vec<String>) {
    if let Some(types) = schema.get("type") {
        let allowed: Vec<&str> = match types {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        if !allowed.iter().any(|t| type_matches(t, doc)) {
            errors.push(format!("{at}: expected {allowed:?}, got {doc}"));
            return;
        }
    }
    if let Some(c) = schema.get("const") {
        if c != doc {
            errors.push(format!("{at}: expected {c}, got {doc}"));
        }
    }
    if let Some(Value::Array(options)) = schema.get("enum") {
        if !options.contains(doc) {
            errors.push(format!("{at}: {doc} not in {options:?}"));
        }
    }
    if let Some(x) = doc.as_f64() {
        let bound = |k: &str| schema.get(k).and_then(Value::as_f64);
        let checks = [
            (bound("minimum"), x >= bound("minimum").unwrap_or(f64::NEG_INFINITY)),
            (bound("maximum"), x <= bound("maximum").unwrap_or(f64::INFINITY)),
            (bound("exclusiveMinimum"), x > bound("exclusiveMinimum").unwrap_or(f64::NEG_INFINITY)),
            (bound("exclusiveMaximum"), x < bound("exclusiveMaximum").unwrap_or(f64::INFINITY)),
        ];
        if checks.iter().any(|(b, ok)| b.is_some() && !ok) {
            errors.push(format!("{at}: {x} out of bounds"));
        }
    }
    if let Value::Object(obj) = doc {
        if let Some(Value::Array(req)) = schema.get("required") {
            for k in req.iter().filter_map(Value::as_str) {
                if !obj.contains_key(k) {
                    errors.push(format!("{at}: missing {k}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (k, v) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(sub) => validate(sub, v, &format!("{at}.{k}"), errors),
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errors.push(format!("{at}: unexpected {k}"))
                }
                None => {}
            }
        }
    }
}

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "number" => v.is_number(),
        "integer" => v.is_u64() || v.is_i64(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        _ => false,
    }
}

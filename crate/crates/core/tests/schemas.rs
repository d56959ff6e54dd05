//! Keeps the published JSON schemas in step with the serialized types.

use serde_json::Value;
use surface_poisson::persistence::{scan_csv, SCHEMA_VERSION};
use surface_poisson::rep::StratumLabel;
use surface_poisson::strata::ScanRecord;

fn schema(name: &str) -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schemas/").to_string() + name;
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn envelope_schema_matches_version() {
    let s = schema("envelope.schema.json");
    assert_eq!(s["properties"]["schema_version"]["const"], SCHEMA_VERSION);
}

#[test]
fn scan_schema_matches_csv_columns() {
    let s = schema("scan_record.schema.json");
    let required: Vec<&str> = s["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let record = ScanRecord {
        seed: 1,
        orbit_type: StratumLabel::Irreducible,
        h0: 0,
        h1: 6,
        rank: 6,
        sv_gap: 1e15,
    };
    let csv = String::from_utf8(scan_csv(&[record]).unwrap()).unwrap();
    assert_eq!(csv.lines().next().unwrap(), required.join(","));
}

#[test]
fn config_schema_lists_every_field() {
    let s = schema("config.schema.json");
    let props = s["properties"].as_object().unwrap();
    for field in ["group", "genus", "central", "form", "seed", "samples", "functions", "family_size", "flow", "mapping_class", "census"] {
        assert!(props.contains_key(field), "{field}");
    }
    assert_eq!(schema("representation.schema.json")["required"].as_array().unwrap().len(), 4);
}

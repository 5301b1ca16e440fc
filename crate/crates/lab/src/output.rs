//! JSON documents written by the commands and the merged report.
//!
//! Every document is an object with `schema_version`, `kind`, `config` and
//! `payload`. A merged report has kind `report` and a `sections` array of
//! the documents it was built from.

use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{io_error, LabError, LabResult};

pub const SCHEMA_VERSION: u64 = 1;
pub const KINDS: [&str; 4] = ["constants", "theta", "verify", "report"];

pub fn document(kind: &str, config: &impl Serialize, payload: &impl Serialize) -> LabResult<Value> {
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "config": serde_json::to_value(config)?,
        "payload": serde_json::to_value(payload)?,
    }))
}

/// Pretty-printed JSON with a trailing newline. Non-finite numbers become
/// `null`.
pub fn to_json(value: &Value) -> LabResult<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_file(path: &Path, contents: &str) -> LabResult<()> {
    std::fs::write(path, contents).map_err(io_error(path))
}

fn schema_error(path: &Path, msg: &str) -> LabError {
    LabError::Usage(format!("{}: {msg}", path.display()))
}

fn check_document(path: &Path, doc: &Value) -> LabResult<()> {
    let obj = doc.as_object().ok_or_else(|| schema_error(path, "not a JSON object"))?;
    match obj.get("schema_version").and_then(Value::as_u64) {
        Some(SCHEMA_VERSION) => {}
        Some(v) => {
            return Err(schema_error(
                path,
                &format!("schema_version {v}, expected {SCHEMA_VERSION}"),
            ))
        }
        None => return Err(schema_error(path, "missing schema_version")),
    }
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| schema_error(path, "missing kind"))?;
    if !KINDS.contains(&kind) {
        return Err(schema_error(path, &format!("unknown kind {kind:?}")));
    }
    let needs = if kind == "report" { "sections" } else { "payload" };
    if !obj.contains_key(needs) {
        return Err(schema_error(path, &format!("missing {needs}")));
    }
    Ok(())
}

pub fn read_document(path: &Path) -> LabResult<Value> {
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| schema_error(path, &e.to_string()))?;
    check_document(path, &doc)?;
    Ok(doc)
}

/// Merges documents into one report. Reports are flattened into their
/// sections and exact duplicates are kept once, so merging a report again
/// gives the same report.
pub fn merge(docs: Vec<Value>) -> Value {
    let mut sections: Vec<Value> = Vec::new();
    for doc in docs {
        let parts = if doc["kind"] == "report" {
            doc["sections"].as_array().cloned().unwrap_or_default()
        } else {
            vec![doc]
        };
        for p in parts {
            if !sections.contains(&p) {
                sections.push(p);
            }
        }
    }
    json!({
        "schema_version": SCHEMA_VERSION,
        "kind": "report",
        "sections": sections,
    })
}

pub fn merge_files(paths: &[impl AsRef<Path>]) -> LabResult<Value> {
    let docs = paths
        .iter()
        .map(|p| read_document(p.as_ref()))
        .collect::<LabResult<Vec<_>>>()?;
    Ok(merge(docs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_is_idempotent() {
        let a = document("theta", &json!({"seed": 1}), &json!({"theta_hat": 0.25})).unwrap();
        let b = document("verify", &json!({"seed": 2}), &json!([])).unwrap();
        let m = merge(vec![a.clone(), b.clone(), a]);
        assert_eq!(m["sections"].as_array().unwrap().len(), 2);
        assert_eq!(merge(vec![m.clone()]), m);
        assert_eq!(merge(vec![m.clone(), b]), m);
    }

    #[test]
    fn schema_is_checked() {
        let p = Path::new("x.json");
        assert!(check_document(p, &json!({"kind": "theta", "payload": 1})).is_err());
        assert!(check_document(p, &json!({"schema_version": 99, "kind": "theta", "payload": 1})).is_err());
        assert!(check_document(p, &json!({"schema_version": 1, "kind": "plot", "payload": 1})).is_err());
        assert!(check_document(p, &json!({"schema_version": 1, "kind": "theta"})).is_err());
        assert!(check_document(p, &json!({"schema_version": 1, "kind": "theta", "payload": 1})).is_ok());
    }
}

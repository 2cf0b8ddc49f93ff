//! Minimal structural JSON-schema checker for the committed output schemas.
//!
//! Supports the subset the v1 schemas use: `type`, `properties`,
//! `required`, `items`, `enum`, `additionalProperties` and same-directory
//! `$ref`.

use std::collections::BTreeMap;

use serde_json::Value;

pub type SchemaSet = BTreeMap<String, Value>;

/// Load every `*.schema.json` in a directory, keyed by file name.
pub fn load_dir(dir: &std::path::Path) -> std::io::Result<SchemaSet> {
    let mut set = SchemaSet::new();
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.ends_with(".schema.json") {
            let text = std::fs::read_to_string(entry.path())?;
            let schema: Value = serde_json::from_str(&text)
                .map_err(|e| std::io::Error::other(format!("{name}: {e}")))?;
            set.insert(name, schema);
        }
    }
    Ok(set)
}

/// Validate a value against a named schema; returns the first violation.
pub fn validate(set: &SchemaSet, schema_name: &str, value: &Value) -> Result<(), String> {
    let schema = set
        .get(schema_name)
        .ok_or_else(|| format!("unknown schema `{schema_name}`"))?;
    check(set, schema, value, schema_name)
}

fn check(set: &SchemaSet, schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    let obj = schema
        .as_object()
        .ok_or_else(|| format!("{path}: schema must be an object"))?;
    if let Some(reference) = obj.get("$ref").and_then(Value::as_str) {
        let target = set
            .get(reference)
            .ok_or_else(|| format!("{path}: unresolved $ref `{reference}`"))?;
        return check(set, target, value, path);
    }
    if let Some(allowed) = obj.get("enum").and_then(Value::as_array) {
        if !allowed.contains(value) {
            return Err(format!("{path}: {value} not in enum"));
        }
        return Ok(());
    }
    if let Some(ty) = obj.get("type").and_then(Value::as_str) {
        let ok = match ty {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "number" => value.is_number(),
            "integer" => value.is_i64() || value.is_u64(),
            "boolean" => value.is_boolean(),
            "null" => value.is_null(),
            other => return Err(format!("{path}: unsupported schema type `{other}`")),
        };
        if !ok {
            return Err(format!("{path}: expected {ty}, got {value}"));
        }
    }
    if let Some(required) = obj.get("required").and_then(Value::as_array) {
        let vo = value
            .as_object()
            .ok_or_else(|| format!("{path}: required applies to objects"))?;
        for key in required {
            let key = key.as_str().unwrap_or_default();
            if !vo.contains_key(key) {
                return Err(format!("{path}: missing required field `{key}`"));
            }
        }
    }
    if let Some(props) = obj.get("properties").and_then(Value::as_object) {
        if let Some(vo) = value.as_object() {
            for (key, sub) in props {
                if let Some(field) = vo.get(key) {
                    check(set, sub, field, &format!("{path}.{key}"))?;
                }
            }
            match obj.get("additionalProperties") {
                Some(Value::Bool(false)) => {
                    for key in vo.keys() {
                        if !props.contains_key(key) {
                            return Err(format!("{path}: unexpected field `{key}`"));
                        }
                    }
                }
                Some(extra @ Value::Object(_)) => {
                    for (key, field) in vo {
                        if !props.contains_key(key) {
                            check(set, extra, field, &format!("{path}.{key}"))?;
                        }
                    }
                }
                _ => {}
            }
        }
    }
    if let Some(items) = obj.get("items") {
        if let Some(va) = value.as_array() {
            for (i, item) in va.iter().enumerate() {
                check(set, items, item, &format!("{path}[{i}]"))?;
            }
        }
    }
    Ok(())
}

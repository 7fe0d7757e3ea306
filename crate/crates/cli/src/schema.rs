//! Just enough JSON Schema walking to check our own reports against the
//! published `schemas/report.v1.schema.json`: type, enum, const,
//! required, properties, additionalProperties, items, oneOf, and local
//! `$ref` into `$defs`.

use serde_json::Value;

/// All violations found, or Ok. `root` is the whole schema document so
/// `$ref` pointers can be chased.
pub fn validate(root: &Value, instance: &Value) -> Result<(), Vec<String>> {
    let mut errors = Vec::new();
    check(root, root, instance, "$", &mut errors);
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn resolve<'a>(root: &'a Value, reference: &str) -> Option<&'a Value> {
    let mut node = root;
    for part in reference.strip_prefix("#/")?.split('/') {
        node = node.get(part)?;
    }
    Some(node)
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

fn type_matches(name: &str, v: &Value) -> bool {
    match name {
        "integer" => v.as_i64().is_some() || v.as_u64().is_some(),
        other => type_name(v) == other,
    }
}

fn check(root: &Value, schema: &Value, instance: &Value, path: &str, errors: &mut Vec<String>) {
    let Value::Object(keys) = schema else {
        errors.push(format!("{path}: schema node is not an object"));
        return;
    };
    if let Some(Value::String(reference)) = keys.get("$ref") {
        match resolve(root, reference) {
            Some(target) => check(root, target, instance, path, errors),
            None => errors.push(format!("{path}: unresolvable $ref {reference}")),
        }
        return;
    }
    if let Some(declared) = keys.get("type") {
        let names: Vec<&str> = match declared {
            Value::String(one) => vec![one.as_str()],
            Value::Array(many) => many.iter().filter_map(Value::as_str).collect(),
            _ => Vec::new(),
        };
        if !names.iter().any(|n| type_matches(n, instance)) {
            errors.push(format!(
                "{path}: expected {}, found {}",
                names.join(" or "),
                type_name(instance)
            ));
            return;
        }
    }
    if let Some(Value::Array(allowed)) = keys.get("enum") {
        if !allowed.contains(instance) {
            errors.push(format!("{path}: {instance} is not one of {allowed:?}"));
        }
    }
    if let Some(expected) = keys.get("const") {
        if expected != instance {
            errors.push(format!("{path}: expected {expected}, found {instance}"));
        }
    }
    if let Some(Value::Array(branches)) = keys.get("oneOf") {
        let matching = branches
            .iter()
            .filter(|branch| {
                let mut branch_errors = Vec::new();
                check(root, branch, instance, path, &mut branch_errors);
                branch_errors.is_empty()
            })
            .count();
        if matching != 1 {
            errors.push(format!(
                "{path}: {matching} of {} oneOf branches match",
                branches.len()
            ));
        }
    }
    if let Value::Object(fields) = instance {
        let properties = keys.get("properties").and_then(Value::as_object);
        if let Some(properties) = properties {
            for (name, sub) in properties {
                if let Some(value) = fields.get(name) {
                    check(root, sub, value, &format!("{path}.{name}"), errors);
                }
            }
        }
        if let Some(Value::Array(required)) = keys.get("required") {
            for name in required.iter().filter_map(Value::as_str) {
                if !fields.contains_key(name) {
                    errors.push(format!("{path}: missing required field {name}"));
                }
            }
        }
        if let Some(additional) = keys.get("additionalProperties") {
            for (name, value) in fields {
                if properties.is_some_and(|p| p.contains_key(name)) {
                    continue;
                }
                match additional {
                    Value::Bool(true) => {}
                    Value::Bool(false) => {
                        errors.push(format!("{path}: unexpected field {name}"))
                    }
                    sub => check(root, sub, value, &format!("{path}.{name}"), errors),
                }
            }
        }
    }
    if let (Some(item_schema), Value::Array(items)) = (keys.get("items"), instance) {
        for (i, value) in items.iter().enumerate() {
            check(root, item_schema, value, &format!("{path}[{i}]"), errors);
        }
    }
}

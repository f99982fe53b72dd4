//! Effect specifications read from arguments or files.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use qubit_coexist::selftest::InputPair;
use qubit_coexist::{BlochEffect64, HermitianMatrix2};
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;

/// `{"alpha": α, "a": [x, y, z]}` or `{"matrix": [[re, im], …]}` (four entries, row-major).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    alpha: Option<f64>,
    a: Option<Vec<f64>>,
    matrix: Option<Vec<Vec<f64>>>,
}

fn input(context: &str, message: impl Into<String>) -> CliError {
    CliError::Input {
        context: context.to_string(),
        message: message.into(),
    }
}

/// Parses one effect spec; `context` names it in error messages.
pub fn effect_from_value(v: &Value, context: &str) -> Result<BlochEffect64, CliError> {
    let raw: RawSpec =
        serde_json::from_value(v.clone()).map_err(|e| input(context, e.to_string()))?;
    match (raw.alpha, raw.a, raw.matrix) {
        (Some(alpha), Some(a), None) => {
            let a: [f64; 3] = a.try_into().map_err(|a: Vec<f64>| {
                input(
                    &format!("{context}.a"),
                    format!("expected 3 components, got {}", a.len()),
                )
            })?;
            BlochEffect64::from_parts(alpha, a).map_err(|e| input(context, e.to_string()))
        }
        (None, None, Some(m)) => {
            if m.len() != 4 {
                return Err(input(
                    &format!("{context}.matrix"),
                    format!(
                        "expected 4 entries [re, im] in row-major order, got {}",
                        m.len()
                    ),
                ));
            }
            let mut entries = [Complex64::new(0.0, 0.0); 4];
            for (i, e) in m.iter().enumerate() {
                let [re, im] = e[..] else {
                    return Err(input(
                        &format!("{context}.matrix[{i}]"),
                        "expected [re, im]",
                    ));
                };
                entries[i] = Complex64::new(re, im);
            }
            BlochEffect64::from_matrix(&HermitianMatrix2::new(entries))
                .map_err(|e| input(context, e.to_string()))
        }
        (None, Some(_), None) => Err(input(context, "missing field `alpha`")),
        (Some(_), None, None) => Err(input(context, "missing field `a`")),
        (None, None, None) => Err(input(context, "expected either {alpha, a} or {matrix}")),
        _ => Err(input(
            context,
            "give either {alpha, a} or {matrix}, not both",
        )),
    }
}

pub fn effect_from_str(s: &str, context: &str) -> Result<BlochEffect64, CliError> {
    let v: Value = serde_json::from_str(s).map_err(|e| input(context, e.to_string()))?;
    effect_from_value(&v, context)
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    serde_json::from_str(&text).map_err(|e| input(&path.display().to_string(), e.to_string()))
}

/// `{"a": spec, "b": spec}`.
pub fn pair_from_value(
    v: &Value,
    context: &str,
) -> Result<(BlochEffect64, BlochEffect64), CliError> {
    let obj = v
        .as_object()
        .ok_or_else(|| input(context, "expected an object with fields `a` and `b`"))?;
    if let Some(k) = obj.keys().find(|k| *k != "a" && *k != "b") {
        return Err(input(context, format!("unknown field `{k}`")));
    }
    let get = |k: &str| {
        obj.get(k)
            .ok_or_else(|| input(context, format!("missing field `{k}`")))
    };
    let a = effect_from_value(get("a")?, &format!("{context}.a"))?;
    let b = effect_from_value(get("b")?, &format!("{context}.b"))?;
    Ok((a, b))
}

/// A list of pairs; entries that fail to parse are kept as errors.
pub fn pair_list(v: &Value, context: &str) -> Result<Vec<InputPair>, CliError> {
    let items = v
        .as_array()
        .ok_or_else(|| input(context, "expected an array of {a, b} pairs"))?;
    Ok(items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            pair_from_value(item, &format!("{context}[{i}]")).map_err(|e| e.to_string())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bloch_form() {
        let e = effect_from_str(r#"{"alpha": 1, "a": [0, 0, 1]}"#, "A").unwrap();
        assert_eq!(e.alpha(), 1.0);
        assert_eq!(e.avec().z, 1.0);
    }

    #[test]
    fn matrix_form() {
        let e = effect_from_str(r#"{"matrix": [[1,0],[0,0],[0,0],[0,0]]}"#, "A").unwrap();
        assert_eq!(e.alpha(), 1.0);
        assert_eq!(e.avec().z, 1.0);
    }

    #[test]
    fn field_level_errors() {
        let msg = |s: &str| effect_from_str(s, "A").unwrap_err().to_string();
        assert!(msg(r#"{"alpha": 1}"#).contains("missing field `a`"));
        assert!(msg(r#"{"alpha": 1, "a": [0, 1]}"#).contains("A.a"));
        assert!(msg(r#"{"alpha": 1, "a": [0, 0, 1], "beta": 2}"#).contains("unknown field"));
        assert!(msg(r#"{"alpha": 1, "a": [0, 0, 1], "matrix": []}"#).contains("not both"));
        assert!(msg(r#"{"alpha": 0.5, "a": [0, 0, 1]}"#).contains("below"));
        assert!(msg(r#"{"matrix": [[1,0],[0,1],[0,0],[0,0]]}"#).contains("Hermitian"));
    }

    #[test]
    fn bad_pair_entries_are_kept() {
        let v: Value = serde_json::from_str(
            r#"[{"a": {"alpha": 1, "a": [0,0,1]}, "b": {"alpha": 1, "a": [0,0,1]}}, {"a": 3}]"#,
        )
        .unwrap();
        let list = pair_list(&v, "pairs").unwrap();
        assert!(list[0].is_ok());
        assert!(list[1].is_err());
    }
}

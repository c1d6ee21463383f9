//! Metric-spec JSON:
//!
//! ```json
//! { "name": "…", "n": 2, "h0": [["1","0"],["0","1"]], "truncation": 8,
//!   "corrections": [ { "j": 2, "l": 1, "tensor": { "0,0": [["1","0"],["0","1"]] } } ] }
//! ```
//!
//! Rationals are "p/q" strings; tensor keys are comma-separated frequencies.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::algebra::{BoundaryFunction, BoundaryTensor, GaussianRational, Rational, Scalar};
use crate::error::{Error, Result};
use crate::geometry::{Correction, MetricExpansion};

/// A parsed spec: the metric plus its optional display name.
#[derive(Clone, PartialEq, Debug)]
pub struct NamedMetric {
    pub name: String,
    pub metric: MetricExpansion,
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(&format!("{path}.{key}"), "missing field"))
}

fn uint(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn number(v: &Value, path: &str) -> Result<GaussianRational> {
    match v {
        Value::String(s) => s.parse().map_err(|e: Error| schema(path, e.to_string())),
        Value::Number(n) if n.is_i64() => Ok(GaussianRational::from_int(n.as_i64().unwrap_or(0))),
        _ => Err(schema(path, "expected a rational string such as \"1/2\"")),
    }
}

fn matrix(v: &Value, n: usize, path: &str) -> Result<Vec<Vec<GaussianRational>>> {
    let rows = v.as_array().ok_or_else(|| schema(path, "expected an array of rows"))?;
    if rows.len() != n {
        return Err(schema(path, format!("expected {n} rows, found {}", rows.len())));
    }
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let p = format!("{path}[{i}]");
            let cols = r.as_array().ok_or_else(|| schema(&p, "expected an array"))?;
            if cols.len() != n {
                return Err(schema(&p, format!("expected {n} entries, found {}", cols.len())));
            }
            cols.iter()
                .enumerate()
                .map(|(j, c)| number(c, &format!("{p}[{j}]")))
                .collect()
        })
        .collect()
}

fn frequency(key: &str, n: usize, path: &str) -> Result<Vec<i64>> {
    let xi: std::result::Result<Vec<i64>, _> = key.split(',').map(|s| s.trim().parse::<i64>()).collect();
    let xi = xi.map_err(|_| schema(path, format!("bad frequency key {key:?}")))?;
    if xi.len() != n {
        return Err(schema(
            path,
            format!("frequency {key:?} has {} components, expected {n}", xi.len()),
        ));
    }
    Ok(xi)
}

fn tensor(v: &Value, n: usize, path: &str) -> Result<BoundaryTensor<GaussianRational>> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema(path, "expected an object keyed by frequency"))?;
    let mut entries = vec![vec![BoundaryFunction::<GaussianRational>::zero(n); n]; n];
    for (key, m) in obj {
        let p = format!("{path}.{key}");
        let xi = frequency(key, n, &p)?;
        let m = matrix(m, n, &p)?;
        for i in 0..n {
            for j in 0..n {
                let term = BoundaryFunction::exponential(n, xi.clone(), m[i][j].clone());
                entries[i][j] = entries[i][j].add(&term);
            }
        }
    }
    BoundaryTensor::new(entries).map_err(|e| match e {
        Error::NotSymmetric { i, j } => schema(path, format!("tensor is not symmetric at ({i}, {j})")),
        other => other,
    })
}

/// Parses a metric spec from a JSON string.
pub fn parse_metric_json(text: &str) -> Result<NamedMetric> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| schema("$", "expected an object"))?;
    let n = uint(field(obj, "n", "$")?, "$.n")?;
    if n == 0 {
        return Err(schema("$.n", "dimension must be positive"));
    }
    let h0g = matrix(field(obj, "h0", "$")?, n, "$.h0")?;
    let mut h0: Vec<Vec<Rational>> = Vec::new();
    for (i, row) in h0g.iter().enumerate() {
        let mut r = Vec::new();
        for (j, c) in row.iter().enumerate() {
            if !c.is_real() {
                return Err(schema(&format!("$.h0[{i}][{j}]"), "h0 must be real"));
            }
            r.push(c.re.clone());
        }
        h0.push(r);
    }
    let trunc = uint(field(obj, "truncation", "$")?, "$.truncation")?;
    let name = match obj.get("name") {
        None => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(schema("$.name", "expected a string")),
    };
    let mut corrections = Vec::new();
    if let Some(cs) = obj.get("corrections") {
        let cs = cs
            .as_array()
            .ok_or_else(|| schema("$.corrections", "expected an array"))?;
        for (k, c) in cs.iter().enumerate() {
            let p = format!("$.corrections[{k}]");
            let co = c.as_object().ok_or_else(|| schema(&p, "expected an object"))?;
            let j = uint(field(co, "j", &p)?, &format!("{p}.j"))?;
            let l = uint(field(co, "l", &p)?, &format!("{p}.l"))?;
            let t = tensor(field(co, "tensor", &p)?, n, &format!("{p}.tensor"))?;
            corrections.push(Correction { j, l, tensor: t });
        }
    }
    for key in obj.keys() {
        if !["name", "n", "h0", "truncation", "corrections"].contains(&key.as_str()) {
            return Err(schema(&format!("$.{key}"), "unknown field"));
        }
    }
    let metric = MetricExpansion::new(h0, corrections, trunc)?;
    Ok(NamedMetric { name, metric })
}

pub fn parse_metric_spec(path: &Path) -> Result<NamedMetric> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_metric_json(&text)
}

fn freq_key(xi: &[i64]) -> String {
    xi.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn tensor_json(t: &BoundaryTensor<GaussianRational>) -> Value {
    let n = t.dim();
    let mut freqs: BTreeMap<Vec<i64>, ()> = BTreeMap::new();
    for row in t.entries() {
        for e in row {
            for xi in e.terms().keys() {
                freqs.insert(xi.clone(), ());
            }
        }
    }
    let mut out = Map::new();
    for xi in freqs.keys() {
        let m: Vec<Value> = (0..n)
            .map(|i| {
                Value::Array(
                    (0..n)
                        .map(|j| Value::String(t.get(i, j).coefficient(xi).to_string()))
                        .collect(),
                )
            })
            .collect();
        out.insert(freq_key(xi), Value::Array(m));
    }
    Value::Object(out)
}

/// Canonical JSON value of a metric.
pub fn metric_to_json(name: &str, g: &MetricExpansion) -> Value {
    let h0: Vec<Value> = g
        .h0()
        .iter()
        .map(|r| Value::Array(r.iter().map(|c| Value::String(c.to_string())).collect()))
        .collect();
    let corrections: Vec<Value> = g
        .corrections()
        .iter()
        .map(|c| json!({ "j": c.j, "l": c.l, "tensor": tensor_json(&c.tensor) }))
        .collect();
    json!({
        "name": name,
        "n": g.n(),
        "h0": h0,
        "corrections": corrections,
        "truncation": g.trunc(),
    })
}

/// Canonical text: sorted keys, two-space indentation, trailing newline.
pub fn emit_metric_spec(name: &str, g: &MetricExpansion) -> String {
    let mut s = serde_json::to_string_pretty(&metric_to_json(name, g)).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// emit(parse(text)).
pub fn canonicalize(text: &str) -> Result<String> {
    let m = parse_metric_json(text)?;
    Ok(emit_metric_spec(&m.name, &m.metric))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::identity;

    const FLAT: &str = r#"{"n": 2, "h0": [["1","0"],["0","1"]], "corrections": [], "truncation": 4}"#;

    #[test]
    fn flat_spec() {
        let m = parse_metric_json(FLAT).unwrap();
        assert!(m.metric.is_flat());
        assert_eq!(m.metric.h0(), &identity(2)[..]);
    }

    #[test]
    fn log_correction_and_round_trip() {
        let text = r#"{"name": "t", "n": 2, "h0": [["2","1"],["1","2"]], "truncation": 5,
            "corrections": [{"j": 2, "l": 1, "tensor": {"0,0": [["1","0"],["0","1/3"]],
                "1,0": [["1/2","0"],["0","0"]], "-1,0": [["1/2","0"],["0","0"]]}}]}"#;
        let m = parse_metric_json(text).unwrap();
        assert_eq!(m.metric.corrections().len(), 1);
        assert_eq!((m.metric.corrections()[0].j, m.metric.corrections()[0].l), (2, 1));
        let once = canonicalize(text).unwrap();
        assert_eq!(canonicalize(&once).unwrap(), once);
        assert_eq!(parse_metric_json(&once).unwrap(), m);
    }

    #[test]
    fn asymmetric_tensor_names_the_pair() {
        let text = r#"{"n": 2, "h0": [["1","0"],["0","1"]], "truncation": 3,
            "corrections": [{"j": 1, "l": 0, "tensor": {"0,0": [["1","1"],["0","1"]]}}]}"#;
        let err = parse_metric_json(text).unwrap_err();
        assert!(err.to_string().contains("(0, 1)"), "{err}");
    }

    #[test]
    fn schema_errors_carry_paths() {
        let err = parse_metric_json(r#"{"n": 2, "h0": [["1","0"]], "truncation": 3}"#).unwrap_err();
        assert_eq!(
            err,
            Error::Schema {
                path: "$.h0".into(),
                message: "expected 2 rows, found 1".into()
            }
        );
        let err = parse_metric_json(r#"{"n": 1, "h0": [["-1"]], "truncation": 3}"#).unwrap_err();
        assert_eq!(err, Error::NotPositiveDefinite);
    }
}

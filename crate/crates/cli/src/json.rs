//! Integer and matrix encoding shared by the document formats. Integers are
//! JSON numbers when they fit in an `i64` and decimal strings otherwise.

use std::fmt;

use homfib::IntMatrix;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{Map, Value};

/// A validation failure at a JSON path such as `decomposition.terms[1].k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocError {
    pub path: String,
    pub message: String,
}

impl DocError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "at {}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for DocError {}

pub fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

pub fn index(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

pub fn parse_text(text: &str) -> Result<Value, DocError> {
    serde_json::from_str(text)
        .map_err(|e| DocError::new(format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

pub fn int_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(x.to_string()),
    }
}

pub fn matrix_value(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(int_value).collect())).collect())
}

pub fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>, DocError> {
    let map = v.as_object().ok_or_else(|| DocError::new(path, "expected an object"))?;
    if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(DocError::new(join(path, k), format!("unknown field (expected one of {})", allowed.join(", "))));
    }
    Ok(map)
}

pub fn field<'a>(map: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value, DocError> {
    map.get(key).ok_or_else(|| DocError::new(join(path, key), "missing field"))
}

pub fn int(v: &Value, path: &str) -> Result<BigInt, DocError> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(DocError::new(path, format!("{n} is not an integer; write large integers as decimal strings")))
            }
        }
        Value::String(s) => {
            let digits = s.strip_prefix('-').unwrap_or(s);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(DocError::new(path, format!("{s:?} is not a decimal integer")));
            }
            s.parse().map_err(|_| DocError::new(path, format!("{s:?} is not a decimal integer")))
        }
        _ => Err(DocError::new(path, "expected an integer")),
    }
}

pub fn small<T: TryFrom<i64>>(v: &Value, path: &str, what: &str) -> Result<T, DocError> {
    let x = int(v, path)?;
    x.to_i64()
        .and_then(|i| T::try_from(i).ok())
        .ok_or_else(|| DocError::new(path, format!("{x} is out of range for {what}")))
}

pub fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, DocError> {
    v.as_array().ok_or_else(|| DocError::new(path, "expected an array"))
}

/// Rows of integers; all rows must have `cols` entries when given.
pub fn matrix(v: &Value, path: &str) -> Result<IntMatrix, DocError> {
    let rows = array(v, path)?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let rp = index(path, i);
        let entries = array(r, &rp)?;
        let row: Vec<BigInt> =
            entries.iter().enumerate().map(|(j, e)| int(e, &index(&rp, j))).collect::<Result<_, _>>()?;
        if let Some(first) = out.first().map(|f: &Vec<BigInt>| f.len()) {
            if row.len() != first {
                return Err(DocError::new(rp, format!("has {} entries, expected {first}", row.len())));
            }
        }
        out.push(row);
    }
    if out.is_empty() {
        return Ok(IntMatrix::zeros(0, 0));
    }
    IntMatrix::from_rows(out).map_err(|e| DocError::new(path, e.to_string()))
}

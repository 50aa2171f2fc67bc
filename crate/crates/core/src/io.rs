//! JSON documents for matrices, conjugations and S_C elements, and atomic
//! file output.
//!
//! A matrix document is `{"kind": ..., "n": N, "data": [[re, im], ...]}`
//! with `data` row-major of length `N²`.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::conjugation::Conjugation;
use crate::error::{Error, Result};
use crate::linalg::{C64, CMat};
use crate::sc_space::ScElement;

pub fn matrix_value(m: &CMat, kind: &str) -> Value {
    let n = m.nrows();
    let mut data = Vec::with_capacity(n * m.ncols());
    for i in 0..n {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            data.push(json!([z.re, z.im]));
        }
    }
    json!({ "kind": kind, "n": n, "data": data })
}

pub fn conjugation_value(c: &Conjugation) -> Value {
    matrix_value(c.matrix(), "conjugation")
}

pub fn sc_element_value(t: &ScElement) -> Value {
    json!({
        "kind": "sc_element",
        "matrix": matrix_value(t.matrix(), "matrix"),
        "conjugation": conjugation_value(t.conjugation()),
    })
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| Error::parse(name, "missing field"))
}

fn number(v: &Value, index: usize) -> Result<f64> {
    let x = match v {
        Value::Number(num) => num.as_f64(),
        Value::String(s) => s.parse::<f64>().ok(),
        _ => None,
    };
    match x {
        Some(x) if x.is_finite() => Ok(x),
        Some(_) => Err(Error::parse("data", format!("non-finite entry at index {index}"))),
        None => Err(Error::parse("data", format!("entry {index} is not a number"))),
    }
}

/// Parses a matrix document, returning its `kind` tag and the matrix.
pub fn parse_matrix_value(v: &Value) -> Result<(String, CMat)> {
    let kind = field(v, "kind")?
        .as_str()
        .ok_or_else(|| Error::parse("kind", "expected a string"))?
        .to_string();
    let n = field(v, "n")?
        .as_u64()
        .ok_or_else(|| Error::parse("n", "expected a nonnegative integer"))? as usize;
    if n == 0 {
        return Err(Error::parse("n", "dimension must be positive"));
    }
    let data = field(v, "data")?
        .as_array()
        .ok_or_else(|| Error::parse("data", "expected an array"))?;
    if data.len() != n * n {
        return Err(Error::parse(
            "data",
            format!("expected {} entries for n = {n}, found {}", n * n, data.len()),
        ));
    }
    let mut m = CMat::zeros(n, n);
    for (k, entry) in data.iter().enumerate() {
        let pair = entry
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| Error::parse("data", format!("entry {k} must be a [re, im] pair")))?;
        m[(k / n, k % n)] = C64::new(number(&pair[0], k)?, number(&pair[1], k)?);
    }
    Ok((kind, m))
}

pub fn parse_document(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        Error::parse(
            "document",
            format!("line {} column {}: {e}", e.line(), e.column()),
        )
    })
}

pub fn parse_matrix_str(text: &str) -> Result<CMat> {
    Ok(parse_matrix_value(&parse_document(text)?)?.1)
}

pub fn load_matrix(path: &Path) -> Result<CMat> {
    parse_matrix_str(&fs::read_to_string(path)?)
}

pub fn save_matrix(path: &Path, m: &CMat, kind: &str) -> Result<()> {
    write_json(path, &matrix_value(m, kind))
}

pub fn parse_conjugation_value(v: &Value) -> Result<Conjugation> {
    let (kind, u) = parse_matrix_value(v)?;
    if kind != "conjugation" {
        return Err(Error::parse("kind", format!("expected \"conjugation\", found \"{kind}\"")));
    }
    Conjugation::from_unitary(u)
}

pub fn load_conjugation(path: &Path) -> Result<Conjugation> {
    parse_conjugation_value(&parse_document(&fs::read_to_string(path)?)?)
}

/// Loads either an `sc_element` document or a bare matrix; a bare matrix is
/// paired with `fallback` (or the standard conjugation) and must be a member.
pub fn load_sc_element(path: &Path, fallback: Option<&Conjugation>) -> Result<ScElement> {
    let v = parse_document(&fs::read_to_string(path)?)?;
    parse_sc_element_value(&v, fallback)
}

pub fn parse_sc_element_value(v: &Value, fallback: Option<&Conjugation>) -> Result<ScElement> {
    if v.get("kind").and_then(Value::as_str) == Some("sc_element") {
        let (_, m) = parse_matrix_value(field(v, "matrix")?)?;
        let c = parse_conjugation_value(field(v, "conjugation")?)?;
        return ScElement::new(m, &c);
    }
    let (_, m) = parse_matrix_value(v)?;
    let c = match fallback {
        Some(c) => c.clone(),
        None => Conjugation::standard(m.nrows())?,
    };
    ScElement::new(m, &c)
}

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidInput, "path has no file name")))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    write_atomic(path, to_pretty(v).as_bytes())
}

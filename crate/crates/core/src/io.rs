//! JSON tuple and pencil files and a deterministic JSON writer.
//!
//! File layout: `{"g": int, "n": int, "matrices": [...]}` where each matrix
//! is row-major and each entry is `[re, im]`. Pencil files may also carry
//! `"visible_vars"` for lifted sets.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, HermMatrix};
use crate::pencil::{ColumnTuple, HermTuple, MonicPencil};

/// Inputs whose anti-Hermitian part exceeds this (relative to the matrix
/// norm) are rejected; smaller deviations are symmetrized away.
pub const SYMMETRIZE_TOL: f64 = 1e-9;

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn as_count(v: &Value, key: &str) -> Result<usize> {
    v.get(key)
        .and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| bad(format!("missing or non-integer field \"{key}\"")))
}

fn entry(v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| bad("matrix entries must be numbers"))
}

fn parse_matrix(v: &Value, n: usize) -> Result<CMatrix> {
    let rows = v.as_array().ok_or_else(|| bad("matrix must be an array of rows"))?;
    if rows.len() != n {
        return Err(bad(format!("matrix has {} rows, expected {n}", rows.len())));
    }
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| bad("row must be an array"))?;
        if row.len() != n {
            return Err(bad(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        for (k, z) in row.iter().enumerate() {
            let pair = z.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("entries must be [re, im]"))?;
            let (re, im) = (entry(&pair[0])?, entry(&pair[1])?);
            if !re.is_finite() || !im.is_finite() {
                return Err(bad("non-finite matrix entry"));
            }
            m[(i, k)] = c(re, im);
        }
    }
    Ok(m)
}

fn symmetrize_checked(m: CMatrix, j: usize) -> Result<HermMatrix> {
    let skew = (&m - m.adjoint()).norm() * 0.5;
    if skew > SYMMETRIZE_TOL * m.norm().max(1.0) {
        return Err(bad(format!("matrix {j} is not Hermitian (anti-Hermitian part {skew:e})")));
    }
    Ok(HermMatrix::symmetrize(m))
}

pub fn tuple_from_value(v: &Value) -> Result<HermTuple> {
    let g = as_count(v, "g")?;
    let n = as_count(v, "n")?;
    if g == 0 || n == 0 {
        return Err(bad("g and n must be positive"));
    }
    let mats = v
        .get("matrices")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing \"matrices\" array"))?;
    if mats.len() != g {
        return Err(bad(format!("found {} matrices, expected g = {g}", mats.len())));
    }
    let mats = mats
        .iter()
        .enumerate()
        .map(|(j, m)| symmetrize_checked(parse_matrix(m, n)?, j))
        .collect::<Result<Vec<_>>>()?;
    HermTuple::new(mats)
}

/// A pencil file: coefficients plus the visible variable count.
pub fn pencil_from_value(v: &Value) -> Result<(MonicPencil, usize)> {
    let pencil = MonicPencil::new(tuple_from_value(v)?);
    let visible = match v.get("visible_vars") {
        None | Some(Value::Null) => pencil.g(),
        Some(x) => x.as_u64().ok_or_else(|| bad("\"visible_vars\" must be an integer"))? as usize,
    };
    if visible == 0 || visible > pencil.g() {
        return Err(bad(format!("visible_vars = {visible} out of range for g = {}", pencil.g())));
    }
    Ok((pencil, visible))
}

fn read_value(path: &Path) -> Result<(Value, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    let v = serde_json::from_slice(&bytes).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    Ok((v, bytes))
}

/// Loads a tuple and returns the raw file bytes alongside it.
pub fn load_tuple(path: &Path) -> Result<(HermTuple, Vec<u8>)> {
    let (v, bytes) = read_value(path)?;
    Ok((tuple_from_value(&v)?, bytes))
}

pub fn load_pencil(path: &Path) -> Result<(MonicPencil, usize, Vec<u8>)> {
    let (v, bytes) = read_value(path)?;
    let (p, vis) = pencil_from_value(&v)?;
    Ok((p, vis, bytes))
}

pub fn num(x: f64) -> Value {
    Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn complex_entry(z: crate::linalg::C64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

fn matrix_value(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|k| complex_entry(m[(i, k)])).collect()))
            .collect(),
    )
}

pub fn tuple_to_value(x: &HermTuple) -> Value {
    let mut o = Map::new();
    o.insert("g".into(), x.g().into());
    o.insert("n".into(), x.n().into());
    o.insert("matrices".into(), Value::Array(x.mats().iter().map(|m| matrix_value(m.matrix())).collect()));
    Value::Object(o)
}

pub fn pencil_to_value(a: &MonicPencil, visible: Option<usize>) -> Value {
    let mut v = tuple_to_value(a.coeffs());
    if let (Some(vis), Value::Object(o)) = (visible, &mut v) {
        o.insert("visible_vars".into(), vis.into());
    }
    v
}

fn vector_value(v: &CVector) -> Value {
    Value::Array(v.iter().map(|z| complex_entry(*z)).collect())
}

pub fn columns_to_value(a: &ColumnTuple) -> Value {
    let mut o = Map::new();
    o.insert("g".into(), a.g().into());
    o.insert("n".into(), a.n().into());
    o.insert("columns".into(), Value::Array(a.cols().iter().map(vector_value).collect()));
    Value::Object(o)
}

pub fn cmatrix_to_value(m: &CMatrix) -> Value {
    matrix_value(m)
}

/// Floats at 17 significant digits, so every f64 round-trips exactly.
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    format!("{x:.16e}")
}

fn write_string(out: &mut String, s: &str) {
    // serde_json's escaping is deterministic; reuse it for strings.
    out.push_str(&serde_json::to_string(s).expect("strings always serialize"));
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, k: usize| out.extend(std::iter::repeat_n(' ', 2 * k));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                let _ = write!(out, "{i}");
            } else if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else {
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => write_string(out, s),
        Value::Array(items) => {
            // Scalars and [re, im] pairs stay on one line, so a matrix prints
            // one row per line.
            let scalar = |x: &Value| !x.is_array() && !x.is_object();
            let flat = items.iter().all(|x| scalar(x) || x.as_array().is_some_and(|a| a.iter().all(scalar)));
            if items.is_empty() {
                out.push_str("[]");
            } else if flat {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, x) in items.iter().enumerate() {
                    pad(out, indent + 1);
                    write_value(out, x, indent + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                pad(out, indent);
                out.push(']');
            }
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                pad(out, indent + 1);
                write_string(out, k);
                out.push_str(": ");
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Pretty JSON with fixed float formatting and the map's key order.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

pub fn save_value(path: &Path, v: &Value) -> Result<()> {
    std::fs::write(path, to_json_string(v)).map_err(|e| bad(format!("{}: {e}", path.display())))
}

//! JSON encoding of pointwise qc data.
//!
//! ```json
//! { "n": 1, "I": [I1, I2, I3], "T0": M, "U": M, "scal": "16", "R": [[M, ..], ..] }
//! ```
//! Matrices are arrays of rows. Exact scalars are `"p/q"` strings; float
//! mode writes numbers and reads either form.

use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::frame::AdaptedFrame;
use crate::linalg::Mat;
use crate::scalar::Scalar;
use crate::weyl::QCPointData;

pub fn mat_to_json<S: Scalar>(m: &Mat<S>) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(S::to_json).collect())).collect())
}

pub fn mat_from_json<S: Scalar>(v: &Value, rows: usize, cols: usize, what: &str) -> Result<Mat<S>> {
    let arr = v.as_array().ok_or_else(|| Error::Input(format!("{what}: expected an array of rows")))?;
    if arr.len() != rows {
        return Err(Error::Dimension(format!("{what}: expected {rows} rows, found {}", arr.len())));
    }
    let mut out = Vec::with_capacity(rows);
    for (i, r) in arr.iter().enumerate() {
        let r = r.as_array().ok_or_else(|| Error::Input(format!("{what}: row {i} is not an array")))?;
        if r.len() != cols {
            return Err(Error::Dimension(format!("{what}: row {i} has {} entries, expected {cols}", r.len())));
        }
        out.push(r.iter().map(S::from_json).collect::<Result<Vec<S>>>()?);
    }
    Mat::from_rows(out)
}

pub fn point_data_to_json<S: Scalar>(data: &QCPointData<S>) -> Value {
    let d = data.dim();
    let r: Vec<Value> =
        (0..d).map(|a| Value::Array((0..d).map(|b| mat_to_json(data.curvature(a, b))).collect())).collect();
    json!({
        "n": data.n,
        "I": data.frame.matrices().iter().map(mat_to_json).collect::<Vec<_>>(),
        "T0": mat_to_json(&data.t0),
        "U": mat_to_json(&data.u),
        "scal": data.scal.to_json(),
        "R": r,
    })
}

/// Parses point data; the frame is checked, the tensors are not (see
/// [`QCPointData::validate`]).
pub fn point_data_from_json<S: Scalar>(v: &Value, tol: f64) -> Result<QCPointData<S>> {
    let field = |k: &str| v.get(k).ok_or_else(|| Error::Input(format!("missing field `{k}`")));
    let n = field("n")?.as_u64().ok_or_else(|| Error::Input("`n` must be a positive integer".into()))? as usize;
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    let d = 4 * n;
    let is = field("I")?.as_array().filter(|a| a.len() == 3).ok_or_else(|| Error::Input("`I` must hold three matrices".into()))?;
    let complex = [0, 1, 2].map(|s| mat_from_json::<S>(&is[s], d, d, "I"));
    let [a, b, c] = complex;
    let frame = AdaptedFrame::from_matrices_tol(n, [a?, b?, c?], tol)?;
    let t0 = mat_from_json(field("T0")?, d, d, "T0")?;
    let u = mat_from_json(field("U")?, d, d, "U")?;
    let scal = S::from_json(field("scal")?)?;
    let rows = field("R")?.as_array().filter(|a| a.len() == d).ok_or_else(|| Error::Dimension(format!("`R` must have {d} rows")))?;
    let mut r = Vec::with_capacity(d * d);
    for row in rows {
        let row = row.as_array().filter(|a| a.len() == d).ok_or_else(|| Error::Dimension(format!("`R` rows must have {d} entries")))?;
        for m in row {
            r.push(mat_from_json(m, d, d, "R")?);
        }
    }
    Ok(QCPointData { n, frame, t0, u, scal, r })
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty-printed with a trailing newline.
pub fn to_pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    std::fs::write(path, to_pretty(v)?)?;
    Ok(())
}

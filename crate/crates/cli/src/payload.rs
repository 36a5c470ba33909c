//! JSON encodings of algebra elements.
//!
//! Scalars are a number (real) or `[re, im]`. Matrices are row-major nested
//! arrays. Differential operators are objects mapping the derivative order
//! to its `2M + 1` Fourier coefficients, mode `−M` first.

use num_complex::Complex64;
use qlax_core::algebra::{AlgebraDescriptor, AlgebraElement, CircleDiffOp, Matrix, ScalarField};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

fn schema(msg: String) -> CliError {
    CliError::Schema(msg)
}

pub fn parse_scalar(v: &Value, what: &str) -> CliResult<Complex64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .map(|x| Complex64::new(x, 0.0))
            .ok_or_else(|| schema(format!("{what}: number out of range"))),
        Value::Array(parts) if parts.len() == 2 => {
            let re = parts[0].as_f64();
            let im = parts[1].as_f64();
            match (re, im) {
                (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                _ => Err(schema(format!("{what}: complex entries must be [re, im] numbers"))),
            }
        }
        _ => Err(schema(format!("{what}: expected a number or [re, im]"))),
    }
}

fn check_finite(z: Complex64, what: &str) -> CliResult<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(schema(format!("{what}: non-finite entry")))
    }
}

/// Square matrix payload of dimension `n` over `field`.
pub fn parse_matrix(v: &Value, n: usize, field: ScalarField, what: &str) -> CliResult<Matrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| schema(format!("{what}: expected an array of {n} rows")))?;
    if rows.len() != n {
        return Err(schema(format!("{what}: expected {n} rows, got {}", rows.len())));
    }
    let mut data = ndarray::Array2::zeros((n, n));
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .filter(|r| r.len() == n)
            .ok_or_else(|| schema(format!("{what}: row {i} must hold {n} entries")))?;
        for (j, entry) in row.iter().enumerate() {
            let z = check_finite(parse_scalar(entry, what)?, what)?;
            if field == ScalarField::Real && z.im != 0.0 {
                return Err(schema(format!(
                    "{what}: complex entry at ({i}, {j}) in a real backend"
                )));
            }
            data[(i, j)] = z;
        }
    }
    Matrix::from_array(data, field).map_err(CliError::from_input)
}

fn parse_diffop(v: &Value, max_order: usize, modes: usize, what: &str) -> CliResult<CircleDiffOp> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema(format!("{what}: expected {{order: [Fourier coefficients]}}")))?;
    let width = 2 * modes + 1;
    let mut rows = vec![vec![Complex64::new(0.0, 0.0); width]; max_order + 1];
    for (key, coeffs) in obj {
        let j: usize = key
            .parse()
            .map_err(|_| schema(format!("{what}: order key {key:?} is not an integer")))?;
        if j > max_order {
            return Err(schema(format!("{what}: order {j} exceeds the backend's {max_order}")));
        }
        let coeffs = coeffs
            .as_array()
            .filter(|c| c.len() == width)
            .ok_or_else(|| schema(format!("{what}: order {j} needs {width} Fourier coefficients")))?;
        for (slot, c) in rows[j].iter_mut().zip(coeffs) {
            *slot = check_finite(parse_scalar(c, what)?, what)?;
        }
    }
    CircleDiffOp::from_coefficients(max_order, modes, rows).map_err(CliError::from_input)
}

pub fn parse_element(v: &Value, desc: &AlgebraDescriptor, what: &str) -> CliResult<AlgebraElement> {
    match *desc {
        AlgebraDescriptor::Matrix { n, field } => Ok(parse_matrix(v, n, field, what)?.into()),
        AlgebraDescriptor::CircleDiffOp { max_order, modes } => {
            Ok(parse_diffop(v, max_order, modes, what)?.into())
        }
    }
}

fn scalar_value(z: Complex64, real: bool) -> Value {
    if real {
        json!(z.re)
    } else {
        json!([z.re, z.im])
    }
}

pub fn element_value(a: &AlgebraElement) -> Value {
    match a {
        AlgebraElement::Matrix(m) => {
            let real = m.field() == ScalarField::Real;
            Value::Array(
                m.entries()
                    .rows()
                    .into_iter()
                    .map(|r| Value::Array(r.iter().map(|&z| scalar_value(z, real)).collect()))
                    .collect(),
            )
        }
        AlgebraElement::DiffOp(op) => {
            let mut obj = Map::new();
            for (j, row) in op.coefficient_rows().iter().enumerate() {
                if row.iter().any(|z| z.norm() != 0.0) {
                    let coeffs = row.iter().map(|&z| scalar_value(z, false)).collect();
                    obj.insert(j.to_string(), Value::Array(coeffs));
                }
            }
            Value::Object(obj)
        }
    }
}

/// Flat `(column, value)` listing of an element, used for entrywise tables.
pub fn element_entries(a: &AlgebraElement) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    match a {
        AlgebraElement::Matrix(m) => {
            let real = m.field() == ScalarField::Real;
            for ((i, j), z) in m.entries().indexed_iter() {
                if real {
                    out.push((format!("l_{i}_{j}"), z.re));
                } else {
                    out.push((format!("l_{i}_{j}_re"), z.re));
                    out.push((format!("l_{i}_{j}_im"), z.im));
                }
            }
        }
        AlgebraElement::DiffOp(op) => {
            let m = op.modes() as i64;
            for (j, row) in op.coefficient_rows().iter().enumerate() {
                for (idx, z) in row.iter().enumerate() {
                    let mode = idx as i64 - m;
                    out.push((format!("a_{j}_{mode}_re"), z.re));
                    out.push((format!("a_{j}_{mode}_im"), z.im));
                }
            }
        }
    }
    out
}

use ndarray::Array2;
use num_complex::Complex64;

use super::ScalarField;
use crate::error::{Error, Result};

/// Dense square matrix with complex storage.
///
/// A `Real` matrix keeps every imaginary part at exactly zero; all the
/// operations here preserve that.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    field: ScalarField,
    data: Array2<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize, field: ScalarField) -> Self {
        Matrix {
            field,
            data: Array2::zeros((n, n)),
        }
    }

    pub fn identity(n: usize, field: ScalarField) -> Self {
        Matrix {
            field,
            data: Array2::eye(n),
        }
    }

    /// Matrix unit `E_ij` (one at row `i`, column `j`).
    pub fn unit(n: usize, i: usize, j: usize, field: ScalarField) -> Self {
        let mut m = Self::zeros(n, field);
        m.data[[i, j]] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty matrix".into()));
        }
        let mut data = Array2::zeros((n, n));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                data[[i, j]] = Complex64::new(x, 0.0);
            }
        }
        Ok(Matrix {
            field: ScalarField::Real,
            data,
        })
    }

    /// Wraps a square array. A `Real` field rejects nonzero imaginary parts.
    pub fn from_array(data: Array2<Complex64>, field: ScalarField) -> Result<Self> {
        let (r, c) = data.dim();
        if r != c || r == 0 {
            return Err(Error::InvalidParameter(format!(
                "matrix payload must be square and nonempty, got {r}x{c}"
            )));
        }
        if field == ScalarField::Real && data.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidParameter(
                "real matrix with nonzero imaginary entries".into(),
            ));
        }
        Ok(Matrix { field, data })
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[[i, j]]
    }

    pub(crate) fn product(&self, other: &Matrix) -> Matrix {
        Matrix {
            field: self.field,
            data: self.data.dot(&other.data),
        }
    }

    pub(crate) fn sum(&self, other: &Matrix) -> Matrix {
        Matrix {
            field: self.field,
            data: &self.data + &other.data,
        }
    }

    pub(crate) fn scaled_add_assign(&mut self, alpha: f64, other: &Matrix) {
        self.data.scaled_add(Complex64::new(alpha, 0.0), &other.data);
    }

    pub(crate) fn scaled(&self, alpha: f64) -> Matrix {
        Matrix {
            field: self.field,
            data: self.data.mapv(|z| z * alpha),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        self.data.diag().iter().sum()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix {
            field: self.field,
            data: self.data.t().to_owned(),
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (n, m) = (self.n(), other.n());
        let mut data = Array2::zeros((n * m, n * m));
        for ((i, j), a) in self.data.indexed_iter() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for ((k, l), b) in other.data.indexed_iter() {
                data[[i * m + k, j * m + l]] = a * b;
            }
        }
        Matrix {
            field: self.field,
            data,
        }
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    ///
    /// A pivot below `1e-12` times the largest entry counts as singular.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.n();
        let scale = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::Domain("zero matrix is not invertible".into()));
        }
        let mut a = self.data.clone();
        let mut inv: Array2<Complex64> = Array2::eye(n);
        for col in 0..n {
            let (pivot_row, pivot_abs) = (col..n)
                .map(|r| (r, a[[r, col]].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs <= 1e-12 * scale {
                return Err(Error::Domain(format!(
                    "matrix is singular to working precision (pivot {pivot_abs:e} at column {col})"
                )));
            }
            if pivot_row != col {
                for k in 0..n {
                    a.swap([col, k], [pivot_row, k]);
                    inv.swap([col, k], [pivot_row, k]);
                }
            }
            let p = a[[col, col]];
            for k in 0..n {
                a[[col, k]] /= p;
                inv[[col, k]] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[[r, col]];
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..n {
                    let (ack, ick) = (a[[col, k]], inv[[col, k]]);
                    a[[r, k]] -= f * ack;
                    inv[[r, k]] -= f * ick;
                }
            }
        }
        if self.field == ScalarField::Real {
            inv.mapv_inplace(|z| Complex64::new(z.re, 0.0));
        }
        Ok(Matrix {
            field: self.field,
            data: inv,
        })
    }

    /// Row-major flattening into an `n² × 1` column, as used by operators on
    /// the algebra.
    pub fn vectorize(&self) -> Vec<Complex64> {
        self.data.iter().copied().collect()
    }

    pub fn from_vectorized(values: &[Complex64], n: usize, field: ScalarField) -> Matrix {
        debug_assert_eq!(values.len(), n * n);
        Matrix {
            field,
            data: Array2::from_shape_vec((n, n), values.to_vec()).expect("n*n entries"),
        }
    }

    /// Applies this `n² × n²` matrix to the vectorization of `x`.
    pub fn apply_to_vectorized(&self, x: &Matrix) -> Matrix {
        let n = x.n();
        debug_assert_eq!(self.n(), n * n);
        let v = ndarray::Array1::from(x.vectorize());
        let out = self.data.dot(&v);
        Matrix {
            field: self.field,
            data: out.into_shape_with_order((n, n)).expect("n*n entries"),
        }
    }
}

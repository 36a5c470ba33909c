//! Unital associative coefficient algebras.
//!
//! Two exact backends sit behind [`AlgebraElement`]: dense square matrices
//! and differential operators on the circle. Binary operations check that
//! both operands carry the same [`AlgebraDescriptor`].

mod diffop;
mod matrix;

use std::fmt;

use num_complex::Complex64;

pub use diffop::CircleDiffOp;
pub use matrix::Matrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarField {
    Real,
    Complex,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AlgebraDescriptor {
    Matrix { n: usize, field: ScalarField },
    CircleDiffOp { max_order: usize, modes: usize },
}

impl AlgebraDescriptor {
    pub fn matrix(n: usize) -> Self {
        AlgebraDescriptor::Matrix {
            n,
            field: ScalarField::Real,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AlgebraDescriptor::Matrix { n: 0, .. } => {
                Err(Error::InvalidParameter("matrix dimension must be ≥ 1".into()))
            }
            AlgebraDescriptor::CircleDiffOp { modes: 0, .. } => {
                Err(Error::InvalidParameter("Fourier window M must be ≥ 1".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn is_matrix(&self) -> bool {
        matches!(self, AlgebraDescriptor::Matrix { .. })
    }

    /// Matrix dimension, or a capability error for the diffop backend.
    pub fn matrix_dim(&self, what: &str) -> Result<usize> {
        match *self {
            AlgebraDescriptor::Matrix { n, .. } => Ok(n),
            AlgebraDescriptor::CircleDiffOp { .. } => Err(Error::CapabilityMissing(format!(
                "{what} needs the matrix backend"
            ))),
        }
    }
}

impl fmt::Display for AlgebraDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraDescriptor::Matrix { n, field } => {
                let field = match field {
                    ScalarField::Real => "real",
                    ScalarField::Complex => "complex",
                };
                write!(f, "matrix(n={n}, {field})")
            }
            AlgebraDescriptor::CircleDiffOp { max_order, modes } => {
                write!(f, "circle-diffop(J={max_order}, M={modes})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlgebraElement {
    Matrix(Matrix),
    DiffOp(CircleDiffOp),
}

impl From<Matrix> for AlgebraElement {
    fn from(m: Matrix) -> Self {
        AlgebraElement::Matrix(m)
    }
}

impl From<CircleDiffOp> for AlgebraElement {
    fn from(d: CircleDiffOp) -> Self {
        AlgebraElement::DiffOp(d)
    }
}

impl AlgebraElement {
    pub fn zero(desc: &AlgebraDescriptor) -> Self {
        match *desc {
            AlgebraDescriptor::Matrix { n, field } => Matrix::zeros(n, field).into(),
            AlgebraDescriptor::CircleDiffOp { max_order, modes } => {
                CircleDiffOp::zero(max_order, modes).into()
            }
        }
    }

    pub fn one(desc: &AlgebraDescriptor) -> Self {
        match *desc {
            AlgebraDescriptor::Matrix { n, field } => Matrix::identity(n, field).into(),
            AlgebraDescriptor::CircleDiffOp { max_order, modes } => {
                CircleDiffOp::identity(max_order, modes).into()
            }
        }
    }

    pub fn descriptor(&self) -> AlgebraDescriptor {
        match self {
            AlgebraElement::Matrix(m) => AlgebraDescriptor::Matrix {
                n: m.n(),
                field: m.field(),
            },
            AlgebraElement::DiffOp(d) => AlgebraDescriptor::CircleDiffOp {
                max_order: d.max_order(),
                modes: d.modes(),
            },
        }
    }

    pub fn as_matrix(&self) -> Option<&Matrix> {
        match self {
            AlgebraElement::Matrix(m) => Some(m),
            AlgebraElement::DiffOp(_) => None,
        }
    }

    pub fn as_diffop(&self) -> Option<&CircleDiffOp> {
        match self {
            AlgebraElement::DiffOp(d) => Some(d),
            AlgebraElement::Matrix(_) => None,
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        let (l, r) = (self.descriptor(), other.descriptor());
        if l == r {
            Ok(())
        } else {
            Err(Error::shape(&l, &r))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(match (self, other) {
            (AlgebraElement::Matrix(a), AlgebraElement::Matrix(b)) => a.sum(b).into(),
            (AlgebraElement::DiffOp(a), AlgebraElement::DiffOp(b)) => a.sum(b).into(),
            _ => unreachable!("descriptors already checked"),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// `self += alpha · other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) -> Result<()> {
        self.check(other)?;
        match (self, other) {
            (AlgebraElement::Matrix(a), AlgebraElement::Matrix(b)) => a.scaled_add_assign(alpha, b),
            (AlgebraElement::DiffOp(a), AlgebraElement::DiffOp(b)) => {
                a.scaled_add_assign(alpha, b)
            }
            _ => unreachable!("descriptors already checked"),
        }
        Ok(())
    }

    pub fn scale(&self, alpha: f64) -> Self {
        match self {
            AlgebraElement::Matrix(a) => a.scaled(alpha).into(),
            AlgebraElement::DiffOp(a) => a.scaled(alpha).into(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        match (self, other) {
            (AlgebraElement::Matrix(a), AlgebraElement::Matrix(b)) => Ok(a.product(b).into()),
            (AlgebraElement::DiffOp(a), AlgebraElement::DiffOp(b)) => Ok(a.compose(b)?.into()),
            _ => unreachable!("descriptors already checked"),
        }
    }

    /// `[a, b] = ab − ba`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let mut ab = self.mul(other)?;
        ab.axpy(-1.0, &other.mul(self)?)?;
        Ok(ab)
    }

    /// Frobenius norm for matrices; max-over-orders Fourier 2-norm for diffops.
    pub fn norm(&self) -> f64 {
        match self {
            AlgebraElement::Matrix(a) => a.frobenius_norm(),
            AlgebraElement::DiffOp(a) => a.norm(),
        }
    }

    /// Exact zero test.
    pub fn is_zero(&self) -> bool {
        self.norm() == 0.0
    }

    pub fn trace(&self) -> Result<Complex64> {
        match self {
            AlgebraElement::Matrix(a) => Ok(a.trace()),
            AlgebraElement::DiffOp(_) => Err(Error::CapabilityMissing(
                "trace is not defined on the circle-diffop backend".into(),
            )),
        }
    }

    /// Distance `‖a − b‖` relative to the larger of the two norms.
    pub fn relative_distance(&self, other: &Self) -> Result<f64> {
        let diff = self.sub(other)?.norm();
        let scale = self.norm().max(other.norm());
        Ok(if diff == 0.0 { 0.0 } else { diff / scale })
    }
}

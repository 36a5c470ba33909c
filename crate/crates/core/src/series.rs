//! Truncated formal series `Σ_{n=0}^{N} q^n a_n` with coefficients in a
//! coefficient algebra. All arithmetic is modulo `q^{N+1}`.

use std::fmt;

use crate::algebra::{AlgebraDescriptor, AlgebraElement};
use crate::error::{Error, Result};

/// Least grade with a nonzero coefficient. `Infinite` for the zero series
/// and orders after every finite grade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Grade(usize),
    Infinite,
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Grade(n) => write!(f, "{n}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradedSeries {
    descriptor: AlgebraDescriptor,
    coeffs: Vec<AlgebraElement>,
}

impl GradedSeries {
    pub fn zero(descriptor: &AlgebraDescriptor, order: usize) -> Self {
        GradedSeries {
            descriptor: descriptor.clone(),
            coeffs: vec![AlgebraElement::zero(descriptor); order + 1],
        }
    }

    /// The unit series `1 + 0·q + …`.
    pub fn unit(descriptor: &AlgebraDescriptor, order: usize) -> Self {
        Self::constant(AlgebraElement::one(descriptor), order)
    }

    /// `a` at grade 0, zero elsewhere.
    pub fn constant(a: AlgebraElement, order: usize) -> Self {
        Self::monomial(a, 0, order).expect("grade 0 is always in range")
    }

    /// `q^grade · a`.
    pub fn monomial(a: AlgebraElement, grade: usize, order: usize) -> Result<Self> {
        if grade > order {
            return Err(Error::InvalidParameter(format!(
                "grade {grade} exceeds truncation order {order}"
            )));
        }
        let mut s = Self::zero(&a.descriptor(), order);
        s.coeffs[grade] = a;
        Ok(s)
    }

    pub fn from_coefficients(coeffs: Vec<AlgebraElement>) -> Result<Self> {
        let descriptor = coeffs
            .first()
            .ok_or_else(|| Error::InvalidParameter("series needs at least one grade".into()))?
            .descriptor();
        for c in &coeffs {
            let d = c.descriptor();
            if d != descriptor {
                return Err(Error::shape(&descriptor, &d));
            }
        }
        Ok(GradedSeries { descriptor, coeffs })
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn descriptor(&self) -> &AlgebraDescriptor {
        &self.descriptor
    }

    pub fn coeff(&self, grade: usize) -> &AlgebraElement {
        &self.coeffs[grade]
    }

    pub fn coeffs(&self) -> &[AlgebraElement] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<AlgebraElement> {
        self.coeffs
    }

    pub fn set_coeff(&mut self, grade: usize, a: AlgebraElement) -> Result<()> {
        let d = a.descriptor();
        if d != self.descriptor {
            return Err(Error::shape(&self.descriptor, &d));
        }
        self.coeffs[grade] = a;
        Ok(())
    }

    /// Same series read at a different truncation order: drops grades above
    /// `order`, pads with zeros below it.
    pub fn retruncate(&self, order: usize) -> Self {
        let mut coeffs: Vec<_> = self.coeffs.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, AlgebraElement::zero(&self.descriptor));
        GradedSeries {
            descriptor: self.descriptor.clone(),
            coeffs,
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.descriptor != other.descriptor {
            return Err(Error::shape(&self.descriptor, &other.descriptor));
        }
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// `self += alpha · other`, grade-wise.
    pub fn axpy(&mut self, alpha: f64, other: &Self) -> Result<()> {
        self.check(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.axpy(alpha, b)?;
        }
        Ok(())
    }

    pub fn scale(&self, alpha: f64) -> Self {
        GradedSeries {
            descriptor: self.descriptor.clone(),
            coeffs: self.coeffs.iter().map(|a| a.scale(alpha)).collect(),
        }
    }

    /// Graded Cauchy product `(ST)_n = Σ_{i+j=n} S_i T_j`, grades above `N`
    /// dropped.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let order = self.order();
        let mut out = Self::zero(&self.descriptor, order);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(order + 1 - i).enumerate() {
                if b.is_zero() {
                    continue;
                }
                out.coeffs[i + j].axpy(1.0, &a.mul(b)?)?;
            }
        }
        Ok(out)
    }

    /// Left multiplication of every coefficient by a grade-0 element.
    pub fn left_mul_element(&self, a: &AlgebraElement) -> Result<Self> {
        Ok(GradedSeries {
            descriptor: self.descriptor.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| a.mul(c))
                .collect::<Result<_>>()?,
        })
    }

    /// Right multiplication of every coefficient by a grade-0 element.
    pub fn right_mul_element(&self, a: &AlgebraElement) -> Result<Self> {
        Ok(GradedSeries {
            descriptor: self.descriptor.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.mul(a))
                .collect::<Result<_>>()?,
        })
    }

    /// Multiplies by `q`: grade `n` moves to `n + 1`, the top grade is dropped.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(AlgebraElement::zero(&self.descriptor));
        coeffs.extend(self.coeffs.iter().take(self.order()).cloned());
        GradedSeries {
            descriptor: self.descriptor.clone(),
            coeffs,
        }
    }

    /// Graded commutator `ST − TS`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn pow(&self, k: usize) -> Result<Self> {
        let mut acc = Self::unit(&self.descriptor, self.order());
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn valuation(&self) -> Valuation {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map_or(Valuation::Infinite, Valuation::Grade)
    }

    fn unit_part_removed(&self, what: &str) -> Result<Self> {
        let one = AlgebraElement::one(&self.descriptor);
        if self.coeffs[0] != one {
            return Err(Error::Domain(format!(
                "{what} needs a series with unit grade-0 coefficient"
            )));
        }
        let mut v = self.clone();
        v.coeffs[0] = AlgebraElement::zero(&self.descriptor);
        Ok(v)
    }

    /// `Σ_{k=0}^{N} S^k / k!` for `val(S) ≥ 1`, evaluated in Horner form.
    pub fn exp(&self) -> Result<Self> {
        if self.valuation() == Valuation::Grade(0) {
            return Err(Error::Domain(
                "exp is defined on series of valuation ≥ 1".into(),
            ));
        }
        let order = self.order();
        let unit = Self::unit(&self.descriptor, order);
        let mut acc = unit.clone();
        for k in (1..=order).rev() {
            acc = unit.add(&self.mul(&acc)?.scale(1.0 / k as f64))?;
        }
        Ok(acc)
    }

    /// `Σ_{k=1}^{N} (−1)^{k+1} (U − 1)^k / k` for a unit grade-0 coefficient.
    pub fn log(&self) -> Result<Self> {
        let v = self.unit_part_removed("log")?;
        let order = self.order();
        let mut acc = Self::zero(&self.descriptor, order);
        let mut power = v.clone();
        for k in 1..=order {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            acc.axpy(sign / k as f64, &power)?;
            power = power.mul(&v)?;
        }
        Ok(acc)
    }

    /// Inverse `Σ_k (−1)^k (U − 1)^k` of a series with unit grade-0
    /// coefficient, computed by the equivalent recursion
    /// `W_0 = 1`, `W_n = −Σ_{k=1}^{n} V_k W_{n−k}` with `V = U − 1`.
    pub fn inv(&self) -> Result<Self> {
        let v = self.unit_part_removed("inv")?;
        let order = self.order();
        let mut out = Self::unit(&self.descriptor, order);
        for n in 1..=order {
            let mut w = AlgebraElement::zero(&self.descriptor);
            for k in 1..=n {
                let vk = &v.coeffs[k];
                if vk.is_zero() {
                    continue;
                }
                w.axpy(-1.0, &vk.mul(&out.coeffs[n - k])?)?;
            }
            out.coeffs[n] = w;
        }
        Ok(out)
    }

    /// Inverse of `a_0 + S` with `a_0` an invertible matrix:
    /// `inv(1 + a_0⁻¹ S) · a_0⁻¹`.
    pub fn unit_series_inv(&self) -> Result<Self> {
        let a0 = self.coeffs[0]
            .as_matrix()
            .ok_or_else(|| {
                Error::CapabilityMissing("grade-0 inversion needs the matrix backend".into())
            })?
            .inverse()?;
        let a0_inv = AlgebraElement::from(a0);
        let normalized = self.left_mul_element(&a0_inv)?;
        let mut normalized = normalized;
        // a0⁻¹·a0 is the unit up to roundoff; pin it so the Neumann recursion applies.
        normalized.coeffs[0] = AlgebraElement::one(&self.descriptor);
        normalized.inv()?.right_mul_element(&a0_inv)
    }

    /// `Σ_n q0^n a_n` by Horner evaluation.
    pub fn evaluate(&self, q0: f64) -> AlgebraElement {
        let mut acc = self.coeffs[self.order()].clone();
        for c in self.coeffs.iter().rev().skip(1) {
            let mut next = c.clone();
            next.axpy(q0, &acc).expect("coefficients share a descriptor");
            acc = next;
        }
        acc
    }

    /// Per-grade norms.
    pub fn grade_norms(&self) -> Vec<f64> {
        self.coeffs.iter().map(AlgebraElement::norm).collect()
    }

    /// Per-grade relative distances to another series.
    pub fn relative_distances(&self, other: &Self) -> Result<Vec<f64>> {
        self.check(other)?;
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.relative_distance(b))
            .collect()
    }

    /// Per-grade absolute distances `‖S_n − T_n‖`.
    pub fn distances(&self, other: &Self) -> Result<Vec<f64>> {
        Ok(self.sub(other)?.grade_norms())
    }
}

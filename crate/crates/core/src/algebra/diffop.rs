//! Differential operators on the circle with trigonometric-polynomial
//! coefficients, `A = Σ_j a_j(x) D^j` with `D = d/dx` and
//! `a_j(x) = Σ_{|m| ≤ M} c_{j,m} e^{imx}`.
//!
//! Composition is exact. A product that needs an order above `J` or a mode
//! outside `|m| ≤ M` is an [`Error::Overflow`], never a silent truncation.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct CircleDiffOp {
    max_order: usize,
    modes: usize,
    /// `coeffs[j][m + modes]` is the Fourier coefficient of mode `m` in `a_j`.
    coeffs: Vec<Vec<Complex64>>,
}

impl CircleDiffOp {
    pub fn zero(max_order: usize, modes: usize) -> Self {
        CircleDiffOp {
            max_order,
            modes,
            coeffs: vec![vec![ZERO; 2 * modes + 1]; max_order + 1],
        }
    }

    pub fn identity(max_order: usize, modes: usize) -> Self {
        let mut op = Self::zero(max_order, modes);
        op.coeffs[0][modes] = Complex64::new(1.0, 0.0);
        op
    }

    /// The operator `D = d/dx`. Needs `max_order ≥ 1`.
    pub fn derivative(max_order: usize, modes: usize) -> Result<Self> {
        Self::zero(max_order, modes).with_term(1, &[(0, Complex64::new(1.0, 0.0))])
    }

    /// Multiplication by the trig polynomial `Σ c_m e^{imx}`.
    pub fn multiplication(
        max_order: usize,
        modes: usize,
        fourier: &[(i64, Complex64)],
    ) -> Result<Self> {
        Self::zero(max_order, modes).with_term(0, fourier)
    }

    /// Multiplication by `sin(kx)`.
    pub fn sin(max_order: usize, modes: usize, k: i64) -> Result<Self> {
        Self::multiplication(
            max_order,
            modes,
            &[(k, Complex64::new(0.0, -0.5)), (-k, Complex64::new(0.0, 0.5))],
        )
    }

    /// Multiplication by `cos(kx)`.
    pub fn cos(max_order: usize, modes: usize, k: i64) -> Result<Self> {
        if k == 0 {
            return Self::multiplication(max_order, modes, &[(0, Complex64::new(1.0, 0.0))]);
        }
        Self::multiplication(
            max_order,
            modes,
            &[(k, Complex64::new(0.5, 0.0)), (-k, Complex64::new(0.5, 0.0))],
        )
    }

    /// Adds `(Σ c_m e^{imx}) D^order` to this operator.
    pub fn with_term(mut self, order: usize, fourier: &[(i64, Complex64)]) -> Result<Self> {
        if order > self.max_order {
            return Err(Error::Overflow(format!(
                "order {order} exceeds window J = {}",
                self.max_order
            )));
        }
        for &(m, c) in fourier {
            let idx = self.mode_index(m).ok_or_else(|| {
                Error::Overflow(format!("mode {m} outside window M = {}", self.modes))
            })?;
            self.coeffs[order][idx] += c;
        }
        Ok(self)
    }

    /// Builds from dense `(J+1) × (2M+1)` coefficient rows.
    pub fn from_coefficients(
        max_order: usize,
        modes: usize,
        coeffs: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        if coeffs.len() != max_order + 1 || coeffs.iter().any(|r| r.len() != 2 * modes + 1) {
            return Err(Error::InvalidParameter(format!(
                "diffop payload must be {} rows of {} Fourier coefficients",
                max_order + 1,
                2 * modes + 1
            )));
        }
        Ok(CircleDiffOp {
            max_order,
            modes,
            coeffs,
        })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn coefficient_rows(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    /// Fourier coefficient of mode `m` in `a_order`; zero outside the window.
    pub fn coefficient(&self, order: usize, m: i64) -> Complex64 {
        match (self.coeffs.get(order), self.mode_index(m)) {
            (Some(row), Some(i)) => row[i],
            _ => ZERO,
        }
    }

    /// Highest order with a nonzero coefficient; `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .rposition(|row| row.iter().any(|c| *c != ZERO))
    }

    fn mode_index(&self, m: i64) -> Option<usize> {
        let shifted = m + self.modes as i64;
        (0..=2 * self.modes as i64)
            .contains(&shifted)
            .then_some(shifted as usize)
    }

    pub(crate) fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.scaled_add_assign(1.0, other);
        out
    }

    pub(crate) fn scaled_add_assign(&mut self, alpha: f64, other: &Self) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y * alpha;
            }
        }
    }

    pub(crate) fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for row in &mut out.coeffs {
            for c in row.iter_mut() {
                *c *= alpha;
            }
        }
        out
    }

    /// Max over orders of the 2-norm of the Fourier coefficients.
    pub fn norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|row| row.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Exact composition `self ∘ other` via
    /// `(a D^j)(b D^k) = Σ_{p ≤ j} C(j,p) a b^{(p)} D^{j+k-p}`.
    pub(crate) fn compose(&self, other: &Self) -> Result<Self> {
        let m = self.modes as i64;
        let width = 2 * self.modes + 1;
        let mut out = Self::zero(self.max_order, self.modes);
        for (j, a) in self.coeffs.iter().enumerate() {
            if a.iter().all(|c| *c == ZERO) {
                continue;
            }
            for (k, b) in other.coeffs.iter().enumerate() {
                if b.iter().all(|c| *c == ZERO) {
                    continue;
                }
                let mut binom = 1.0;
                for p in 0..=j {
                    if p > 0 {
                        binom = binom * (j + 1 - p) as f64 / p as f64;
                    }
                    let target = j + k - p;
                    // b^{(p)}: mode u picks up (iu)^p.
                    for (ui, bu) in b.iter().enumerate() {
                        if *bu == ZERO {
                            continue;
                        }
                        let u = ui as i64 - m;
                        let db = *bu * Complex64::new(0.0, u as f64).powu(p as u32) * binom;
                        if db == ZERO {
                            continue;
                        }
                        for (ti, at) in a.iter().enumerate() {
                            if *at == ZERO {
                                continue;
                            }
                            let s = ti as i64 - m + u;
                            let term = *at * db;
                            if s.abs() > m {
                                return Err(Error::Overflow(format!(
                                    "product needs Fourier mode {s}, window is M = {m}"
                                )));
                            }
                            if target > self.max_order {
                                return Err(Error::Overflow(format!(
                                    "product has order {target}, window is J = {}",
                                    self.max_order
                                )));
                            }
                            out.coeffs[target][(s + m) as usize] += term;
                        }
                    }
                }
            }
        }
        debug_assert!(out.coeffs.iter().all(|r| r.len() == width));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn d_after_sin_is_sin_d_plus_cos() {
        let d = CircleDiffOp::derivative(2, 4).unwrap();
        let s = CircleDiffOp::sin(2, 4, 1).unwrap();
        let expected = CircleDiffOp::cos(2, 4, 1)
            .unwrap()
            .with_term(1, &[(1, c(0.0, -0.5)), (-1, c(0.0, 0.5))])
            .unwrap();
        assert_eq!(d.compose(&s).unwrap(), expected);
    }

    #[test]
    fn order_overflow_is_an_error() {
        let d = CircleDiffOp::derivative(1, 2).unwrap();
        assert!(matches!(d.compose(&d), Err(Error::Overflow(_))));
    }

    #[test]
    fn mode_overflow_is_an_error() {
        let e1 = CircleDiffOp::multiplication(0, 1, &[(1, c(1.0, 0.0))]).unwrap();
        assert!(matches!(e1.compose(&e1), Err(Error::Overflow(_))));
        let em1 = CircleDiffOp::multiplication(0, 1, &[(-1, c(1.0, 0.0))]).unwrap();
        assert_eq!(e1.compose(&em1).unwrap(), CircleDiffOp::identity(0, 1));
    }

    #[test]
    fn order_of_product_adds_for_nonvanishing_leading_terms() {
        let d = CircleDiffOp::derivative(4, 3).unwrap();
        let a = CircleDiffOp::cos(4, 3, 1).unwrap().compose(&d).unwrap();
        let b = d.compose(&d).unwrap();
        assert_eq!(a.order(), Some(1));
        assert_eq!(b.order(), Some(2));
        assert_eq!(a.compose(&b).unwrap().order(), Some(3));
        assert_eq!(CircleDiffOp::zero(4, 3).order(), None);
    }

    #[test]
    fn coefficient_lookup_outside_window_is_zero() {
        let s = CircleDiffOp::sin(1, 2, 1).unwrap();
        assert_eq!(s.coefficient(0, 1), c(0.0, -0.5));
        assert_eq!(s.coefficient(0, 7), ZERO);
        assert_eq!(s.coefficient(5, 0), ZERO);
    }
}

//! Seeded random elements for property checks and self-tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraDescriptor, AlgebraElement, CircleDiffOp, Matrix, ScalarField};
use crate::dyson::OperatorPath;
use crate::series::GradedSeries;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with entries uniform in `[−scale, scale]` (real and imaginary
/// parts independently for the complex field).
pub fn matrix(rng: &mut SampleRng, n: usize, field: ScalarField, scale: f64) -> AlgebraElement {
    let data = ndarray::Array2::from_shape_fn((n, n), |_| {
        let re = rng.gen_range(-scale..=scale);
        let im = match field {
            ScalarField::Real => 0.0,
            ScalarField::Complex => rng.gen_range(-scale..=scale),
        };
        Complex64::new(re, im)
    });
    Matrix::from_array(data, field).expect("square payload").into()
}

/// Differential operator of order at most `order` whose coefficients use
/// modes `|m| ≤ modes_used`, inside a `(max_order, modes)` window.
pub fn diffop(
    rng: &mut SampleRng,
    max_order: usize,
    modes: usize,
    order: usize,
    modes_used: usize,
    scale: f64,
) -> AlgebraElement {
    let mut op = CircleDiffOp::zero(max_order, modes);
    for j in 0..=order.min(max_order) {
        let fourier: Vec<(i64, Complex64)> = (-(modes_used as i64)..=modes_used as i64)
            .map(|m| {
                (
                    m,
                    Complex64::new(
                        rng.gen_range(-scale..=scale),
                        rng.gen_range(-scale..=scale),
                    ),
                )
            })
            .collect();
        op = op.with_term(j, &fourier).expect("inside window");
    }
    op.into()
}

/// Random element of a matrix descriptor.
pub fn element(rng: &mut SampleRng, desc: &AlgebraDescriptor, scale: f64) -> AlgebraElement {
    match *desc {
        AlgebraDescriptor::Matrix { n, field } => matrix(rng, n, field, scale),
        AlgebraDescriptor::CircleDiffOp { max_order, modes } => {
            diffop(rng, max_order, modes, max_order.min(1), modes.min(1), scale)
        }
    }
}

/// Random series with zero coefficients below `min_grade`.
pub fn series(
    rng: &mut SampleRng,
    desc: &AlgebraDescriptor,
    order: usize,
    min_grade: usize,
    scale: f64,
) -> GradedSeries {
    let coeffs = (0..=order)
        .map(|n| {
            if n < min_grade {
                AlgebraElement::zero(desc)
            } else {
                element(rng, desc, scale)
            }
        })
        .collect();
    GradedSeries::from_coefficients(coeffs).expect("shared descriptor")
}

/// Random polynomial path of the given degree.
pub fn path(rng: &mut SampleRng, desc: &AlgebraDescriptor, degree: usize, scale: f64) -> OperatorPath {
    OperatorPath::polynomial((0..=degree).map(|_| element(rng, desc, scale)).collect())
        .expect("shared descriptor")
}

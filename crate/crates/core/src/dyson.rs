//! Time-ordered exponentials of q-scaled operator paths.
//!
//! For a path `P` and scaling `q0`, the group-valued path
//! `g(t) = Σ_i q^i A_i(t)` solves `g' = q·P(q0 t)·g`, `g(0) = 1`. Its grade-`i`
//! coefficient is the iterated simplex integral
//! `A_i(t) = ∫_{t ≥ s_1 ≥ … ≥ s_i ≥ 0} P(q0 s_1)…P(q0 s_i) ds`, obtained from
//! the triangular system `A_0 ≡ 1`, `A_i' = P(q0 t) A_{i−1}`, `A_i(0) = 0`.
//! The formal marker `q` only tracks the grade; the numeric `q0` enters
//! through the time argument of `P`.

use crate::algebra::{AlgebraDescriptor, AlgebraElement};
use crate::error::{Error, Result};
use crate::series::GradedSeries;

/// Largest polynomial degree accepted for an [`OperatorPath`].
pub const MAX_PATH_DEGREE: usize = 16;

/// Uniform grid `t_k = k·h`, `k = 0..=steps`, covering `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    step: f64,
    steps: usize,
}

impl TimeGrid {
    /// `T / h` must be an integer up to `1e-9` relative slack.
    pub fn new(step: f64, horizon: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(format!("step h = {step} must be > 0")));
        }
        if !(horizon >= step && horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "horizon T = {horizon} must be ≥ h = {step}"
            )));
        }
        let ratio = horizon / step;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 * ratio {
            return Err(Error::InvalidParameter(format!(
                "horizon T = {horizon} is not a multiple of h = {step}"
            )));
        }
        Ok(TimeGrid {
            step,
            steps: steps as usize,
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.time(self.steps)
    }

    pub fn nodes(&self) -> usize {
        self.steps + 1
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.step
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.nodes()).map(|k| self.time(k)).collect()
    }
}

/// Polynomial operator path `P(t) = Σ_k t^k C_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPath {
    descriptor: AlgebraDescriptor,
    coefficients: Vec<AlgebraElement>,
}

impl OperatorPath {
    pub fn constant(a: AlgebraElement) -> Self {
        OperatorPath {
            descriptor: a.descriptor(),
            coefficients: vec![a],
        }
    }

    pub fn zero(descriptor: &AlgebraDescriptor) -> Self {
        Self::constant(AlgebraElement::zero(descriptor))
    }

    pub fn polynomial(coefficients: Vec<AlgebraElement>) -> Result<Self> {
        let first = coefficients
            .first()
            .ok_or_else(|| Error::InvalidParameter("polynomial path needs a coefficient".into()))?;
        if coefficients.len() > MAX_PATH_DEGREE + 1 {
            return Err(Error::InvalidParameter(format!(
                "path degree {} exceeds cap {MAX_PATH_DEGREE}",
                coefficients.len() - 1
            )));
        }
        let descriptor = first.descriptor();
        for c in &coefficients {
            let d = c.descriptor();
            if d != descriptor {
                return Err(Error::shape(&descriptor, &d));
            }
        }
        Ok(OperatorPath {
            descriptor,
            coefficients,
        })
    }

    pub fn descriptor(&self) -> &AlgebraDescriptor {
        &self.descriptor
    }

    pub fn coefficients(&self) -> &[AlgebraElement] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(AlgebraElement::is_zero)
    }

    /// `P(t)` by Horner evaluation. Constant paths return `C_0` untouched.
    pub fn eval(&self, t: f64) -> AlgebraElement {
        let mut acc = self.coefficients[self.degree()].clone();
        for c in self.coefficients.iter().rev().skip(1) {
            let mut next = c.clone();
            next.axpy(t, &acc).expect("coefficients share a descriptor");
            acc = next;
        }
        acc
    }

    /// Applies a linear map coefficient-wise, e.g. `C ↦ ad_C`.
    pub fn map_linear<F>(&self, f: F) -> Result<OperatorPath>
    where
        F: Fn(&AlgebraElement) -> Result<AlgebraElement>,
    {
        OperatorPath::polynomial(self.coefficients.iter().map(f).collect::<Result<_>>()?)
    }

    /// Largest `‖P(t)‖` over the grid nodes of `[0, T]`, read at times `q0·t`.
    pub fn sup_norm(&self, q0: f64, grid: &TimeGrid) -> f64 {
        (0..grid.nodes())
            .map(|k| self.eval(q0 * grid.time(k)).norm())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn check_q0(q0: f64) -> Result<()> {
    if q0 > 0.0 && q0 <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("scaling q0 = {q0} must lie in (0, 1]")))
    }
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        Err(Error::InvalidParameter("truncation order N must be ≥ 1".into()))
    } else {
        Ok(())
    }
}

/// The numerically scaled path `t ↦ q0·P(q0 t)`.
pub fn scaling_transform(path: &OperatorPath, q0: f64) -> Result<OperatorPath> {
    check_q0(q0)?;
    let mut factor = q0;
    let mut coefficients = Vec::with_capacity(path.coefficients.len());
    for c in &path.coefficients {
        coefficients.push(c.scale(factor));
        factor *= q0;
    }
    OperatorPath::polynomial(coefficients)
}

/// Per-grade maxima of some diagnostic norm.
#[derive(Debug, Clone, PartialEq)]
pub struct GradeProfile(pub Vec<f64>);

impl GradeProfile {
    pub fn zeros(order: usize) -> Self {
        GradeProfile(vec![0.0; order + 1])
    }

    pub fn grades(&self) -> &[f64] {
        &self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// Grade-wise maximum of two profiles.
    pub fn combine(&mut self, other: &[f64]) {
        for (a, b) in self.0.iter_mut().zip(other) {
            *a = a.max(*b);
        }
    }

    pub(crate) fn from_rows(order: usize, rows: impl IntoIterator<Item = Vec<f64>>) -> Self {
        let mut p = Self::zeros(order);
        for r in rows {
            p.combine(&r);
        }
        p
    }
}

/// Classical fourth-order Runge–Kutta on a series-valued ODE `Y' = F(t, Y)`.
/// Returns the state at every grid node.
pub(crate) fn integrate_series<F>(
    initial: GradedSeries,
    grid: &TimeGrid,
    rhs: F,
) -> Result<Vec<GradedSeries>>
where
    F: Fn(f64, &GradedSeries) -> Result<GradedSeries>,
{
    let h = grid.step();
    let mut out = Vec::with_capacity(grid.nodes());
    let mut y = initial;
    out.push(y.clone());
    for k in 0..grid.steps() {
        let t = grid.time(k);
        let k1 = rhs(t, &y)?;
        let mut y2 = y.clone();
        y2.axpy(0.5 * h, &k1)?;
        let k2 = rhs(t + 0.5 * h, &y2)?;
        let mut y3 = y.clone();
        y3.axpy(0.5 * h, &k2)?;
        let k3 = rhs(t + 0.5 * h, &y3)?;
        let mut y4 = y.clone();
        y4.axpy(h, &k3)?;
        let k4 = rhs(t + h, &y4)?;
        y.axpy(h / 6.0, &k1)?;
        y.axpy(h / 3.0, &k2)?;
        y.axpy(h / 3.0, &k3)?;
        y.axpy(h / 6.0, &k4)?;
        out.push(y.clone());
    }
    Ok(out)
}

/// Centered difference `(Y_{k+1} − Y_{k−1}) / 2h` at an interior node.
pub(crate) fn centered_difference(values: &[GradedSeries], k: usize, h: f64) -> Result<GradedSeries> {
    Ok(values[k + 1].sub(&values[k - 1])?.scale(0.5 / h))
}

/// Right-hand side `q·A(q0 t)·Y`, i.e. `(out)_i = A(q0 t) Y_{i−1}`.
pub(crate) fn left_generator_rhs(a: &AlgebraElement, y: &GradedSeries) -> Result<GradedSeries> {
    let order = y.order();
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(AlgebraElement::zero(y.descriptor()));
    for c in y.coeffs().iter().take(order) {
        coeffs.push(a.mul(c)?);
    }
    GradedSeries::from_coefficients(coeffs)
}

/// Group-valued series path `t ↦ g(t) ∈ 1 + q·A[[q]]` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSeriesPath {
    pub grid: TimeGrid,
    pub q0: f64,
    pub order: usize,
    pub values: Vec<GradedSeries>,
}

impl GroupSeriesPath {
    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }
}

/// Grade-by-grade time-ordered exponential of `q·P(q0 ·)`.
pub fn time_ordered_exp(
    path: &OperatorPath,
    q0: f64,
    order: usize,
    grid: &TimeGrid,
) -> Result<GroupSeriesPath> {
    check_q0(q0)?;
    check_order(order)?;
    let unit = GradedSeries::unit(path.descriptor(), order);
    let values = integrate_series(unit, grid, |t, y| left_generator_rhs(&path.eval(q0 * t), y))?;
    Ok(GroupSeriesPath {
        grid: *grid,
        q0,
        order,
        values,
    })
}

/// Residual of the left logarithmic derivative equation `g' g⁻¹ = q·P(q0 t)`
/// by centered differences; per-grade maximum over interior nodes.
pub fn left_log_derivative_residual(
    g: &GroupSeriesPath,
    path: &OperatorPath,
    q0: f64,
) -> Result<GradeProfile> {
    if g.values.len() < 3 {
        return Err(Error::InvalidParameter(
            "residual needs at least 3 grid nodes".into(),
        ));
    }
    let h = g.grid.step();
    let rows = crate::par::try_map_range(g.values.len() - 2, |i| {
        let k = i + 1;
        let dg = centered_difference(&g.values, k, h)?;
        let generator = GradedSeries::monomial(path.eval(q0 * g.grid.time(k)), 1, g.order)?;
        Ok::<_, Error>(dg.mul(&g.values[k].inv()?)?.sub(&generator)?.grade_norms())
    })?;
    Ok(GradeProfile::from_rows(g.order, rows))
}

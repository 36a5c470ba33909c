//! Formal integration of the q-scaled Lax equation
//! `∂_t L_q = [q·P(q0 t), L_q]`, `L_q(0) = L0`, by conjugation
//! `L_q(t) = g(t)·L0·g(t)⁻¹` with `g` the time-ordered exponential.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::algebra::{AlgebraElement, Matrix, ScalarField};
use crate::dyson::{
    centered_difference, check_order, check_q0, integrate_series, time_ordered_exp, GradeProfile,
    GroupSeriesPath, OperatorPath, TimeGrid,
};
use crate::error::{Error, Result};
use crate::par;
use crate::series::GradedSeries;

/// Built-in desk-scale Lax pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// `P = E12`, `L0 = E21`; the series terminates at grade 2.
    Sl2Nilpotent,
    /// Open 3-site Toda: symmetric tridiagonal `L0`, `P` its skew part
    /// `L0₊ − L0₋`.
    Toda3,
    /// `P(t) = (1/2 + t/4)·J` with `J` the rotation generator, commuting in time.
    Rotation2,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Sl2Nilpotent, Preset::Toda3, Preset::Rotation2];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Sl2Nilpotent => "sl2-nilpotent",
            Preset::Toda3 => "toda-3",
            Preset::Rotation2 => "rotation-2",
        }
    }

    /// Initial value and path of the preset.
    pub fn data(self) -> (AlgebraElement, OperatorPath) {
        let real = |rows: &[&[f64]]| -> AlgebraElement {
            Matrix::from_real_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
                .expect("preset payloads are square")
                .into()
        };
        match self {
            Preset::Sl2Nilpotent => (
                Matrix::unit(2, 1, 0, ScalarField::Real).into(),
                OperatorPath::constant(Matrix::unit(2, 0, 1, ScalarField::Real).into()),
            ),
            Preset::Toda3 => {
                let (a1, a2) = (0.5, 0.35);
                let l0 = real(&[&[0.8, a1, 0.0], &[a1, 0.0, a2], &[0.0, a2, -0.6]]);
                let p = real(&[&[0.0, a1, 0.0], &[-a1, 0.0, a2], &[0.0, -a2, 0.0]]);
                (l0, OperatorPath::constant(p))
            }
            Preset::Rotation2 => {
                let l0 = real(&[&[1.0, 0.5], &[0.5, -1.0]]);
                let j = real(&[&[0.0, -1.0], &[1.0, 0.0]]);
                let path = OperatorPath::polynomial(vec![j.scale(0.5), j.scale(0.25)])
                    .expect("same descriptor");
                (l0, path)
            }
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown preset {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaxProblem {
    pub l0: AlgebraElement,
    pub path: OperatorPath,
    pub q0: f64,
    pub order: usize,
    pub grid: TimeGrid,
}

impl LaxProblem {
    pub fn new(
        l0: AlgebraElement,
        path: OperatorPath,
        q0: f64,
        order: usize,
        grid: TimeGrid,
    ) -> Result<Self> {
        let p = LaxProblem {
            l0,
            path,
            q0,
            order,
            grid,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_preset(preset: Preset, q0: f64, order: usize, grid: TimeGrid) -> Result<Self> {
        let (l0, path) = preset.data();
        Self::new(l0, path, q0, order, grid)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.l0.descriptor();
        if &d != self.path.descriptor() {
            return Err(Error::shape(&d, self.path.descriptor()));
        }
        check_q0(self.q0)?;
        check_order(self.order)
    }

    pub fn with_q0(&self, q0: f64) -> Result<Self> {
        let mut p = self.clone();
        p.q0 = q0;
        p.validate()?;
        Ok(p)
    }

    pub fn with_initial(&self, l0: AlgebraElement) -> Result<Self> {
        let mut p = self.clone();
        p.l0 = l0;
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaxFlowResult {
    pub problem: LaxProblem,
    pub group: GroupSeriesPath,
    /// `L_q(t_k)` at every grid node.
    pub values: Vec<GradedSeries>,
}

impl LaxFlowResult {
    pub fn evaluated(&self, q0: f64) -> Vec<AlgebraElement> {
        self.values.iter().map(|v| v.evaluate(q0)).collect()
    }
}

/// `g·X·g⁻¹` at every node, for a grade-0 element `X`.
pub(crate) fn conjugate_along(g: &GroupSeriesPath, x: &AlgebraElement) -> Result<Vec<GradedSeries>> {
    par::try_map_slice(&g.values, |gk| gk.right_mul_element(x)?.mul(&gk.inv()?))
}

pub fn solve_lax(problem: &LaxProblem) -> Result<LaxFlowResult> {
    problem.validate()?;
    let group = time_ordered_exp(&problem.path, problem.q0, problem.order, &problem.grid)?;
    let values = conjugate_along(&group, &problem.l0)?;
    Ok(LaxFlowResult {
        problem: problem.clone(),
        group,
        values,
    })
}

/// Centered-difference residual of `∂_t Y = [q·A(q0 t), Y]` along a series
/// path; per-grade maximum over interior nodes.
pub(crate) fn bracket_flow_residual(
    values: &[GradedSeries],
    grid: &TimeGrid,
    path: &OperatorPath,
    q0: f64,
) -> Result<GradeProfile> {
    if values.len() < 3 {
        return Err(Error::InvalidParameter(
            "residual needs at least 3 grid nodes".into(),
        ));
    }
    let order = values[0].order();
    let h = grid.step();
    let rows = par::try_map_range(values.len() - 2, |i| {
        let k = i + 1;
        let dy = centered_difference(values, k, h)?;
        let bracket = bracket_rhs(&path.eval(q0 * grid.time(k)), &values[k])?;
        Ok::<_, Error>(dy.sub(&bracket)?.grade_norms())
    })?;
    Ok(GradeProfile::from_rows(order, rows))
}

/// `q·[A, Y]`: grade `i` holds `[A, Y_{i−1}]`.
pub(crate) fn bracket_rhs(a: &AlgebraElement, y: &GradedSeries) -> Result<GradedSeries> {
    let order = y.order();
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(AlgebraElement::zero(y.descriptor()));
    for c in y.coeffs().iter().take(order) {
        coeffs.push(a.commutator(c)?);
    }
    GradedSeries::from_coefficients(coeffs)
}

/// Residual of the scaled Lax equation on a computed flow.
pub fn lax_residual(result: &LaxFlowResult) -> Result<GradeProfile> {
    let p = &result.problem;
    bracket_flow_residual(&result.values, &p.grid, &p.path, p.q0)
}

/// Second solver: integrates the scaled Lax equation directly as the
/// triangular system `(L_q)_0 ≡ L0`, `(L_q)_n' = [P(q0 t), (L_q)_{n−1}]`.
pub fn integrate_lax_directly(problem: &LaxProblem) -> Result<Vec<GradedSeries>> {
    problem.validate()?;
    let initial = GradedSeries::constant(problem.l0.clone(), problem.order);
    integrate_series(initial, &problem.grid, |t, y| {
        bracket_rhs(&problem.path.eval(problem.q0 * t), y)
    })
}

/// Per-grade maximum distance between the conjugation solution and the
/// direct integration.
pub fn uniqueness_discrepancy(result: &LaxFlowResult) -> Result<GradeProfile> {
    let direct = integrate_lax_directly(&result.problem)?;
    let rows = result
        .values
        .iter()
        .zip(&direct)
        .map(|(a, b)| a.distances(b))
        .collect::<Result<Vec<_>>>()?;
    Ok(GradeProfile::from_rows(result.problem.order, rows))
}

/// Grade-wise values of `trace(L_q(t)^k)` and their drift from `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceDrift {
    pub power: usize,
    /// Grade-`n` coefficient of `trace(L_q(0)^k)`.
    pub initial: Vec<Complex64>,
    /// `max_t |tr_n(t) − tr_n(0)|` per grade.
    pub drift: GradeProfile,
}

pub fn conserved_traces(result: &LaxFlowResult, power: usize) -> Result<TraceDrift> {
    result
        .problem
        .l0
        .descriptor()
        .matrix_dim("conserved_traces")?;
    let order = result.problem.order;
    let traces = par::try_map_slice(&result.values, |v| {
        v.pow(power)?
            .coeffs()
            .iter()
            .map(AlgebraElement::trace)
            .collect::<Result<Vec<_>>>()
    })?;
    let initial = traces[0].clone();
    let rows = traces
        .iter()
        .map(|tr| tr.iter().zip(&initial).map(|(a, b)| (a - b).norm()).collect());
    let drift = GradeProfile::from_rows(order, rows);
    Ok(TraceDrift {
        power,
        initial,
        drift,
    })
}

/// Direct dense integration of `L' = [q0·P(q0 t), L]` with classical RK4 at
/// the problem's step; the value at every node.
pub fn integrate_dense_oracle(problem: &LaxProblem) -> Result<Vec<AlgebraElement>> {
    problem.l0.descriptor().matrix_dim("oracle_integrate")?;
    let q0 = problem.q0;
    let f = |t: f64, l: &AlgebraElement| -> Result<AlgebraElement> {
        problem.path.eval(q0 * t).scale(q0).commutator(l)
    };
    let grid = &problem.grid;
    let h = grid.step();
    let mut y = problem.l0.clone();
    let mut out = Vec::with_capacity(grid.nodes());
    out.push(y.clone());
    for k in 0..grid.steps() {
        let t = grid.time(k);
        let k1 = f(t, &y)?;
        let mut y2 = y.clone();
        y2.axpy(0.5 * h, &k1)?;
        let k2 = f(t + 0.5 * h, &y2)?;
        let mut y3 = y.clone();
        y3.axpy(0.5 * h, &k2)?;
        let k3 = f(t + 0.5 * h, &y3)?;
        let mut y4 = y.clone();
        y4.axpy(h, &k3)?;
        let k4 = f(t + h, &y4)?;
        y.axpy(h / 6.0, &k1)?;
        y.axpy(h / 3.0, &k2)?;
        y.axpy(h / 3.0, &k3)?;
        y.axpy(h / 6.0, &k4)?;
        out.push(y.clone());
    }
    Ok(out)
}

/// `max_t ‖evaluate(L_q(t), q0) − L_oracle(t)‖`.
pub fn oracle_error(result: &LaxFlowResult) -> Result<f64> {
    let oracle = integrate_dense_oracle(&result.problem)?;
    let q0 = result.problem.q0;
    result
        .values
        .iter()
        .zip(&oracle)
        .try_fold(0.0f64, |worst, (s, o)| Ok(worst.max(s.evaluate(q0).sub(o)?.norm())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub q0: f64,
    pub error: f64,
    pub half_error: f64,
    /// `log2(error / half_error)`; about `N + 1` in the asymptotic regime.
    pub log2_ratio: f64,
}

/// Oracle comparison at `q0` and `q0/2`.
pub fn oracle_integrate(problem: &LaxProblem) -> Result<OracleReport> {
    let errors = oracle_errors(problem, &[problem.q0, problem.q0 / 2.0])?;
    Ok(OracleReport {
        q0: problem.q0,
        error: errors[0],
        half_error: errors[1],
        log2_ratio: (errors[0] / errors[1]).log2(),
    })
}

/// Oracle errors for each scaling in `q0s`, one independent solve each.
pub fn oracle_errors(problem: &LaxProblem, q0s: &[f64]) -> Result<Vec<f64>> {
    par::try_map_slice(q0s, |&q0| oracle_error(&solve_lax(&problem.with_q0(q0)?)?))
}

/// A-priori bound on the truncation error of the evaluated series:
/// `‖L0‖ Σ_{n>N} (2 q0 T sup‖P‖)^n / n!`, from the iterated-integral form of
/// the conjugation flow with `‖ad_P‖ ≤ 2‖P‖`.
pub fn truncation_bound(problem: &LaxProblem) -> f64 {
    let rate = 2.0 * problem.q0 * problem.grid.horizon() * problem.path.sup_norm(problem.q0, &problem.grid);
    let mut term = 1.0;
    let mut tail = 0.0;
    for n in 1..=problem.order + 60 {
        term *= rate / n as f64;
        if n > problem.order {
            tail += term;
        }
    }
    problem.l0.norm() * tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraDescriptor;

    fn grid() -> TimeGrid {
        TimeGrid::new(1e-2, 1.0).unwrap()
    }

    #[test]
    fn zero_path_keeps_initial_value() {
        let (l0, _) = Preset::Toda3.data();
        let p = LaxProblem::new(
            l0.clone(),
            OperatorPath::zero(&l0.descriptor()),
            0.5,
            4,
            grid(),
        )
        .unwrap();
        let r = solve_lax(&p).unwrap();
        let expected = GradedSeries::constant(l0, 4);
        assert!(r.values.iter().all(|v| v == &expected));
        assert_eq!(lax_residual(&r).unwrap().max(), 0.0);
        assert_eq!(oracle_integrate(&p).unwrap().error, 0.0);
    }

    #[test]
    fn identity_is_central() {
        let (_, path) = Preset::Toda3.data();
        let one = AlgebraElement::one(path.descriptor());
        let p = LaxProblem::new(one.clone(), path, 0.5, 4, grid()).unwrap();
        let r = solve_lax(&p).unwrap();
        for v in &r.values {
            let d = v.distances(&GradedSeries::constant(one.clone(), 4)).unwrap();
            assert!(d.iter().all(|&x| x < 1e-14), "{d:?}");
        }
    }

    #[test]
    fn validation() {
        let (l0, _) = Preset::Toda3.data();
        let other = OperatorPath::zero(&AlgebraDescriptor::matrix(2));
        assert!(matches!(
            LaxProblem::new(l0.clone(), other, 0.5, 4, grid()),
            Err(Error::ShapeMismatch { .. })
        ));
        let path = OperatorPath::zero(&l0.descriptor());
        assert!(LaxProblem::new(l0.clone(), path.clone(), 0.0, 4, grid()).is_err());
        assert!(LaxProblem::new(l0, path, 0.5, 0, grid()).is_err());
    }

    #[test]
    fn trace_of_first_power_does_not_move() {
        let p = LaxProblem::from_preset(Preset::Toda3, 0.5, 5, grid()).unwrap();
        let r = solve_lax(&p).unwrap();
        let tr = conserved_traces(&r, 1).unwrap();
        assert!(tr.drift.max() < 1e-14);
        assert!((tr.initial[0].re - 0.2).abs() < 1e-15);
        assert!(tr.initial[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("kdv".parse::<Preset>().is_err());
    }

    #[test]
    fn truncation_bound_dominates_oracle_error() {
        let p = LaxProblem::from_preset(Preset::Rotation2, 0.5, 3, grid()).unwrap();
        let r = solve_lax(&p).unwrap();
        let err = oracle_error(&r).unwrap();
        assert!(err > 0.0 && err <= truncation_bound(&p), "{err} vs {}", truncation_bound(&p));
    }
}

//! Symmetry flows: operators on the coefficient algebra evolving by
//! `∂_t S_q = [ad_{P_q}, S_q]`, solved by conjugation with the time-ordered
//! exponential of the path `t ↦ ad_{P(q0 t)}` in the operator algebra.
//!
//! Operators on the `n × n` matrix algebra are stored densely as `n² × n²`
//! matrices acting on row-major vectorizations, for `n ≤ MAX_DENSE_DIM`.

use crate::algebra::{AlgebraDescriptor, AlgebraElement, Matrix};
use crate::dyson::{time_ordered_exp, GradeProfile, GroupSeriesPath, OperatorPath, TimeGrid};
use crate::error::{Error, Result};
use crate::lax::{bracket_flow_residual, conjugate_along, LaxFlowResult};
use crate::par;
use crate::series::GradedSeries;

/// Largest matrix dimension whose operator algebra is stored densely.
pub const MAX_DENSE_DIM: usize = 8;

/// Inner derivation `X ↦ PX − XP`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdOperator {
    generator: AlgebraElement,
    dense: Option<AlgebraElement>,
}

impl AdOperator {
    pub fn new(generator: AlgebraElement) -> Self {
        let dense = dense_ad(&generator).ok();
        AdOperator { generator, dense }
    }

    pub fn generator(&self) -> &AlgebraElement {
        &self.generator
    }

    /// `n² × n²` representation, when the backend and size allow one.
    pub fn dense(&self) -> Option<&AlgebraElement> {
        self.dense.as_ref()
    }

    pub fn apply(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.generator.commutator(x)
    }
}

pub fn ad_operator(p: &AlgebraElement) -> AdOperator {
    AdOperator::new(p.clone())
}

/// Descriptor of the dense operator algebra over a matrix algebra.
pub fn operator_descriptor(desc: &AlgebraDescriptor) -> Result<AlgebraDescriptor> {
    match *desc {
        AlgebraDescriptor::Matrix { n, field } if n <= MAX_DENSE_DIM => {
            Ok(AlgebraDescriptor::Matrix { n: n * n, field })
        }
        AlgebraDescriptor::Matrix { n, .. } => Err(Error::CapabilityMissing(format!(
            "dense operator algebra is limited to n ≤ {MAX_DENSE_DIM}, got n = {n}"
        ))),
        AlgebraDescriptor::CircleDiffOp { .. } => Err(Error::CapabilityMissing(
            "operators on the algebra need the matrix backend".into(),
        )),
    }
}

fn matrix_of<'a>(a: &'a AlgebraElement, what: &str) -> Result<&'a Matrix> {
    a.as_matrix()
        .ok_or_else(|| Error::CapabilityMissing(format!("{what} needs the matrix backend")))
}

/// `ad_P = P ⊗ I − I ⊗ Pᵀ` in the row-major vectorization.
pub fn dense_ad(p: &AlgebraElement) -> Result<AlgebraElement> {
    operator_descriptor(&p.descriptor())?;
    let m = matrix_of(p, "ad")?;
    let eye = Matrix::identity(m.n(), m.field());
    let left = AlgebraElement::from(m.kron(&eye));
    let right = AlgebraElement::from(eye.kron(&m.transpose()));
    left.sub(&right)
}

/// Left multiplication `X ↦ MX` as a dense operator.
pub fn left_multiplication(m: &AlgebraElement) -> Result<AlgebraElement> {
    operator_descriptor(&m.descriptor())?;
    let m = matrix_of(m, "left multiplication")?;
    Ok(m.kron(&Matrix::identity(m.n(), m.field())).into())
}

/// The identity operator on the algebra described by `desc`.
pub fn identity_operator(desc: &AlgebraDescriptor) -> Result<AlgebraElement> {
    Ok(AlgebraElement::one(&operator_descriptor(desc)?))
}

/// Applies a dense operator to an algebra element.
pub fn apply_operator(s: &AlgebraElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    let expected = operator_descriptor(&x.descriptor())?;
    if s.descriptor() != expected {
        return Err(Error::shape(&expected, &s.descriptor()));
    }
    let (s, x) = (matrix_of(s, "operator")?, matrix_of(x, "operator")?);
    Ok(s.apply_to_vectorized(x).into())
}

/// Graded application `(S·L)_n = Σ_{i+j=n} S_i(L_j)`.
pub fn apply_operator_series(s: &GradedSeries, l: &GradedSeries) -> Result<GradedSeries> {
    if s.order() != l.order() {
        return Err(Error::OrderMismatch {
            left: s.order(),
            right: l.order(),
        });
    }
    let order = l.order();
    let mut out = GradedSeries::zero(l.descriptor(), order);
    let mut coeffs: Vec<AlgebraElement> = out.coeffs().to_vec();
    for (i, si) in s.coeffs().iter().enumerate() {
        if si.is_zero() {
            continue;
        }
        for (j, lj) in l.coeffs().iter().take(order + 1 - i).enumerate() {
            coeffs[i + j].axpy(1.0, &apply_operator(si, lj)?)?;
        }
    }
    for (n, c) in coeffs.into_iter().enumerate() {
        out.set_coeff(n, c)?;
    }
    Ok(out)
}

/// `t ↦ ad_{P(t)}`, coefficient-wise since `ad` is linear.
pub fn ad_path(path: &OperatorPath) -> Result<OperatorPath> {
    path.map_linear(dense_ad)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryFlowResult {
    pub s0: AlgebraElement,
    pub path: OperatorPath,
    pub ad_path: OperatorPath,
    pub q0: f64,
    pub order: usize,
    pub grid: TimeGrid,
    /// Time-ordered exponential of the `ad` path.
    pub group: GroupSeriesPath,
    /// `S_q(t_k)` at every node, as operator-valued series.
    pub values: Vec<GradedSeries>,
}

/// `S_q(t) = Exp(ad_{P_q})(t) · S0 · Exp(ad_{P_q})(t)⁻¹`.
pub fn solve_symmetry(
    s0: &AlgebraElement,
    path: &OperatorPath,
    q0: f64,
    order: usize,
    grid: &TimeGrid,
) -> Result<SymmetryFlowResult> {
    let op_desc = operator_descriptor(path.descriptor())?;
    if s0.descriptor() != op_desc {
        return Err(Error::shape(&op_desc, &s0.descriptor()));
    }
    let ad_path = ad_path(path)?;
    let group = time_ordered_exp(&ad_path, q0, order, grid)?;
    let values = conjugate_along(&group, s0)?;
    Ok(SymmetryFlowResult {
        s0: s0.clone(),
        path: path.clone(),
        ad_path,
        q0,
        order,
        grid: *grid,
        group,
        values,
    })
}

/// Residual of `∂_t S_q = [q·ad_{P(q0 t)}, S_q]` on a computed flow.
pub fn symmetry_residual(result: &SymmetryFlowResult) -> Result<GradeProfile> {
    bracket_flow_residual(&result.values, &result.grid, &result.ad_path, result.q0)
}

/// Compares `g X g⁻¹` (group path in the algebra) with the operator-algebra
/// exponential of the `ad` path applied to `X`; per-grade maximum over nodes.
pub fn check_ad_exp_ad(
    path: &OperatorPath,
    q0: f64,
    order: usize,
    grid: &TimeGrid,
    x: &AlgebraElement,
) -> Result<GradeProfile> {
    let g = time_ordered_exp(path, q0, order, grid)?;
    let big = time_ordered_exp(&ad_path(path)?, q0, order, grid)?;
    let conjugated = conjugate_along(&g, x)?;
    let x_series = GradedSeries::constant(x.clone(), order);
    let rows = par::try_map_range(g.values.len(), |k| {
        let pushed = apply_operator_series(&big.values[k], &x_series)?;
        conjugated[k].distances(&pushed)
    })?;
    Ok(GradeProfile::from_rows(order, rows))
}

fn check_compatible(s: &SymmetryFlowResult, l: &LaxFlowResult) -> Result<()> {
    let p = &l.problem;
    if s.grid != p.grid || s.values.len() != l.values.len() {
        return Err(Error::InvalidParameter("symmetry and Lax grids differ".into()));
    }
    if s.q0 != p.q0 || s.order != p.order {
        return Err(Error::InvalidParameter(
            "symmetry and Lax flows use different q0 or truncation order".into(),
        ));
    }
    if s.path != p.path {
        return Err(Error::InvalidParameter(
            "symmetry and Lax flows use different paths".into(),
        ));
    }
    Ok(())
}

/// `φ_q(S) = (∂_t S_q)·L_q − [q·ad_{P(q0 t)}, S_q]·L_q` along the Lax flow,
/// by centered differences; per-grade maximum over interior nodes.
pub fn symmetry_residual_full(s: &SymmetryFlowResult, l: &LaxFlowResult) -> Result<GradeProfile> {
    check_compatible(s, l)?;
    phi_q_residual(&s.values, &s.ad_path, l)
}

/// `φ_q` for an arbitrary operator-valued series path on the Lax grid.
pub fn phi_q_residual(
    s_values: &[GradedSeries],
    ad_path: &OperatorPath,
    l: &LaxFlowResult,
) -> Result<GradeProfile> {
    let p = &l.problem;
    if s_values.len() != l.values.len() || s_values.len() < 3 {
        return Err(Error::InvalidParameter(
            "φ_q needs matching grids with at least 3 nodes".into(),
        ));
    }
    let h = p.grid.step();
    let rows = par::try_map_range(s_values.len() - 2, |i| {
        let k = i + 1;
        let ds = crate::dyson::centered_difference(s_values, k, h)?;
        let bracket = crate::lax::bracket_rhs(&ad_path.eval(p.q0 * p.grid.time(k)), &s_values[k])?;
        let phi = apply_operator_series(&ds.sub(&bracket)?, &l.values[k])?;
        Ok::<_, Error>(phi.grade_norms())
    })?;
    Ok(GradeProfile::from_rows(p.order, rows))
}

/// Per-grade distance between `S_q(t)` and `ad_{L_q(t)}`.
pub fn equivariance_discrepancy(s: &SymmetryFlowResult, l: &LaxFlowResult) -> Result<GradeProfile> {
    check_compatible(s, l)?;
    let rows = par::try_map_range(s.values.len(), |k| {
        let ad_l = l.values[k]
            .coeffs()
            .iter()
            .map(dense_ad)
            .collect::<Result<Vec<_>>>()?;
        s.values[k].distances(&GradedSeries::from_coefficients(ad_l)?)
    })?;
    Ok(GradeProfile::from_rows(s.order, rows))
}

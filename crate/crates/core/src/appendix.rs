//! Numeric study of the path `c_t` in the group of diffeomorphisms of
//! `]0;1[` built from a polynomial `P`:
//! `φ(t,x) = P(x) t / ((1 − P(x)) t + P(x))`,
//! `c_t(x) = x + φ(t,x)` for `t ≥ 0` and `x − φ(−t,x)` for `t < 0`.

use crate::error::{Error, Result};
use crate::par;

/// Tolerance added to the derivative bounds to absorb finite-difference error.
pub const DERIVATIVE_FD_TOLERANCE: f64 = 1e-6;
/// Base step of the one-sided time differences at `t = 0`.
pub const VELOCITY_STEP: f64 = 1e-5;
const RICHARDSON_LEVELS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct AppendixModel {
    /// Coefficients of `P` in ascending powers of `x`.
    pub poly: Vec<f64>,
    /// Margin excluding the open endpoints.
    pub epsilon: f64,
    /// Number of uniform grid points on `[ε, 1 − ε]`.
    pub points: usize,
}

impl Default for AppendixModel {
    /// `P(x) = (x − x²)/2` on 2001 points with margin `1e-3`.
    fn default() -> Self {
        AppendixModel {
            poly: vec![0.0, 0.5, -0.5],
            epsilon: 1e-3,
            points: 2001,
        }
    }
}

impl AppendixModel {
    pub fn p(&self, x: f64) -> f64 {
        self.poly.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn dp(&self, x: f64) -> f64 {
        self.poly
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c)
    }

    pub fn grid(&self) -> Vec<f64> {
        let span = 1.0 - 2.0 * self.epsilon;
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.epsilon + span * i as f64 / last)
            .collect()
    }

    fn grid_spacing(&self) -> f64 {
        (1.0 - 2.0 * self.epsilon) / (self.points - 1) as f64
    }

    /// Checks `P(0) = P(1) = 0`, `0 < P < min(x, 1 − x)` and `|P'| < 1` on the
    /// grid.
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) || self.points < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid needs 0 < ε < 1/2 and ≥ 3 points, got ε = {}, {} points",
                self.epsilon, self.points
            )));
        }
        if self.poly.is_empty() {
            return Err(Error::InvalidParameter("P has no coefficients".into()));
        }
        for end in [0.0, 1.0] {
            if self.p(end).abs() > 1e-12 {
                return Err(Error::Domain(format!("P({end}) = {} ≠ 0", self.p(end))));
            }
        }
        for x in self.grid() {
            let p = self.p(x);
            if !(p > 0.0 && p < x.min(1.0 - x)) {
                return Err(Error::Domain(format!(
                    "0 < P(x) < min(x, 1 − x) fails at x = {x}: P = {p}"
                )));
            }
            if self.dp(x).abs() >= 1.0 {
                return Err(Error::Domain(format!(
                    "|P'(x)| < 1 fails at x = {x}: P' = {}",
                    self.dp(x)
                )));
            }
        }
        Ok(())
    }

    pub fn phi(&self, t: f64, x: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!("φ needs t ≥ 0, got {t}")));
        }
        let p = self.p(x);
        let denom = (1.0 - p) * t + p;
        if denom <= 0.0 {
            return Err(Error::Domain(format!(
                "φ denominator {denom} ≤ 0 at t = {t}, x = {x}"
            )));
        }
        Ok(p * t / denom)
    }

    pub fn c_path(&self, t: f64, x: f64) -> Result<f64> {
        if t.abs() >= 1.0 {
            return Err(Error::Domain(format!("c_t needs |t| < 1, got {t}")));
        }
        if t >= 0.0 {
            Ok(x + self.phi(t, x)?)
        } else {
            Ok(x - self.phi(-t, x)?)
        }
    }

    /// `∂_t c_t(x)`, branch by branch.
    pub fn velocity(&self, t: f64, x: f64) -> f64 {
        let p = self.p(x);
        let s = t.abs();
        (p / ((1.0 - p) * s + p)).powi(2)
    }

    /// Checks `0 < x − P < c_t < x + P < 1` and
    /// `1 − |P'| ≤ ∂_x c_t ≤ 1 + |P'|` (centered differences at the grid
    /// spacing, with [`DERIVATIVE_FD_TOLERANCE`]) at every grid point.
    pub fn verify_diffeo_bounds(&self, t: f64) -> Result<BoundsReport> {
        self.validate()?;
        let dx = self.grid_spacing();
        let rows = par::try_map_slice(&self.grid(), |&x| {
            let p = self.p(x);
            let c = self.c_path(t, x)?;
            let (lo, hi) = (x - p, x + p);
            let value_ok = 0.0 < lo && lo < c && c < hi && hi < 1.0;
            let value_slack = (c - lo).min(hi - c).min(lo).min(1.0 - hi);
            let dc = (self.c_path(t, x + dx)? - self.c_path(t, x - dx)?) / (2.0 * dx);
            let bound = self.dp(x).abs();
            let deriv_slack = (dc - (1.0 - bound)).min((1.0 + bound) - dc);
            let deriv_ok = deriv_slack >= -DERIVATIVE_FD_TOLERANCE;
            Ok::<_, Error>((value_ok, value_slack, deriv_ok, deriv_slack))
        })?;
        let mut report = BoundsReport {
            t,
            points: rows.len(),
            value_violations: 0,
            derivative_violations: 0,
            min_value_slack: f64::INFINITY,
            min_derivative_slack: f64::INFINITY,
        };
        for (vok, vs, dok, ds) in rows {
            report.value_violations += usize::from(!vok);
            report.derivative_violations += usize::from(!dok);
            report.min_value_slack = report.min_value_slack.min(vs);
            report.min_derivative_slack = report.min_derivative_slack.min(ds);
        }
        Ok(report)
    }

    /// Derivative of `c_t` in `t` at `t = 0`, from the analytic formula and
    /// from one-sided Richardson-extrapolated differences on each branch.
    ///
    /// `c_t` is only `C¹` at `t = 0` (its second derivative jumps sign), so a
    /// centered difference across `t = 0` is first-order accurate; each
    /// branch is smooth on its own side.
    pub fn velocity_at_zero(&self) -> Result<VelocityReport> {
        self.validate()?;
        let rows = par::try_map_slice(&self.grid(), |&x| {
            let c0 = self.c_path(0.0, x)?;
            let forward = richardson(|d| Ok((self.c_path(d, x)? - c0) / d))?;
            let backward = richardson(|d| Ok((c0 - self.c_path(-d, x)?) / d))?;
            Ok::<_, Error>((
                (self.velocity(0.0, x) - 1.0).abs(),
                (forward - 1.0).abs(),
                (backward - 1.0).abs(),
            ))
        })?;
        let max_of = |f: fn(&(f64, f64, f64)) -> f64| rows.iter().map(f).fold(0.0, f64::max);
        Ok(VelocityReport {
            analytic_max_deviation: max_of(|r| r.0),
            forward_max_deviation: max_of(|r| r.1),
            backward_max_deviation: max_of(|r| r.2),
            base_step: VELOCITY_STEP,
        })
    }

    /// The only candidate integral curve of the constant field `1` is the
    /// translation `x ↦ x + t`, which leaves `]0;1[`; `c_t` does not.
    pub fn demonstrate_nonregularity(&self, x: f64, t: f64) -> Result<NonRegularityWitness> {
        let translation = x + t;
        // c_t is only defined for |t| < 1.
        let c = self.c_path(t, x)?;
        let p = self.p(x);
        Ok(NonRegularityWitness {
            x,
            t,
            translation,
            translation_exits: !(0.0 < translation && translation < 1.0),
            c_t: c,
            c_t_inside: x - p <= c && c <= x + p && 0.0 < c && c < 1.0,
            lower: x - p,
            upper: x + p,
        })
    }

    /// `t ↦ φ(t, x)` strictly increasing on `samples` uniform points of
    /// `[0, 1]`, and `φ ≤ P`; returns the number of grid points where either
    /// fails.
    pub fn phi_monotonicity_violations(&self, samples: usize) -> Result<usize> {
        let rows = par::try_map_slice(&self.grid(), |&x| {
            let values = (0..samples)
                .map(|i| self.phi(i as f64 / (samples - 1) as f64, x))
                .collect::<Result<Vec<_>>>()?;
            let increasing = values.windows(2).all(|w| w[0] < w[1]);
            let bounded = values.iter().all(|&v| v.abs() <= self.p(x) * (1.0 + 1e-15));
            Ok::<_, Error>(usize::from(!(increasing && bounded)))
        })?;
        Ok(rows.into_iter().sum())
    }
}

fn richardson<F>(diff: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(RICHARDSON_LEVELS);
    for i in 0..RICHARDSON_LEVELS {
        let mut row = vec![diff(VELOCITY_STEP / 2f64.powi(i as i32))?];
        for j in 1..=i {
            let w = 2f64.powi(j as i32);
            row.push((w * row[j - 1] - table[i - 1][j - 1]) / (w - 1.0));
        }
        table.push(row);
    }
    Ok(table[RICHARDSON_LEVELS - 1][RICHARDSON_LEVELS - 1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub t: f64,
    pub points: usize,
    pub value_violations: usize,
    pub derivative_violations: usize,
    pub min_value_slack: f64,
    pub min_derivative_slack: f64,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.value_violations == 0 && self.derivative_violations == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityReport {
    pub analytic_max_deviation: f64,
    pub forward_max_deviation: f64,
    pub backward_max_deviation: f64,
    pub base_step: f64,
}

impl VelocityReport {
    pub fn max_deviation(&self) -> f64 {
        self.analytic_max_deviation
            .max(self.forward_max_deviation)
            .max(self.backward_max_deviation)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonRegularityWitness {
    pub x: f64,
    pub t: f64,
    pub translation: f64,
    pub translation_exits: bool,
    pub c_t: f64,
    pub c_t_inside: bool,
    pub lower: f64,
    pub upper: f64,
}

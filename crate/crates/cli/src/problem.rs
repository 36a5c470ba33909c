//! Problem files: schema, defaults, command-line overrides and resolution
//! into core problems.

use std::path::Path;
use std::str::FromStr;

use qlax_core::algebra::{AlgebraDescriptor, AlgebraElement, ScalarField};
use qlax_core::appendix::AppendixModel;
use qlax_core::symmetry::{dense_ad, identity_operator, operator_descriptor};
use qlax_core::{LaxProblem, OperatorPath, Preset, TimeGrid};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::payload::parse_element;

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_Q0: f64 = 0.5;
pub const DEFAULT_ORDER: usize = 6;
pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_HORIZON: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldSpec {
    #[default]
    Real,
    Complex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BackendSpec {
    Matrix {
        n: usize,
        #[serde(default)]
        field: FieldSpec,
    },
    CircleDiffop { max_order: usize, modes: usize },
}

impl BackendSpec {
    pub fn descriptor(&self) -> AlgebraDescriptor {
        match *self {
            BackendSpec::Matrix { n, field } => AlgebraDescriptor::Matrix {
                n,
                field: match field {
                    FieldSpec::Real => ScalarField::Real,
                    FieldSpec::Complex => ScalarField::Complex,
                },
            },
            BackendSpec::CircleDiffop { max_order, modes } => {
                AlgebraDescriptor::CircleDiffOp { max_order, modes }
            }
        }
    }

    fn from_descriptor(d: &AlgebraDescriptor) -> Self {
        match *d {
            AlgebraDescriptor::Matrix { n, field } => BackendSpec::Matrix {
                n,
                field: match field {
                    ScalarField::Real => FieldSpec::Real,
                    ScalarField::Complex => FieldSpec::Complex,
                },
            },
            AlgebraDescriptor::CircleDiffOp { max_order, modes } => {
                BackendSpec::CircleDiffop { max_order, modes }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PathSpec {
    /// `P(t) ≡ value`.
    Constant { value: Value },
    /// `P(t) = Σ_k t^k coefficients[k]`.
    Poly { coefficients: Vec<Value> },
    /// A named built-in problem; also supplies the default `l0`.
    Preset { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub h: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            h: DEFAULT_STEP,
            horizon: DEFAULT_HORIZON,
        }
    }
}

fn default_trace_powers() -> Vec<usize> {
    vec![1, 2, 3, 4]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default = "default_trace_powers")]
    pub trace_powers: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<f64>>,
    /// `"identity"`, `"ad-l0"` or a dense `n² × n²` operator payload.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0: Option<Value>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            trace_powers: default_trace_powers(),
            sweep: None,
            s0: None,
        }
    }
}

fn default_q0() -> f64 {
    DEFAULT_Q0
}

fn default_order() -> usize {
    DEFAULT_ORDER
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<BackendSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l0: Option<Value>,
    pub path: PathSpec,
    #[serde(default = "default_q0")]
    pub q0: f64,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub options: Options,
}

/// Command-line values that replace the corresponding problem-file fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub order: Option<usize>,
    pub q0: Option<f64>,
    pub step: Option<f64>,
    pub horizon: Option<f64>,
    pub preset: Option<String>,
    pub sweep: Option<Vec<f64>>,
}

impl ProblemFile {
    pub fn from_preset(name: &str) -> Self {
        ProblemFile {
            schema: SCHEMA_VERSION,
            backend: None,
            l0: None,
            path: PathSpec::Preset { name: name.into() },
            q0: DEFAULT_Q0,
            order: DEFAULT_ORDER,
            grid: GridSpec::default(),
            options: Options::default(),
        }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let pf: ProblemFile =
            serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
        if pf.schema != SCHEMA_VERSION {
            return Err(CliError::Schema(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                pf.schema
            )));
        }
        Ok(pf)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// A preset override replaces the path and drops any explicit `l0` and
    /// backend, which belong to the replaced problem.
    pub fn apply(mut self, o: &Overrides) -> Self {
        if let Some(name) = &o.preset {
            self.path = PathSpec::Preset { name: name.clone() };
            self.l0 = None;
            self.backend = None;
        }
        if let Some(n) = o.order {
            self.order = n;
        }
        if let Some(q0) = o.q0 {
            self.q0 = q0;
        }
        if let Some(h) = o.step {
            self.grid.h = h;
        }
        if let Some(t) = o.horizon {
            self.grid.horizon = t;
        }
        if let Some(s) = &o.sweep {
            self.options.sweep = Some(s.clone());
        }
        self
    }

    pub fn grid(&self) -> CliResult<TimeGrid> {
        TimeGrid::new(self.grid.h, self.grid.horizon).map_err(CliError::from_input)
    }

    fn preset(&self) -> CliResult<Option<Preset>> {
        match &self.path {
            PathSpec::Preset { name } => Preset::from_str(name)
                .map(Some)
                .map_err(|_| {
                    let known: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                    CliError::Schema(format!("unknown preset {name:?}; known: {}", known.join(", ")))
                }),
            _ => Ok(None),
        }
    }

    pub fn descriptor(&self) -> CliResult<AlgebraDescriptor> {
        let from_preset = self.preset()?.map(|p| p.data().0.descriptor());
        let d = match (&self.backend, from_preset) {
            (Some(b), Some(d)) if b.descriptor() != d => {
                return Err(CliError::Schema(format!(
                    "backend {} does not match the preset's {d}",
                    b.descriptor()
                )))
            }
            (Some(b), _) => b.descriptor(),
            (None, Some(d)) => d,
            (None, None) => {
                return Err(CliError::Schema(
                    "\"backend\" is required unless the path is a preset".into(),
                ))
            }
        };
        d.validate().map_err(CliError::from_input)?;
        Ok(d)
    }

    /// Backend actually used, for echoing in manifests.
    pub fn backend_spec(&self) -> CliResult<BackendSpec> {
        Ok(BackendSpec::from_descriptor(&self.descriptor()?))
    }

    fn l0_and_path(&self) -> CliResult<(AlgebraElement, OperatorPath)> {
        let desc = self.descriptor()?;
        let preset = self.preset()?.map(Preset::data);
        let path = match (&self.path, &preset) {
            (PathSpec::Preset { .. }, Some((_, p))) => p.clone(),
            (PathSpec::Constant { value }, _) => {
                OperatorPath::constant(parse_element(value, &desc, "path.value")?)
            }
            (PathSpec::Poly { coefficients }, _) => {
                if coefficients.is_empty() {
                    return Err(CliError::Schema("path.coefficients is empty".into()));
                }
                let cs = coefficients
                    .iter()
                    .enumerate()
                    .map(|(k, c)| parse_element(c, &desc, &format!("path.coefficients[{k}]")))
                    .collect::<CliResult<Vec<_>>>()?;
                OperatorPath::polynomial(cs).map_err(CliError::from_input)?
            }
            (PathSpec::Preset { .. }, None) => unreachable!("preset resolved above"),
        };
        let l0 = match (&self.l0, &preset) {
            (Some(v), _) => parse_element(v, &desc, "l0")?,
            (None, Some((l0, _))) => l0.clone(),
            (None, None) => {
                return Err(CliError::Schema(
                    "\"l0\" is required unless the path is a preset".into(),
                ))
            }
        };
        Ok((l0, path))
    }

    pub fn lax_problem(&self) -> CliResult<LaxProblem> {
        let (l0, path) = self.l0_and_path()?;
        LaxProblem::new(l0, path, self.q0, self.order, self.grid()?).map_err(CliError::from_input)
    }

    /// Checked trace powers; empty on backends without a trace.
    pub fn trace_powers(&self) -> CliResult<Vec<usize>> {
        if self.options.trace_powers.contains(&0) {
            return Err(CliError::Schema("trace powers must be ≥ 1".into()));
        }
        Ok(self.options.trace_powers.clone())
    }

    /// The sweep list, defaulting to the problem's own `q0`.
    pub fn sweep(&self) -> CliResult<Vec<f64>> {
        let list = self.options.sweep.clone().unwrap_or_else(|| vec![self.q0]);
        if list.is_empty() {
            return Err(CliError::Schema("sweep list is empty".into()));
        }
        if let Some(bad) = list.iter().find(|q| !(**q > 0.0 && **q <= 1.0)) {
            return Err(CliError::Schema(format!("sweep value {bad} outside (0, 1]")));
        }
        Ok(list)
    }

    pub fn initial_symmetry(&self, l0: &AlgebraElement) -> CliResult<(String, AlgebraElement)> {
        let desc = l0.descriptor();
        let op_desc = operator_descriptor(&desc).map_err(CliError::from_input)?;
        match &self.options.s0 {
            None => Ok(("ad-l0".into(), dense_ad(l0).map_err(CliError::from_input)?)),
            Some(Value::String(s)) if s == "ad-l0" => {
                Ok(("ad-l0".into(), dense_ad(l0).map_err(CliError::from_input)?))
            }
            Some(Value::String(s)) if s == "identity" => Ok((
                "identity".into(),
                identity_operator(&desc).map_err(CliError::from_input)?,
            )),
            Some(Value::String(s)) => Err(CliError::Schema(format!(
                "options.s0 {s:?}: expected \"identity\", \"ad-l0\" or an operator matrix"
            ))),
            Some(v) => Ok(("matrix".into(), parse_element(v, &op_desc, "options.s0")?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppendixFile {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
}

pub const DEFAULT_APPENDIX_TIMES: [f64; 5] = [0.9, -0.9, 0.5, -0.5, 0.1];

impl Default for AppendixFile {
    fn default() -> Self {
        AppendixFile {
            schema: SCHEMA_VERSION,
            poly: None,
            epsilon: None,
            points: None,
            times: None,
        }
    }
}

impl AppendixFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
        let f: AppendixFile =
            serde_json::from_str(&text).map_err(|e| CliError::Schema(e.to_string()))?;
        if f.schema != SCHEMA_VERSION {
            return Err(CliError::Schema(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                f.schema
            )));
        }
        Ok(f)
    }

    pub fn model(&self) -> AppendixModel {
        let d = AppendixModel::default();
        AppendixModel {
            poly: self.poly.clone().unwrap_or(d.poly),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            points: self.points.unwrap_or(d.points),
        }
    }

    pub fn times(&self) -> CliResult<Vec<f64>> {
        let times = self.times.clone().unwrap_or_else(|| DEFAULT_APPENDIX_TIMES.to_vec());
        if let Some(bad) = times.iter().find(|t| t.is_nan() || t.abs() >= 1.0) {
            return Err(CliError::Schema(format!("appendix time {bad} outside (−1, 1)")));
        }
        Ok(times)
    }
}

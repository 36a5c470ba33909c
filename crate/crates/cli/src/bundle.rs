//! Result bundles: flow and diagnostics tables plus a JSON manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qlax_core::{GradeProfile, GradedSeries, TimeGrid};
use serde_json::{json, Map, Value};

use crate::error::CliResult;
use crate::payload::element_value;

/// Most nodes written to subsampled outputs.
pub const MAX_SAMPLED_NODES: usize = 101;

/// Shortest round-trip formatting, stable across runs.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// `value ≤ bound`.
    Max(f64),
    /// `lo ≤ value ≤ hi`.
    Band(f64, f64),
}

impl Threshold {
    fn admits(self, v: f64) -> bool {
        match self {
            Threshold::Max(b) => v <= b,
            Threshold::Band(lo, hi) => (lo..=hi).contains(&v),
        }
    }

    fn render(self) -> String {
        match self {
            Threshold::Max(b) => num(b),
            Threshold::Band(lo, hi) => format!("[{};{}]", num(lo), num(hi)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRow {
    pub check: String,
    /// `None` for checks that are not per grade.
    pub grade: Option<usize>,
    pub value: f64,
    pub threshold: Threshold,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub rows: Vec<DiagnosticRow>,
}

impl Diagnostics {
    pub fn push(&mut self, check: &str, grade: Option<usize>, value: f64, threshold: Threshold) {
        self.rows.push(DiagnosticRow {
            check: check.into(),
            grade,
            value,
            threshold,
            // NaN never passes.
            pass: threshold.admits(value),
        });
    }

    pub fn profile(&mut self, check: &str, profile: &GradeProfile, bound: f64) {
        for (n, &v) in profile.grades().iter().enumerate() {
            self.push(check, Some(n), v, Threshold::Max(bound));
        }
    }

    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    pub fn passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["check", "grade", "value", "threshold", "pass"])?;
        for r in &self.rows {
            let grade = r.grade.map_or_else(|| "all".to_string(), |g| g.to_string());
            w.write_record([
                r.check.as_str(),
                grade.as_str(),
                num(r.value).as_str(),
                r.threshold.render().as_str(),
                if r.pass { "true" } else { "false" },
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Node indexes kept in subsampled outputs; always includes both ends.
pub fn sampled_nodes(grid: &TimeGrid) -> Vec<usize> {
    let last = grid.steps();
    let stride = last.div_ceil(MAX_SAMPLED_NODES - 1).max(1);
    let mut idx: Vec<usize> = (0..=last).step_by(stride).collect();
    if idx.last() != Some(&last) {
        idx.push(last);
    }
    idx
}

/// `t, grade, coeff_norm` for every node and grade.
pub fn write_flow(path: &Path, grid: &TimeGrid, values: &[GradedSeries]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "grade", "coeff_norm"])?;
    for (k, v) in values.iter().enumerate() {
        let t = num(grid.time(k));
        for (n, norm) in v.grade_norms().into_iter().enumerate() {
            w.write_record([t.as_str(), n.to_string().as_str(), num(norm).as_str()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Full coefficients at the sampled nodes.
pub fn series_json(grid: &TimeGrid, values: &[GradedSeries]) -> Value {
    let nodes: Vec<Value> = sampled_nodes(grid)
        .into_iter()
        .map(|k| {
            json!({
                "t": grid.time(k),
                "coefficients": values[k].coeffs().iter().map(element_value).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "nodes": nodes })
}

pub fn write_json(path: &Path, v: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Optional wall-clock timings; off by default so bundles stay
/// byte-identical across runs.
#[derive(Debug)]
pub struct Timings {
    enabled: bool,
    start: Instant,
    last: Instant,
    phases: Map<String, Value>,
}

impl Timings {
    pub fn new(enabled: bool) -> Self {
        let now = Instant::now();
        Timings {
            enabled,
            start: now,
            last: now,
            phases: Map::new(),
        }
    }

    pub fn lap(&mut self, phase: &str) {
        if self.enabled {
            let now = Instant::now();
            let ms = (now - self.last).as_secs_f64() * 1e3;
            self.phases.insert(phase.into(), json!(ms));
            self.last = now;
        }
    }

    fn finish(mut self) -> Option<Value> {
        if !self.enabled {
            return None;
        }
        let total = self.start.elapsed().as_secs_f64() * 1e3;
        self.phases.insert("total".into(), json!(total));
        Some(Value::Object(self.phases))
    }
}

/// Files of one bundle, written under its output directory.
#[derive(Debug)]
pub struct Bundle {
    dir: PathBuf,
    files: Vec<String>,
}

impl Bundle {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir)?;
        Ok(Bundle {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Registers `name` and returns its full path.
    pub fn file(&mut self, name: &str) -> PathBuf {
        self.files.push(name.into());
        self.dir.join(name)
    }

    pub fn finish(
        mut self,
        command: &str,
        inputs: Value,
        mut extra: Map<String, Value>,
        diagnostics: &Diagnostics,
        timings: Timings,
    ) -> CliResult<()> {
        let path = self.file("manifest.json");
        let mut m = Map::new();
        m.insert("tool".into(), json!("qlax"));
        m.insert("command".into(), json!(command));
        m.insert(
            "versions".into(),
            json!({
                "qlax-cli": env!("CARGO_PKG_VERSION"),
                "schema": crate::problem::SCHEMA_VERSION,
            }),
        );
        m.insert("inputs".into(), inputs);
        m.append(&mut extra);
        m.insert(
            "diagnostics".into(),
            json!({ "rows": diagnostics.rows.len(), "failed": diagnostics.failed() }),
        );
        m.insert("passed".into(), json!(diagnostics.passed()));
        m.insert("files".into(), json!(self.files));
        if let Some(t) = timings.finish() {
            m.insert("timings_ms".into(), t);
        }
        write_json(&path, &Value::Object(m))
    }
}

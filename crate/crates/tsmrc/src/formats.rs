//! Structured-text (TOML) files: parameters, submodel families, gain
//! schedules and SDP problem dumps. Matrices are stored row-major with an
//! explicit `rows`/`cols` header.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tsmrc_core::linalg::Mat;
use tsmrc_core::mrc::{GainSchedule, ScheduleKind};
use tsmrc_core::sdp::{AffineMatrix, LmiBlock, MatrixVariable, SdpProblem, Sense};
use tsmrc_core::ts::{ModelKind, OperatingPoint, TsSubmodel};
use tsmrc_core::turbine::TurbineParams;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixText {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl From<&Mat> for MatrixText {
    fn from(m: &Mat) -> Self {
        let data = (0..m.nrows()).flat_map(|r| (0..m.ncols()).map(move |c| m[(r, c)])).collect();
        Self { rows: m.nrows(), cols: m.ncols(), data }
    }
}

impl MatrixText {
    pub fn to_mat(&self) -> Result<Mat, String> {
        if self.data.len() != self.rows * self.cols {
            return Err(format!("{}x{} matrix with {} entries", self.rows, self.cols, self.data.len()));
        }
        Ok(Mat::from_row_slice(self.rows, self.cols, &self.data))
    }
}

pub fn read_toml<T: DeserializeOwned>(op: &'static str, path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { op, path: path.into(), source })?;
    toml::from_str(&text).map_err(|e| CliError::Parse { op, path: path.into(), message: e.to_string() })
}

pub fn write_toml<T: Serialize>(op: &'static str, path: &Path, value: &T) -> CliResult<()> {
    let text = toml::to_string(value).map_err(|e| CliError::Parse { op, path: path.into(), message: e.to_string() })?;
    fs::write(path, text).map_err(|source| CliError::Io { op, path: path.into(), source })
}

pub fn load_params(path: &Path) -> CliResult<TurbineParams> {
    let p: TurbineParams = read_toml("load-params", path)?;
    p.validate().map_err(CliError::core("load-params"))?;
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleText {
    pub kind: ScheduleKind,
    pub nodes: Vec<f64>,
    pub gains: Vec<MatrixText>,
}

/// Every schedule produced by one synthesis run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GainsFile {
    pub schedule: Vec<ScheduleText>,
}

impl GainsFile {
    pub fn new(schedules: &[&GainSchedule]) -> Self {
        let schedule = schedules
            .iter()
            .map(|s| ScheduleText { kind: s.kind, nodes: s.nodes.clone(), gains: s.gains.iter().map(MatrixText::from).collect() })
            .collect();
        Self { schedule }
    }

    pub fn get(&self, kind: ScheduleKind) -> Result<Option<GainSchedule>, String> {
        let Some(text) = self.schedule.iter().find(|s| s.kind == kind) else {
            return Ok(None);
        };
        if text.gains.len() != text.nodes.len() {
            return Err(format!("{kind:?} schedule has {} gains for {} nodes", text.gains.len(), text.nodes.len()));
        }
        let gains = text.gains.iter().map(MatrixText::to_mat).collect::<Result<Vec<_>, _>>()?;
        Ok(Some(GainSchedule { kind, nodes: text.nodes.clone(), gains }))
    }
}

pub fn load_gains(op: &'static str, path: &Path) -> CliResult<GainsFile> {
    if !path.exists() {
        return Err(CliError::MissingGains { op, path: path.into() });
    }
    read_toml(op, path)
}

/// Loads one schedule kind, failing when it is absent.
pub fn require_schedule(op: &'static str, path: &Path, file: &GainsFile, kind: ScheduleKind) -> CliResult<GainSchedule> {
    file.get(kind)
        .map_err(|message| CliError::Parse { op, path: path.into(), message })?
        .ok_or_else(|| CliError::Parse { op, path: path.into(), message: format!("no {kind:?} schedule") })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmodelText {
    pub operating_point: OperatingPoint,
    pub a: MatrixText,
    pub b: MatrixText,
    pub bd: MatrixText,
    pub c: MatrixText,
    pub affine_state: Vec<f64>,
    pub affine_output: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub kind: ModelKind,
    pub submodel: Vec<SubmodelText>,
}

impl ModelFile {
    pub fn new(kind: ModelKind, subs: &[TsSubmodel]) -> Self {
        let submodel = subs
            .iter()
            .map(|s| SubmodelText {
                operating_point: s.operating_point,
                a: (&s.a).into(),
                b: (&s.b).into(),
                bd: (&s.bd).into(),
                c: (&s.c).into(),
                affine_state: s.affine_state.iter().copied().collect(),
                affine_output: s.affine_output.iter().copied().collect(),
            })
            .collect();
        Self { kind, submodel }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableText {
    pub rows: usize,
    pub cols: usize,
    pub symmetric: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermText {
    pub index: usize,
    pub coefficient: MatrixText,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockText {
    pub label: String,
    pub sense: Sense,
    pub shift: f64,
    pub constant: MatrixText,
    pub term: Vec<TermText>,
}

/// Self-describing dump of an SDP for offline debugging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub objective: Option<Vec<f64>>,
    pub variable: Vec<VariableText>,
    pub block: Vec<BlockText>,
}

impl ProblemFile {
    pub fn new(p: &SdpProblem) -> Self {
        Self {
            objective: p.objective().map(<[f64]>::to_vec),
            variable: p
                .variables()
                .iter()
                .map(|v| VariableText { rows: v.rows, cols: v.cols, symmetric: v.symmetric })
                .collect(),
            block: p
                .blocks()
                .iter()
                .map(|b| BlockText {
                    label: b.label.clone(),
                    sense: b.sense,
                    shift: b.shift,
                    constant: b.expr.constant_part().into(),
                    term: b.expr.terms().iter().map(|(index, m)| TermText { index: *index, coefficient: m.into() }).collect(),
                })
                .collect(),
        }
    }

    pub fn to_problem(&self) -> Result<SdpProblem, String> {
        let mut offset = 0;
        let variables = self
            .variable
            .iter()
            .enumerate()
            .map(|(id, v)| {
                let var = MatrixVariable { id, rows: v.rows, cols: v.cols, symmetric: v.symmetric, offset };
                offset += var.scalar_count();
                var
            })
            .collect();
        let blocks = self
            .block
            .iter()
            .map(|b| {
                let terms = b
                    .term
                    .iter()
                    .map(|t| t.coefficient.to_mat().map(|m| (t.index, m)))
                    .collect::<Result<Vec<_>, _>>()?;
                let expr = AffineMatrix::from_parts(b.constant.to_mat()?, terms).map_err(|e| e.to_string())?;
                Ok(LmiBlock { label: b.label.clone(), expr, sense: b.sense, shift: b.shift })
            })
            .collect::<Result<Vec<_>, String>>()?;
        SdpProblem::from_parts(variables, blocks, self.objective.clone()).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_text_is_row_major() {
        let m = Mat::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let t = MatrixText::from(&m);
        assert_eq!(t.data, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(t.to_mat().unwrap(), m);
        assert!(MatrixText { rows: 2, cols: 2, data: vec![1.0] }.to_mat().is_err());
    }

    #[test]
    fn problem_dump_reloads() {
        let mut p = SdpProblem::new();
        let x = p.add_symmetric(2);
        let y = p.add_matrix(1, 2);
        p.add_block("x", x.expr(), Sense::Positive).unwrap();
        let coupling = y.expr().mul_left(&Mat::from_element(2, 1, 1.0));
        p.add_block("sym", coupling.add(&coupling.transpose()).sub(&x.expr()), Sense::Negative).unwrap();
        p.minimize_trace(&x).unwrap();
        let text = toml::to_string(&ProblemFile::new(&p)).unwrap();
        let back: ProblemFile = toml::from_str(&text).unwrap();
        assert_eq!(back.to_problem().unwrap(), p);
    }
}

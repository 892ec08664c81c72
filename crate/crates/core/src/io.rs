// Copyright 2026 The QECCD Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON schemas for channels, codes, plans and reports.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major. Reports
//! write every float with 17 significant digits so doubles round-trip.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::channel::{Channel, ProcessMatrix, Validity};
use crate::code::{LogicalOperators, StabilizerCode};
use crate::dense::{NumericPolicy, StateVector};
use crate::error::{QeccdError, Result};
use crate::estimation::ErrorReport;
use crate::pauli::PauliOperator;
use crate::protocol::{ConfigDescriptor, Plan};
use crate::{CMatrix, Complex64};

fn parse_err(e: serde_json::Error) -> QeccdError {
    QeccdError::Parse(e.to_string())
}

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    m.row_iter().map(|row| row.iter().map(pair).collect()).collect()
}

fn rows_to_matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(QeccdError::Parse(format!(
            "matrix row of length {} in a {n}-row matrix",
            bad.len()
        )));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub p: usize,
    #[serde(default)]
    pub label: String,
    pub kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

impl ChannelFile {
    pub fn from_channel(ch: &Channel) -> Self {
        ChannelFile {
            p: ch.p(),
            label: ch.label().to_string(),
            kraus: ch.kraus().iter().map(matrix_to_rows).collect(),
        }
    }

    pub fn into_channel(self) -> Result<Channel> {
        let kraus = self
            .kraus
            .iter()
            .map(|k| rows_to_matrix(k))
            .collect::<Result<Vec<_>>>()?;
        let label = if self.label.is_empty() {
            "file".to_string()
        } else {
            self.label
        };
        Channel::new(self.p, kraus, label)
    }
}

pub fn channel_from_json(text: &str) -> Result<Channel> {
    serde_json::from_str::<ChannelFile>(text)
        .map_err(parse_err)?
        .into_channel()
}

pub fn channel_to_json(ch: &Channel) -> String {
    to_json_string(&ChannelFile::from_channel(ch))
}

/// One operator per logical qubit; a bare string is accepted for `k = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorList {
    One(String),
    Many(Vec<String>),
}

impl OperatorList {
    fn parse(&self) -> Result<Vec<PauliOperator>> {
        match self {
            OperatorList::One(s) => Ok(vec![s.parse()?]),
            OperatorList::Many(list) => list.iter().map(|s| s.parse()).collect(),
        }
    }

    fn from_ops(ops: &[PauliOperator]) -> Self {
        match ops {
            [single] => OperatorList::One(single.to_string()),
            many => OperatorList::Many(many.iter().map(|o| o.to_string()).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogicalOpsFile {
    #[serde(rename = "X")]
    pub x: OperatorList,
    #[serde(rename = "Z")]
    pub z: OperatorList,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub n: usize,
    pub k: usize,
    pub generators: Vec<String>,
    pub noisy_coords: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codewords: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logical_ops: Option<LogicalOpsFile>,
}

impl CodeFile {
    pub fn from_code(code: &StabilizerCode) -> Self {
        CodeFile {
            n: code.n(),
            k: code.k(),
            generators: code.generators().iter().map(|g| g.to_string()).collect(),
            noisy_coords: code.noisy_coords().to_vec(),
            codewords: Some(
                code.logical_basis()
                    .iter()
                    .map(|v| v.amplitudes().iter().map(pair).collect())
                    .collect(),
            ),
            logical_ops: code.logical_ops().map(|ops| LogicalOpsFile {
                x: OperatorList::from_ops(&ops.x),
                z: OperatorList::from_ops(&ops.z),
            }),
        }
    }

    pub fn into_code(self, policy: &NumericPolicy) -> Result<StabilizerCode> {
        let generators = self
            .generators
            .iter()
            .map(|g| g.parse::<PauliOperator>())
            .collect::<Result<Vec<_>>>()?;
        if let Some(bad) = generators.iter().find(|g| g.num_qubits() != self.n) {
            return Err(QeccdError::Parse(format!(
                "generator {bad} does not act on {} qubits",
                self.n
            )));
        }
        let codewords = self
            .codewords
            .map(|words| {
                words
                    .into_iter()
                    .map(|w| StateVector::new(w.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        let logical_ops = self
            .logical_ops
            .map(|ops| {
                Ok::<_, QeccdError>(LogicalOperators {
                    x: ops.x.parse()?,
                    z: ops.z.parse()?,
                })
            })
            .transpose()?;
        let code = StabilizerCode::build(self.n, generators, &self.noisy_coords, codewords, logical_ops, policy)?;
        if code.k() != self.k {
            return Err(QeccdError::Validation(format!(
                "declared k = {} but the generators leave k = {}",
                self.k,
                code.k()
            )));
        }
        Ok(code)
    }
}

pub fn code_from_json(text: &str, policy: &NumericPolicy) -> Result<StabilizerCode> {
    serde_json::from_str::<CodeFile>(text)
        .map_err(parse_err)?
        .into_code(policy)
}

pub fn code_to_json(code: &StabilizerCode) -> String {
    to_json_string(&CodeFile::from_code(code))
}

pub fn plan_to_json(plan: &Plan, code: &StabilizerCode) -> String {
    to_json_string(&plan.descriptors(code))
}

pub fn plan_from_json(text: &str, code: &StabilizerCode, policy: &NumericPolicy) -> Result<Plan> {
    let descriptors: Vec<ConfigDescriptor> = serde_json::from_str(text).map_err(parse_err)?;
    Plan::from_descriptors(code, &descriptors, policy)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityJson {
    pub min_eigenvalue: f64,
    pub hermiticity_defect: f64,
    pub trace: f64,
}

impl From<Validity> for ValidityJson {
    fn from(v: Validity) -> Self {
        ValidityJson {
            min_eigenvalue: v.min_eigenvalue,
            hermiticity_defect: v.hermiticity_defect,
            trace: v.trace,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReportJson {
    pub frobenius_error: f64,
    pub max_entry_error: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl From<ErrorReport> for ErrorReportJson {
    fn from(r: ErrorReport) -> Self {
        ErrorReportJson {
            frobenius_error: r.frobenius_error,
            max_entry_error: r.max_entry_error,
            trace_defect: r.trace_defect,
            min_eigenvalue: r.min_eigenvalue,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationReport {
    #[serde(flatten)]
    pub descriptor: ConfigDescriptor,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingJson {
    pub shots_per_configuration: u64,
    pub seed: u64,
}

/// Output of a characterization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub code: String,
    pub channel: String,
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingJson>,
    pub basis: Vec<String>,
    pub chi: Vec<Vec<[f64; 2]>>,
    pub validity: ValidityJson,
    pub max_readout_spread: f64,
    pub configurations: Vec<ConfigurationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_report: Option<ErrorReportJson>,
}

impl Report {
    pub fn chi_matrix(&self) -> Result<ProcessMatrix> {
        ProcessMatrix::new(rows_to_matrix(&self.chi)?, self.basis.clone())
    }

    pub fn chi_entry(&self, row: &str, col: &str) -> Option<Complex64> {
        let i = self.basis.iter().position(|l| l == row)?;
        let j = self.basis.iter().position(|l| l == col)?;
        let [re, im] = self.chi[i][j];
        Some(Complex64::new(re, im))
    }
}

pub fn chi_rows(chi: &ProcessMatrix) -> Vec<Vec<[f64; 2]>> {
    matrix_to_rows(chi.entries())
}

/// Pretty printer that writes floats in `d.dddddddddddddddde±x` form.
struct Exact17<'a> {
    pretty: PrettyFormatter<'a>,
}

impl Formatter for Exact17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(writer)
    }
}

/// Pretty JSON with 17 significant digits for every float.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let formatter = Exact17 {
        pretty: PrettyFormatter::with_indent(b"  "),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, formatter);
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

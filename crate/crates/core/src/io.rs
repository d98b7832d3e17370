//! JSON interchange for matrices and command results.
//!
//! A matrix document is `{"n": 2, "data": [[re, im], ...], "label": "..."}`
//! with the entries in row-major order. Floating point values are written
//! with 17 significant digits, which round-trips every finite double.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use crate::check::Check;
use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix};

/// Matrix document as read from disk.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub n: usize,
    pub data: Vec<[f64; 2]>,
    #[serde(default)]
    pub label: Option<String>,
}

impl MatrixDocument {
    pub fn into_matrix(self) -> Result<ComplexMatrix> {
        let expected = self.n.checked_mul(self.n).ok_or_else(|| Error::Shape(format!("n = {} too large", self.n)))?;
        if self.n == 0 {
            return Err(Error::Shape("n must be positive".into()));
        }
        if self.data.len() != expected {
            return Err(Error::Shape(format!("expected {} entries for n = {}, found {}", expected, self.n, self.data.len())));
        }
        if let Some(i) = self.data.iter().position(|[re, im]| !re.is_finite() || !im.is_finite()) {
            return Err(Error::NonFiniteEntry(i));
        }
        ComplexMatrix::new(self.n, self.data.iter().map(|[re, im]| c64(*re, *im)).collect())
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

/// Parses a matrix document and returns the matrix with its label.
pub fn parse_document(text: &[u8]) -> Result<(ComplexMatrix, Option<String>)> {
    let doc: MatrixDocument = serde_json::from_slice(text).map_err(parse_error)?;
    let label = doc.label.clone();
    Ok((doc.into_matrix()?, label))
}

pub fn parse_matrix(text: &[u8]) -> Result<ComplexMatrix> {
    parse_document(text).map(|(m, _)| m)
}

/// A double written with 17 significant digits; non-finite values become
/// `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exact(pub f64);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Serialize)]
struct MatrixOut<'a> {
    n: usize,
    data: Vec<[Exact; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
}

fn matrix_out<'a>(m: &ComplexMatrix, label: Option<&'a str>) -> MatrixOut<'a> {
    MatrixOut { n: m.dim(), data: m.as_slice().iter().map(|z| [Exact(z.re), Exact(z.im)]).collect(), label }
}

/// Prints a matrix document.
pub fn print_matrix(m: &ComplexMatrix, label: Option<&str>) -> String {
    serde_json::to_string(&matrix_out(m, label)).expect("matrix documents always serialize")
}

/// Hex SHA-256 of the raw input bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// A named output value.
#[derive(Clone, Debug)]
pub enum Output {
    Matrix(ComplexMatrix),
    Scalar(f64),
    Integer(u64),
    Flag(bool),
    Text(String),
    List(Vec<Output>),
}

impl Serialize for Output {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Output::Matrix(m) => matrix_out(m, None).serialize(s),
            Output::Scalar(x) => Exact(*x).serialize(s),
            Output::Integer(k) => s.serialize_u64(*k),
            Output::Flag(b) => s.serialize_bool(*b),
            Output::Text(t) => s.serialize_str(t),
            Output::List(items) => items.serialize(s),
        }
    }
}

/// Echo of one input file.
#[derive(Clone, Debug, Serialize)]
pub struct InputEcho {
    pub flag: String,
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub sha256: String,
}

#[derive(Serialize)]
struct CheckOut<'a> {
    name: &'a str,
    value: Exact,
    tolerance: Exact,
    pass: bool,
}

/// The single JSON document a command prints.
#[derive(Clone, Debug, Default)]
pub struct ResultDocument {
    pub command: String,
    pub inputs: Vec<InputEcho>,
    pub outputs: BTreeMap<String, Output>,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl Serialize for ResultDocument {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let checks: Vec<CheckOut> = self
            .checks
            .iter()
            .map(|c| CheckOut { name: &c.name, value: Exact(c.value), tolerance: Exact(c.tolerance), pass: c.pass })
            .collect();
        let mut st = s.serialize_struct("ResultDocument", 5)?;
        st.serialize_field("command", &self.command)?;
        st.serialize_field("inputs", &self.inputs)?;
        st.serialize_field("outputs", &self.outputs)?;
        st.serialize_field("checks", &checks)?;
        if let Some(e) = &self.error {
            st.serialize_field("error", e)?;
        } else {
            st.skip_field("error")?;
        }
        st.end()
    }
}

impl ResultDocument {
    pub fn new(command: impl Into<String>) -> Self {
        Self { command: command.into(), ..Default::default() }
    }

    pub fn output(&mut self, name: &str, value: Output) {
        self.outputs.insert(name.to_string(), value);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result documents always serialize")
    }
}

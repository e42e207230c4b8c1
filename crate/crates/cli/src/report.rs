//! The JSON report every command emits.

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Invalid,
}

/// `{command, status, input, results, residuals, tolerances, errors}`.
///
/// Numbers are written in shortest round-trip form, so every `f64` reads back
/// bit-identically. Non-finite values become `null`.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub input: Value,
    pub results: Map<String, Value>,
    pub residuals: Map<String, Value>,
    pub tolerances: Map<String, Value>,
    pub errors: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            status: Status::Ok,
            input: Value::Null,
            results: Map::new(),
            residuals: Map::new(),
            tolerances: Map::new(),
            errors: Vec::new(),
        }
    }

    pub fn result<T: Serialize>(&mut self, key: &str, value: T) -> &mut Self {
        self.results.insert(key.to_string(), to_value(value));
        self
    }

    pub fn residual(&mut self, key: &str, value: f64) -> &mut Self {
        self.residuals.insert(key.to_string(), to_value(value));
        self
    }

    pub fn tolerance(&mut self, key: &str, value: f64) -> &mut Self {
        self.tolerances.insert(key.to_string(), to_value(value));
        self
    }

    /// Records a validation failure; the run exits with status 2.
    pub fn fail(&mut self, message: impl Into<String>) -> &mut Self {
        self.status = Status::Invalid;
        self.errors.push(message.into());
        self
    }

    /// Fails with `message` unless `value <= tol`.
    pub fn require_below(&mut self, what: &str, value: f64, tol: f64) -> bool {
        let ok = value <= tol;
        if !ok {
            self.fail(format!("{what} = {value:e} exceeds tolerance {tol:e}"));
        }
        ok
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are plain JSON");
        s.push('\n');
        s
    }
}

fn to_value<T: Serialize>(v: T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Row-major nested arrays.
pub fn matrix(m: &DMatrix<f64>) -> Value {
    Value::Array(
        m.row_iter()
            .map(|r| Value::Array(r.iter().map(|&x| to_value(x)).collect()))
            .collect(),
    )
}

/// The diagonal of `m` when every off-diagonal entry is within `tol`.
pub fn diagonal(m: &DMatrix<f64>, tol: f64) -> Option<Vec<f64>> {
    let off = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).filter(move |&j| j != i).map(move |j| (i, j)))
        .all(|(i, j)| m[(i, j)].abs() <= tol);
    off.then(|| m.diagonal().iter().copied().collect())
}

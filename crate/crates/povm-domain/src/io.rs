//! JSON schemas shared between the library and the command-line tool.
//!
//! Complex entries are `[re, im]` pairs; matrices are row-major arrays of
//! rows. A state file carries its dimension next to the matrix and a
//! measurement file carries the common dimension of its effects, so shape
//! errors are caught before any numerics run.

use crate::estimation::CountRecord;
use crate::linalg::ComplexMatrix;
use crate::povm::Povm;
use crate::states::DensityMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// Errors from reading or writing the JSON formats.
#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid contents: {0}")]
    Invalid(String),
}

/// `{"d": 2, "matrix": [[[re, im], ...], ...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub d: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

/// `{"d": 2, "effects": [[[[re, im], ...], ...], ...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmJson {
    pub d: usize,
    pub effects: Vec<Vec<Vec<[f64; 2]>>>,
}

/// `{"n": 100, "counts": [25, 25, 25, 25]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountsJson {
    pub n: u64,
    pub counts: Vec<u64>,
}

fn matrix_from_rows(
    rows: &[Vec<[f64; 2]>],
    d: usize,
    what: &str,
) -> Result<ComplexMatrix, IoError> {
    if rows.len() != d {
        return Err(IoError::Invalid(format!(
            "{what} has {} rows, expected {d}",
            rows.len()
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(IoError::Invalid(format!(
                "{what} row {i} has {} entries, expected {d}",
                row.len()
            )));
        }
    }
    Ok(ComplexMatrix::from_fn(d, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.order())
        .map(|i| {
            (0..m.order())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

impl StateJson {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        Self {
            d: rho.dim(),
            matrix: matrix_to_rows(rho.matrix()),
        }
    }

    /// Validates shape and the density matrix properties.
    pub fn to_density(&self) -> Result<DensityMatrix, IoError> {
        let matrix = matrix_from_rows(&self.matrix, self.d, "state matrix")?;
        DensityMatrix::new(matrix).map_err(|e| IoError::Invalid(e.to_string()))
    }
}

impl PovmJson {
    pub fn from_povm(povm: &Povm) -> Self {
        Self {
            d: povm.dim(),
            effects: povm.effects().iter().map(matrix_to_rows).collect(),
        }
    }

    /// Validates shape only; run semantic validation separately.
    pub fn to_povm(&self) -> Result<Povm, IoError> {
        if self.effects.is_empty() {
            return Err(IoError::Invalid("measurement has no effects".to_string()));
        }
        let effects = self
            .effects
            .iter()
            .enumerate()
            .map(|(mu, rows)| matrix_from_rows(rows, self.d, &format!("effect {mu}")))
            .collect::<Result<Vec<_>, _>>()?;
        Povm::from_matrices(effects).map_err(|e| IoError::Invalid(e.to_string()))
    }
}

impl CountsJson {
    pub fn from_record(record: &CountRecord) -> Self {
        Self {
            n: record.n(),
            counts: record.counts().to_vec(),
        }
    }

    pub fn to_record(&self) -> Result<CountRecord, IoError> {
        CountRecord::from_parts(self.n, self.counts.clone())
            .map_err(|e| IoError::Invalid(e.to_string()))
    }
}

/// Effective knob settings of a command-line run, echoed into reports so a
/// result can be reproduced from its output alone.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub tol: f64,
    pub k: f64,
    pub budget: usize,
    pub samples: usize,
    pub grid: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tol: crate::DEFAULT_TOL,
            k: 1.0,
            budget: 10_000,
            samples: 200,
            grid: "64x128".to_string(),
        }
    }
}

/// Reads and deserializes one JSON value from a file.
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Deserializes one JSON value from an in-memory string.
pub fn from_json_str<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, IoError> {
    Ok(serde_json::from_str(text)?)
}

/// Serializes one value to pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialization cannot fail");
    s.push('\n');
    s
}

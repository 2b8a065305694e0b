//! Matrix files: `{"dim": d, "re": [[...]], "im": [[...]]}`, row-major.

use std::fs;
use std::path::Path;

use nambu_core::{ComplexMatrix, DensityMatrix, HermitianMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::IoError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let d = m.dim();
        let part = |f: fn(&C64) -> f64| {
            (0..d)
                .map(|i| (0..d).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        MatrixJson {
            dim: d,
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
    }

    /// Checks that both parts are `dim × dim`.
    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        let d = self.dim;
        if d == 0 {
            return Err("dim must be >= 1".into());
        }
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != d {
                return Err(format!(
                    "\"{name}\" has {} rows, expected {d} (matrix must be square)",
                    part.len()
                ));
            }
            if let Some((i, row)) = part.iter().enumerate().find(|(_, r)| r.len() != d) {
                return Err(format!(
                    "\"{name}\" row {i} has {} entries, expected {d} (matrix must be square)",
                    row.len()
                ));
            }
        }
        Ok(ComplexMatrix::from_fn(d, |i, j| {
            C64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.into(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.into(),
        source,
    })
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, IoError> {
    let raw: MatrixJson = read_json(path)?;
    raw.to_matrix().map_err(|message| IoError::Schema {
        path: path.into(),
        message,
    })
}

/// Rejects non-Hermitian input.
pub fn load_matrix(path: &Path) -> Result<HermitianMatrix, IoError> {
    HermitianMatrix::new(read_matrix(path)?).map_err(|source| IoError::Invalid {
        path: path.into(),
        invariant: "Hermitian",
        source,
    })
}

/// Rejects input that is not Hermitian, positive semidefinite with
/// positive trace.
pub fn load_density(path: &Path) -> Result<DensityMatrix, IoError> {
    DensityMatrix::new(load_matrix(path)?).map_err(|source| IoError::Invalid {
        path: path.into(),
        invariant: "density matrix (PSD, positive trace)",
        source,
    })
}

pub fn to_json_string(m: &ComplexMatrix) -> String {
    serde_json::to_string(&MatrixJson::from_matrix(m)).expect("finite f64 serialize")
}

pub fn save_matrix(path: &Path, m: &ComplexMatrix) -> Result<(), IoError> {
    fs::write(path, to_json_string(m) + "\n").map_err(|source| IoError::Io {
        path: path.into(),
        source,
    })
}

pub(crate) fn read_descriptor<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    read_json(path)
}

//! Functional descriptors, e.g. `{"kind": "renyi_a", "alpha": 3}`.

use std::path::Path;

use nambu_core::functionals::{
    casimir, linear_observable, quadratic_observable, renyi_a, renyi_b, CasimirFunction,
    CasimirPreset, Functional,
};
use nambu_core::HermitianMatrix;
use serde::{Deserialize, Serialize};

use crate::matrix_json::{read_descriptor, MatrixJson};
use crate::IoError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionalDescriptor {
    Linear {
        matrix: MatrixJson,
    },
    Quadratic {
        matrix: MatrixJson,
    },
    Casimir {
        n: u32,
    },
    RenyiA {
        alpha: f64,
    },
    RenyiB {
        alpha: f64,
    },
    /// `phi` is one of `c2_half`, `c1`, `c2sq_plus_c3`.
    CasimirFunction {
        phi: String,
    },
}

impl FunctionalDescriptor {
    pub fn build(&self) -> Result<Box<dyn Functional>, String> {
        let op = |m: &MatrixJson| -> Result<HermitianMatrix, String> {
            HermitianMatrix::new(m.to_matrix()?).map_err(|e| e.to_string())
        };
        Ok(match self {
            Self::Linear { matrix } => Box::new(linear_observable(op(matrix)?)),
            Self::Quadratic { matrix } => Box::new(quadratic_observable(op(matrix)?)),
            Self::Casimir { n } => Box::new(casimir(*n).map_err(|e| e.to_string())?),
            Self::RenyiA { alpha } => Box::new(renyi_a(*alpha).map_err(|e| e.to_string())?),
            Self::RenyiB { alpha } => Box::new(renyi_b(*alpha).map_err(|e| e.to_string())?),
            Self::CasimirFunction { phi } => {
                let preset = CasimirPreset::from_name(phi)
                    .ok_or_else(|| format!("unknown phi preset \"{phi}\""))?;
                Box::new(CasimirFunction::preset(preset))
            }
        })
    }

    /// Matrix dimension the functional is tied to, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Linear { matrix } | Self::Quadratic { matrix } => Some(matrix.dim),
            _ => None,
        }
    }
}

pub fn load_functional(path: &Path) -> Result<FunctionalDescriptor, IoError> {
    read_descriptor(path)
}

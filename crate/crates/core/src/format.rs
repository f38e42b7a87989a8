//! JSON wire format for MPS tensors.
//!
//! A tensor document is `{"d": int, "D": int, "matrices": [...]}` where
//! `matrices` holds `d` matrices, each a list of `D` rows of `D` complex
//! entries, and every complex number is a two-element `[re, im]` array.
//! Ragged shapes are rejected.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::mps::MpsTensor;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorDocument {
    pub d: usize,
    #[serde(rename = "D")]
    pub bond: usize,
    /// `matrices[i][row][col] = [re, im]`.
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

impl TensorDocument {
    pub fn from_tensor(tensor: &MpsTensor) -> Self {
        let bond = tensor.bond_dim();
        let matrices = tensor
            .matrices()
            .iter()
            .map(|m| {
                (0..bond)
                    .map(|r| (0..bond).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                    .collect()
            })
            .collect();
        TensorDocument {
            d: tensor.phys_dim(),
            bond,
            matrices,
        }
    }

    pub fn into_tensor(self) -> Result<MpsTensor> {
        if self.matrices.len() != self.d {
            return Err(Error::Parse(format!(
                "document declares d = {} but holds {} matrices",
                self.d,
                self.matrices.len()
            )));
        }
        let bond = self.bond;
        let mut matrices = Vec::with_capacity(self.d);
        for (i, rows) in self.matrices.iter().enumerate() {
            if rows.len() != bond {
                return Err(Error::Parse(format!(
                    "matrix {i} has {} rows, expected D = {bond}",
                    rows.len()
                )));
            }
            let mut m = CMatrix::zeros(bond, bond);
            for (r, row) in rows.iter().enumerate() {
                if row.len() != bond {
                    return Err(Error::Parse(format!(
                        "matrix {i}, row {r} has {} entries, expected D = {bond}",
                        row.len()
                    )));
                }
                for (c, &[re, im]) in row.iter().enumerate() {
                    m[(r, c)] = Complex64::new(re, im);
                }
            }
            matrices.push(m);
        }
        MpsTensor::new(matrices).map_err(|e| Error::Parse(format!("{e}")))
    }
}

/// Parses a tensor document; parse failures carry a line/column diagnostic.
pub fn tensor_from_json(text: &str) -> Result<MpsTensor> {
    let doc: TensorDocument = serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    doc.into_tensor()
}

pub fn tensor_to_json(tensor: &MpsTensor) -> String {
    serde_json::to_string_pretty(&TensorDocument::from_tensor(tensor))
        .expect("tensor document serializes")
}

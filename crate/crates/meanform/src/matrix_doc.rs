//! JSON wire format for matrices.
//!
//! A matrix document is exactly `{"rows": R, "cols": C, "data": [[..], ..]}`
//! where `data` is an R x C nested array of `[re, im]` pairs. Unknown keys are
//! rejected, every entry must be finite, and emission uses shortest
//! round-trip float formatting so that emit(parse(doc)) is bit-identical for
//! canonically emitted documents.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cmatrix::CMatrix;
use crate::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DocumentError {
    #[error("invalid matrix document: {0}")]
    Json(String),
    #[error("data has {got} rows, document says {declared}")]
    RowCountMismatch { declared: usize, got: usize },
    #[error("row {row} has {got} entries, document says {declared} columns")]
    ColCountMismatch { row: usize, declared: usize, got: usize },
    #[error("entry ({row}, {col}) is not a finite [re, im] pair")]
    BadEntry { row: usize, col: usize },
    #[error("matrix dimensions must be nonzero")]
    Empty,
}

/// Serialized matrix: shape plus nested `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

impl MatrixDocument {
    /// Parses and validates a document from JSON text.
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let doc: MatrixDocument =
            serde_json::from_str(text).map_err(|e| DocumentError::Json(e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }

    /// Serializes to canonical JSON (shortest round-trip floats).
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix document serialization cannot fail")
    }

    pub fn validate(&self) -> Result<(), DocumentError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(DocumentError::Empty);
        }
        if self.data.len() != self.rows {
            return Err(DocumentError::RowCountMismatch {
                declared: self.rows,
                got: self.data.len(),
            });
        }
        for (i, row) in self.data.iter().enumerate() {
            if row.len() != self.cols {
                return Err(DocumentError::ColCountMismatch {
                    row: i,
                    declared: self.cols,
                    got: row.len(),
                });
            }
            for (j, pair) in row.iter().enumerate() {
                if !pair[0].is_finite() || !pair[1].is_finite() {
                    return Err(DocumentError::BadEntry { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Converts to the in-memory matrix type.
    pub fn to_matrix(&self) -> Result<CMatrix, DocumentError> {
        self.validate()?;
        Ok(CMatrix::from_fn(self.rows, self.cols, |i, j| {
            C64::new(self.data[i][j][0], self.data[i][j][1])
        }))
    }

    pub fn from_matrix(m: &CMatrix) -> Self {
        let data = (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| {
                        let z = m.get(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        MatrixDocument { rows: m.rows(), cols: m.cols(), data }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_canonical_document() {
        let text = r#"{"rows":2,"cols":2,"data":[[[0.0,0.0],[1.0,0.0]],[[0.0,0.0],[0.0,0.0]]]}"#;
        let doc = MatrixDocument::from_json(text).unwrap();
        let m = doc.to_matrix().unwrap();
        assert_eq!(m.get(0, 1).re, 1.0);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = r#"{"rows":1,"cols":1,"data":[[[1,0]]],"extra":3}"#;
        assert!(matches!(MatrixDocument::from_json(text), Err(DocumentError::Json(_))));
    }

    #[test]
    fn rejects_shape_lies() {
        let text = r#"{"rows":2,"cols":1,"data":[[[1,0]]]}"#;
        assert!(matches!(
            MatrixDocument::from_json(text),
            Err(DocumentError::RowCountMismatch { .. })
        ));
    }

    #[test]
    fn rejects_non_finite_entries() {
        let mut doc = MatrixDocument {
            rows: 1,
            cols: 1,
            data: vec![vec![[f64::INFINITY, 0.0]]],
        };
        assert!(doc.validate().is_err());
        doc.data[0][0] = [1.0, 0.0];
        assert!(doc.validate().is_ok());
    }

    #[test]
    fn emit_parse_round_trip_is_bit_identical() {
        let m = CMatrix::from_complex_rows(&[
            vec![(0.1, -0.25), (1.0 / 3.0, 2e-17)],
            vec![(-4.5e300, 0.0), (7.0, -1.0 / 7.0)],
        ]);
        let emitted = MatrixDocument::from_matrix(&m).to_json();
        let reparsed = MatrixDocument::from_json(&emitted).unwrap();
        assert_eq!(emitted, reparsed.to_json());
        assert!(reparsed.to_matrix().unwrap().approx_eq(&m, 0.0));
    }
}

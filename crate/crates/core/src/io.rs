//! JSON file formats for matrices, channels and ensembles.
//!
//! A matrix is `{"dim": d, "re": [[..]], "im": [[..]]}` with both parts d×d.
//! A channel is `{"dim": d, "operators": [matrix, ...]}`. An ensemble is a
//! list of `{"weight": p, "state": matrix}` entries.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{validate_density, ComplexMatrix, DensityMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        for part in [&self.re, &self.im] {
            if part.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: part.len(),
                });
            }
            for (row, entries) in part.iter().enumerate() {
                if entries.len() != d {
                    return Err(Error::Ragged {
                        row,
                        len: entries.len(),
                        dim: d,
                    });
                }
            }
        }
        ComplexMatrix::from_rows(
            self.re
                .iter()
                .zip(&self.im)
                .map(|(r, i)| {
                    r.iter()
                        .zip(i)
                        .map(|(&a, &b)| Complex64::new(a, b))
                        .collect()
                })
                .collect(),
        )
    }
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixJson {
            dim: m.dim(),
            re: m.rows().map(|r| r.iter().map(|z| z.re).collect()).collect(),
            im: m.rows().map(|r| r.iter().map(|z| z.im).collect()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub dim: usize,
    pub operators: Vec<MatrixJson>,
}

impl From<&KrausChannel> for ChannelJson {
    fn from(ch: &KrausChannel) -> Self {
        ChannelJson {
            dim: ch.dim(),
            operators: ch.operators().iter().map(MatrixJson::from).collect(),
        }
    }
}

impl ChannelJson {
    pub fn to_operators(&self) -> Result<Vec<ComplexMatrix>> {
        self.operators
            .iter()
            .map(|op| {
                let m = op.to_matrix()?;
                if m.dim() != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        found: m.dim(),
                    });
                }
                Ok(m)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleEntryJson {
    pub weight: f64,
    pub state: MatrixJson,
}

/// JSON decoding failure or a well-formed file describing an invalid object.
#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] Error),
}

pub fn parse_matrix(text: &str) -> std::result::Result<ComplexMatrix, ParseError> {
    let json: MatrixJson = serde_json::from_str(text)?;
    Ok(json.to_matrix()?)
}

pub fn parse_density(text: &str, tol: f64) -> std::result::Result<DensityMatrix, ParseError> {
    Ok(validate_density(parse_matrix(text)?, tol)?)
}

pub fn parse_channel(text: &str, tol: f64) -> std::result::Result<KrausChannel, ParseError> {
    let json: ChannelJson = serde_json::from_str(text)?;
    Ok(KrausChannel::validate(json.to_operators()?, tol)?)
}

pub fn parse_ensemble(
    text: &str,
    tol: f64,
) -> std::result::Result<Vec<(f64, DensityMatrix)>, ParseError> {
    let json: Vec<EnsembleEntryJson> = serde_json::from_str(text)?;
    json.into_iter()
        .map(|e| Ok((e.weight, validate_density(e.state.to_matrix()?, tol)?)))
        .collect()
}

pub fn density_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(&MatrixJson::from(rho.matrix())).expect("matrix serializes")
}

pub fn channel_to_json(ch: &KrausChannel) -> String {
    serde_json::to_string(&ChannelJson::from(ch)).expect("channel serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_three_level_state() {
        let text = r#"{"dim":3,"re":[[0.25,0,0.25],[0,0.5,0],[0.25,0,0.25]],"im":[[0,0,0],[0,0,0],[0,0,0]]}"#;
        let rho = parse_density(text, 1e-8).unwrap();
        assert_eq!(rho.dim(), 3);
        assert!((rho.purity() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_ragged_real_part() {
        let text = r#"{"dim":2,"re":[[1,0],[0]],"im":[[0,0],[0,0]]}"#;
        assert!(matches!(
            parse_matrix(text),
            Err(ParseError::Invalid(Error::Ragged { row: 1, .. }))
        ));
    }

    #[test]
    fn rejects_ragged_imaginary_part() {
        let text = r#"{"dim":2,"re":[[1,0],[0,0]],"im":[[0,0,0],[0,0]]}"#;
        assert!(matches!(
            parse_matrix(text),
            Err(ParseError::Invalid(Error::Ragged { row: 0, .. }))
        ));
    }

    #[test]
    fn rejects_wrong_row_count() {
        let text = r#"{"dim":3,"re":[[1,0,0],[0,0,0]],"im":[[0,0,0],[0,0,0],[0,0,0]]}"#;
        assert!(matches!(
            parse_matrix(text),
            Err(ParseError::Invalid(Error::DimensionMismatch { .. }))
        ));
    }

    #[test]
    fn rejects_invalid_state() {
        let text = r#"{"dim":2,"re":[[1,0],[0,0.1]],"im":[[0,0],[0,0]]}"#;
        assert!(matches!(
            parse_density(text, 1e-8),
            Err(ParseError::Invalid(Error::TraceNotOne { .. }))
        ));
    }

    #[test]
    fn complex_entries_round_trip() {
        let m = ComplexMatrix::from_rows(vec![
            vec![Complex64::new(0.5, 0.0), Complex64::new(0.1, -0.3)],
            vec![Complex64::new(0.1, 0.3), Complex64::new(0.5, 0.0)],
        ])
        .unwrap();
        let text = serde_json::to_string(&MatrixJson::from(&m)).unwrap();
        assert_eq!(parse_matrix(&text).unwrap(), m);
    }
}

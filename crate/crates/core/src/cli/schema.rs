//! JSON input document shared by every command.
//!
//! Complex numbers are `[re, im]`; points are lists of complex coordinates;
//! matrices are row-major lists of rows.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ball::{BallAutomorphism, Polynomial};
use crate::curve::CurveEmbedding;
use crate::error::{Error, Result};
use crate::kernel::BallPoint;
use crate::pick::Targets;

pub type ComplexDoc = [f64; 2];
pub type PointDoc = Vec<ComplexDoc>;
pub type MatrixDoc = Vec<Vec<ComplexDoc>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetsDoc {
    Scalar(Vec<ComplexDoc>),
    Matrix(Vec<MatrixDoc>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDoc {
    pub b: Vec<ComplexDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomorphismDoc {
    pub unitary: MatrixDoc,
    pub base_point: PointDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceDoc {
    pub name: String,
    pub n: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<PointDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<TargetsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automorphism: Option<AutomorphismDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<Polynomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

pub fn complex(c: &ComplexDoc) -> Complex64 {
    Complex64::new(c[0], c[1])
}

pub fn complex_doc(c: Complex64) -> ComplexDoc {
    [c.re, c.im]
}

pub fn point(p: &PointDoc) -> Result<BallPoint> {
    BallPoint::new(p.iter().map(complex).collect())
}

pub fn point_doc(p: &BallPoint) -> PointDoc {
    p.coords().iter().copied().map(complex_doc).collect()
}

pub fn matrix(rows: &MatrixDoc) -> Result<DMatrix<Complex64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(Error::Shape("empty matrix".into()));
    }
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Shape("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| complex(&rows[i][j])))
}

pub fn matrix_doc(m: &DMatrix<Complex64>) -> MatrixDoc {
    m.row_iter()
        .map(|r| r.iter().copied().map(complex_doc).collect())
        .collect()
}

impl InputDoc {
    pub fn parse(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    fn require<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T> {
        field
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument(format!("input document needs \"{name}\"")))
    }

    pub fn ball_points(&self) -> Result<Vec<BallPoint>> {
        Self::require(&self.points, "points")?
            .iter()
            .map(point)
            .collect()
    }

    /// Points of one-dimensional documents, as disc coordinates.
    pub fn disc_points(&self) -> Result<Vec<Complex64>> {
        Self::require(&self.points, "points")?
            .iter()
            .map(|p| match p.as_slice() {
                [z] => Ok(complex(z)),
                _ => Err(Error::DimensionMismatch {
                    expected: 1,
                    got: p.len(),
                }),
            })
            .collect()
    }

    pub fn targets(&self) -> Result<Targets> {
        Ok(match Self::require(&self.targets, "targets")? {
            TargetsDoc::Scalar(v) => Targets::Scalar(v.iter().map(complex).collect()),
            TargetsDoc::Matrix(ms) => {
                Targets::Matrix(ms.iter().map(matrix).collect::<Result<_>>()?)
            }
        })
    }

    pub fn curve(&self) -> Result<CurveEmbedding> {
        CurveEmbedding::new(
            Self::require(&self.curve, "curve")?
                .b
                .iter()
                .map(complex)
                .collect(),
        )
    }

    pub fn automorphism(&self) -> Result<BallAutomorphism> {
        let doc = Self::require(&self.automorphism, "automorphism")?;
        BallAutomorphism::new(matrix(&doc.unitary)?, point(&doc.base_point)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_scalar_and_matrix_targets() {
        let doc =
            InputDoc::parse(r#"{"points": [[[0,0]], [[0.5,0]]], "targets": [[0,0],[0.5,0]]}"#)
                .unwrap();
        assert!(matches!(doc.targets().unwrap(), Targets::Scalar(v) if v.len() == 2));

        let doc = InputDoc::parse(
            r#"{"points": [[[0,0]]], "targets": [[[[0.1,0],[0,0]],[[0,0],[0.2,0]]]]}"#,
        )
        .unwrap();
        match doc.targets().unwrap() {
            Targets::Matrix(ms) => assert_eq!(ms[0].shape(), (2, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_errors_carry_positions() {
        let err = InputDoc::parse("{\n  \"points\": [[[0,0]]],\n  \"bogus\": 1\n}").unwrap_err();
        assert_eq!(err.line(), 3);
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn missing_sections_are_reported() {
        let doc = InputDoc::default();
        assert!(doc
            .ball_points()
            .unwrap_err()
            .to_string()
            .contains("points"));
        assert!(doc.curve().is_err());
    }
}

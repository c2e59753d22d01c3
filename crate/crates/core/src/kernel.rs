//! Drury-Arveson kernel, Gram matrices and the positive-semidefiniteness toolkit.
//!
//! Every matrix in this crate that has to be checked for positivity (Gram
//! matrices, Pick matrices, Schur products, kernel differences) goes through
//! [`HermitianMatrix`] and [`is_psd`].

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default PSD tolerance, relative to `max(1, max row sum)`.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Absolute asymmetry accepted when wrapping a caller-supplied matrix.
pub const HERMITIAN_TOL: f64 = 1e-14;

/// A point of the open unit ball in C^d.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallPoint {
    coords: Vec<Complex64>,
}

impl BallPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty("ball point coordinates"));
        }
        if coords
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite("ball point"));
        }
        let norm_sqr: f64 = coords.iter().map(|c| c.norm_sqr()).sum();
        if norm_sqr >= 1.0 {
            return Err(Error::OutsideBall {
                norm: norm_sqr.sqrt(),
            });
        }
        Ok(Self { coords })
    }

    pub fn from_real(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// A point of the unit disc, viewed as a ball point with d = 1.
    pub fn disc(z: Complex64) -> Result<Self> {
        Self::new(vec![z])
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            coords: vec![Complex64::new(0.0, 0.0); dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self, other> = sum self_i * conj(other_i)`.
    pub fn inner(&self, other: &BallPoint) -> Complex64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

/// Converts disc coordinates into one-dimensional ball points.
pub fn disc_points(zs: &[Complex64]) -> Result<Vec<BallPoint>> {
    zs.iter().map(|&z| BallPoint::disc(z)).collect()
}

/// Square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Wraps `m`, rejecting asymmetry above [`HERMITIAN_TOL`] and then
    /// symmetrizing.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::Empty("matrix"));
        }
        if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        let mut asymmetry: f64 = 0.0;
        for i in 0..rows {
            for j in i..rows {
                asymmetry = asymmetry.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if asymmetry > HERMITIAN_TOL {
            return Err(Error::NotHermitian { asymmetry });
        }
        Ok(Self::from_upper_fn(rows, |i, j| {
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        }))
    }

    /// Builds a matrix from its upper triangle; the lower triangle is the
    /// mirrored conjugate and the diagonal is forced real.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            entries[(i, i)] = Complex64::new(f(i, i).re, 0.0);
            for j in i + 1..n {
                let v = f(i, j);
                entries[(i, j)] = v;
                entries[(j, i)] = v.conj();
            }
        }
        Self { entries }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("rows must all have length n".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(rows[i][j], 0.0)
        }))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: DMatrix::from_element(n, n, Complex64::new(0.0, 0.0)),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_upper_fn(values.len(), |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.entries
    }

    /// `max_i sum_j |H_ij|`.
    pub fn max_row_sum(&self) -> f64 {
        self.entries
            .row_iter()
            .map(|r| r.iter().map(|c| c.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `H + c I`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut entries = self.entries.clone();
        for i in 0..self.dim() {
            entries[(i, i)] += Complex64::new(c, 0.0);
        }
        Self { entries }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            entries: self.entries.map(|x| x * c),
        }
    }

    /// `self - other`, both of the same size.
    pub fn sub(&self, other: &HermitianMatrix) -> Result<Self> {
        check_same_size(self, other)?;
        Ok(Self {
            entries: &self.entries - &other.entries,
        })
    }

    /// Entrywise rows as nested vectors, row-major.
    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        self.entries
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

fn check_same_size(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// Outcome of a positivity test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdCertificate {
    pub min_eigenvalue: f64,
    pub is_psd: bool,
    pub tolerance_used: f64,
    /// `-tolerance_used * max(1, max row sum)`; `is_psd` compares against this.
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsdStatus {
    Definite,
    /// Minimum eigenvalue within `[threshold, -threshold]`.
    Critical,
    Indefinite,
}

impl PsdCertificate {
    pub fn status(&self) -> PsdStatus {
        if !self.is_psd {
            PsdStatus::Indefinite
        } else if self.min_eigenvalue <= -self.threshold {
            PsdStatus::Critical
        } else {
            PsdStatus::Definite
        }
    }
}

/// `k_lambda(z) = 1 / (1 - <z, lambda>)`.
pub fn da_kernel(z: &BallPoint, lambda: &BallPoint) -> Result<Complex64> {
    lambda.check_dim(z.dim())?;
    Ok(kernel_unchecked(z, lambda))
}

pub(crate) fn kernel_unchecked(z: &BallPoint, lambda: &BallPoint) -> Complex64 {
    (Complex64::new(1.0, 0.0) - z.inner(lambda)).inv()
}

pub(crate) fn validate_points(points: &[BallPoint]) -> Result<usize> {
    let first = points.first().ok_or(Error::Empty("point list"))?;
    let dim = first.dim();
    for p in points {
        p.check_dim(dim)?;
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return Err(Error::DuplicatePoints {
                    first: i,
                    second: j,
                });
            }
        }
    }
    Ok(dim)
}

/// `G_ij = k(lambda_i, lambda_j) = <k_{lambda_j}, k_{lambda_i}>`.
pub fn gram(points: &[BallPoint]) -> Result<HermitianMatrix> {
    validate_points(points)?;
    Ok(HermitianMatrix::from_upper_fn(points.len(), |i, j| {
        kernel_unchecked(&points[i], &points[j])
    }))
}

/// Gram matrix of the normalized kernels `k_lambda / ||k_lambda||`.
pub fn normalized_gram(points: &[BallPoint]) -> Result<HermitianMatrix> {
    let g = gram(points)?;
    let scale: Vec<f64> = (0..g.dim()).map(|i| g.get(i, i).re.sqrt()).collect();
    Ok(HermitianMatrix::from_upper_fn(g.dim(), |i, j| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            g.get(i, j) / (scale[i] * scale[j])
        }
    }))
}

fn spectrum(h: &HermitianMatrix) -> Result<Vec<f64>> {
    if h.entries
        .iter()
        .any(|c| !c.re.is_finite() || !c.im.is_finite())
    {
        return Err(Error::NonFinite("matrix entries"));
    }
    let eig = SymmetricEigen::new(h.entries.clone());
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eigenvalues"));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn min_eigenvalue(h: &HermitianMatrix) -> Result<f64> {
    Ok(spectrum(h)?[0])
}

/// Smallest and largest eigenvalue.
pub fn eigenvalue_range(h: &HermitianMatrix) -> Result<(f64, f64)> {
    let s = spectrum(h)?;
    Ok((s[0], s[s.len() - 1]))
}

pub fn is_psd(h: &HermitianMatrix, tol: f64) -> Result<PsdCertificate> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "PSD tolerance must be positive, got {tol}"
        )));
    }
    let min = min_eigenvalue(h)?;
    let threshold = -tol * h.max_row_sum().max(1.0);
    Ok(PsdCertificate {
        min_eigenvalue: min,
        is_psd: min >= threshold,
        tolerance_used: tol,
        threshold,
    })
}

/// Entrywise (Hadamard) product.
pub fn schur_product(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    check_same_size(a, b)?;
    Ok(HermitianMatrix::from_upper_fn(a.dim(), |i, j| {
        a.get(i, j) * b.get(i, j)
    }))
}

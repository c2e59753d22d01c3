//! Automorphisms of the unit ball and the unitaries implementing them on
//! kernel functions.
//!
//! Every automorphism is stored as `z -> U phi_a(z)` where
//!
//! ```text
//! phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>),   s_a = sqrt(1 - |a|^2),
//! ```
//!
//! `P_a` is the orthogonal projection onto `span{a}` and `Q_a = I - P_a`.
//! `phi_a` is an involution exchanging `0` and `a`; in particular `phi_0 = -id`,
//! so the identity automorphism is `(-I, 0)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{kernel_unchecked, validate_points, BallPoint};
use crate::sampling::orthonormalize_columns;

/// Accepted deviation of `U^* U` from the identity.
pub const UNITARY_TOL: f64 = 1e-12;

type Vector = Vec<Complex64>;

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn involution_raw(a: &[Complex64], z: &[Complex64]) -> Vector {
    let one = Complex64::new(1.0, 0.0);
    let a_sqr: f64 = a.iter().map(|c| c.norm_sqr()).sum();
    let za = inner(z, a);
    let denom = one - za;
    if a_sqr == 0.0 {
        return z.iter().map(|c| -c).collect();
    }
    let s = (1.0 - a_sqr).sqrt();
    let proj = za / a_sqr;
    a.iter()
        .zip(z)
        .map(|(&ai, &zi)| {
            let p = proj * ai;
            (ai - p - (zi - p) * s) / denom
        })
        .collect()
}

fn mat_vec(m: &DMatrix<Complex64>, v: &[Complex64]) -> Vector {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// Ball automorphism `z -> U phi_a(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallAutomorphism {
    unitary: DMatrix<Complex64>,
    base_point: BallPoint,
}

impl BallAutomorphism {
    pub fn new(unitary: DMatrix<Complex64>, base_point: BallPoint) -> Result<Self> {
        let d = base_point.dim();
        if unitary.nrows() != d || unitary.ncols() != d {
            return Err(Error::Shape(format!(
                "unitary is {}x{}, base point has dimension {d}",
                unitary.nrows(),
                unitary.ncols()
            )));
        }
        if unitary
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite("unitary"));
        }
        let defect = (unitary.adjoint() * &unitary - DMatrix::<Complex64>::identity(d, d))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if defect > UNITARY_TOL {
            return Err(Error::InvalidArgument(format!(
                "matrix is not unitary (|U*U - I| = {defect:e})"
            )));
        }
        Ok(Self {
            unitary,
            base_point,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            unitary: -DMatrix::<Complex64>::identity(dim, dim),
            base_point: BallPoint::origin(dim),
        }
    }

    /// The linear automorphism `z -> U z`.
    pub fn from_unitary(unitary: DMatrix<Complex64>) -> Result<Self> {
        let d = unitary.nrows();
        Self::new(-unitary, BallPoint::origin(d))
    }

    pub fn dim(&self) -> usize {
        self.base_point.dim()
    }

    pub fn unitary(&self) -> &DMatrix<Complex64> {
        &self.unitary
    }

    /// The point `a` with `F(a) = 0`.
    pub fn base_point(&self) -> &BallPoint {
        &self.base_point
    }

    fn apply_raw(&self, z: &[Complex64]) -> Vector {
        mat_vec(&self.unitary, &involution_raw(self.base_point.coords(), z))
    }

    /// Recovers `(U, a)` for a map known to be an automorphism with
    /// `map(a) = 0`, reading `U = map o phi_a` off a scaled standard frame.
    fn canonicalize(map: impl Fn(&[Complex64]) -> Vector, base: Vector) -> Result<Self> {
        let d = base.len();
        let base_point = BallPoint::new(base)?;
        let mut unitary = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
        for k in 0..d {
            let mut e = vec![Complex64::new(0.0, 0.0); d];
            e[k] = Complex64::new(0.5, 0.0);
            let col = map(&involution_raw(base_point.coords(), &e));
            for (i, v) in col.into_iter().enumerate() {
                unitary[(i, k)] = v / 0.5;
            }
        }
        if !orthonormalize_columns(&mut unitary) {
            return Err(Error::InvalidArgument(
                "automorphism data is numerically degenerate".into(),
            ));
        }
        Self::new(unitary, base_point)
    }
}

/// `phi_a`, the involution exchanging `0` and `a`.
pub fn involution_at(a: &BallPoint) -> BallAutomorphism {
    BallAutomorphism {
        unitary: DMatrix::identity(a.dim(), a.dim()),
        base_point: a.clone(),
    }
}

pub fn apply(f: &BallAutomorphism, z: &BallPoint) -> Result<BallPoint> {
    z.check_dim(f.dim())?;
    BallPoint::new(f.apply_raw(z.coords()))
}

pub fn inverse(f: &BallAutomorphism) -> Result<BallAutomorphism> {
    // F^{-1} = phi_a o U^*, and F^{-1}(F(0)) = 0.
    let adjoint = f.unitary.adjoint();
    let a = f.base_point.coords().to_vec();
    let base = f.apply_raw(&vec![Complex64::new(0.0, 0.0); f.dim()]);
    BallAutomorphism::canonicalize(move |z| involution_raw(&a, &mat_vec(&adjoint, z)), base)
}

/// `F o G`.
pub fn compose(f: &BallAutomorphism, g: &BallAutomorphism) -> Result<BallAutomorphism> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    let g_inv = inverse(g)?;
    let base = g_inv.apply_raw(f.base_point.coords());
    BallAutomorphism::canonicalize(|z| f.apply_raw(&g.apply_raw(z)), base)
}

/// `|| phi_z(w) ||`.
pub fn pseudohyperbolic_distance(z: &BallPoint, w: &BallPoint) -> Result<f64> {
    w.check_dim(z.dim())?;
    let v = involution_raw(z.coords(), w.coords());
    Ok(v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitaryCoefficients {
    pub values: Vec<Complex64>,
}

/// `c_w = (1 - |alpha|^2)^{1/2} conj(k_alpha(w))` with `alpha = F^{-1}(0)`,
/// so that the implementing unitary sends `k_w` to `c_w k_{F(w)}`.
pub fn implementing_unitary_coeffs(
    f: &BallAutomorphism,
    points: &[BallPoint],
) -> Result<UnitaryCoefficients> {
    let alpha = f.base_point();
    let scale = (1.0 - alpha.norm_sqr()).sqrt();
    let values = points
        .iter()
        .map(|w| {
            w.check_dim(f.dim())?;
            Ok(kernel_unchecked(w, alpha).conj() * scale)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UnitaryCoefficients { values })
}

/// Maximum residual of a numerical identity check against its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualCheck {
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl ResidualCheck {
    pub fn new(max_residual: f64, tol: f64) -> Self {
        Self {
            max_residual,
            tol,
            pass: max_residual <= tol,
        }
    }
}

/// `max |c_w conj(c_v) k(F(v), F(w)) - k(v, w)|` for the supplied coefficients.
pub fn unitary_gram_residual(
    f: &BallAutomorphism,
    points: &[BallPoint],
    coeffs: &UnitaryCoefficients,
) -> Result<f64> {
    validate_points(points)?;
    if coeffs.values.len() != points.len() {
        return Err(Error::Shape("one coefficient per point required".into()));
    }
    let images = points
        .iter()
        .map(|p| apply(f, p))
        .collect::<Result<Vec<_>>>()?;
    let c = &coeffs.values;
    let mut worst: f64 = 0.0;
    for (v, (pv, fv)) in points.iter().zip(&images).enumerate() {
        for (w, (pw, fw)) in points.iter().zip(&images).enumerate() {
            let lhs = c[w] * c[v].conj() * kernel_unchecked(fv, fw);
            worst = worst.max((lhs - kernel_unchecked(pv, pw)).norm());
        }
    }
    Ok(worst)
}

/// Checks that `k_w -> c_w k_{F(w)}` preserves all kernel inner products.
pub fn verify_unitary_gram(
    f: &BallAutomorphism,
    points: &[BallPoint],
    tol: f64,
) -> Result<ResidualCheck> {
    let coeffs = implementing_unitary_coeffs(f, points)?;
    Ok(ResidualCheck::new(
        unitary_gram_residual(f, points, &coeffs)?,
        tol,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: Complex64,
    pub powers: Vec<u32>,
}

/// Polynomial in `dim` complex variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub dim: usize,
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<Monomial>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.powers.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: t.powers.len(),
            });
        }
        Ok(Self { dim, terms })
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        Self {
            dim,
            terms: vec![Monomial {
                coeff: c,
                powers: vec![0; dim],
            }],
        }
    }

    /// `coeff * prod z_i^{powers_i}` as a one-term polynomial.
    pub fn monomial(coeff: Complex64, powers: Vec<u32>) -> Self {
        Self {
            dim: powers.len(),
            terms: vec![Monomial { coeff, powers }],
        }
    }

    pub fn plus(mut self, other: Polynomial) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        self.terms.extend(other.terms);
        Ok(self)
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                t.powers
                    .iter()
                    .zip(z)
                    .fold(t.coeff, |acc, (&p, &zi)| acc * zi.powu(p))
            })
            .sum()
    }
}

/// Checks `U M_f^* U^* k_w = conj((f o F)(w)) k_w` on the kernel span.
///
/// The coefficient of `k_w` in `U M_f^* U^* k_w` is obtained by projecting
/// onto `k_w`: `|c_w|^2 conj(f(F(w))) ||k_{F(w)}||^2 / ||k_w||^2`.
pub fn verify_composition_action(
    f: &BallAutomorphism,
    poly: &Polynomial,
    points: &[BallPoint],
    tol: f64,
) -> Result<ResidualCheck> {
    if poly.dim != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: poly.dim,
        });
    }
    validate_points(points)?;
    let coeffs = implementing_unitary_coeffs(f, points)?;
    let mut worst: f64 = 0.0;
    for (w, c) in points.iter().zip(&coeffs.values) {
        let fw = apply(f, w)?;
        let value = poly.eval(fw.coords());
        let coefficient =
            c.norm_sqr() * value.conj() * kernel_unchecked(&fw, &fw).re / kernel_unchecked(w, w).re;
        worst = worst.max((coefficient - value.conj()).norm());
    }
    Ok(ResidualCheck::new(worst, tol))
}

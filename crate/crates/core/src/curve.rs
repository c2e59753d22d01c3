//! Pullback kernels along holomorphic curves `h(z) = (b_1 z, b_2 z^2, ...)`.
//!
//! The pullback kernel is `1 / (1 - <h(z), h(w)>) = sum_n a_n (z conj(w))^n`
//! with `a_0 = 1` and `a_n = |b_1|^2 a_{n-1} + ... + |b_n|^2 a_0`.
//! It is comparable to the Szegő kernel exactly when the `a_n` stay
//! between two positive constants.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{disc_points, gram, is_psd, validate_points, HermitianMatrix, PsdCertificate};

pub const DEFAULT_N_MAX: usize = 512;

const MASS_SLACK: f64 = 1e-12;

/// Holomorphic curve `z -> (b_1 z, b_2 z^2, ..., b_N z^N)` into the ball,
/// truncated at `N = truncation_length()`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveEmbedding {
    /// `coeffs[n - 1] = b_n`.
    coeffs: Vec<Complex64>,
    /// `1 - sum |b_n|^2` over the stored coefficients.
    tail_mass: f64,
}

impl CurveEmbedding {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Empty("curve coefficients"));
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite("curve coefficients"));
        }
        let mass: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if mass > 1.0 + MASS_SLACK {
            return Err(Error::InvalidArgument(format!(
                "coefficient mass {mass} exceeds 1"
            )));
        }
        Ok(Self {
            coeffs,
            tail_mass: (1.0 - mass).max(0.0),
        })
    }

    /// Real coefficients `b_n = sqrt(b_sq[n-1])`.
    pub fn from_sq_moduli(b_sq: &[f64]) -> Result<Self> {
        if b_sq.iter().any(|&x| x < 0.0) {
            return Err(Error::InvalidArgument("negative |b_n|^2".into()));
        }
        Self::new(
            b_sq.iter()
                .map(|&x| Complex64::new(x.sqrt(), 0.0))
                .collect(),
        )
    }

    /// First `n_max` coefficients of an infinite curve.
    pub fn from_fn(n_max: usize, f: impl Fn(usize) -> Complex64) -> Result<Self> {
        Self::new((1..=n_max).map(f).collect())
    }

    /// `h(z) = z`.
    pub fn identity() -> Self {
        Self {
            coeffs: vec![Complex64::new(1.0, 0.0)],
            tail_mass: 0.0,
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn truncation_length(&self) -> usize {
        self.coeffs.len()
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn is_injective(&self) -> bool {
        self.coeffs[0] != Complex64::new(0.0, 0.0)
    }

    pub fn sq_moduli(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| *c != Complex64::new(0.0, 0.0))
            .map_or(0, |i| i + 1)
    }

    /// `<h(z), h(w)> = sum |b_n|^2 (z conj(w))^n`.
    pub fn inner(&self, z: Complex64, w: Complex64) -> Complex64 {
        let x = z * w.conj();
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, b| (acc + b.norm_sqr()) * x)
    }
}

/// Pullback Gram matrix and a bound on the entrywise truncation error.
#[derive(Debug, Clone, PartialEq)]
pub struct PullbackGram {
    pub gram: HermitianMatrix,
    /// `tail_mass * q^{N+1} / (1 - q)^2`, `q = max |z_i z_j|`.
    pub truncation_bound: f64,
}

pub fn pullback_gram(h: &CurveEmbedding, zs: &[Complex64]) -> Result<PullbackGram> {
    validate_points(&disc_points(zs)?)?;
    let one = Complex64::new(1.0, 0.0);
    let gram = HermitianMatrix::from_upper_fn(zs.len(), |i, j| (one - h.inner(zs[i], zs[j])).inv());
    let q = zs
        .iter()
        .flat_map(|a| zs.iter().map(move |b| a.norm() * b.norm()))
        .fold(0.0, f64::max);
    let truncation_bound =
        h.tail_mass * q.powi(h.truncation_length() as i32 + 1) / ((1.0 - q) * (1.0 - q));
    Ok(PullbackGram {
        gram,
        truncation_bound,
    })
}

/// `[1 / (1 - z_i conj(z_j))]`.
pub fn szego_gram(zs: &[Complex64]) -> Result<HermitianMatrix> {
    gram(&disc_points(zs)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PullbackSeries {
    /// `a_0, ..., a_N` as floats (rounded from the rationals in exact mode).
    pub a: Vec<f64>,
    pub exact: bool,
    /// Exact values when `exact` is set.
    pub rational: Option<Vec<BigRational>>,
}

fn validate_sq(b_sq: &[f64]) -> Result<()> {
    if let Some(i) = b_sq.iter().position(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "|b_{}|^2 = {} must be finite and nonnegative",
            i + 1,
            b_sq[i]
        )));
    }
    let mass: f64 = b_sq.iter().sum();
    if mass > 1.0 + MASS_SLACK {
        return Err(Error::InvalidArgument(format!(
            "sum of |b_n|^2 is {mass}, exceeds 1"
        )));
    }
    Ok(())
}

/// Evaluates `a_0..a_n_max`; `b_sq[i]` is `|b_{i+1}|^2`, missing terms are 0.
///
/// In exact mode every input double is converted to the rational it
/// represents and the recursion runs in `BigRational`.
pub fn coeff_recursion(b_sq: &[f64], n_max: usize, exact: bool) -> Result<PullbackSeries> {
    validate_sq(b_sq)?;
    if exact {
        let rats = b_sq
            .iter()
            .map(|&x| BigRational::from_float(x).ok_or(Error::NonFinite("|b_n|^2")))
            .collect::<Result<Vec<_>>>()?;
        return Ok(coeff_recursion_rational(&rats, n_max));
    }
    let mut a = Vec::with_capacity(n_max + 1);
    a.push(1.0);
    for n in 1..=n_max {
        let reach = n.min(b_sq.len());
        let v: f64 = (1..=reach).map(|i| b_sq[i - 1] * a[n - i]).sum();
        a.push(v);
    }
    Ok(PullbackSeries {
        a,
        exact: false,
        rational: None,
    })
}

pub fn coeff_recursion_rational(b_sq: &[BigRational], n_max: usize) -> PullbackSeries {
    let mut a: Vec<BigRational> = Vec::with_capacity(n_max + 1);
    a.push(BigRational::one());
    for n in 1..=n_max {
        let reach = n.min(b_sq.len());
        let mut v = BigRational::zero();
        for i in 1..=reach {
            if !b_sq[i - 1].is_zero() {
                v += &b_sq[i - 1] * &a[n - i];
            }
        }
        a.push(v);
    }
    PullbackSeries {
        a: a.iter().map(rational_to_f64).collect(),
        exact: true,
        rational: Some(a),
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    BoundedBelowSoFar,
    Decaying,
}

/// Truncation-level statistics of `a_0..a_N`; not an asymptotic statement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceVerdict {
    pub min_a: f64,
    pub max_a: f64,
    /// `max_a / min_a`.
    pub ratio: f64,
    /// Length of the trailing window used for the trend.
    pub window: usize,
    /// Minimum over the trailing window divided by the minimum before it.
    pub tail_to_head_min: f64,
    pub verdict: Trend,
}

/// The trailing quarter of the series is `decaying` when its minimum falls
/// below half of the minimum over the preceding terms.
pub fn equivalence_verdict(s: &PullbackSeries) -> Result<EquivalenceVerdict> {
    let a = &s.a;
    if a.is_empty() {
        return Err(Error::Empty("pullback series"));
    }
    let min_a = a.iter().copied().fold(f64::INFINITY, f64::min);
    let max_a = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let window = (a.len() / 4).max(1);
    let (head, tail) = a.split_at(a.len() - window);
    let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let head_min = head.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_to_head_min = if head.is_empty() {
        1.0
    } else {
        tail_min / head_min
    };
    let verdict = if tail_to_head_min < 0.5 {
        Trend::Decaying
    } else {
        Trend::BoundedBelowSoFar
    };
    Ok(EquivalenceVerdict {
        min_a,
        max_a,
        ratio: max_a / min_a,
        window,
        tail_to_head_min,
        verdict,
    })
}

/// PSD certificate of `factor * pullback_gram - szego_gram` (or the reverse
/// difference when `factor` is `None`, i.e. `szego - pullback`).
fn difference_certificate(
    h: &CurveEmbedding,
    zs: &[Complex64],
    factor: Option<f64>,
    tol: f64,
) -> Result<PsdCertificate> {
    let pulled = pullback_gram(h, zs)?.gram;
    let szego = szego_gram(zs)?;
    let diff = match factor {
        None => szego.sub(&pulled)?,
        Some(f) => pulled.scaled(f).sub(&szego)?,
    };
    is_psd(&diff, tol)
}

/// `[1/(1 - z_i conj(z_j))] - [1/(1 - <h(z_i), h(z_j)>)] >= 0`.
pub fn gram_domination_check(
    h: &CurveEmbedding,
    zs: &[Complex64],
    tol: f64,
) -> Result<PsdCertificate> {
    difference_certificate(h, zs, None, tol)
}

/// `factor * [1/(1 - <h(z_i), h(z_j)>)] - [1/(1 - z_i conj(z_j))]`, PSD test.
pub fn reverse_domination_check(
    h: &CurveEmbedding,
    zs: &[Complex64],
    factor: f64,
    tol: f64,
) -> Result<PsdCertificate> {
    difference_certificate(h, zs, Some(factor), tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallExampleBound {
    /// `1 / |b_1|`.
    pub c: f64,
    /// Highest exponent.
    pub n: usize,
    /// Smallest `M >= 0` with `2^M >= n`.
    pub m: u32,
    /// `prod_{k=1}^M (C^{2^k} + 1)`.
    pub d: f64,
    pub certificate: PsdCertificate,
}

/// Comparison constant for a finite monomial curve with unit coefficient
/// mass, certified on `zs` by `D * pullback - szego >= 0`.
pub fn ball_example_bound(
    h: &CurveEmbedding,
    zs: &[Complex64],
    tol: f64,
) -> Result<BallExampleBound> {
    if !h.is_injective() {
        return Err(Error::InvalidArgument(
            "first coefficient must be nonzero".into(),
        ));
    }
    if h.tail_mass() > MASS_SLACK {
        return Err(Error::InvalidArgument(format!(
            "coefficient mass must be 1, missing {}",
            h.tail_mass()
        )));
    }
    let c = 1.0 / h.coeffs()[0].norm();
    let n = h.degree();
    let mut m = 0u32;
    while (1usize << m) < n {
        m += 1;
    }
    let d: f64 = (1..=m).map(|k| c.powi(1 << k) + 1.0).product();
    let certificate = reverse_domination_check(h, zs, d, tol)?;
    Ok(BallExampleBound {
        c,
        n,
        m,
        d,
        certificate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checkpoint {
    pub k: usize,
    /// `n_{k+1} - 1`.
    pub index: usize,
    pub value: f64,
    /// `1 / (k + 1)`.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VanishingExample {
    pub curve: CurveEmbedding,
    /// `n_1 < ... < n_K`, the exponents carrying `|b_{n_k}|^2 = 2^{-k}`.
    pub indices: Vec<usize>,
    pub checkpoints: Vec<Checkpoint>,
    /// `a_0..a_{n_{K+1}-1}`.
    pub series: Vec<f64>,
}

/// Curve with `|b_{n_k}|^2 = 2^{-k}` and zeros elsewhere, `n_1 = 1`, where
/// `n_{k+1} - 1` is the first index `m >= n_k` with `a_m <= 1/(k+1)`.
///
/// The recursion is run directly; only the `k` nonzero coefficients enter
/// each step.
pub fn construct_vanishing_example(k_max: usize, n_max: usize) -> Result<VanishingExample> {
    if k_max == 0 {
        return Err(Error::InvalidArgument(
            "need at least one checkpoint".into(),
        ));
    }
    let mut a = vec![1.0];
    let mut support: Vec<(usize, f64)> = vec![(1, 0.5)];
    let mut checkpoints = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let n_k = support[k - 1].0;
        let threshold = 1.0 / (k + 1) as f64;
        loop {
            let m = a.len();
            if m > n_max {
                return Err(Error::TruncationExceeded {
                    max_len: n_max,
                    achieved: checkpoints.len(),
                    requested: k_max,
                });
            }
            let v: f64 = support
                .iter()
                .take_while(|(i, _)| *i <= m)
                .map(|&(i, b)| b * a[m - i])
                .sum();
            a.push(v);
            if m >= n_k && v <= threshold {
                checkpoints.push(Checkpoint {
                    k,
                    index: m,
                    value: v,
                    threshold,
                });
                break;
            }
        }
        if k < k_max {
            support.push((a.len(), 0.5f64.powi(k as i32 + 1)));
        }
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); a.len() - 1];
    for &(i, b) in &support {
        coeffs[i - 1] = Complex64::new(b.sqrt(), 0.0);
    }
    Ok(VanishingExample {
        curve: CurveEmbedding::new(coeffs)?,
        indices: support.iter().map(|&(i, _)| i).collect(),
        checkpoints,
        series: a,
    })
}

//! Discrete sequences in the disc: Blaschke sums and products, Riesz-system
//! diagnostics, and the named sequence pairs with their intertwining maps.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::ball::pseudohyperbolic_distance;
use crate::error::{Error, Result};
use crate::kernel::{disc_points, eigenvalue_range, normalized_gram, BallPoint};

/// Terms closer than this to the unit circle are rejected.
pub const MIN_GAP: f64 = 1e-15;

const MIN_SEPARATION: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SequenceName {
    /// `v_n = 1 - 1/n^2`.
    #[serde(rename = "V-inv-square")]
    VInvSquare,
    /// `w_n = 1 - exp(-n^2)`.
    #[serde(rename = "W-gauss")]
    WGauss,
    /// `w_n = 1 - n^{-2} exp(-n^2)`.
    #[serde(rename = "W-sec7")]
    WSec7,
    /// `w_n = (1 - exp(-n)) v_n / |v_n|` over `V-inv-square`, with direction 1 at `v_1 = 0`.
    #[serde(rename = "W-radial")]
    WRadial,
}

impl SequenceName {
    pub const ALL: [SequenceName; 4] = [
        SequenceName::VInvSquare,
        SequenceName::WGauss,
        SequenceName::WSec7,
        SequenceName::WRadial,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SequenceName::VInvSquare => "V-inv-square",
            SequenceName::WGauss => "W-gauss",
            SequenceName::WSec7 => "W-sec7",
            SequenceName::WRadial => "W-radial",
        }
    }

    /// `1 - |z_n|`, evaluated without cancellation.
    fn gap(self, n: usize) -> f64 {
        let x = n as f64;
        match self {
            SequenceName::VInvSquare => 1.0 / (x * x),
            SequenceName::WGauss => (-x * x).exp(),
            SequenceName::WSec7 => (-x * x).exp() / (x * x),
            SequenceName::WRadial => (-x).exp(),
        }
    }
}

impl fmt::Display for SequenceName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn registry_listing() -> String {
    SequenceName::ALL
        .iter()
        .map(|n| n.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

impl FromStr for SequenceName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SequenceName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::UnknownSequence {
                name: s.to_string(),
                known: registry_listing(),
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Named(SequenceName),
    Explicit(Vec<Complex64>),
}

/// Sequence `z_1, z_2, ...` of distinct points in the open disc.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscSequence {
    generator: Generator,
}

impl DiscSequence {
    pub fn named(name: SequenceName) -> Self {
        Self {
            generator: Generator::Named(name),
        }
    }

    pub fn explicit(points: Vec<Complex64>) -> Result<Self> {
        crate::kernel::validate_points(&disc_points(&points)?)?;
        Ok(Self {
            generator: Generator::Explicit(points),
        })
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// `1 - |z_n|` for `n >= 1`.
    pub fn gap(&self, n: usize) -> Result<f64> {
        let gap = match &self.generator {
            Generator::Named(name) => {
                if n == 0 {
                    return Err(Error::InvalidArgument("sequences start at n = 1".into()));
                }
                name.gap(n)
            }
            Generator::Explicit(pts) => 1.0 - self.explicit_point(pts, n)?.norm(),
        };
        if gap < MIN_GAP {
            return Err(Error::Underflow { index: n, gap });
        }
        Ok(gap)
    }

    fn explicit_point(&self, pts: &[Complex64], n: usize) -> Result<Complex64> {
        if n == 0 || n > pts.len() {
            return Err(Error::InvalidArgument(format!(
                "index {n} outside the finite sequence of length {}",
                pts.len()
            )));
        }
        Ok(pts[n - 1])
    }

    pub fn point(&self, n: usize) -> Result<Complex64> {
        let gap = self.gap(n)?;
        match &self.generator {
            Generator::Named(_) => Ok(Complex64::new(1.0 - gap, 0.0)),
            Generator::Explicit(pts) => self.explicit_point(pts, n),
        }
    }

    /// `z_1..z_n`.
    pub fn points(&self, n: usize) -> Result<Vec<Complex64>> {
        (1..=n).map(|k| self.point(k)).collect()
    }
}

pub fn paper_sequences(name: &str) -> Result<DiscSequence> {
    Ok(DiscSequence::named(name.parse()?))
}

/// `sum_{n <= N} (1 - |z_n|)`.
pub fn blaschke_sum(s: &DiscSequence, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    (1..=n).map(|k| s.gap(k)).sum()
}

/// Finite Blaschke product with the given zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<Complex64>,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<Complex64>) -> Result<Self> {
        if let Some(z) = zeros.iter().find(|z| z.norm().is_nan() || z.norm() >= 1.0) {
            return Err(Error::OutsideBall { norm: z.norm() });
        }
        Ok(Self { zeros })
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }
}

/// `prod (|a|/a) (a - z) / (1 - conj(a) z)`, with factor `z` for `a = 0`.
/// A retained zero evaluates to exactly 0.
pub fn blaschke_eval(b: &BlaschkeProduct, z: Complex64) -> Result<Complex64> {
    if z.norm().is_nan() || z.norm() > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "Blaschke products are evaluated on the closed disc, |z| = {}",
            z.norm()
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    Ok(b.zeros.iter().fold(one, |acc, &a| {
        if a == Complex64::new(0.0, 0.0) {
            acc * z
        } else {
            acc * (a.norm() / a) * (a - z) / (one - a.conj() * z)
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RieszDiagnostic {
    pub n: usize,
    pub min_eig: f64,
    pub max_eig: f64,
    /// `max_eig / min_eig`.
    pub condition: f64,
}

fn leading_points(s: &DiscSequence, n: usize) -> Result<Vec<Complex64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need N >= 2, got {n}")));
    }
    let pts = s.points(n)?;
    for i in 0..n {
        for j in i + 1..n {
            if (pts[i] - pts[j]).norm() < MIN_SEPARATION {
                return Err(Error::InvalidArgument(format!(
                    "points {} and {} are closer than {MIN_SEPARATION:e}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(pts)
}

/// Extreme eigenvalues of the normalized kernel Gram matrix of `z_1..z_N`.
///
/// A smallest eigenvalue bounded away from 0 as `N` grows is the finite
/// signature of an interpolating sequence.
pub fn gram_riesz_diagnostic(s: &DiscSequence, n: usize) -> Result<RieszDiagnostic> {
    let pts = leading_points(s, n)?;
    let (min_eig, max_eig) = eigenvalue_range(&normalized_gram(&disc_points(&pts)?)?)?;
    Ok(RieszDiagnostic {
        n,
        min_eig,
        max_eig,
        condition: max_eig / min_eig,
    })
}

/// `min_{i < j <= N} d(z_i, z_j)` in the pseudohyperbolic metric.
pub fn separation_constant(s: &DiscSequence, n: usize) -> Result<f64> {
    let pts = disc_points(&leading_points(s, n)?)?;
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            best = best.min(pseudohyperbolic_distance(&pts[i], &pts[j])?);
        }
    }
    Ok(best)
}

/// `h(z) = 1 - exp(1/(z - 1))`, carrying `1 - 1/n^2` to `1 - exp(-n^2)`.
pub fn h_map(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    one - ((z - one).inv()).exp()
}

/// `g(z) = ((log(1-z) + 1) / log(1-z)) (1 - B(z)/B(0))`, principal log.
pub fn g_map(z: Complex64, b: &BlaschkeProduct) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let log = (one - z).ln();
    let b0 = blaschke_eval(b, Complex64::new(0.0, 0.0))?;
    if b0 == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument("B(0) = 0".into()));
    }
    Ok((log + one) / log * (one - blaschke_eval(b, z)? / b0))
}

/// `f(z) = 1 + (z - 1) exp(1/(z - 1))`, carrying `1 - n^{-2}` to `1 - n^{-2} exp(-n^2)`.
pub fn f_map(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    one + (z - one) * ((z - one).inv()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundtripReport {
    pub n: usize,
    /// `max |h(v_n) - w_n|`.
    pub max_h_residual: f64,
    /// `max |g(w_n) - v_n|`.
    pub max_g_residual: f64,
    /// `max |h(g(w_n)) - w_n|`.
    pub max_hg_residual: f64,
    /// `max |g(h(v_n)) - v_n|`.
    pub max_gh_residual: f64,
    /// `max |f(z_n) - w_n|` for the `V-inv-square` / `W-sec7` pair.
    pub max_f_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn roundtrip_check(n: usize, tol: f64) -> Result<RoundtripReport> {
    roundtrip_check_with(n, tol, h_map)
}

/// [`roundtrip_check`] with a substitute for `h`.
pub fn roundtrip_check_with(
    n: usize,
    tol: f64,
    h: impl Fn(Complex64) -> Complex64,
) -> Result<RoundtripReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let v = DiscSequence::named(SequenceName::VInvSquare).points(n)?;
    let w = DiscSequence::named(SequenceName::WGauss).points(n)?;
    let w7 = DiscSequence::named(SequenceName::WSec7).points(n)?;
    let b = BlaschkeProduct::new(w.clone())?;

    let mut r = RoundtripReport {
        n,
        max_h_residual: 0.0,
        max_g_residual: 0.0,
        max_hg_residual: 0.0,
        max_gh_residual: 0.0,
        max_f_residual: 0.0,
        tol,
        pass: false,
    };
    for k in 0..n {
        let hv = h(v[k]);
        let gw = g_map(w[k], &b)?;
        r.max_h_residual = r.max_h_residual.max((hv - w[k]).norm());
        r.max_g_residual = r.max_g_residual.max((gw - v[k]).norm());
        r.max_hg_residual = r.max_hg_residual.max((h(gw) - w[k]).norm());
        r.max_gh_residual = r.max_gh_residual.max((g_map(hv, &b)? - v[k]).norm());
        r.max_f_residual = r.max_f_residual.max((f_map(v[k]) - w7[k]).norm());
    }
    r.pass = [
        r.max_h_residual,
        r.max_g_residual,
        r.max_hg_residual,
        r.max_gh_residual,
        r.max_f_residual,
    ]
    .iter()
    .all(|&x| x <= tol);
    Ok(r)
}

/// The first `n` terms as ball points, for the JSON point format.
pub fn export_points(s: &DiscSequence, n: usize) -> Result<Vec<BallPoint>> {
    disc_points(&s.points(n)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn named_terms() {
        let v = paper_sequences("V-inv-square").unwrap();
        assert!((v.point(3).unwrap().re - 8.0 / 9.0).abs() < 1e-16);
        assert_eq!(v.point(1).unwrap(), c(0.0, 0.0));
        let w = paper_sequences("W-gauss").unwrap();
        assert!((w.point(1).unwrap().re - (1.0 - (-1f64).exp())).abs() < 1e-16);
        let w7 = paper_sequences("W-sec7").unwrap();
        assert!((w7.point(2).unwrap().re - (1.0 - (-4f64).exp() / 4.0)).abs() < 1e-16);
        let err = paper_sequences("nope").unwrap_err();
        assert!(err
            .to_string()
            .contains("V-inv-square, W-gauss, W-sec7, W-radial"));
    }

    #[test]
    fn underflow_is_rejected() {
        let w = paper_sequences("W-gauss").unwrap();
        assert!(w.point(5).is_ok());
        assert!(matches!(w.point(6), Err(Error::Underflow { index: 6, .. })));
    }

    #[test]
    fn blaschke_sums() {
        let v = paper_sequences("V-inv-square").unwrap();
        assert!((blaschke_sum(&v, 3).unwrap() - 49.0 / 36.0).abs() < 1e-15);
        let w = paper_sequences("W-gauss").unwrap();
        let expect = (-1f64).exp() + (-4f64).exp();
        assert!((blaschke_sum(&w, 2).unwrap() - expect).abs() < 1e-16);
        let single = DiscSequence::explicit(vec![c(0.0, 0.0)]).unwrap();
        assert_eq!(blaschke_sum(&single, 1).unwrap(), 1.0);
        let mut prev = 0.0;
        for n in 1..30 {
            let s = blaschke_sum(&v, n).unwrap();
            assert!(s >= prev);
            prev = s;
        }
    }

    #[test]
    fn blaschke_values() {
        let b0 = BlaschkeProduct::new(vec![c(0.0, 0.0)]).unwrap();
        assert_eq!(blaschke_eval(&b0, c(0.5, 0.0)).unwrap(), c(0.5, 0.0));
        let b = BlaschkeProduct::new(vec![c(0.5, 0.0)]).unwrap();
        assert_eq!(blaschke_eval(&b, c(0.5, 0.0)).unwrap(), c(0.0, 0.0));
        assert!((blaschke_eval(&b, c(0.0, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-16);
        assert!(BlaschkeProduct::new(vec![c(1.0, 0.0)]).is_err());
        assert!(blaschke_eval(&b, c(1.5, 0.0)).is_err());
    }

    #[test]
    fn diagnostics_small_cases() {
        let pair = DiscSequence::explicit(vec![c(0.5, 0.0), c(-0.5, 0.0)]).unwrap();
        assert!((separation_constant(&pair, 2).unwrap() - 0.8).abs() < 1e-15);
        let w = c(0.3, 0.4);
        let s = DiscSequence::explicit(vec![c(0.0, 0.0), w]).unwrap();
        assert!((separation_constant(&s, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!(gram_riesz_diagnostic(&s, 1).is_err());

        // normalized Gram [[1, x], [x, 1]] with x = sqrt(1 - |w|^2) = sqrt(0.75)
        let d = gram_riesz_diagnostic(&s, 2).unwrap();
        assert!((d.min_eig - (1.0 - 0.75f64.sqrt())).abs() < 1e-14);
        assert!((d.max_eig - (1.0 + 0.75f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn roundtrip_first_terms() {
        let w = DiscSequence::named(SequenceName::WGauss).points(4).unwrap();
        let b = BlaschkeProduct::new(w.clone()).unwrap();
        assert!(g_map(w[0], &b).unwrap().norm() < 1e-15);
        assert!((h_map(c(0.75, 0.0)) - c(1.0 - (-4f64).exp(), 0.0)).norm() < 1e-15);
        let r = roundtrip_check(4, 1e-9).unwrap();
        assert!(r.pass, "{r:?}");
        let broken = roundtrip_check_with(4, 1e-9, |z| z).unwrap();
        assert!(!broken.pass);
        assert!(roundtrip_check(6, 1e-9).is_err());
    }
}

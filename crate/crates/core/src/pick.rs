//! Pick matrices, interpolation feasibility and minimal multiplier norms.
//!
//! For nodes `lambda_i` in the ball and targets `w_i` the Pick matrix at
//! level `t` is `[(t^2 - w_i conj(w_j)) k(lambda_i, lambda_j)]`; it is PSD
//! exactly when some multiplier of norm at most `t` interpolates the data.
//! Matrix targets use blocks `(t^2 I - F_i F_j^*) k(lambda_i, lambda_j)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{
    gram, is_psd, kernel_unchecked, validate_points, BallPoint, HermitianMatrix, PsdCertificate,
    DEFAULT_TOL,
};

/// Interpolation targets: one scalar or one `k x k'` matrix per node.
#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    Scalar(Vec<Complex64>),
    Matrix(Vec<DMatrix<Complex64>>),
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::Scalar(v) => v.len(),
            Targets::Matrix(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest target modulus (largest singular value for matrix targets).
    pub fn sup_norm(&self) -> f64 {
        match self {
            Targets::Scalar(v) => v.iter().map(|w| w.norm()).fold(0.0, f64::max),
            Targets::Matrix(v) => v
                .iter()
                .map(|m| m.singular_values().iter().copied().fold(0.0, f64::max))
                .fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PickProblem {
    nodes: Vec<BallPoint>,
    targets: Targets,
    gram: HermitianMatrix,
}

impl PickProblem {
    pub fn new(nodes: Vec<BallPoint>, targets: Targets) -> Result<Self> {
        validate_points(&nodes)?;
        if targets.len() != nodes.len() {
            return Err(Error::Shape(format!(
                "{} targets for {} nodes",
                targets.len(),
                nodes.len()
            )));
        }
        if let Targets::Matrix(ms) = &targets {
            let shape = ms[0].shape();
            if shape.0 == 0 || shape.1 == 0 {
                return Err(Error::Shape("empty matrix target".into()));
            }
            if let Some(bad) = ms.iter().position(|m| m.shape() != shape) {
                return Err(Error::Shape(format!(
                    "target {bad} has shape {:?}, expected {:?}",
                    ms[bad].shape(),
                    shape
                )));
            }
        }
        let finite = match &targets {
            Targets::Scalar(v) => v.iter().all(|w| w.re.is_finite() && w.im.is_finite()),
            Targets::Matrix(v) => v
                .iter()
                .flat_map(|m| m.iter())
                .all(|w| w.re.is_finite() && w.im.is_finite()),
        };
        if !finite {
            return Err(Error::NonFinite("targets"));
        }
        let gram = gram(&nodes)?;
        Ok(Self {
            nodes,
            targets,
            gram,
        })
    }

    pub fn scalar(nodes: Vec<BallPoint>, targets: Vec<Complex64>) -> Result<Self> {
        Self::new(nodes, Targets::Scalar(targets))
    }

    pub fn nodes(&self) -> &[BallPoint] {
        &self.nodes
    }

    pub fn targets(&self) -> &Targets {
        &self.targets
    }

    pub fn gram(&self) -> &HermitianMatrix {
        &self.gram
    }
}

fn check_level(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "level t must be finite and nonnegative, got {t}"
        )));
    }
    Ok(())
}

pub fn pick_matrix(p: &PickProblem, t: f64) -> Result<HermitianMatrix> {
    check_level(t)?;
    let t2 = Complex64::new(t * t, 0.0);
    let g = &p.gram;
    match &p.targets {
        Targets::Scalar(w) => Ok(HermitianMatrix::from_upper_fn(w.len(), |i, j| {
            (t2 - w[i] * w[j].conj()) * g.get(i, j)
        })),
        Targets::Matrix(fs) => {
            let k = fs[0].nrows();
            let products: Vec<Vec<DMatrix<Complex64>>> = fs
                .iter()
                .map(|fi| fs.iter().map(|fj| fi * fj.adjoint()).collect())
                .collect();
            Ok(HermitianMatrix::from_upper_fn(fs.len() * k, |r, c| {
                let (i, a) = (r / k, r % k);
                let (j, b) = (c / k, c % k);
                let id = if a == b { t2 } else { Complex64::new(0.0, 0.0) };
                (id - products[i][j][(a, b)]) * g.get(i, j)
            }))
        }
    }
}

pub fn feasible_at(p: &PickProblem, t: f64, tol: f64) -> Result<PsdCertificate> {
    is_psd(&pick_matrix(p, t)?, tol)
}

/// Tolerances for [`min_multiplier_norm_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormOptions {
    /// Bracket width at termination, relative to `max(1, value)`.
    pub rel_tol: f64,
    /// PSD tolerance of the bisection predicate.
    pub bisection_tol: f64,
    /// PSD tolerance of the reported boundary certificate.
    pub certificate_tol: f64,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            bisection_tol: 1e-13,
            certificate_tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    /// `(lower, upper)`: infeasible (or the sup-norm bound) and feasible levels.
    pub bracket: (f64, f64),
    pub boundary_certificate: PsdCertificate,
    pub iterations: u32,
}

/// Upper brackets are searched at `lower + 2^k`, `k < MAX_DOUBLINGS`.
pub const MAX_DOUBLINGS: u32 = 60;

pub fn min_multiplier_norm(p: &PickProblem, rel_tol: f64) -> Result<NormEstimate> {
    min_multiplier_norm_with(
        p,
        NormOptions {
            rel_tol,
            ..NormOptions::default()
        },
    )
}

/// Smallest `t` with a PSD Pick matrix, by bisection.
///
/// The search starts from the sup norm of the targets, which every
/// interpolating multiplier dominates.
pub fn min_multiplier_norm_with(p: &PickProblem, opts: NormOptions) -> Result<NormEstimate> {
    if opts.rel_tol.is_nan() || opts.rel_tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "rel_tol must be positive, got {}",
            opts.rel_tol
        )));
    }
    let feasible = |t: f64| -> Result<bool> { Ok(feasible_at(p, t, opts.bisection_tol)?.is_psd) };
    let floor = p.targets.sup_norm();
    if feasible(floor)? {
        return Ok(NormEstimate {
            value: floor,
            bracket: (floor, floor),
            boundary_certificate: feasible_at(p, floor, opts.certificate_tol)?,
            iterations: 0,
        });
    }

    let mut lower = floor;
    let mut step = 1.0;
    let mut upper = floor + step;
    let mut doublings = 0;
    while !feasible(upper)? {
        doublings += 1;
        if doublings >= MAX_DOUBLINGS {
            return Err(Error::BracketSearch { doublings });
        }
        lower = upper;
        step *= 2.0;
        upper = floor + step;
    }

    let mut iterations = doublings;
    while upper - lower > opts.rel_tol * upper.max(1.0) {
        let mid = 0.5 * (lower + upper);
        if mid <= lower || mid >= upper {
            break;
        }
        if feasible(mid)? {
            upper = mid;
        } else {
            lower = mid;
        }
        iterations += 1;
    }
    let value = 0.5 * (lower + upper);
    Ok(NormEstimate {
        value,
        bracket: (lower, upper),
        boundary_certificate: feasible_at(p, value, opts.certificate_tol)?,
        iterations,
    })
}

/// Nodes `{0} ∪ {radius * xi^j : j = 1..n}` in the disc, `xi = exp(2 pi i / n)`,
/// with target 0 at the origin and `value` at every other node.
pub fn roots_of_unity_problem(n: usize, radius: f64, value: f64) -> Result<PickProblem> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut nodes = vec![BallPoint::origin(1)];
    for j in 1..=n {
        let angle = std::f64::consts::TAU * j as f64 / n as f64;
        nodes.push(BallPoint::disc(Complex64::from_polar(radius, angle))?);
    }
    let mut targets = vec![Complex64::new(0.0, 0.0)];
    targets.extend(std::iter::repeat_n(Complex64::new(value, 0.0), n));
    PickProblem::scalar(nodes, targets)
}

/// Level-one Pick matrix of the two-node problem `lambda -> a`, `mu -> b`,
/// tested for positivity through its diagonal and determinant.
struct TwoNodePick {
    g11: f64,
    g22: f64,
    g12: Complex64,
}

impl TwoNodePick {
    fn new(lambda: &BallPoint, mu: &BallPoint) -> Self {
        Self {
            g11: kernel_unchecked(lambda, lambda).re,
            g22: kernel_unchecked(mu, mu).re,
            g12: kernel_unchecked(lambda, mu),
        }
    }

    fn feasible(&self, a: Complex64, b: Complex64) -> bool {
        let p11 = (1.0 - a.norm_sqr()) * self.g11;
        let p22 = (1.0 - b.norm_sqr()) * self.g22;
        if p11 < 0.0 || p22 < 0.0 {
            return false;
        }
        let p12 = (Complex64::new(1.0, 0.0) - a * b.conj()) * self.g12;
        p11 * p22 - p12.norm_sqr() >= 0.0
    }

    /// Largest `s` with `(a, a + s e^{i theta})` feasible.
    fn ray_reach(&self, a: Complex64, theta: f64) -> f64 {
        let u = Complex64::from_polar(1.0, theta);
        let au = (a.conj() * u).re;
        let edge = -au + (au * au + 1.0 - a.norm_sqr()).max(0.0).sqrt();
        let (mut lo, mut hi) = (0.0, edge);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.feasible(a, a + u * mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

pub const MIN_RESOLUTION: usize = 16;

/// Numerical estimate of `sup { |f(lambda) - f(mu)| : ||f|| <= 1 }`.
///
/// A polar grid of `resolution^2` values for each of `f(lambda)` and
/// `f(mu)` is scanned for the widest feasible pair; the best pair is then
/// refined by a compass search over `(f(lambda), direction)`, with `f(mu)`
/// pushed to the feasibility boundary along that direction.
pub fn functional_distance(lambda: &BallPoint, mu: &BallPoint, resolution: usize) -> Result<f64> {
    mu.check_dim(lambda.dim())?;
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    if lambda == mu {
        return Ok(0.0);
    }
    let pick = TwoNodePick::new(lambda, mu);
    let grid: Vec<Complex64> = (0..resolution)
        .flat_map(|i| {
            let r = i as f64 / resolution as f64;
            (0..resolution).map(move |j| {
                Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / resolution as f64)
            })
        })
        .collect();

    let mut best = (0.0, grid[0], grid[0]);
    for &a in &grid {
        for &b in &grid {
            let gap = (a - b).norm();
            if gap > best.0 && pick.feasible(a, b) {
                best = (gap, a, b);
            }
        }
    }
    let (grid_best, a0, b0) = best;
    if grid_best == 0.0 {
        return Ok(0.0);
    }

    let mut x = [a0.re, a0.im, (b0 - a0).arg()];
    let objective = |x: &[f64; 3]| -> Option<f64> {
        let a = Complex64::new(x[0], x[1]);
        (a.norm_sqr() < 1.0).then(|| pick.ray_reach(a, x[2]))
    };
    let mut value = objective(&x).unwrap_or(0.0);
    let mut step = [
        1.0 / resolution as f64,
        1.0 / resolution as f64,
        std::f64::consts::TAU / resolution as f64,
    ];
    while step[0] > 1e-12 {
        let mut improved = false;
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let mut trial = x;
                trial[axis] += sign * step[axis];
                if let Some(v) = objective(&trial) {
                    if v > value {
                        x = trial;
                        value = v;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step.iter_mut().for_each(|s| *s *= 0.5);
        }
    }
    Ok(value.max(grid_best))
}

/// Positivity of `[(1 - <F(w_i), F(w_j)>) / (1 - <w_i, w_j>)]`, the
/// contractive-multiplier condition for the map `w_i -> F(w_i)`.
pub fn composition_contractivity_check(
    f_values: &[BallPoint],
    w_nodes: &[BallPoint],
    tol: f64,
) -> Result<PsdCertificate> {
    if f_values.len() != w_nodes.len() {
        return Err(Error::Shape(format!(
            "{} images for {} nodes",
            f_values.len(),
            w_nodes.len()
        )));
    }
    validate_points(w_nodes)?;
    let image_dim = f_values[0].dim();
    for f in f_values {
        f.check_dim(image_dim)?;
    }
    let one = Complex64::new(1.0, 0.0);
    let m = HermitianMatrix::from_upper_fn(w_nodes.len(), |i, j| {
        (one - f_values[i].inner(&f_values[j])) * kernel_unchecked(&w_nodes[i], &w_nodes[j])
    });
    is_psd(&m, tol)
}

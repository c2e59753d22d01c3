//! Seeded random inputs for property runs and the reproduction registry.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::kernel::BallPoint;

pub const DEFAULT_SEED: u64 = 0xDA5EED;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniformly random direction with norm drawn uniformly from `[0, max_norm)`.
pub fn ball_point<R: Rng>(rng: &mut R, dim: usize, max_norm: f64) -> BallPoint {
    let v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let len = v
        .iter()
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    let r = max_norm * rng.random::<f64>();
    BallPoint::new(v.into_iter().map(|c| c * (r / len)).collect())
        .expect("max_norm < 1 keeps samples inside the ball")
}

/// Point of the disc with `|z| < max_modulus`, uniform in area.
pub fn disc_point<R: Rng>(rng: &mut R, max_modulus: f64) -> Complex64 {
    let r = max_modulus * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Complex64::from_polar(r, theta)
}

pub fn distinct_disc_points<R: Rng>(rng: &mut R, n: usize, max_modulus: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::with_capacity(n);
    while out.len() < n {
        let z = disc_point(rng, max_modulus);
        if out.iter().all(|w| (w - z).norm() > 1e-6) {
            out.push(z);
        }
    }
    out
}

pub fn distinct_ball_points<R: Rng>(
    rng: &mut R,
    n: usize,
    dim: usize,
    max_norm: f64,
) -> Vec<BallPoint> {
    let mut out: Vec<BallPoint> = Vec::with_capacity(n);
    while out.len() < n {
        let p = ball_point(rng, dim, max_norm);
        let separated = out.iter().all(|q| {
            p.coords()
                .iter()
                .zip(q.coords())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                > 1e-12
        });
        if separated {
            out.push(p);
        }
    }
    out
}

/// Haar-like random unitary: Gram-Schmidt on a complex Gaussian matrix.
pub fn unitary<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<Complex64> {
    loop {
        let mut m = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
        if orthonormalize_columns(&mut m) {
            return m;
        }
    }
}

/// In-place modified Gram-Schmidt; false when the columns are degenerate.
pub(crate) fn orthonormalize_columns(m: &mut DMatrix<Complex64>) -> bool {
    let n = m.ncols();
    for j in 0..n {
        for k in 0..j {
            let proj: Complex64 = (0..m.nrows()).map(|i| m[(i, k)].conj() * m[(i, j)]).sum();
            for i in 0..m.nrows() {
                let v = m[(i, k)];
                m[(i, j)] -= proj * v;
            }
        }
        let len = (0..m.nrows())
            .map(|i| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if len < 1e-8 {
            return false;
        }
        for i in 0..m.nrows() {
            m[(i, j)] /= len;
        }
    }
    true
}

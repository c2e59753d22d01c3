use num_complex::Complex64;

/// Minimal norm of the two-node problem in the disc from the determinant
/// quadratic in `s = t^2`.
pub fn two_node_closed_form(l: Complex64, m: Complex64, w1: Complex64, w2: Complex64) -> f64 {
    let g11 = 1.0 / (1.0 - l.norm_sqr());
    let g22 = 1.0 / (1.0 - m.norm_sqr());
    let g12 = 1.0 / (1.0 - l * m.conj());
    let kappa = g12.norm_sqr() / (g11 * g22);
    let (a, b, c) = (w1.norm_sqr(), w2.norm_sqr(), w1 * w2.conj());
    let qa = 1.0 - kappa;
    let qb = -(a + b - 2.0 * kappa * c.re);
    let qc = (1.0 - kappa) * c.norm_sqr();
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
    ((-qb + disc.sqrt()) / (2.0 * qa)).sqrt()
}

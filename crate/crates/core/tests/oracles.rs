//! Library results against independent reference computations and the
//! frozen high-precision fixture.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::Value;

mod common;
use common::two_node_closed_form;

use picklab::kernel::{self, BallPoint, HermitianMatrix};
use picklab::pick::{self, PickProblem};
use picklab::sampling;
use picklab::sequences::{self, DiscSequence, SequenceName};

fn fixture() -> Value {
    serde_json::from_str(include_str!("../fixtures/oracle.json")).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

/// Plain complex Cholesky; `false` once a pivot drops to zero or below.
fn cholesky_ok(m: &DMatrix<Complex64>) -> bool {
    let n = m.nrows();
    let mut l = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 {
            return false;
        }
        let d = d.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    true
}

/// Smallest eigenvalue as `sup { mu : H - mu I has a Cholesky factor }`.
fn cholesky_min_eig(h: &HermitianMatrix) -> f64 {
    let r = h.max_row_sum().max(1.0);
    let (mut lo, mut hi) = (-r - 1.0, r + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cholesky_ok(h.shifted(-mid).as_matrix()) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[test]
fn min_eigenvalue_matches_cholesky_bisection() {
    let mut rng = sampling::rng(sampling::DEFAULT_SEED);
    for n in 1..=8 {
        let pts = sampling::distinct_ball_points(&mut rng, n, 2, 0.9);
        let g = kernel::gram(&pts).unwrap();
        let targets = (0..n)
            .map(|_| sampling::disc_point(&mut rng, 1.0))
            .collect();
        let p = pick::pick_matrix(&PickProblem::scalar(pts, targets).unwrap(), 0.7).unwrap();
        for h in [g, p] {
            let expect = cholesky_min_eig(&h);
            let got = kernel::min_eigenvalue(&h).unwrap();
            assert!(
                (got - expect).abs() <= 1e-10 * h.max_row_sum().max(1.0),
                "{got} vs {expect}"
            );
        }
    }
}

#[test]
fn two_node_norm_matches_closed_form() {
    let mut rng = sampling::rng(sampling::DEFAULT_SEED ^ 2);
    for _ in 0..100 {
        let zs = sampling::distinct_disc_points(&mut rng, 2, 0.95);
        let w1 = sampling::disc_point(&mut rng, 1.0);
        let w2 = sampling::disc_point(&mut rng, 1.0);
        let nodes = zs.iter().map(|&z| BallPoint::disc(z).unwrap()).collect();
        let est =
            pick::min_multiplier_norm(&PickProblem::scalar(nodes, vec![w1, w2]).unwrap(), 1e-12)
                .unwrap();
        let exact = two_node_closed_form(zs[0], zs[1], w1, w2);
        assert!(
            (est.value - exact).abs() <= 1e-8 * exact,
            "{} vs {exact}",
            est.value
        );
    }
}

#[test]
fn fixture_scalars() {
    let o = fixture();
    let g = kernel::gram(&[BallPoint::origin(1), BallPoint::from_real(&[0.5]).unwrap()]).unwrap();
    let e = o["gram_min_eig_origin_half"].as_f64().unwrap();
    assert!((kernel::min_eigenvalue(&g).unwrap() - e).abs() < 1e-14);

    let fd = pick::functional_distance(
        &BallPoint::origin(1),
        &BallPoint::from_real(&[0.5]).unwrap(),
        32,
    )
    .unwrap();
    let e = o["functional_distance_half"].as_f64().unwrap();
    assert!((fd - e).abs() < 1e-9, "{fd} vs {e}");

    let v = DiscSequence::named(SequenceName::VInvSquare);
    let e = o["separation_v_n4"].as_f64().unwrap();
    assert!((sequences::separation_constant(&v, 4).unwrap() - e).abs() < 1e-12);
}

#[test]
fn riesz_eigenvalues_match_fixture() {
    let o = fixture();
    for (key, name) in [
        ("riesz_v", SequenceName::VInvSquare),
        ("riesz_w_gauss", SequenceName::WGauss),
    ] {
        let s = DiscSequence::named(name);
        let ns = o[key]["n"].as_array().unwrap();
        let mins = floats(&o[key]["min_eig"]);
        let maxs = floats(&o[key]["max_eig"]);
        for ((n, lo), hi) in ns.iter().zip(mins).zip(maxs) {
            let d = sequences::gram_riesz_diagnostic(&s, n.as_u64().unwrap() as usize).unwrap();
            assert!(
                (d.min_eig - lo).abs() <= 1e-8 * lo,
                "{key} N={n}: {} vs {lo}",
                d.min_eig
            );
            assert!((d.max_eig - hi).abs() <= 1e-10 * hi);
        }
    }
}

#[test]
fn vanishing_construction_matches_fixture() {
    let o = &fixture()["vanishing"];
    let k = o["k"].as_u64().unwrap() as usize;
    let ex = picklab::curve::construct_vanishing_example(k, 1_000_000).unwrap();
    let indices: Vec<usize> = serde_json::from_value(o["indices"].clone()).unwrap();
    let at: Vec<usize> = serde_json::from_value(o["checkpoint_index"].clone()).unwrap();
    assert_eq!(ex.indices, indices);
    for ((c, i), v) in ex
        .checkpoints
        .iter()
        .zip(at)
        .zip(floats(&o["checkpoint_value"]))
    {
        assert_eq!(c.index, i);
        assert!((c.value - v).abs() <= 1e-13, "{} vs {v}", c.value);
    }
}

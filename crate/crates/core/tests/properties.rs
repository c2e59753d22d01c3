use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use picklab::ball::{self, BallAutomorphism};
use picklab::curve::{self, CurveEmbedding};
use picklab::kernel::{self, BallPoint};
use picklab::pick::{self, PickProblem};
use picklab::sampling;
use picklab::sequences::{self, BlaschkeProduct};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_automorphism<R: Rng>(rng: &mut R, dim: usize) -> BallAutomorphism {
    BallAutomorphism::new(
        sampling::unitary(rng, dim),
        sampling::ball_point(rng, dim, 0.9),
    )
    .unwrap()
}

fn random_curve<R: Rng>(rng: &mut R, len: usize, mass: f64) -> CurveEmbedding {
    let b: Vec<Complex64> = (0..len).map(|_| sampling::complex_gaussian(rng)).collect();
    let scale = (mass / b.iter().map(|x| x.norm_sqr()).sum::<f64>()).sqrt() * (1.0 - 1e-15);
    CurveEmbedding::new(b.into_iter().map(|x| x * scale).collect()).unwrap()
}

fn max_abs(m: &nalgebra::DMatrix<Complex64>) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gram_is_psd_and_normalized_entries_bounded(seed in any::<u64>(), dim in 1usize..4, n in 1usize..9) {
        let mut rng = sampling::rng(seed);
        let pts = sampling::distinct_ball_points(&mut rng, n, dim, 0.95);
        let g = kernel::gram(&pts).unwrap();
        prop_assert!(kernel::is_psd(&g, 1e-10).unwrap().is_psd);
        let ng = kernel::normalized_gram(&pts).unwrap();
        for i in 0..n {
            prop_assert!((ng.get(i, i) - c(1.0, 0.0)).norm() < 1e-12);
            for j in 0..n {
                prop_assert!(ng.get(i, j).norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn schur_product_of_grams_is_psd(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = sampling::rng(seed);
        let a = kernel::gram(&sampling::distinct_ball_points(&mut rng, n, 2, 0.9)).unwrap();
        let b = kernel::gram(&sampling::distinct_ball_points(&mut rng, n, 3, 0.9)).unwrap();
        let s = kernel::schur_product(&a, &b).unwrap();
        prop_assert!(kernel::is_psd(&s, 1e-10).unwrap().is_psd);
    }

    #[test]
    fn min_eigenvalue_shifts_with_identity(seed in any::<u64>(), n in 1usize..7, shift in -5.0f64..5.0) {
        let mut rng = sampling::rng(seed);
        let g = kernel::gram(&sampling::distinct_ball_points(&mut rng, n, 2, 0.8)).unwrap();
        let before = kernel::min_eigenvalue(&g).unwrap();
        let after = kernel::min_eigenvalue(&g.shifted(shift)).unwrap();
        prop_assert!((after - before - shift).abs() <= 1e-10 * g.max_row_sum().max(1.0));
    }

    #[test]
    fn feasibility_is_monotone_in_t(seed in any::<u64>(), n in 1usize..6, t in 0.0f64..3.0, dt in 0.0f64..2.0) {
        let mut rng = sampling::rng(seed);
        let nodes = sampling::distinct_ball_points(&mut rng, n, 2, 0.9);
        let targets = (0..n).map(|_| sampling::disc_point(&mut rng, 1.0)).collect();
        let p = PickProblem::scalar(nodes, targets).unwrap();
        if pick::feasible_at(&p, t, 1e-10).unwrap().is_psd {
            prop_assert!(pick::feasible_at(&p, t + dt, 1e-10).unwrap().is_psd);
        }
    }

    #[test]
    fn norm_dominates_sup_and_is_sharp_for_constants(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = sampling::rng(seed);
        let nodes = sampling::distinct_ball_points(&mut rng, n, 2, 0.9);
        let targets: Vec<Complex64> = (0..n).map(|_| sampling::disc_point(&mut rng, 1.0)).collect();
        let sup = targets.iter().map(|w| w.norm()).fold(0.0, f64::max);
        let p = PickProblem::scalar(nodes.clone(), targets).unwrap();
        let est = pick::min_multiplier_norm(&p, 1e-10).unwrap();
        prop_assert!(est.value >= sup * (1.0 - 1e-12));
        prop_assert!(est.bracket.1 - est.bracket.0 <= 1e-10 * est.value.max(1.0));

        let w = sampling::disc_point(&mut rng, 1.0);
        let constant = PickProblem::scalar(nodes, vec![w; n]).unwrap();
        let est = pick::min_multiplier_norm(&constant, 1e-10).unwrap();
        prop_assert!((est.value - w.norm()).abs() <= 1e-9 * w.norm().max(1.0));
    }

    #[test]
    fn norm_is_automorphism_invariant(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = sampling::rng(seed);
        let nodes = sampling::distinct_ball_points(&mut rng, n, 2, 0.8);
        let targets: Vec<Complex64> = (0..n).map(|_| sampling::disc_point(&mut rng, 1.0)).collect();
        let f = random_automorphism(&mut rng, 2);
        let moved: Vec<BallPoint> = nodes.iter().map(|z| ball::apply(&f, z).unwrap()).collect();
        let a = pick::min_multiplier_norm(&PickProblem::scalar(nodes, targets.clone()).unwrap(), 1e-10).unwrap();
        let b = pick::min_multiplier_norm(&PickProblem::scalar(moved, targets).unwrap(), 1e-10).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-6 * a.value.max(1.0), "{} vs {}", a.value, b.value);
    }

    #[test]
    fn pseudohyperbolic_distance_properties(seed in any::<u64>(), dim in 1usize..4) {
        let mut rng = sampling::rng(seed);
        let z = sampling::ball_point(&mut rng, dim, 0.95);
        let w = sampling::ball_point(&mut rng, dim, 0.95);
        let f = random_automorphism(&mut rng, dim);
        let d = ball::pseudohyperbolic_distance(&z, &w).unwrap();
        prop_assert!((0.0..1.0).contains(&d));
        prop_assert!((d - ball::pseudohyperbolic_distance(&w, &z).unwrap()).abs() < 1e-12);
        prop_assert_eq!(ball::pseudohyperbolic_distance(&z, &z).unwrap(), 0.0);
        let fz = ball::apply(&f, &z).unwrap();
        let fw = ball::apply(&f, &w).unwrap();
        prop_assert!((ball::pseudohyperbolic_distance(&fz, &fw).unwrap() - d).abs() <= 1e-10);
    }

    #[test]
    fn automorphism_group_laws(seed in any::<u64>(), dim in 1usize..4) {
        let mut rng = sampling::rng(seed);
        let f = random_automorphism(&mut rng, dim);
        let g = random_automorphism(&mut rng, dim);
        let a = sampling::ball_point(&mut rng, dim, 0.9);
        let z = sampling::ball_point(&mut rng, dim, 0.9);
        let phi = ball::involution_at(&a);
        let back = ball::apply(&phi, &ball::apply(&phi, &z).unwrap()).unwrap();
        let fg = ball::compose(&f, &g).unwrap();
        let seq = ball::apply(&f, &ball::apply(&g, &z).unwrap()).unwrap();
        let id = ball::apply(&ball::compose(&f, &ball::inverse(&f).unwrap()).unwrap(), &z).unwrap();
        let fgz = ball::apply(&fg, &z).unwrap();
        for k in 0..dim {
            prop_assert!((back.coords()[k] - z.coords()[k]).norm() < 1e-12);
            prop_assert!((fgz.coords()[k] - seq.coords()[k]).norm() < 1e-12);
            prop_assert!((id.coords()[k] - z.coords()[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn unitary_coefficient_moduli(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = sampling::rng(seed);
        let f = random_automorphism(&mut rng, 3);
        let pts = sampling::distinct_ball_points(&mut rng, n, 3, 0.9);
        let cs = ball::implementing_unitary_coeffs(&f, &pts).unwrap();
        for (w, cw) in pts.iter().zip(&cs.values) {
            let fw = ball::apply(&f, w).unwrap();
            let ratio = ((1.0 - fw.norm_sqr()) / (1.0 - w.norm_sqr())).sqrt();
            prop_assert!((cw.norm() - ratio).abs() <= 1e-12 * ratio.max(1.0));
        }
    }

    #[test]
    fn gram_domination_holds(seed in any::<u64>(), len in 1usize..12, mass in 0.01f64..1.0, n in 1usize..9) {
        let mut rng = sampling::rng(seed);
        let h = random_curve(&mut rng, len, mass);
        let zs = sampling::distinct_disc_points(&mut rng, n, 0.95);
        prop_assert!(curve::gram_domination_check(&h, &zs, 1e-10).unwrap().is_psd);
    }

    #[test]
    fn finite_support_coefficients_stay_in_unit_interval(b_sq in prop::collection::vec(0.0f64..1.0, 1..12), n_max in 1usize..200) {
        let total: f64 = b_sq.iter().sum();
        let scaled: Vec<f64> = if total > 1.0 { b_sq.iter().map(|x| x / total * (1.0 - 1e-15)).collect() } else { b_sq };
        let s = curve::coeff_recursion(&scaled, n_max, false).unwrap();
        prop_assert_eq!(s.a.len(), n_max + 1);
        prop_assert!(s.a.iter().all(|&a| (0.0..=1.0 + 1e-12).contains(&a)));
    }

    #[test]
    fn blaschke_modulus(seed in any::<u64>(), n in 1usize..8, theta in 0.0f64..std::f64::consts::TAU) {
        let mut rng = sampling::rng(seed);
        let zeros = sampling::distinct_disc_points(&mut rng, n, 0.95);
        let b = BlaschkeProduct::new(zeros.clone()).unwrap();
        let inside = sampling::disc_point(&mut rng, 0.99);
        prop_assert!(sequences::blaschke_eval(&b, inside).unwrap().norm() < 1.0);
        let boundary = sequences::blaschke_eval(&b, Complex64::from_polar(1.0, theta)).unwrap();
        prop_assert!((boundary.norm() - 1.0).abs() < 1e-12);
        for z in zeros {
            prop_assert!(sequences::blaschke_eval(&b, z).unwrap().norm() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn functional_distance_properties(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let l = BallPoint::disc(sampling::disc_point(&mut rng, 0.9)).unwrap();
        let m = BallPoint::disc(sampling::disc_point(&mut rng, 0.9)).unwrap();
        let d = ball::pseudohyperbolic_distance(&l, &m).unwrap();
        let lm = pick::functional_distance(&l, &m, 16).unwrap();
        let ml = pick::functional_distance(&m, &l, 16).unwrap();
        let fine = pick::functional_distance(&l, &m, 24).unwrap();
        prop_assert!((0.0..2.0).contains(&lm));
        prop_assert!((lm - ml).abs() <= 1e-9);
        prop_assert!(lm <= 2.0 * d + 1e-6);
        prop_assert!(fine >= lm - 1e-10);
    }
}

#[test]
fn composition_contractivity_examples() {
    let mut rng = sampling::rng(sampling::DEFAULT_SEED);
    let w = sampling::distinct_disc_points(&mut rng, 6, 0.9);
    let nodes: Vec<BallPoint> = w.iter().map(|&z| BallPoint::disc(z).unwrap()).collect();
    let half: Vec<BallPoint> = w
        .iter()
        .map(|&z| BallPoint::disc(z / 2.0).unwrap())
        .collect();
    let konst = vec![BallPoint::disc(c(0.3, -0.2)).unwrap(); 6];
    for f in [&nodes, &half, &konst] {
        assert!(
            pick::composition_contractivity_check(f, &nodes, 1e-10)
                .unwrap()
                .is_psd
        );
    }
    let ones = kernel::gram(&nodes).unwrap();
    let m = pick::pick_matrix(
        &PickProblem::scalar(nodes.clone(), vec![c(0.0, 0.0); 6]).unwrap(),
        1.0,
    )
    .unwrap();
    assert!(max_abs(&(m.as_matrix() - ones.as_matrix())) < 1e-12);
}

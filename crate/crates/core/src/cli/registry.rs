//! Reproduction registry: each case recomputes one worked example or
//! property sweep and compares it with tagged expected values.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Deserialize;

use crate::ball::{self, BallAutomorphism, Polynomial};
use crate::curve::{self, CurveEmbedding};
use crate::error::Result;
use crate::kernel::{self, kernel_unchecked, BallPoint, HermitianMatrix};
use crate::pick::{self, NormOptions, PickProblem};
use crate::sampling;
use crate::sequences::{self, SequenceName};

use super::report::{Outcome, Provenance, Residual};
use super::{CliError, Invocation, Options, Report};

pub struct ReproCase {
    pub id: &'static str,
    pub description: &'static str,
    /// Anchor phrase of the result being reproduced.
    pub source: &'static str,
    run: fn(&Options) -> Result<Outcome>,
}

/// Sorted by id.
pub static CASES: [ReproCase; 10] = [
    ReproCase {
        id: "an-half",
        description: "b_n^2 = 2^-n gives a_n = 1/2, exactly and in floating point",
        source: "a_n = 1/2 for n > 1",
        run: an_half,
    },
    ReproCase {
        id: "an-vanish",
        description: "sparse curve whose recursion coefficients dip below 1/(k+1) at checkpoint k",
        source: "so that liminf a_n = 0",
        run: an_vanish,
    },
    ReproCase {
        id: "contractivity-schur",
        description: "Schur product of the composition and target Pick matrices",
        source: "Schur product of these two positive matrices",
        run: contractivity_schur,
    },
    ReproCase {
        id: "curve-ball-bound",
        description: "h = (z, z^2)/sqrt(2): D * pullback - szego is positive with D = 3",
        source: "D = prod_{k=1}^M (C^{2^k}+1)",
        run: curve_ball_bound,
    },
    ReproCase {
        id: "gram-domination",
        description: "szego Gram dominates the pullback Gram for random curves",
        source: "for any finite subset",
        run: gram_domination,
    },
    ReproCase {
        id: "pick-2n",
        description: "multiplier norm 1 on V and 2^n on W for the same targets",
        source: "is at least 2^n",
        run: pick_2n,
    },
    ReproCase {
        id: "pick-2n-eigvec",
        description: "the all-ones vector is an eigenvector with eigenvalue n",
        source: "eigenvector with eigenvalue n",
        run: pick_2n_eigvec,
    },
    ReproCase {
        id: "riesz-diagnostic",
        description: "normalized Gram eigenvalues of the V and W disc sequences",
        source: "form a Riesz system",
        run: riesz_diagnostic,
    },
    ReproCase {
        id: "roundtrip-blaschke",
        description: "h and g invert each other on the sequences; f fixes the right points",
        source: "h o g|_W = id_W",
        run: roundtrip_blaschke,
    },
    ReproCase {
        id: "unitary-check",
        description:
            "implementing unitary preserves kernel inner products and conjugates multipliers",
        source: "U^* k_w = c_w k_{F(w)}",
        run: unitary_check,
    },
];

pub fn find(id: &str) -> Option<&'static ReproCase> {
    CASES.iter().find(|c| c.id == id)
}

pub fn listing() -> String {
    CASES
        .iter()
        .map(|c| format!("  {:<20} {}", c.id, c.description))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Runs one case, or every case concurrently for `"all"`.
pub fn run(id: &str, opts: &Options) -> std::result::Result<Vec<Report>, CliError> {
    if id == "all" {
        return Ok(std::thread::scope(|s| {
            let handles: Vec<_> = CASES
                .iter()
                .map(|c| s.spawn(move || run_case(c, opts)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("repro case panicked"))
                .collect()
        }));
    }
    match find(id) {
        Some(c) => Ok(vec![run_case(c, opts)]),
        None => Err(CliError::Usage(format!(
            "unknown repro id {id:?}; known ids:\n{}\n  all",
            listing()
        ))),
    }
}

pub fn run_case(case: &ReproCase, opts: &Options) -> Report {
    let start = Instant::now();
    let mut out = (case.run)(opts).unwrap_or_else(|e| {
        let mut failed = Outcome::default();
        failed.put("error", e.to_string());
        failed.residual(Residual::new("runner error", 1.0, 0.0));
        failed
    });
    out.put("source", case.source);
    out.into_report(
        case.id,
        Some(case.description.to_string()),
        Invocation::repro(case.id, *opts),
        start.elapsed().as_secs_f64(),
    )
}

#[derive(Debug, Deserialize)]
pub struct RieszOracle {
    pub n: Vec<usize>,
    pub min_eig: Vec<f64>,
    pub max_eig: Vec<f64>,
    #[serde(default)]
    pub floor: Option<f64>,
}

#[derive(Debug, Deserialize)]
pub struct VanishingOracle {
    pub k: usize,
    pub indices: Vec<usize>,
    pub checkpoint_index: Vec<usize>,
    pub checkpoint_value: Vec<f64>,
}

/// Values computed by the independent high-precision oracle.
#[derive(Debug, Deserialize)]
pub struct Oracle {
    pub riesz_v: RieszOracle,
    pub riesz_w_gauss: RieszOracle,
    pub separation_v_n4: f64,
    pub functional_distance_half: f64,
    pub gram_min_eig_origin_half: f64,
    pub vanishing: VanishingOracle,
}

pub fn oracle() -> Oracle {
    serde_json::from_str(include_str!("../../fixtures/oracle.json")).expect("oracle fixture parses")
}

fn pick_2n(_: &Options) -> Result<Outcome> {
    let (n, r) = (4, 0.5_f64);
    let value = r.powi(n as i32);
    let opts = NormOptions {
        rel_tol: 1e-12,
        ..NormOptions::default()
    };
    let nv = pick::min_multiplier_norm_with(&pick::roots_of_unity_problem(n, r, value)?, opts)?;
    let nw =
        pick::min_multiplier_norm_with(&pick::roots_of_unity_problem(n, r / 2.0, value)?, opts)?;
    let mut out = Outcome::default();
    out.put("n", n);
    out.put("r", r);
    out.put("norm_v", nv);
    out.put("norm_w", nw);
    out.expect("norm_v", 1.0, Provenance::Paper, 1e-8);
    out.expect("norm_w", 16.0, Provenance::Paper, 1e-6);
    out.residual(Residual::relative("norm_v", nv.value, 1.0, 1e-8));
    out.residual(Residual::relative("norm_w", nw.value, 16.0, 1e-6));
    out.certificate("pick matrix on V at norm", nv.boundary_certificate, false);
    out.certificate("pick matrix on W at norm", nw.boundary_certificate, false);
    Ok(out)
}

fn pick_2n_eigvec(_: &Options) -> Result<Outcome> {
    let (n, r) = (5, 0.7_f64);
    let p = pick::pick_matrix(&pick::roots_of_unity_problem(n, r, r.powi(n as i32))?, 1.0)?;
    let m = p.as_matrix();
    let a = m.view((1, 1), (n, n));
    let ones_residual = a
        .row_iter()
        .map(|row| (row.sum() - Complex64::new(n as f64, 0.0)).norm())
        .fold(0.0, f64::max);
    let mut x = DMatrix::from_element(n + 1, 1, Complex64::new(-1.0, 0.0));
    x[0] = Complex64::new(n as f64, 0.0);
    let kernel_residual = (m * x).iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut out = Outcome::default();
    out.put("n", n);
    out.put("r", r);
    out.put("min_eigenvalue", kernel::min_eigenvalue(&p)?);
    out.expect("A 1 = n 1", n, Provenance::Paper, 1e-10);
    out.expect("P (n, -1, ..., -1) = 0", 0.0, Provenance::Paper, 1e-10);
    out.residual(Residual::new("A 1 - n 1", ones_residual, 1e-10));
    out.residual(Residual::new("P (n, -1, ..., -1)", kernel_residual, 1e-10));
    Ok(out)
}

fn an_half(opts: &Options) -> Result<Outcome> {
    let n_max = 200;
    let b_sq: Vec<f64> = (1..=n_max).map(|k| 0.5_f64.powi(k as i32)).collect();
    let exact = curve::coeff_recursion(&b_sq, n_max, true)?;
    let float = curve::coeff_recursion(&b_sq, n_max, false)?;
    let half = num_rational::BigRational::new(1.into(), 2.into());
    let mismatches = exact
        .rational
        .as_ref()
        .map_or(n_max, |r| r[1..].iter().filter(|a| **a != half).count());
    let float_dev = float.a[1..]
        .iter()
        .map(|a| (a - 0.5).abs())
        .fold(0.0, f64::max);
    let mut out = Outcome::default();
    out.put("n_max", n_max);
    out.put("exact_mismatches", mismatches);
    out.put("float_max_deviation", float_dev);
    if opts.exact {
        out.put(
            "a_exact",
            exact
                .rational
                .iter()
                .flatten()
                .map(ToString::to_string)
                .collect::<Vec<_>>(),
        );
    }
    out.expect("a_n, 1 <= n <= 200", 0.5, Provenance::Paper, 0.0);
    out.residual(Residual::new("exact a_n != 1/2", mismatches as f64, 0.0));
    out.residual(Residual::new("float |a_n - 1/2|", float_dev, 1e-12));
    Ok(out)
}

fn an_vanish(opts: &Options) -> Result<Outcome> {
    let k_max = 5;
    let n_max = opts.max_n.unwrap_or(1_000_000);
    let ex = curve::construct_vanishing_example(k_max, n_max)?;
    let o = oracle().vanishing;
    let mut out = Outcome::default();
    out.put("indices", &ex.indices);
    out.put("checkpoints", &ex.checkpoints);
    out.put("series_length", ex.series.len());
    out.put("tail_mass", ex.curve.tail_mass());
    out.expect(
        "checkpoint thresholds",
        (2..=k_max + 1).map(|k| 1.0 / k as f64).collect::<Vec<_>>(),
        Provenance::Paper,
        0.0,
    );
    out.expect(
        "indices",
        &o.indices[..k_max],
        Provenance::DerivedOracle,
        0.0,
    );
    out.expect(
        "checkpoint indices",
        &o.checkpoint_index[..k_max],
        Provenance::DerivedOracle,
        0.0,
    );
    for c in &ex.checkpoints {
        out.residual(Residual::new(
            format!("a_{} - 1/{}", c.index, c.k + 1),
            (c.value - c.threshold).max(0.0),
            0.0,
        ));
    }
    let index_mismatch = ex
        .indices
        .iter()
        .zip(&o.indices)
        .filter(|(a, b)| a != b)
        .count()
        + ex.checkpoints
            .iter()
            .zip(&o.checkpoint_index)
            .filter(|(c, i)| c.index != **i)
            .count();
    out.residual(Residual::new(
        "indices differing from oracle",
        index_mismatch as f64,
        0.0,
    ));
    Ok(out)
}

/// Random finite curve with `h(0) = 0`, some zero coefficients and
/// coefficient mass in `(0, 1]`; every fourth curve has mass exactly 1.
fn random_curve<R: Rng>(rng: &mut R, i: usize) -> Result<CurveEmbedding> {
    let len = rng.random_range(1..=10);
    let mut b: Vec<Complex64> = (0..len)
        .map(|_| {
            if rng.random::<f64>() < 0.3 {
                Complex64::new(0.0, 0.0)
            } else {
                sampling::complex_gaussian(rng)
            }
        })
        .collect();
    if b.iter().all(|c| c.norm_sqr() == 0.0) {
        b[0] = Complex64::new(1.0, 0.0);
    }
    let mass = if i.is_multiple_of(4) {
        1.0
    } else {
        rng.random::<f64>().max(1e-3)
    };
    let scale = (mass / b.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
    CurveEmbedding::new(b.into_iter().map(|c| c * scale * (1.0 - 1e-16)).collect())
}

fn gram_domination(opts: &Options) -> Result<Outcome> {
    let mut rng = sampling::rng(opts.seed);
    let mut worst = f64::INFINITY;
    let cases = 200;
    for i in 0..cases {
        let h = random_curve(&mut rng, i)?;
        let size = rng.random_range(1..=8);
        let zs = sampling::distinct_disc_points(&mut rng, size, 0.95);
        worst = worst.min(curve::gram_domination_check(&h, &zs, opts.tol)?.min_eigenvalue);
    }
    let mut out = Outcome::default();
    out.put("cases", cases);
    out.put("worst_min_eigenvalue", worst);
    out.expect("szego - pullback >= 0", 0.0, Provenance::Paper, 1e-10);
    out.residual(Residual::new(
        "most negative eigenvalue",
        (-worst).max(0.0),
        1e-10,
    ));
    Ok(out)
}

fn curve_ball_bound(opts: &Options) -> Result<Outcome> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = CurveEmbedding::new(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)])?;
    let mut rng = sampling::rng(opts.seed);
    let sets = 50;
    let mut worst = f64::INFINITY;
    let mut halved_failures = 0;
    let mut bound = None;
    for _ in 0..sets {
        let size = rng.random_range(1..=6);
        let zs = sampling::distinct_disc_points(&mut rng, size, 0.95);
        let b = curve::ball_example_bound(&h, &zs, opts.tol)?;
        worst = worst.min(b.certificate.min_eigenvalue);
        if !curve::reverse_domination_check(&h, &zs, b.d / 2.0, opts.tol)?.is_psd {
            halved_failures += 1;
        }
        bound = Some(b);
    }
    let b = bound.expect("at least one point set");
    let mut out = Outcome::default();
    out.put("c", b.c);
    out.put("m", b.m);
    out.put("d", b.d);
    out.put("worst_min_eigenvalue", worst);
    out.put("halved_d_failures", halved_failures);
    out.expect("C", std::f64::consts::SQRT_2, Provenance::Paper, 1e-15);
    out.expect("D", 3.0, Provenance::Paper, 1e-12);
    out.residual(Residual::relative(
        "C",
        b.c,
        std::f64::consts::SQRT_2,
        1e-15,
    ));
    out.residual(Residual::relative("D", b.d, 3.0, 1e-12));
    out.residual(Residual::new(
        "most negative eigenvalue",
        (-worst).max(0.0),
        1e-10,
    ));
    Ok(out)
}

fn test_polynomials() -> Result<Vec<(&'static str, Polynomial)>> {
    let one = Complex64::new(1.0, 0.0);
    Ok(vec![
        ("z1", Polynomial::monomial(one, vec![1, 0, 0])),
        ("z1 z2", Polynomial::monomial(one, vec![1, 1, 0])),
        (
            "z1^2 + z3",
            Polynomial::monomial(one, vec![2, 0, 0])
                .plus(Polynomial::monomial(one, vec![0, 0, 1]))?,
        ),
    ])
}

fn random_automorphism<R: Rng>(rng: &mut R, dim: usize) -> Result<BallAutomorphism> {
    BallAutomorphism::new(
        sampling::unitary(rng, dim),
        sampling::ball_point(rng, dim, 0.9),
    )
}

fn unitary_check(opts: &Options) -> Result<Outcome> {
    let mut rng = sampling::rng(opts.seed);
    let polys = test_polynomials()?;
    let mut gram_worst: f64 = 0.0;
    let mut action_worst = vec![0.0_f64; polys.len()];
    let cases = 100;
    for _ in 0..cases {
        let f = random_automorphism(&mut rng, 3)?;
        let pts = sampling::distinct_ball_points(&mut rng, 8, 3, 0.9);
        gram_worst = gram_worst.max(ball::verify_unitary_gram(&f, &pts, 1e-10)?.max_residual);
        for (w, (_, p)) in action_worst.iter_mut().zip(&polys) {
            *w = w.max(ball::verify_composition_action(&f, p, &pts, 1e-12)?.max_residual);
        }
    }
    let mut out = Outcome::default();
    out.put("cases", cases);
    out.put("unitary_gram_residual", gram_worst);
    out.expect("unitary gram residual", 0.0, Provenance::Paper, 1e-10);
    out.residual(Residual::new("unitary gram", gram_worst, 1e-10));
    for ((name, _), w) in polys.iter().zip(&action_worst) {
        out.put(&format!("composition_residual[{name}]"), w);
        out.expect(
            &format!("composition action {name}"),
            0.0,
            Provenance::Paper,
            1e-12,
        );
        out.residual(Residual::new(
            format!("composition action {name}"),
            *w,
            1e-12,
        ));
    }
    Ok(out)
}

fn riesz_diagnostic(_: &Options) -> Result<Outcome> {
    let o = oracle();
    let v = sequences::DiscSequence::named(SequenceName::VInvSquare);
    let w = sequences::DiscSequence::named(SequenceName::WGauss);
    let dv = o
        .riesz_v
        .n
        .iter()
        .map(|&n| sequences::gram_riesz_diagnostic(&v, n))
        .collect::<Result<Vec<_>>>()?;
    let dw = o
        .riesz_w_gauss
        .n
        .iter()
        .map(|&n| sequences::gram_riesz_diagnostic(&w, n))
        .collect::<Result<Vec<_>>>()?;
    let floor = o.riesz_w_gauss.floor.unwrap_or(0.0);
    let increases = dv
        .windows(2)
        .filter(|p| p[1].min_eig >= p[0].min_eig)
        .count();
    let w_min = dw.iter().map(|d| d.min_eig).fold(f64::INFINITY, f64::min);
    let rel_dev = |ds: &[sequences::RieszDiagnostic], oracle: &[f64]| {
        ds.iter()
            .zip(oracle)
            .map(|(d, e)| (d.min_eig - e).abs() / e)
            .fold(0.0, f64::max)
    };
    let mut out = Outcome::default();
    out.put("v", &dv);
    out.put("w_gauss", &dw);
    out.put("separation_v_n4", sequences::separation_constant(&v, 4)?);
    out.expect(
        "V min_eig strictly decreasing",
        true,
        Provenance::Paper,
        0.0,
    );
    out.expect("W min_eig floor", floor, Provenance::DerivedOracle, 0.0);
    out.expect(
        "V min_eig",
        &o.riesz_v.min_eig,
        Provenance::DerivedOracle,
        1e-8,
    );
    out.expect(
        "W min_eig",
        &o.riesz_w_gauss.min_eig,
        Provenance::DerivedOracle,
        1e-8,
    );
    out.residual(Residual::new(
        "V min_eig non-decreases",
        increases as f64,
        0.0,
    ));
    out.residual(Residual::new(
        "W min_eig below floor",
        (floor - w_min).max(0.0),
        0.0,
    ));
    out.residual(Residual::new(
        "V min_eig vs oracle",
        rel_dev(&dv, &o.riesz_v.min_eig),
        1e-8,
    ));
    out.residual(Residual::new(
        "W min_eig vs oracle",
        rel_dev(&dw, &o.riesz_w_gauss.min_eig),
        1e-8,
    ));
    Ok(out)
}

fn roundtrip_blaschke(_: &Options) -> Result<Outcome> {
    let tol = 1e-9;
    let r = sequences::roundtrip_check(4, tol)?;
    let mut out = Outcome::default();
    out.put("roundtrip", r);
    out.expect("roundtrip residuals", 0.0, Provenance::Paper, tol);
    out.residual(Residual::new("h(v_n) - w_n", r.max_h_residual, tol));
    out.residual(Residual::new("g(w_n) - v_n", r.max_g_residual, tol));
    out.residual(Residual::new("h o g on W", r.max_hg_residual, tol));
    out.residual(Residual::new("g o h on V", r.max_gh_residual, tol));
    out.residual(Residual::new("f on the sequences", r.max_f_residual, tol));
    Ok(out)
}

fn pick_at_one(nodes: &[BallPoint], values: &[Complex64]) -> Result<HermitianMatrix> {
    pick::pick_matrix(&PickProblem::scalar(nodes.to_vec(), values.to_vec())?, 1.0)
}

fn contractivity_schur(opts: &Options) -> Result<Outcome> {
    let mut rng = sampling::rng(opts.seed);
    let (dim, cases) = (2, 40);
    let mut schur_residual: f64 = 0.0;
    let mut worst = [f64::INFINITY; 3];
    for i in 0..cases {
        let w = sampling::distinct_ball_points(&mut rng, 6, dim, 0.9);
        let fw: Vec<BallPoint> = if i % 2 == 0 {
            let f = random_automorphism(&mut rng, dim)?;
            w.iter()
                .map(|p| ball::apply(&f, p))
                .collect::<Result<_>>()?
        } else {
            let u = sampling::unitary(&mut rng, dim);
            w.iter()
                .map(|p| {
                    let v = &u * nalgebra::DVector::from_column_slice(p.coords());
                    BallPoint::new(v.iter().map(|c| c * 0.5).collect())
                })
                .collect::<Result<_>>()?
        };
        let u: Vec<Complex64> = (0..dim)
            .map(|_| sampling::complex_gaussian(&mut rng))
            .collect();
        let len = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let g: Vec<Complex64> = fw
            .iter()
            .map(|p| {
                p.coords()
                    .iter()
                    .zip(&u)
                    .map(|(z, c)| z * c.conj())
                    .sum::<Complex64>()
                    * (0.999 / len)
            })
            .collect();

        let m1 = pick_at_one(&fw, &g)?;
        let m2 = HermitianMatrix::from_upper_fn(w.len(), |a, b| {
            kernel_unchecked(&w[a], &w[b]) / kernel_unchecked(&fw[a], &fw[b])
        });
        let m3 = pick_at_one(&w, &g)?;
        let prod = kernel::schur_product(&m1, &m2)?;
        let scale = m3.as_matrix().iter().map(|c| c.norm()).fold(1.0, f64::max);
        let diff = (prod.as_matrix() - m3.as_matrix())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        schur_residual = schur_residual.max(diff / scale);
        let c2 = pick::composition_contractivity_check(&fw, &w, opts.tol)?;
        let eigs = [
            kernel::min_eigenvalue(&m1)?,
            c2.min_eigenvalue,
            kernel::min_eigenvalue(&m3)?,
        ];
        for (slot, e) in worst.iter_mut().zip(eigs) {
            *slot = slot.min(e);
        }
    }
    let mut out = Outcome::default();
    out.put("cases", cases);
    out.put("schur_residual", schur_residual);
    out.put("worst_min_eigenvalue", worst);
    out.expect(
        "schur product equals composed Pick matrix",
        0.0,
        Provenance::Trivial,
        1e-12,
    );
    out.expect(
        "all three matrices positive",
        0.0,
        Provenance::Paper,
        opts.tol,
    );
    out.residual(Residual::new(
        "schur product identity",
        schur_residual,
        1e-12,
    ));
    for (name, v) in ["target pick", "composition", "composed pick"]
        .iter()
        .zip(worst)
    {
        out.residual(Residual::new(
            format!("{name} most negative eigenvalue"),
            (-v).max(0.0),
            opts.tol,
        ));
    }
    Ok(out)
}

//! Thin command wrappers over the library modules.

use num_complex::Complex64;

use crate::ball::{self, Polynomial};
use crate::curve::{self, DEFAULT_N_MAX};
use crate::error::{Error, Result};
use crate::kernel::{self, BallPoint};
use crate::pick::{self, NormOptions, PickProblem};
use crate::sequences::{self, DiscSequence};

use super::report::{Outcome, Residual, Series};
use super::schema::{complex_doc, matrix_doc, point_doc, InputDoc};
use super::{CliError, Command, Options};

/// Slack on the functional-distance bound `<= 2 d_ph`.
const DISTANCE_SLACK: f64 = 1e-6;

pub fn run(
    command: Command,
    doc: &InputDoc,
    opts: &Options,
) -> std::result::Result<Outcome, CliError> {
    let tol = doc.tol.unwrap_or(opts.tol);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Usage(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let out = match command {
        Command::Gram => cmd_gram(doc, tol),
        Command::PickNorm => cmd_pick_norm(doc, tol),
        Command::Distance => cmd_distance(doc, opts.resolution),
        Command::Curve => cmd_curve(doc, opts, tol),
        Command::Automorphism => cmd_automorphism(doc, tol),
        Command::Diagnose => cmd_diagnose(doc),
        Command::Repro => return Err(CliError::Usage("repro is not a document command".into())),
    };
    Ok(out?)
}

pub fn cmd_gram(doc: &InputDoc, tol: f64) -> Result<Outcome> {
    let points = doc.ball_points()?;
    let g = kernel::gram(&points)?;
    let ng = kernel::normalized_gram(&points)?;
    let (lo, hi) = kernel::eigenvalue_range(&ng)?;
    let mut out = Outcome::default();
    out.put("gram", matrix_doc(g.as_matrix()));
    out.put("normalized_gram", matrix_doc(ng.as_matrix()));
    out.put("normalized_min_eigenvalue", lo);
    out.put("normalized_max_eigenvalue", hi);
    out.certificate("gram", kernel::is_psd(&g, tol)?, true);
    Ok(out)
}

pub fn cmd_pick_norm(doc: &InputDoc, tol: f64) -> Result<Outcome> {
    let p = PickProblem::new(doc.ball_points()?, doc.targets()?)?;
    let opts = NormOptions {
        rel_tol: tol,
        certificate_tol: tol,
        ..NormOptions::default()
    };
    let est = pick::min_multiplier_norm_with(&p, opts)?;
    let sup = p.targets().sup_norm();
    let mut out = Outcome::default();
    out.put("norm", est.value);
    out.put("bracket", est.bracket);
    out.put("iterations", est.iterations);
    out.put("sup_norm", sup);
    out.put("boundary_status", est.boundary_certificate.status());
    out.residual(Residual::new(
        "bracket width",
        est.bracket.1 - est.bracket.0,
        tol * est.value.max(1.0),
    ));
    out.residual(Residual::new(
        "sup norm exceeds norm",
        (sup - est.bracket.1).max(0.0),
        0.0,
    ));
    out.certificate("pick matrix at norm", est.boundary_certificate, true);
    Ok(out)
}

pub fn cmd_distance(doc: &InputDoc, resolution: usize) -> Result<Outcome> {
    let points = doc.ball_points()?;
    let [lambda, mu] = points.as_slice() else {
        return Err(Error::Shape(format!(
            "distance needs exactly 2 points, got {}",
            points.len()
        )));
    };
    let dph = ball::pseudohyperbolic_distance(lambda, mu)?;
    let fd = pick::functional_distance(lambda, mu, resolution)?;
    let mut out = Outcome::default();
    out.put("pseudohyperbolic", dph);
    out.put("functional", fd);
    out.put("resolution", resolution);
    out.residual(Residual::new(
        "functional above twice pseudohyperbolic",
        (fd - 2.0 * dph).max(0.0),
        DISTANCE_SLACK,
    ));
    Ok(out)
}

pub fn cmd_curve(doc: &InputDoc, opts: &Options, tol: f64) -> Result<Outcome> {
    let h = doc.curve()?;
    let n_max = opts.max_n.unwrap_or(DEFAULT_N_MAX);
    let series = curve::coeff_recursion(&h.sq_moduli(), n_max, opts.exact)?;
    let verdict = curve::equivalence_verdict(&series)?;
    let mut out = Outcome::default();
    out.put("tail_mass", h.tail_mass());
    out.put("truncation_length", h.truncation_length());
    out.put("a", &series.a);
    if let Some(r) = &series.rational {
        out.put(
            "a_exact",
            r.iter().map(ToString::to_string).collect::<Vec<_>>(),
        );
    }
    out.put("verdict", verdict);
    let above_one = series.a.iter().fold(0.0_f64, |m, &a| m.max(a - 1.0));
    let below_zero = series.a.iter().fold(0.0_f64, |m, &a| m.max(-a));
    out.residual(Residual::new("a_n above 1", above_one, tol));
    out.residual(Residual::new("a_n below 0", below_zero, tol));
    out.series = Some(Series {
        columns: vec!["n".into(), "a_n".into()],
        rows: series
            .a
            .iter()
            .enumerate()
            .map(|(n, &a)| vec![n as f64, a])
            .collect(),
    });
    if doc.points.is_some() {
        let zs = doc.disc_points()?;
        let pg = curve::pullback_gram(&h, &zs)?;
        out.put("pullback_gram", matrix_doc(pg.gram.as_matrix()));
        out.put("truncation_bound", pg.truncation_bound);
        out.certificate(
            "szego minus pullback",
            curve::gram_domination_check(&h, &zs, tol)?,
            true,
        );
    }
    Ok(out)
}

pub fn cmd_automorphism(doc: &InputDoc, tol: f64) -> Result<Outcome> {
    let f = doc.automorphism()?;
    let points = doc.ball_points()?;
    let images = points
        .iter()
        .map(|p| ball::apply(&f, p))
        .collect::<Result<Vec<BallPoint>>>()?;
    let inv = ball::inverse(&f)?;
    let coeffs = ball::implementing_unitary_coeffs(&f, &points)?;
    let gram_check = ball::verify_unitary_gram(&f, &points, tol)?;
    let mut out = Outcome::default();
    out.put("images", images.iter().map(point_doc).collect::<Vec<_>>());
    out.put("preimage_of_origin", point_doc(inv.base_point()));
    out.put(
        "coefficients",
        coeffs
            .values
            .iter()
            .copied()
            .map(complex_doc)
            .collect::<Vec<_>>(),
    );
    out.put("unitary_gram", gram_check);
    out.residual(Residual::new("unitary gram", gram_check.max_residual, tol));
    if let Some(p) = &doc.polynomial {
        let poly = Polynomial::new(p.dim, p.terms.clone())?;
        let action = ball::verify_composition_action(&f, &poly, &points, tol)?;
        out.put("composition_action", action);
        out.residual(Residual::new(
            "composition action",
            action.max_residual,
            tol,
        ));
    }
    Ok(out)
}

pub fn cmd_diagnose(doc: &InputDoc) -> Result<Outcome> {
    let (seq, n, label) = match (&doc.sequence, &doc.points) {
        (Some(s), _) => (sequences::paper_sequences(&s.name)?, s.n, s.name.clone()),
        (None, Some(_)) => {
            let pts: Vec<Complex64> = doc.disc_points()?;
            let n = pts.len();
            (DiscSequence::explicit(pts)?, n, "explicit".to_string())
        }
        (None, None) => {
            return Err(Error::InvalidArgument(
                "diagnose needs \"sequence\" or \"points\"".into(),
            ))
        }
    };
    let diags = (2..=n)
        .map(|k| sequences::gram_riesz_diagnostic(&seq, k))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Outcome::default();
    out.put("sequence", label);
    out.put("blaschke_sum", sequences::blaschke_sum(&seq, n)?);
    out.put("separation", sequences::separation_constant(&seq, n)?);
    out.put(
        "min_eig_strictly_decreasing",
        diags.windows(2).all(|w| w[1].min_eig < w[0].min_eig),
    );
    out.put("diagnostics", &diags);
    out.series = Some(Series {
        columns: ["n", "min_eig", "max_eig", "condition"]
            .map(String::from)
            .to_vec(),
        rows: diags
            .iter()
            .map(|d| vec![d.n as f64, d.min_eig, d.max_eig, d.condition])
            .collect(),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn doc(text: &str) -> InputDoc {
        InputDoc::parse(text).unwrap()
    }

    #[test]
    fn pick_norm_two_node() {
        let out = cmd_pick_norm(
            &doc(r#"{"points": [[[0,0]], [[0.5,0]]], "targets": [[0,0],[0.5,0]]}"#),
            1e-10,
        )
        .unwrap();
        let v = out.computed["norm"].as_f64().unwrap();
        assert!((v - 1.0).abs() <= 1e-8);
        assert!(out.residuals.iter().all(|r| r.pass), "{:?}", out.residuals);
    }

    #[test]
    fn gram_single_point() {
        let out = cmd_gram(&doc(r#"{"points": [[[0.3,0.1]]]}"#), 1e-10).unwrap();
        let g = out.computed["normalized_gram"].clone();
        assert_eq!(g, json!([[[1.0, 0.0]]]));
    }

    #[test]
    fn curve_half() {
        let b: Vec<[f64; 2]> = (1..=30).map(|k| [0.5_f64.powi(k).sqrt(), 0.0]).collect();
        let text = serde_json::to_string(&json!({ "curve": { "b": b } })).unwrap();
        let opts = Options {
            max_n: Some(30),
            ..Options::default()
        };
        let out = cmd_curve(&doc(&text), &opts, 1e-10).unwrap();
        let a: Vec<f64> = serde_json::from_value(out.computed["a"].clone()).unwrap();
        assert!(a[1..].iter().all(|x| (x - 0.5).abs() < 1e-12));
    }

    #[test]
    fn distance_needs_two_points() {
        assert!(cmd_distance(&doc(r#"{"points": [[[0,0]]]}"#), 16).is_err());
    }
}

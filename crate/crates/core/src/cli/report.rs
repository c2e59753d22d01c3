//! Machine-readable reports.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::kernel::PsdCertificate;

use super::Invocation;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Paper,
    Trivial,
    DerivedOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub name: String,
    pub value: Value,
    pub provenance: Provenance,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Residual {
    pub fn new(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tol,
            pass: value <= tol,
        }
    }

    /// Expresses `cert.is_psd` as a residual: the amount by which the
    /// minimum eigenvalue falls below zero, against `|threshold|`.
    pub fn psd(name: impl Into<String>, cert: &PsdCertificate) -> Self {
        Self::new(name, (-cert.min_eigenvalue).max(0.0), -cert.threshold)
    }

    /// `|computed - expected| / max(1, |expected|)`.
    pub fn relative(name: impl Into<String>, computed: f64, expected: f64, tol: f64) -> Self {
        Self::new(
            name,
            (computed - expected).abs() / expected.abs().max(1.0),
            tol,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCertificate {
    pub name: String,
    pub certificate: PsdCertificate,
}

/// Tabular series for optional CSV emission.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub case: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub inputs: Invocation,
    pub computed: Value,
    pub expected: Vec<Expectation>,
    pub residuals: Vec<Residual>,
    pub certificates: Vec<NamedCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<Series>,
    pub pass: bool,
    pub wall_time_s: f64,
}

/// Everything a runner produces; `pass` is derived from the residuals.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub computed: serde_json::Map<String, Value>,
    pub expected: Vec<Expectation>,
    pub residuals: Vec<Residual>,
    pub certificates: Vec<NamedCertificate>,
    pub series: Option<Series>,
}

impl Outcome {
    pub fn put(&mut self, key: &str, value: impl Serialize) {
        self.computed.insert(
            key.to_string(),
            serde_json::to_value(value).expect("report values serialize"),
        );
    }

    pub fn expect(
        &mut self,
        name: &str,
        value: impl Serialize,
        provenance: Provenance,
        tolerance: f64,
    ) {
        self.expected.push(Expectation {
            name: name.to_string(),
            value: serde_json::to_value(value).expect("report values serialize"),
            provenance,
            tolerance,
        });
    }

    pub fn residual(&mut self, r: Residual) {
        self.residuals.push(r);
    }

    pub fn certificate(&mut self, name: &str, cert: PsdCertificate, required: bool) {
        if required {
            self.residuals
                .push(Residual::psd(format!("{name} psd"), &cert));
        }
        self.certificates.push(NamedCertificate {
            name: name.to_string(),
            certificate: cert,
        });
    }

    pub fn into_report(
        self,
        case: &str,
        description: Option<String>,
        inputs: Invocation,
        wall_time_s: f64,
    ) -> Report {
        let pass = self.residuals.iter().all(|r| r.pass);
        Report {
            schema_version: SCHEMA_VERSION.to_string(),
            case: case.to_string(),
            description,
            inputs,
            computed: Value::Object(self.computed),
            expected: self.expected,
            residuals: self.residuals,
            certificates: self.certificates,
            series: self.series,
            pass,
            wall_time_s,
        }
    }
}

impl Report {
    /// Report with the wall time zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Report {
        Report {
            wall_time_s: 0.0,
            ..self.clone()
        }
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if let Some(series) = &self.series {
            w.write_record(&series.columns)?;
            for row in &series.rows {
                w.write_record(row.iter().map(|x| format!("{x:?}")))?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

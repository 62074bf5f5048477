//! Report types and JSON/CSV output.

use std::io::Write;

use clap::ValueEnum;
use projcurv::acceptance::{CriterionReport, Suite};
use projcurv::fubini_study::SpherePoint;
use projcurv::polynomial::PolynomialJson;
use projcurv::shape_spectrum::PrincipalSpectrum;
use projcurv::topology::BoundCheck;
use serde::Serialize;

use crate::{CliResult, Failure, OutputArgs};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// One CSV row as `(column, value)` pairs.
pub type CsvRow = Vec<(&'static str, String)>;

#[derive(Debug, Serialize)]
pub struct TotalReport {
    pub schema_version: u32,
    pub polynomial: PolynomialJson,
    pub polynomial_text: String,
    pub degree: u32,
    pub ambient_dim: usize,
    pub method: &'static str,
    #[serde(rename = "T")]
    pub total: f64,
    pub std_error: f64,
    pub samples: usize,
    pub rejected: usize,
    pub rejected_fraction: f64,
    pub seed: u64,
    pub threads: Option<usize>,
    pub deterministic: bool,
    pub unitary_rotation: Option<Vec<Vec<[f64; 2]>>>,
    pub warning: Option<String>,
    pub wall_time: f64,
}

impl TotalReport {
    pub fn csv_row(&self) -> CsvRow {
        vec![
            ("schema_version", self.schema_version.to_string()),
            ("polynomial", self.polynomial_text.clone()),
            ("degree", self.degree.to_string()),
            ("ambient_dim", self.ambient_dim.to_string()),
            ("method", self.method.to_string()),
            ("T", self.total.to_string()),
            ("std_error", self.std_error.to_string()),
            ("samples", self.samples.to_string()),
            ("rejected_fraction", self.rejected_fraction.to_string()),
            ("seed", self.seed.to_string()),
            ("deterministic", self.deterministic.to_string()),
            ("unitary_rotation", json_cell(&self.unitary_rotation)),
            ("wall_time", self.wall_time.to_string()),
        ]
    }
}

#[derive(Debug, Serialize)]
pub struct SpectrumRow {
    pub point: Vec<[f64; 2]>,
    #[serde(flatten)]
    pub spectrum: PrincipalSpectrum,
}

impl SpectrumRow {
    pub fn new(z: &SpherePoint, spectrum: PrincipalSpectrum) -> Self {
        Self {
            point: z.coords().iter().map(|c| [c.re, c.im]).collect(),
            spectrum,
        }
    }

    pub fn csv_row(&self) -> CsvRow {
        vec![
            ("point", json_cell(&self.point)),
            ("eigenvalues", json_cell(&self.spectrum.eigenvalues)),
            ("kappas", json_cell(&self.spectrum.kappas)),
            ("pairing_residual", self.spectrum.pairing_residual.to_string()),
            ("fiber_residual", self.spectrum.fiber_residual.to_string()),
        ]
    }
}

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub schema_version: u32,
    pub polynomial: PolynomialJson,
    pub polynomial_text: String,
    pub degree: u32,
    pub seed: u64,
    pub points: Vec<SpectrumRow>,
}

#[derive(Debug, Serialize)]
pub struct BoundsReport {
    pub schema_version: u32,
    pub degree: Option<u32>,
    pub interval: Option<(u64, u64)>,
    pub betti: Vec<u64>,
    pub lift: Option<Vec<u64>>,
    pub middle_sum: u64,
    #[serde(rename = "T")]
    pub total: Option<f64>,
    pub checks: Vec<BoundCheck>,
    pub all_hold: bool,
}

impl BoundsReport {
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let mut rows: Vec<CsvRow> = vec![info_row("betti", json_cell(&self.betti))];
        if let Some(l) = &self.lift {
            rows.push(info_row("lift", json_cell(l)));
        }
        if let Some((lo, hi)) = self.interval {
            rows.push(info_row("interval", format!("({lo}, {hi})")));
        }
        for c in &self.checks {
            rows.push(vec![
                ("name", c.name.to_string()),
                ("value", String::new()),
                ("holds", c.holds.to_string()),
                ("lhs", c.lhs.to_string()),
                ("rhs", c.rhs.to_string()),
                ("margin", c.margin.to_string()),
            ]);
        }
        rows
    }
}

fn info_row(name: &str, value: String) -> CsvRow {
    vec![
        ("name", name.to_string()),
        ("value", value),
        ("holds", String::new()),
        ("lhs", String::new()),
        ("rhs", String::new()),
        ("margin", String::new()),
    ]
}

#[derive(Debug, Serialize)]
pub struct ClassifyReport {
    pub schema_version: u32,
    #[serde(rename = "T")]
    pub total: f64,
    pub degree: u32,
    pub interval: (u64, u64),
}

impl ClassifyReport {
    pub fn csv_row(&self) -> CsvRow {
        vec![
            ("T", self.total.to_string()),
            ("degree", self.degree.to_string()),
            ("lower", self.interval.0.to_string()),
            ("upper", self.interval.1.to_string()),
        ]
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub suite: Suite,
    pub passed: bool,
    pub failed: usize,
    pub wall_time: f64,
    pub criteria: Vec<CriterionReport>,
}

impl VerifyReport {
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.criteria
            .iter()
            .map(|c| {
                vec![
                    ("id", c.id.to_string()),
                    ("title", c.title.to_string()),
                    ("passed", c.passed.to_string()),
                    ("seconds", c.seconds.to_string()),
                    ("details", c.details.join("; ")),
                ]
            })
            .collect()
    }
}

fn json_cell<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn render<T: Serialize>(report: &T, rows: &[CsvRow], format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).map_err(|e| Failure::Numerical(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if let Some(first) = rows.first() {
                w.write_record(first.iter().map(|(k, _)| *k)).map_err(csv_failure)?;
            }
            for row in rows {
                w.write_record(row.iter().map(|(_, v)| v.as_str()))
                    .map_err(csv_failure)?;
            }
            w.into_inner().map_err(|e| Failure::Numerical(e.to_string()))
        }
    }
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure::Numerical(e.to_string())
}

pub fn emit<T: Serialize>(report: &T, rows: &[CsvRow], output: &OutputArgs) -> CliResult<()> {
    let bytes = render(report, rows, output.format)?;
    match &output.out {
        Some(path) => {
            std::fs::write(path, bytes).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| Failure::Numerical(format!("cannot write to stdout: {e}"))),
    }
}

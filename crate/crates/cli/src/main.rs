mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use projcurv::acceptance::{criteria, run_criterion, Suite};
use projcurv::fubini_study::SpherePoint;
use projcurv::integrator::{estimate, random_points, Method};
use projcurv::polynomial::{parse_polynomial, HomogeneousPolynomial};
use projcurv::sampling::{Reduction, SamplingConfig};
use projcurv::shape_spectrum::LiftedHypersurface;
use projcurv::topology::{
    check_basicestimate, check_cpcl_a, check_detailedestimate, classify_degree, degree_interval, gysin_transfer,
    hypersurface_betti, BettiVector, BoundCheck,
};

use report::{
    BoundsReport, ClassifyReport, Format, SpectrumReport, SpectrumRow, TotalReport, VerifyReport, SCHEMA_VERSION,
};

#[derive(Debug, Parser)]
#[command(
    name = "projcurv",
    version,
    about = "Total absolute curvature of complex projective hypersurfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo estimate of total absolute curvature (or a related integral).
    Total(TotalArgs),
    /// Principal curvatures of the lifted hypersurface at given or random points.
    Spectrum(SpectrumArgs),
    /// Degree interval, Betti numbers and Betti-number inequalities.
    Bounds(BoundsArgs),
    /// Degree of a smooth plane curve from its total absolute curvature.
    Classify(ClassifyArgs),
    /// Run the acceptance criteria.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct PolyArgs {
    /// Polynomial in text form, e.g. "z0^3 + z1^3 + z2^3".
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    poly: Option<String>,
    /// JSON file with `num_vars`, `degree` and `terms`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Complex dimension N of the ambient CP^N.
    #[arg(long)]
    ambient_dim: Option<usize>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Closed-form curvature profile (plane curves).
    CurveClosedForm,
    /// Radial quadrature of the principal curvatures.
    HypersurfaceRadial,
    /// Integral over the lifted sphere hypersurface.
    SphereLift,
    /// Fubini–Study area or volume.
    Area,
    /// (1/2π)∫K dA (plane curves).
    GaussBonnet,
    /// Area-weighted mean Gaussian curvature (plane curves).
    AverageCurvature,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::CurveClosedForm => Method::CurveClosedForm,
            MethodArg::HypersurfaceRadial => Method::HypersurfaceRadial,
            MethodArg::SphereLift => Method::SphereLift,
            MethodArg::Area => Method::AreaOnly,
            MethodArg::GaussBonnet => Method::GaussBonnet,
            MethodArg::AverageCurvature => Method::AverageCurvature,
        }
    }
}

#[derive(Debug, Args)]
struct TotalArgs {
    #[command(flatten)]
    poly: PolyArgs,
    /// Defaults to curve-closed-form for plane curves, hypersurface-radial otherwise.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "PROJCURV_THREADS")]
    threads: Option<usize>,
    /// Fixed-order compensated reduction, reproducible bit for bit.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    deterministic: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[command(flatten)]
    poly: PolyArgs,
    /// Point on the hypersurface as comma-separated complex coordinates, e.g. "1,i,0".
    #[arg(long, conflicts_with = "random")]
    point: Option<String>,
    /// Number of random points on the hypersurface.
    #[arg(long, default_value_t = 1)]
    random: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Degree of a smooth hypersurface.
    #[arg(long, required_unless_present = "betti")]
    degree: Option<u32>,
    /// Ambient dimension for --degree (2 for plane curves, 3 for surfaces).
    #[arg(long, default_value_t = 2)]
    ambient_dim: u32,
    /// Betti numbers β0,…,β2m of a compact Kähler manifold, e.g. "1,0,2,0,1".
    #[arg(long, conflicts_with = "degree")]
    betti: Option<String>,
    /// Total absolute curvature to test the inequalities against.
    #[arg(long)]
    total: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long)]
    total: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// quick (line and conic) or full.
    #[arg(long, default_value = "quick")]
    suite: String,
    #[command(flatten)]
    output: OutputArgs,
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
enum Failure {
    Input(String),
    Numerical(String),
}

impl From<projcurv::Error> for Failure {
    fn from(e: projcurv::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Total(a) => cmd_total(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load_polynomial(args: &PolyArgs) -> CliResult<HomogeneousPolynomial> {
    let num_vars = args.ambient_dim.map(|n| n + 1);
    let poly = match (&args.poly, &args.input) {
        (Some(text), _) => parse_polynomial(text, num_vars)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
            HomogeneousPolynomial::from_json_str(&text)?
        }
        (None, None) => return Err(Failure::Input("either --poly or --input is required".into())),
    };
    if let Some(n) = num_vars {
        if poly.num_vars() != n {
            return Err(Failure::Input(format!(
                "polynomial has {} variables but --ambient-dim {} needs {n}",
                poly.num_vars(),
                n - 1
            )));
        }
    }
    Ok(poly)
}

fn cmd_total(a: TotalArgs) -> CliResult<ExitCode> {
    if a.samples < 100 {
        return Err(Failure::Input(format!(
            "--samples must be at least 100 (got {})",
            a.samples
        )));
    }
    let poly = load_polynomial(&a.poly)?;
    let method = a.method.map(Method::from).unwrap_or(if poly.num_vars() == 3 {
        Method::CurveClosedForm
    } else {
        Method::HypersurfaceRadial
    });
    let mut config = SamplingConfig::new(a.samples, a.seed);
    if let Some(t) = a.threads {
        config = config.with_threads(t);
    }
    if !a.deterministic {
        config = config.with_reduction(Reduction::Fast);
    }
    let start = Instant::now();
    let est = estimate(&poly, method, &config)?;
    let wall_time = start.elapsed().as_secs_f64();
    if let Some(w) = &est.warning {
        eprintln!("warning: {w}");
    }
    let report = TotalReport {
        schema_version: SCHEMA_VERSION,
        polynomial: poly.to_json(),
        polynomial_text: poly.to_string(),
        degree: poly.degree(),
        ambient_dim: poly.num_vars() - 1,
        method: est.method.name(),
        total: est.value,
        std_error: est.std_error,
        samples: est.n_samples,
        rejected: est.n_rejected,
        rejected_fraction: est.rejected_fraction(),
        seed: est.seed,
        threads: a.threads,
        deterministic: a.deterministic,
        unitary_rotation: est.unitary_rotation.clone(),
        warning: est.warning.clone(),
        wall_time,
    };
    report::emit(&report, &[report.csv_row()], &a.output)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_point(text: &str) -> CliResult<Vec<Complex64>> {
    text.split(',')
        .map(|s| {
            let s = s.trim().replace(' ', "");
            // num-complex wants an explicit coefficient on a bare `i`
            let s = match s.as_str() {
                "i" | "+i" => "1i".to_string(),
                "-i" => "-1i".to_string(),
                _ => s,
            };
            Complex64::from_str(&s).map_err(|_| Failure::Input(format!("cannot parse coordinate `{s}`")))
        })
        .collect()
}

fn cmd_spectrum(a: SpectrumArgs) -> CliResult<ExitCode> {
    let poly = load_polynomial(&a.poly)?;
    let lifted = LiftedHypersurface::new(&poly)?;
    let points = match &a.point {
        Some(text) => {
            let z = parse_point(text)?;
            if z.len() != poly.num_vars() {
                return Err(Failure::Input(format!(
                    "point has {} coordinates, polynomial has {} variables",
                    z.len(),
                    poly.num_vars()
                )));
            }
            vec![SpherePoint::new(&z)?]
        }
        None => {
            if a.random == 0 {
                return Err(Failure::Input("--random must be positive".into()));
            }
            random_points(&poly, a.random, a.seed)?
        }
    };
    let mut rows = Vec::with_capacity(points.len());
    for z in &points {
        let (_, spec) = lifted.spectrum_at(z)?;
        rows.push(SpectrumRow::new(z, spec));
    }
    let report = SpectrumReport {
        schema_version: SCHEMA_VERSION,
        polynomial: poly.to_json(),
        polynomial_text: poly.to_string(),
        degree: poly.degree(),
        seed: a.seed,
        points: rows,
    };
    let csv: Vec<_> = report.points.iter().map(|r| r.csv_row()).collect();
    report::emit(&report, &csv, &a.output)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_betti(text: &str) -> CliResult<Vec<u64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| Failure::Input(format!("cannot parse Betti number `{s}`")))
        })
        .collect()
}

fn cmd_bounds(a: BoundsArgs) -> CliResult<ExitCode> {
    let (betti, lift, interval) = match (a.degree, &a.betti) {
        (Some(d), _) => {
            if !(2..=3).contains(&a.ambient_dim) {
                return Err(Failure::Input("--ambient-dim must be 2 or 3 with --degree".into()));
            }
            let b = hypersurface_betti(d, a.ambient_dim - 1)?;
            let lift = gysin_transfer(&b)?;
            let interval = if a.ambient_dim == 2 {
                Some(degree_interval(d)?)
            } else {
                None
            };
            (b, Some(lift), interval)
        }
        (None, Some(text)) => {
            let b = BettiVector::kahler(parse_betti(text)?)?;
            let lift = gysin_transfer(&b).ok();
            (b, lift, None)
        }
        (None, None) => return Err(Failure::Input("either --degree or --betti is required".into())),
    };
    // without an explicit total, plane curves are tested at the least attainable value
    let total = a.total.or(interval.map(|(lo, _)| lo as f64));
    let mut checks: Vec<BoundCheck> = Vec::new();
    if let Some(t) = total {
        checks.push(check_basicestimate(&betti, t)?);
        checks.push(check_detailedestimate(&betti, t)?);
        checks.push(check_cpcl_a(&betti, t)?);
    }
    let all_hold = checks.iter().all(|c| c.holds);
    let report = BoundsReport {
        schema_version: SCHEMA_VERSION,
        degree: a.degree,
        interval,
        betti: betti.dims.clone(),
        lift: lift.map(|l| l.dims),
        middle_sum: betti.middle_sum()?,
        total,
        checks,
        all_hold,
    };
    let csv: Vec<_> = report.csv_rows();
    report::emit(&report, &csv, &a.output)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_classify(a: ClassifyArgs) -> CliResult<ExitCode> {
    let degree = classify_degree(a.total)?;
    let (lo, hi) = degree_interval(degree)?;
    let report = ClassifyReport {
        schema_version: SCHEMA_VERSION,
        total: a.total,
        degree,
        interval: (lo, hi),
    };
    report::emit(&report, &[report.csv_row()], &a.output)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: VerifyArgs) -> CliResult<ExitCode> {
    let suite: Suite = a.suite.parse()?;
    let start = Instant::now();
    let mut reports = Vec::new();
    for id in criteria(suite) {
        let r = run_criterion(id, suite)?;
        eprintln!("{r}");
        for line in &r.details {
            eprintln!("        {line}");
        }
        reports.push(r);
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    let report = VerifyReport {
        schema_version: SCHEMA_VERSION,
        suite,
        passed: failed == 0,
        failed,
        wall_time: start.elapsed().as_secs_f64(),
        criteria: reports,
    };
    let csv: Vec<_> = report.csv_rows();
    report::emit(&report, &csv, &a.output)?;
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

//! End-to-end acceptance checks, shared by the `acceptance` test target and
//! the `verify` command.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::curve_metrics::{PlaneCurve, DEFAULT_FD_STEP};
use crate::error::{Error, Result};
use crate::integrator::{
    area, average_curvature, gauss_bonnet, random_points, total_curvature_curve, total_curvature_hypersurface,
    total_curvature_sphere_lift, CurvatureEstimate,
};
use crate::polynomial::HomogeneousPolynomial;
use crate::radial_profile::{
    cp_integrand, cp_integrand_symmetric, curve_pointwise_closed_form, dexp_det, elementary_symmetric,
    euclidean_density_check, kappa_from_curvature, lift_identity_check, radial_quadrature, RadialContext,
};
use crate::sampling::SamplingConfig;
use crate::shape_spectrum::{rotate_normal, LiftedHypersurface};
use crate::topology::{
    check_basicestimate, check_cpcl_a, classify_degree, degree_interval, gysin_transfer, hypersurface_betti,
    jensen_identity_holds, BettiVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Line and conic only.
    Quick,
    Full,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Suite::Quick),
            "full" => Ok(Suite::Full),
            other => Err(Error::Input(format!(
                "unknown suite `{other}` (expected quick or full)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub seconds: f64,
    pub budget_seconds: Option<f64>,
    pub details: Vec<String>,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let budget = self.budget_seconds.map(|b| format!(" / {b:.0}s")).unwrap_or_default();
        write!(
            f,
            "[{}] criterion {:>2}: {} ({:.1}s{budget})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds
        )
    }
}

/// Collects named checks for one criterion.
struct Checks {
    ok: bool,
    details: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self {
            ok: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, passed: bool, detail: String) {
        self.ok &= passed;
        self.details
            .push(format!("{} {detail}", if passed { "ok  " } else { "FAIL" }));
    }

    fn error(&mut self, context: &str, e: Error) {
        self.check(false, format!("{context}: {e}"));
    }
}

const ALL: [u8; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

/// Criteria run by a suite.
pub fn criteria(suite: Suite) -> Vec<u8> {
    match suite {
        Suite::Quick => vec![1, 2, 6, 7, 9, 10],
        Suite::Full => ALL.to_vec(),
    }
}

pub fn run_suite(suite: Suite) -> Vec<CriterionReport> {
    criteria(suite)
        .into_iter()
        .map(|id| run_criterion(id, suite).expect("known id"))
        .collect()
}

pub fn run_criterion(id: u8, suite: Suite) -> Result<CriterionReport> {
    let start = Instant::now();
    let (title, budget, checks): (&'static str, Option<f64>, Checks) = match id {
        1 => ("line: total curvature 2", Some(60.0), line_total()),
        2 => ("Fermat conic: total curvature 4, area 2π, K = 2", Some(120.0), conic()),
        3 => (
            "Fermat curves d = 3, 4, 5 inside the degree interval",
            Some(1800.0),
            fermat_intervals(),
        ),
        4 => ("Gauss–Bonnet for d ≤ 4", None, gauss_bonnet_suite()),
        5 => ("average curvature 2(3 − d) for d ≤ 4", None, average_curvature_suite()),
        6 => ("shape-operator spectrum structure", None, spectrum_structure(suite)),
        7 => ("intrinsic curvature matches 4 − 2κ²", None, gauss_equation(suite)),
        8 => (
            "closed-form, radial and sphere-lift routes agree",
            None,
            route_agreement(),
        ),
        9 => ("pointwise identities", None, pointwise_identities()),
        10 => ("exact topology", None, topology_suite()),
        11 => ("quadric surface in CP³", Some(1800.0), quadric_surface()),
        _ => return Err(Error::Input(format!("unknown criterion {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let mut checks = checks;
    if let Some(b) = budget {
        checks.check(seconds <= b, format!("runtime {seconds:.1}s within {b:.0}s"));
    }
    Ok(CriterionReport {
        id,
        title,
        passed: checks.ok,
        seconds,
        budget_seconds: budget,
        details: checks.details,
    })
}

fn fermat(num_vars: usize, d: u32) -> HomogeneousPolynomial {
    HomogeneousPolynomial::fermat(num_vars, d).expect("valid Fermat polynomial")
}

fn line() -> HomogeneousPolynomial {
    HomogeneousPolynomial::coordinate(3, 1).expect("valid coordinate")
}

/// Dense polynomial with independent complex Gaussian coefficients.
pub fn random_polynomial(num_vars: usize, degree: u32, seed: u64) -> HomogeneousPolynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    let mut exps = vec![0u32; num_vars];
    fn rec(i: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == exps.len() {
            exps[i] = left;
            out.push(exps.clone());
            return;
        }
        for e in 0..=left {
            exps[i] = e;
            rec(i + 1, left - e, exps, out);
        }
    }
    let mut monomials = Vec::new();
    rec(0, degree, &mut exps, &mut monomials);
    for e in monomials {
        let c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        terms.push((e, c));
    }
    HomogeneousPolynomial::new(num_vars, terms).expect("nonzero random polynomial")
}

fn test_curves(suite: Suite) -> Vec<(&'static str, HomogeneousPolynomial)> {
    let mut v = vec![("line", line()), ("conic", fermat(3, 2))];
    if suite == Suite::Full {
        v.push(("Fermat cubic", fermat(3, 3)));
        v.push(("random quartic", random_polynomial(3, 4, 2024)));
    }
    v
}

fn describe(e: &CurvatureEstimate) -> String {
    format!("{:.5} ± {:.5} ({} samples)", e.value, e.std_error, e.n_samples)
}

fn line_total() -> Checks {
    let mut c = Checks::new();
    match total_curvature_curve(&line(), &SamplingConfig::new(100_000, 1)) {
        Ok(e) => c.check(
            (e.value - 2.0).abs() <= 0.02,
            format!("T = {} vs 2 ± 0.02", describe(&e)),
        ),
        Err(e) => c.error("line estimate", e),
    }
    c
}

fn conic() -> Checks {
    let mut c = Checks::new();
    let poly = fermat(3, 2);
    match total_curvature_curve(&poly, &SamplingConfig::new(100_000, 2)) {
        Ok(e) => c.check(
            (e.value - 4.0).abs() <= 0.05,
            format!("T = {} vs 4 ± 0.05", describe(&e)),
        ),
        Err(e) => c.error("conic estimate", e),
    }
    match area(&poly, &SamplingConfig::new(100_000, 3)) {
        Ok(e) => c.check(
            (e.value / (2.0 * PI) - 1.0).abs() <= 5e-3,
            format!("area = {} vs 2π ± 0.5%", describe(&e)),
        ),
        Err(e) => c.error("conic area", e),
    }
    match curvature_at_random_points(&poly, 100, 4) {
        Ok(ks) => {
            let worst = ks.iter().map(|k| (k - 2.0).abs()).fold(0.0, f64::max);
            c.check(
                worst <= 1e-3,
                format!("max |K − 2| = {worst:.2e} over {} points", ks.len()),
            );
        }
        Err(e) => c.error("conic curvature", e),
    }
    c
}

fn curvature_at_random_points(poly: &HomogeneousPolynomial, count: usize, seed: u64) -> Result<Vec<f64>> {
    let curve = PlaneCurve::new(poly)?;
    random_points(poly, count, seed)?
        .iter()
        .map(|z| {
            let b = curve.branch_at(z.coords())?;
            curve.gaussian_curvature(&b, DEFAULT_FD_STEP)
        })
        .collect()
}

fn fermat_intervals() -> Checks {
    let mut c = Checks::new();
    for d in 3..=5u32 {
        let start = Instant::now();
        let est = total_curvature_curve(&fermat(3, d), &SamplingConfig::new(100_000, 10 + d as u64));
        let secs = start.elapsed().as_secs_f64();
        let e = match est {
            Ok(e) => e,
            Err(e) => {
                c.error(&format!("d = {d}"), e);
                continue;
            }
        };
        let (lo, hi) = degree_interval(d).expect("positive degree");
        let s3 = 3.0 * e.std_error;
        c.check(
            lo as f64 + s3 < e.value && e.value < hi as f64 - s3,
            format!("d = {d}: T = {} strictly inside ({lo}, {hi}) beyond 3σ", describe(&e)),
        );
        c.check(
            e.std_error < 0.01 * e.value,
            format!("d = {d}: relative error {:.3}%", 100.0 * e.std_error / e.value),
        );
        match classify_degree(e.value) {
            Ok(k) => c.check(k == d, format!("d = {d}: classified as degree {k}")),
            Err(err) => c.error(&format!("d = {d}: classify"), err),
        }
        c.check(secs <= 600.0, format!("d = {d}: {secs:.1}s within 600s"));
    }
    c
}

fn curve_of_degree(d: u32) -> HomogeneousPolynomial {
    if d == 1 {
        line()
    } else {
        fermat(3, d)
    }
}

fn gauss_bonnet_suite() -> Checks {
    let mut c = Checks::new();
    for d in 1..=4u32 {
        let samples = if d == 4 { 1_500_000 } else { 200_000 };
        let chi = 2.0 - ((d - 1) * (d.max(2) - 2)) as f64;
        match gauss_bonnet(&curve_of_degree(d), &SamplingConfig::new(samples, 20 + d as u64)) {
            Ok(e) => c.check(
                (e.value - chi).abs() <= 0.02,
                format!("d = {d}: (1/2π)∫K dA = {} vs χ = {chi} ± 0.02", describe(&e)),
            ),
            Err(e) => c.error(&format!("d = {d}"), e),
        }
    }
    c
}

fn average_curvature_suite() -> Checks {
    let mut c = Checks::new();
    for d in 1..=4u32 {
        let expect = crate::topology::average_curvature(d);
        match average_curvature(&curve_of_degree(d), &SamplingConfig::new(200_000, 30 + d as u64)) {
            Ok(e) => c.check(
                (e.value - expect).abs() <= (3.0 * e.std_error).max(1e-9),
                format!("d = {d}: mean K = {} vs {expect} within 3σ", describe(&e)),
            ),
            Err(e) => c.error(&format!("d = {d}"), e),
        }
    }
    c
}

fn spectrum_structure(suite: Suite) -> Checks {
    let mut c = Checks::new();
    for (name, poly) in test_curves(suite) {
        let result = (|| -> Result<(f64, f64, f64, f64, f64)> {
            let lifted = LiftedHypersurface::new(&poly)?;
            let mut rng = ChaCha8Rng::seed_from_u64(6);
            let (mut fiber, mut pairing, mut trace, mut rot, mut phase) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for z in random_points(&poly, 100, 60)? {
                let (frames, spec) = lifted.spectrum_at(&z)?;
                let scale = spec.eigenvalues.iter().fold(1.0f64, |m, e| m.max(e.abs()));
                fiber = fiber.max(spec.fiber_residual / scale);
                pairing = pairing.max(spec.pairing_residual / scale);
                let b = lifted.second_fundamental_form(&z, &frames.normal_basis[0])?;
                // relative to max(1, ‖B‖), the scale of the other residuals
                trace = trace.max(b.trace().abs() / b.norm().max(1.0));
                for _ in 0..20 {
                    let theta = rng.random_range(0.0..2.0 * PI);
                    let u = rotate_normal(&frames.normal_basis[0], theta, &frames);
                    let rotated = lifted.principal_spectrum(&z, &u)?;
                    rot = rot.max((rotated.kappas[0] - spec.kappas[0]).abs());
                }
                let phi = rng.random_range(0.0..2.0 * PI);
                let (_, moved) = lifted.spectrum_at(&z.rotate_phase(phi))?;
                phase = phase.max((moved.kappas[0] - spec.kappas[0]).abs());
            }
            Ok((fiber, pairing, trace, rot, phase))
        })();
        match result {
            Ok((fiber, pairing, trace, rot, phase)) => {
                c.check(fiber < 1e-7, format!("{name}: fiber eigenvalue {fiber:.1e}"));
                c.check(pairing < 1e-7, format!("{name}: ± pairing residual {pairing:.1e}"));
                c.check(trace < 1e-9, format!("{name}: relative trace {trace:.1e}"));
                c.check(rot < 1e-8, format!("{name}: normal-rotation change {rot:.1e}"));
                c.check(phase < 1e-8, format!("{name}: fiber-phase change {phase:.1e}"));
            }
            Err(e) => c.error(name, e),
        }
    }
    c
}

fn gauss_equation(suite: Suite) -> Checks {
    let mut c = Checks::new();
    for (name, poly) in test_curves(suite) {
        let result = (|| -> Result<f64> {
            let curve = PlaneCurve::new(&poly)?;
            let mut worst = 0.0f64;
            for z in random_points(&poly, 100, 70)? {
                let b = curve.branch_at(z.coords())?;
                let (ki, ke) = curve.gauss_equation_check(&b)?;
                worst = worst.max((ki - ke).abs());
            }
            Ok(worst)
        })();
        match result {
            Ok(w) => c.check(w < 1e-4, format!("{name}: max |K − (4 − 2κ²)| = {w:.1e}")),
            Err(e) => c.error(name, e),
        }
    }
    c
}

fn route_agreement() -> Checks {
    let mut c = Checks::new();
    let curves = [
        ("line", line()),
        ("conic", fermat(3, 2)),
        ("random cubic", random_polynomial(3, 3, 77)),
    ];
    for (name, poly) in curves {
        let routes = [
            (
                "closed form",
                total_curvature_curve(&poly, &SamplingConfig::new(100_000, 81)),
            ),
            (
                "radial",
                total_curvature_hypersurface(&poly, &SamplingConfig::new(50_000, 82)),
            ),
            (
                "sphere lift",
                total_curvature_sphere_lift(&poly, &SamplingConfig::new(50_000, 83)),
            ),
        ];
        let mut ok = Vec::new();
        for (route, r) in routes {
            match r {
                Ok(e) => ok.push((route, e)),
                Err(e) => c.error(&format!("{name} {route}"), e),
            }
        }
        for i in 0..ok.len() {
            for j in i + 1..ok.len() {
                let (a, b) = (&ok[i].1, &ok[j].1);
                let sigma = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
                c.check(
                    (a.value - b.value).abs() <= 3.0 * sigma,
                    format!(
                        "{name}: {} {} vs {} {} (|Δ| = {:.4}, 3σ = {:.4})",
                        ok[i].0,
                        describe(a),
                        ok[j].0,
                        describe(b),
                        (a.value - b.value).abs(),
                        3.0 * sigma
                    ),
                );
            }
        }
    }
    c
}

/// Error relative to the magnitude the terms would have without
/// cancellation, which is the scale rounding acts on.
fn scaled_error(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(scale).max(f64::MIN_POSITIVE)
}

fn pointwise_identities() -> Checks {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let draw = |rng: &mut ChaCha8Rng| {
        let m = rng.random_range(1..=3usize);
        let n = m + rng.random_range(1..=2usize);
        let kappas: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..3.0)).collect();
        let r = rng.random_range(1e-3..FRAC_PI_2 - 1e-3);
        (RadialContext::new(n, m, kappas).expect("valid context"), r)
    };
    // magnitude of the product form without sign cancellation
    let magnitude = |ctx: &RadialContext, r: f64| {
        let (s, co) = r.sin_cos();
        let p = (2 * ctx.ambient_dim() - 2 * ctx.manifold_dim() - 1) as i32;
        ctx.kappas().iter().map(|k| co * co + k * k * s * s).product::<f64>() * co * s.powi(p)
    };

    let (mut sym, mut lift, mut dexp, mut eucl) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let (ctx, r) = draw(&mut rng);
        let scale = magnitude(&ctx, r);
        sym = sym.max(scaled_error(
            cp_integrand(&ctx, r),
            cp_integrand_symmetric(&ctx, r),
            scale,
        ));

        let (l, rr) = lift_identity_check(&ctx, r);
        lift = lift.max(scaled_error(l, rr, scale));

        // Jacobi fields along the normal geodesic: cos r ∓ κ sin r on each
        // principal pair, sin r cos r on J u, sin r on the other normals
        let (s, co) = r.sin_cos();
        let mut jacobi: Vec<f64> = Vec::new();
        for &k in ctx.kappas() {
            jacobi.push(co - k * s);
            jacobi.push(co + k * s);
        }
        jacobi.push(s * co / r);
        for _ in 0..(2 * ctx.ambient_dim() - 2 * ctx.manifold_dim() - 2) {
            jacobi.push(s / r);
        }
        let det = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(jacobi)).determinant();
        let p = (2 * ctx.ambient_dim() - 2 * ctx.manifold_dim() - 1) as i32;
        let ours = dexp_det(&ctx, r).expect("r > 0");
        dexp = dexp.max(scaled_error(ours, det, scale / r.powi(p)));

        let eigs: Vec<f64> = (0..rng.random_range(1..=4))
            .map(|_| rng.random_range(-3.0..3.0))
            .collect();
        let sphere_dim = eigs.len() + rng.random_range(1..=3usize);
        let theta = rng.random_range(1e-3..PI - 1e-3);
        let (a, b) = euclidean_density_check(&eigs, sphere_dim, theta);
        let (st, ct) = theta.sin_cos();
        let escale = eigs.iter().map(|k| k.abs() * st + ct.abs()).product::<f64>()
            * st.powi(sphere_dim as i32 - eigs.len() as i32 - 1);
        eucl = eucl.max(scaled_error(a, b, escale));
    }
    c.check(
        sym < 1e-12,
        format!("symmetric-function form: max relative error {sym:.1e}"),
    );
    c.check(
        lift < 1e-12,
        format!("lift determinant factorization: max relative error {lift:.1e}"),
    );
    c.check(
        dexp < 1e-12,
        format!("normal exponential Jacobian: max relative error {dexp:.1e}"),
    );
    c.check(
        eucl < 1e-12,
        format!("Euclidean density identity: max relative error {eucl:.1e}"),
    );

    let mut worst = 0.0f64;
    for i in 0..=540 {
        let k = -50.0 + i as f64 / 10.0;
        let closed = curve_pointwise_closed_form(k).expect("K ≤ 4").value;
        let kappa = kappa_from_curvature(k).expect("K ≤ 4");
        let q = radial_quadrature(&RadialContext::plane_curve(kappa).expect("valid"));
        worst = worst.max((closed - q).abs());
    }
    c.check(
        worst < 1e-10,
        format!("closed form vs quadrature over K ∈ [−50, 4]: {worst:.1e}"),
    );
    c.check(
        elementary_symmetric(&[1.0, 2.0, 3.0]) == vec![1.0, 6.0, 11.0, 6.0],
        "elementary symmetric functions of (1, 2, 3)".into(),
    );
    c
}

fn topology_suite() -> Checks {
    let mut c = Checks::new();
    let cases: [(u32, u32, Vec<u64>); 3] = [
        (1, 1, vec![1, 0, 0, 1]),
        (3, 1, vec![1, 2, 2, 1]),
        (2, 2, vec![1, 0, 1, 1, 0, 1]),
    ];
    for (d, m, expect) in cases {
        let result = hypersurface_betti(d, m).and_then(|b| Ok((gysin_transfer(&b)?, b.middle_sum()?)));
        match result {
            Ok((lift, middle)) => {
                c.check(lift.dims == expect, format!("d = {d}, m = {m}: lift {:?}", lift.dims));
                c.check(
                    lift.total() == middle,
                    format!("d = {d}, m = {m}: lift total {} = {middle}", lift.total()),
                );
            }
            Err(e) => c.error(&format!("d = {d}, m = {m}"), e),
        }
    }
    let jensen = (1..=100).all(jensen_identity_holds);
    c.check(jensen, "curvature identity at K_d = 2(3 − d) exact for d ≤ 100".into());
    let gaps = (1..=100u32).all(|d| {
        let (_, hi) = degree_interval(d).expect("d ≥ 1");
        let (lo, _) = degree_interval(d + 1).expect("d ≥ 1");
        lo - hi == 2
    });
    c.check(gaps, "degree intervals disjoint with gap 2 for d ≤ 100".into());
    c
}

fn quadric_surface() -> Checks {
    let mut c = Checks::new();
    let poly = fermat(4, 2);
    let betti = BettiVector::kahler(vec![1, 0, 2, 0, 1]).expect("valid");
    match total_curvature_hypersurface(&poly, &SamplingConfig::new(50_000, 11)) {
        Ok(e) => {
            c.check(e.std_error < 0.02 * e.value, format!("T = {}", describe(&e)));
            c.check(
                e.value >= 4.0 - 3.0 * e.std_error,
                format!("T ≥ β₁ + 2β₂ + β₃ = 4 within 3σ (margin {:.4})", e.value - 4.0),
            );
            if let Ok(b) = check_basicestimate(&betti, e.value + 3.0 * e.std_error) {
                c.check(b.holds, format!("middle Betti bound: {} ≤ {:.4}", b.lhs, b.rhs));
            }
            match check_cpcl_a(&betti, e.value) {
                Ok(b) => c.check(b.holds, format!("Σβ = {} ≤ (3/2)T = {:.4}", b.lhs, b.rhs)),
                Err(err) => c.error("total Betti bound", err),
            }
        }
        Err(e) => c.error("quadric estimate", e),
    }
    match area(&poly, &SamplingConfig::new(50_000, 12)) {
        Ok(e) => c.check(
            (e.value / (PI * PI) - 1.0).abs() <= 0.02,
            format!("volume = {} vs π² ± 2%", describe(&e)),
        ),
        Err(e) => c.error("quadric volume", e),
    }
    c
}

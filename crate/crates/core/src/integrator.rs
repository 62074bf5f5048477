//! Monte Carlo integration of pointwise curvature quantities over a
//! hypersurface `V(F) ⊂ CP^{m+1}`.
//!
//! Each sample projects the hypersurface from every coordinate vertex `e_k`
//! onto the opposite `CP^m`, draws an FS-uniform base point, and solves the
//! fiber polynomial. Projection `k` has area-formula Jacobian
//! `J_k = |∂_k F|² / (‖∇F‖² (1 − |z_k|²)^{m+1})` at a unit point `z`, and a
//! root contributes `h(z) / Σ_j J_j`: the balance-heuristic split of the
//! integrand across all projections. The weights sum to one pointwise, so the
//! estimator is unbiased, and by Euler's identity `Σ_j J_j ≥ 1/(m + 2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::curve_metrics::PlaneCurve;
use crate::error::{Error, Result};
use crate::fubini_study::{fs_volume, random_unitary, uniform_sphere_point, SpherePoint};
use crate::polynomial::{univariate_roots, HomogeneousPolynomial, JetValue, PolynomialJet};
use crate::radial_profile::{radial_quadrature, sphere_radial_quadrature, RadialContext};
use crate::rng::{run_rng, sample_rng};
use crate::sampling::{map_indexed, mean_estimate, ratio_estimate, MeanEstimate, SamplingConfig};
use crate::shape_spectrum::{rotate_normal, LiftedHypersurface};

/// Projections whose pure-power coefficient is below this fraction of the
/// largest coefficient trigger a random unitary change of coordinates.
pub const ROTATION_THRESHOLD: f64 = 1e-2;
const MAX_ROTATION_ATTEMPTS: usize = 100;
/// Rejected fraction above which the estimate carries a warning.
pub const REJECTION_WARNING: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    CurveClosedForm,
    HypersurfaceRadial,
    SphereLift,
    AreaOnly,
    GaussBonnet,
    AverageCurvature,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::CurveClosedForm => "curve_closed_form",
            Method::HypersurfaceRadial => "hypersurface_radial",
            Method::SphereLift => "sphere_lift",
            Method::AreaOnly => "area_only",
            Method::GaussBonnet => "gauss_bonnet",
            Method::AverageCurvature => "average_curvature",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "curve_closed_form" | "closed-form" | "curve" => Method::CurveClosedForm,
            "hypersurface_radial" | "radial" => Method::HypersurfaceRadial,
            "sphere_lift" | "sphere" => Method::SphereLift,
            "area_only" | "area" => Method::AreaOnly,
            "gauss_bonnet" => Method::GaussBonnet,
            "average_curvature" => Method::AverageCurvature,
            other => return Err(Error::Input(format!("unknown method `{other}`"))),
        })
    }
}

/// Result of an estimator run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub n_rejected: usize,
    pub seed: u64,
    pub method: Method,
    /// Rows of the unitary `U` with `F(U w)` the integrated polynomial, as
    /// `[re, im]` pairs, when a change of coordinates was needed.
    pub unitary_rotation: Option<Vec<Vec<[f64; 2]>>>,
    pub warning: Option<String>,
}

impl CurvatureEstimate {
    pub fn rejected_fraction(&self) -> f64 {
        if self.n_samples == 0 {
            0.0
        } else {
            self.n_rejected as f64 / self.n_samples as f64
        }
    }
}

/// A polynomial in coordinates where every vertex projection is nondegenerate.
#[derive(Debug, Clone)]
pub struct PreparedHypersurface {
    poly: HomogeneousPolynomial,
    rotation: Option<Vec<Vec<Complex64>>>,
}

impl PreparedHypersurface {
    pub fn new(poly: &HomogeneousPolynomial, seed: u64) -> Result<Self> {
        let n = poly.num_vars();
        if !(3..=4).contains(&n) {
            return Err(Error::Unsupported(format!(
                "hypersurfaces in CP^1 or CP^2 ({n} variables) are supported for curves and surfaces only"
            )));
        }
        if poly.is_zero() {
            return Err(Error::Input("zero polynomial".into()));
        }
        if Self::nondegenerate(poly) {
            return Ok(Self {
                poly: poly.clone(),
                rotation: None,
            });
        }
        let mut rng = run_rng(seed);
        for _ in 0..MAX_ROTATION_ATTEMPTS {
            let u = random_unitary(&mut rng, n);
            let rotated = poly.substitute_linear(&u)?;
            if Self::nondegenerate(&rotated) {
                return Ok(Self {
                    poly: rotated,
                    rotation: Some(u),
                });
            }
        }
        Err(Error::Input(
            "no coordinate rotation makes the projections nondegenerate".into(),
        ))
    }

    fn nondegenerate(poly: &HomogeneousPolynomial) -> bool {
        let scale = poly.max_coefficient_modulus();
        (0..poly.num_vars()).all(|k| poly.pure_power_coefficient(k).norm() >= ROTATION_THRESHOLD * scale)
    }

    pub fn polynomial(&self) -> &HomogeneousPolynomial {
        &self.poly
    }

    pub fn rotation(&self) -> Option<&Vec<Vec<Complex64>>> {
        self.rotation.as_ref()
    }
}

/// Pointwise quantity integrated against the induced volume.
enum Integrand {
    Area,
    CurveClosedForm(PlaneCurve),
    GaussBonnet(PlaneCurve),
    AverageCurvature(PlaneCurve),
    Radial(LiftedHypersurface),
    SphereLift {
        lifted: LiftedHypersurface,
        phase_range: (f64, f64),
    },
}

impl Integrand {
    fn eval<R: Rng>(&self, z: &[Complex64], jet: &JetValue, ambient_dim: usize, rng: &mut R) -> Result<f64> {
        let m = ambient_dim - 1;
        match self {
            Integrand::Area => Ok(1.0),
            Integrand::CurveClosedForm(c) => {
                let k = c.curvature_from_jet(z, jet)?;
                Ok(((k - 4.0).powi(2) + 4.0) / (6.0 - k) / PI)
            }
            Integrand::GaussBonnet(c) => Ok(c.curvature_from_jet(z, jet)? / (2.0 * PI)),
            Integrand::AverageCurvature(c) => c.curvature_from_jet(z, jet),
            Integrand::Radial(lifted) => {
                let point = SpherePoint::new(z)?;
                let (_, spec) = lifted.spectrum_with_jet(&point, jet)?;
                let ctx = RadialContext::new(ambient_dim, m, spec.kappas)?;
                Ok(4.0 * PI / fs_volume(ambient_dim)? * radial_quadrature(&ctx))
            }
            Integrand::SphereLift { lifted, phase_range } => {
                let phi = rng.random_range(phase_range.0..phase_range.1);
                let theta = rng.random_range(0.0..2.0 * PI);
                let point = SpherePoint::new(z)?.rotate_phase(phi);
                let frames = lifted.frames_at(&point)?;
                let u = rotate_normal(&frames.normal_basis[0], theta, &frames);
                let spec = lifted.principal_spectrum(&point, &u)?;
                let j = sphere_radial_quadrature(&spec.eigenvalues, 2 * ambient_dim + 1);
                // fiber circle and unit normal circle each have length 2π,
                // and Vol(S^{2N+1}) = 2π Vol(CP^N)
                Ok(2.0 * PI / fs_volume(ambient_dim)? * j)
            }
        }
    }
}

/// Per-sample totals of `∫ h` and `∫ 1`.
#[derive(Debug, Clone, Copy)]
struct Totals {
    value: f64,
    area: f64,
}

/// Gradient norm, relative to `degree × max |coefficient|`, below which a
/// sampled point counts as singular. Roots of multiple factors are only
/// resolved to about the square root of machine precision.
pub const SINGULAR_GRADIENT: f64 = 1e-7;

struct Sampler {
    jet: PolynomialJet,
    gradient_floor: f64,
    num_vars: usize,
    base_volume: f64,
    integrand: Integrand,
}

impl Sampler {
    /// `Σ_j J_j` over all vertex projections.
    fn jacobian_sum(&self, z: &[Complex64], grad: &[Complex64]) -> f64 {
        let m1 = (self.num_vars - 1) as i32;
        let g2: f64 = grad.iter().map(|g| g.norm_sqr()).sum();
        z.iter()
            .zip(grad)
            .map(|(zk, gk)| gk.norm_sqr() / (g2 * (1.0 - zk.norm_sqr()).powi(m1)))
            .sum()
    }

    fn sample(&self, seed: u64, index: u64) -> Result<Totals> {
        let mut rng = sample_rng(seed, index);
        let ambient_dim = self.num_vars - 1;
        let mut value = 0.0;
        let mut area = 0.0;
        for k in 0..self.num_vars {
            let base = uniform_sphere_point(&mut rng, self.num_vars - 1);
            let coeffs = self.jet.poly().fiber_coefficients(k, &base);
            for t in univariate_roots(&coeffs)? {
                let mut z = base.clone();
                z.insert(k, t);
                let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                z.iter_mut().for_each(|c| *c /= norm);
                let jet = self.jet.evaluate(&z);
                let g2: f64 = jet.gradient.iter().map(|g| g.norm_sqr()).sum();
                if !(g2.sqrt() > self.gradient_floor) {
                    return Err(Error::SingularPoint(format!("gradient norm {:.1e}", g2.sqrt())));
                }
                let j = self.jacobian_sum(&z, &jet.gradient);
                if !(j > 0.0 && j.is_finite()) {
                    return Err(Error::SingularPoint("vanishing gradient".into()));
                }
                let w = 1.0 / j;
                value += w * self.integrand.eval(&z, &jet, ambient_dim, &mut rng)?;
                area += w;
            }
        }
        Ok(Totals {
            value: value * self.base_volume,
            area: area * self.base_volume,
        })
    }
}

fn run(
    poly: &HomogeneousPolynomial,
    method: Method,
    config: &SamplingConfig,
    phase_range: (f64, f64),
) -> Result<CurvatureEstimate> {
    if config.samples == 0 {
        return Err(Error::Input("sample count must be positive".into()));
    }
    let prepared = PreparedHypersurface::new(poly, config.seed)?;
    let p = prepared.polynomial();
    let num_vars = p.num_vars();
    let curve = || {
        if num_vars != 3 {
            return Err(Error::Unsupported(format!(
                "method {} needs a plane curve",
                method.name()
            )));
        }
        PlaneCurve::new(p)
    };
    let integrand = match method {
        Method::AreaOnly => Integrand::Area,
        Method::CurveClosedForm => Integrand::CurveClosedForm(curve()?),
        Method::GaussBonnet => Integrand::GaussBonnet(curve()?),
        Method::AverageCurvature => Integrand::AverageCurvature(curve()?),
        Method::HypersurfaceRadial => Integrand::Radial(LiftedHypersurface::new(p)?),
        Method::SphereLift => {
            curve()?;
            Integrand::SphereLift {
                lifted: LiftedHypersurface::new(p)?,
                phase_range,
            }
        }
    };
    let sampler = Sampler {
        jet: PolynomialJet::new(p),
        gradient_floor: SINGULAR_GRADIENT * p.degree() as f64 * p.max_coefficient_modulus(),
        num_vars,
        base_volume: fs_volume(num_vars - 2)?,
        integrand,
    };
    let seed = config.seed;
    let results = map_indexed(config.samples, config, |i| sampler.sample(seed, i).ok())?;
    let accepted: Vec<Totals> = results.iter().flatten().copied().collect();
    let n_rejected = config.samples - accepted.len();
    if accepted.len() < 2 {
        return Err(Error::SingularPoint(format!(
            "{n_rejected} of {} samples failed; the hypersurface is likely singular",
            config.samples
        )));
    }
    let values: Vec<f64> = accepted.iter().map(|t| t.value).collect();
    let est: MeanEstimate = if method == Method::AverageCurvature {
        let areas: Vec<f64> = accepted.iter().map(|t| t.area).collect();
        ratio_estimate(&values, &areas, config.reduction)
    } else {
        mean_estimate(&values, config.reduction)
    };
    let fraction = n_rejected as f64 / config.samples as f64;
    let warning = (fraction > REJECTION_WARNING).then(|| {
        format!(
            "{:.2}% of samples were rejected near singular or ramified points",
            100.0 * fraction
        )
    });
    Ok(CurvatureEstimate {
        value: est.mean,
        std_error: est.std_error,
        n_samples: config.samples,
        n_rejected,
        seed,
        method,
        unitary_rotation: prepared
            .rotation()
            .map(|u| u.iter().map(|row| row.iter().map(|c| [c.re, c.im]).collect()).collect()),
        warning,
    })
}

/// Runs the estimator for `method`.
pub fn estimate(poly: &HomogeneousPolynomial, method: Method, config: &SamplingConfig) -> Result<CurvatureEstimate> {
    run(poly, method, config, (0.0, 2.0 * PI))
}

/// `(1/π) ∫ ((K−4)² + 4)/(6 − K) dA` for a plane curve.
pub fn total_curvature_curve(poly: &HomogeneousPolynomial, config: &SamplingConfig) -> Result<CurvatureEstimate> {
    estimate(poly, Method::CurveClosedForm, config)
}

/// Fubini–Study volume of a curve in `CP²` or a surface in `CP³`.
pub fn area(poly: &HomogeneousPolynomial, config: &SamplingConfig) -> Result<CurvatureEstimate> {
    estimate(poly, Method::AreaOnly, config)
}

/// Total absolute curvature from holomorphic principal curvatures and the
/// radial integral, for curves in `CP²` and surfaces in `CP³`.
pub fn total_curvature_hypersurface(
    poly: &HomogeneousPolynomial,
    config: &SamplingConfig,
) -> Result<CurvatureEstimate> {
    estimate(poly, Method::HypersurfaceRadial, config)
}

/// Total absolute curvature of the Hopf lift in `S⁵` of a plane curve.
pub fn total_curvature_sphere_lift(poly: &HomogeneousPolynomial, config: &SamplingConfig) -> Result<CurvatureEstimate> {
    estimate(poly, Method::SphereLift, config)
}

/// Sphere-lift estimate with the fiber phase restricted to `[lo, hi)`.
pub fn total_curvature_sphere_lift_phase(
    poly: &HomogeneousPolynomial,
    config: &SamplingConfig,
    phase_range: (f64, f64),
) -> Result<CurvatureEstimate> {
    if !(phase_range.0 < phase_range.1) {
        return Err(Error::Input("empty phase range".into()));
    }
    run(poly, Method::SphereLift, config, phase_range)
}

/// `(1/2π) ∫ K dA`.
pub fn gauss_bonnet(poly: &HomogeneousPolynomial, config: &SamplingConfig) -> Result<CurvatureEstimate> {
    estimate(poly, Method::GaussBonnet, config)
}

/// Area-weighted mean Gaussian curvature `∫ K dA / ∫ dA`.
pub fn average_curvature(poly: &HomogeneousPolynomial, config: &SamplingConfig) -> Result<CurvatureEstimate> {
    estimate(poly, Method::AverageCurvature, config)
}

/// Points of `V(F)` on the unit sphere, from intersections with random
/// complex lines `a + t b`. Not FS-uniform; meant for pointwise checks.
pub fn random_points(poly: &HomogeneousPolynomial, count: usize, seed: u64) -> Result<Vec<SpherePoint>> {
    let n = poly.num_vars();
    let d = poly.degree() as usize;
    let mut out = Vec::with_capacity(count);
    let mut index = 0u64;
    while out.len() < count {
        let mut rng = sample_rng(seed, index);
        index += 1;
        if index > 100 * count as u64 + 100 {
            return Err(Error::SingularPoint("could not find points on the hypersurface".into()));
        }
        let a = uniform_sphere_point(&mut rng, n);
        let b = uniform_sphere_point(&mut rng, n);
        // coefficients of t ↦ F(a + t b) by a discrete Fourier transform of
        // its values at the (d+1)-th roots of unity
        let omega: Vec<Complex64> = (0..=d)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / (d + 1) as f64))
            .collect();
        let values: Vec<Complex64> = omega
            .iter()
            .map(|w| {
                let z: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x + w * y).collect();
                poly.evaluate(&z)
            })
            .collect::<Result<_>>()?;
        let coeffs: Vec<Complex64> = (0..=d)
            .map(|j| {
                values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * omega[(j * (d + 1 - k)) % (d + 1)])
                    .sum::<Complex64>()
                    / (d + 1) as f64
            })
            .collect();
        let Ok(roots) = univariate_roots(&coeffs) else { continue };
        for t in roots {
            let z: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x + t * y).collect();
            out.push(SpherePoint::new(&z)?);
            if out.len() == count {
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Execution;

    fn fermat(n: usize, d: u32) -> HomogeneousPolynomial {
        HomogeneousPolynomial::fermat(n, d).unwrap()
    }

    #[test]
    fn line_is_rotated_and_has_area_pi() {
        let line = HomogeneousPolynomial::coordinate(3, 1).unwrap();
        let e = area(&line, &SamplingConfig::new(20_000, 3)).unwrap();
        assert!(e.unitary_rotation.is_some());
        assert!((e.value - PI).abs() < 3.0 * e.std_error, "{e:?}");
        let t = total_curvature_curve(&line, &SamplingConfig::new(20_000, 3)).unwrap();
        assert!((t.value - 2.0).abs() < 3.0 * t.std_error && t.std_error < 0.01, "{t:?}");
    }

    #[test]
    fn conic_values() {
        let conic = fermat(3, 2);
        let e = area(&conic, &SamplingConfig::new(20_000, 1)).unwrap();
        assert!(e.unitary_rotation.is_none());
        assert!((e.value - 2.0 * PI).abs() < 3.0 * e.std_error.max(1e-3), "{e:?}");
        let t = total_curvature_curve(&conic, &SamplingConfig::new(20_000, 2)).unwrap();
        assert!((t.value - 4.0).abs() < 0.05 && t.n_rejected == 0, "{t:?}");
    }

    #[test]
    fn deterministic_across_workers_and_modes() {
        let cubic = fermat(3, 3);
        let base = SamplingConfig::new(3000, 9);
        let a = total_curvature_curve(&cubic, &base.clone().with_threads(1)).unwrap();
        let b = total_curvature_curve(&cubic, &base.clone().with_threads(4)).unwrap();
        let c = total_curvature_curve(&cubic, &base.clone().with_execution(Execution::Sequential)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.value.to_bits(), c.value.to_bits());
        assert_eq!(a.std_error.to_bits(), c.std_error.to_bits());
    }

    #[test]
    fn error_bar_scales_with_sample_count() {
        let cubic = fermat(3, 3);
        let mut ratios = Vec::new();
        for seed in 0..8 {
            let small = total_curvature_curve(&cubic, &SamplingConfig::new(4000, seed)).unwrap();
            let large = total_curvature_curve(&cubic, &SamplingConfig::new(8000, seed + 100)).unwrap();
            ratios.push(large.std_error / small.std_error);
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!((0.6..=0.82).contains(&mean), "{mean}");
    }

    #[test]
    fn linear_plane_in_cp3() {
        let plane = HomogeneousPolynomial::coordinate(4, 2).unwrap();
        let t = total_curvature_hypersurface(&plane, &SamplingConfig::new(2000, 4)).unwrap();
        assert!((t.value - 2.0).abs() < 0.05, "{t:?}");
        let a = area(&plane, &SamplingConfig::new(2000, 4)).unwrap();
        assert!((a.value - PI * PI / 2.0).abs() < 0.01 * PI * PI / 2.0, "{a:?}");
    }

    #[test]
    fn random_points_lie_on_the_hypersurface() {
        for poly in [
            fermat(3, 5),
            fermat(4, 3),
            HomogeneousPolynomial::coordinate(3, 0).unwrap(),
        ] {
            let pts = random_points(&poly, 50, 2).unwrap();
            assert_eq!(pts.len(), 50);
            for p in pts {
                assert!(poly.evaluate(p.coords()).unwrap().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn phase_strata_agree() {
        let conic = fermat(3, 2);
        let cfg = SamplingConfig::new(4000, 21);
        let lo = total_curvature_sphere_lift_phase(&conic, &cfg, (0.0, PI)).unwrap();
        let hi = total_curvature_sphere_lift_phase(&conic, &cfg, (PI, 2.0 * PI)).unwrap();
        let sigma = (lo.std_error.powi(2) + hi.std_error.powi(2)).sqrt();
        assert!((lo.value - hi.value).abs() < 3.0 * sigma.max(1e-9), "{lo:?} {hi:?}");
        assert!(total_curvature_sphere_lift_phase(&conic, &cfg, (1.0, 1.0)).is_err());
    }

    #[test]
    fn input_validation() {
        let quintic_in_cp4 = fermat(5, 2);
        assert!(matches!(
            area(&quintic_in_cp4, &SamplingConfig::new(10, 0)),
            Err(Error::Unsupported(_))
        ));
        assert!(total_curvature_curve(&fermat(4, 2), &SamplingConfig::new(10, 0)).is_err());
        assert!(area(&fermat(3, 2), &SamplingConfig::new(0, 0)).is_err());
        assert!("bogus".parse::<Method>().is_err());
        assert_eq!("sphere_lift".parse::<Method>().unwrap(), Method::SphereLift);
    }

    #[test]
    fn singular_curve_is_reported() {
        // a double line is singular everywhere
        let double = crate::polynomial::parse_polynomial("(z0 + 2*z1 + 3*z2)^2", Some(3)).unwrap();
        for method in [Method::CurveClosedForm, Method::AreaOnly, Method::HypersurfaceRadial] {
            let r = estimate(&double, method, &SamplingConfig::new(200, 0));
            assert!(matches!(r, Err(Error::SingularPoint(_))), "{method:?}: {r:?}");
        }
        let double = crate::polynomial::parse_polynomial("z0^2", Some(3)).unwrap();
        assert!(total_curvature_curve(&double, &SamplingConfig::new(200, 0)).is_err());
    }
}

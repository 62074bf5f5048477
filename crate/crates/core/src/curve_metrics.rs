//! Intrinsic geometry of a smooth plane curve `V(F) ⊂ CP²`.
//!
//! A local branch is written as a graph `y = y(x)` in an affine chart. The
//! induced metric is `λ |dx|²` and its Gaussian curvature is
//! `K = −(2/λ) ∂_x ∂_x̄ log λ`, evaluated either by finite differences along a
//! Newton-continued branch or in closed form from `y''`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fubini_study::{ChartPoint, SpherePoint};
use crate::polynomial::{univariate_roots, HomogeneousPolynomial, JetValue, PolynomialJet};
use crate::radial_profile::curve_pointwise_closed_form;
use crate::shape_spectrum::LiftedHypersurface;

/// Default finite-difference step for [`PlaneCurve::gaussian_curvature`].
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Branch points need `|f_y| ≥ EPS_BRANCH × coefficient scale`.
pub const EPS_BRANCH: f64 = 1e-6;
const ON_CURVE_TOL: f64 = 1e-9;
const NEWTON_MAX_ITER: usize = 50;

/// Which homogeneous coordinate is set to 1, which is the base coordinate
/// `x`, and which is the fiber coordinate `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChartAxes {
    pub chart: usize,
    pub base: usize,
    pub fiber: usize,
}

impl ChartAxes {
    pub fn new(chart: usize, base: usize, fiber: usize) -> Result<Self> {
        let mut idx = [chart, base, fiber];
        idx.sort_unstable();
        if idx != [0, 1, 2] {
            return Err(Error::Input(format!(
                "chart axes must be a permutation of 0, 1, 2, got ({chart}, {base}, {fiber})"
            )));
        }
        Ok(Self { chart, base, fiber })
    }

    /// Homogeneous coordinates of the chart point `(x, y)`.
    pub fn homogeneous(&self, x: Complex64, y: Complex64) -> [Complex64; 3] {
        let mut z = [Complex64::new(0.0, 0.0); 3];
        z[self.chart] = Complex64::new(1.0, 0.0);
        z[self.base] = x;
        z[self.fiber] = y;
        z
    }
}

/// A point of the curve on a local branch `y = y(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchPoint {
    pub axes: ChartAxes,
    pub x: Complex64,
    pub y: Complex64,
    /// `∂f/∂y`, the conditioning witness.
    pub fy: Complex64,
    /// `dy/dx = −f_x / f_y`.
    pub yprime: Complex64,
}

impl BranchPoint {
    /// The base point `x` in the affine chart of the projection line.
    pub fn base_chart_point(&self) -> ChartPoint {
        ChartPoint {
            chart_index: 0,
            affine: vec![self.x],
        }
    }

    pub fn homogeneous(&self) -> [Complex64; 3] {
        self.axes.homogeneous(self.x, self.y)
    }

    pub fn sphere_point(&self) -> SpherePoint {
        SpherePoint::new(&self.homogeneous()).expect("chart points are nonzero")
    }
}

/// Pointwise intrinsic data at a branch point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureSample {
    pub branch: BranchPoint,
    pub lambda: f64,
    #[serde(rename = "K")]
    pub curvature: f64,
    pub kappa: Option<f64>,
    /// Value of the pointwise radial integral at `K`.
    pub profile: f64,
    pub weight: f64,
}

/// `λ = [(1+|y′|²)Q − |x̄ + ȳ y′|²] / Q²` with `Q = 1 + |x|² + |y|²`.
pub fn branch_density(b: &BranchPoint) -> f64 {
    density(b.x, b.y, b.yprime)
}

fn density(x: Complex64, y: Complex64, yp: Complex64) -> f64 {
    let q = 1.0 + x.norm_sqr() + y.norm_sqr();
    let cross = x.conj() + y.conj() * yp;
    ((1.0 + yp.norm_sqr()) * q - cross.norm_sqr()) / (q * q)
}

/// Gaussian curvature from the second derivative of the branch:
/// `K = 4 − 2 Q³ |y''|² / (λ Q²)³`.
pub fn closed_form_curvature(x: Complex64, y: Complex64, yp: Complex64, ypp: Complex64) -> f64 {
    let q = 1.0 + x.norm_sqr() + y.norm_sqr();
    let cross = x.conj() + y.conj() * yp;
    let wedge = (1.0 + yp.norm_sqr()) * q - cross.norm_sqr();
    4.0 - 2.0 * q.powi(3) * ypp.norm_sqr() / wedge.powi(3)
}

/// A smooth plane curve with its derivatives precomputed.
#[derive(Debug, Clone)]
pub struct PlaneCurve {
    jet: PolynomialJet,
    scale: f64,
}

impl PlaneCurve {
    pub fn new(poly: &HomogeneousPolynomial) -> Result<Self> {
        if poly.num_vars() != 3 {
            return Err(Error::Unsupported(format!(
                "plane curves need 3 homogeneous variables, got {}",
                poly.num_vars()
            )));
        }
        if poly.is_zero() {
            return Err(Error::Input("zero polynomial defines no curve".into()));
        }
        Ok(Self {
            jet: PolynomialJet::new(poly),
            scale: poly.max_coefficient_modulus(),
        })
    }

    pub fn polynomial(&self) -> &HomogeneousPolynomial {
        self.jet.poly()
    }

    fn eps_branch(&self) -> f64 {
        EPS_BRANCH * self.scale
    }

    fn jet_at(&self, axes: ChartAxes, x: Complex64, y: Complex64) -> JetValue {
        self.jet.evaluate(&axes.homogeneous(x, y))
    }

    /// Newton on `y ↦ f(x, y)` from `y0`.
    fn newton(&self, axes: ChartAxes, x: Complex64, y0: Complex64) -> Option<Complex64> {
        let mut y = y0;
        for _ in 0..NEWTON_MAX_ITER {
            let j = self.jet_at(axes, x, y);
            let fy = j.gradient[axes.fiber];
            if fy == Complex64::new(0.0, 0.0) {
                return None;
            }
            let dy = j.value / fy;
            y -= dy;
            if !y.is_finite() {
                return None;
            }
            if dy.norm() <= 4.0 * f64::EPSILON * (1.0 + y.norm()) {
                return Some(y);
            }
        }
        let j = self.jet_at(axes, x, y);
        (j.value.norm() <= ON_CURVE_TOL * self.scale * (1.0 + y.norm()).powi(self.degree())).then_some(y)
    }

    fn degree(&self) -> i32 {
        self.jet.poly().degree() as i32
    }

    /// Polishes `y` onto the curve over `x` and packages the branch data.
    pub fn branch_point(&self, axes: ChartAxes, x: Complex64, y: Complex64) -> Result<BranchPoint> {
        let y = self
            .newton(axes, x, y)
            .ok_or_else(|| Error::BranchContinuation(format!("Newton failed to converge at x = {x}")))?;
        let j = self.jet_at(axes, x, y);
        let size = (1.0 + x.norm() + y.norm()).powi(self.degree());
        if j.value.norm() > ON_CURVE_TOL * self.scale * size {
            return Err(Error::Input(format!(
                "point is not on the curve: |f| = {:e}",
                j.value.norm()
            )));
        }
        let fy = j.gradient[axes.fiber];
        if fy.norm() < self.eps_branch() {
            return Err(Error::SingularPoint(format!(
                "|f_y| = {:e} below the branch threshold",
                fy.norm()
            )));
        }
        Ok(BranchPoint {
            axes,
            x,
            y,
            fy,
            yprime: -j.gradient[axes.base] / fy,
        })
    }

    /// All branch points over `x`.
    pub fn branches_over(&self, axes: ChartAxes, x: Complex64) -> Result<Vec<BranchPoint>> {
        let mut base = axes.homogeneous(x, Complex64::new(0.0, 0.0)).to_vec();
        base.remove(axes.fiber);
        let coeffs = self.jet.poly().fiber_coefficients(axes.fiber, &base);
        univariate_roots(&coeffs)?
            .into_iter()
            .map(|y| self.branch_point(axes, x, y))
            .collect()
    }

    /// Chart adapted to a point: the largest coordinate is set to 1 and the
    /// fiber is the remaining coordinate with the larger partial derivative.
    pub fn adapted_axes(&self, z: &[Complex64]) -> ChartAxes {
        let chart = (0..3).max_by(|&i, &j| z[i].norm().total_cmp(&z[j].norm())).unwrap_or(0);
        let g = self.jet.gradient(z);
        let (a, b) = match chart {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (base, fiber) = if g[b].norm() >= g[a].norm() { (a, b) } else { (b, a) };
        ChartAxes { chart, base, fiber }
    }

    /// Branch point through a homogeneous point of the curve, in its adapted chart.
    pub fn branch_at(&self, z: &[Complex64]) -> Result<BranchPoint> {
        if z.len() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                actual: z.len(),
            });
        }
        let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let value = self.jet.value(z).norm() / norm.powi(self.degree());
        if !(value <= ON_CURVE_TOL * self.scale) {
            return Err(Error::Input(format!("point is not on the curve: |F| = {value:e}")));
        }
        let axes = self.adapted_axes(z);
        let c = z[axes.chart];
        self.branch_point(axes, z[axes.base] / c, z[axes.fiber] / c)
    }

    /// `(y′, y″)` along the branch.
    pub fn derivatives(&self, b: &BranchPoint) -> (Complex64, Complex64) {
        let j = self.jet_at(b.axes, b.x, b.y);
        Self::derivatives_from_jet(&j, b.axes)
    }

    fn derivatives_from_jet(j: &JetValue, axes: ChartAxes) -> (Complex64, Complex64) {
        let (bx, fy) = (axes.base, axes.fiber);
        let yp = -j.gradient[bx] / j.gradient[fy];
        let h = &j.hessian;
        let ypp = -(h[bx][bx] + 2.0 * h[bx][fy] * yp + h[fy][fy] * yp * yp) / j.gradient[fy];
        (yp, ypp)
    }

    /// Gaussian curvature from `y''` (no differencing).
    pub fn curvature_closed_form(&self, b: &BranchPoint) -> f64 {
        let (yp, ypp) = self.derivatives(b);
        closed_form_curvature(b.x, b.y, yp, ypp)
    }

    /// Gaussian curvature at a unit point `z` of the curve from the jet of `F`
    /// at `z`, without re-solving for the point.
    pub fn curvature_from_jet(&self, z: &[Complex64], jet: &JetValue) -> Result<f64> {
        let chart = (0..3).max_by(|&i, &j| z[i].norm().total_cmp(&z[j].norm())).unwrap_or(0);
        let (a, b) = match chart {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let g = &jet.gradient;
        let (base, fiber) = if g[b].norm() >= g[a].norm() { (a, b) } else { (b, a) };
        let gnorm = g.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if !(g[fiber].norm() >= self.eps_branch() * 1e-3 && g[fiber].norm() >= 1e-10 * gnorm) {
            return Err(Error::SingularPoint(format!(
                "gradient {gnorm:e} vanishes at the point"
            )));
        }
        let zc = z[chart];
        let axes = ChartAxes { chart, base, fiber };
        // derivatives at z/z_c follow from homogeneity: y″ scales by z_c
        let (yp, ypp) = Self::derivatives_from_jet(jet, axes);
        Ok(closed_form_curvature(z[base] / zc, z[fiber] / zc, yp, ypp * zc))
    }

    /// Gaussian curvature at a homogeneous point of the curve via its adapted chart.
    pub fn curvature_at(&self, z: &[Complex64]) -> Result<f64> {
        let b = self.branch_at(z)?;
        Ok(self.curvature_closed_form(&b))
    }

    fn log_density_near(&self, b: &BranchPoint, dx: Complex64) -> Result<f64> {
        let (yp, ypp) = self.derivatives(b);
        let x = b.x + dx;
        let guess = b.y + yp * dx + 0.5 * ypp * dx * dx;
        let y = self
            .newton(b.axes, x, guess)
            .ok_or_else(|| Error::BranchContinuation(format!("Newton diverged continuing from x = {} to {x}", b.x)))?;
        let drift = (y - guess).norm();
        if drift > 1e-3 * (1.0 + b.y.norm()) {
            return Err(Error::BranchContinuation(format!(
                "continuation jumped by {drift:e} near x = {}",
                b.x
            )));
        }
        let j = self.jet_at(b.axes, x, y);
        let fy = j.gradient[b.axes.fiber];
        if fy.norm() < self.eps_branch() {
            return Err(Error::BranchContinuation(
                "continuation reached a ramification point".into(),
            ));
        }
        Ok(density(x, y, -j.gradient[b.axes.base] / fy).ln())
    }

    fn laplacian_log_density(&self, b: &BranchPoint, h: f64) -> Result<f64> {
        let center = branch_density(b).ln();
        let mut sum = -4.0 * center;
        for dx in [
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
            Complex64::new(0.0, h),
            Complex64::new(0.0, -h),
        ] {
            sum += self.log_density_near(b, dx)?;
        }
        Ok(sum / (h * h))
    }

    /// `K = −(2/λ) ∂∂̄ log λ` by a five-point Laplacian with one Richardson level.
    pub fn gaussian_curvature(&self, b: &BranchPoint, step: f64) -> Result<f64> {
        if !(step > 0.0) {
            return Err(Error::Domain(format!(
                "finite-difference step must be positive, got {step}"
            )));
        }
        let h = step * (1.0 + b.x.norm());
        let coarse = self.laplacian_log_density(b, h)?;
        let fine = self.laplacian_log_density(b, 0.5 * h)?;
        let laplacian = (4.0 * fine - coarse) / 3.0;
        // Δ = 4 ∂∂̄
        Ok(-laplacian / (2.0 * branch_density(b)))
    }

    /// `(K_intrinsic, 4 − 2κ²)` with `κ` from the lifted shape operator.
    pub fn gauss_equation_check(&self, b: &BranchPoint) -> Result<(f64, f64)> {
        let intrinsic = self.gaussian_curvature(b, DEFAULT_FD_STEP)?;
        let lifted = LiftedHypersurface::new(self.jet.poly())?;
        let (_, spec) = lifted.spectrum_at(&b.sphere_point())?;
        let kappa = spec.kappas[0];
        Ok((intrinsic, 4.0 - 2.0 * kappa * kappa))
    }

    pub fn sample(&self, b: &BranchPoint) -> Result<CurvatureSample> {
        let k = self.curvature_closed_form(b);
        Ok(CurvatureSample {
            branch: *b,
            lambda: branch_density(b),
            curvature: k,
            kappa: Some(((4.0 - k) / 2.0).max(0.0).sqrt()),
            profile: curve_pointwise_closed_form(k.min(4.0))?.value,
            weight: 1.0,
        })
    }
}

pub fn gaussian_curvature(curve: &PlaneCurve, b: &BranchPoint, step: f64) -> Result<f64> {
    curve.gaussian_curvature(b, step)
}

pub fn gauss_equation_check(poly: &HomogeneousPolynomial, b: &BranchPoint) -> Result<(f64, f64)> {
    PlaneCurve::new(poly)?.gauss_equation_check(b)
}

//! Pointwise radial integrands of total absolute curvature and their
//! closed forms.
//!
//! All integrands are `|polynomial in (cos r, sin r)|`; the absolute value
//! creates kinks at known radii, so quadrature splits there and applies a
//! fixed Gauss–Legendre rule on each smooth piece.

use std::f64::consts::FRAC_PI_2;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Gauss–Legendre order used on every smooth piece.
pub const GAUSS_LEGENDRE_ORDER: usize = 40;

/// Dimensions and holomorphic principal curvatures at one point/normal of a
/// complex submanifold `M^m ⊂ CP^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialContext {
    ambient_dim: usize,
    manifold_dim: usize,
    kappas: Vec<f64>,
}

impl RadialContext {
    pub fn new(ambient_dim: usize, manifold_dim: usize, kappas: Vec<f64>) -> Result<Self> {
        if manifold_dim == 0 || manifold_dim >= ambient_dim {
            return Err(Error::Domain(format!(
                "need 1 <= m < N, got m = {manifold_dim}, N = {ambient_dim}"
            )));
        }
        if kappas.len() != manifold_dim {
            return Err(Error::DimensionMismatch {
                expected: manifold_dim,
                actual: kappas.len(),
            });
        }
        if kappas.iter().any(|k| !(k.is_finite() && *k >= 0.0)) {
            return Err(Error::Domain(
                "principal curvatures must be finite and nonnegative".into(),
            ));
        }
        Ok(Self {
            ambient_dim,
            manifold_dim,
            kappas,
        })
    }

    /// Plane curve (`m = 1`, `N = 2`) with curvature `kappa`.
    pub fn plane_curve(kappa: f64) -> Result<Self> {
        Self::new(2, 1, vec![kappa])
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn manifold_dim(&self) -> usize {
        self.manifold_dim
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    /// Exponent `2N - 2m - 1` of the `sin r` factor.
    fn sin_power(&self) -> i32 {
        (2 * self.ambient_dim - 2 * self.manifold_dim - 1) as i32
    }

    /// The full lifted spectrum `{0, κ_1, -κ_1, ..., κ_m, -κ_m}`.
    pub fn lifted_spectrum(&self) -> Vec<f64> {
        let mut eigs = vec![0.0];
        for &k in &self.kappas {
            eigs.push(k);
            eigs.push(-k);
        }
        eigs
    }
}

/// Elementary symmetric functions `σ_0, ..., σ_n` of `values`.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut sigma = vec![0.0; values.len() + 1];
    sigma[0] = 1.0;
    for (j, &v) in values.iter().enumerate() {
        for i in (1..=j + 1).rev() {
            sigma[i] += sigma[i - 1] * v;
        }
    }
    sigma
}

/// `|∏ (cos²r − κ_i² sin²r)| · cos r · sin^{2N−2m−1} r`.
pub fn cp_integrand(ctx: &RadialContext, r: f64) -> f64 {
    let (s, c) = r.sin_cos();
    let prod: f64 = ctx.kappas.iter().map(|k| c * c - k * k * s * s).product();
    prod.abs() * c * s.powi(ctx.sin_power())
}

/// The same integrand expanded in the symmetric functions `σ_i(κ²)`.
pub fn cp_integrand_symmetric(ctx: &RadialContext, r: f64) -> f64 {
    let (s, c) = r.sin_cos();
    let squares: Vec<f64> = ctx.kappas.iter().map(|k| k * k).collect();
    let sigma = elementary_symmetric(&squares);
    let m = ctx.manifold_dim as i32;
    let p = ctx.sin_power();
    let sum: f64 = sigma
        .iter()
        .enumerate()
        .map(|(i, &si)| {
            let i = i as i32;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * s.powi(p + 2 * i) * c.powi(2 * m - 2 * i + 1) * si
        })
        .sum();
    sum.abs()
}

/// Hypersurface integrand written through the holomorphic sectional
/// curvatures `K_i = 4 − 2κ_i²` of the principal directions.
pub fn cp_integrand_sectional(ambient_dim: usize, sectional: &[f64], r: f64) -> f64 {
    let m = sectional.len();
    let s = r.sin();
    let c = r.cos();
    let s2 = s * s;
    let sigma = elementary_symmetric(sectional);
    let sum: f64 = sigma
        .iter()
        .enumerate()
        .map(|(i, &si)| (1.0 - 3.0 * s2).powi((m - i) as i32) * s2.powi(i as i32) / 2f64.powi(i as i32) * si)
        .sum();
    sum.abs() * c * s.powi((2 * ambient_dim - 2 * m - 1) as i32)
}

/// Sphere integrand `|∏_j (cos r − κ̃_j sin r)| · sin^{N_s − n − 1} r` for a
/// submanifold of dimension `n = eigenvalues.len()` in `S^{N_s}`.
pub fn sphere_integrand(eigenvalues: &[f64], sphere_dim: usize, r: f64) -> f64 {
    let (s, c) = r.sin_cos();
    let prod: f64 = eigenvalues.iter().map(|k| c - k * s).product();
    prod.abs() * s.powi(sphere_codim_power(eigenvalues.len(), sphere_dim))
}

fn sphere_codim_power(n: usize, sphere_dim: usize) -> i32 {
    sphere_dim as i32 - n as i32 - 1
}

/// Both sides of the Hopf-lift determinant factorization at radius `r`:
/// the sphere integrand of the lifted spectrum in `S^{2N+1}` and the CP
/// integrand.
pub fn lift_identity_check(ctx: &RadialContext, r: f64) -> (f64, f64) {
    let lhs = sphere_integrand(&ctx.lifted_spectrum(), 2 * ctx.ambient_dim + 1, r);
    (lhs, cp_integrand(ctx, r))
}

/// Signed Jacobian determinant of the normal exponential map at `r u`:
/// `∏(cos²r − κ_i² sin²r) · cos r · sin^{p} r / r^{p}` with `p = 2N − 2m − 1`.
pub fn dexp_det(ctx: &RadialContext, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("dexp_det needs r > 0, got {r}")));
    }
    let (s, c) = r.sin_cos();
    let prod: f64 = ctx.kappas.iter().map(|k| c * c - k * k * s * s).product();
    let p = ctx.sin_power();
    Ok(prod * c * (s / r).powi(p))
}

/// Both sides of the Euclidean-sphere density identity at angle `θ`:
/// `|∏(κ̃_j sin θ − cos θ)| sin^{N_s−n−1} θ` and the sphere integrand.
pub fn euclidean_density_check(eigenvalues: &[f64], sphere_dim: usize, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let prod: f64 = eigenvalues.iter().map(|k| k * s - c).product();
    let lhs = prod.abs() * s.powi(sphere_codim_power(eigenvalues.len(), sphere_dim));
    (lhs, sphere_integrand(eigenvalues, sphere_dim, theta))
}

fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre_rule(GAUSS_LEGENDRE_ORDER))
}

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub(crate) fn gauss_legendre_rule(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule
}

/// Gauss–Legendre integral of `f` over `[a, b]`.
pub fn gauss_legendre_integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gauss_legendre()
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Integral over `[a, b]` split at the given interior breakpoints.
pub fn piecewise_integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64]) -> f64 {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut total = 0.0;
    let mut lo = a;
    for x in pts.into_iter().chain(std::iter::once(b)) {
        if x > lo {
            total += gauss_legendre_integrate(&f, lo, x);
        }
        lo = x;
    }
    total
}

/// `∫_0^{π/2}` of [`cp_integrand`], split at the focal radii `atan(1/κ_i)`.
pub fn radial_quadrature(ctx: &RadialContext) -> f64 {
    let breaks: Vec<f64> = ctx
        .kappas
        .iter()
        .filter(|&&k| k > 0.0)
        .map(|&k| (1.0 / k).atan())
        .collect();
    piecewise_integrate(|r| cp_integrand(ctx, r), 0.0, FRAC_PI_2, &breaks)
}

/// `∫_0^π` of [`sphere_integrand`], split where `cot r = κ̃_j`.
pub fn sphere_radial_quadrature(eigenvalues: &[f64], sphere_dim: usize) -> f64 {
    let breaks: Vec<f64> = eigenvalues.iter().map(|&k| 1f64.atan2(k)).collect();
    piecewise_integrate(|r| sphere_integrand(eigenvalues, sphere_dim, r), 0.0, PI, &breaks)
}

/// Radial profile of a plane curve point with Gaussian curvature `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveProfile {
    /// `(1/8)((K−4)² + 4)/(6 − K)`.
    pub value: f64,
    /// Radius `arcsin √(2/(6−K))` where the integrand changes sign.
    pub alpha: f64,
}

pub fn curve_pointwise_closed_form(curvature: f64) -> Result<CurveProfile> {
    if !(curvature <= 4.0) {
        return Err(Error::Domain(format!(
            "Gaussian curvature {curvature} exceeds the ambient bound 4"
        )));
    }
    let k = curvature;
    Ok(CurveProfile {
        value: ((k - 4.0).powi(2) + 4.0) / (6.0 - k) / 8.0,
        alpha: (2.0 / (6.0 - k)).sqrt().min(1.0).asin(),
    })
}

/// `κ` with `K = 4 − 2κ²`.
pub fn kappa_from_curvature(curvature: f64) -> Result<f64> {
    if !(curvature <= 4.0) {
        return Err(Error::Domain(format!(
            "Gaussian curvature {curvature} exceeds the ambient bound 4"
        )));
    }
    Ok(((4.0 - curvature) / 2.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    /// Adaptive Simpson oracle, independent of the Gauss–Legendre path.
    fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn step<F: Fn(f64) -> f64>(
            f: &F,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            let diff = left + right - whole;
            if depth == 0 || diff.abs() <= 15.0 * tol {
                return left + right + diff / 15.0;
            }
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let fa = f(a);
        let fb = f(b);
        let fm = f(0.5 * (a + b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        step(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let v = gauss_legendre_integrate(|x| x.powi(10), -1.0, 1.0);
        assert!((v - 2.0 / 11.0).abs() < 1e-15);
        let total: f64 = gauss_legendre().iter().map(|p| p.1).sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn flat_curve_integrand() {
        let ctx = RadialContext::plane_curve(0.0).unwrap();
        let r: f64 = 0.37;
        assert!(rel(cp_integrand(&ctx, r), r.cos().powi(3) * r.sin()) < 1e-15);
        assert!((radial_quadrature(&ctx) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn endpoint_zeros_and_kink() {
        let ctx = RadialContext::new(3, 2, vec![0.4, 1.7]).unwrap();
        assert_eq!(cp_integrand(&ctx, 0.0), 0.0);
        assert!(cp_integrand(&ctx, FRAC_PI_2) < 1e-15);
        let curve = RadialContext::plane_curve(1.0).unwrap();
        assert!(cp_integrand(&curve, FRAC_PI_4) < 1e-15);
    }

    #[test]
    fn context_validation() {
        assert!(RadialContext::new(2, 2, vec![0.0, 0.0]).is_err());
        assert!(RadialContext::new(2, 1, vec![-1.0]).is_err());
        assert!(RadialContext::new(3, 1, vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn symmetric_functions() {
        assert_eq!(elementary_symmetric(&[1.0, 4.0]), vec![1.0, 5.0, 4.0]);
        assert_eq!(elementary_symmetric(&[]), vec![1.0]);
    }

    #[test]
    fn symmetric_form_zero_kappas() {
        let ctx = RadialContext::new(4, 2, vec![0.0, 0.0]).unwrap();
        let r: f64 = 0.9;
        let expect = r.sin().powi(3) * r.cos().powi(5);
        assert!(rel(cp_integrand_symmetric(&ctx, r), expect) < 1e-14);
    }

    #[test]
    fn symmetric_form_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let k: f64 = rng.random_range(0.0..5.0);
            let r: f64 = rng.random_range(0.0..FRAC_PI_2);
            let ctx = RadialContext::plane_curve(k).unwrap();
            let a = cp_integrand(&ctx, r);
            let b = cp_integrand_symmetric(&ctx, r);
            assert!((a - b).abs() <= 1e-12 * (1.0 + k * k), "{a} {b}");
        }
        let ctx = RadialContext::new(3, 2, vec![1.0, 2.0]).unwrap();
        for _ in 0..1000 {
            let r: f64 = rng.random_range(0.0..FRAC_PI_2);
            let a = cp_integrand(&ctx, r);
            let b = cp_integrand_symmetric(&ctx, r);
            assert!((a - b).abs() <= 1e-12 * 10.0);
        }
    }

    #[test]
    fn sectional_form_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let kappas = vec![rng.random_range(0.0..3.0), rng.random_range(0.0..3.0)];
            let ks: Vec<f64> = kappas.iter().map(|k| 4.0 - 2.0 * k * k).collect();
            let ctx = RadialContext::new(3, 2, kappas).unwrap();
            let r: f64 = rng.random_range(0.0..FRAC_PI_2);
            let a = cp_integrand(&ctx, r);
            let b = cp_integrand_sectional(3, &ks, r);
            assert!((a - b).abs() < 1e-11 * 100.0);
        }
    }

    #[test]
    fn sphere_integrand_examples() {
        let v = sphere_radial_quadrature(&[0.0, 0.0], 3);
        assert!((v - FRAC_PI_2).abs() < 1e-13);
        assert!(sphere_integrand(&[1.0], 2, FRAC_PI_4) < 1e-15);
    }

    #[test]
    fn lift_identity_examples() {
        let flat = RadialContext::plane_curve(0.0).unwrap();
        let (l, r) = lift_identity_check(&flat, 0.6);
        assert!(rel(l, r) < 1e-15);
        assert!(rel(l, 0.6f64.cos().powi(3) * 0.6f64.sin()) < 1e-14);
        let conic = RadialContext::plane_curve(1.0).unwrap();
        let (l, r) = lift_identity_check(&conic, FRAC_PI_4);
        assert!(l < 1e-15 && r < 1e-15);
    }

    #[test]
    fn dexp_det_examples() {
        let flat = RadialContext::plane_curve(0.0).unwrap();
        let v = dexp_det(&flat, FRAC_PI_4).unwrap();
        assert!((v - 1.0 / PI).abs() < 1e-15);
        let steep = RadialContext::plane_curve(2.0).unwrap();
        let focal = (0.5f64).atan();
        assert!(dexp_det(&steep, focal - 1e-3).unwrap() > 0.0);
        assert!(dexp_det(&steep, focal + 1e-3).unwrap() < 0.0);
        assert!(dexp_det(&flat, 0.0).is_err());
    }

    #[test]
    fn euclidean_identity_examples() {
        let (l, r) = euclidean_density_check(&[0.0], 2, 1.1);
        assert!(rel(l, 1.1f64.cos().abs()) < 1e-15 && rel(l, r) < 1e-15);
        let eigs = [0.5, -2.0, 3.0];
        let (l, r) = euclidean_density_check(&eigs, 6, FRAC_PI_2);
        assert!(rel(l, 3.0) < 1e-14 && rel(r, 3.0) < 1e-14);
    }

    #[test]
    fn closed_form_values() {
        let p = curve_pointwise_closed_form(4.0).unwrap();
        assert!((p.value - 0.25).abs() < 1e-15 && (p.alpha - FRAC_PI_2).abs() < 1e-15);
        let p = curve_pointwise_closed_form(2.0).unwrap();
        assert!((p.value - 0.25).abs() < 1e-15 && (p.alpha - FRAC_PI_4).abs() < 1e-15);
        let p = curve_pointwise_closed_form(-2.0).unwrap();
        assert!((p.value - 0.625).abs() < 1e-15);
        assert!(curve_pointwise_closed_form(4.5).is_err());
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for &k in &[4.0, 2.0, -2.0] {
            let kappa = kappa_from_curvature(k).unwrap();
            let q = radial_quadrature(&RadialContext::plane_curve(kappa).unwrap());
            assert!((q - curve_pointwise_closed_form(k).unwrap().value).abs() < 1e-12);
        }
        // the conic value is exactly 1/4
        let q = radial_quadrature(&RadialContext::plane_curve(1.0).unwrap());
        assert!((q - 0.25).abs() < 1e-14);
    }

    #[test]
    fn quadrature_matches_adaptive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (n, m) = if rng.random_bool(0.5) { (2, 1) } else { (3, 2) };
            let kappas: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..4.0)).collect();
            let ctx = RadialContext::new(n, m, kappas.clone()).unwrap();
            let mut breaks: Vec<f64> = kappas.iter().filter(|&&k| k > 0.0).map(|&k| (1.0 / k).atan()).collect();
            breaks.push(0.0);
            breaks.push(FRAC_PI_2);
            breaks.sort_by(f64::total_cmp);
            let oracle: f64 = breaks
                .windows(2)
                .map(|w| adaptive_simpson(&|r| cp_integrand(&ctx, r), w[0], w[1], 1e-13))
                .sum();
            assert!((radial_quadrature(&ctx) - oracle).abs() < 1e-10);
        }
    }

    #[test]
    fn kink_at_quarter_pi_does_not_degrade() {
        let ctx = RadialContext::new(3, 2, vec![1.0, 1.0]).unwrap();
        // ∫ cos²(2r) cos r sin r dr = 1/6 over [0, π/2]
        assert!((radial_quadrature(&ctx) - 1.0 / 6.0).abs() < 1e-14);
    }
}

//! Univariate complex roots: Aberth–Ehrlich iteration, with companion-matrix
//! eigenvalues as the fallback when it stalls.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative threshold on the leading coefficient, as a fraction of the largest
/// coefficient modulus.
pub const EPS_LEAD: f64 = 1e-10;

pub fn leading_threshold(coeffs: &[Complex64]) -> f64 {
    EPS_LEAD * coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn horner(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

/// All roots (with multiplicity) of `coeffs[0] + coeffs[1] y + ... + coeffs[d] y^d`,
/// sorted by real part then imaginary part.
///
/// Fails with [`Error::DegenerateFiber`] when the leading coefficient is below
/// [`EPS_LEAD`] times the largest coefficient modulus.
pub fn univariate_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    if coeffs.len() < 2 {
        return Err(Error::Input("need at least two coefficients".into()));
    }
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let threshold = leading_threshold(coeffs);
    if lead.norm() <= threshold || lead.norm() == 0.0 {
        return Err(Error::DegenerateFiber {
            lead: lead.norm(),
            threshold,
        });
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let mut roots = if d == 1 {
        vec![-monic[0]]
    } else if d == 2 {
        quadratic(monic[1], monic[0])
    } else {
        match aberth(&monic) {
            Some(r) => r,
            None => companion_eigenvalues(&monic)?,
        }
    };
    for r in roots.iter_mut() {
        let (p, dp) = horner(&monic, *r);
        if dp.norm() > 0.0 {
            let candidate = *r - p / dp;
            if horner(&monic, candidate).0.norm() < p.norm() {
                *r = candidate;
            }
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Roots of `y^2 + b y + c` without cancellation.
fn quadratic(b: Complex64, c: Complex64) -> Vec<Complex64> {
    let disc = (b * b - c * 4.0).sqrt();
    // choose the sign that avoids cancellation
    let q = if (b.conj() * disc).re >= 0.0 {
        -(b + disc) * 0.5
    } else {
        -(b - disc) * 0.5
    };
    if q.norm() == 0.0 {
        return vec![Complex64::new(0.0, 0.0); 2];
    }
    vec![q, c / q]
}

const ABERTH_MAX_ITER: usize = 200;

/// Simultaneous Aberth–Ehrlich iteration on a monic polynomial.
fn aberth(monic: &[Complex64]) -> Option<Vec<Complex64>> {
    let d = monic.len() - 1;
    // start on a circle whose radius bounds the root moduli
    let radius = (0..d)
        .map(|i| monic[i].norm().powf(1.0 / (d - i) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4))
        .collect();
    let mut done = vec![false; d];
    for _ in 0..ABERTH_MAX_ITER {
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (p, dp) = horner(monic, z[i]);
            if p.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                return None;
            }
            z[i] -= step;
            if step.norm() <= 1e-15 * (1.0 + z[i].norm()) {
                done[i] = true;
            }
        }
        if done.iter().all(|&x| x) {
            return Some(z);
        }
    }
    None
}

fn companion_eigenvalues(monic: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = monic.len() - 1;
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..d {
        m[(i, d - 1)] = -monic[i];
    }
    let schur = m
        .try_schur(1e-15, 10_000)
        .ok_or_else(|| Error::SingularPoint("companion eigenvalue iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..d).map(|i| t[(i, i)]).collect())
}

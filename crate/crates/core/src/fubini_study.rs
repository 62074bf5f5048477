//! Fubini–Study geometry of `CP^N`, normalized to holomorphic sectional
//! curvature 4 (so `CP^1` is a round sphere of radius 1/2 and area π).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::sample_rng;

/// Tolerance on the unit-norm invariant of points.
pub const NORM_TOL: f64 = 1e-12;

pub(crate) fn norm_sqr(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

pub(crate) fn hermitian_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// A point of `CP^N` stored as its canonical unit representative: the first
/// coordinate of largest modulus is real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    homogeneous: Vec<Complex64>,
}

impl ProjectivePoint {
    pub fn new(z: &[Complex64]) -> Result<Self> {
        let n2 = norm_sqr(z);
        if z.len() < 2 {
            return Err(Error::Input("projective point needs at least two coordinates".into()));
        }
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::Input(
                "homogeneous coordinates must be finite and not all zero".into(),
            ));
        }
        Ok(Self {
            homogeneous: canonical_representative(z),
        })
    }

    pub fn homogeneous(&self) -> &[Complex64] {
        &self.homogeneous
    }

    /// Complex dimension `N` of the projective space.
    pub fn dim(&self) -> usize {
        self.homogeneous.len() - 1
    }

    /// Fubini–Study distance, in `[0, π/2]`.
    pub fn distance(&self, other: &ProjectivePoint) -> f64 {
        hermitian_dot(&self.homogeneous, &other.homogeneous)
            .norm()
            .min(1.0)
            .acos()
    }

    /// Affine coordinates in the chart `z_chart = 1`.
    pub fn to_chart(&self, chart_index: usize) -> Result<ChartPoint> {
        let pivot = self.homogeneous[chart_index];
        if pivot.norm() == 0.0 {
            return Err(Error::Domain(format!("point lies outside chart {chart_index}")));
        }
        let affine = self
            .homogeneous
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != chart_index)
            .map(|(_, c)| c / pivot)
            .collect();
        Ok(ChartPoint { chart_index, affine })
    }
}

fn canonical_representative(z: &[Complex64]) -> Vec<Complex64> {
    let norm = norm_sqr(z).sqrt();
    let mut pivot = 0;
    let mut best = -1.0;
    for (i, c) in z.iter().enumerate() {
        if c.norm() > best {
            best = c.norm();
            pivot = i;
        }
    }
    let phase = z[pivot].conj() / z[pivot].norm();
    z.iter().map(|c| c * phase / norm).collect()
}

/// A unit vector of `C^{N+1}`, i.e. a point of `S^{2N+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    z: Vec<Complex64>,
}

impl SpherePoint {
    /// Normalizes `z` onto the unit sphere.
    pub fn new(z: &[Complex64]) -> Result<Self> {
        let n = norm_sqr(z).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Input("sphere point needs a finite nonzero vector".into()));
        }
        Ok(Self {
            z: z.iter().map(|c| c / n).collect(),
        })
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.z
    }

    /// Real coordinates `(Re z0, Im z0, Re z1, Im z1, ...)`.
    pub fn to_real(&self) -> Vec<f64> {
        self.z.iter().flat_map(|c| [c.re, c.im]).collect()
    }

    /// The point `e^{iφ} z` on the same Hopf fiber.
    pub fn rotate_phase(&self, phi: f64) -> SpherePoint {
        let u = Complex64::from_polar(1.0, phi);
        SpherePoint {
            z: self.z.iter().map(|c| c * u).collect(),
        }
    }
}

/// Affine coordinates of a point of `CP^N` in the chart `z_chart_index = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub chart_index: usize,
    pub affine: Vec<Complex64>,
}

impl ChartPoint {
    pub fn to_projective(&self) -> ProjectivePoint {
        let mut z = self.affine.clone();
        z.insert(self.chart_index, Complex64::new(1.0, 0.0));
        ProjectivePoint::new(&z).expect("chart points are never zero")
    }
}

pub fn hopf_lift(p: &ProjectivePoint) -> SpherePoint {
    SpherePoint {
        z: p.homogeneous.clone(),
    }
}

pub fn hopf_project(s: &SpherePoint) -> ProjectivePoint {
    ProjectivePoint {
        homogeneous: canonical_representative(&s.z),
    }
}

/// `log(1 + |w|^2)`; its complex Hessian is the Fubini–Study metric.
pub fn fs_kahler_potential(c: &ChartPoint) -> f64 {
    norm_sqr(&c.affine).ln_1p()
}

/// Volume density `(1 + |w|^2)^{-(N+1)}` of `CP^N` with respect to Lebesgue
/// measure in an affine chart.
pub fn fs_density(c: &ChartPoint) -> f64 {
    (1.0 + norm_sqr(&c.affine)).powi(-(c.affine.len() as i32 + 1))
}

/// `Vol(CP^N) = π^N / N!`.
pub fn fs_volume(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("fs_volume needs N >= 1".into()));
    }
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    Ok(PI.powi(n as i32) / fact)
}

/// `Vol(S^k)` for the unit sphere.
pub fn sphere_volume(k: usize) -> f64 {
    // Vol(S^k) = 2 π^{(k+1)/2} / Γ((k+1)/2), evaluated by the two-step recursion
    let (mut v, start) = if k.is_multiple_of(2) { (2.0, 0) } else { (2.0 * PI, 1) };
    let mut j = start;
    while j < k {
        v *= 2.0 * PI / (j as f64 + 1.0);
        j += 2;
    }
    v
}

/// A Fubini–Study sample of `CP^1` in the chart `z0 = 1`, with the chart
/// density for importance-weight division.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedChartPoint {
    pub point: ChartPoint,
    pub density: f64,
}

/// One FS-uniform point of `CP^1`, from a uniform point of the round
/// 2-sphere pushed through stereographic projection.
pub fn cp1_fs_point<R: Rng + ?Sized>(rng: &mut R) -> WeightedChartPoint {
    let zc: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let rho = (1.0 - zc * zc).max(0.0).sqrt();
    let denom = (1.0 - zc).max(f64::MIN_POSITIVE);
    let x = Complex64::new(rho * phi.cos(), rho * phi.sin()) / denom;
    let point = ChartPoint {
        chart_index: 0,
        affine: vec![x],
    };
    let density = fs_density(&point);
    WeightedChartPoint { point, density }
}

/// `count` FS-uniform samples of `CP^1`; sample `i` depends only on `(seed, i)`.
pub fn sample_cp1_fs(count: usize, seed: u64) -> Result<Vec<WeightedChartPoint>> {
    if count == 0 {
        return Err(Error::Input("sample count must be at least 1".into()));
    }
    Ok((0..count)
        .map(|i| cp1_fs_point(&mut sample_rng(seed, i as u64)))
        .collect())
}

/// A uniform point of `S^{2N+1}` (normalized complex Gaussian vector).
pub fn uniform_sphere_point<R: Rng + ?Sized>(rng: &mut R, num_coords: usize) -> Vec<Complex64> {
    loop {
        let z: Vec<Complex64> = (0..num_coords)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let n = norm_sqr(&z).sqrt();
        if n > 1e-300 {
            return z.into_iter().map(|c| c / n).collect();
        }
    }
}

/// An FS-uniform point of `CP^N`: the Hopf image of a uniform sphere point.
pub fn cpn_fs_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ProjectivePoint {
    let z = uniform_sphere_point(rng, n + 1);
    ProjectivePoint::new(&z).expect("unit vector")
}

/// Haar-random unitary matrix (rows), by Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Vec<Complex64>> {
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for r in &rows {
            let proj = hermitian_dot(&v, r);
            for (vi, ri) in v.iter_mut().zip(r) {
                *vi -= proj * ri;
            }
        }
        let nv = norm_sqr(&v).sqrt();
        if nv > 1e-8 {
            rows.push(v.into_iter().map(|c| c / nv).collect());
        }
    }
    rows
}

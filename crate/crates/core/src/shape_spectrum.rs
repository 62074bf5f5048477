//! Second fundamental form of the Hopf lift `F⁻¹(0) ∩ S^{2N+1}` and the
//! holomorphic principal curvatures it carries.
//!
//! Real vectors of `C^{N+1}` use interleaved coordinates
//! `(Re z0, Im z0, Re z1, ...)`, the same layout as [`SpherePoint::to_real`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fubini_study::SpherePoint;
use crate::polynomial::{HomogeneousPolynomial, JetValue, PolynomialJet};

/// Relative tolerance for the fiber and ± pairing checks.
pub const TOL_SPEC: f64 = 1e-7;
/// Points whose constraint gradients are this close to dependent are rejected.
pub const SINGULAR_RATIO: f64 = 1e-8;
const ON_VARIETY_TOL: f64 = 1e-9;
const GRAM_CONDITION_LIMIT: f64 = 1e10;

/// Orthonormal frames of the lift at a point.
#[derive(Debug, Clone)]
pub struct FrameData {
    /// Basis of the tangent space of the lift, `2m + 1` vectors.
    pub tangent_basis: Vec<Vec<f64>>,
    /// Basis of the normal space inside the sphere, `2N − 2m` vectors.
    pub normal_basis: Vec<Vec<f64>>,
    /// The vector `i z`.
    pub fiber_direction: Vec<f64>,
}

/// Spectrum of the lifted shape operator and the curvatures extracted from it.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PrincipalSpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Nonnegative, descending.
    pub kappas: Vec<f64>,
    pub pairing_residual: f64,
    pub fiber_residual: f64,
}

/// Shape-operator machinery for one hypersurface, with derivatives
/// precomputed.
#[derive(Debug, Clone)]
pub struct LiftedHypersurface {
    jet: PolynomialJet,
    gradient_scale: f64,
}

fn to_real(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Twice-orthogonalized residual of `v` against an orthonormal set.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            axpy(-c, b, v);
        }
    }
}

/// Multiplication by `i` in interleaved real coordinates.
fn complex_structure(v: &[f64]) -> Vec<f64> {
    v.chunks_exact(2).flat_map(|p| [-p[1], p[0]]).collect()
}

impl LiftedHypersurface {
    pub fn new(poly: &HomogeneousPolynomial) -> Result<Self> {
        if poly.is_zero() {
            return Err(Error::Input("zero polynomial defines no hypersurface".into()));
        }
        Ok(Self {
            jet: PolynomialJet::new(poly),
            gradient_scale: poly.degree() as f64 * poly.max_coefficient_modulus(),
        })
    }

    pub fn polynomial(&self) -> &HomogeneousPolynomial {
        self.jet.poly()
    }

    /// Complex dimension of the hypersurface.
    pub fn manifold_dim(&self) -> usize {
        self.jet.poly().num_vars() - 2
    }

    fn check_point(&self, z: &SpherePoint) -> Result<JetValue> {
        let n = self.jet.poly().num_vars();
        if z.coords().len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: z.coords().len(),
            });
        }
        let jet = self.jet.evaluate(z.coords());
        if jet.value.norm() > ON_VARIETY_TOL * self.gradient_scale.max(1.0) {
            return Err(Error::Input(format!(
                "point is not on the hypersurface: |F(z)| = {:e}",
                jet.value.norm()
            )));
        }
        Ok(jet)
    }

    /// Real gradients of `(|z|² − 1)/2`, `Re F`, `Im F`.
    fn constraint_gradients(z: &SpherePoint, jet: &JetValue) -> [Vec<f64>; 3] {
        let conj: Vec<Complex64> = jet.gradient.iter().map(|g| g.conj()).collect();
        let re = to_real(&conj);
        let im = complex_structure(&re);
        [z.to_real(), re, im]
    }

    fn check_rank(&self, grads: &[Vec<f64>; 3]) -> Result<()> {
        let dim = grads[0].len();
        let scale = [1.0, self.gradient_scale, self.gradient_scale];
        let m = DMatrix::from_fn(3, dim, |r, c| grads[r][c] / scale[r]);
        let sv = m.singular_values();
        let max = sv.max();
        let min = sv.min();
        if !(min >= SINGULAR_RATIO * max) {
            return Err(Error::SingularPoint(format!(
                "constraint gradients nearly dependent (singular values {min:e} / {max:e})"
            )));
        }
        Ok(())
    }

    pub fn frames_at(&self, z: &SpherePoint) -> Result<FrameData> {
        let jet = self.check_point(z)?;
        let grads = Self::constraint_gradients(z, &jet);
        self.check_rank(&grads)?;
        Ok(Self::build_frames(z, &grads))
    }

    fn build_frames(z: &SpherePoint, grads: &[Vec<f64>; 3]) -> FrameData {
        let dim = grads[0].len();
        let mut spanned: Vec<Vec<f64>> = vec![grads[0].clone()];
        let mut normal_basis = Vec::with_capacity(2);
        for g in &grads[1..] {
            let mut v = g.clone();
            orthogonalize(&mut v, &spanned);
            normalize(&mut v);
            spanned.push(v.clone());
            normal_basis.push(v);
        }
        // complete with the standard basis vector of largest residual each step
        let mut tangent_basis = Vec::with_capacity(dim - 3);
        let mut used = vec![false; dim];
        while tangent_basis.len() < dim - 3 {
            let mut best: Option<(usize, Vec<f64>, f64)> = None;
            for i in (0..dim).filter(|&i| !used[i]) {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                orthogonalize(&mut e, &spanned);
                let n = dot(&e, &e);
                if best.as_ref().is_none_or(|b| n > b.2) {
                    best = Some((i, e, n));
                }
            }
            let (i, mut e, _) = best.expect("a free basis vector remains");
            used[i] = true;
            normalize(&mut e);
            spanned.push(e.clone());
            tangent_basis.push(e);
        }
        FrameData {
            tangent_basis,
            normal_basis,
            fiber_direction: complex_structure(&z.to_real()),
        }
    }

    /// Matrix of `⟨II(t_a, t_b), u⟩` in the frame's tangent basis.
    pub fn second_fundamental_form(&self, z: &SpherePoint, u: &[f64]) -> Result<DMatrix<f64>> {
        let jet = self.check_point(z)?;
        let grads = Self::constraint_gradients(z, &jet);
        self.check_rank(&grads)?;
        let frames = Self::build_frames(z, &grads);
        self.form_in_frame(&jet, &grads, &frames, u)
    }

    fn form_in_frame(
        &self,
        jet: &JetValue,
        grads: &[Vec<f64>; 3],
        frames: &FrameData,
        u: &[f64],
    ) -> Result<DMatrix<f64>> {
        if u.len() != grads[0].len() {
            return Err(Error::DimensionMismatch {
                expected: grads[0].len(),
                actual: u.len(),
            });
        }
        let gram = DMatrix::from_fn(3, 3, |i, j| dot(&grads[i], &grads[j]));
        let rhs = DVector::from_fn(3, |i, _| dot(&grads[i], u));
        let sv = gram.singular_values();
        if !(sv.min() * GRAM_CONDITION_LIMIT >= sv.max()) {
            return Err(Error::SingularPoint(format!(
                "constraint Gram matrix condition number {:e}",
                sv.max() / sv.min()
            )));
        }
        let c = gram
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::SingularPoint("constraint Gram matrix is singular".into()))?;
        // c1 Re q + c2 Im q = Re((c1 − i c2) q)
        let w = Complex64::new(c[1], -c[2]);
        let tangents: Vec<Vec<Complex64>> = frames.tangent_basis.iter().map(|t| to_complex(t)).collect();
        let h = &jet.hessian;
        let ht: Vec<Vec<Complex64>> = tangents
            .iter()
            .map(|t| {
                h.iter()
                    .map(|row| row.iter().zip(t).map(|(a, b)| a * b).sum())
                    .collect()
            })
            .collect();
        let k = tangents.len();
        let mut b = DMatrix::zeros(k, k);
        for a in 0..k {
            for bb in a..k {
                let q: Complex64 = tangents[a].iter().zip(&ht[bb]).map(|(x, y)| x * y).sum();
                let metric = if a == bb { 1.0 } else { 0.0 };
                let v = -((w * q).re + c[0] * metric);
                b[(a, bb)] = v;
                b[(bb, a)] = v;
            }
        }
        Ok(b)
    }

    /// Spectrum at `z` in normal direction `u`, validated for the fiber zero
    /// and the ± pairing.
    pub fn principal_spectrum(&self, z: &SpherePoint, u: &[f64]) -> Result<PrincipalSpectrum> {
        let b = self.second_fundamental_form(z, u)?;
        spectrum_of(&b)
    }

    /// Frames and the spectrum along the first normal vector.
    pub fn spectrum_at(&self, z: &SpherePoint) -> Result<(FrameData, PrincipalSpectrum)> {
        let jet = self.check_point(z)?;
        self.spectrum_with_jet(z, &jet)
    }

    /// As [`spectrum_at`](Self::spectrum_at) with the jet of `F` at `z`
    /// already evaluated.
    pub fn spectrum_with_jet(&self, z: &SpherePoint, jet: &JetValue) -> Result<(FrameData, PrincipalSpectrum)> {
        let jet = jet.clone();
        let grads = Self::constraint_gradients(z, &jet);
        self.check_rank(&grads)?;
        let frames = Self::build_frames(z, &grads);
        let b = self.form_in_frame(&jet, &grads, &frames, &frames.normal_basis[0])?;
        Ok((frames, spectrum_of(&b)?))
    }
}

/// Validated spectral decomposition of a lifted second fundamental form.
pub fn spectrum_of(b: &DMatrix<f64>) -> Result<PrincipalSpectrum> {
    let n = b.nrows();
    if n.is_multiple_of(2) {
        return Err(Error::SpectrumStructure(format!("even matrix size {n}")));
    }
    let mut eigs: Vec<f64> = SymmetricEigen::new(b.clone()).eigenvalues.iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    let radius = eigs.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let tol = TOL_SPEC * radius.max(1.0);
    let fiber = (0..n)
        .min_by(|&i, &j| eigs[i].abs().total_cmp(&eigs[j].abs()))
        .expect("nonempty spectrum");
    let fiber_residual = eigs[fiber].abs();
    let rest: Vec<f64> = eigs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != fiber)
        .map(|(_, &e)| e)
        .collect();
    let m = rest.len() / 2;
    let mut pairing_residual = 0.0f64;
    let mut kappas = Vec::with_capacity(m);
    for i in 0..m {
        let lo = rest[i];
        let hi = rest[rest.len() - 1 - i];
        pairing_residual = pairing_residual.max((lo + hi).abs());
        kappas.push(0.5 * (hi - lo));
    }
    if fiber_residual > tol {
        return Err(Error::SpectrumStructure(format!(
            "no eigenvalue near zero (closest {fiber_residual:e}, tolerance {tol:e})"
        )));
    }
    if pairing_residual > tol {
        return Err(Error::SpectrumStructure(format!(
            "eigenvalues do not pair under negation (residual {pairing_residual:e}, tolerance {tol:e})"
        )));
    }
    kappas.sort_by(|a, b| b.total_cmp(a));
    Ok(PrincipalSpectrum {
        eigenvalues: eigs,
        kappas,
        pairing_residual,
        fiber_residual,
    })
}

pub fn frames_at(poly: &HomogeneousPolynomial, z: &SpherePoint) -> Result<FrameData> {
    LiftedHypersurface::new(poly)?.frames_at(z)
}

pub fn second_fundamental_form(poly: &HomogeneousPolynomial, z: &SpherePoint, u: &[f64]) -> Result<DMatrix<f64>> {
    LiftedHypersurface::new(poly)?.second_fundamental_form(z, u)
}

pub fn principal_spectrum(poly: &HomogeneousPolynomial, z: &SpherePoint, u: &[f64]) -> Result<PrincipalSpectrum> {
    LiftedHypersurface::new(poly)?.principal_spectrum(z, u)
}

/// `cos θ · u + sin θ · J(u)`.
pub fn rotate_normal(u: &[f64], theta: f64, _frames: &FrameData) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    let ju = complex_structure(u);
    u.iter().zip(&ju).map(|(a, b)| c * a + s * b).collect()
}

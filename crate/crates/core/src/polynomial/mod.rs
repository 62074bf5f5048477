//! Homogeneous polynomials over the complex numbers.
//!
//! A [`HomogeneousPolynomial`] is stored as a sparse map from exponent vectors
//! to nonzero complex coefficients. Derivatives are exact and symbolic, so the
//! gradients and Hessians used by the geometry modules carry no differencing
//! error.

mod parse;
mod roots;

pub use parse::parse_polynomial;
pub use roots::{leading_threshold, univariate_roots, EPS_LEAD};

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent vector of a monomial; its length is the number of variables.
pub type Exponents = Vec<u32>;

/// A homogeneous polynomial in `num_vars` complex variables.
///
/// The zero polynomial is a distinguished value (see [`Self::zero`]); every
/// other value has at least one term, no zero coefficients and every exponent
/// vector summing to `degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPolynomial {
    num_vars: usize,
    degree: u32,
    terms: BTreeMap<Exponents, Complex64>,
    is_zero: bool,
}

impl HomogeneousPolynomial {
    /// Builds a polynomial from `(exponents, coefficient)` pairs. Repeated
    /// exponents are summed and zero coefficients dropped.
    pub fn new<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, Complex64)>,
    {
        if num_vars == 0 {
            return Err(Error::Input("polynomial needs at least one variable".into()));
        }
        let mut map: BTreeMap<Exponents, Complex64> = BTreeMap::new();
        for (exps, coeff) in terms {
            if exps.len() != num_vars {
                return Err(Error::DimensionMismatch {
                    expected: num_vars,
                    actual: exps.len(),
                });
            }
            if !(coeff.re.is_finite() && coeff.im.is_finite()) {
                return Err(Error::Input("non-finite coefficient".into()));
            }
            *map.entry(exps).or_insert(Complex64::new(0.0, 0.0)) += coeff;
        }
        map.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        let Some(first) = map.keys().next() else {
            return Err(Error::Input("polynomial has no nonzero terms".into()));
        };
        let degree: u32 = first.iter().sum();
        if map.keys().any(|e| e.iter().sum::<u32>() != degree) {
            return Err(Error::Input("polynomial is not homogeneous".into()));
        }
        if degree == 0 {
            return Err(Error::Input("polynomial must have degree at least 1".into()));
        }
        Ok(Self {
            num_vars,
            degree,
            terms: map,
            is_zero: false,
        })
    }

    /// The zero polynomial in `num_vars` variables.
    pub fn zero(num_vars: usize) -> Self {
        Self {
            num_vars,
            degree: 0,
            terms: BTreeMap::new(),
            is_zero: true,
        }
    }

    /// Fermat polynomial `z0^d + ... + z_{n-1}^d`.
    pub fn fermat(num_vars: usize, degree: u32) -> Result<Self> {
        let terms = (0..num_vars).map(|i| {
            let mut e = vec![0; num_vars];
            e[i] = degree;
            (e, Complex64::new(1.0, 0.0))
        });
        Self::new(num_vars, terms)
    }

    /// The linear form `z_index`.
    pub fn coordinate(num_vars: usize, index: usize) -> Result<Self> {
        if index >= num_vars {
            return Err(Error::Input(format!(
                "variable index {index} out of range for {num_vars} variables"
            )));
        }
        let mut e = vec![0; num_vars];
        e[index] = 1;
        Self::new(num_vars, [(e, Complex64::new(1.0, 0.0))])
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Complex dimension of the ambient projective space.
    pub fn ambient_dim(&self) -> usize {
        self.num_vars - 1
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn max_coefficient_modulus(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficient of `z_index^degree`, zero if absent.
    pub fn pure_power_coefficient(&self, index: usize) -> Complex64 {
        if self.is_zero {
            return Complex64::new(0.0, 0.0);
        }
        let mut e = vec![0; self.num_vars];
        e[index] = self.degree;
        self.terms.get(&e).copied().unwrap_or_default()
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                actual: z.len(),
            });
        }
        Ok(self.eval(z))
    }

    /// Evaluation without the length check; `z` must have `num_vars` entries.
    pub(crate) fn eval(&self, z: &[Complex64]) -> Complex64 {
        let powers = PowerTable::new(z, self.degree);
        self.eval_with(&powers)
    }

    fn eval_with(&self, powers: &PowerTable) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (exps, coeff) in &self.terms {
            let mut m = *coeff;
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    m *= powers.get(i, e);
                }
            }
            acc += m;
        }
        acc
    }

    pub fn partial_derivative(&self, var_index: usize) -> Result<Self> {
        if var_index >= self.num_vars {
            return Err(Error::Input(format!(
                "variable index {var_index} out of range for {} variables",
                self.num_vars
            )));
        }
        if self.is_zero {
            return Ok(Self::zero(self.num_vars));
        }
        let terms: Vec<_> = self
            .terms
            .iter()
            .filter(|(e, _)| e[var_index] > 0)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                let k = e2[var_index];
                e2[var_index] -= 1;
                (e2, c * k as f64)
            })
            .collect();
        if terms.is_empty() {
            return Ok(Self::zero(self.num_vars));
        }
        // Distinct exponents stay distinct after differentiation, so nothing cancels.
        if self.degree == 1 {
            // Nonzero constant; `new` only admits positive degree.
            return Ok(Self {
                num_vars: self.num_vars,
                degree: 0,
                terms: terms.into_iter().collect(),
                is_zero: false,
            });
        }
        Self::new(self.num_vars, terms)
    }

    /// Coefficients (ascending powers of `t`) of the univariate polynomial
    /// obtained by inserting `t` at position `fiber_var` between the entries of
    /// `base`, which lists the remaining coordinates in order.
    pub fn fiber_coefficients(&self, fiber_var: usize, base: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(base.len() + 1, self.num_vars);
        let d = self.degree as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); d + 1];
        let mut full = Vec::with_capacity(self.num_vars);
        full.extend_from_slice(&base[..fiber_var]);
        full.push(Complex64::new(1.0, 0.0));
        full.extend_from_slice(&base[fiber_var..]);
        let powers = PowerTable::new(&full, self.degree);
        for (exps, coeff) in &self.terms {
            let mut m = *coeff;
            for (i, &e) in exps.iter().enumerate() {
                if i != fiber_var && e > 0 {
                    m *= powers.get(i, e);
                }
            }
            coeffs[exps[fiber_var] as usize] += m;
        }
        coeffs
    }

    /// The polynomial `w -> F(U w)` for a square matrix `U` given row-major.
    pub fn substitute_linear(&self, matrix: &[Vec<Complex64>]) -> Result<Self> {
        let n = self.num_vars;
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: matrix.len(),
            });
        }
        if self.is_zero {
            return Ok(self.clone());
        }
        // z_i as a linear form in w.
        let forms: Vec<Sparse> = matrix
            .iter()
            .map(|row| {
                let mut s = Sparse::new();
                for (j, &c) in row.iter().enumerate() {
                    let mut e = vec![0; n];
                    e[j] = 1;
                    s.insert(e, c);
                }
                s
            })
            .collect();
        let mut out = Sparse::new();
        for (exps, coeff) in &self.terms {
            let mut prod = Sparse::new();
            prod.insert(vec![0; n], *coeff);
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    prod = sparse_mul(&prod, &forms[i]);
                }
            }
            for (e, c) in prod {
                *out.entry(e).or_default() += c;
            }
        }
        let scale = out.values().map(|c| c.norm()).fold(0.0, f64::max);
        out.retain(|_, c| c.norm() > 1e-14 * scale);
        Self::new(n, out)
    }

    pub fn to_json(&self) -> PolynomialJson {
        PolynomialJson {
            num_vars: self.num_vars,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(e, c)| TermJson {
                    exponents: e.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn from_json(json: &PolynomialJson) -> Result<Self> {
        let poly = Self::new(
            json.num_vars,
            json.terms
                .iter()
                .map(|t| (t.exponents.clone(), Complex64::new(t.re, t.im))),
        )?;
        if poly.degree != json.degree {
            return Err(Error::Input(format!(
                "declared degree {} does not match terms of degree {}",
                json.degree, poly.degree
            )));
        }
        Ok(poly)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: PolynomialJson =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("polynomial JSON: {e}")))?;
        Self::from_json(&json)
    }
}

impl fmt::Display for HomogeneousPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let is_one = c.re == 1.0 && c.im == 0.0;
            let mut factors = Vec::new();
            if !is_one {
                if c.im == 0.0 {
                    factors.push(format!("{}", c.re));
                } else {
                    factors.push(format!("({}{:+}i)", c.re, c.im));
                }
            }
            for (i, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("z{i}")),
                    _ => factors.push(format!("z{i}^{e}")),
                }
            }
            if factors.is_empty() {
                factors.push("1".into());
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Wire format for polynomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub num_vars: usize,
    pub degree: u32,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exponents: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

pub(crate) type Sparse = BTreeMap<Exponents, Complex64>;

pub(crate) fn sparse_mul(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_default() += ca * cb;
        }
    }
    out
}

/// `powers.get(i, e) == z[i]^e` for `e <= max_degree`.
struct PowerTable {
    stride: usize,
    data: Vec<Complex64>,
}

impl PowerTable {
    fn new(z: &[Complex64], max_degree: u32) -> Self {
        let stride = max_degree as usize + 1;
        let mut data = Vec::with_capacity(z.len() * stride);
        for &zi in z {
            let mut p = Complex64::new(1.0, 0.0);
            data.push(p);
            for _ in 0..max_degree {
                p *= zi;
                data.push(p);
            }
        }
        Self { stride, data }
    }

    #[inline]
    fn get(&self, var: usize, exp: u32) -> Complex64 {
        self.data[var * self.stride + exp as usize]
    }
}

/// Value, gradient and Hessian of a polynomial, precomputed symbolically.
#[derive(Debug, Clone)]
pub struct PolynomialJet {
    poly: HomogeneousPolynomial,
    gradient: Vec<HomogeneousPolynomial>,
    hessian: Vec<Vec<HomogeneousPolynomial>>,
}

/// Evaluated jet at a point.
#[derive(Debug, Clone)]
pub struct JetValue {
    pub value: Complex64,
    pub gradient: Vec<Complex64>,
    /// Symmetric matrix of second complex derivatives.
    pub hessian: Vec<Vec<Complex64>>,
}

impl PolynomialJet {
    pub fn new(poly: &HomogeneousPolynomial) -> Self {
        let n = poly.num_vars();
        let gradient: Vec<_> = (0..n)
            .map(|i| poly.partial_derivative(i).expect("index in range"))
            .collect();
        let hessian = gradient
            .iter()
            .map(|g| {
                (0..n)
                    .map(|j| g.partial_derivative(j).expect("index in range"))
                    .collect()
            })
            .collect();
        Self {
            poly: poly.clone(),
            gradient,
            hessian,
        }
    }

    pub fn poly(&self) -> &HomogeneousPolynomial {
        &self.poly
    }

    pub fn value(&self, z: &[Complex64]) -> Complex64 {
        self.poly.eval(z)
    }

    pub fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        let powers = PowerTable::new(z, self.poly.degree());
        self.gradient.iter().map(|g| g.eval_with(&powers)).collect()
    }

    pub fn evaluate(&self, z: &[Complex64]) -> JetValue {
        let powers = PowerTable::new(z, self.poly.degree());
        JetValue {
            value: self.poly.eval_with(&powers),
            gradient: self.gradient.iter().map(|g| g.eval_with(&powers)).collect(),
            hessian: self
                .hessian
                .iter()
                .map(|row| row.iter().map(|h| h.eval_with(&powers)).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn evaluate_fermat_conic() {
        let f = HomogeneousPolynomial::fermat(3, 2).unwrap();
        assert_eq!(
            f.evaluate(&[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap(),
            c(0.0, 0.0)
        );
        assert_eq!(
            f.evaluate(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap(),
            c(1.0, 0.0)
        );
    }

    #[test]
    fn evaluate_cubic_homogeneity() {
        let f = HomogeneousPolynomial::fermat(3, 3).unwrap();
        let z = [c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert_eq!(f.evaluate(&z).unwrap(), c(8.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let t = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let tz: Vec<_> = z.iter().map(|x| x * t).collect();
            let got = f.evaluate(&tz).unwrap();
            assert!((got - t.powu(3) * 8.0).norm() < 1e-12 * got.norm().max(1.0));
        }
    }

    #[test]
    fn evaluate_rejects_wrong_length() {
        let f = HomogeneousPolynomial::fermat(3, 2).unwrap();
        assert!(matches!(
            f.evaluate(&[c(1.0, 0.0)]),
            Err(Error::DimensionMismatch { expected: 3, actual: 1 })
        ));
    }

    #[test]
    fn construction_invariants() {
        assert!(HomogeneousPolynomial::new(3, Vec::new()).is_err());
        assert!(HomogeneousPolynomial::new(2, [(vec![2, 0], c(1.0, 0.0)), (vec![0, 1], c(1.0, 0.0))]).is_err());
        assert!(HomogeneousPolynomial::new(2, [(vec![1, 0], c(0.0, 0.0))]).is_err());
        let p = HomogeneousPolynomial::new(
            2,
            [
                (vec![1, 1], c(1.0, 0.0)),
                (vec![1, 1], c(-1.0, 0.0)),
                (vec![2, 0], c(2.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn partial_derivative_examples() {
        let f = HomogeneousPolynomial::fermat(3, 2).unwrap();
        let d0 = f.partial_derivative(0).unwrap();
        assert_eq!(d0.degree(), 1);
        assert_eq!(d0.terms().collect::<Vec<_>>(), vec![(&vec![1, 0, 0], &c(2.0, 0.0))]);

        let g = HomogeneousPolynomial::new(3, [(vec![3, 0, 0], c(1.0, 0.0))]).unwrap();
        assert!(g.partial_derivative(1).unwrap().is_zero());
        assert!(g.partial_derivative(3).is_err());
    }

    #[test]
    fn euler_identity_fermat_cubic() {
        let f = HomogeneousPolynomial::fermat(3, 3).unwrap();
        let z = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        let s: Complex64 = (0..3)
            .map(|i| z[i] * f.partial_derivative(i).unwrap().evaluate(&z).unwrap())
            .sum();
        assert_eq!(s, c(108.0, 0.0));
    }

    #[test]
    fn linear_derivative_is_constant() {
        let f = HomogeneousPolynomial::coordinate(3, 1).unwrap();
        let d = f.partial_derivative(1).unwrap();
        assert_eq!(
            d.evaluate(&[c(5.0, 1.0), c(2.0, 0.0), c(0.0, 3.0)]).unwrap(),
            c(1.0, 0.0)
        );
        assert!(f.partial_derivative(0).unwrap().is_zero());
    }

    #[test]
    fn fiber_coefficients_match_evaluation() {
        let f = parse_polynomial("z0^3 + (2-1i)*z0*z1*z2 + z2^3 - 3*z1^2*z2", None).unwrap();
        let base = [c(0.3, -0.2), c(-0.7, 0.4)];
        for k in 0..3 {
            let coeffs = f.fiber_coefficients(k, &base);
            let t = c(0.9, 1.1);
            let mut full = base.to_vec();
            full.insert(k, t);
            let direct = f.evaluate(&full).unwrap();
            let horner = coeffs.iter().rev().fold(c(0.0, 0.0), |acc, &a| acc * t + a);
            assert!((direct - horner).norm() < 1e-12);
        }
    }

    #[test]
    fn linear_substitution_agrees_with_composition() {
        let f = parse_polynomial("z0^2*z1 + (1+2i)*z2^3 - z0*z1*z2", None).unwrap();
        let u = vec![
            vec![c(0.1, 0.2), c(0.5, 0.0), c(-0.3, 0.4)],
            vec![c(0.0, 1.0), c(0.2, -0.2), c(0.7, 0.1)],
            vec![c(-0.6, 0.0), c(0.3, 0.3), c(0.2, 0.9)],
        ];
        let g = f.substitute_linear(&u).unwrap();
        let w = [c(0.4, -0.1), c(1.2, 0.3), c(-0.5, 0.8)];
        let z: Vec<Complex64> = u
            .iter()
            .map(|row| row.iter().zip(&w).map(|(a, b)| a * b).sum())
            .collect();
        let lhs = g.evaluate(&w).unwrap();
        let rhs = f.evaluate(&z).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn json_round_trip_and_layout() {
        let f = HomogeneousPolynomial::fermat(3, 2).unwrap();
        let text = serde_json::to_string(&f.to_json()).unwrap();
        assert_eq!(
            text,
            r#"{"num_vars":3,"degree":2,"terms":[{"exponents":[2,0,0],"re":1.0,"im":0.0},{"exponents":[0,2,0],"re":1.0,"im":0.0},{"exponents":[0,0,2],"re":1.0,"im":0.0}]}"#
        );
        assert_eq!(HomogeneousPolynomial::from_json_str(&text).unwrap(), f);
        assert!(HomogeneousPolynomial::from_json_str(
            r#"{"num_vars":3,"degree":3,"terms":[{"exponents":[2,0,0],"re":1.0,"im":0.0}]}"#
        )
        .is_err());
        assert!(HomogeneousPolynomial::from_json_str("{not json").is_err());
    }

    #[test]
    fn jet_matches_symbolic_derivatives() {
        let f = parse_polynomial("z0^4 + z1^4 + z2^4 + (0.5+0.5i)*z0^2*z1*z2", None).unwrap();
        let jet = PolynomialJet::new(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z = random_point(&mut rng, 3);
        let v = jet.evaluate(&z);
        for i in 0..3 {
            let gi = f.partial_derivative(i).unwrap();
            assert!((v.gradient[i] - gi.evaluate(&z).unwrap()).norm() < 1e-12);
            for j in 0..3 {
                let hij = gi.partial_derivative(j).unwrap().evaluate(&z).unwrap();
                assert!((v.hessian[i][j] - hij).norm() < 1e-12);
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_complex() -> impl Strategy<Value = Complex64> {
            (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| Complex64::new(a, b))
        }

        fn arb_poly() -> impl Strategy<Value = HomogeneousPolynomial> {
            (1u32..6).prop_flat_map(|d| {
                proptest::collection::vec((0u32..=d, 0u32..=d, arb_complex()), 1..8).prop_filter_map(
                    "needs a nonzero homogeneous term",
                    move |raw| {
                        let terms = raw
                            .into_iter()
                            .filter(|(a, b, _)| a + b <= d)
                            .map(|(a, b, c)| (vec![a, b, d - a - b], c));
                        HomogeneousPolynomial::new(3, terms).ok()
                    },
                )
            })
        }

        proptest! {
            #[test]
            fn homogeneity(f in arb_poly(), z in proptest::collection::vec(arb_complex(), 3), t in arb_complex()) {
                let tz: Vec<_> = z.iter().map(|x| x * t).collect();
                let lhs = f.evaluate(&tz).unwrap();
                let rhs = t.powu(f.degree()) * f.evaluate(&z).unwrap();
                let scale: f64 = f.terms().map(|(_, c)| c.norm()).sum::<f64>()
                    * (t.norm() * z.iter().map(|x| x.norm()).fold(0.0, f64::max)).powi(f.degree() as i32);
                prop_assert!((lhs - rhs).norm() <= 1e-12 * scale.max(1e-300));
            }

            #[test]
            fn euler_identity(f in arb_poly(), z in proptest::collection::vec(arb_complex(), 3)) {
                let lhs: Complex64 = (0..3)
                    .map(|i| z[i] * f.partial_derivative(i).unwrap().evaluate(&z).unwrap())
                    .sum();
                let rhs = f.evaluate(&z).unwrap() * f.degree() as f64;
                let scale: f64 = f.terms().map(|(_, c)| c.norm()).sum::<f64>()
                    * z.iter().map(|x| x.norm()).fold(0.0, f64::max).powi(f.degree() as i32)
                    * f.degree() as f64;
                prop_assert!((lhs - rhs).norm() <= 1e-12 * scale.max(1e-300));
            }
        }
    }
}

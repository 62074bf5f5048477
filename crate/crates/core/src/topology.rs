//! Exact topology of smooth hypersurfaces and the inequalities tying Betti
//! numbers to total absolute curvature.

use serde::Serialize;

use crate::error::{Error, Result};

/// Real Betti numbers `β_0, ..., β_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiVector {
    pub dims: Vec<u64>,
}

impl BettiVector {
    /// Betti numbers of a closed connected orientable manifold: `β_0 = 1`
    /// and Poincaré duality.
    pub fn new(dims: Vec<u64>) -> Result<Self> {
        if dims.first() != Some(&1) {
            return Err(Error::InvalidBetti(format!("β_0 must be 1, got {dims:?}")));
        }
        let n = dims.len() - 1;
        if (0..=n).any(|k| dims[k] != dims[n - k]) {
            return Err(Error::InvalidBetti(format!("{dims:?} violates Poincaré duality")));
        }
        Ok(Self { dims })
    }

    /// Betti numbers of a compact Kähler manifold of complex dimension `m`:
    /// additionally `2m + 1` entries with every even one nonzero.
    pub fn kahler(dims: Vec<u64>) -> Result<Self> {
        let b = Self::new(dims)?;
        if b.dims.len() % 2 == 0 {
            return Err(Error::InvalidBetti(format!(
                "{:?} has odd real dimension, not a complex manifold",
                b.dims
            )));
        }
        if b.dims.iter().step_by(2).any(|&x| x == 0) {
            return Err(Error::InvalidBetti(format!(
                "{:?} has a zero even Betti number",
                b.dims
            )));
        }
        Ok(b)
    }

    pub fn real_dim(&self) -> usize {
        self.dims.len() - 1
    }

    /// Complex dimension, for even real dimension.
    pub fn complex_dim(&self) -> Option<usize> {
        self.real_dim().is_multiple_of(2).then_some(self.real_dim() / 2)
    }

    pub fn total(&self) -> u64 {
        self.dims.iter().sum()
    }

    fn get(&self, k: isize) -> u64 {
        if k < 0 {
            0
        } else {
            self.dims.get(k as usize).copied().unwrap_or(0)
        }
    }

    /// `β_{m−1} + 2β_m + β_{m+1}`.
    pub fn middle_sum(&self) -> Result<u64> {
        let m = self.require_complex()? as isize;
        Ok(self.get(m - 1) + 2 * self.get(m) + self.get(m + 1))
    }

    fn require_complex(&self) -> Result<usize> {
        self.complex_dim().ok_or_else(|| {
            Error::InvalidBetti(format!("{:?} is not the Betti vector of a complex manifold", self.dims))
        })
    }
}

/// Euler characteristic of a smooth degree-`d` hypersurface in `CP^{m+1}`,
/// `((1−d)^{m+2} − 1)/d + m + 2`.
pub fn hypersurface_euler_characteristic(d: u32, m: u32) -> Result<i128> {
    if d == 0 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    let d = d as i128;
    let num = (1 - d).pow(m + 2) - 1;
    Ok(num / d + m as i128 + 2)
}

/// Betti numbers of a smooth degree-`d` hypersurface of complex dimension
/// `m ∈ {1, 2}`.
pub fn hypersurface_betti(d: u32, m: u32) -> Result<BettiVector> {
    if d == 0 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    let dd = d as u64;
    match m {
        1 => {
            let genus = (dd - 1) * (dd.saturating_sub(2)) / 2;
            BettiVector::kahler(vec![1, 2 * genus, 1])
        }
        2 => {
            let chi = dd.pow(3) + 6 * dd - 4 * dd.pow(2);
            BettiVector::kahler(vec![1, 0, chi - 2, 0, 1])
        }
        _ => Err(Error::Unsupported(format!(
            "Betti numbers are implemented for complex dimension 1 and 2, not {m}"
        ))),
    }
}

/// Betti numbers of the circle-bundle lift `M̃ → M` of a compact Kähler
/// manifold of complex dimension `m`.
pub fn gysin_transfer(b: &BettiVector) -> Result<BettiVector> {
    let m = b.require_complex()? as isize;
    let mut lift = Vec::with_capacity(b.dims.len() + 1);
    for k in 0..=(2 * m + 1) {
        let v = if k <= m {
            b.get(k) as i128 - b.get(k - 2) as i128
        } else {
            b.get(k - 1) as i128 - b.get(k + 1) as i128
        };
        if v < 0 {
            return Err(Error::InvalidBetti(format!(
                "{:?} gives a negative Betti number {v} in degree {k} of the lift",
                b.dims
            )));
        }
        lift.push(v as u64);
    }
    let lift = BettiVector::new(lift)?;
    debug_assert_eq!(lift.total(), b.middle_sum()?);
    Ok(lift)
}

/// Outcome of an inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
}

impl BoundCheck {
    fn new(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Self {
            name,
            holds: lhs <= rhs,
            lhs,
            rhs,
            margin: rhs - lhs,
        }
    }
}

/// `β_{m−1} + 2β_m + β_{m+1} ≤ T`.
pub fn check_basicestimate(b: &BettiVector, total: f64) -> Result<BoundCheck> {
    Ok(BoundCheck::new("middle_betti_sum", b.middle_sum()? as f64, total))
}

/// Any even plus any odd Betti number, and any single even Betti number, is
/// at most `T/2`.
pub fn check_detailedestimate(b: &BettiVector, total: f64) -> Result<BoundCheck> {
    b.require_complex()?;
    let max_even = b.dims.iter().step_by(2).copied().max().unwrap_or(0);
    let max_odd = b.dims.iter().skip(1).step_by(2).copied().max().unwrap_or(0);
    let lhs = (max_even + max_odd).max(max_even) as f64;
    Ok(BoundCheck::new("even_plus_odd_betti", lhs, total / 2.0))
}

/// `Σ β_i ≤ ((m + 1)/2) T`.
pub fn check_cpcl_a(b: &BettiVector, total: f64) -> Result<BoundCheck> {
    let m = b.require_complex()?;
    Ok(BoundCheck::new(
        "total_betti",
        b.total() as f64,
        (m as f64 + 1.0) / 2.0 * total,
    ))
}

/// `(2d² − 4d + 4, 2d²)`, the range of total absolute curvature of smooth
/// plane curves of degree `d`.
pub fn degree_interval(d: u32) -> Result<(u64, u64)> {
    if d == 0 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    let d = d as u64;
    Ok((2 * d * d + 4 - 4 * d, 2 * d * d))
}

/// The unique degree whose interval contains `total`.
pub fn classify_degree(total: f64) -> Result<u32> {
    if !(total >= 2.0) || !total.is_finite() {
        return Err(Error::Domain(format!(
            "total absolute curvature is at least 2, got {total}"
        )));
    }
    let mut d = ((total / 2.0).sqrt().ceil() as u32).max(1);
    while d > 1 && (2 * (d - 1) * (d - 1)) as f64 >= total {
        d -= 1;
    }
    while ((2 * d * d) as f64) < total {
        d += 1;
    }
    let (lower, _) = degree_interval(d)?;
    if total >= lower as f64 {
        Ok(d)
    } else {
        let (_, upper) = degree_interval(d - 1)?;
        Err(Error::Gap {
            total,
            degree: d - 1,
            upper: upper as f64,
            next_lower: lower as f64,
        })
    }
}

/// Area-weighted mean Gaussian curvature `2(3 − d)` of a degree-`d` curve.
pub fn average_curvature(d: u32) -> f64 {
    2.0 * (3.0 - d as f64)
}

/// Whether `d ((K_d − 4)² + 4) / (6 − K_d) = 2d² − 4d + 4` holds exactly with
/// `K_d = 2(3 − d)`.
pub fn jensen_identity_holds(d: u32) -> bool {
    let d = d as i128;
    let k = 2 * (3 - d);
    let lhs_num = d * ((k - 4).pow(2) + 4);
    let lhs_den = 6 - k;
    lhs_den != 0 && lhs_num == (2 * d * d - 4 * d + 4) * lhs_den
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn betti_examples() {
        assert_eq!(hypersurface_betti(3, 1).unwrap().dims, vec![1, 2, 1]);
        assert_eq!(hypersurface_betti(1, 2).unwrap().dims, vec![1, 0, 1, 0, 1]);
        assert_eq!(hypersurface_betti(2, 2).unwrap().dims, vec![1, 0, 2, 0, 1]);
        assert_eq!(hypersurface_betti(4, 2).unwrap().dims, vec![1, 0, 22, 0, 1]);
        assert!(hypersurface_betti(2, 3).is_err());
        assert!(hypersurface_betti(0, 1).is_err());
    }

    #[test]
    fn euler_characteristic_agrees_with_genus_and_surface_formula() {
        for d in 1..=30u32 {
            let g = ((d - 1) * (d.saturating_sub(2)) / 2) as i128;
            assert_eq!(hypersurface_euler_characteristic(d, 1).unwrap(), 2 - 2 * g);
            let dd = d as i128;
            assert_eq!(
                hypersurface_euler_characteristic(d, 2).unwrap(),
                dd.pow(3) - 4 * dd * dd + 6 * dd
            );
        }
    }

    #[test]
    fn gysin_examples() {
        let lift = |v: Vec<u64>| gysin_transfer(&BettiVector::kahler(v).unwrap()).unwrap().dims;
        assert_eq!(lift(vec![1, 0, 1]), vec![1, 0, 0, 1]);
        assert_eq!(lift(vec![1, 2, 1]), vec![1, 2, 2, 1]);
        assert_eq!(lift(vec![1, 0, 2, 0, 1]), vec![1, 0, 1, 1, 0, 1]);
        let bad = BettiVector::new(vec![1, 0, 0, 0, 1]).unwrap();
        assert!(matches!(gysin_transfer(&bad), Err(Error::InvalidBetti(_))));
        assert!(BettiVector::new(vec![1, 2, 3]).is_err());
        assert!(BettiVector::kahler(vec![1, 0, 0, 1]).is_err());
    }

    #[test]
    fn inequality_examples() {
        let cubic = hypersurface_betti(3, 1).unwrap();
        let c = check_basicestimate(&cubic, 14.0).unwrap();
        assert!(c.holds && c.lhs == 6.0);
        let line = hypersurface_betti(1, 1).unwrap();
        let c = check_basicestimate(&line, 2.0).unwrap();
        assert!(c.holds && c.margin == 0.0);
        let quadric = hypersurface_betti(2, 2).unwrap();
        assert_eq!(check_basicestimate(&quadric, 4.0).unwrap().lhs, 4.0);

        assert_eq!(check_detailedestimate(&cubic, 14.0).unwrap().lhs, 3.0);
        let conic = hypersurface_betti(2, 1).unwrap();
        let c = check_detailedestimate(&conic, 4.0).unwrap();
        assert!(c.holds && c.lhs == 1.0 && c.rhs == 2.0);
        let fake = BettiVector::kahler(vec![1, 6, 1]).unwrap();
        assert!(!check_detailedestimate(&fake, 10.0).unwrap().holds);

        let c = check_cpcl_a(&line, 2.0).unwrap();
        assert!(c.holds && c.margin == 0.0);
        assert!(check_cpcl_a(&cubic, 4.0).unwrap().holds);
        let c = check_cpcl_a(&quadric, 4.0).unwrap();
        assert!(c.holds && c.lhs == 4.0 && c.rhs == 6.0);
        assert!(!check_cpcl_a(&quadric, 2.5).unwrap().holds);
    }

    #[test]
    fn interval_and_classification_examples() {
        assert_eq!(degree_interval(2).unwrap(), (4, 8));
        assert_eq!(degree_interval(3).unwrap(), (10, 18));
        assert_eq!(classify_degree(4.0).unwrap(), 2);
        assert_eq!(classify_degree(2.0).unwrap(), 1);
        assert_eq!(classify_degree(13.7).unwrap(), 3);
        match classify_degree(51.0) {
            Err(Error::Gap {
                degree,
                upper,
                next_lower,
                ..
            }) => {
                assert_eq!((degree, upper, next_lower), (5, 50.0, 52.0))
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(classify_degree(1.5), Err(Error::Domain(_))));
        assert!(classify_degree(f64::NAN).is_err());
    }

    #[test]
    fn average_curvature_examples() {
        assert_eq!(average_curvature(1), 4.0);
        assert_eq!(average_curvature(2), 2.0);
        assert_eq!(average_curvature(5), -4.0);
    }

    #[test]
    fn exact_identities_up_to_degree_100() {
        for d in 1..=100u32 {
            assert!(jensen_identity_holds(d));
            let (lo, hi) = degree_interval(d).unwrap();
            let (next_lo, _) = degree_interval(d + 1).unwrap();
            assert_eq!(next_lo - hi, 2);
            assert_eq!(classify_degree(lo as f64).unwrap(), d);
            assert_eq!(classify_degree(hi as f64).unwrap(), d);
        }
    }

    proptest! {
        #[test]
        fn betti_vectors_are_valid_and_transfer(d in 1u32..60, m in 1u32..=2) {
            let b = hypersurface_betti(d, m).unwrap();
            let chi: i128 = b.dims.iter().enumerate()
                .map(|(k, &x)| if k % 2 == 0 { x as i128 } else { -(x as i128) })
                .sum();
            prop_assert_eq!(chi, hypersurface_euler_characteristic(d, m).unwrap());
            let lift = gysin_transfer(&b).unwrap();
            prop_assert_eq!(lift.total(), b.middle_sum().unwrap());
            prop_assert_eq!(lift.dims.len(), b.dims.len() + 1);
        }

        #[test]
        fn gysin_sum_identity_for_valid_inputs(m in 1usize..=4, steps in proptest::collection::vec(0u64..20, 4)) {
            // lower half nondecreasing in steps of two, mirrored
            let mut dims = vec![0u64; 2 * m + 1];
            dims[0] = 1;
            for k in 1..=m {
                let prev = if k >= 2 { dims[k - 2] } else { 0 };
                dims[k] = prev + steps[k - 1];
            }
            for k in 0..m {
                dims[2 * m - k] = dims[k];
            }
            let b = BettiVector::kahler(dims).unwrap();
            let lift = gysin_transfer(&b).unwrap();
            prop_assert_eq!(lift.total(), b.middle_sum().unwrap());
        }

        #[test]
        fn classification_is_consistent(t in 2.0f64..5000.0) {
            match classify_degree(t) {
                Ok(d) => {
                    let (lo, hi) = degree_interval(d).unwrap();
                    prop_assert!(lo as f64 <= t && t <= hi as f64);
                }
                Err(Error::Gap { upper, next_lower, .. }) => {
                    prop_assert!(upper < t && t < next_lower);
                }
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}

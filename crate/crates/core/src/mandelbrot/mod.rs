//! Numerical side: superstable centers of `f_c(z) = z² + c`, the real
//! axis ordering, wake angles and parameter rays.

mod centers;
mod limb;
mod rays;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use centers::{
    complex_centers, exact_period_count, real_centers, real_vein_component, verify_real_vein_ordering, CenterConfig,
    CenterSearch, PairCheck, RealCenters, RealVeinReport,
};
pub use limb::{verify_limb_periods, Expectation, LimbConfig, LimbReport, PeriodFinding};
pub use rays::{limb_wake_angles, trace_parameter_ray, RaySchedule, RayTrace, Side, WakeBoundary};

/// Largest period whose critical orbit polynomial (degree `2^{n-1}`) is
/// handled by default.
pub const DEGREE_CAP: u32 = 12;

/// Three-valued verdict of a numerical check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Untested,
    Fail,
}

impl Status {
    /// Worst of the two.
    pub fn and(self, other: Status) -> Status {
        self.max(other)
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Untested => "untested",
            Status::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CenterTags {
    pub real_vein: bool,
    /// `(p, k)` of the limb whose wake contains the center.
    pub limb: Option<(u64, u64)>,
    pub wake_tested: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterRecord {
    pub period: u32,
    pub value: Complex64,
    /// `|Q_n(c)|` at the returned value.
    pub residual_bound: f64,
    pub tags: CenterTags,
}

/// Coefficients (constant term first) of `Q_n(c) = f_c^n(0)`.
pub fn critical_orbit_polynomial(n: u32) -> Result<Vec<BigInt>> {
    if n == 0 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    if n > DEGREE_CAP {
        return Err(Error::Resource(format!(
            "Q_{n} has degree 2^{}; the cap is period {DEGREE_CAP}",
            n - 1
        )));
    }
    let mut q = vec![BigInt::zero(), BigInt::one()];
    for _ in 1..n {
        let mut sq = vec![BigInt::zero(); 2 * q.len() - 1];
        for (i, a) in q.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in q.iter().enumerate() {
                sq[i + j] += a * b;
            }
        }
        sq[1] += 1;
        q = sq;
    }
    Ok(q)
}

/// `(Q_n(c), Q_n'(c))` by the orbit recurrence.
pub fn critical_orbit(c: Complex64, n: u32) -> (Complex64, Complex64) {
    let (mut z, mut dz) = (Complex64::zero(), Complex64::zero());
    for _ in 0..n {
        dz = 2.0 * z * dz + 1.0;
        z = z * z + c;
    }
    (z, dz)
}

/// Newton correction `Q_n(c) / Q_n'(c)`, kept finite for escaping `c` by
/// switching to the asymptotic ratio once the orbit is huge. The flag
/// reports whether that switch happened.
pub(crate) fn newton_ratio(c: Complex64, n: u32) -> (Complex64, bool) {
    let (mut z, mut dz) = (c, Complex64::one());
    for m in 1..n {
        if z.norm() > 1e60 {
            return (z / dz / 2f64.powi((n - m) as i32), true);
        }
        dz = 2.0 * z * dz + 1.0;
        z = z * z + c;
    }
    (z / dz, false)
}

pub(crate) fn divisors(n: u32) -> impl Iterator<Item = u32> {
    (1..=n).filter(move |d| n % d == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_polynomials() {
        assert_eq!(critical_orbit_polynomial(1).unwrap(), ints(&[0, 1]));
        assert_eq!(critical_orbit_polynomial(2).unwrap(), ints(&[0, 1, 1]));
        assert_eq!(critical_orbit_polynomial(3).unwrap(), ints(&[0, 1, 1, 2, 1]));
        assert!(critical_orbit_polynomial(0).is_err());
        assert!(matches!(critical_orbit_polynomial(13), Err(Error::Resource(_))));
    }

    #[test]
    fn recurrence_matches_coefficients() {
        let c = Complex64::new(-0.3, 0.45);
        for n in 1..=6 {
            let coeffs = critical_orbit_polynomial(n).unwrap();
            assert_eq!(coeffs.len(), (1 << (n - 1)) + 1);
            let horner = coeffs.iter().rev().fold(Complex64::zero(), |acc, a| {
                acc * c + a.to_string().parse::<f64>().unwrap()
            });
            assert!((horner - critical_orbit(c, n).0).norm() < 1e-12);
        }
    }

    #[test]
    fn escaping_ratio_is_finite() {
        let (r, escaped) = newton_ratio(Complex64::new(3.0, 1.0), 12);
        assert!(escaped && r.re.is_finite() && r.im.is_finite());
    }

    #[test]
    fn status_combines_to_worst() {
        assert_eq!(Status::Pass.and(Status::Untested), Status::Untested);
        assert_eq!(Status::Untested.and(Status::Fail), Status::Fail);
    }
}

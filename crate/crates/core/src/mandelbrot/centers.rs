//! All roots of `Q_n` by Aberth iteration, exact-period filtering, and the
//! real centers `c_n`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{critical_orbit, divisors, newton_ratio, CenterRecord, CenterTags, Status, DEGREE_CAP};
use crate::error::{invalid, Error, Result};
use crate::orderings::{compare2, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterConfig {
    /// Target size of the last Newton step.
    pub precision: f64,
    /// A root is of lower period when some `|Q_d|`, `d` a proper divisor,
    /// falls below this.
    pub separation: f64,
    pub degree_cap: u32,
    pub max_iterations: usize,
}

impl Default for CenterConfig {
    fn default() -> Self {
        CenterConfig { precision: 1e-12, separation: 1e-6, degree_cap: DEGREE_CAP, max_iterations: 4000 }
    }
}

impl CenterConfig {
    pub fn with_precision(precision: f64) -> Self {
        CenterConfig { precision, ..CenterConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterSearch {
    pub period: u32,
    /// Exact-period centers sorted by real then imaginary part.
    pub centers: Vec<CenterRecord>,
    /// Roots too close to a lower-period root to classify either way.
    pub borderline: Vec<CenterRecord>,
    /// Roots belonging to a proper divisor of the period.
    pub lower_period: usize,
    pub unconverged: usize,
    /// Real candidates without a confirming sign change, as brackets.
    pub real_failures: Vec<(f64, f64)>,
}

/// `Σ_{d | n} μ(n/d) 2^{d-1}`: the number of centers of exact period `n`.
pub fn exact_period_count(n: u32) -> u64 {
    divisors(n).map(|d| mobius(n / d) * (1i64 << (d - 1))).sum::<i64>() as u64
}

fn mobius(mut n: u32) -> i64 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        -sign
    } else {
        sign
    }
}

/// Simultaneous Aberth iteration for all `2^{n-1}` roots of `Q_n`.
fn aberth(n: u32, max_iterations: usize) -> (Vec<Complex64>, Vec<bool>) {
    let d = 1usize << (n - 1);
    let mut z: Vec<Complex64> =
        (0..d).map(|i| Complex64::from_polar(2.1, TAU * (i as f64 + 0.25) / d as f64 + 0.4)).collect();
    let mut done = vec![false; d];
    for _ in 0..max_iterations {
        let mut moving = false;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (ratio, escaped) = newton_ratio(z[i], n);
            let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                continue;
            }
            z[i] -= step;
            if !escaped && step.norm() <= 1e-14 * (1.0 + z[i].norm()) {
                done[i] = true;
            } else {
                moving = true;
            }
        }
        if !moving {
            break;
        }
    }
    (z, done)
}

/// Newton polish; returns the value with the smallest residual and the
/// last step size.
fn polish(c0: Complex64, n: u32) -> (Complex64, f64, f64) {
    let mut best = (c0, critical_orbit(c0, n).0.norm());
    let mut c = c0;
    let mut last = f64::INFINITY;
    for _ in 0..30 {
        let (q, dq) = critical_orbit(c, n);
        let step = q / dq;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        c -= step;
        let r = critical_orbit(c, n).0.norm();
        if r < best.1 {
            best = (c, r);
        }
        let size = step.norm();
        if size == 0.0 || size >= last && size < 1e-12 {
            last = last.min(size);
            break;
        }
        last = size;
    }
    (best.0, best.1, last)
}

fn q_real(x: f64, n: u32) -> f64 {
    let mut z = 0.0;
    for _ in 0..n {
        z = z * z + x;
    }
    z
}

/// Real root of `Q_n` near `x0`, with a sign-change bracket of width at
/// most `precision` around it.
fn real_refine(x0: f64, n: u32, precision: f64) -> std::result::Result<(f64, (f64, f64)), (f64, f64)> {
    let mut x = x0;
    for _ in 0..40 {
        let (q, dq) = critical_orbit(Complex64::new(x, 0.0), n);
        let step = q.re / dq.re;
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.abs() <= 1e-16 * (1.0 + x.abs()) {
            break;
        }
    }
    if q_real(x, n) == 0.0 {
        return Ok((x, (x, x)));
    }
    let mut h = (4.0 * f64::EPSILON * (1.0 + x.abs())).max(precision * 1e-3);
    while h <= precision {
        let (lo, hi) = (x - h, x + h);
        if q_real(lo, n).signum() != q_real(hi, n).signum() {
            return Ok((x, (lo, hi)));
        }
        h *= 2.0;
    }
    Err((x - precision, x + precision))
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// All centers of exact period `n`, filtered and deduplicated.
pub fn complex_centers(n: u32, cfg: &CenterConfig) -> Result<CenterSearch> {
    if n == 0 {
        return invalid("period must be at least 1");
    }
    if n > cfg.degree_cap {
        return Err(Error::Resource(format!("period {n} exceeds the degree cap {}", cfg.degree_cap)));
    }
    let mut search = CenterSearch {
        period: n,
        centers: Vec::new(),
        borderline: Vec::new(),
        lower_period: 0,
        unconverged: 0,
        real_failures: Vec::new(),
    };
    let record = |value: Complex64, residual_bound: f64| CenterRecord {
        period: n,
        value,
        residual_bound,
        tags: CenterTags::default(),
    };
    if n == 1 {
        search.centers.push(record(Complex64::new(0.0, 0.0), 0.0));
        return Ok(search);
    }

    let (roots, _) = aberth(n, cfg.max_iterations);
    let proper: Vec<u32> = divisors(n).filter(|&d| d < n).collect();
    let mut found: Vec<CenterRecord> = Vec::new();
    for root in roots {
        let (mut c, mut residual, step) = polish(root, n);
        if step > cfg.precision.max(1e-15) * 1e3 && residual > cfg.precision {
            search.unconverged += 1;
            continue;
        }
        if c.im.abs() < 1e-8 {
            match real_refine(c.re, n, cfg.precision) {
                Ok((x, _)) => {
                    c = Complex64::new(x, 0.0);
                    residual = q_real(x, n).abs();
                }
                Err(bracket) if c.im.abs() < 1e-12 => search.real_failures.push(bracket),
                Err(_) => {}
            }
        }
        let nearest_lower = proper.iter().map(|&d| critical_orbit(c, d).0.norm()).fold(f64::INFINITY, f64::min);
        if nearest_lower > cfg.separation {
            found.push(record(c, residual));
        } else if nearest_lower > 1e3 * residual.max(f64::EPSILON) {
            search.borderline.push(record(c, residual));
        } else {
            search.lower_period += 1;
        }
    }
    found.sort_by(|a, b| cmp_complex(&a.value, &b.value));
    let tolerance = (cfg.precision * 10.0).max(1e-13);
    for rec in found {
        match search.centers.iter_mut().find(|r| (r.value - rec.value).norm() <= tolerance) {
            Some(r) if r.residual_bound > rec.residual_bound => *r = rec,
            Some(_) => {}
            None => search.centers.push(rec),
        }
    }
    search.centers.sort_by(|a, b| cmp_complex(&a.value, &b.value));
    search.real_failures.sort_by(|a, b| a.0.total_cmp(&b.0));
    search.real_failures.dedup_by(|a, b| (a.0 - b.0).abs() <= tolerance);
    Ok(search)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealCenters {
    pub period: u32,
    /// Ascending.
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Brackets of candidates whose refinement failed.
    pub failures: Vec<(f64, f64)>,
}

/// Real centers of exact period `n`, ascending.
pub fn real_centers(n: u32, cfg: &CenterConfig) -> Result<RealCenters> {
    let search = complex_centers(n, cfg)?;
    let (values, residuals) =
        search.centers.iter().filter(|r| r.value.im == 0.0).map(|r| (r.value.re, r.residual_bound)).unzip();
    Ok(RealCenters { period: n, values, residuals, failures: search.real_failures })
}

/// The largest real center of exact period `n`, the one nearest the
/// main cardioid along the real vein.
pub fn real_vein_component(n: u32, cfg: &CenterConfig) -> Result<CenterRecord> {
    let real = real_centers(n, cfg)?;
    let at = real
        .values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Convergence(format!("no real center of period {n} converged")))?;
    Ok(CenterRecord {
        period: n,
        value: Complex64::new(real.values[at], 0.0),
        residual_bound: real.residuals[at],
        tags: CenterTags { real_vein: true, ..CenterTags::default() },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub n: u32,
    pub m: u32,
    pub c_n: Option<f64>,
    pub c_m: Option<f64>,
    /// `compare2(n, m)`.
    pub order: Verdict,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealVeinReport {
    pub max_period: u32,
    pub precision: f64,
    /// `c_n` for `n = 1..=max_period`; `None` where refinement failed.
    pub values: Vec<Option<f64>>,
    pub pairs: Vec<PairCheck>,
    pub status: Status,
}

/// Checks `c_n < c_m  ⟺  n >_2 m` for all `n < m <= max_period`.
pub fn verify_real_vein_ordering(max_period: u32, cfg: &CenterConfig) -> Result<RealVeinReport> {
    if max_period == 0 {
        return invalid("max period must be at least 1");
    }
    let values: Vec<Option<f64>> = (1..=max_period)
        .map(|n| match real_vein_component(n, cfg) {
            Ok(rec) => Ok(Some(rec.value.re)),
            Err(Error::Convergence(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for n in 1..=max_period {
        for m in n + 1..=max_period {
            let (c_n, c_m) = (values[n as usize - 1], values[m as usize - 1]);
            let order = compare2(n as u64, m as u64)?;
            let status = match (c_n, c_m) {
                (Some(a), Some(b)) if a != b => {
                    if (a < b) == (order == Verdict::Greater) {
                        Status::Pass
                    } else {
                        Status::Fail
                    }
                }
                _ => Status::Untested,
            };
            pairs.push(PairCheck { n, m, c_n, c_m, order, status });
        }
    }
    let status = pairs.iter().fold(Status::Pass, |s, p| s.and(p.status));
    Ok(RealVeinReport { max_period, precision: cfg.precision, values, pairs, status })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> CenterConfig {
        CenterConfig::default()
    }

    #[test]
    fn mobius_values() {
        let got: Vec<i64> = (1..=10).map(mobius).collect();
        assert_eq!(got, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    }

    #[test]
    fn exact_counts() {
        let got: Vec<u64> = (1..=10).map(exact_period_count).collect();
        assert_eq!(got, vec![1, 1, 3, 6, 15, 27, 63, 120, 252, 495]);
    }

    #[test]
    fn low_period_centers() {
        let one = complex_centers(1, &cfg()).unwrap();
        assert_eq!(one.centers.len(), 1);
        assert_eq!(one.centers[0].value, Complex64::new(0.0, 0.0));

        let two = complex_centers(2, &cfg()).unwrap();
        assert_eq!(two.centers.len(), 1);
        assert_eq!(two.centers[0].value, Complex64::new(-1.0, 0.0));
        assert_eq!(two.lower_period, 1);

        let three = complex_centers(3, &cfg()).unwrap();
        let v: Vec<Complex64> = three.centers.iter().map(|r| r.value).collect();
        assert_eq!(v.len(), 3);
        assert!((v[0] - Complex64::new(-1.754_877_666_246_693, 0.0)).norm() < 1e-12);
        assert!((v[1] - Complex64::new(-0.122_561_166_876_654, -0.744_861_766_619_744)).norm() < 1e-12);
        assert!((v[2] - v[1].conj()).norm() < 1e-12);
        assert!(three.centers.iter().all(|r| r.residual_bound < 1e-12));
    }

    #[test]
    fn counts_match_divisor_sum() {
        for n in 1..=8 {
            let s = complex_centers(n, &cfg()).unwrap();
            assert_eq!(s.centers.len() as u64, exact_period_count(n), "period {n}");
            assert!(s.borderline.is_empty() && s.unconverged == 0);
            assert!(s.centers.iter().all(|r| r.value.norm() <= 2.0));
        }
    }

    #[test]
    fn real_center_examples() {
        assert_eq!(real_centers(1, &cfg()).unwrap().values, vec![0.0]);
        assert_eq!(real_centers(2, &cfg()).unwrap().values, vec![-1.0]);
        let four = real_centers(4, &cfg()).unwrap().values;
        assert_eq!(four.len(), 2);
        assert!((four[1] + 1.310_702_641_336_832_9).abs() < 1e-10);
        assert!((real_vein_component(4, &cfg()).unwrap().value.re - four[1]).abs() == 0.0);
    }

    #[test]
    fn degree_cap_is_enforced() {
        let tight = CenterConfig { degree_cap: 5, ..cfg() };
        assert!(matches!(complex_centers(6, &tight), Err(Error::Resource(_))));
    }

    #[test]
    fn small_real_vein_reports() {
        assert_eq!(verify_real_vein_ordering(1, &cfg()).unwrap().status, Status::Pass);
        let r = verify_real_vein_ordering(4, &cfg()).unwrap();
        assert_eq!(r.status, Status::Pass);
        let c: Vec<f64> = r.values.iter().map(|v| v.unwrap()).collect();
        assert!(c[2] < c[3] && c[3] < c[1] && c[1] < c[0]);
    }
}

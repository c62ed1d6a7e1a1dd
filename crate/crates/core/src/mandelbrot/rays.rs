//! Wake angles of the `p/k`-limbs, parameter rays, and sidedness of a
//! parameter against a pair of traced rays.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{invalid, Result};

/// The two angles (in turns, denominator `2^k - 1`) of the parameter
/// rays bounding the `p/k`-wake.
///
/// Builds the unique doubling cycle of rotation number `p/k`: its sorted
/// points `x_0 < ... < x_{k-1}` satisfy `2x_i = x_{i+p mod k}`, so the
/// `j`-th binary digit of `x_i` is `1` exactly when `(i + jp) mod k >=
/// k - p`. The wake is bounded by the ends of the shortest gap.
pub fn limb_wake_angles(p: u64, k: u64) -> Result<(Ratio<u64>, Ratio<u64>)> {
    if k < 2 || p == 0 || p >= k || p.gcd(&k) != 1 {
        return invalid(format!("rotation number {p}/{k} must satisfy 1 <= p < k with gcd(p, k) = 1"));
    }
    if k > 62 {
        return invalid(format!("denominator 2^{k} - 1 does not fit the angle type"));
    }
    let den = (1u64 << k) - 1;
    let numerators: Vec<u64> = (0..k)
        .map(|i| (0..k).fold(0u64, |acc, j| (acc << 1) | u64::from((i + j * p) % k >= k - p)))
        .collect();
    let (i, _) = (0..k as usize)
        .map(|i| {
            let next = numerators[(i + 1) % k as usize];
            (i, (next + den - numerators[i]) % den)
        })
        .min_by_key(|&(i, gap)| (gap, i))
        .expect("k >= 2");
    let lo = numerators[i];
    let hi = numerators[(i + 1) % k as usize];
    Ok((Ratio::new(lo, den), Ratio::new(hi, den)))
}

/// `2^m θ mod 1`, exactly.
fn doubled(theta: Ratio<u64>, m: u32) -> Ratio<u64> {
    let den = *theta.denom() as u128;
    let mut num = *theta.numer() as u128 % den;
    let (mut base, mut e) = (2u128 % den, m);
    let mut pow = 1u128 % den;
    while e > 0 {
        if e & 1 == 1 {
            pow = pow * base % den;
        }
        base = base * base % den;
        e >>= 1;
    }
    num = num * pow % den;
    Ratio::new(num as u64, den as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RaySchedule {
    /// Last level `j` of the potential schedule `|Φ| = 1 + 2^{-j}`.
    pub depth: u32,
    /// Newton solves per halving of the potential.
    pub sharpness: u32,
    /// Potential (`log |Φ|`) of the first point.
    pub start_potential: f64,
    /// The target `Φ(c)^{2^m}` is used once its log-modulus exceeds this.
    pub escape_log: f64,
    pub max_newton: u32,
}

impl Default for RaySchedule {
    fn default() -> Self {
        RaySchedule { depth: 40, sharpness: 8, start_potential: 8.0, escape_log: 16.0, max_newton: 64 }
    }
}

impl RaySchedule {
    /// Potentials, strictly decreasing: geometric from the start down to
    /// `log 2`, then through `log(1 + 2^{-j})` for `j = 1..=depth`, with
    /// `sharpness` geometric substeps per halving.
    pub fn potentials(&self) -> Vec<f64> {
        let s = self.sharpness.max(1) as f64;
        let mut anchors = vec![self.start_potential.max(std::f64::consts::LN_2)];
        anchors.extend((0..=self.depth).map(|j| (-(j as f64)).exp2().ln_1p()));
        let mut out = vec![anchors[0]];
        for w in anchors.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b >= a {
                continue;
            }
            let steps = ((a / b).log2() * s).ceil().max(1.0) as u32;
            out.extend((1..=steps).map(|i| a * (b / a).powf(i as f64 / steps as f64)));
        }
        out
    }
}

fn ratio_string<S: Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayTrace {
    #[serde(serialize_with = "ratio_string")]
    pub angle: Ratio<u64>,
    pub points: Vec<Complex64>,
    /// `log |Φ(c)|` at each point, strictly decreasing.
    pub potentials: Vec<f64>,
    /// Last point, when every level converged.
    pub landing_estimate: Option<Complex64>,
    pub diagnostic: Option<String>,
}

impl RayTrace {
    /// Length of the final step of the polyline.
    pub fn final_step(&self) -> Option<f64> {
        let n = self.points.len();
        (n >= 2).then(|| (self.points[n - 1] - self.points[n - 2]).norm())
    }
}

/// Newton solve of `f_c^m(c) = exp(2^m (g + 2πiθ))` from `c0`.
fn solve_level(theta: Ratio<u64>, g: f64, c0: Complex64, sched: &RaySchedule) -> Option<Complex64> {
    let mut m = 0u32;
    while g * 2f64.powi(m as i32) < sched.escape_log {
        m += 1;
    }
    let turns = doubled(theta, m);
    let arg = TAU * (*turns.numer() as f64 / *turns.denom() as f64);
    let target = Complex64::from_polar((g * 2f64.powi(m as i32)).exp(), arg);
    let mut c = c0;
    let mut last = f64::INFINITY;
    for _ in 0..sched.max_newton {
        let (mut z, mut dz) = (c, Complex64::new(1.0, 0.0));
        for _ in 0..m {
            dz = 2.0 * z * dz + 1.0;
            z = z * z + c;
        }
        let step = (z - target) / dz;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        c -= step;
        let size = step.norm();
        if size <= 4.0 * f64::EPSILON * c.norm().max(1e-300) || (size < 1e-12 && size >= last * 0.5) {
            return Some(c);
        }
        last = size;
    }
    (last < 1e-9).then_some(c)
}

/// Step size below which a failed level counts as the end of resolution
/// rather than divergence.
const RESOLVED: f64 = 1e-12;

/// Traces the parameter ray `R^θ` down the potential schedule.
pub fn trace_parameter_ray(theta: Ratio<u64>, sched: &RaySchedule) -> Result<RayTrace> {
    if *theta.denom() == 0 || theta.numer() >= theta.denom() {
        return invalid(format!("ray angle must lie in [0, 1), got {theta}"));
    }
    let arg = TAU * (*theta.numer() as f64 / *theta.denom() as f64);
    let mut trace = RayTrace { angle: theta, points: Vec::new(), potentials: Vec::new(), landing_estimate: None, diagnostic: None };
    let levels = sched.potentials();
    let mut c = Complex64::from_polar(levels[0].exp(), arg);
    for g in levels {
        match solve_level(theta, g, c, sched) {
            Some(next) => {
                c = next;
                trace.points.push(c);
                trace.potentials.push(g);
            }
            None if trace.final_step().is_some_and(|s| s <= RESOLVED * c.norm().max(1.0)) => {
                trace.diagnostic = Some(format!("stopped at potential {g:e}: the ray no longer moves in double precision"));
                break;
            }
            None => {
                trace.diagnostic = Some(format!("Newton diverged at potential {g:e}; trace truncated"));
                return Ok(trace);
            }
        }
    }
    trace.landing_estimate = Some(c);
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Inside,
    Outside,
    /// Too close to a traced ray for the local resolution.
    Untested,
}

/// Region cut off by two traced rays, closed by the segment between
/// their ends and by an arc at the start potential.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WakeBoundary {
    pub lower: RayTrace,
    pub upper: RayTrace,
    #[serde(skip)]
    polygon: Vec<Complex64>,
}

impl WakeBoundary {
    pub fn new(lower: RayTrace, upper: RayTrace) -> Result<WakeBoundary> {
        if lower.landing_estimate.is_none() || upper.landing_estimate.is_none() {
            return invalid("both bounding rays must be traced to full depth");
        }
        let a0 = lower.points[0].arg();
        let mut a1 = upper.points[0].arg();
        while a1 <= a0 {
            a1 += TAU;
        }
        let radius = lower.points[0].norm().max(upper.points[0].norm());
        let arc = 64;
        let mut polygon = lower.points.clone();
        polygon.extend(upper.points.iter().rev().copied());
        polygon.extend((0..=arc).map(|i| Complex64::from_polar(radius, a1 + (a0 - a1) * i as f64 / arc as f64)));
        Ok(WakeBoundary { lower, upper, polygon })
    }

    /// Traces both rays bounding the `p/k`-wake.
    pub fn for_limb(p: u64, k: u64, sched: &RaySchedule) -> Result<WakeBoundary> {
        let (lo, hi) = limb_wake_angles(p, k)?;
        WakeBoundary::new(trace_parameter_ray(lo, sched)?, trace_parameter_ray(hi, sched)?)
    }

    /// Sidedness of `c`, conclusive only when `c` is more than ten local
    /// steps away from each ray.
    pub fn classify(&self, c: Complex64) -> Side {
        for ray in [&self.lower, &self.upper] {
            if !clear_of(&ray.points, c) {
                return Side::Untested;
            }
        }
        if winding_number(&self.polygon, c) != 0 {
            Side::Inside
        } else {
            Side::Outside
        }
    }
}

fn segment_distance(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (c - a).norm();
    }
    let t = (((c - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (a + ab * t - c).norm()
}

/// Whether `c` is farther than ten step lengths from the nearest segment.
fn clear_of(points: &[Complex64], c: Complex64) -> bool {
    points
        .windows(2)
        .map(|w| (segment_distance(w[0], w[1], c), (w[1] - w[0]).norm()))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .is_none_or(|(d, step)| d > 10.0 * step)
}

fn winding_number(polygon: &[Complex64], c: Complex64) -> i32 {
    let mut wn = 0;
    let n = polygon.len();
    for i in 0..n {
        let (a, b) = (polygon[i] - c, polygon[(i + 1) % n] - c);
        let cross = a.re * b.im - a.im * b.re;
        if a.im <= 0.0 {
            if b.im > 0.0 && cross > 0.0 {
                wn += 1;
            }
        } else if b.im <= 0.0 && cross < 0.0 {
            wn -= 1;
        }
    }
    wn
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: u64, b: u64) -> Ratio<u64> {
        Ratio::new(a, b)
    }

    /// Rotation-set search by brute force over all period-`k` angles.
    fn brute_wake(p: u64, k: u64) -> (Ratio<u64>, Ratio<u64>) {
        let den = (1u64 << k) - 1;
        for a in 1..den {
            let mut orbit: Vec<u64> = (0..k).scan(a, |x, _| { let v = *x; *x = 2 * *x % den; Some(v) }).collect();
            if 2 * orbit[k as usize - 1] % den != a || orbit.iter().skip(1).any(|&x| x == a) {
                continue;
            }
            orbit.sort();
            let rotates = (0..k as usize).all(|i| 2 * orbit[i] % den == orbit[(i + p as usize) % k as usize]);
            if rotates {
                let i = (0..k as usize).min_by_key(|&i| (orbit[(i + 1) % k as usize] + den - orbit[i]) % den).unwrap();
                return (r(orbit[i], den), r(orbit[(i + 1) % k as usize], den));
            }
        }
        panic!("no rotation set for {p}/{k}");
    }

    #[test]
    fn wake_angle_examples() {
        assert_eq!(limb_wake_angles(1, 2).unwrap(), (r(1, 3), r(2, 3)));
        assert_eq!(limb_wake_angles(1, 3).unwrap(), (r(1, 7), r(2, 7)));
        assert_eq!(limb_wake_angles(2, 3).unwrap(), (r(5, 7), r(6, 7)));
        assert_eq!(limb_wake_angles(2, 5).unwrap(), (r(9, 31), r(10, 31)));
        assert!(limb_wake_angles(2, 4).is_err());
        assert!(limb_wake_angles(0, 3).is_err());
    }

    #[test]
    fn wake_angles_match_brute_force() {
        for k in 2..=10u64 {
            for p in (1..k).filter(|p| p.gcd(&k) == 1) {
                assert_eq!(limb_wake_angles(p, k).unwrap(), brute_wake(p, k), "{p}/{k}");
            }
        }
    }

    #[test]
    fn angle_doubling_is_exact() {
        assert_eq!(doubled(r(1, 7), 1), r(2, 7));
        assert_eq!(doubled(r(1, 7), 3), r(1, 7));
        assert_eq!(doubled(r(5, 16), 4), r(0, 1));
        assert_eq!(doubled(r(1, 3), 101), r(2, 3));
    }

    #[test]
    fn schedule_is_strictly_decreasing() {
        let g = RaySchedule::default().potentials();
        assert!(g.windows(2).all(|w| w[1] < w[0]));
        assert!((g.last().unwrap() - (2f64).powi(-40).ln_1p()).abs() < 1e-25);
    }

    #[test]
    fn real_axis_rays() {
        let half = trace_parameter_ray(r(1, 2), &RaySchedule::default()).unwrap();
        assert!((half.landing_estimate.unwrap() - Complex64::new(-2.0, 0.0)).norm() < 1e-6);
        let deep = RaySchedule { depth: 120, ..RaySchedule::default() };
        let zero = trace_parameter_ray(r(0, 1), &deep).unwrap();
        assert!((zero.landing_estimate.unwrap() - Complex64::new(0.25, 0.0)).norm() < 1e-3);
        assert!(zero.potentials.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn rejects_bad_angles() {
        assert!(trace_parameter_ray(r(1, 1), &RaySchedule::default()).is_err());
    }

    #[test]
    fn third_wake_contains_period_three_center() {
        let wake = WakeBoundary::for_limb(1, 3, &RaySchedule::default()).unwrap();
        assert_eq!(wake.classify(Complex64::new(-0.122_561_166_876_654, 0.744_861_766_619_744)), Side::Inside);
        assert_eq!(wake.classify(Complex64::new(-1.0, 0.0)), Side::Outside);
        assert_eq!(wake.classify(Complex64::new(-0.122_561_166_876_654, -0.744_861_766_619_744)), Side::Outside);
    }

    #[test]
    fn winding_of_square() {
        let sq = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 1.0), Complex64::new(0.0, 1.0)];
        assert_eq!(winding_number(&sq, Complex64::new(0.5, 0.5)).abs(), 1);
        assert_eq!(winding_number(&sq, Complex64::new(1.5, 0.5)), 0);
    }
}

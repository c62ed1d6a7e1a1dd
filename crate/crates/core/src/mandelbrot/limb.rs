//! Which periods have centers inside a `p/k`-wake.

use serde::Serialize;

use super::centers::{complex_centers, CenterConfig};
use super::rays::{RaySchedule, Side, WakeBoundary};
use super::{CenterRecord, Status};
use crate::error::{Error, Result};
use crate::vein::VeinSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimbConfig {
    pub centers: CenterConfig,
    pub schedule: RaySchedule,
    /// Sharpness values tried in turn while a center stays too close to a
    /// ray to call.
    pub refinements: Vec<u32>,
}

impl Default for LimbConfig {
    fn default() -> Self {
        LimbConfig { centers: CenterConfig::default(), schedule: RaySchedule::default(), refinements: vec![8, 16, 32] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// No center of this period may lie in the wake.
    Absent,
    /// At least one must.
    Present,
    /// Nothing is claimed.
    Open,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodFinding {
    pub period: u32,
    pub expectation: Expectation,
    pub inside: usize,
    pub outside: usize,
    pub untested: usize,
    /// `None` when nothing is claimed for this period.
    pub status: Option<Status>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimbReport {
    pub p: u64,
    pub k: u64,
    pub l: u64,
    pub horizon: u32,
    /// Periods with at least one center inside the wake.
    pub found: Vec<u32>,
    pub periods: Vec<PeriodFinding>,
    /// Centers inside the wake, tagged with the limb.
    pub centers: Vec<CenterRecord>,
    pub status: Status,
}

/// Locates every exact-period center up to `horizon` relative to the traced
/// `p/k`-wake and checks the period profile: nothing of period `1 < n < k`
/// inside, and something of every admissible period `n >= k` of the
/// `(k, l)`-vein.
pub fn verify_limb_periods(p: u64, k: u64, l: u64, horizon: u32, cfg: &LimbConfig) -> Result<LimbReport> {
    let vein = VeinSpec::new(k, l, Some(p))?;
    if horizon > cfg.centers.degree_cap {
        return Err(Error::Resource(format!("horizon {horizon} exceeds the degree cap {}", cfg.centers.degree_cap)));
    }
    let mut wakes: Vec<WakeBoundary> = Vec::new();
    let sharpness = if cfg.refinements.is_empty() { vec![cfg.schedule.sharpness] } else { cfg.refinements.clone() };

    let mut report = LimbReport { p, k, l, horizon, found: Vec::new(), periods: Vec::new(), centers: Vec::new(), status: Status::Pass };
    for n in 1..=horizon {
        let expectation = if n > 1 && (n as u64) < k {
            Expectation::Absent
        } else if n > 1 && vein.is_admissible(n as u64) {
            Expectation::Present
        } else {
            Expectation::Open
        };
        let mut finding = PeriodFinding { period: n, expectation, inside: 0, outside: 0, untested: 0, status: None };
        for mut rec in complex_centers(n, &cfg.centers)?.centers {
            let mut side = Side::Untested;
            for (i, &s) in sharpness.iter().enumerate() {
                if wakes.len() <= i {
                    wakes.push(WakeBoundary::for_limb(p, k, &RaySchedule { sharpness: s, ..cfg.schedule })?);
                }
                side = wakes[i].classify(rec.value);
                if side != Side::Untested {
                    break;
                }
            }
            match side {
                Side::Inside => {
                    finding.inside += 1;
                    rec.tags.wake_tested = true;
                    rec.tags.limb = Some((p, k));
                    report.centers.push(rec);
                }
                Side::Outside => finding.outside += 1,
                Side::Untested => finding.untested += 1,
            }
        }
        finding.status = match expectation {
            Expectation::Absent if finding.inside > 0 => Some(Status::Fail),
            Expectation::Absent if finding.untested > 0 => Some(Status::Untested),
            Expectation::Absent => Some(Status::Pass),
            Expectation::Present if finding.inside > 0 => Some(Status::Pass),
            Expectation::Present if finding.untested > 0 => Some(Status::Untested),
            Expectation::Present => Some(Status::Fail),
            Expectation::Open => None,
        };
        if finding.inside > 0 {
            report.found.push(n);
        }
        if let Some(s) = finding.status {
            report.status = report.status.and(s);
        }
        report.periods.push(finding);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_limb_up_to_six() {
        let r = verify_limb_periods(1, 3, 1, 6, &LimbConfig::default()).unwrap();
        assert_eq!(r.found, vec![3, 4, 5, 6]);
        assert_eq!(r.status, Status::Pass);
        assert!(r.periods.iter().all(|f| f.untested == 0));
        assert!(r.centers.iter().all(|c| c.tags.limb == Some((1, 3)) && c.tags.wake_tested));
    }

    #[test]
    fn half_limb_has_every_period() {
        let r = verify_limb_periods(1, 2, 1, 6, &LimbConfig::default()).unwrap();
        assert_eq!(r.found, vec![2, 3, 4, 5, 6]);
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn short_horizon_is_vacuous() {
        let r = verify_limb_periods(2, 5, 2, 3, &LimbConfig::default()).unwrap();
        assert!(r.found.is_empty());
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(verify_limb_periods(2, 4, 1, 6, &LimbConfig::default()).is_err());
        assert!(matches!(verify_limb_periods(1, 3, 1, 13, &LimbConfig::default()), Err(Error::Resource(_))));
    }
}

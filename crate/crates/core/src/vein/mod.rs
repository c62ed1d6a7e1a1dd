//! Orderings of hyperbolic components along a `(k, l)`-vein, as
//! executable predicates.
//!
//! A `(k, l)`-vein runs from the main cardioid to the `l`-th β-type tip of
//! a `p/k`-limb (`l = 1` is the principal vein). Components of period `n`
//! meet it exactly for `n ∈ {1, k} ∪ {n >= k + l}`, and their order along
//! the vein follows `>_k`, with a side condition when `l >= 2`.

mod surgery;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::orderings::{compare2, KOrder, PeriodSet, Verdict};

pub use surgery::{secondary_transform, surgery_real_to_principal, TransformOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VeinSpec {
    pub k: u64,
    pub l: u64,
    /// Limb numerator; only carried as metadata.
    pub p: Option<u64>,
}

impl VeinSpec {
    pub fn new(k: u64, l: u64, p: Option<u64>) -> Result<VeinSpec> {
        if k < 2 {
            return invalid(format!("limb denominator must be at least 2, got {k}"));
        }
        if l == 0 || l >= k {
            return invalid(format!("vein index must satisfy 1 <= l <= k-1, got l={l}, k={k}"));
        }
        if let Some(p) = p {
            if p == 0 || p >= k || num_integer::gcd(p, k) != 1 {
                return invalid(format!("limb numerator {p} must be in 1..k and coprime to k={k}"));
            }
        }
        Ok(VeinSpec { k, l, p })
    }

    pub fn is_principal(&self) -> bool {
        self.l == 1
    }

    /// Smallest period past the `{1, k}` pair.
    pub fn tip_period(&self) -> u64 {
        self.k + self.l
    }

    pub fn is_admissible(&self, n: u64) -> bool {
        n == 1 || n == self.k || n >= self.tip_period()
    }

    fn order(&self) -> KOrder {
        KOrder::new(self.k).expect("validated arity")
    }
}

/// `{n : k + l <= n <= horizon} ∪ {k, 1}`.
pub fn admissible_set(v: &VeinSpec, horizon: u64) -> Result<PeriodSet> {
    if horizon < v.tip_period() {
        return invalid(format!("horizon {horizon} is below k + l = {}", v.tip_period()));
    }
    PeriodSet::from_elements(horizon, (1..=horizon).filter(|&n| v.is_admissible(n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Forcing {
    /// The first component lies farther from the cardioid.
    First,
    Second,
    Undetermined,
}

/// Order of `C(n1)` and `C(n2)` along the vein, where forcing decides
/// it.
pub fn forced_order(v: &VeinSpec, n1: u64, n2: u64) -> Result<Forcing> {
    for n in [n1, n2] {
        if !v.is_admissible(n) {
            return invalid(format!("period {n} does not occur on the ({}, {})-vein", v.k, v.l));
        }
    }
    let order = v.order();
    let tip = v.tip_period();
    let below_tip = |n: u64| -> Result<bool> { Ok(matches!(order.compare(tip, n)?, Verdict::Greater | Verdict::Equal)) };
    Ok(match order.compare(n1, n2)? {
        Verdict::Greater if v.is_principal() || below_tip(n2)? => Forcing::First,
        Verdict::Less if v.is_principal() || below_tip(n1)? => Forcing::Second,
        _ => Forcing::Undetermined,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub period: u64,
    pub rank: usize,
    pub justification: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainCase {
    /// `k = 2l`
    Half,
    /// `k = 3l`
    Third,
    /// `2k = 3l`
    TwoThirds,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub k: u64,
    pub l: u64,
    pub horizon: u64,
    pub case: ChainCase,
    pub entries: Vec<ChainEntry>,
    pub warnings: Vec<String>,
}

impl ChainReport {
    pub fn periods(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.period).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ChainOutcome {
    Supported(ChainReport),
    Unsupported { k: u64, l: u64, reason: String },
}

pub const JUNCTION_WARNING: &str =
    "junction interpretation: every residue-class entry is placed before the multiples-of-k block";
pub const FORMULA_LITERAL_WARNING: &str = "formula-literal chain: 2l exceeds k, residues instantiated as written";

/// Explicit descending chain of the periods below `C(k + l)`, for the
/// three `(k, l)` relations where it is known.
pub fn explicit_chain(v: &VeinSpec, horizon: u64) -> Result<ChainOutcome> {
    let (k, l) = (v.k, v.l);
    let case = if k == 2 * l {
        ChainCase::Half
    } else if k == 3 * l {
        ChainCase::Third
    } else if 2 * k == 3 * l {
        ChainCase::TwoThirds
    } else {
        return Ok(ChainOutcome::Unsupported {
            k,
            l,
            reason: "explicit chains are known only for k = 2l, k = 3l and 2k = 3l".into(),
        });
    };

    let mut periods: Vec<(u64, String)> = Vec::new();
    let mut j = 1;
    while j * k + l <= horizon {
        periods.push((j * k + l, format!("residue chain: {j}·{k} + {l}")));
        if case != ChainCase::Half {
            for m in [2 * j + 1, 2 * j + 2] {
                let n = m * k + 2 * l;
                if n <= horizon {
                    periods.push((n, format!("triple {j}: {m}·{k} + 2·{l}")));
                }
            }
        }
        j += 1;
    }
    let mut multiples: Vec<u64> = (1..=horizon / k).collect();
    multiples.sort_by(|&a, &b| match compare2(a, b).expect("positive") {
        Verdict::Greater => std::cmp::Ordering::Less,
        Verdict::Less => std::cmp::Ordering::Greater,
        _ => std::cmp::Ordering::Equal,
    });
    for q in multiples {
        periods.push((q * k, format!("multiples block: {k}·{q}, ordered by >_2 of {q}")));
    }
    periods.push((1, "bottom: the cardioid component".into()));

    let entries = periods
        .into_iter()
        .enumerate()
        .map(|(rank, (period, justification))| ChainEntry { period, rank, justification })
        .collect();
    let mut warnings = vec![JUNCTION_WARNING.to_string()];
    if case == ChainCase::TwoThirds {
        warnings.push(FORMULA_LITERAL_WARNING.to_string());
    }
    Ok(ChainOutcome::Supported(ChainReport { k, l, horizon, case, entries, warnings }))
}

/// Pairs `(earlier, later)` of a chain that [`forced_order`] orders the
/// other way round.
pub fn chain_violations(v: &VeinSpec, chain: &ChainReport) -> Result<Vec<(u64, u64)>> {
    let periods = chain.periods();
    let mut bad = Vec::new();
    for (a, &first) in periods.iter().enumerate() {
        for &second in &periods[a + 1..] {
            if forced_order(v, first, second)? == Forcing::Second {
                bad.push((first, second));
            }
        }
    }
    Ok(bad)
}

/// Visible components from `C(k)` in its 1/2-wake: one leaf `C_{V_l}(k+l)`
/// per vein and the root `C_{V_1}(2k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisibleTree {
    pub k: u64,
    pub root: u64,
    pub leaves: Vec<u64>,
}

impl VisibleTree {
    /// All visible periods, `k + 1 ..= 2k`.
    pub fn periods(&self) -> Vec<u64> {
        let mut all = self.leaves.clone();
        all.push(self.root);
        all
    }
}

pub fn visible_component_tree(k: u64) -> Result<VisibleTree> {
    if k < 2 {
        return invalid(format!("k must be at least 2, got {k}"));
    }
    Ok(VisibleTree { k, root: 2 * k, leaves: (1..k).map(|l| k + l).collect() })
}

/// Whether the spiral period sets of `ik + l` and `ik + l2` fail to nest
/// either way up to `horizon`.
pub fn spiral_sets_non_nested(k: u64, i: u64, l: u64, l2: u64, horizon: u64) -> Result<bool> {
    let order = KOrder::new(k)?;
    let a = order.down_set(i * k + l, horizon)?;
    let b = order.down_set(i * k + l2, horizon)?;
    Ok(!a.is_subset(&b) && !b.is_subset(&a))
}

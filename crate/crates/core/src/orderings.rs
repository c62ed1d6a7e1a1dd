//! The Sharkovsky order and its star generalisations.
//!
//! `>_2` is total on the positive integers:
//!
//! ```text
//! 3 > 5 > 7 > ... > 2·3 > 2·5 > ... > 4·3 > 4·5 > ... > 8 > 4 > 2 > 1
//! ```
//!
//! For `k >= 3` the order `>_k` is the partial order generated by three
//! rules:
//!
//! 1. `n > 1` implies `n >_k 1`;
//! 2. `n, m ≡ 0 (mod k)` and `n/k >_2 m/k` imply `n >_k m`;
//! 3. `n > 1`, `n ≢ 0 (mod k)` and `m = i·n + j·k` with `i >= 0, j >= 1`
//!    imply `n >_k m`.
//!
//! Setting `k = 2` recovers `>_2`; the test suite checks that rather than
//! assuming it.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Outcome of comparing two periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Greater,
    Less,
    Equal,
    Incomparable,
}

impl Verdict {
    pub fn reverse(self) -> Verdict {
        match self {
            Verdict::Greater => Verdict::Less,
            Verdict::Less => Verdict::Greater,
            v => v,
        }
    }

    fn from_ordering(ord: Ordering) -> Verdict {
        match ord {
            Ordering::Greater => Verdict::Greater,
            Ordering::Less => Verdict::Less,
            Ordering::Equal => Verdict::Equal,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Greater => "greater",
            Verdict::Less => "less",
            Verdict::Equal => "equal",
            Verdict::Incomparable => "incomparable",
        };
        f.write_str(s)
    }
}

/// A period split as `n = 2^a · b` with `b` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderKey {
    pub n: u64,
    pub a: u32,
    pub b: u64,
}

impl OrderKey {
    pub fn new(n: u64) -> Result<OrderKey> {
        if n == 0 {
            return invalid("periods must be positive");
        }
        let a = n.trailing_zeros();
        Ok(OrderKey { n, a, b: n >> a })
    }

    pub fn is_power_of_two(&self) -> bool {
        self.b == 1
    }

    /// Position in `>_2`, larger means greater.
    fn rank(&self) -> (u8, i64, i64) {
        if self.is_power_of_two() {
            (0, self.a as i64, 0)
        } else {
            (1, -(self.a as i64), -(self.b as i64))
        }
    }
}

impl PartialOrd for OrderKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderKey {
    /// `Greater` means "greater in the Sharkovsky order".
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

/// Sharkovsky comparison of `n` against `m`.
pub fn compare2(n: u64, m: u64) -> Result<Verdict> {
    let (kn, km) = (OrderKey::new(n)?, OrderKey::new(m)?);
    Ok(Verdict::from_ordering(kn.cmp(&km)))
}

/// Which rule establishes `n >_k m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Justification {
    /// `m = 1 < n`.
    BelowOne,
    /// Both multiples of `k`, compared through `>_2` of the quotients.
    Multiples { n_over_k: u64, m_over_k: u64 },
    /// `m = i·n + j·k`.
    Combination { i: u64, j: u64 },
}

impl Justification {
    pub fn describe(&self, k: u64, n: u64, m: u64) -> String {
        match *self {
            Justification::BelowOne => format!("rule 1: {n} > 1"),
            Justification::Multiples { n_over_k, m_over_k } => {
                format!("rule 2: {n}/{k} = {n_over_k} >_2 {m_over_k} = {m}/{k}")
            }
            Justification::Combination { i, j } => {
                format!("rule 3: {m} = {i}·{n} + {j}·{k}")
            }
        }
    }
}

/// The arity-`k` star order. `k = 2` is the interval case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KOrder {
    k: u64,
}

impl KOrder {
    pub fn new(k: u64) -> Result<KOrder> {
        if k < 2 {
            return invalid(format!("order arity must be at least 2, got {k}"));
        }
        Ok(KOrder { k })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Witness that `n >_k m`, if one of the three rules applies.
    pub fn justify(&self, n: u64, m: u64) -> Result<Option<Justification>> {
        if n == 0 || m == 0 {
            return invalid("periods must be positive");
        }
        let k = self.k;
        if n == m {
            return Ok(None);
        }
        if m == 1 {
            return Ok(Some(Justification::BelowOne));
        }
        if n % k == 0 && m % k == 0 {
            if compare2(n / k, m / k)? == Verdict::Greater {
                return Ok(Some(Justification::Multiples {
                    n_over_k: n / k,
                    m_over_k: m / k,
                }));
            }
            return Ok(None);
        }
        if n > 1 && n % k != 0 {
            return Ok(combination_witness(n, k, m).map(|(i, j)| Justification::Combination { i, j }));
        }
        Ok(None)
    }

    pub fn compare(&self, n: u64, m: u64) -> Result<Verdict> {
        if n == 0 || m == 0 {
            return invalid("periods must be positive");
        }
        if n == m {
            return Ok(Verdict::Equal);
        }
        let up = self.justify(n, m)?.is_some();
        let down = self.justify(m, n)?.is_some();
        Ok(match (up, down) {
            (true, false) => Verdict::Greater,
            (false, true) => Verdict::Less,
            (false, false) => Verdict::Incomparable,
            (true, true) => unreachable!("{n} and {m} force each other under >_{}", self.k),
        })
    }

    pub fn greater(&self, n: u64, m: u64) -> Result<bool> {
        Ok(self.compare(n, m)? == Verdict::Greater)
    }

    /// `{m <= horizon : m = n or n >_k m}`.
    pub fn down_set(&self, n: u64, horizon: u64) -> Result<PeriodSet> {
        if n == 0 {
            return invalid("periods must be positive");
        }
        if horizon < n {
            return invalid(format!("horizon {horizon} is below the generator {n}"));
        }
        let mut elements = BTreeSet::new();
        for m in 1..=horizon {
            if m == n || self.justify(n, m)?.is_some() {
                elements.insert(m);
            }
        }
        Ok(PeriodSet { horizon, elements })
    }
}

/// Smallest-`j` solution of `m = i·n + j·k` with `i >= 0`, `j >= 1`.
fn combination_witness(n: u64, k: u64, m: u64) -> Option<(u64, u64)> {
    (1..=m / k).find_map(|j| {
        let rest = m - j * k;
        (rest % n == 0).then_some((rest / n, j))
    })
}

pub fn compare_k(k: u64, n: u64, m: u64) -> Result<Verdict> {
    KOrder::new(k)?.compare(n, m)
}

pub fn down_set_k(k: u64, n: u64, horizon: u64) -> Result<PeriodSet> {
    KOrder::new(k)?.down_set(n, horizon)
}

/// A finite set of periods, materialised up to `horizon`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodSet {
    pub horizon: u64,
    pub elements: BTreeSet<u64>,
}

impl PeriodSet {
    pub fn empty(horizon: u64) -> PeriodSet {
        PeriodSet { horizon, elements: BTreeSet::new() }
    }

    pub fn from_elements<I: IntoIterator<Item = u64>>(horizon: u64, elements: I) -> Result<PeriodSet> {
        let elements: BTreeSet<u64> = elements.into_iter().collect();
        if elements.contains(&0) {
            return invalid("periods must be positive");
        }
        if let Some(&top) = elements.iter().next_back() {
            if top > horizon {
                return invalid(format!("element {top} exceeds horizon {horizon}"));
            }
        }
        Ok(PeriodSet { horizon, elements })
    }

    pub fn contains(&self, n: u64) -> bool {
        self.elements.contains(&n)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_subset(&self, other: &PeriodSet) -> bool {
        self.elements.is_subset(&other.elements)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.elements.iter().copied()
    }
}

impl fmt::Display for PeriodSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.elements.iter().map(u64::to_string).collect();
        write!(f, "{{{}}} (horizon {})", items.join(", "), self.horizon)
    }
}

/// An infinite down-set `{m : m <=_order generator}`, kept symbolic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tail {
    pub order: u64,
    pub generator: u64,
}

impl Tail {
    pub fn materialize(&self, horizon: u64) -> Result<PeriodSet> {
        down_set_k(self.order, self.generator, horizon)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum TailUnion {
    /// The set is the union of these tails, truncated at the horizon.
    Decomposed {
        tails: Vec<Tail>,
        /// Other admissible tails that were not needed; when non-empty the
        /// decomposition is not unique.
        unused_candidates: Vec<Tail>,
    },
    /// Elements whose down-set under every order leaves the set.
    Failed { uncovered: Vec<u64> },
}

/// Decomposes `s` as a union of down-sets of `>_i`, `2 <= i <= k_max`.
///
/// Candidates are tried largest down-set first, then smallest `i`, then
/// smallest generator; redundant picks are dropped afterwards.
pub fn is_tail_union(k_max: u64, s: &PeriodSet) -> Result<TailUnion> {
    if k_max < 2 {
        return invalid(format!("k_max must be at least 2, got {k_max}"));
    }
    let horizon = s.horizon;
    let mut candidates: Vec<(Tail, PeriodSet)> = Vec::new();
    for i in 2..=k_max {
        for g in s.iter() {
            let tail = Tail { order: i, generator: g };
            let set = tail.materialize(horizon)?;
            if set.is_subset(s) {
                candidates.push((tail, set));
            }
        }
    }
    let uncovered: Vec<u64> = s
        .iter()
        .filter(|&g| !candidates.iter().any(|(t, _)| t.generator == g))
        .collect();
    if !uncovered.is_empty() {
        return Ok(TailUnion::Failed { uncovered });
    }

    candidates.sort_by(|(ta, sa), (tb, sb)| {
        sb.len()
            .cmp(&sa.len())
            .then(ta.order.cmp(&tb.order))
            .then(ta.generator.cmp(&tb.generator))
    });
    let mut covered = BTreeSet::new();
    let mut picked: Vec<usize> = Vec::new();
    for (idx, (_, set)) in candidates.iter().enumerate() {
        if !set.elements.is_subset(&covered) {
            covered.extend(set.iter());
            picked.push(idx);
        }
        if covered.len() == s.len() {
            break;
        }
    }
    // Drop picks made redundant by later, smaller ones.
    let mut pos = picked.len();
    while pos > 0 {
        pos -= 1;
        let without: BTreeSet<u64> = picked
            .iter()
            .enumerate()
            .filter(|&(p, _)| p != pos)
            .flat_map(|(_, &idx)| candidates[idx].1.iter())
            .collect();
        if without.len() == s.len() {
            picked.remove(pos);
        }
    }
    let tails = picked.iter().map(|&idx| candidates[idx].0).collect();
    let unused_candidates = candidates
        .iter()
        .enumerate()
        .filter(|(idx, (_, set))| !picked.contains(idx) && set.len() > 1)
        .map(|(_, (t, _))| *t)
        .collect();
    Ok(TailUnion::Decomposed { tails, unused_candidates })
}

/// Difference between the `>_k` down-set of `k + l` and the arithmetic
/// description `{n ∈ g·ℕ : n >= (k/g - 1)(k + l)}`, `g = gcd(k, l)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub k: u64,
    pub l: u64,
    pub horizon: u64,
    pub gcd: u64,
    pub threshold: u64,
    pub only_in_down_set: Vec<u64>,
    pub only_in_closed_form: Vec<u64>,
}

pub fn closed_form_cross_check(k: u64, l: u64, horizon: u64) -> Result<CrossCheck> {
    if k < 2 || l == 0 || l >= k {
        return invalid(format!("need 1 <= l <= k-1 with k >= 2, got k={k}, l={l}"));
    }
    let generator = k + l;
    let down = down_set_k(k, generator, horizon.max(generator))?;
    let gcd = k.gcd(&l);
    let threshold = (k / gcd - 1) * generator;
    let closed: BTreeSet<u64> = (1..=horizon).filter(|n| n % gcd == 0 && *n >= threshold).collect();
    let down: BTreeSet<u64> = down.iter().filter(|&n| n <= horizon).collect();
    Ok(CrossCheck {
        k,
        l,
        horizon,
        gcd,
        threshold,
        only_in_down_set: down.difference(&closed).copied().collect(),
        only_in_closed_form: closed.difference(&down).copied().collect(),
    })
}

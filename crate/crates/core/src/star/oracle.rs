//! Exact piecewise-linear realisation of a star map and a brute-force
//! period finder built on it.
//!
//! Every closed walk `e_0 -> e_1 -> ... -> e_{m-1} -> e_0` in the Markov
//! graph pins down an affine return map on `e_0`. Its fixed point, when it
//! lies in the admissible subinterval, is replayed through the map in exact
//! rational arithmetic; only points of exact period `m` count.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::markov::{search_closed_walks, CycleWitness, PeriodSearch};
use super::{one, rat, rat_string, Rational, StarTreeMap, VertexLabel};
use crate::error::{invalid, Error, Result};
use crate::orderings::PeriodSet;

/// A point of the star: arm number and distance from the hub. The hub
/// itself is always `(0, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactPoint {
    pub arm: usize,
    pub position: Rational,
}

impl ExactPoint {
    pub fn new(arm: usize, position: Rational) -> ExactPoint {
        if position.is_zero() {
            ExactPoint { arm: 0, position }
        } else {
            ExactPoint { arm, position }
        }
    }
}

impl Serialize for ExactPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View {
            arm: usize,
            position: String,
        }
        View { arm: self.arm, position: rat_string(&self.position) }.serialize(s)
    }
}

/// Affine map `t' = slope·t + offset` between edge coordinates (`t = 0` at
/// the inner vertex, `t = 1` at the outer one) along a Markov arc.
#[derive(Debug, Clone)]
pub(crate) struct Transition {
    pub from: usize,
    pub to: usize,
    pub slope: Rational,
    pub offset: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_horizon: u64,
    /// Total DFS node expansions allowed per call.
    pub max_steps: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_horizon: 256, max_steps: 50_000_000 }
    }
}

impl OracleLimits {
    pub(crate) fn check_horizon(&self, horizon: u64) -> Result<()> {
        if horizon > self.max_horizon {
            return Err(Error::Resource(format!(
                "horizon {horizon} exceeds the configured cap {}",
                self.max_horizon
            )));
        }
        Ok(())
    }
}

impl StarTreeMap {
    pub fn vertex_point(&self, v: usize) -> ExactPoint {
        let vertex = &self.vertices[v];
        ExactPoint::new(vertex.arm, vertex.position.clone())
    }

    pub fn point_on_edge(&self, e: usize, t: &Rational) -> ExactPoint {
        let edge = &self.edges[e];
        let inner = &self.vertices[edge.inner].position;
        ExactPoint::new(edge.arm, inner + t * self.edge_length(e))
    }

    pub fn edge_contains(&self, e: usize, x: &ExactPoint) -> bool {
        let edge = &self.edges[e];
        let lo = &self.vertices[edge.inner].position;
        let hi = &self.vertices[edge.outer].position;
        if x.position.is_zero() {
            return lo.is_zero();
        }
        x.arm == edge.arm && lo <= &x.position && &x.position <= hi
    }

    fn point_along(&self, path: &[(usize, bool)], mut s: Rational) -> ExactPoint {
        for (idx, &(e, outward)) in path.iter().enumerate() {
            let len = self.edge_length(e);
            if s <= len || idx + 1 == path.len() {
                let local = if outward { s } else { &len - s };
                return self.point_on_edge(e, &(local / len));
            }
            s -= len;
        }
        unreachable!("image paths are never empty")
    }

    /// The connect-the-dots map.
    pub fn apply(&self, x: &ExactPoint) -> ExactPoint {
        if let Some(v) = self.vertices.iter().position(|v| (v.arm == x.arm || v.position.is_zero()) && v.position == x.position) {
            return self.vertex_point(self.image_of(v));
        }
        let e = (0..self.edges.len())
            .find(|&e| self.edge_contains(e, x))
            .expect("point lies on the tree");
        let edge = &self.edges[e];
        let t = (&x.position - &self.vertices[edge.inner].position) / self.edge_length(e);
        let path = self.path(self.image_of(edge.inner), self.image_of(edge.outer));
        let total: Rational = path.iter().map(|&(pe, _)| self.edge_length(pe)).sum();
        self.point_along(&path, t * total)
    }

    /// Smallest `p <= limit` with `f^p(x) = x`.
    pub fn exact_period(&self, x: &ExactPoint, limit: usize) -> Option<usize> {
        let mut y = x.clone();
        for p in 1..=limit {
            y = self.apply(&y);
            if &y == x {
                return Some(p);
            }
        }
        None
    }

    pub(crate) fn transitions(&self) -> Vec<Transition> {
        let mut out = Vec::new();
        for (from, edge) in self.edges.iter().enumerate() {
            let path = self.path(self.image_of(edge.inner), self.image_of(edge.outer));
            let total: Rational = path.iter().map(|&(pe, _)| self.edge_length(pe)).sum();
            let mut start = Rational::zero();
            for (to, outward) in path {
                let len = self.edge_length(to);
                let ratio = &total / &len;
                let shift = &start / &len;
                let (slope, offset) = if outward { (ratio, -shift) } else { (-ratio, one() + shift) };
                out.push(Transition { from, to, slope, offset });
                start += len;
            }
        }
        out
    }

    /// Exact fixed point `α` when the hub is not fixed (interval case).
    pub fn interior_fixed_point(&self) -> Option<ExactPoint> {
        if self.has_alpha_vertex() {
            return Some(self.vertex_point(0));
        }
        self.transitions().into_iter().filter(|tr| tr.from == tr.to && !tr.slope.is_one()).find_map(|tr| {
            let t = &tr.offset / (one() - &tr.slope);
            (t > Rational::zero() && t < one()).then(|| self.point_on_edge(tr.from, &t))
        })
    }
}

/// Fixed point of the return map along `walk` on edge `walk[0]`, if it
/// lies in the subinterval where every step stays inside its edge.
fn return_fixed_point(table: &HashMap<(usize, usize), (Rational, Rational)>, walk: &[usize]) -> Option<Rational> {
    let m = walk.len();
    let (mut slope, mut offset) = (one(), Rational::zero());
    let (mut lo, mut hi) = (Rational::zero(), one());
    for i in 0..m {
        let (a, b) = &table[&(walk[i], walk[(i + 1) % m])];
        slope = a * &slope;
        offset = a * &offset + b;
        // 0 <= slope·t + offset <= 1
        if slope.is_zero() {
            if offset < Rational::zero() || offset > one() {
                return None;
            }
            continue;
        }
        let p = -&offset / &slope;
        let q = (one() - &offset) / &slope;
        let (l, h) = if p <= q { (p, q) } else { (q, p) };
        if l > lo {
            lo = l;
        }
        if h < hi {
            hi = h;
        }
        if lo > hi {
            return None;
        }
    }
    if slope.is_one() {
        return offset.is_zero().then(|| (&lo + &hi) / rat(2));
    }
    let t = &offset / (one() - &slope);
    (lo <= t && t <= hi).then_some(t)
}

/// Periods of the connect-the-dots realisation of `t`, found by exact
/// orbit replay. Vertex orbits (`α`, the marked cycle) are included
/// directly; every other period needs a certified exact point.
pub fn brute_force_periods(t: &StarTreeMap, horizon: u64) -> Result<PeriodSearch> {
    brute_force_periods_with(t, horizon, &OracleLimits::default())
}

pub fn brute_force_periods_with(t: &StarTreeMap, horizon: u64, limits: &OracleLimits) -> Result<PeriodSearch> {
    if horizon == 0 {
        return invalid("horizon must be positive");
    }
    limits.check_horizon(horizon)?;
    let transitions = t.transitions();
    let mut succ = vec![Vec::new(); t.edges().len()];
    let mut table = HashMap::new();
    for tr in transitions {
        succ[tr.from].push(tr.to);
        table.insert((tr.from, tr.to), (tr.slope, tr.offset));
    }
    for s in succ.iter_mut() {
        s.sort_unstable();
    }

    let mut found: BTreeMap<u64, CycleWitness> = BTreeMap::new();
    if t.hub_label() == VertexLabel::Alpha {
        found.insert(1, CycleWitness { period: 1, itinerary: vec![], edges: vec![], point: Some(t.vertex_point(0)) });
    }
    if (t.period() as u64) <= horizon {
        let p1 = t.point_index(1).expect("p_1 exists");
        let edges: Vec<usize> = (1..=t.period())
            .filter_map(|j| t.point_index(j))
            .filter_map(|v| (0..t.edges().len()).find(|&e| t.edges()[e].outer == v))
            .collect();
        let itinerary = if edges.len() == t.period() { edges.iter().map(|&e| t.edge_name(e)).collect() } else { vec![] };
        let edges = if itinerary.is_empty() { vec![] } else { edges };
        found.insert(
            t.period() as u64,
            CycleWitness { period: t.period() as u64, itinerary, edges, point: Some(t.vertex_point(p1)) },
        );
    }

    let mut budget = limits.max_steps;
    for m in 1..=horizon {
        if found.contains_key(&m) {
            continue;
        }
        let mut witness = None;
        search_closed_walks(&succ, m as usize, &mut budget, |walk| {
            let Some(param) = return_fixed_point(&table, walk) else {
                return false;
            };
            let x = t.point_on_edge(walk[0], &param);
            if t.exact_period(&x, m as usize) != Some(m as usize) {
                return false;
            }
            witness = Some(CycleWitness {
                period: m,
                itinerary: walk.iter().map(|&e| t.edge_name(e)).collect(),
                edges: walk.to_vec(),
                point: Some(x),
            });
            true
        })?;
        if let Some(w) = witness {
            found.insert(m, w);
        }
    }
    Ok(PeriodSearch {
        periods: PeriodSet { horizon, elements: found.keys().copied().collect() },
        witnesses: found.into_values().collect(),
    })
}

/// Replays a witness: the itinerary must be a closed walk of the Markov
/// graph, and the point must follow it with exact period `period`.
pub fn verify_witness(t: &StarTreeMap, w: &CycleWitness) -> bool {
    let g = t.markov_graph();
    if !w.edges.is_empty() && !super::markov::itinerary_is_closed_walk(&g, &w.edges) {
        return false;
    }
    let Some(x) = &w.point else {
        return w.edges.len() as u64 == w.period;
    };
    if t.exact_period(x, w.period as usize) != Some(w.period as usize) {
        return false;
    }
    let mut y = x.clone();
    for &e in &w.edges {
        if !t.edge_contains(e, &y) {
            return false;
        }
        y = t.apply(&y);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star::{make_spiral_cycle, make_stefan_cycle};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn spiral_period_three_orbit() {
        let t = make_spiral_cycle(3, 4).unwrap();
        let found = brute_force_periods(&t, 3).unwrap();
        assert_eq!(found.periods.iter().collect::<Vec<_>>(), vec![1, 3]);
        let w = found.witnesses.iter().find(|w| w.period == 3).unwrap();
        // walks start at their smallest edge: I_2 -> I_3 -> I_4 is I_3 -> I_4 -> I_2 rotated
        assert_eq!(w.itinerary, vec!["I_2", "I_3", "I_4"].into_iter().map(String::from).collect::<Vec<_>>());
        let x = t.apply(&w.point.clone().unwrap());
        assert_eq!(x, ExactPoint::new(3, q(3, 5)));
        let y = t.apply(&x);
        assert_eq!(y, ExactPoint::new(1, q(6, 5)));
        assert_eq!(t.apply(&y), ExactPoint::new(2, q(3, 5)));
        assert!(verify_witness(&t, w));
    }

    #[test]
    fn stefan_fixed_point_lies_between_p0_and_p1() {
        let t = make_stefan_cycle(3).unwrap();
        let found = brute_force_periods(&t, 1).unwrap();
        assert_eq!(found.periods.iter().collect::<Vec<_>>(), vec![1]);
        let x = found.witnesses[0].point.clone().unwrap();
        assert_eq!(x.arm, 1);
        assert!(x.position > Rational::zero() && x.position < one());
        assert_eq!(Some(x), t.interior_fixed_point());
        for n in [5, 7, 9] {
            let t = make_stefan_cycle(n).unwrap();
            let alpha = t.interior_fixed_point().unwrap();
            assert_eq!(alpha.arm, 1, "n={n}");
            assert!(alpha.position < one());
            assert_eq!(t.apply(&alpha), alpha);
        }
    }

    #[test]
    fn degenerate_spiral_is_all_fixed() {
        let t = make_spiral_cycle(3, 1).unwrap();
        let found = brute_force_periods(&t, 9).unwrap();
        assert_eq!(found.periods.iter().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn map_sends_vertices_along_the_cycle() {
        let t = make_spiral_cycle(5, 12).unwrap();
        for j in 1..=12 {
            let x = t.vertex_point(t.point_index(j).unwrap());
            let y = t.vertex_point(t.point_index(j % 12 + 1).unwrap());
            assert_eq!(t.apply(&x), y);
        }
        assert_eq!(t.apply(&t.vertex_point(0)), t.vertex_point(0));
    }

    #[test]
    fn resource_cap() {
        let t = make_spiral_cycle(3, 4).unwrap();
        let tight = OracleLimits { max_horizon: 10, max_steps: 1_000 };
        assert!(matches!(brute_force_periods_with(&t, 11, &tight), Err(Error::Resource(_))));
        let starved = OracleLimits { max_horizon: 100, max_steps: 5 };
        assert!(matches!(brute_force_periods_with(&t, 40, &starved), Err(Error::Resource(_))));
    }
}

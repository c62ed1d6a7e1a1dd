//! k-stars carrying a single marked cycle.
//!
//! A [`StarTreeMap`] is a star-shaped tree: one hub vertex and `k` arms,
//! each arm an ordered list of cycle points at strictly increasing rational
//! distance from the hub. The map sends `p_j ↦ p_{j+1}` (indices mod the
//! period) and is extended linearly over every edge ("connect the dots"),
//! so each edge maps homeomorphically onto the tree path between the images
//! of its endpoints.
//!
//! The hub is either the fixed point `α` (star maps) or a cycle point
//! (intervals carrying a Štefan cycle, whose fixed point lies inside an
//! edge).

mod markov;
mod oracle;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{invalid, Result};

pub use markov::{itinerary_is_closed_walk, periods_from_markov, periods_from_markov_with, CycleWitness, MarkovGraph, PeriodSearch};
pub use oracle::{brute_force_periods, brute_force_periods_with, verify_witness, ExactPoint, OracleLimits};

pub type Rational = BigRational;

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub(crate) fn rat_string(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Vertex names: the fixed hub `α` or a cycle point `p_j`, `1 <= j <= n`
/// (with `p_0 = p_n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexLabel {
    Alpha,
    Point(usize),
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexLabel::Alpha => f.write_str("alpha"),
            VertexLabel::Point(j) => write!(f, "p_{j}"),
        }
    }
}

impl Serialize for VertexLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub label: VertexLabel,
    /// Arm number in `1..=k`; 0 for the hub.
    pub arm: usize,
    /// Distance from the hub in edge-length units.
    pub position: Rational,
}

/// An edge `[inner, outer]` on one arm, named after its outer vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub inner: usize,
    pub outer: usize,
    pub arm: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarTreeMap {
    k: usize,
    period: usize,
    /// Index 0 is the hub.
    vertices: Vec<Vertex>,
    /// Vertex indices per arm, hub excluded, ordered outward.
    arms: Vec<Vec<usize>>,
    /// Edges sorted by the label of their outer vertex.
    edges: Vec<Edge>,
    /// Outer-vertex index to edge index.
    edge_below: Vec<Option<usize>>,
    image: Vec<usize>,
}

impl StarTreeMap {
    /// Builds a star from cycle-point placements.
    ///
    /// `placements[j - 1]` is the `(arm, position)` of `p_j`; a position of
    /// zero puts that point on the hub, in which case no `α` vertex exists.
    /// Otherwise `α` sits on the hub and is fixed.
    pub fn from_placements(k: usize, placements: Vec<(usize, Rational)>) -> Result<StarTreeMap> {
        let n = placements.len();
        if k < 2 {
            return invalid(format!("a star needs at least 2 arms, got {k}"));
        }
        if n == 0 {
            return invalid("the marked cycle is empty");
        }
        let on_hub: Vec<usize> = (0..n).filter(|&i| placements[i].1.is_zero()).collect();
        if on_hub.len() > 1 {
            return invalid("at most one cycle point may sit on the hub");
        }
        let mut vertices = Vec::with_capacity(n + 1);
        let mut index_of_point = vec![0usize; n + 1];
        match on_hub.first() {
            Some(&i) => {
                vertices.push(Vertex { label: VertexLabel::Point(i + 1), arm: 0, position: Rational::zero() });
                index_of_point[i + 1] = 0;
            }
            None => vertices.push(Vertex { label: VertexLabel::Alpha, arm: 0, position: Rational::zero() }),
        }
        let mut arms: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, (arm, pos)) in placements.into_iter().enumerate() {
            if pos.is_zero() {
                continue;
            }
            if pos.is_negative() {
                return invalid(format!("p_{} has negative position", i + 1));
            }
            if arm == 0 || arm > k {
                return invalid(format!("p_{} is on arm {arm}, expected 1..={k}", i + 1));
            }
            index_of_point[i + 1] = vertices.len();
            arms[arm - 1].push(vertices.len());
            vertices.push(Vertex { label: VertexLabel::Point(i + 1), arm, position: pos });
        }
        for arm in arms.iter_mut() {
            arm.sort_by(|&a, &b| vertices[a].position.cmp(&vertices[b].position));
            if arm.windows(2).any(|w| vertices[w[0]].position == vertices[w[1]].position) {
                return invalid("two cycle points share a position");
            }
        }

        let image = vertices
            .iter()
            .map(|v| match v.label {
                VertexLabel::Alpha => 0,
                VertexLabel::Point(j) => index_of_point[j % n + 1],
            })
            .collect();

        let mut edges = Vec::new();
        for (a, arm) in arms.iter().enumerate() {
            let mut inner = 0;
            for &outer in arm {
                edges.push(Edge { inner, outer, arm: a + 1 });
                inner = outer;
            }
        }
        edges.sort_by_key(|e| vertices[e.outer].label);
        let mut edge_below = vec![None; vertices.len()];
        for (idx, e) in edges.iter().enumerate() {
            edge_below[e.outer] = Some(idx);
        }
        Ok(StarTreeMap { k, period: n, vertices, arms, edges, edge_below, image })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_name(&self, edge: usize) -> String {
        match self.vertices[self.edges[edge].outer].label {
            VertexLabel::Point(j) => format!("I_{j}"),
            VertexLabel::Alpha => unreachable!("alpha is never an outer endpoint"),
        }
    }

    /// Whether the hub is the fixed vertex `α`.
    pub fn has_alpha_vertex(&self) -> bool {
        self.vertices[0].label == VertexLabel::Alpha
    }

    /// Vertex index of `p_j`.
    pub fn point_index(&self, j: usize) -> Option<usize> {
        self.vertices.iter().position(|v| v.label == VertexLabel::Point(j))
    }

    /// Arms as label lists, innermost first.
    pub fn arm_labels(&self) -> Vec<Vec<VertexLabel>> {
        self.arms.iter().map(|arm| arm.iter().map(|&v| self.vertices[v].label).collect()).collect()
    }

    pub(crate) fn image_of(&self, vertex: usize) -> usize {
        self.image[vertex]
    }

    /// Edges from `v` down to the hub, nearest first.
    fn chain_to_hub(&self, mut v: usize) -> Vec<usize> {
        let mut chain = Vec::new();
        while let Some(e) = self.edge_below[v] {
            chain.push(e);
            v = self.edges[e].inner;
        }
        chain
    }

    /// Tree path from `u` to `v` as `(edge, traversed_outward)` pairs.
    pub(crate) fn path(&self, u: usize, v: usize) -> Vec<(usize, bool)> {
        let mut cu = self.chain_to_hub(u);
        let mut cv = self.chain_to_hub(v);
        while let (Some(a), Some(b)) = (cu.last(), cv.last()) {
            if a != b {
                break;
            }
            cu.pop();
            cv.pop();
        }
        cu.into_iter().map(|e| (e, false)).chain(cv.into_iter().rev().map(|e| (e, true))).collect()
    }

    pub(crate) fn edge_length(&self, e: usize) -> Rational {
        let edge = &self.edges[e];
        &self.vertices[edge.outer].position - &self.vertices[edge.inner].position
    }

    /// Whether the cycle is a spiral cycle around a fixed hub under some
    /// choice of starting point.
    pub fn is_spiral_graph(&self) -> bool {
        self.spiral_rotation().is_some()
    }

    /// Offset `r` such that `q_j = p_{j + r}` satisfies the spiral rules:
    /// `q_j` lies on the arm of `q_{j mod k}` and strictly inside `q_{j+k}`.
    pub fn spiral_rotation(&self) -> Option<usize> {
        if !self.has_alpha_vertex() {
            return None;
        }
        let (n, k) = (self.period, self.k);
        if n % k == 0 {
            return None;
        }
        let vertex_of: Vec<usize> = (1..=n).map(|j| self.point_index(j).expect("every point is placed")).collect();
        (0..n).find(|&r| {
            let q = |j: usize| &self.vertices[vertex_of[(j - 1 + r) % n]];
            let first = n.min(k);
            let mut seen = vec![false; k + 1];
            for j in 1..=first {
                if std::mem::replace(&mut seen[q(j).arm], true) {
                    return false;
                }
            }
            (1..=n).all(|j| q(j).arm == q((j - 1) % k + 1).arm)
                && (1..=n.saturating_sub(k)).all(|j| q(j).position < q(j + k).position)
        })
    }

    /// Copy relabelled so that the spiral rules hold with `r = 0`, arms
    /// renumbered so that `p_j` sits on arm `j mod k` (arm `k` for residue 0).
    pub fn canonical_spiral(&self) -> Option<StarTreeMap> {
        let r = self.spiral_rotation()?;
        let (n, k) = (self.period, self.k);
        let mut arm_map = vec![0usize; k + 1];
        let mut next_free = n.min(k) + 1;
        for j in 1..=n.min(k) {
            let v = self.point_index((j - 1 + r) % n + 1)?;
            arm_map[self.vertices[v].arm] = j;
        }
        for slot in arm_map.iter_mut().skip(1) {
            if *slot == 0 {
                *slot = next_free;
                next_free += 1;
            }
        }
        let placements = (1..=n)
            .map(|j| {
                let v = &self.vertices[self.point_index((j - 1 + r) % n + 1).expect("placed")];
                (arm_map[v.arm], v.position.clone())
            })
            .collect();
        StarTreeMap::from_placements(k, placements).ok()
    }
}

/// Štefan configuration of odd period `n >= 3` on an interval:
/// `p_{n-1} < ... < p_2 < p_0 < p_1 < p_3 < ... < p_{n-2}` at consecutive
/// integers. `p_0 = p_n` sits on the hub; arm 1 carries odd indices and
/// arm 2 even ones.
pub fn make_stefan_cycle(n: usize) -> Result<StarTreeMap> {
    if n < 3 || n % 2 == 0 {
        return invalid(format!("Štefan cycles have odd period >= 3, got {n}"));
    }
    let placements = (1..=n)
        .map(|j| {
            if j == n {
                (1, Rational::zero())
            } else if j % 2 == 1 {
                (1, rat((j as i64 + 1) / 2))
            } else {
                (2, rat(j as i64 / 2))
            }
        })
        .collect();
    StarTreeMap::from_placements(2, placements)
}

/// Outward spiral of period `n` on a `k`-star: `p_j` on arm `j mod k` at
/// distance `ceil(j / k)`.
pub fn make_spiral_cycle(k: usize, n: usize) -> Result<StarTreeMap> {
    if k < 3 {
        return invalid(format!("spiral cycles need k >= 3, got {k}"));
    }
    if n == 0 || n % k == 0 {
        return invalid(format!("spiral period must be positive and not divisible by k={k}, got {n}"));
    }
    let placements = (1..=n).map(|j| ((j - 1) % k + 1, rat(j.div_ceil(k) as i64))).collect();
    StarTreeMap::from_placements(k, placements)
}

#[derive(Serialize)]
struct VertexView {
    label: VertexLabel,
    position: String,
}

#[derive(Serialize)]
struct StarView {
    k: usize,
    period: usize,
    hub: VertexLabel,
    arms: Vec<Vec<VertexView>>,
}

impl Serialize for StarTreeMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StarView {
            k: self.k,
            period: self.period,
            hub: self.vertices[0].label,
            arms: self
                .arms
                .iter()
                .map(|arm| {
                    arm.iter()
                        .map(|&v| VertexView {
                            label: self.vertices[v].label,
                            position: rat_string(&self.vertices[v].position),
                        })
                        .collect()
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl fmt::Display for StarTreeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}-star, period {}, hub {}", self.k, self.period, self.vertices[0].label)?;
        for (a, arm) in self.arms.iter().enumerate() {
            let items: Vec<String> = arm
                .iter()
                .map(|&v| format!("{}@{}", self.vertices[v].label, rat_string(&self.vertices[v].position)))
                .collect();
            writeln!(f, "  arm {}: {}", a + 1, items.join(" "))?;
        }
        Ok(())
    }
}

pub(crate) fn one() -> Rational {
    Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use VertexLabel::Point;

    fn labels(t: &StarTreeMap) -> Vec<Vec<usize>> {
        t.arm_labels()
            .into_iter()
            .map(|arm| arm.into_iter().map(|l| match l { Point(j) => j, _ => 0 }).collect())
            .collect()
    }

    /// Left-to-right order of the points of an interval star.
    fn line_order(t: &StarTreeMap) -> Vec<usize> {
        let arms = labels(t);
        let hub = match t.vertices()[0].label { Point(j) => j % t.period(), _ => 0 };
        let mut order: Vec<usize> = arms[1].iter().rev().copied().collect();
        order.push(hub);
        order.extend(arms[0].iter());
        order
    }

    #[test]
    fn stefan_layouts() {
        assert_eq!(line_order(&make_stefan_cycle(3).unwrap()), vec![2, 0, 1]);
        assert_eq!(line_order(&make_stefan_cycle(5).unwrap()), vec![4, 2, 0, 1, 3]);
        let seven = line_order(&make_stefan_cycle(7).unwrap());
        assert_eq!(seven.len(), 7);
        assert_eq!((seven[0], seven[6]), (6, 5));
        assert!(make_stefan_cycle(4).is_err());
        assert!(make_stefan_cycle(1).is_err());
    }

    #[test]
    fn spiral_layouts() {
        let t = make_spiral_cycle(5, 12).unwrap();
        assert_eq!(labels(&t), vec![vec![1, 6, 11], vec![2, 7, 12], vec![3, 8], vec![4, 9], vec![5, 10]]);
        let t = make_spiral_cycle(3, 4).unwrap();
        assert_eq!(labels(&t), vec![vec![1, 4], vec![2], vec![3]]);
        let t = make_spiral_cycle(4, 1).unwrap();
        assert_eq!(labels(&t), vec![vec![1], vec![], vec![], vec![]]);
        assert_eq!(t.image_of(1), 1);
        assert!(make_spiral_cycle(3, 6).is_err());
        assert!(make_spiral_cycle(2, 3).is_err());
    }

    #[test]
    fn spiral_recognition() {
        assert!(make_spiral_cycle(5, 12).unwrap().is_spiral_graph());
        assert!(!make_stefan_cycle(5).unwrap().is_spiral_graph());
        // p_1 and p_4 swapped on arm 1
        let swapped = StarTreeMap::from_placements(
            3,
            vec![(1, rat(2)), (2, rat(1)), (3, rat(1)), (1, rat(1))],
        )
        .unwrap();
        assert!(!swapped.is_spiral_graph());
    }

    #[test]
    fn spiral_recognition_is_rotation_invariant() {
        // spiral(3, 4) with labels shifted by one: p_j here is p_{j+1} there
        let base = make_spiral_cycle(3, 4).unwrap();
        let placements = (1..=4)
            .map(|j| {
                let v = &base.vertices()[base.point_index(j % 4 + 1).unwrap()];
                (v.arm, v.position.clone())
            })
            .collect();
        let shifted = StarTreeMap::from_placements(3, placements).unwrap();
        assert_eq!(shifted.spiral_rotation(), Some(3));
        assert_eq!(shifted.canonical_spiral().unwrap(), base);
    }

    #[test]
    fn placement_validation() {
        assert!(StarTreeMap::from_placements(3, vec![(4, rat(1))]).is_err());
        assert!(StarTreeMap::from_placements(3, vec![(1, rat(1)), (1, rat(1))]).is_err());
        assert!(StarTreeMap::from_placements(3, vec![(1, rat(0)), (1, rat(0))]).is_err());
        assert!(StarTreeMap::from_placements(1, vec![(1, rat(1))]).is_err());
    }

    #[test]
    fn tree_paths() {
        let t = make_spiral_cycle(3, 4).unwrap();
        let p4 = t.point_index(4).unwrap();
        let p2 = t.point_index(2).unwrap();
        let names = |path: Vec<(usize, bool)>| -> Vec<(String, bool)> {
            path.into_iter().map(|(e, out)| (t.edge_name(e), out)).collect()
        };
        assert_eq!(
            names(t.path(p4, p2)),
            vec![("I_4".into(), false), ("I_1".into(), false), ("I_2".into(), true)]
        );
        assert_eq!(names(t.path(0, p4)), vec![("I_1".into(), true), ("I_4".into(), true)]);
    }
}

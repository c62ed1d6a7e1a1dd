use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::Serialize;

use super::oracle::{ExactPoint, OracleLimits};
use super::{StarTreeMap, VertexLabel};
use crate::error::{invalid, Error, Result};
use crate::orderings::PeriodSet;

/// Edge-covering graph of a star map: an arc `I_a -> I_b` whenever the
/// image of `I_a` contains `I_b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkovGraph {
    pub nodes: Vec<String>,
    pub arcs: Vec<(usize, usize)>,
    /// Edges touching the fixed point `α`.
    pub alpha_adjacent: Vec<usize>,
    #[serde(skip)]
    succ: Vec<Vec<usize>>,
}

impl MarkovGraph {
    pub fn build(t: &StarTreeMap) -> MarkovGraph {
        let transitions = t.transitions();
        let nodes: Vec<String> = (0..t.edges().len()).map(|e| t.edge_name(e)).collect();
        let mut arcs: Vec<(usize, usize)> = transitions.iter().map(|tr| (tr.from, tr.to)).collect();
        arcs.sort_unstable();
        let alpha_adjacent = if t.has_alpha_vertex() {
            (0..t.edges().len()).filter(|&e| t.edges()[e].inner == 0).collect()
        } else {
            // interval case: the fixed point is interior to an edge mapped over itself
            let mut found: Vec<usize> = transitions
                .iter()
                .filter(|tr| tr.from == tr.to)
                .filter(|tr| {
                    if tr.slope.is_one() {
                        return tr.offset.is_zero();
                    }
                    let fixed = &tr.offset / (super::one() - &tr.slope);
                    !fixed.is_zero() && fixed < super::one() && fixed > num_rational::BigRational::zero()
                })
                .map(|tr| tr.from)
                .collect();
            found.dedup();
            found
        };
        MarkovGraph::from_parts(nodes, arcs, alpha_adjacent)
    }

    pub fn from_parts(nodes: Vec<String>, arcs: Vec<(usize, usize)>, alpha_adjacent: Vec<usize>) -> MarkovGraph {
        let mut succ = vec![Vec::new(); nodes.len()];
        for &(a, b) in &arcs {
            succ[a].push(b);
        }
        for s in succ.iter_mut() {
            s.sort_unstable();
            s.dedup();
        }
        MarkovGraph { nodes, arcs, alpha_adjacent, succ }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succ[node]
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.succ[from].binary_search(&to).is_ok()
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn arc_names(&self) -> Vec<(String, String)> {
        self.arcs.iter().map(|&(a, b)| (self.nodes[a].clone(), self.nodes[b].clone())).collect()
    }

    /// Graphviz rendering with nodes in label order; `α`-adjacent edges
    /// are drawn as boxes.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph markov {\n");
        for (i, name) in self.nodes.iter().enumerate() {
            if self.alpha_adjacent.contains(&i) {
                let _ = writeln!(out, "  \"{name}\" [shape=box];");
            } else {
                let _ = writeln!(out, "  \"{name}\";");
            }
        }
        for &(a, b) in &self.arcs {
            let _ = writeln!(out, "  \"{}\" -> \"{}\";", self.nodes[a], self.nodes[b]);
        }
        out.push_str("}\n");
        out
    }

    pub(crate) fn succ(&self) -> &[Vec<usize>] {
        &self.succ
    }
}

/// A periodic orbit certified by a closed walk and, when available, an
/// exact point on it. The hub fixed point `α` is reported with an empty
/// itinerary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleWitness {
    pub period: u64,
    pub itinerary: Vec<String>,
    #[serde(skip)]
    pub edges: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<ExactPoint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodSearch {
    pub periods: PeriodSet,
    pub witnesses: Vec<CycleWitness>,
}

/// True when `word` is `d`-fold periodic for some proper divisor `d`.
pub fn is_repetitive(word: &[usize]) -> bool {
    let m = word.len();
    (1..m).filter(|d| m % d == 0).any(|d| (0..m).all(|i| word[i] == word[(i + d) % m]))
}

/// Visits closed walks of exactly `len` steps, each once up to rotation
/// (walks start at their smallest node). `visit` returns `true` to stop.
pub(crate) fn search_closed_walks<F>(succ: &[Vec<usize>], len: usize, budget: &mut u64, mut visit: F) -> Result<bool>
where
    F: FnMut(&[usize]) -> bool,
{
    let nodes = succ.len();
    for start in 0..nodes {
        // reach[r][u]: u reaches `start` in exactly r steps through nodes >= start
        let mut reach = vec![vec![false; nodes]; len + 1];
        reach[0][start] = true;
        for r in 1..=len {
            for u in start..nodes {
                reach[r][u] = succ[u].iter().any(|&v| v >= start && reach[r - 1][v]);
            }
        }
        if !reach[len][start] {
            continue;
        }
        let mut walk = Vec::with_capacity(len);
        walk.push(start);
        if extend(succ, &reach, start, len, &mut walk, budget, &mut visit)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn extend<F>(
    succ: &[Vec<usize>],
    reach: &[Vec<bool>],
    start: usize,
    len: usize,
    walk: &mut Vec<usize>,
    budget: &mut u64,
    visit: &mut F,
) -> Result<bool>
where
    F: FnMut(&[usize]) -> bool,
{
    if *budget == 0 {
        return Err(Error::Resource(format!("closed-walk search of length {len} exhausted its step budget")));
    }
    *budget -= 1;
    if walk.len() == len {
        return Ok(visit(walk));
    }
    let last = *walk.last().expect("walk is never empty");
    let remaining = len - walk.len();
    for &next in &succ[last] {
        if next < start || !reach[remaining][next] {
            continue;
        }
        walk.push(next);
        let stop = extend(succ, reach, start, len, walk, budget, visit)?;
        walk.pop();
        if stop {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Periods read off the Markov graph: 1 always (the fixed point), and
/// every `m >= 2` carried by a nonrepetitive closed walk that does not stay
/// inside the `α`-adjacent edges.
pub fn periods_from_markov(g: &MarkovGraph, horizon: u64) -> Result<PeriodSearch> {
    periods_from_markov_with(g, horizon, &OracleLimits::default())
}

pub fn periods_from_markov_with(g: &MarkovGraph, horizon: u64, limits: &OracleLimits) -> Result<PeriodSearch> {
    if horizon == 0 {
        return invalid("horizon must be positive");
    }
    limits.check_horizon(horizon)?;
    let mut budget = limits.max_steps;
    let mut periods = PeriodSet::empty(horizon);
    let mut witnesses = Vec::new();
    periods.elements.insert(1);
    let self_loop = (0..g.node_count()).find(|&e| g.has_arc(e, e));
    witnesses.push(CycleWitness {
        period: 1,
        itinerary: self_loop.iter().map(|&e| g.nodes[e].clone()).collect(),
        edges: self_loop.into_iter().collect(),
        point: None,
    });
    for m in 2..=horizon as usize {
        let mut found = None;
        search_closed_walks(g.succ(), m, &mut budget, |walk| {
            if walk.iter().all(|e| g.alpha_adjacent.contains(e)) || is_repetitive(walk) {
                return false;
            }
            found = Some(walk.to_vec());
            true
        })?;
        if let Some(edges) = found {
            periods.elements.insert(m as u64);
            witnesses.push(CycleWitness {
                period: m as u64,
                itinerary: edges.iter().map(|&e| g.nodes[e].clone()).collect(),
                edges,
                point: None,
            });
        }
    }
    Ok(PeriodSearch { periods, witnesses })
}

/// Checks that consecutive itinerary entries (cyclically) are arcs.
pub fn itinerary_is_closed_walk(g: &MarkovGraph, edges: &[usize]) -> bool {
    let m = edges.len();
    (0..m).all(|i| g.has_arc(edges[i], edges[(i + 1) % m]))
}

impl StarTreeMap {
    pub fn markov_graph(&self) -> MarkovGraph {
        MarkovGraph::build(self)
    }

    pub(crate) fn hub_label(&self) -> VertexLabel {
        self.vertices[0].label
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orderings::down_set_k;
    use crate::star::{make_spiral_cycle, make_stefan_cycle};

    fn arc_set(g: &MarkovGraph) -> Vec<(String, String)> {
        let mut arcs = g.arc_names();
        arcs.sort();
        arcs
    }

    fn pairs(list: &[(&str, &str)]) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = list.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        v.sort();
        v
    }

    #[test]
    fn stefan_three_graph() {
        // A = [p_2, p_0] is I_2, B = [p_0, p_1] is I_1
        let g = make_stefan_cycle(3).unwrap().markov_graph();
        assert_eq!(arc_set(&g), pairs(&[("I_2", "I_1"), ("I_1", "I_2"), ("I_1", "I_1")]));
        assert_eq!(g.alpha_adjacent, vec![g.node_index("I_1").unwrap()]);
    }

    #[test]
    fn spiral_three_four_graph() {
        let g = make_spiral_cycle(3, 4).unwrap().markov_graph();
        assert_eq!(
            arc_set(&g),
            pairs(&[
                ("I_1", "I_2"),
                ("I_2", "I_3"),
                ("I_3", "I_1"),
                ("I_3", "I_4"),
                ("I_4", "I_1"),
                ("I_4", "I_2")
            ])
        );
        assert_eq!(g.alpha_adjacent.len(), 3);
    }

    #[test]
    fn degenerate_spiral_graph() {
        let g = make_spiral_cycle(4, 1).unwrap().markov_graph();
        assert_eq!(arc_set(&g), pairs(&[("I_1", "I_1")]));
        let found = periods_from_markov(&g, 12).unwrap();
        assert_eq!(found.periods.iter().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn loop_periods_match_down_sets() {
        let g = make_spiral_cycle(3, 4).unwrap().markov_graph();
        let found = periods_from_markov(&g, 12).unwrap();
        assert_eq!(found.periods.iter().collect::<Vec<_>>(), vec![1, 3, 4, 6, 7, 9, 10, 11, 12]);
        assert_eq!(found.periods, down_set_k(3, 4, 12).unwrap());
        for w in &found.witnesses[1..] {
            assert_eq!(w.edges.len() as u64, w.period);
            assert!(itinerary_is_closed_walk(&g, &w.edges));
            assert!(!is_repetitive(&w.edges));
        }

        let g = make_stefan_cycle(3).unwrap().markov_graph();
        let found = periods_from_markov(&g, 10).unwrap();
        assert_eq!(found.periods.iter().collect::<Vec<_>>(), (1..=10).collect::<Vec<_>>());
    }

    #[test]
    fn repetition_detection() {
        assert!(is_repetitive(&[1, 2, 1, 2]));
        assert!(is_repetitive(&[3, 3, 3]));
        assert!(!is_repetitive(&[1, 2, 2]));
        assert!(!is_repetitive(&[5]));
    }

    #[test]
    fn dot_output_is_stable() {
        let g = make_spiral_cycle(3, 4).unwrap().markov_graph();
        let dot = g.to_dot();
        assert_eq!(dot, g.to_dot());
        assert_eq!(dot.matches("->").count(), 6);
        for name in ["I_1", "I_2", "I_3", "I_4"] {
            assert!(dot.contains(&format!("\"{name}\"")));
        }
        assert!(dot.find("\"I_1\"").unwrap() < dot.find("\"I_4\"").unwrap());
    }

    #[test]
    fn zero_horizon_rejected() {
        let g = make_spiral_cycle(3, 4).unwrap().markov_graph();
        assert!(periods_from_markov(&g, 0).is_err());
    }
}

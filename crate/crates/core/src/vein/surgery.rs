//! Combinatorial sector surgery on marked cycles.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::star::{make_stefan_cycle, ExactPoint, Rational, StarTreeMap, VertexLabel};

/// Position of `p_j` as `(arm, distance)`.
fn placement(t: &StarTreeMap, j: usize) -> (usize, Rational) {
    let v = &t.vertices()[t.point_index(j).expect("every point is placed")];
    (v.arm, v.position.clone())
}

/// Moves a Štefan cycle of period `2i + 1` from the real line onto a
/// `k`-star.
///
/// The interval is cut at `α`. The critical sector (the hub side, holding
/// `p_0, p_2, ..., p_{2i}`) becomes sector 0; the other sector is copied
/// into sectors `1..k`, and the copies are chained `S_1 -> ... -> S_{k-1}
/// -> S_0`. The result is a spiral cycle of period `ik + 1` around `α`.
pub fn surgery_real_to_principal(s: &StarTreeMap, k: usize) -> Result<StarTreeMap> {
    if k < 3 {
        return invalid(format!("the target star needs k >= 3, got {k}"));
    }
    let n = s.period();
    let model = make_stefan_cycle(n).map_err(|_| not_stefan(n))?;
    if s.k() != 2 || s.vertices()[0].label != VertexLabel::Point(n) || s.arm_labels() != model.arm_labels() {
        return Err(not_stefan(n));
    }
    let alpha = s.interior_fixed_point().ok_or_else(|| not_stefan(n))?;
    if alpha.arm != 1 || alpha.position >= placement(s, 1).1 {
        return invalid("the fixed point does not separate p_0 from p_1");
    }
    let a = alpha.position;

    // Distance from α, sector by sector: arm 2 and the old hub lie behind α.
    let critical = |j: usize| {
        let (arm, pos) = placement(s, j);
        if arm == 1 { &a - pos } else { &a + pos }
    };
    let outer = |j: usize| placement(s, j).1 - &a;

    let mut placements = Vec::with_capacity(n / 2 * k + 1);
    placements.push((1, critical(n)));
    for j in 1..n {
        if j % 2 == 1 {
            placements.extend((2..=k).map(|arm| (arm, outer(j))));
        } else {
            placements.push((1, critical(j)));
        }
    }
    let t = StarTreeMap::from_placements(k, placements)?;
    Ok(t.canonical_spiral().unwrap_or(t))
}

fn not_stefan(n: usize) -> crate::Error {
    crate::Error::InvalidArgument(format!("input is not a Štefan cycle of odd period (period {n})"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformOutcome {
    pub tree: StarTreeMap,
    /// Preimage of `α` marked on the outermost edge of the critical arm.
    pub alpha_preimage: ExactPoint,
    /// The new cycle point `p_{n+1}`.
    pub inserted: ExactPoint,
}

/// Spiral of period `ik + l` to spiral of period `ik + l + 1`.
///
/// The edge `[p_{n-k}, p_n]` maps across `α`, so it carries a preimage of
/// `α`; the orbit is extended by one step past `p_n`, and the new point is
/// grafted as the outermost leaf of arm `l + 1`, which then returns to
/// `p_1`.
pub fn secondary_transform(t: &StarTreeMap) -> Result<TransformOutcome> {
    let spiral = t.canonical_spiral().ok_or_else(|| {
        crate::Error::InvalidArgument("input is not a spiral cycle".into())
    })?;
    let (k, n) = (spiral.k(), spiral.period());
    let l = n % k;
    if n < k {
        return invalid(format!("period {n} is below k = {k}; need n = ik + l with i >= 1"));
    }
    if l == k - 1 {
        return invalid(format!("l = k - 1 = {l} has no next vein"));
    }

    let (arm, inner) = placement(&spiral, n - k);
    let (_, tip) = placement(&spiral, n);
    let alpha_preimage = ExactPoint::new(arm, (&inner + &tip) / Rational::from_integer(2.into()));

    let new_arm = l + 1;
    let outermost = (1..=n)
        .map(|j| placement(&spiral, j))
        .filter(|(a, _)| *a == new_arm)
        .map(|(_, p)| p)
        .max()
        .unwrap_or_else(Rational::zero);
    let inserted = ExactPoint::new(new_arm, outermost + Rational::one());

    let mut placements: Vec<(usize, Rational)> = (1..=n).map(|j| placement(&spiral, j)).collect();
    placements.push((inserted.arm, inserted.position.clone()));
    let tree = StarTreeMap::from_placements(k, placements)?;
    Ok(TransformOutcome { tree, alpha_preimage, inserted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star::{brute_force_periods, make_spiral_cycle};
    use crate::orderings::down_set_k;

    #[test]
    fn surgery_examples() {
        for (n, k, want) in [(3, 3, 4), (5, 5, 11), (3, 5, 6)] {
            let out = surgery_real_to_principal(&make_stefan_cycle(n).unwrap(), k).unwrap();
            assert_eq!(out.period(), want);
            assert_eq!(out.k(), k);
            assert!(out.is_spiral_graph());
        }
    }

    #[test]
    fn surgery_arithmetic() {
        for i in 1..=5 {
            for k in 3..=6 {
                let out = surgery_real_to_principal(&make_stefan_cycle(2 * i + 1).unwrap(), k).unwrap();
                assert_eq!(out.period(), i * k + 1, "i={i} k={k}");
                assert!(out.is_spiral_graph());
            }
        }
    }

    #[test]
    fn surgery_rejects_non_stefan() {
        assert!(surgery_real_to_principal(&make_spiral_cycle(3, 4).unwrap(), 3).is_err());
        assert!(surgery_real_to_principal(&make_stefan_cycle(3).unwrap(), 2).is_err());
    }

    #[test]
    fn surgery_period_set() {
        let out = surgery_real_to_principal(&make_stefan_cycle(5).unwrap(), 3).unwrap();
        let got = brute_force_periods(&out, 30).unwrap().periods;
        assert_eq!(got, down_set_k(3, 7, 30).unwrap());
    }

    #[test]
    fn transform_examples() {
        for (k, n) in [(3, 4), (5, 7), (4, 6)] {
            let out = secondary_transform(&make_spiral_cycle(k, n).unwrap()).unwrap();
            assert_eq!(out.tree, make_spiral_cycle(k, n + 1).unwrap());
            assert!(out.tree.is_spiral_graph());
        }
        let out = secondary_transform(&make_spiral_cycle(4, 6).unwrap()).unwrap();
        assert_eq!(brute_force_periods(&out.tree, 40).unwrap().periods, down_set_k(4, 7, 40).unwrap());
    }

    #[test]
    fn transform_marks_alpha_preimage() {
        let out = secondary_transform(&make_spiral_cycle(3, 4).unwrap()).unwrap();
        let spiral = make_spiral_cycle(3, 4).unwrap();
        assert_eq!(out.alpha_preimage.arm, 1);
        assert_eq!(out.alpha_preimage.position, Rational::new(3.into(), 2.into()));
        assert_eq!(out.inserted, ExactPoint::new(2, Rational::from_integer(2.into())));
        // its image is on the far side of α from its host edge
        let image = spiral.apply(&out.alpha_preimage);
        assert_ne!(image.arm, 1);
    }

    #[test]
    fn transform_errors() {
        assert!(secondary_transform(&make_spiral_cycle(3, 5).unwrap()).is_err());
        assert!(secondary_transform(&make_spiral_cycle(4, 3).unwrap()).is_err());
        assert!(secondary_transform(&make_stefan_cycle(5).unwrap()).is_err());
    }
}

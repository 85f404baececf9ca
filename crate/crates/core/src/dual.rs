//! Dual trees of n-pointed stable degenerations of a curve.
//!
//! For a stable class on a one-dimensional patch of a genus-g curve, the
//! associated degeneration bubbles off a projective line for every
//! coincidence-tree node: the node's screen values become coordinates on
//! the bubble, its children become further bubbles attached at their
//! common screen value, and the bubble meets its parent at the point at
//! infinity. Markings at distinct base points stay on the spine. The
//! result is Deligne–Mumford stable: every bubble carries at least three
//! special points.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::rat::Rat;
use crate::screen::Mark;
use crate::stable::{ClassNode, StableClass};
use crate::strata::StrataError;

/// A marking placed at a coordinate of its component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedMark {
    pub mark: Mark,
    pub at: Rat,
}

/// A rational bubble: one component of the degeneration other than the
/// spine. Its own coordinate chart puts the attachment to the parent at
/// infinity; `attach_at` is the coordinate of the attachment point *on
/// the parent*.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bubble {
    /// The coincidence subset this bubble separates; also its stable id.
    pub node: Vec<Mark>,
    /// Parent component: `None` is the spine.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<Vec<Mark>>,
    /// Coordinate of the attachment point on the parent component.
    pub attach_at: Rat,
    /// Markings carried directly on this bubble.
    pub markings: Vec<PlacedMark>,
}

/// The dual tree of a stable degeneration: a spine of genus g plus
/// rational bubbles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualTree {
    pub n: usize,
    pub genus: u32,
    /// Markings on the spine, at their base-point coordinates.
    pub spine_markings: Vec<PlacedMark>,
    /// All bubbles, sorted by node set.
    pub bubbles: Vec<Bubble>,
}

impl DualTree {
    /// Children of a component: `None` selects the spine.
    fn children_of(&self, parent: Option<&[Mark]>) -> Vec<&Bubble> {
        self.bubbles
            .iter()
            .filter(|b| b.parent.as_deref() == parent)
            .collect()
    }

    /// Markings carried in the subtree below a bubble (by structure, not
    /// by reading `node`).
    pub fn marks_under(&self, bubble: &Bubble) -> Vec<Mark> {
        let mut out: Vec<Mark> = bubble.markings.iter().map(|m| m.mark).collect();
        for child in self.children_of(Some(&bubble.node)) {
            out.extend(self.marks_under(child));
        }
        out.sort_unstable();
        out
    }

    /// The nest recovered from the bubble structure alone.
    pub fn recovered_sets(&self) -> Vec<Vec<Mark>> {
        let mut sets: Vec<Vec<Mark>> = self.bubbles.iter().map(|b| self.marks_under(b)).collect();
        sets.sort();
        sets
    }

    /// Deterministic DOT rendering; node identifiers come from the nest
    /// member sets, so output is diffable.
    pub fn to_dot(&self) -> String {
        fn bubble_id(node: &[Mark]) -> String {
            let parts: Vec<String> = node.iter().map(|m| m.to_string()).collect();
            format!("b_{}", parts.join("_"))
        }
        let mut s = String::new();
        let _ = writeln!(s, "graph dual_tree {{");
        let _ = writeln!(s, "  node [shape=ellipse];");
        let _ = writeln!(s, "  spine [shape=box, label=\"spine g={}\"];", self.genus);
        for b in &self.bubbles {
            let _ = writeln!(s, "  {} [label=\"P1 {:?}\"];", bubble_id(&b.node), b.node);
        }
        for m in 1..=self.n {
            let _ = writeln!(s, "  m{} [shape=point, xlabel=\"{}\"];", m, m);
        }
        for pm in &self.spine_markings {
            let _ = writeln!(s, "  spine -- m{} [label=\"{}\"];", pm.mark, pm.at);
        }
        for b in &self.bubbles {
            let parent = match &b.parent {
                None => "spine".to_owned(),
                Some(p) => bubble_id(p),
            };
            let _ = writeln!(
                s,
                "  {} -- {} [label=\"{}\"];",
                parent,
                bubble_id(&b.node),
                b.attach_at
            );
            for pm in &b.markings {
                let _ = writeln!(
                    s,
                    "  {} -- m{} [label=\"{}\"];",
                    bubble_id(&b.node),
                    pm.mark,
                    pm.at
                );
            }
        }
        let _ = writeln!(s, "}}");
        s
    }
}

/// Build the dual tree of a one-dimensional stable class over a genus-g
/// spine. The class must be valid; base points are smooth points of the
/// curve model.
pub fn dual_tree(class: &StableClass, genus: u32) -> Result<DualTree, StrataError> {
    if class.dim != 1 {
        return Err(StrataError::DimensionError(class.dim));
    }

    let mut bubbles = Vec::new();
    fn walk(node: &ClassNode, parent: Option<&[Mark]>, attach_at: Rat, out: &mut Vec<Bubble>) {
        let child_sets: Vec<BTreeSet<Mark>> = node
            .children
            .iter()
            .map(|c| c.members.iter().cloned().collect())
            .collect();
        let markings: Vec<PlacedMark> = node
            .members
            .iter()
            .zip(&node.screen)
            .filter(|(m, _)| !child_sets.iter().any(|c| c.contains(m)))
            .map(|(m, row)| PlacedMark {
                mark: *m,
                at: row[0].clone(),
            })
            .collect();
        out.push(Bubble {
            node: node.members.clone(),
            parent: parent.map(|p| p.to_vec()),
            attach_at,
            markings,
        });
        for child in &node.children {
            // the child's fiber value in this node's screen
            let pos = node
                .members
                .iter()
                .position(|m| m == &child.members[0])
                .expect("child members are members of the parent");
            let at = node.screen[pos][0].clone();
            walk(child, Some(&node.members), at, out);
        }
    }

    for tree in &class.trees {
        let base = class.points[tree.members[0] - 1][0].clone();
        walk(tree, None, base, &mut bubbles);
    }
    bubbles.sort_by(|a, b| a.node.cmp(&b.node));

    let in_tree: BTreeSet<Mark> = class
        .trees
        .iter()
        .flat_map(|t| t.members.iter().cloned())
        .collect();
    let spine_markings: Vec<PlacedMark> = (1..=class.n)
        .filter(|m| !in_tree.contains(m))
        .map(|m| PlacedMark {
            mark: m,
            at: class.points[m - 1][0].clone(),
        })
        .collect();

    Ok(DualTree {
        n: class.n,
        genus,
        spine_markings,
        bubbles,
    })
}

/// Deligne–Mumford stability of the degeneration:
/// every bubble has ≥ 3 special points (parent attachment, markings,
/// child attachments), markings are distinct on each component and avoid
/// attachment points, the markings partition `{1..n}`, and a genus-0
/// (resp. 1) spine carries at least 3 (resp. 1) special points.
pub fn is_dm_stable(t: &DualTree) -> bool {
    // Markings partition {1..n}.
    let mut all: Vec<Mark> = t.spine_markings.iter().map(|m| m.mark).collect();
    for b in &t.bubbles {
        all.extend(b.markings.iter().map(|m| m.mark));
    }
    all.sort_unstable();
    if all != (1..=t.n).collect::<Vec<_>>() {
        return false;
    }

    // Spine: marking positions and attachment points all distinct.
    let mut spine_special: Vec<Rat> = t.spine_markings.iter().map(|m| m.at.clone()).collect();
    let root_attach: Vec<Rat> = t
        .children_of(None)
        .iter()
        .map(|b| b.attach_at.clone())
        .collect();
    spine_special.extend(root_attach);
    let mut dedup = spine_special.clone();
    dedup.sort();
    dedup.dedup();
    if dedup.len() != spine_special.len() {
        return false;
    }
    match t.genus {
        0 if spine_special.len() < 3 => return false,
        1 if spine_special.is_empty() => return false,
        _ => {}
    }

    for b in &t.bubbles {
        // Affine special points: own markings and child attachments.
        let mut affine: Vec<Rat> = b.markings.iter().map(|m| m.at.clone()).collect();
        affine.extend(
            t.children_of(Some(&b.node))
                .iter()
                .map(|c| c.attach_at.clone()),
        );
        let mut dedup = affine.clone();
        dedup.sort();
        dedup.dedup();
        if dedup.len() != affine.len() {
            return false;
        }
        // +1 for the parent attachment at infinity.
        if affine.len() + 1 < 3 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rz() -> Rat {
        Rat::zero()
    }

    fn ri(n: i64) -> Rat {
        Rat::from_int(n)
    }

    /// Markings 1,2 coincident at p = 0 with screen (0),(1); marking 3 at q = 5.
    fn two_plus_one() -> StableClass {
        StableClass::new(
            3,
            1,
            vec![vec![rz()], vec![rz()], vec![ri(5)]],
            vec![ClassNode::new(
                vec![1, 2],
                vec![vec![rz()], vec![ri(1)]],
                vec![],
            )],
        )
    }

    /// All three markings at 0, nest {{1,2,3},{1,3}}.
    fn nested_class() -> StableClass {
        StableClass::new(
            3,
            1,
            vec![vec![rz()], vec![rz()], vec![rz()]],
            vec![ClassNode::new(
                vec![1, 2, 3],
                vec![vec![rz()], vec![ri(1)], vec![rz()]],
                vec![ClassNode::new(
                    vec![1, 3],
                    vec![vec![rz()], vec![ri(1)]],
                    vec![],
                )],
            )],
        )
    }

    #[test]
    fn bubble_for_simple_coincidence() {
        let t = dual_tree(&two_plus_one(), 3).unwrap();
        assert_eq!(t.genus, 3);
        assert_eq!(t.spine_markings, vec![PlacedMark { mark: 3, at: ri(5) }]);
        assert_eq!(t.bubbles.len(), 1);
        let b = &t.bubbles[0];
        assert_eq!(b.node, vec![1, 2]);
        assert_eq!(b.parent, None);
        assert_eq!(b.attach_at, rz());
        assert_eq!(
            b.markings,
            vec![
                PlacedMark { mark: 1, at: rz() },
                PlacedMark { mark: 2, at: ri(1) }
            ]
        );
        // 2 markings + attachment at infinity = 3 special points
        assert!(is_dm_stable(&t));
    }

    #[test]
    fn nested_class_gives_bubble_chain() {
        let t = dual_tree(&nested_class(), 2).unwrap();
        assert!(t.spine_markings.is_empty());
        assert_eq!(t.bubbles.len(), 2);
        let root = t.bubbles.iter().find(|b| b.node == vec![1, 2, 3]).unwrap();
        let child = t.bubbles.iter().find(|b| b.node == vec![1, 3]).unwrap();
        // root bubble: marking 2 at its screen value, child attached at the
        // shared value 0, parent = spine at base point 0
        assert_eq!(root.markings, vec![PlacedMark { mark: 2, at: ri(1) }]);
        assert_eq!(root.parent, None);
        assert_eq!(child.parent.as_deref(), Some(&[1, 2, 3][..]));
        assert_eq!(child.attach_at, rz());
        assert_eq!(
            child.markings,
            vec![
                PlacedMark { mark: 1, at: rz() },
                PlacedMark { mark: 3, at: ri(1) }
            ]
        );
        assert!(is_dm_stable(&t));
    }

    #[test]
    fn spine_only_tree() {
        let c = StableClass::new(2, 1, vec![vec![rz()], vec![ri(1)]], vec![]);
        let t = dual_tree(&c, 2).unwrap();
        assert!(t.bubbles.is_empty());
        assert_eq!(t.spine_markings.len(), 2);
        assert!(is_dm_stable(&t));
    }

    #[test]
    fn dimension_other_than_one_is_rejected() {
        let c = StableClass::new(1, 2, vec![vec![rz(), rz()]], vec![]);
        assert_eq!(dual_tree(&c, 2), Err(StrataError::DimensionError(2)));
    }

    #[test]
    fn hand_built_two_point_bubble_fails() {
        let t = DualTree {
            n: 1,
            genus: 2,
            spine_markings: vec![],
            bubbles: vec![Bubble {
                node: vec![1],
                parent: None,
                attach_at: rz(),
                markings: vec![PlacedMark { mark: 1, at: rz() }],
            }],
        };
        // one marking + the attachment = 2 special points
        assert!(!is_dm_stable(&t));
    }

    #[test]
    fn genus_zero_spine_needs_three_special_points() {
        let c = StableClass::new(2, 1, vec![vec![rz()], vec![ri(1)]], vec![]);
        let t = dual_tree(&c, 0).unwrap();
        assert!(!is_dm_stable(&t));
        let c3 = StableClass::new(3, 1, vec![vec![rz()], vec![ri(1)], vec![ri(2)]], vec![]);
        assert!(is_dm_stable(&dual_tree(&c3, 0).unwrap()));
    }

    #[test]
    fn nest_recoverable_from_structure() {
        let t = dual_tree(&nested_class(), 2).unwrap();
        assert_eq!(t.recovered_sets(), vec![vec![1, 2, 3], vec![1, 3]]);
        for b in &t.bubbles {
            assert_eq!(t.marks_under(b), b.node);
        }
    }

    #[test]
    fn dot_output_is_stable() {
        let t = dual_tree(&two_plus_one(), 3).unwrap();
        let dot = t.to_dot();
        assert!(dot.contains("graph dual_tree {"));
        assert!(dot.contains("spine [shape=box, label=\"spine g=3\"]"));
        assert!(dot.contains("b_1_2"));
        assert_eq!(dot, t.to_dot());
    }

    #[test]
    fn json_round_trip() {
        let t = dual_tree(&nested_class(), 2).unwrap();
        let text = serde_json::to_string(&t).unwrap();
        let back: DualTree = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
    }
}

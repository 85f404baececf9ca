//! n-pointed stable classes: base points plus coincidence trees of screens.
//!
//! A stable class assigns each marking a point of a local ambient patch
//! and, for every point hit by two or more markings, a rooted coincidence
//! tree. Tree nodes are coincident subsets; each node carries screen data
//! on its members, and the children of a node are exactly the fibers of
//! size ≥ 2 of the node's screen values. This is the minimal encoding of
//! the full compatible screen system: screens for intermediate subsets
//! are reconstructed by [`StableClass::induced_screen`].
//!
//! The struct can represent invalid configurations on purpose —
//! [`StableClass::validate`] reports violations instead of panicking, so
//! malformed inputs loaded from JSON can be diagnosed.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rat::Rat;
use crate::screen::{Mark, Restriction, Screen, ScreenError};

/// A coincidence-tree node: a subset of markings with screen value rows.
///
/// `screen` rows align with the sorted `members` list. In a normalized
/// class the rows are in screen canonical form.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassNode {
    #[serde(rename = "node")]
    pub members: Vec<Mark>,
    pub screen: Vec<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ClassNode>,
}

impl ClassNode {
    pub fn new(members: Vec<Mark>, screen: Vec<Vec<Rat>>, children: Vec<ClassNode>) -> Self {
        ClassNode {
            members,
            screen,
            children,
        }
    }

    /// All node member sets in this subtree, preorder.
    fn collect_sets(&self, out: &mut Vec<Vec<Mark>>) {
        out.push(self.members.clone());
        for c in &self.children {
            c.collect_sets(out);
        }
    }

    fn screen_pairs(&self) -> Vec<(Mark, Vec<Rat>)> {
        self.members
            .iter()
            .cloned()
            .zip(self.screen.iter().cloned())
            .collect()
    }
}

impl fmt::Debug for ClassNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} -> {:?}", self.members, self.screen)?;
        if !self.children.is_empty() {
            write!(f, " {:?}", self.children)?;
        }
        Ok(())
    }
}

/// A violation found by [`StableClass::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Shape problems: marks out of range, dimension mismatches, duplicates.
    Malformed(String),
    /// The members of a node do not all share one base point.
    NodeNotCoincident(Vec<Mark>),
    /// A root node is not the full set of markings at its base point.
    RootNotMaximal {
        root: Vec<Mark>,
        coincident: Vec<Mark>,
    },
    /// A node's screen values are all equal.
    ConstantScreen(Vec<Mark>),
    /// Children differ from the size-≥2 value fibers of the node screen.
    ChildrenFiberMismatch {
        node: Vec<Mark>,
        fibers: Vec<Vec<Mark>>,
        children: Vec<Vec<Mark>>,
    },
    /// Two node sets overlap without nesting.
    NotLaminar(Vec<Mark>, Vec<Mark>),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Malformed(m) => write!(f, "malformed: {}", m),
            Violation::NodeNotCoincident(s) => {
                write!(f, "node {:?} members do not share a base point", s)
            }
            Violation::RootNotMaximal { root, coincident } => write!(
                f,
                "root {:?} is not the maximal coincident set {:?}",
                root, coincident
            ),
            Violation::ConstantScreen(s) => write!(f, "node {:?} has a constant screen", s),
            Violation::ChildrenFiberMismatch {
                node,
                fibers,
                children,
            } => write!(
                f,
                "node {:?}: children {:?} do not match the size->=2 screen fibers {:?}",
                node, children, fibers
            ),
            Violation::NotLaminar(a, b) => {
                write!(f, "sets {:?} and {:?} overlap without nesting", a, b)
            }
        }
    }
}

/// An n-pointed stable class over a local ambient patch.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableClass {
    pub n: usize,
    pub dim: usize,
    /// Base point of marking i at index i-1.
    pub points: Vec<Vec<Rat>>,
    /// One coincidence tree per multiply-hit base point, sorted by least member.
    pub trees: Vec<ClassNode>,
}

impl StableClass {
    pub fn new(n: usize, dim: usize, points: Vec<Vec<Rat>>, trees: Vec<ClassNode>) -> Self {
        StableClass {
            n,
            dim,
            points,
            trees,
        }
    }

    pub fn point_of(&self, mark: Mark) -> Option<&[Rat]> {
        if mark == 0 || mark > self.n {
            return None;
        }
        self.points.get(mark - 1).map(|p| p.as_slice())
    }

    /// Normalize in place: canonicalize every node screen, sort members,
    /// trees and children by least member. Fails on degenerate screens.
    pub fn normalize(&self) -> Result<StableClass, ScreenError> {
        fn normalize_node(node: &ClassNode) -> Result<ClassNode, ScreenError> {
            let raw: Vec<(Mark, Vec<Rat>)> = node
                .members
                .iter()
                .cloned()
                .zip(node.screen.iter().cloned())
                .collect();
            let screen = Screen::normalize(&raw)?;
            let mut children = node
                .children
                .iter()
                .map(normalize_node)
                .collect::<Result<Vec<_>, _>>()?;
            children.sort_by_key(|c| c.members.first().copied());
            Ok(ClassNode {
                members: screen.indices().to_vec(),
                screen: screen.values().to_vec(),
                children,
            })
        }
        let mut trees = self
            .trees
            .iter()
            .map(normalize_node)
            .collect::<Result<Vec<_>, _>>()?;
        trees.sort_by_key(|t| t.members.first().copied());
        Ok(StableClass {
            n: self.n,
            dim: self.dim,
            points: self.points.clone(),
            trees,
        })
    }

    /// All coincidence-tree node sets (preorder across sorted trees).
    pub fn node_sets(&self) -> Vec<Vec<Mark>> {
        let mut out = Vec::new();
        for t in &self.trees {
            t.collect_sets(&mut out);
        }
        out
    }

    /// Markings grouped by base point, groups of size ≥ 2 only.
    pub fn coincident_groups(&self) -> Vec<Vec<Mark>> {
        let mut groups: Vec<(Vec<Rat>, Vec<Mark>)> = Vec::new();
        for mark in 1..=self.n {
            let p = self.points[mark - 1].clone();
            match groups.iter_mut().find(|(q, _)| q == &p) {
                Some((_, g)) => g.push(mark),
                None => groups.push((p, vec![mark])),
            }
        }
        groups
            .into_iter()
            .filter(|(_, g)| g.len() >= 2)
            .map(|(_, g)| g)
            .collect()
    }

    /// Check the stable-class axioms; an empty list means the class is valid.
    ///
    /// (a) tree roots are exactly the maximal coincident sets,
    /// (b) every node screen is non-constant,
    /// (c) children are exactly the size-≥2 value fibers of the node screen,
    /// (d) the node sets form a laminar family.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();

        // Shape checks first; nothing else is meaningful if these fail.
        if self.points.len() != self.n {
            violations.push(Violation::Malformed(format!(
                "{} base points for n = {}",
                self.points.len(),
                self.n
            )));
            return violations;
        }
        for (i, p) in self.points.iter().enumerate() {
            if p.len() != self.dim {
                violations.push(Violation::Malformed(format!(
                    "base point {} has dimension {}, expected {}",
                    i + 1,
                    p.len(),
                    self.dim
                )));
                return violations;
            }
        }
        let mut shape_ok = true;
        for node in self.iter_nodes() {
            if node.members.len() < 2 {
                violations.push(Violation::Malformed(format!(
                    "node {:?} has fewer than two members",
                    node.members
                )));
                shape_ok = false;
            }
            if node.screen.len() != node.members.len()
                || node.screen.iter().any(|row| row.len() != self.dim)
            {
                violations.push(Violation::Malformed(format!(
                    "node {:?} screen shape does not match members/dimension",
                    node.members
                )));
                shape_ok = false;
            }
            let set: BTreeSet<Mark> = node.members.iter().cloned().collect();
            if set.len() != node.members.len() || node.members.iter().any(|&m| m == 0 || m > self.n)
            {
                violations.push(Violation::Malformed(format!(
                    "node {:?} has duplicate or out-of-range marks",
                    node.members
                )));
                shape_ok = false;
            }
        }
        if !shape_ok {
            return violations;
        }

        // (a) roots are maximal coincident sets, one tree per multi-point.
        let groups = self.coincident_groups();
        let mut roots: Vec<Vec<Mark>> = self
            .trees
            .iter()
            .map(|t| {
                let mut m = t.members.clone();
                m.sort_unstable();
                m
            })
            .collect();
        roots.sort();
        let mut expected = groups.clone();
        expected.sort();
        if roots != expected {
            for root in &roots {
                let coincident = groups
                    .iter()
                    .find(|g| g.iter().any(|m| root.contains(m)))
                    .cloned()
                    .unwrap_or_default();
                if root != &coincident {
                    violations.push(Violation::RootNotMaximal {
                        root: root.clone(),
                        coincident,
                    });
                }
            }
            for g in &expected {
                if !roots.contains(g) {
                    violations.push(Violation::RootNotMaximal {
                        root: Vec::new(),
                        coincident: g.clone(),
                    });
                }
            }
        }

        // Per-node checks (b), (c) and coincidence of members.
        for node in self.iter_nodes() {
            let mut sorted = node.members.clone();
            sorted.sort_unstable();
            let base = self.points[sorted[0] - 1].clone();
            if sorted.iter().any(|&m| self.points[m - 1] != base) {
                violations.push(Violation::NodeNotCoincident(sorted.clone()));
            }
            if node.screen.iter().all(|row| row == &node.screen[0]) {
                violations.push(Violation::ConstantScreen(sorted.clone()));
                continue;
            }
            // Fibers of the value map, size >= 2, as sorted sets.
            let mut fibers: Vec<Vec<Mark>> = Vec::new();
            for (pos, row) in node.screen.iter().enumerate() {
                let first = node.screen.iter().position(|r| r == row).unwrap();
                if first == pos {
                    let members: Vec<Mark> = node
                        .members
                        .iter()
                        .zip(&node.screen)
                        .filter(|(_, r)| *r == row)
                        .map(|(m, _)| *m)
                        .collect();
                    if members.len() >= 2 {
                        fibers.push(members);
                    }
                }
            }
            let mut fibers_sorted: Vec<Vec<Mark>> = fibers
                .iter()
                .map(|f| {
                    let mut f = f.clone();
                    f.sort_unstable();
                    f
                })
                .collect();
            fibers_sorted.sort();
            let mut children: Vec<Vec<Mark>> = node
                .children
                .iter()
                .map(|c| {
                    let mut m = c.members.clone();
                    m.sort_unstable();
                    m
                })
                .collect();
            children.sort();
            if fibers_sorted != children {
                violations.push(Violation::ChildrenFiberMismatch {
                    node: sorted,
                    fibers: fibers_sorted,
                    children,
                });
            }
        }

        // (d) laminarity over all node sets.
        let sets: Vec<BTreeSet<Mark>> = self
            .node_sets()
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        for i in 0..sets.len() {
            for j in (i + 1)..sets.len() {
                let (a, b) = (&sets[i], &sets[j]);
                let inter: BTreeSet<_> = a.intersection(b).cloned().collect();
                if !inter.is_empty() && &inter != a && &inter != b {
                    violations.push(Violation::NotLaminar(
                        a.iter().cloned().collect(),
                        b.iter().cloned().collect(),
                    ));
                }
            }
        }

        violations
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn iter_nodes(&self) -> impl Iterator<Item = &ClassNode> {
        fn walk<'a>(node: &'a ClassNode, out: &mut Vec<&'a ClassNode>) {
            out.push(node);
            for c in &node.children {
                walk(c, out);
            }
        }
        let mut out = Vec::new();
        for t in &self.trees {
            walk(t, &mut out);
        }
        out.into_iter()
    }

    /// Reconstruct the screen induced on a coincident subset `s` (|s| ≥ 2).
    ///
    /// Walks down to the smallest tree node containing `s` and returns the
    /// normalized restriction of its screen; if that restriction happens
    /// to be constant (possible only on invalid classes), retries on the
    /// ancestors. For valid classes this is the compatible screen system.
    pub fn induced_screen(&self, s: &[Mark]) -> Result<Screen, ScreenError> {
        if s.len() < 2 {
            return Err(ScreenError::TooFewIndices(s.len()));
        }
        let mut sorted = s.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let base = match self.point_of(sorted[0]) {
            Some(p) => p.to_vec(),
            None => return Err(ScreenError::NotCoincident(sorted)),
        };
        if sorted
            .iter()
            .any(|&m| self.point_of(m).map(|p| p.to_vec()) != Some(base.clone()))
        {
            return Err(ScreenError::NotCoincident(sorted));
        }

        let contains = |node: &ClassNode| sorted.iter().all(|m| node.members.contains(m));
        let root = self
            .trees
            .iter()
            .find(|t| contains(t))
            .ok_or(ScreenError::NotCoincident(sorted.clone()))?;

        // Chain of nodes containing s, root first.
        let mut chain: Vec<&ClassNode> = vec![root];
        loop {
            let cur = *chain.last().unwrap();
            match cur.children.iter().find(|c| contains(c)) {
                Some(next) => chain.push(next),
                None => break,
            }
        }
        for node in chain.iter().rev() {
            let screen = Screen::normalize(&node.screen_pairs())?;
            match screen.restrict(&sorted)? {
                Restriction::Screen(s) => return Ok(s),
                Restriction::Degenerate => continue,
            }
        }
        Err(ScreenError::Degenerate)
    }
}

impl fmt::Debug for StableClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "StableClass{{n: {}, dim: {}, points: {:?}, trees: {:?}}}",
            self.n, self.dim, self.points, self.trees
        )
    }
}

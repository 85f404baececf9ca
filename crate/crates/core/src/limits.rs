//! Limits of degenerating marked-point families given as truncated arcs.
//!
//! An [`ArcFamily`] is n moving points of a smooth d-dimensional local
//! patch, each coordinate a truncated series in the parameter `t`. As
//! `t -> 0` the points collide in a hierarchy governed by the orders of
//! contact of the arcs; the limit in the compactified configuration
//! space is a stable class whose coincidence trees and screens are read
//! off from arc coefficients. Truncation that cannot decide an order of
//! contact surfaces as an explicit error, never as a guess.

use serde::{Deserialize, Serialize};

use crate::rat::Rat;
use crate::screen::Mark;
use crate::series::TruncatedSeries;
use crate::stable::{ClassNode, StableClass};
use crate::strata::{Nest, NestMember};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LimitError {
    /// Two arcs agree up to the truncation order; their order of contact
    /// is undecidable. Supply more coefficients (order > `trunc`).
    #[error("arcs {i} and {j} coincide up to truncation order {trunc}; supply coefficients past t^{trunc} to separate them")]
    InsufficientPrecision { i: Mark, j: Mark, trunc: usize },
    #[error("family is malformed: {0}")]
    Malformed(String),
}

/// n arcs in a d-dimensional patch with a common truncation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcFamily {
    n: usize,
    dim: usize,
    trunc: usize,
    arcs: Vec<Vec<TruncatedSeries>>,
}

impl ArcFamily {
    pub fn new(arcs: Vec<Vec<TruncatedSeries>>) -> Result<Self, LimitError> {
        if arcs.is_empty() {
            return Err(LimitError::Malformed("no arcs".to_owned()));
        }
        let dim = arcs[0].len();
        if dim == 0 {
            return Err(LimitError::Malformed("zero-dimensional arcs".to_owned()));
        }
        let trunc = arcs[0][0].trunc();
        for (i, arc) in arcs.iter().enumerate() {
            if arc.len() != dim {
                return Err(LimitError::Malformed(format!(
                    "arc {} has {} coordinates, expected {}",
                    i + 1,
                    arc.len(),
                    dim
                )));
            }
            for s in arc {
                if s.trunc() != trunc {
                    return Err(LimitError::Malformed(format!(
                        "arc {} mixes truncation orders {} and {}",
                        i + 1,
                        s.trunc(),
                        trunc
                    )));
                }
            }
        }
        Ok(ArcFamily {
            n: arcs.len(),
            dim,
            trunc,
            arcs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn arc(&self, mark: Mark) -> &[TruncatedSeries] {
        &self.arcs[mark - 1]
    }

    /// Value of arc `mark` at `t = 0`.
    pub fn base_point(&self, mark: Mark) -> Vec<Rat> {
        self.arcs[mark - 1]
            .iter()
            .map(|s| s.constant_term().clone())
            .collect()
    }

    /// Coefficient vector of `t^exp` in arc `mark`.
    fn coeff_vector(&self, mark: Mark, exp: usize) -> Vec<Rat> {
        self.arcs[mark - 1]
            .iter()
            .map(|s| s.coeff(exp).cloned().unwrap_or_else(Rat::zero))
            .collect()
    }

    /// Apply a reparametrization `t -> phi(t)` (phi(0) = 0) to every arc.
    pub fn reparametrize(&self, phi: &TruncatedSeries) -> Result<ArcFamily, LimitError> {
        let arcs = self
            .arcs
            .iter()
            .map(|arc| arc.iter().map(|s| s.compose(phi)).collect())
            .collect();
        ArcFamily::new(arcs)
    }

    /// Extend every arc with further coefficients (refining the truncation).
    /// `extra[mark-1][coord]` lists the coefficients of `t^(K+1), ...`.
    pub fn extend(&self, extra: &[Vec<Vec<Rat>>]) -> Result<ArcFamily, LimitError> {
        let arcs = self
            .arcs
            .iter()
            .enumerate()
            .map(|(i, arc)| {
                arc.iter()
                    .enumerate()
                    .map(|(c, s)| {
                        let mut coeffs = s.coeffs().to_vec();
                        coeffs.extend(extra[i][c].iter().cloned());
                        TruncatedSeries::new(coeffs)
                    })
                    .collect()
            })
            .collect();
        ArcFamily::new(arcs)
    }
}

/// Order of contact of two arcs: the least exponent where they differ,
/// taken as the minimum over coordinates.
pub fn pairwise_valuation(f: &ArcFamily, i: Mark, j: Mark) -> Result<usize, LimitError> {
    assert!(i != j, "order of contact needs two distinct marks");
    let mut best: Option<usize> = None;
    for c in 0..f.dim {
        let diff = &f.arcs[i - 1][c] - &f.arcs[j - 1][c];
        if let Ok(v) = diff.val() {
            best = Some(best.map_or(v, |b| b.min(v)));
        }
    }
    best.ok_or(LimitError::InsufficientPrecision {
        i,
        j,
        trunc: f.trunc,
    })
}

/// A cluster of the collision hierarchy: members collide to order
/// `level`, children collide strictly faster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub members: Vec<Mark>,
    pub level: usize,
    pub children: Vec<Cluster>,
}

impl Cluster {
    fn collect(&self, out: &mut Vec<NestMember>) {
        out.push(NestMember {
            set: self.members.clone(),
            level: Some(self.level),
        });
        for c in &self.children {
            c.collect(out);
        }
    }
}

/// Split `members` into the classes of the relation "valuation > level".
/// The ultrametric inequality makes the relation transitive, which is
/// asserted as we go.
fn split_at_level(
    members: &[Mark],
    level: usize,
    val: &impl Fn(Mark, Mark) -> usize,
) -> Vec<Vec<Mark>> {
    let mut classes: Vec<Vec<Mark>> = Vec::new();
    for &m in members {
        match classes.iter_mut().find(|class| val(class[0], m) > level) {
            Some(class) => class.push(m),
            None => classes.push(vec![m]),
        }
    }
    // Transitivity check: members of one class are pairwise close.
    for class in &classes {
        for a in 0..class.len() {
            for b in (a + 1)..class.len() {
                debug_assert!(val(class[a], class[b]) > level);
            }
        }
    }
    classes
}

fn build_cluster(members: Vec<Mark>, val: &impl Fn(Mark, Mark) -> usize) -> Cluster {
    debug_assert!(members.len() >= 2);
    let mut level = usize::MAX;
    for a in 0..members.len() {
        for b in (a + 1)..members.len() {
            level = level.min(val(members[a], members[b]));
        }
    }
    let children = split_at_level(&members, level, val)
        .into_iter()
        .filter(|class| class.len() >= 2)
        .map(|class| build_cluster(class, val))
        .collect();
    Cluster {
        members,
        level,
        children,
    }
}

/// The collision hierarchy of the family: one cluster tree per base
/// point hit by at least two arcs.
pub fn cluster_hierarchy(f: &ArcFamily) -> Result<Vec<Cluster>, LimitError> {
    // Group by value at t = 0 first.
    let mut groups: Vec<(Vec<Rat>, Vec<Mark>)> = Vec::new();
    for mark in 1..=f.n {
        let p = f.base_point(mark);
        match groups.iter_mut().find(|(q, _)| q == &p) {
            Some((_, g)) => g.push(mark),
            None => groups.push((p, vec![mark])),
        }
    }
    let mut clusters = Vec::new();
    for (_, group) in groups.into_iter().filter(|(_, g)| g.len() >= 2) {
        // All pairwise orders of contact must be decidable.
        let mut table = vec![vec![0usize; f.n + 1]; f.n + 1];
        for a in 0..group.len() {
            for b in (a + 1)..group.len() {
                let v = pairwise_valuation(f, group[a], group[b])?;
                table[group[a]][group[b]] = v;
                table[group[b]][group[a]] = v;
            }
        }
        let val = move |i: Mark, j: Mark| table[i][j];
        clusters.push(build_cluster(group, &val));
    }
    clusters.sort_by_key(|c| c.members.first().copied());
    Ok(clusters)
}

/// The laminar family of collision subsets with their contact levels.
pub fn coincidence_nest(f: &ArcFamily) -> Result<Nest, LimitError> {
    let clusters = cluster_hierarchy(f)?;
    let mut members = Vec::new();
    for c in &clusters {
        c.collect(&mut members);
    }
    Ok(Nest::new(f.n, members))
}

/// The limit stable class of the family as `t -> 0`: base points are the
/// arc values at `t = 0`; each cluster of the collision hierarchy becomes
/// a coincidence-tree node whose screen assigns to each member the vector
/// of `t^level` coefficients of its arc.
pub fn limit_stable_class(f: &ArcFamily) -> Result<StableClass, LimitError> {
    fn node_from(f: &ArcFamily, cluster: &Cluster) -> ClassNode {
        let screen: Vec<Vec<Rat>> = cluster
            .members
            .iter()
            .map(|&m| f.coeff_vector(m, cluster.level))
            .collect();
        let children = cluster.children.iter().map(|c| node_from(f, c)).collect();
        ClassNode::new(cluster.members.clone(), screen, children)
    }

    let clusters = cluster_hierarchy(f)?;
    let points: Vec<Vec<Rat>> = (1..=f.n).map(|m| f.base_point(m)).collect();
    let trees: Vec<ClassNode> = clusters.iter().map(|c| node_from(f, c)).collect();
    let class = StableClass::new(f.n, f.dim, points, trees);
    let class = class
        .normalize()
        .map_err(|e| LimitError::Malformed(format!("non-normalizable limit screen: {}", e)))?;
    debug_assert!(class.is_valid(), "limit produced an invalid stable class");
    Ok(class)
}

/// Independent numeric oracle: evaluate the arcs exactly at a small
/// rational `t0` (0 < |t0| < 1, typically `10^-k`) and cluster the
/// points hierarchically by the exponent of `|t0|` matching the order of
/// magnitude of their exact pairwise differences.
///
/// Shares no code with the valuation path: magnitudes are estimated by
/// comparing `|difference|^2` against powers of `|t0|`, and clusters are
/// formed by breadth-first transitive closure.
pub fn numeric_clustering_oracle(f: &ArcFamily, t0: &Rat) -> Nest {
    assert!(!t0.is_zero(), "the oracle evaluates away from t = 0");
    assert!(t0.abs() < Rat::one(), "magnitude grouping needs |t0| < 1");
    let points: Vec<Vec<Rat>> = (1..=f.n)
        .map(|m| f.arcs[m - 1].iter().map(|s| s.eval(t0)).collect())
        .collect();

    // Magnitude level of |delta|: the integer m >= 0 with
    // |t0|^(m+1/2) < |delta| <= |t0|^(m-1/2), i.e. the nearest integer
    // to log|delta| / log|t0|; zero differences get usize::MAX.
    let t_abs = t0.abs();
    let level = move |a: usize, b: usize| -> usize {
        let mag2 = points[a]
            .iter()
            .zip(&points[b])
            .map(|(x, y)| {
                let d = x - y;
                &d * &d
            })
            .max()
            .expect("dim >= 1");
        if mag2.is_zero() {
            return usize::MAX;
        }
        // advance while |delta|^2 <= |t0|^(2m+1)
        let mut m: usize = 0;
        while mag2 <= t_abs.pow(2 * m as i64 + 1) {
            m += 1;
        }
        m
    };

    // Transitive closure of "level >= threshold" by BFS.
    let closure = |members: &[usize], threshold: usize| -> Vec<Vec<usize>> {
        let mut unassigned: Vec<usize> = members.to_vec();
        let mut classes = Vec::new();
        while let Some(seed) = unassigned.first().copied() {
            let mut class = vec![seed];
            unassigned.retain(|&m| m != seed);
            let mut frontier = vec![seed];
            while let Some(cur) = frontier.pop() {
                let near: Vec<usize> = unassigned
                    .iter()
                    .cloned()
                    .filter(|&m| level(cur, m) >= threshold)
                    .collect();
                for m in near {
                    unassigned.retain(|&x| x != m);
                    class.push(m);
                    frontier.push(m);
                }
            }
            class.sort_unstable();
            classes.push(class);
        }
        classes.sort();
        classes
    };

    fn descend(
        members: &[usize],
        threshold: usize,
        level: &impl Fn(usize, usize) -> usize,
        closure: &impl Fn(&[usize], usize) -> Vec<Vec<usize>>,
        out: &mut Vec<NestMember>,
    ) {
        for class in closure(members, threshold) {
            if class.len() < 2 {
                continue;
            }
            let mut lv = usize::MAX;
            for a in 0..class.len() {
                for b in (a + 1)..class.len() {
                    lv = lv.min(level(class[a], class[b]));
                }
            }
            out.push(NestMember {
                set: class.iter().map(|&m| m + 1).collect(),
                level: Some(lv),
            });
            // Numeric levels need not be ultrametric for small k; only
            // recurse when the class level respects the threshold, so
            // the threshold strictly increases.
            if lv != usize::MAX && lv >= threshold {
                descend(&class, lv + 1, level, closure, out);
            }
        }
    }

    let all: Vec<usize> = (0..f.n).collect();
    let mut members = Vec::new();
    descend(&all, 1, &level, &closure, &mut members);
    Nest::new(f.n, members)
}

// ---------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------

/// Wire form of an arc family:
/// `{"n", "dim", "trunc", "arcs": [[["c0","c1",...], ...], ...]}` with one
/// coefficient array per coordinate per marking.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcFamilyJson {
    pub n: usize,
    pub dim: usize,
    pub trunc: usize,
    pub arcs: Vec<Vec<Vec<Rat>>>,
}

impl ArcFamilyJson {
    pub fn into_family(self) -> Result<ArcFamily, LimitError> {
        if self.arcs.len() != self.n {
            return Err(LimitError::Malformed(format!(
                "{} arcs for n = {}",
                self.arcs.len(),
                self.n
            )));
        }
        let arcs = self
            .arcs
            .into_iter()
            .enumerate()
            .map(|(i, coords)| {
                if coords.len() != self.dim {
                    return Err(LimitError::Malformed(format!(
                        "arc {} has {} coordinates, expected {}",
                        i + 1,
                        coords.len(),
                        self.dim
                    )));
                }
                coords
                    .into_iter()
                    .map(|c| {
                        if c.len() != self.trunc + 1 {
                            Err(LimitError::Malformed(format!(
                                "arc {} stores {} coefficients, expected trunc+1 = {}",
                                i + 1,
                                c.len(),
                                self.trunc + 1
                            )))
                        } else {
                            Ok(TruncatedSeries::new(c))
                        }
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>, _>>()?;
        ArcFamily::new(arcs)
    }

    pub fn from_family(f: &ArcFamily) -> Self {
        ArcFamilyJson {
            n: f.n,
            dim: f.dim,
            trunc: f.trunc,
            arcs: f
                .arcs
                .iter()
                .map(|arc| arc.iter().map(|s| s.coeffs().to_vec()).collect())
                .collect(),
        }
    }
}

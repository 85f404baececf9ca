//! Boundary-stratum combinatorics: laminar families of marking subsets.
//!
//! A nest is a family of subsets of `{1..n}`, each of size ≥ 2, pairwise
//! nested or disjoint. Nests index the boundary strata of the
//! compactified configuration space; the coincidence-tree node sets of
//! any stable class form one.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::screen::Mark;
use crate::stable::StableClass;

/// Largest `n` accepted by [`enumerate_nests`]; the count grows fast
/// (472 nests at n = 5, 78416 at n = 7).
pub const ENUMERATION_BOUND: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrataError {
    #[error("n = {n} exceeds the enumeration bound {bound}")]
    BoundExceeded { n: usize, bound: usize },
    #[error("operation requires ambient dimension 1, got {0}")]
    DimensionError(usize),
}

/// One member of a nest with an optional level (order of contact) that
/// arc-limit computations report for introspection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestMember {
    pub set: Vec<Mark>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
}

/// A laminar family of size-≥2 subsets of `{1..n}`, canonically ordered.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nest {
    pub n: usize,
    pub members: Vec<NestMember>,
}

impl Nest {
    /// Build a nest, sorting members canonically. Does not check laminarity;
    /// see [`is_nest`].
    pub fn new(n: usize, mut members: Vec<NestMember>) -> Self {
        for m in &mut members {
            m.set.sort_unstable();
        }
        members.sort_by(|a, b| a.set.cmp(&b.set));
        Nest { n, members }
    }

    pub fn empty(n: usize) -> Self {
        Nest {
            n,
            members: Vec::new(),
        }
    }

    pub fn sets(&self) -> Vec<Vec<Mark>> {
        self.members.iter().map(|m| m.set.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Forget levels (for comparisons against enumerated nests).
    pub fn without_levels(&self) -> Nest {
        Nest {
            n: self.n,
            members: self
                .members
                .iter()
                .map(|m| NestMember {
                    set: m.set.clone(),
                    level: None,
                })
                .collect(),
        }
    }

    /// Dimension of the boundary stratum indexed by this nest inside the
    /// configuration space of n points on a d-dimensional model: each nest
    /// member cuts the dimension down by exactly one from the open
    /// stratum's `n * d`.
    pub fn stratum_dimension(&self, d: usize) -> usize {
        self.n * d - self.members.len()
    }
}

impl fmt::Debug for Nest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, m) in self.members.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", m.set)?;
            if let Some(level) = m.level {
                write!(f, "@{}", level)?;
            }
        }
        write!(f, "}}")
    }
}

/// Laminarity plus size bounds: every member has size ≥ 2, elements lie
/// in `{1..n}`, and any two members are nested or disjoint.
pub fn is_nest(n: usize, family: &[Vec<Mark>]) -> bool {
    let sets: Vec<BTreeSet<Mark>> = family.iter().map(|s| s.iter().cloned().collect()).collect();
    for (raw, set) in family.iter().zip(&sets) {
        if set.len() != raw.len() || set.len() < 2 {
            return false;
        }
        if set.iter().any(|&m| m == 0 || m > n) {
            return false;
        }
    }
    for i in 0..sets.len() {
        for j in (i + 1)..sets.len() {
            let (a, b) = (&sets[i], &sets[j]);
            if a == b {
                return false;
            }
            let inter = a.intersection(b).count();
            if inter != 0 && inter != a.len() && inter != b.len() {
                return false;
            }
        }
    }
    true
}

/// The nest underlying a stable class: all coincidence-tree node sets.
pub fn nest_of(class: &StableClass) -> Nest {
    let members = class
        .node_sets()
        .into_iter()
        .map(|set| NestMember { set, level: None })
        .collect();
    Nest::new(class.n, members)
}

/// Compare two bitmask subsets as sorted element lists, lexicographically.
fn cmp_set_lex(a: u16, b: u16) -> std::cmp::Ordering {
    let (mut a, mut b) = (a, b);
    loop {
        match (a == 0, b == 0) {
            (true, true) => return std::cmp::Ordering::Equal,
            (true, false) => return std::cmp::Ordering::Less,
            (false, true) => return std::cmp::Ordering::Greater,
            (false, false) => {
                let ea = a.trailing_zeros();
                let eb = b.trailing_zeros();
                match ea.cmp(&eb) {
                    std::cmp::Ordering::Equal => {
                        a &= a - 1;
                        b &= b - 1;
                    }
                    ord => return ord,
                }
            }
        }
    }
}

/// All laminar families over `ground`, as mask vectors. When
/// `exclude_full` is set, families containing `ground` itself are omitted
/// (used for the strict interiors of rooted blocks).
fn gen_families(ground: u16, exclude_full: bool) -> Vec<Vec<u16>> {
    if ground.count_ones() < 2 {
        return vec![Vec::new()];
    }
    let e = ground & ground.wrapping_neg(); // lowest element
    let rest = ground & !e;
    let mut out: Vec<Vec<u16>> = gen_families(rest, false);

    // Blocks containing e: e joined with any nonempty submask of rest.
    let mut sub = rest;
    loop {
        // iterate nonempty submasks of rest
        if sub != 0 {
            let block = e | sub;
            if !(exclude_full && block == ground) {
                let mut rooted: Vec<Vec<u16>> = Vec::new();
                for mut inner in gen_families(block, true) {
                    inner.push(block);
                    rooted.push(inner);
                }
                let outside = gen_families(ground & !block, false);
                for r in &rooted {
                    for o in &outside {
                        let mut fam = r.clone();
                        fam.extend_from_slice(o);
                        out.push(fam);
                    }
                }
            }
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rest;
    }
    out
}

/// Deterministic streaming enumeration of all nests on `{1..n}`, ordered
/// by member count, then lexicographically by sorted member lists.
#[derive(Debug)]
pub struct NestEnumeration {
    n: usize,
    families: std::vec::IntoIter<Vec<u16>>,
}

impl NestEnumeration {
    /// Number of nests left to yield.
    pub fn remaining(&self) -> usize {
        self.families.len()
    }
}

impl Iterator for NestEnumeration {
    type Item = Nest;

    fn next(&mut self) -> Option<Nest> {
        let masks = self.families.next()?;
        let members = masks
            .iter()
            .map(|&mask| {
                let set: Vec<Mark> = (0..self.n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| i + 1)
                    .collect();
                NestMember { set, level: None }
            })
            .collect();
        Some(Nest { n: self.n, members })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.families.len(), Some(self.families.len()))
    }
}

/// Enumerate every nest on `{1..n}` in canonical order.
pub fn enumerate_nests(n: usize) -> Result<NestEnumeration, StrataError> {
    enumerate_nests_bounded(n, ENUMERATION_BOUND)
}

pub fn enumerate_nests_bounded(n: usize, bound: usize) -> Result<NestEnumeration, StrataError> {
    if n > bound {
        return Err(StrataError::BoundExceeded { n, bound });
    }
    let ground: u16 = if n == 0 { 0 } else { (1u16 << n) - 1 };
    let mut families = gen_families(ground, false);
    for fam in &mut families {
        fam.sort_by(|&a, &b| cmp_set_lex(a, b));
    }
    families.sort_by(|a, b| {
        a.len().cmp(&b.len()).then_with(|| {
            for (x, y) in a.iter().zip(b.iter()) {
                match cmp_set_lex(*x, *y) {
                    std::cmp::Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            std::cmp::Ordering::Equal
        })
    });
    Ok(NestEnumeration {
        n,
        families: families.into_iter(),
    })
}

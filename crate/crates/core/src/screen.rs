//! Screens: tangent-vector data recording how coincident marked points
//! separate infinitesimally.
//!
//! A screen on an index set `S` (|S| ≥ 2) assigns to each index a vector
//! in the tangent space of the coincidence point, not all equal, taken
//! modulo simultaneous rescaling by λ ≠ 0 and translation by a common
//! vector v. We store the unique canonical representative: the value at
//! the least index is the zero vector, and the first nonzero coordinate
//! of the value at the least index that carries a nonzero vector is 1.

use std::fmt;

use crate::rat::Rat;

/// Marking label, 1-based.
pub type Mark = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScreenError {
    /// All vectors equal: the data does not separate any pair of points.
    #[error("degenerate screen: all vectors are equal")]
    Degenerate,
    #[error("a screen needs at least two indices, got {0}")]
    TooFewIndices(usize),
    #[error("vector for index {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: Mark,
        expected: usize,
        found: usize,
    },
    #[error("duplicate index {0}")]
    DuplicateIndex(Mark),
    #[error("index sets differ between the two screens")]
    IndexSetMismatch,
    #[error("markings {0:?} do not share a base point")]
    NotCoincident(Vec<Mark>),
}

/// An affine-equivalence witness: `lambda * a_i + shift = b_i` for all i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub lambda: Rat,
    pub shift: Vec<Rat>,
}

/// Outcome of restricting a screen to a subset of its indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Restriction {
    Screen(Screen),
    /// The restricted values are constant, so no screen is induced.
    Degenerate,
}

/// A screen in canonical form.
#[derive(Clone, PartialEq, Eq)]
pub struct Screen {
    indices: Vec<Mark>, // sorted ascending
    dim: usize,
    values: Vec<Vec<Rat>>, // aligned with `indices`, canonical
}

impl Screen {
    /// Normalize raw screen data to its canonical representative.
    ///
    /// `raw` pairs each index with its vector; order is irrelevant.
    pub fn normalize(raw: &[(Mark, Vec<Rat>)]) -> Result<Screen, ScreenError> {
        if raw.len() < 2 {
            return Err(ScreenError::TooFewIndices(raw.len()));
        }
        let dim = raw[0].1.len();
        let mut pairs: Vec<(Mark, Vec<Rat>)> = raw.to_vec();
        pairs.sort_by_key(|(i, _)| *i);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(ScreenError::DuplicateIndex(w[0].0));
            }
        }
        for (i, v) in &pairs {
            if v.len() != dim {
                return Err(ScreenError::DimensionMismatch {
                    index: *i,
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        let indices: Vec<Mark> = pairs.iter().map(|(i, _)| *i).collect();
        let values: Vec<Vec<Rat>> = pairs.into_iter().map(|(_, v)| v).collect();
        let values = canonicalize(&values).ok_or(ScreenError::Degenerate)?;
        Ok(Screen {
            indices,
            dim,
            values,
        })
    }

    /// Canonicalize vectors indexed positionally (index = position + 1).
    pub fn normalize_tuple(values: &[Vec<Rat>]) -> Result<Screen, ScreenError> {
        let raw: Vec<(Mark, Vec<Rat>)> = values
            .iter()
            .enumerate()
            .map(|(i, v)| (i + 1, v.clone()))
            .collect();
        Screen::normalize(&raw)
    }

    pub fn indices(&self) -> &[Mark] {
        &self.indices
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Canonical value rows, aligned with `indices()`.
    pub fn values(&self) -> &[Vec<Rat>] {
        &self.values
    }

    pub fn value_of(&self, mark: Mark) -> Option<&[Rat]> {
        let pos = self.indices.iter().position(|&i| i == mark)?;
        Some(&self.values[pos])
    }

    /// Restrict to a subset of the indices (|subset| ≥ 2 required).
    /// Constant restrictions are a legitimate `Degenerate` outcome.
    pub fn restrict(&self, subset: &[Mark]) -> Result<Restriction, ScreenError> {
        if subset.len() < 2 {
            return Err(ScreenError::TooFewIndices(subset.len()));
        }
        let mut raw = Vec::with_capacity(subset.len());
        for &m in subset {
            match self.value_of(m) {
                Some(v) => raw.push((m, v.to_vec())),
                None => return Err(ScreenError::NotCoincident(vec![m])),
            }
        }
        match Screen::normalize(&raw) {
            Ok(s) => Ok(Restriction::Screen(s)),
            Err(ScreenError::Degenerate) => Ok(Restriction::Degenerate),
            Err(e) => Err(e),
        }
    }

    /// Group indices by equal value rows, in order of first appearance.
    pub fn value_fibers(&self) -> Vec<Vec<Mark>> {
        let mut fibers: Vec<(usize, Vec<Mark>)> = Vec::new();
        for (pos, val) in self.values.iter().enumerate() {
            match fibers.iter_mut().find(|(p, _)| &self.values[*p] == val) {
                Some((_, members)) => members.push(self.indices[pos]),
                None => fibers.push((pos, vec![self.indices[pos]])),
            }
        }
        fibers.into_iter().map(|(_, members)| members).collect()
    }
}

impl fmt::Debug for Screen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Screen{{")?;
        for (k, (i, v)) in self.indices.iter().zip(&self.values).enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {:?}", i, v)?;
        }
        write!(f, "}}")
    }
}

/// Canonical form of a value tuple: translate so the first row is zero,
/// then scale so the first nonzero coordinate of the first nonzero row
/// is 1. Returns `None` when all rows are equal.
fn canonicalize(values: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let base = &values[0];
    let mut shifted: Vec<Vec<Rat>> = values
        .iter()
        .map(|row| row.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let pivot = shifted
        .iter()
        .flat_map(|row| row.iter())
        .find(|c| !c.is_zero())?
        .clone();
    let scale = pivot.recip();
    for row in &mut shifted {
        for c in row.iter_mut() {
            *c *= &scale;
        }
    }
    Some(shifted)
}

fn check_comparable(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Result<usize, ScreenError> {
    if a.len() != b.len() {
        return Err(ScreenError::IndexSetMismatch);
    }
    if a.len() < 2 {
        return Err(ScreenError::TooFewIndices(a.len()));
    }
    let dim = a[0].len();
    for (i, row) in a.iter().chain(b.iter()).enumerate() {
        if row.len() != dim {
            return Err(ScreenError::DimensionMismatch {
                index: (i % a.len()) + 1,
                expected: dim,
                found: row.len(),
            });
        }
    }
    Ok(dim)
}

/// Solve `lambda * a_i + shift = b_i` directly from a separating pair of
/// indices, then verify the solution on every index.
pub fn equivalence_witness(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Result<Option<Witness>, ScreenError> {
    let dim = check_comparable(a, b)?;
    // A separating pair for a: any k with a_k != a_0 after the first
    // differing index; constant data is degenerate.
    let k = a
        .iter()
        .position(|row| row != &a[0])
        .ok_or(ScreenError::Degenerate)?;
    if b.iter().all(|row| row == &b[0]) {
        return Err(ScreenError::Degenerate);
    }
    // lambda * (a_k - a_0) = b_k - b_0, coordinate by coordinate.
    let mut lambda: Option<Rat> = None;
    for c in 0..dim {
        let da = &a[k][c] - &a[0][c];
        let db = &b[k][c] - &b[0][c];
        if da.is_zero() {
            if !db.is_zero() {
                return Ok(None);
            }
        } else {
            let l = &db / &da;
            match &lambda {
                Some(prev) if prev != &l => return Ok(None),
                _ => lambda = Some(l),
            }
        }
    }
    let lambda = match lambda {
        Some(l) if !l.is_zero() => l,
        _ => return Ok(None),
    };
    let shift: Vec<Rat> = (0..dim).map(|c| &b[0][c] - &(&lambda * &a[0][c])).collect();
    for (ra, rb) in a.iter().zip(b) {
        for c in 0..dim {
            if (&(&lambda * &ra[c]) + &shift[c]) != rb[c] {
                return Ok(None);
            }
        }
    }
    Ok(Some(Witness { lambda, shift }))
}

/// Whether two raw value tuples define the same screen.
///
/// Computed twice, by canonical-form equality and by the direct affine
/// solve; the two routes must agree, and the function enforces that.
pub fn screens_equivalent(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Result<bool, ScreenError> {
    check_comparable(a, b)?;
    let ca = canonicalize(a).ok_or(ScreenError::Degenerate)?;
    let by_canonical = match canonicalize(b) {
        Some(cb) => ca == cb,
        None => return Err(ScreenError::Degenerate),
    };
    let by_solve = equivalence_witness(a, b)?.is_some();
    assert_eq!(
        by_canonical, by_solve,
        "canonical-form and affine-solve equivalence disagree"
    );
    Ok(by_canonical)
}

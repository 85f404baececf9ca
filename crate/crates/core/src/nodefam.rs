//! Marked points colliding at a smoothed node.
//!
//! The local model is the family `xy = t^r` over the disk: the fiber at
//! `t = 0` has an ordinary node at the origin and nearby fibers are
//! smooth. Sections through the node leave tangent data behind in the
//! limit. For `r = 2` the blow-up of the total space at the node meets
//! the fiber in the torus `ab = 1`; a section's trace `(a_i, a_i^{-1})`
//! on that torus determines the limiting stable class, which is `theta`
//! of the trace tuple. The fiber of `theta` over its image is `{a, -a}`
//! once n ≥ 3, and for n = 2 is cut out by the product `a_1 * a_2` — both
//! facts are checked here against the definitional screen equivalence on
//! every call.

use serde::{Deserialize, Serialize};

use crate::limits::{self, ArcFamily, LimitError};
use crate::rat::Rat;
use crate::screen::{self, Witness};
use crate::series::{InsufficientPrecision, TruncatedSeries};
use crate::stable::{ClassNode, StableClass};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NodefamError {
    #[error("section {index} does not pass through the node at t = 0")]
    NotAtNode { index: usize },
    #[error("section {index} misses the exceptional torus (leading x or y coefficient is zero)")]
    NotThroughTorus { index: usize },
    #[error("sections {i} and {j} trace the exceptional curve at the same point; analyze them with node_limit instead")]
    CollidingTrace { i: usize, j: usize },
    #[error("section {index} does not lie on the family xy = t^r")]
    NotOnFamily { index: usize },
    #[error("invalid theta input: {0}")]
    Domain(String),
    #[error(transparent)]
    Precision(#[from] InsufficientPrecision),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

/// A section (x(t), y(t)) of the family `xy = t^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSection {
    pub x: TruncatedSeries,
    pub y: TruncatedSeries,
    pub r: usize,
}

impl NodeSection {
    pub fn new(x: TruncatedSeries, y: TruncatedSeries, r: usize) -> Self {
        assert!(r >= 1);
        NodeSection { x, y, r }
    }
}

/// Does `x * y - t^r` vanish as far as the truncation can see?
///
/// A known nonzero coefficient decides `false`; all-zero up to an order
/// below `r` cannot see the `t^r` term and is an error.
pub fn check_on_family(s: &NodeSection) -> Result<bool, InsufficientPrecision> {
    let prod = &s.x * &s.y;
    let k = prod.trunc();
    if k < s.r {
        return Err(InsufficientPrecision { trunc: k });
    }
    let tr = TruncatedSeries::monomial(Rat::one(), s.r, k);
    Ok((&prod - &tr).is_known_zero())
}

/// Base change `t -> t^r` applied to a section of `xy = t`, landing on
/// `xy = t^r`.
pub fn base_change_section(x: &TruncatedSeries, y: &TruncatedSeries, r: usize) -> NodeSection {
    NodeSection::new(x.substitute_power(r), y.substitute_power(r), r)
}

/// Where sections meet the exceptional torus `ab = 1` of the blown-up
/// `xy = t^2`: the pairs of leading coefficients `(a_i, b_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusTrace {
    pub pairs: Vec<(Rat, Rat)>,
}

impl TorusTrace {
    pub fn a_tuple(&self) -> Vec<Rat> {
        self.pairs.iter().map(|(a, _)| a.clone()).collect()
    }
}

/// Trace the strict transforms of `r = 2` sections on the exceptional
/// torus: `a_i` and `b_i` are the `t` coefficients of `x_i` and `y_i`.
/// All sections must pass through the node with nonzero, pairwise
/// distinct `a_i` (otherwise route through [`node_limit`]).
pub fn exceptional_trace(sections: &[NodeSection]) -> Result<TorusTrace, NodefamError> {
    let mut pairs = Vec::with_capacity(sections.len());
    for (idx, s) in sections.iter().enumerate() {
        let index = idx + 1;
        assert_eq!(s.r, 2, "the closed-form trace is the r = 2 analysis");
        if !s.x.constant_term().is_zero() || !s.y.constant_term().is_zero() {
            return Err(NodefamError::NotAtNode { index });
        }
        let a = s.x.coeff(1).cloned().unwrap_or_else(Rat::zero);
        let b = s.y.coeff(1).cloned().unwrap_or_else(Rat::zero);
        if a.is_zero() || b.is_zero() {
            return Err(NodefamError::NotThroughTorus { index });
        }
        // On xy = t^2 the leading coefficients multiply to 1.
        if !(&a * &b).is_one() {
            return Err(NodefamError::NotOnFamily { index });
        }
        pairs.push((a, b));
    }
    for i in 0..pairs.len() {
        for j in (i + 1)..pairs.len() {
            if pairs[i].0 == pairs[j].0 {
                return Err(NodefamError::CollidingTrace { i: i + 1, j: j + 1 });
            }
        }
    }
    Ok(TorusTrace { pairs })
}

fn check_theta_domain(a: &[Rat]) -> Result<(), NodefamError> {
    if a.len() < 2 {
        return Err(NodefamError::Domain(format!(
            "need at least two markings, got {}",
            a.len()
        )));
    }
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            return Err(NodefamError::Domain(format!("a_{} = 0", i + 1)));
        }
        for (j, aj) in a.iter().enumerate().skip(i + 1) {
            if ai == aj {
                return Err(NodefamError::Domain(format!(
                    "a_{} = a_{} = {}",
                    i + 1,
                    j + 1,
                    aj
                )));
            }
        }
    }
    Ok(())
}

/// Screen vectors `(a_i, a_i^{-1})` in the (d/dx, d/dy) basis.
fn theta_vectors(a: &[Rat]) -> Vec<Vec<Rat>> {
    a.iter().map(|ai| vec![ai.clone(), ai.recip()]).collect()
}

/// The stable class at the node determined by the tangent vectors
/// `(a_i, a_i^{-1})`: all n markings at the origin of the (x, y) patch,
/// one root node carrying the normalized screen.
pub fn theta(a: &[Rat]) -> Result<StableClass, NodefamError> {
    check_theta_domain(a)?;
    let n = a.len();
    let screen = screen::Screen::normalize_tuple(&theta_vectors(a))
        .expect("distinct a_i give a non-constant screen");
    let points = vec![vec![Rat::zero(), Rat::zero()]; n];
    let root = ClassNode::new((1..=n).collect(), screen.values().to_vec(), vec![]);
    let class = StableClass::new(n, 2, points, vec![root]);
    debug_assert!(class.is_valid());
    Ok(class)
}

/// Do two trace tuples define the same stable class?
///
/// Closed form: for n ≥ 3 exactly when `b = a` or `b = -a`; for n = 2
/// exactly when `a_1 a_2 = b_1 b_2`. The closed form is recomputed
/// against the definitional screen equivalence on every call and the two
/// must agree.
pub fn theta_fiber_equal(a: &[Rat], b: &[Rat]) -> Result<bool, NodefamError> {
    check_theta_domain(a)?;
    check_theta_domain(b)?;
    if a.len() != b.len() {
        return Err(NodefamError::Domain(format!(
            "tuple lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let criterion = if a.len() == 2 {
        &a[0] * &a[1] == &b[0] * &b[1]
    } else {
        let neg: Vec<Rat> = a.iter().map(|x| -x).collect();
        a == b || neg.as_slice() == b
    };
    let definitional = screen::screens_equivalent(&theta_vectors(a), &theta_vectors(b))
        .expect("theta domain data is non-degenerate");
    assert_eq!(
        criterion, definitional,
        "theta fiber criterion disagrees with screen equivalence on {:?} vs {:?}",
        a, b
    );
    Ok(criterion)
}

/// The affine witness `(lambda, v1, v2)` carrying the screen of `a` to
/// the screen of `b`, when the classes are equal.
pub fn theta_fiber_witness(a: &[Rat], b: &[Rat]) -> Result<Option<Witness>, NodefamError> {
    check_theta_domain(a)?;
    check_theta_domain(b)?;
    if a.len() != b.len() {
        return Err(NodefamError::Domain(format!(
            "tuple lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(
        screen::equivalence_witness(&theta_vectors(a), &theta_vectors(b))
            .expect("theta domain data is non-degenerate"),
    )
}

/// A point of the projective line of normal directions at the node,
/// written as `(1 : s)` or `(0 : 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DirectionP1 {
    Affine(Rat),
    Infinity,
}

impl std::fmt::Display for DirectionP1 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DirectionP1::Affine(s) => write!(f, "(1 : {})", s),
            DirectionP1::Infinity => write!(f, "(0 : 1)"),
        }
    }
}

/// For n = 2 the stable class is the direction of the difference vector
/// `(a_1 - a_2, a_1^{-1} - a_2^{-1})`, which normalizes to
/// `(1 : -1/(a_1 a_2))`.
pub fn w2_direction(a: &[Rat]) -> Result<DirectionP1, NodefamError> {
    check_theta_domain(a)?;
    if a.len() != 2 {
        return Err(NodefamError::Domain(format!(
            "the direction line is the n = 2 case, got n = {}",
            a.len()
        )));
    }
    let dx = &a[0] - &a[1];
    let dy = &a[0].recip() - &a[1].recip();
    debug_assert!(!dx.is_zero());
    Ok(DirectionP1::Affine(&dy / &dx))
}

/// A trace pair hitting a prescribed direction `(1 : s)`, s ≠ 0: solves
/// `a_1 a_2 = -1/s` with distinct nonzero entries.
pub fn w2_direction_preimage(s: &Rat) -> Result<(Rat, Rat), NodefamError> {
    if s.is_zero() {
        return Err(NodefamError::Domain(
            "direction (1 : 0) is not in the affine torus image".to_owned(),
        ));
    }
    let product = -s.recip();
    for k in 1.. {
        let a1 = Rat::from_int(k);
        let a2 = &product / &a1;
        if a2 != a1 && !a2.is_zero() {
            return Ok((a1, a2));
        }
    }
    unreachable!()
}

/// Limit stable class of sections through the node, computed by the
/// generic arc-limit algorithm on the (x, y) patch. When `r = 2` and the
/// exceptional trace is defined with distinct `a_i`, the result must
/// equal `theta` of the trace — asserted.
pub fn node_limit(sections: &[NodeSection]) -> Result<StableClass, NodefamError> {
    if sections.is_empty() {
        return Err(NodefamError::Domain("no sections".to_owned()));
    }
    let r = sections[0].r;
    for (idx, s) in sections.iter().enumerate() {
        let index = idx + 1;
        if s.r != r {
            return Err(NodefamError::Domain(format!(
                "section {} lives on xy = t^{}, expected t^{}",
                index, s.r, r
            )));
        }
        if !check_on_family(s)? {
            return Err(NodefamError::NotOnFamily { index });
        }
        if !s.x.constant_term().is_zero() || !s.y.constant_term().is_zero() {
            return Err(NodefamError::NotAtNode { index });
        }
    }
    let trunc = sections
        .iter()
        .flat_map(|s| [s.x.trunc(), s.y.trunc()])
        .min()
        .unwrap();
    let arcs: Vec<Vec<TruncatedSeries>> = sections
        .iter()
        .map(|s| vec![s.x.truncate_to(trunc), s.y.truncate_to(trunc)])
        .collect();
    let family = ArcFamily::new(arcs)?;
    let class = limits::limit_stable_class(&family)?;

    if r == 2 && sections.len() >= 2 {
        if let Ok(trace) = exceptional_trace(sections) {
            let via_theta = theta(&trace.a_tuple())?;
            assert_eq!(
                class, via_theta,
                "node limit disagrees with theta of the exceptional trace"
            );
        }
    }
    Ok(class)
}

/// Statistics from pushing sampled trace tuples through `theta`.
#[derive(Debug, Clone)]
pub struct WnSample {
    pub n: usize,
    pub seed: u64,
    pub tuples: Vec<Vec<Rat>>,
    /// Pairs planted to be equivalent: negations for n ≥ 3, swaps
    /// (equal product) for n = 2.
    pub planted_pairs: Vec<(usize, usize)>,
    /// All index pairs found equivalent under `theta_fiber_equal`.
    pub equivalent_pairs: Vec<(usize, usize)>,
    pub classes: Vec<StableClass>,
}

/// Deterministically sample `count` trace tuples on a rational grid
/// (numerators -20..=20, denominators 1..=6), plant an equivalent partner
/// after every fourth tuple, and report which pairs `theta` identifies.
/// For n ≥ 3 the expected answer is exactly the planted pairs: `theta` is
/// 2-to-1, identifying only `a` with `-a`.
pub fn wn_sample(n: usize, count: usize, seed: u64) -> Result<WnSample, NodefamError> {
    if n < 2 {
        return Err(NodefamError::Domain(format!("need n >= 2, got {}", n)));
    }
    let mut rng = crate::rng::SplitMix64::new(seed);
    let mut tuples: Vec<Vec<Rat>> = Vec::new();
    let mut planted_pairs = Vec::new();

    // Canonical key under the identifications theta makes, used to
    // reject accidental coincidences so that planted pairs are the only
    // equivalent ones by construction.
    let key = |tuple: &[Rat]| -> Vec<Rat> {
        if n == 2 {
            vec![&tuple[0] * &tuple[1]]
        } else {
            let neg: Vec<Rat> = tuple.iter().map(|x| -x).collect();
            if neg < tuple.to_vec() {
                neg
            } else {
                tuple.to_vec()
            }
        }
    };
    let mut seen: Vec<Vec<Rat>> = Vec::new();

    while tuples.len() < count {
        let fresh = loop {
            let cand: Vec<Rat> = (0..n)
                .map(|_| {
                    let num = rng.next_nonzero(20);
                    let den = rng.next_in(1, 6);
                    Rat::new(num, den)
                })
                .collect();
            if check_theta_domain(&cand).is_err() {
                continue;
            }
            let k = key(&cand);
            if !seen.contains(&k) {
                seen.push(k);
                break cand;
            }
        };
        tuples.push(fresh);

        // Every fourth slot, plant a partner equivalent to the previous draw.
        if tuples.len().is_multiple_of(4) && tuples.len() < count {
            let prev = tuples.last().unwrap().clone();
            let partner: Vec<Rat> = if n == 2 {
                vec![prev[1].clone(), prev[0].clone()]
            } else {
                prev.iter().map(|x| -x).collect()
            };
            if check_theta_domain(&partner).is_ok() && partner != prev {
                planted_pairs.push((tuples.len() - 1, tuples.len()));
                tuples.push(partner);
            }
        }
    }

    let mut equivalent_pairs = Vec::new();
    for i in 0..tuples.len() {
        for j in (i + 1)..tuples.len() {
            if theta_fiber_equal(&tuples[i], &tuples[j])? {
                equivalent_pairs.push((i, j));
            }
        }
    }
    let classes = tuples
        .iter()
        .map(|t| theta(t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WnSample {
        n,
        seed,
        tuples,
        planted_pairs,
        equivalent_pairs,
        classes,
    })
}

// ---------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------

/// Wire form of a section family: `{"r", "sections": [[x, y], ...]}` with
/// each series a coefficient array (truncation = length - 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectionsJson {
    pub r: usize,
    pub sections: Vec<[Vec<Rat>; 2]>,
}

impl SectionsJson {
    pub fn into_sections(self) -> Result<Vec<NodeSection>, NodefamError> {
        if self.r < 1 {
            return Err(NodefamError::Domain("r must be >= 1".to_owned()));
        }
        self.sections
            .into_iter()
            .enumerate()
            .map(|(i, [x, y])| {
                if x.is_empty() || y.is_empty() {
                    return Err(NodefamError::Domain(format!(
                        "section {} has an empty coefficient array",
                        i + 1
                    )));
                }
                Ok(NodeSection::new(
                    TruncatedSeries::new(x),
                    TruncatedSeries::new(y),
                    self.r,
                ))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ri(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn series(coeffs: &[i64], trunc: usize) -> TruncatedSeries {
        let mut v: Vec<Rat> = coeffs.iter().map(|&c| Rat::from_int(c)).collect();
        v.resize(trunc + 1, Rat::zero());
        TruncatedSeries::new(v)
    }

    fn section(x: &[i64], y: &[i64], r: usize, trunc: usize) -> NodeSection {
        NodeSection::new(series(x, trunc), series(y, trunc), r)
    }

    #[test]
    fn check_on_family_examples() {
        assert_eq!(check_on_family(&section(&[0, 1], &[0, 1], 2, 3)), Ok(true));
        assert_eq!(check_on_family(&section(&[0, 1], &[0, 2], 2, 3)), Ok(false));
        let s = NodeSection::new(
            series(&[0, 2], 3),
            TruncatedSeries::new(vec![Rat::zero(), Rat::new(1, 2), Rat::zero(), Rat::zero()]),
            2,
        );
        assert_eq!(check_on_family(&s), Ok(true));
    }

    #[test]
    fn check_on_family_insufficient_precision() {
        // x and y known only at t^0: the product order stops short of t^2
        let s = section(&[0], &[0], 2, 0);
        assert!(check_on_family(&s).is_err());
        // valuation-adjusted products can see past the raw truncation:
        // x = y = t at K=1 decides xy = t^2
        assert_eq!(check_on_family(&section(&[0, 1], &[0, 1], 2, 1)), Ok(true));
    }

    #[test]
    fn base_change_examples() {
        let s = base_change_section(&series(&[0, 1], 1), &series(&[1], 0), 2);
        assert_eq!(s.x, series(&[0, 0, 1], 2));
        assert_eq!(s.y, series(&[1], 0));

        let s = base_change_section(&series(&[1], 0), &series(&[0, 1], 1), 3);
        assert_eq!(s.y, series(&[0, 0, 0, 1], 3));
    }

    #[test]
    fn base_change_of_unit_section_stays_on_family() {
        // x = t/(1+t), y = 1+t on xy = t; substitute t -> t^2
        let one_plus_t = series(&[1, 1], 4);
        let x = &series(&[0, 1], 4) * &one_plus_t.invert_unit();
        let s = base_change_section(&x, &one_plus_t, 2);
        assert_eq!(s.r, 2);
        assert_eq!(
            check_on_family(&NodeSection::new(s.x.clone(), s.y.clone(), 2)),
            Ok(true)
        );
        // y(t^2) = 1 + t^2, x(t^2) = t^2 / (1 + t^2)
        assert_eq!(s.y, series(&[1, 0, 1, 0, 0, 0, 0, 0, 0], 8));
        let one_plus_t2 = series(&[1, 0, 1], 8);
        let expected_x = (&series(&[0, 0, 1], 8) * &one_plus_t2.invert_unit()).truncate_to(8);
        assert_eq!(s.x, expected_x);
    }

    #[test]
    fn exceptional_trace_reads_leading_coefficients() {
        let secs = vec![
            section(&[0, 1], &[0, 1], 2, 3),
            NodeSection::new(
                series(&[0, 2], 3),
                TruncatedSeries::new(vec![Rat::zero(), Rat::new(1, 2), Rat::zero(), Rat::zero()]),
                2,
            ),
        ];
        let trace = exceptional_trace(&secs).unwrap();
        assert_eq!(trace.pairs, vec![(ri(1), ri(1)), (ri(2), Rat::new(1, 2))]);
        for (a, b) in &trace.pairs {
            assert!((a * b).is_one());
        }
    }

    #[test]
    fn trace_away_from_node_is_rejected() {
        // (t^2, 1) passes through (0, 1), a smooth point of the fiber
        let s = NodeSection::new(series(&[0, 0, 1], 3), series(&[1], 3), 2);
        assert_eq!(
            exceptional_trace(&[s]),
            Err(NodefamError::NotAtNode { index: 1 })
        );
    }

    #[test]
    fn colliding_traces_are_rejected() {
        let secs = vec![
            section(&[0, 1], &[0, 1], 2, 4),
            // x = t + t^2, y = t^2/x = t - t^2 + t^3 - t^4
            NodeSection::new(series(&[0, 1, 1], 4), series(&[0, 1, -1, 1, -1], 4), 2),
        ];
        assert_eq!(
            exceptional_trace(&secs),
            Err(NodefamError::CollidingTrace { i: 1, j: 2 })
        );
    }

    #[test]
    fn theta_normalizes_tangent_pairs() {
        let class = theta(&[ri(1), ri(2)]).unwrap();
        assert_eq!(class.n, 2);
        assert_eq!(class.dim, 2);
        assert_eq!(class.trees.len(), 1);
        assert_eq!(
            class.trees[0].screen,
            vec![
                vec![Rat::zero(), Rat::zero()],
                vec![Rat::one(), Rat::new(-1, 2)]
            ]
        );

        let class = theta(&[ri(1), ri(-1)]).unwrap();
        assert_eq!(
            class.trees[0].screen,
            vec![vec![Rat::zero(), Rat::zero()], vec![Rat::one(), Rat::one()]]
        );
    }

    #[test]
    fn theta_rejects_diagonal_and_zero() {
        assert!(theta(&[ri(1), ri(1)]).is_err());
        assert!(theta(&[ri(0), ri(1)]).is_err());
    }

    #[test]
    fn fiber_contains_negation_for_n_three() {
        let a = [ri(1), ri(2), ri(3)];
        let b = [ri(-1), ri(-2), ri(-3)];
        assert!(theta_fiber_equal(&a, &b).unwrap());
        let w = theta_fiber_witness(&a, &b).unwrap().unwrap();
        assert_eq!(w.lambda, ri(-1));
        assert_eq!(w.shift, vec![Rat::zero(), Rat::zero()]);
    }

    #[test]
    fn fiber_rejects_product_mismatch() {
        let a = [ri(1), ri(2), ri(3)];
        let b = [ri(1), ri(2), ri(4)];
        assert!(!theta_fiber_equal(&a, &b).unwrap());
    }

    #[test]
    fn n_two_fiber_is_cut_by_the_product() {
        // b = (2, 1) is neither a nor -a yet equivalent: a1 a2 = b1 b2 = 2
        let a = [ri(1), ri(2)];
        let b = [ri(2), ri(1)];
        assert!(theta_fiber_equal(&a, &b).unwrap());
        let w = theta_fiber_witness(&a, &b).unwrap().unwrap();
        assert_eq!(w.lambda, ri(-1));
        assert_eq!(w.shift, vec![ri(3), Rat::new(3, 2)]);
    }

    #[test]
    fn w2_direction_examples() {
        assert_eq!(
            w2_direction(&[ri(1), ri(2)]).unwrap(),
            DirectionP1::Affine(Rat::new(-1, 2))
        );
        assert_eq!(
            w2_direction(&[ri(1), ri(-1)]).unwrap(),
            DirectionP1::Affine(ri(1))
        );
    }

    #[test]
    fn w2_preimage_hits_prescribed_direction() {
        let s = Rat::new(-1, 6);
        let (a1, a2) = w2_direction_preimage(&s).unwrap();
        assert_eq!(&a1 * &a2, ri(6));
        assert_eq!(w2_direction(&[a1, a2]).unwrap(), DirectionP1::Affine(s));
    }

    #[test]
    fn node_limit_matches_theta_on_clean_traces() {
        let secs = vec![
            section(&[0, 1], &[0, 1], 2, 4),
            NodeSection::new(
                series(&[0, 2], 4),
                TruncatedSeries::new(vec![
                    Rat::zero(),
                    Rat::new(1, 2),
                    Rat::zero(),
                    Rat::zero(),
                    Rat::zero(),
                ]),
                2,
            ),
        ];
        let class = node_limit(&secs).unwrap();
        assert_eq!(class, theta(&[ri(1), ri(2)]).unwrap());
    }

    #[test]
    fn node_limit_handles_colliding_traces_via_arcs() {
        // both sections trace a = 1; the deeper contact shows up at level 2
        let secs = vec![
            section(&[0, 1], &[0, 1], 2, 4),
            NodeSection::new(series(&[0, 1, 1], 4), series(&[0, 1, -1, 1, -1], 4), 2),
        ];
        let class = node_limit(&secs).unwrap();
        assert_eq!(class.trees.len(), 1);
        let root = &class.trees[0];
        assert_eq!(root.members, vec![1, 2]);
        assert_eq!(
            root.screen,
            vec![vec![Rat::zero(), Rat::zero()], vec![Rat::one(), ri(-1)]]
        );
    }

    #[test]
    fn node_limit_single_section() {
        let class = node_limit(&[section(&[0, 1], &[0, 1], 2, 3)]).unwrap();
        assert_eq!(class.n, 1);
        assert!(class.trees.is_empty());
        assert_eq!(class.points, vec![vec![Rat::zero(), Rat::zero()]]);
    }

    #[test]
    fn node_limit_rejects_off_family_sections() {
        let secs = vec![section(&[0, 1], &[0, 3], 2, 3)];
        assert_eq!(
            node_limit(&secs),
            Err(NodefamError::NotOnFamily { index: 1 })
        );
    }

    #[test]
    fn wn_sample_finds_only_planted_pairs_for_n_three() {
        let sample = wn_sample(3, 40, 0xFEED).unwrap();
        assert_eq!(sample.tuples.len(), 40);
        assert!(!sample.planted_pairs.is_empty());
        assert_eq!(sample.equivalent_pairs, sample.planted_pairs);
        assert_eq!(sample.classes.len(), 40);
    }

    #[test]
    fn wn_sample_flags_shared_products_for_n_two() {
        let sample = wn_sample(2, 10, 0xBEEF).unwrap();
        assert!(!sample.planted_pairs.is_empty());
        // planted swaps share a1*a2 and are flagged equivalent
        for &(i, j) in &sample.planted_pairs {
            let (a, b) = (&sample.tuples[i], &sample.tuples[j]);
            assert_eq!(&a[0] * &a[1], &b[0] * &b[1]);
            assert!(sample.equivalent_pairs.contains(&(i, j)));
        }
        assert_eq!(sample.equivalent_pairs, sample.planted_pairs);
    }

    #[test]
    fn nest_of_theta_is_the_single_root() {
        let class = theta(&[ri(1), ri(2), ri(3)]).unwrap();
        let nest = crate::strata::nest_of(&class);
        assert_eq!(nest.sets(), vec![vec![1, 2, 3]]);
    }

    #[test]
    fn wn_sample_scaling_is_not_an_equivalence() {
        let a = [ri(1), ri(2), ri(3)];
        let double: Vec<Rat> = a.iter().map(|x| x * &ri(2)).collect();
        assert!(!theta_fiber_equal(&a, &double).unwrap());
    }
}

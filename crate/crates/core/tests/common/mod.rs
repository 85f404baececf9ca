//! Shared deterministic generators for the integration suites.
#![allow(dead_code)] // each suite uses its own subset

use fmclass::limits::ArcFamily;
use fmclass::nodefam::NodeSection;
use fmclass::rat::Rat;
use fmclass::rng::SplitMix64;
use fmclass::series::TruncatedSeries;

/// Truncation order used by the arc corpus.
pub const CORPUS_TRUNC: usize = 12;

/// Coefficient rows for one group of arcs that all share a base point:
/// recursively split the group at increasing exponents so that nested
/// collision clusters appear by construction.
fn fill_group(
    rows: &mut [Vec<Rat>],
    marks: &[usize],
    start_exp: usize,
    dim: usize,
    rng: &mut SplitMix64,
) {
    if marks.len() == 1 {
        // random tail for the lone arc
        let m = marks[0];
        for e in start_exp..=CORPUS_TRUNC {
            for c in 0..dim {
                rows[m * dim + c][e] = Rat::from_int(rng.next_in(-3, 3));
            }
        }
        return;
    }
    // split level: shared coefficients strictly below it (the recursion
    // depth keeps split well under the truncation for n <= 6)
    let split = (start_exp + rng.next_below(2) as usize).min(CORPUS_TRUNC);
    for e in start_exp..split {
        for c in 0..dim {
            let shared = Rat::from_int(rng.next_in(-3, 3));
            for &m in marks {
                rows[m * dim + c][e] = shared.clone();
            }
        }
    }
    // partition into >= 2 parts with distinct branch vectors at `split`;
    // at the truncation cap every part must be a singleton so that all
    // arcs stay distinguishable
    let parts_wanted = if split == CORPUS_TRUNC {
        marks.len()
    } else {
        2 + rng.next_below((marks.len() - 1) as u64) as usize
    };
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); parts_wanted];
    for (pos, &m) in marks.iter().enumerate() {
        if pos < parts_wanted {
            parts[pos].push(m); // every part nonempty
        } else {
            parts[rng.next_below(parts_wanted as u64) as usize].push(m);
        }
    }
    let mut branches: Vec<Vec<Rat>> = Vec::new();
    while branches.len() < parts.len() {
        let cand: Vec<Rat> = (0..dim)
            .map(|_| Rat::from_int(rng.next_in(-3, 3)))
            .collect();
        if !branches.contains(&cand) {
            branches.push(cand);
        }
    }
    for (part, branch) in parts.iter().zip(&branches) {
        for &m in part {
            for c in 0..dim {
                rows[m * dim + c][split] = branch[c].clone();
            }
        }
        fill_group(rows, part, split + 1, dim, rng);
    }
}

/// A deterministic arc family with planned nested collisions.
pub fn corpus_family(seed: u64) -> ArcFamily {
    let mut rng = SplitMix64::new(seed);
    let n = 2 + rng.next_below(5) as usize; // 2..=6
    let dim = 1 + rng.next_below(2) as usize; // 1..=2

    // choose base points from a tiny grid so collisions occur
    let bases: Vec<Vec<Rat>> = (0..n)
        .map(|_| (0..dim).map(|_| Rat::from_int(rng.next_in(0, 1))).collect())
        .collect();

    // rows[m * dim + c][exp] = coefficient
    let mut rows: Vec<Vec<Rat>> = (0..n * dim)
        .map(|_| vec![Rat::zero(); CORPUS_TRUNC + 1])
        .collect();
    for m in 0..n {
        for c in 0..dim {
            rows[m * dim + c][0] = bases[m][c].clone();
        }
    }

    // group marks by base point and realize a nested split plan per group
    let mut remaining: Vec<usize> = (0..n).collect();
    while let Some(first) = remaining.first().copied() {
        let group: Vec<usize> = remaining
            .iter()
            .cloned()
            .filter(|&m| bases[m] == bases[first])
            .collect();
        remaining.retain(|m| !group.contains(m));
        fill_group(&mut rows, &group, 1, dim, &mut rng);
    }

    let arcs: Vec<Vec<TruncatedSeries>> = (0..n)
        .map(|m| {
            (0..dim)
                .map(|c| TruncatedSeries::new(rows[m * dim + c].clone()))
                .collect()
        })
        .collect();
    ArcFamily::new(arcs).expect("corpus families are well formed")
}

/// A random unit `u(t)` (nonzero constant term) at the corpus truncation.
pub fn random_unit(rng: &mut SplitMix64, trunc: usize) -> TruncatedSeries {
    let mut coeffs = vec![Rat::zero(); trunc + 1];
    coeffs[0] = Rat::new(rng.next_nonzero(3), rng.next_in(1, 2));
    for c in coeffs.iter_mut().skip(1) {
        *c = Rat::new(rng.next_in(-2, 2), rng.next_in(1, 2));
    }
    TruncatedSeries::new(coeffs)
}

/// A tuple of pairwise-distinct nonzero rationals on a small grid.
pub fn random_trace_tuple(rng: &mut SplitMix64, n: usize) -> Vec<Rat> {
    let mut tuple: Vec<Rat> = Vec::with_capacity(n);
    while tuple.len() < n {
        let cand = Rat::new(rng.next_nonzero(20), rng.next_in(1, 6));
        if !tuple.contains(&cand) {
            tuple.push(cand);
        }
    }
    tuple
}

/// Sections `x_i = a_i t u_i(t)`, `y_i = t^2 / x_i` on `xy = t^2`, with
/// random unit parts; the exceptional trace is exactly `a`.
pub fn sections_with_trace(a: &[Rat], rng: &mut SplitMix64, trunc: usize) -> Vec<NodeSection> {
    a.iter()
        .map(|ai| {
            let mut unit_coeffs = vec![Rat::zero(); trunc + 1];
            unit_coeffs[0] = Rat::one();
            for c in unit_coeffs.iter_mut().skip(1) {
                *c = Rat::new(rng.next_in(-2, 2), rng.next_in(1, 3));
            }
            let unit = TruncatedSeries::new(unit_coeffs);
            let t = TruncatedSeries::monomial(Rat::one(), 1, trunc);
            let x = (&t * &unit).truncate_to(trunc).scale(ai);
            let y = (&t * &unit.invert_unit())
                .truncate_to(trunc)
                .scale(&ai.recip());
            NodeSection::new(x, y, 2)
        })
        .collect()
}

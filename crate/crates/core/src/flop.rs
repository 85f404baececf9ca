//! The three standard resolutions of the threefold ordinary double point
//! `ab = cd`, verified symbolically.
//!
//! * the big resolution: blow-up of the origin, exceptional `P^1 x P^1`;
//! * small family 2: blow-up along `(a - lambda*c, lambda*b - d)`;
//! * small family 3: blow-up along `(a - lambda*d, lambda*b - c)`.
//!
//! Charts and the blow-down factorizations are standard computations
//! embedded here as data; every claim about them — the pullback identity
//! `ab - cd = 0`, exceptional fiber dimensions, generic injectivity, the
//! factorization of the big resolution through each small one, and the
//! fact that the two small families collapse opposite rulings of the big
//! exceptional — is checked symbolically or on exact rational points at
//! test time. No tolerances anywhere.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::poly::{MissingIndeterminate, Poly};
use crate::rat::Rat;

pub const AMBIENT_VARS: [&str; 4] = ["a", "b", "c", "d"];

/// `ab - cd`, the equation of the local model.
pub fn quadric() -> Poly {
    &(&Poly::var("a") * &Poly::var("b")) - &(&Poly::var("c") * &Poly::var("d"))
}

/// A polynomial map between affine coordinate patches.
///
/// `components[i]` expresses target coordinate `target[i]` in the source
/// coordinates; `params` lists extra symbols (a symbolic lambda) allowed
/// to appear.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub params: Vec<String>,
    pub components: Vec<Poly>,
}

impl PolyMap {
    pub fn new(source: &[&str], target: &[&str], params: &[&str], components: Vec<Poly>) -> Self {
        assert_eq!(components.len(), target.len());
        let allowed: BTreeSet<String> = source
            .iter()
            .chain(params.iter())
            .map(|s| (*s).to_owned())
            .collect();
        for comp in &components {
            for v in comp.variables() {
                assert!(
                    allowed.contains(&v),
                    "component uses {:?} outside source/params",
                    v
                );
            }
        }
        PolyMap {
            source: source.iter().map(|s| (*s).to_owned()).collect(),
            target: target.iter().map(|s| (*s).to_owned()).collect(),
            params: params.iter().map(|s| (*s).to_owned()).collect(),
            components,
        }
    }

    fn assignment(&self) -> BTreeMap<String, Poly> {
        let mut map: BTreeMap<String, Poly> = self
            .target
            .iter()
            .zip(&self.components)
            .map(|(t, p)| (t.clone(), p.clone()))
            .collect();
        for p in &self.params {
            map.insert(p.clone(), Poly::var(p));
        }
        map
    }

    /// Pull a polynomial in the target coordinates back along the map.
    pub fn pullback(&self, p: &Poly) -> Result<Poly, MissingIndeterminate> {
        p.substitute(&self.assignment())
    }

    /// `self ∘ inner`: requires `inner.target == self.source`.
    pub fn compose(&self, inner: &PolyMap) -> PolyMap {
        assert_eq!(self.source, inner.target, "maps do not compose");
        let mut assign: BTreeMap<String, Poly> = self
            .source
            .iter()
            .zip(&inner.components)
            .map(|(v, p)| (v.clone(), p.clone()))
            .collect();
        let mut params: Vec<String> = inner.params.clone();
        for p in &self.params {
            assign.insert(p.clone(), Poly::var(p));
            if !params.contains(p) {
                params.push(p.clone());
            }
        }
        let components = self
            .components
            .iter()
            .map(|c| {
                c.substitute(&assign)
                    .expect("composition covers all variables")
            })
            .collect();
        PolyMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            params,
            components,
        }
    }
}

/// The resolution a chart belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartFamily {
    Big,
    Small2,
    Small3,
}

impl fmt::Display for ChartFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartFamily::Big => write!(f, "big"),
            ChartFamily::Small2 => write!(f, "small-family-2"),
            ChartFamily::Small3 => write!(f, "small-family-3"),
        }
    }
}

/// The blow-up parameter of the small families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lambda {
    Value(Rat),
    Symbolic,
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Value(r) => write!(f, "{}", r),
            Lambda::Symbolic => write!(f, "symbolic"),
        }
    }
}

impl Lambda {
    fn poly(&self) -> Poly {
        match self {
            Lambda::Value(r) => Poly::constant(r.clone()),
            Lambda::Symbolic => Poly::var("lambda"),
        }
    }

    fn params(&self) -> Vec<&'static str> {
        match self {
            Lambda::Value(_) => vec![],
            Lambda::Symbolic => vec!["lambda"],
        }
    }
}

/// One affine chart of a resolution, mapping to the quadric ambient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionChart {
    pub family: ChartFamily,
    pub lambda: Option<Lambda>,
    pub chart_index: usize,
    /// Short chart name: the surviving coordinate ("a".."d") for the big
    /// resolution, "u"/"w" for the blow-up charts of the small ones.
    pub name: String,
    pub map: PolyMap,
}

impl ResolutionChart {
    pub fn label(&self) -> String {
        match &self.lambda {
            None => format!("{} {}-chart", self.family, self.name),
            Some(l) => format!("{} {}-chart (lambda={})", self.family, self.name, l),
        }
    }
}

/// The four standard charts of the strict transform of `ab = cd` under
/// the blow-up of the origin. In the a-chart, `(a, c', d')` maps to
/// `(a, a c' d', a c', a d')`, and symmetrically.
pub fn big_resolution_charts() -> Vec<ResolutionChart> {
    let v = Poly::var;
    let charts: Vec<(&str, [&str; 3], Vec<Poly>)> = vec![
        (
            "a",
            ["a", "cp", "dp"],
            vec![
                v("a"),
                &(&v("a") * &v("cp")) * &v("dp"),
                &v("a") * &v("cp"),
                &v("a") * &v("dp"),
            ],
        ),
        (
            "b",
            ["b", "cp", "dp"],
            vec![
                &(&v("b") * &v("cp")) * &v("dp"),
                v("b"),
                &v("b") * &v("cp"),
                &v("b") * &v("dp"),
            ],
        ),
        (
            "c",
            ["c", "ap", "bp"],
            vec![
                &v("c") * &v("ap"),
                &v("c") * &v("bp"),
                v("c"),
                &(&v("c") * &v("ap")) * &v("bp"),
            ],
        ),
        (
            "d",
            ["d", "ap", "bp"],
            vec![
                &v("d") * &v("ap"),
                &v("d") * &v("bp"),
                &(&v("d") * &v("ap")) * &v("bp"),
                v("d"),
            ],
        ),
    ];
    charts
        .into_iter()
        .enumerate()
        .map(|(i, (name, vars, components))| ResolutionChart {
            family: ChartFamily::Big,
            lambda: None,
            chart_index: i,
            name: name.to_owned(),
            map: PolyMap::new(&vars, &AMBIENT_VARS, &[], components),
        })
        .collect()
}

/// The two charts of a small resolution.
///
/// Family 2 blows up `(a - lambda*c, lambda*b - d)`. Writing
/// `u = a - lambda*c` and `w = lambda*b - d` turns the quadric into
/// `u*b + c*w = 0`; the u-chart (`w = s*u`) has coordinates `(u, c, s)`
/// and the w-chart (`u = s*w`) has coordinates `(w, b, s)`. Family 3 is
/// the same with `c` and `d` exchanged.
pub fn small_resolution_charts(family: ChartFamily, lambda: &Lambda) -> Vec<ResolutionChart> {
    let v = Poly::var;
    let l = lambda.poly();
    let params = lambda.params();
    let charts: Vec<([&str; 3], &str, Vec<Poly>)> = match family {
        ChartFamily::Small2 => vec![
            (
                ["u", "c", "s"],
                "u",
                vec![
                    // (u + lambda c, -c s, c, -lambda c s - s u)
                    &v("u") + &(&l * &v("c")),
                    -&(&v("c") * &v("s")),
                    v("c"),
                    &(-&(&(&l * &v("c")) * &v("s"))) - &(&v("s") * &v("u")),
                ],
            ),
            (
                ["w", "b", "s"],
                "w",
                vec![
                    // (s w - lambda s b, b, -s b, lambda b - w)
                    &(&v("s") * &v("w")) - &(&(&l * &v("s")) * &v("b")),
                    v("b"),
                    -&(&v("s") * &v("b")),
                    &(&l * &v("b")) - &v("w"),
                ],
            ),
        ],
        ChartFamily::Small3 => vec![
            (
                ["u", "d", "s"],
                "u",
                vec![
                    // (u + lambda d, -d s, -lambda d s - s u, d)
                    &v("u") + &(&l * &v("d")),
                    -&(&v("d") * &v("s")),
                    &(-&(&(&l * &v("d")) * &v("s"))) - &(&v("s") * &v("u")),
                    v("d"),
                ],
            ),
            (
                ["w", "b", "s"],
                "w",
                vec![
                    // (-s (lambda b - w), b, lambda b - w, -s b)
                    &(&v("s") * &v("w")) - &(&(&l * &v("s")) * &v("b")),
                    v("b"),
                    &(&l * &v("b")) - &v("w"),
                    -&(&v("s") * &v("b")),
                ],
            ),
        ],
        ChartFamily::Big => panic!("use big_resolution_charts for the big resolution"),
    };
    charts
        .into_iter()
        .enumerate()
        .map(|(i, (vars, name, components))| ResolutionChart {
            family,
            lambda: Some(lambda.clone()),
            chart_index: i,
            name: name.to_owned(),
            map: PolyMap::new(&vars, &AMBIENT_VARS, &params, components),
        })
        .collect()
}

/// Exceptional fiber dimension by free-coordinate counting: the largest
/// coordinate subspace (obtained by zeroing a subset of chart variables)
/// on which every component of the map vanishes identically. `None` when
/// not even the origin maps to the origin.
pub fn exceptional_fiber_dimension(chart: &ResolutionChart) -> Option<usize> {
    let vars = &chart.map.source;
    let n = vars.len();
    let mut best: Option<usize> = None;
    for mask in 0u32..(1 << n) {
        let assign: BTreeMap<String, Poly> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if mask >> i & 1 == 1 {
                    (v.clone(), Poly::zero())
                } else {
                    (v.clone(), Poly::var(v))
                }
            })
            .chain(chart.map.params.iter().map(|p| (p.clone(), Poly::var(p))))
            .collect();
        let all_zero = chart
            .map
            .components
            .iter()
            .all(|c| c.substitute(&assign).expect("assignment covers").is_zero());
        if all_zero {
            let free = n - mask.count_ones() as usize;
            best = Some(best.map_or(free, |b: usize| b.max(free)));
        }
    }
    best
}

/// Result of the per-chart checks.
#[derive(Debug, Clone)]
pub struct ChartReport {
    pub label: String,
    pub pullback_zero: bool,
    pub fiber_dim: Option<usize>,
    pub expected_fiber_dim: usize,
    /// `None` when skipped (symbolic lambda), otherwise whether all grid
    /// points off the exceptional set got distinct images.
    pub injective_on_grid: Option<bool>,
}

impl ChartReport {
    pub fn pass(&self) -> bool {
        self.pullback_zero
            && self.fiber_dim == Some(self.expected_fiber_dim)
            && self.injective_on_grid.unwrap_or(true)
    }
}

impl fmt::Display for ChartReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: pullback(ab-cd) {} | exceptional fiber dim {} (expected {}) | injectivity {}",
            self.label,
            if self.pullback_zero { "= 0" } else { "!= 0" },
            match self.fiber_dim {
                Some(d) => d.to_string(),
                None => "undefined".to_owned(),
            },
            self.expected_fiber_dim,
            match self.injective_on_grid {
                Some(true) => "ok",
                Some(false) => "FAILED",
                None => "skipped (symbolic)",
            }
        )
    }
}

fn grid_values() -> Vec<Rat> {
    vec![
        Rat::from_int(-2),
        Rat::from_int(-1),
        Rat::new(-1, 2),
        Rat::new(1, 2),
        Rat::from_int(1),
        Rat::from_int(2),
    ]
}

fn injective_on_grid(chart: &ResolutionChart) -> Option<bool> {
    if chart.map.params.iter().any(|p| p == "lambda") {
        return None; // needs a numeric lambda
    }
    let vars = &chart.map.source;
    assert_eq!(vars.len(), 3);
    let grid = grid_values();
    let mut seen: BTreeMap<Vec<Rat>, Vec<Rat>> = BTreeMap::new();
    for x in &grid {
        for y in &grid {
            for z in &grid {
                let point: BTreeMap<String, Rat> = vars
                    .iter()
                    .cloned()
                    .zip([x.clone(), y.clone(), z.clone()])
                    .collect();
                let image: Vec<Rat> = chart
                    .map
                    .components
                    .iter()
                    .map(|c| c.eval(&point).expect("grid point covers all variables"))
                    .collect();
                if image.iter().all(Rat::is_zero) {
                    continue; // on the exceptional set
                }
                let key = vec![x.clone(), y.clone(), z.clone()];
                if let Some(prev) = seen.insert(image, key.clone()) {
                    if prev != key {
                        return Some(false);
                    }
                }
            }
        }
    }
    Some(true)
}

/// Run the three checks on a chart: the pullback identity, the expected
/// exceptional fiber dimension (2 for the big resolution, 1 for small),
/// and generic injectivity on a deterministic rational grid.
pub fn verify_chart(chart: &ResolutionChart) -> ChartReport {
    let pullback_zero = chart
        .map
        .pullback(&quadric())
        .map(|p| p.is_zero())
        .unwrap_or(false);
    let expected_fiber_dim = match chart.family {
        ChartFamily::Big => 2,
        _ => 1,
    };
    ChartReport {
        label: chart.label(),
        pullback_zero,
        fiber_dim: exceptional_fiber_dimension(chart),
        expected_fiber_dim,
        injective_on_grid: injective_on_grid(chart),
    }
}

/// The factorization of one big chart through a small chart.
#[derive(Debug, Clone)]
pub struct ChartFactorization {
    pub big_chart: String,
    pub small_chart: String,
    /// Map from big-chart coordinates to small-chart coordinates.
    pub factor: PolyMap,
    /// `small ∘ factor - big`, componentwise; all zero when verified.
    pub residuals: Vec<Poly>,
    /// Chart variables of the big exceptional (`image = 0` slice) that
    /// survive the factorization; the two small families keep opposite
    /// ones (the two rulings of the exceptional `P^1 x P^1`).
    pub surviving_exceptional_vars: BTreeSet<String>,
}

impl ChartFactorization {
    pub fn residuals_zero(&self) -> bool {
        self.residuals.iter().all(Poly::is_zero)
    }
}

#[derive(Debug, Clone)]
pub struct FactorizationReport {
    pub family: ChartFamily,
    pub lambda: Lambda,
    pub charts: Vec<ChartFactorization>,
}

impl FactorizationReport {
    pub fn pass(&self) -> bool {
        self.charts.iter().all(ChartFactorization::residuals_zero)
    }
}

/// The hand-derived blow-down factorizations: for each big chart, a map
/// into one chart of the small resolution making the triangle commute.
/// The composition identity is recomputed and reported, never trusted.
pub fn factor_big_through_small(family: ChartFamily, lambda: &Lambda) -> FactorizationReport {
    assert!(family != ChartFamily::Big);
    let v = Poly::var;
    let l = lambda.poly();
    let params = lambda.params();
    let big = big_resolution_charts();
    let small = small_resolution_charts(family, lambda);

    // (big chart index, small chart index, factor components)
    let data: Vec<(usize, usize, Vec<Poly>)> = match family {
        ChartFamily::Small2 => vec![
            // a-chart -> u-chart: (a - lambda a c', a c', -d')
            (
                0,
                0,
                vec![
                    &v("a") - &(&(&l * &v("a")) * &v("cp")),
                    &v("a") * &v("cp"),
                    -&v("dp"),
                ],
            ),
            // b-chart -> w-chart: (lambda b - b d', b, -c')
            (
                1,
                1,
                vec![&(&l * &v("b")) - &(&v("b") * &v("dp")), v("b"), -&v("cp")],
            ),
            // c-chart -> u-chart: (c a' - lambda c, c, -b')
            (
                2,
                0,
                vec![&(&v("c") * &v("ap")) - &(&l * &v("c")), v("c"), -&v("bp")],
            ),
            // d-chart -> w-chart: (lambda d b' - d, d b', -a')
            (
                3,
                1,
                vec![
                    &(&(&l * &v("d")) * &v("bp")) - &v("d"),
                    &v("d") * &v("bp"),
                    -&v("ap"),
                ],
            ),
        ],
        ChartFamily::Small3 => vec![
            // a-chart -> u-chart: (a - lambda a d', a d', -c')
            (
                0,
                0,
                vec![
                    &v("a") - &(&(&l * &v("a")) * &v("dp")),
                    &v("a") * &v("dp"),
                    -&v("cp"),
                ],
            ),
            // b-chart -> w-chart: (lambda b - b c', b, -d')
            (
                1,
                1,
                vec![&(&l * &v("b")) - &(&v("b") * &v("cp")), v("b"), -&v("dp")],
            ),
            // c-chart -> w-chart: (lambda c b' - c, c b', -a')
            (
                2,
                1,
                vec![
                    &(&(&l * &v("c")) * &v("bp")) - &v("c"),
                    &v("c") * &v("bp"),
                    -&v("ap"),
                ],
            ),
            // d-chart -> u-chart: (d a' - lambda d, d, -b')
            (
                3,
                0,
                vec![&(&v("d") * &v("ap")) - &(&l * &v("d")), v("d"), -&v("bp")],
            ),
        ],
        ChartFamily::Big => unreachable!(),
    };

    let charts = data
        .into_iter()
        .map(|(bi, si, components)| {
            let big_chart = &big[bi];
            let small_chart = &small[si];
            let source: Vec<&str> = big_chart.map.source.iter().map(String::as_str).collect();
            let target: Vec<&str> = small_chart.map.source.iter().map(String::as_str).collect();
            let factor = PolyMap::new(&source, &target, &params, components);
            let composed = small_chart.map.compose(&factor);
            let residuals: Vec<Poly> = composed
                .components
                .iter()
                .zip(&big_chart.map.components)
                .map(|(x, y)| x - y)
                .collect();

            // Surviving exceptional direction: zero the first big chart
            // variable (the exceptional slice) and look at which of the
            // two primed variables the factor still depends on.
            let slice: BTreeMap<String, Poly> = big_chart
                .map
                .source
                .iter()
                .enumerate()
                .map(|(i, var)| {
                    if i == 0 {
                        (var.clone(), Poly::zero())
                    } else {
                        (var.clone(), Poly::var(var))
                    }
                })
                .chain(params.iter().map(|p| ((*p).to_owned(), Poly::var(p))))
                .collect();
            let mut surviving = BTreeSet::new();
            for comp in &factor.components {
                let restricted = comp.substitute(&slice).expect("slice covers");
                for var in restricted.variables() {
                    if var.ends_with('p') {
                        surviving.insert(var);
                    }
                }
            }

            ChartFactorization {
                big_chart: big_chart.label(),
                small_chart: small_chart.label(),
                factor,
                residuals,
                surviving_exceptional_vars: surviving,
            }
        })
        .collect();

    FactorizationReport {
        family,
        lambda: lambda.clone(),
        charts,
    }
}

/// The standard lambda sweep for exact checks; identities are polynomial
/// in lambda, so these values plus one symbolic run give full coverage.
pub fn lambda_test_set() -> Vec<Lambda> {
    vec![
        Lambda::Value(Rat::from_int(0)),
        Lambda::Value(Rat::from_int(1)),
        Lambda::Value(Rat::from_int(-1)),
        Lambda::Value(Rat::from_int(2)),
        Lambda::Value(Rat::new(1, 2)),
        Lambda::Symbolic,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_charts_satisfy_the_identity() {
        for chart in big_resolution_charts() {
            assert!(
                chart.map.pullback(&quadric()).unwrap().is_zero(),
                "{}",
                chart.label()
            );
        }
    }

    #[test]
    fn big_chart_point_lies_on_quadric() {
        // a-chart at (1, 2, 3) -> (1, 6, 2, 3): 1*6 = 2*3
        let chart = &big_resolution_charts()[0];
        let point: BTreeMap<String, Rat> = [
            ("a", Rat::from_int(1)),
            ("cp", Rat::from_int(2)),
            ("dp", Rat::from_int(3)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_owned(), v))
        .collect();
        let image: Vec<Rat> = chart
            .map
            .components
            .iter()
            .map(|c| c.eval(&point).unwrap())
            .collect();
        assert_eq!(
            image,
            vec![
                Rat::from_int(1),
                Rat::from_int(6),
                Rat::from_int(2),
                Rat::from_int(3)
            ]
        );
    }

    #[test]
    fn big_fiber_is_two_dimensional() {
        for chart in big_resolution_charts() {
            assert_eq!(exceptional_fiber_dimension(&chart), Some(2));
        }
    }

    #[test]
    fn small_charts_satisfy_the_identity_for_all_lambdas() {
        for lambda in lambda_test_set() {
            for family in [ChartFamily::Small2, ChartFamily::Small3] {
                for chart in small_resolution_charts(family, &lambda) {
                    assert!(
                        chart.map.pullback(&quadric()).unwrap().is_zero(),
                        "{}",
                        chart.label()
                    );
                    assert_eq!(
                        exceptional_fiber_dimension(&chart),
                        Some(1),
                        "{}",
                        chart.label()
                    );
                }
            }
        }
    }

    #[test]
    fn spec_display_form_of_the_lambda_one_chart() {
        // With lambda = 1 the u-chart in the coordinates (a, c, s), where
        // a = u + c, reads (a, -s c, c, -s a); verify the identity holds
        // for that presentation too.
        let assign = crate::poly::assignment(&[
            ("a", Poly::var("a")),
            ("b", -&(&Poly::var("s") * &Poly::var("c"))),
            ("c", Poly::var("c")),
            ("d", -&(&Poly::var("s") * &Poly::var("a"))),
        ]);
        assert!(quadric().substitute(&assign).unwrap().is_zero());

        // ... and it is the same chart: substituting u = a - c into the
        // stored u-chart map gives exactly that display form.
        let chart = &small_resolution_charts(ChartFamily::Small2, &Lambda::Value(Rat::one()))[0];
        let change = crate::poly::assignment(&[
            ("u", &Poly::var("a") - &Poly::var("c")),
            ("c", Poly::var("c")),
            ("s", Poly::var("s")),
        ]);
        let displayed = [
            Poly::var("a"),
            -&(&Poly::var("s") * &Poly::var("c")),
            Poly::var("c"),
            -&(&Poly::var("s") * &Poly::var("a")),
        ];
        for (stored, disp) in chart.map.components.iter().zip(&displayed) {
            assert_eq!(&stored.substitute(&change).unwrap(), disp);
        }
    }

    #[test]
    fn verify_chart_passes_on_good_charts() {
        let report = verify_chart(&big_resolution_charts()[0]);
        assert!(report.pass(), "{}", report);
        assert_eq!(report.fiber_dim, Some(2));

        let chart = &small_resolution_charts(ChartFamily::Small2, &Lambda::Value(Rat::one()))[0];
        let report = verify_chart(chart);
        assert!(report.pass(), "{}", report);
        assert_eq!(report.fiber_dim, Some(1));
        assert_eq!(report.injective_on_grid, Some(true));
    }

    #[test]
    fn corrupted_chart_fails_identity() {
        let mut chart = big_resolution_charts().remove(0);
        chart.map.components[1] = &chart.map.components[1] + &Poly::int(1);
        let report = verify_chart(&chart);
        assert!(!report.pullback_zero);
        assert!(!report.pass());
    }

    #[test]
    fn factorizations_have_zero_residuals() {
        for lambda in lambda_test_set() {
            for family in [ChartFamily::Small2, ChartFamily::Small3] {
                let report = factor_big_through_small(family, &lambda);
                assert!(report.pass(), "family {} lambda {}", family, lambda);
                assert_eq!(report.charts.len(), 4);
            }
        }
    }

    #[test]
    fn families_collapse_opposite_rulings() {
        let lambda = Lambda::Value(Rat::from_int(1));
        let f2 = factor_big_through_small(ChartFamily::Small2, &lambda);
        let f3 = factor_big_through_small(ChartFamily::Small3, &lambda);
        for (c2, c3) in f2.charts.iter().zip(&f3.charts) {
            assert_eq!(c2.surviving_exceptional_vars.len(), 1, "{}", c2.big_chart);
            assert_eq!(c3.surviving_exceptional_vars.len(), 1, "{}", c3.big_chart);
            assert_ne!(
                c2.surviving_exceptional_vars, c3.surviving_exceptional_vars,
                "families should keep opposite rulings in {}",
                c2.big_chart
            );
        }
        // In the a-chart concretely: family 2 keeps d', family 3 keeps c'.
        assert!(f2.charts[0].surviving_exceptional_vars.contains("dp"));
        assert!(f3.charts[0].surviving_exceptional_vars.contains("cp"));
    }

    #[test]
    fn corrupting_the_small_chart_breaks_the_factorization() {
        let lambda = Lambda::Value(Rat::one());
        let report = factor_big_through_small(ChartFamily::Small2, &lambda);
        let fact = &report.charts[0];
        let mut small = small_resolution_charts(ChartFamily::Small2, &lambda)[0].clone();
        small.map.components[1] = &small.map.components[1] + &Poly::int(1);
        let composed = small.map.compose(&fact.factor);
        let big = big_resolution_charts();
        let residuals: Vec<Poly> = composed
            .components
            .iter()
            .zip(&big[0].map.components)
            .map(|(x, y)| x - y)
            .collect();
        assert!(residuals.iter().any(|r| !r.is_zero()));
    }
}

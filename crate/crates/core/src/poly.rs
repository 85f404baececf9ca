//! Sparse multivariate polynomials over exact rationals.
//!
//! Just enough symbolic machinery for chart identities: addition,
//! multiplication, and simultaneous substitution. Terms are kept in a
//! canonical graded-lexicographic order (alphabetically earlier variable
//! names are more significant) with no zero coefficients, so equality is
//! a plain term-list comparison.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::rat::Rat;

/// A monomial: variable names with positive exponents, name-sorted.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(String, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial(vec![(name.to_owned(), 1)])
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponents(&self) -> &[(String, u32)] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut map: BTreeMap<&str, u32> = BTreeMap::new();
        for (v, e) in self.0.iter().chain(other.0.iter()) {
            *map.entry(v.as_str()).or_insert(0) += e;
        }
        Monomial(map.into_iter().map(|(v, e)| (v.to_owned(), e)).collect())
    }

    fn cmp_grlex(&self, other: &Monomial) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Same degree: walk variables alphabetically; the monomial with
        // the higher exponent on the earliest differing variable wins.
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        match ea.cmp(eb) {
                            Ordering::Equal => {}
                            ord => return ord,
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| {
                if *e == 1 {
                    v.clone()
                } else {
                    format!("{}^{}", v, e)
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// The substitution map does not cover some indeterminate of the polynomial.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no assignment for indeterminate {var:?}")]
pub struct MissingIndeterminate {
    pub var: String,
}

/// A multivariate polynomial in canonical form: grlex-descending term
/// list, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: Vec<(Monomial, Rat)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn constant(c: Rat) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn int(c: i64) -> Self {
        Poly::constant(Rat::from_int(c))
    }

    pub fn var(name: &str) -> Self {
        Poly {
            terms: vec![(Monomial::var(name), Rat::one())],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Monomial, Rat)] {
        &self.terms
    }

    /// The set of indeterminates that actually occur.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        for (m, _) in &self.terms {
            for (v, _) in m.exponents() {
                vars.insert(v.clone());
            }
        }
        vars
    }

    fn from_map(map: BTreeMap<MonoKey, Rat>) -> Poly {
        let mut terms: Vec<(Monomial, Rat)> = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k.0, c))
            .collect();
        // BTreeMap over MonoKey is grlex-ascending; flip to descending.
        terms.reverse();
        Poly { terms }
    }

    fn to_map(&self) -> BTreeMap<MonoKey, Rat> {
        self.terms
            .iter()
            .map(|(m, c)| (MonoKey(m.clone()), c.clone()))
            .collect()
    }

    pub fn pow(&self, exp: u32) -> Poly {
        let mut acc = Poly::constant(Rat::one());
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Simultaneous substitution of polynomials for all indeterminates.
    pub fn substitute(
        &self,
        assignment: &BTreeMap<String, Poly>,
    ) -> Result<Poly, MissingIndeterminate> {
        for v in self.variables() {
            if !assignment.contains_key(&v) {
                return Err(MissingIndeterminate { var: v });
            }
        }
        let mut acc = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for (v, e) in m.exponents() {
                term = &term * &assignment[v].pow(*e);
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Exact evaluation at a rational point; every variable must be assigned.
    pub fn eval(&self, point: &BTreeMap<String, Rat>) -> Result<Rat, MissingIndeterminate> {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, e) in m.exponents() {
                let x = point
                    .get(v)
                    .ok_or_else(|| MissingIndeterminate { var: v.clone() })?;
                term = &term * &x.pow(*e as i64);
            }
            acc += &term;
        }
        Ok(acc)
    }
}

/// Newtype giving monomials their grlex order for use as map keys.
#[derive(Clone, PartialEq, Eq)]
struct MonoKey(Monomial);

impl PartialOrd for MonoKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MonoKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp_grlex(&other.0)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut map = self.to_map();
        for (m, c) in &rhs.terms {
            let entry = map.entry(MonoKey(m.clone())).or_insert_with(Rat::zero);
            *entry += c;
        }
        Poly::from_map(map)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut map: BTreeMap<MonoKey, Rat> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let key = MonoKey(ma.mul(mb));
                let entry = map.entry(key).or_insert_with(Rat::zero);
                *entry += &(ca * cb);
            }
        }
        Poly::from_map(map)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let lead = i == 0;
            let neg = c < &Rat::zero();
            let mag = c.abs();
            if lead {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.exponents().is_empty() {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                write!(f, "{:?}", m)?;
            } else {
                write!(f, "{}*{:?}", mag, m)?;
            }
        }
        Ok(())
    }
}

/// Build a substitution map from variable names and polynomials.
pub fn assignment(pairs: &[(&str, Poly)]) -> BTreeMap<String, Poly> {
    pairs
        .iter()
        .map(|(v, p)| ((*v).to_owned(), p.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Poly {
        Poly::var(name)
    }

    /// ab - cd, the local quadric.
    fn quadric() -> Poly {
        &(&v("a") * &v("b")) - &(&v("c") * &v("d"))
    }

    #[test]
    fn canonical_equality_ignores_construction_order() {
        let p = &(&v("x") * &v("y")) + &Poly::int(3);
        let q = &Poly::int(3) + &(&v("y") * &v("x"));
        assert_eq!(p, q);
    }

    #[test]
    fn grlex_orders_by_degree_then_by_early_variable() {
        let p = &(&v("b") + &v("a").pow(2)) + &Poly::int(1);
        let names: Vec<String> = p.terms().iter().map(|(m, _)| format!("{:?}", m)).collect();
        assert_eq!(names, vec!["a^2", "b", "1"]);
    }

    #[test]
    fn substitute_big_chart_kills_quadric() {
        // a-chart of the blow-up at the origin: b -> a*c'*d', c -> a*c', d -> a*d'
        let assign = assignment(&[
            ("a", v("a")),
            ("b", &(&v("a") * &v("cp")) * &v("dp")),
            ("c", &v("a") * &v("cp")),
            ("d", &v("a") * &v("dp")),
        ]);
        assert!(quadric().substitute(&assign).unwrap().is_zero());
    }

    #[test]
    fn substitute_small_chart_kills_quadric() {
        // (a, c, s) -> (a, -s*c, c, -s*a)
        let assign = assignment(&[
            ("a", v("a")),
            ("b", -&(&v("s") * &v("c"))),
            ("c", v("c")),
            ("d", -&(&v("s") * &v("a"))),
        ]);
        assert!(quadric().substitute(&assign).unwrap().is_zero());
    }

    #[test]
    fn substitute_simple_square() {
        let p = &v("x") * &v("y");
        let assign = assignment(&[("x", v("t")), ("y", v("t"))]);
        assert_eq!(p.substitute(&assign).unwrap(), v("t").pow(2));
    }

    #[test]
    fn identity_substitution_is_identity() {
        let p = &quadric() + &v("a").pow(3);
        let assign = assignment(&[("a", v("a")), ("b", v("b")), ("c", v("c")), ("d", v("d"))]);
        assert_eq!(p.substitute(&assign).unwrap(), p);
    }

    #[test]
    fn missing_indeterminate_is_reported() {
        let p = quadric();
        let assign = assignment(&[("a", v("a")), ("b", v("b")), ("c", v("c"))]);
        assert_eq!(
            p.substitute(&assign),
            Err(MissingIndeterminate {
                var: "d".to_owned()
            })
        );
    }

    #[test]
    fn eval_exact() {
        let p = quadric();
        let point: BTreeMap<String, Rat> = [
            ("a", Rat::from_int(1)),
            ("b", Rat::from_int(6)),
            ("c", Rat::from_int(2)),
            ("d", Rat::from_int(3)),
        ]
        .into_iter()
        .map(|(k, r)| (k.to_owned(), r))
        .collect();
        assert_eq!(p.eval(&point).unwrap(), Rat::zero());
    }
}

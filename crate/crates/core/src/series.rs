//! Truncated formal power series in one parameter `t`.
//!
//! A `TruncatedSeries` stores the coefficients of `t^0 .. t^K` for a
//! truncation order `K`; nothing is known about higher coefficients.
//! Arithmetic propagates truncation pessimistically so that a result
//! never claims knowledge its inputs cannot support: `min` of the input
//! orders for sums, valuation-adjusted for products. Questions the
//! truncation cannot decide surface as [`InsufficientPrecision`] instead
//! of a silently wrong answer.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::rat::Rat;

/// The stored coefficients were all zero up to the truncation order, so
/// the requested quantity (a valuation, a leading coefficient) is
/// undecidable at this precision.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("all coefficients vanish up to truncation order {trunc}; increase the order past {trunc}")]
pub struct InsufficientPrecision {
    pub trunc: usize,
}

/// A formal power series known modulo `t^(K+1)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<Rat>, // length K+1, index = exponent
}

impl TruncatedSeries {
    /// Series from explicit coefficients `c0, c1, ..., cK`.
    pub fn new(coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series stores at least t^0");
        TruncatedSeries { coeffs }
    }

    /// Convenience constructor from small integers.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    /// The zero series known up to order `trunc`.
    pub fn zero(trunc: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![Rat::zero(); trunc + 1],
        }
    }

    /// `coef * t^exp`, known up to order `trunc` (which must be ≥ `exp`).
    pub fn monomial(coef: Rat, exp: usize, trunc: usize) -> Self {
        assert!(exp <= trunc, "monomial exponent beyond truncation");
        let mut coeffs = vec![Rat::zero(); trunc + 1];
        coeffs[exp] = coef;
        TruncatedSeries { coeffs }
    }

    /// Truncation order `K`: coefficients above `K` are unknown.
    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `t^exp`, or `None` when `exp` is past the truncation.
    pub fn coeff(&self, exp: usize) -> Option<&Rat> {
        self.coeffs.get(exp)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> &Rat {
        &self.coeffs[0]
    }

    /// True when every stored coefficient is zero (the series may still
    /// be nonzero past the truncation).
    pub fn is_known_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    /// Number of leading stored zeros; equals the valuation when some
    /// stored coefficient is nonzero, and `trunc + 1` otherwise.
    fn known_valuation_floor(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.coeffs.len())
    }

    /// Order of vanishing at `t = 0`: the least exponent with a nonzero
    /// coefficient. Undecidable when all stored coefficients vanish.
    pub fn val(&self) -> Result<usize, InsufficientPrecision> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .ok_or(InsufficientPrecision {
                trunc: self.trunc(),
            })
    }

    /// Retruncate to a smaller order.
    pub fn truncate_to(&self, trunc: usize) -> Self {
        assert!(
            trunc <= self.trunc(),
            "cannot extend knowledge by truncating"
        );
        TruncatedSeries {
            coeffs: self.coeffs[..=trunc].to_vec(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Substitute `t -> t^r`. The result is reported at truncation order
    /// `r * K` (all intermediate exponents are genuinely zero).
    pub fn substitute_power(&self, r: usize) -> Self {
        assert!(r >= 1, "base-change exponent must be positive");
        let k = self.trunc();
        let mut coeffs = vec![Rat::zero(); r * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if r * i <= r * k {
                coeffs[r * i] = c.clone();
            }
        }
        TruncatedSeries { coeffs }
    }

    /// Exact evaluation of the stored polynomial part at `t = t0`.
    pub fn eval(&self, t0: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * t0) + c;
        }
        acc
    }

    /// Composition `self(phi(t))` for `phi` with `phi(0) = 0`.
    ///
    /// Because `phi` has positive valuation, the coefficients of the
    /// composite up to order `min(K_self, K_phi)` depend only on stored
    /// data, so the result is known to that order.
    pub fn compose(&self, phi: &TruncatedSeries) -> Self {
        assert!(
            phi.constant_term().is_zero(),
            "composition requires phi(0) = 0"
        );
        let k = self.trunc().min(phi.trunc());
        let phi = phi.truncate_to(k);
        // Horner in phi: c_K, then acc*phi + c_{K-1}, ...
        let mut acc = TruncatedSeries::zero(k);
        for c in self.coeffs.iter().take(k + 1).rev() {
            acc = &(&acc * &phi).truncate_to(k) + &TruncatedSeries::monomial(c.clone(), 0, k);
        }
        acc
    }

    /// Multiplicative inverse of a unit (nonzero constant term), to the
    /// same truncation order.
    pub fn invert_unit(&self) -> Self {
        let c0 = self.constant_term();
        assert!(
            !c0.is_zero(),
            "inverse requires a unit (nonzero constant term)"
        );
        let k = self.trunc();
        let inv0 = c0.recip();
        let mut inv = vec![Rat::zero(); k + 1];
        inv[0] = inv0.clone();
        for m in 1..=k {
            // sum_{j=0}^{m-1} inv[j] * self[m-j] = -c0 * inv[m]
            let mut s = Rat::zero();
            for j in 0..m {
                s += &(&inv[j] * &self.coeffs[m - j]);
            }
            inv[m] = -(&s * &inv0);
        }
        TruncatedSeries { coeffs: inv }
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                if wrote {
                    write!(f, " + ")?;
                }
                match i {
                    0 => write!(f, "{}", c)?,
                    1 => write!(f, "{}*t", c)?,
                    _ => write!(f, "{}*t^{}", c, i)?,
                }
                wrote = true;
            }
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.trunc() + 1)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let k = self.trunc().min(rhs.trunc());
        TruncatedSeries {
            coeffs: (0..=k).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect(),
        }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let k = self.trunc().min(rhs.trunc());
        TruncatedSeries {
            coeffs: (0..=k).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect(),
        }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;

    /// Product with valuation-adjusted truncation: with inputs known to
    /// `Ka`, `Kb` and leading stored zeros `va`, `vb`, every coefficient
    /// up to `min(Ka + vb, Kb + va)` of the product is determined.
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let (ka, kb) = (self.trunc(), rhs.trunc());
        let (va, vb) = (self.known_valuation_floor(), rhs.known_valuation_floor());
        let k = (ka + vb).min(kb + va);
        let mut coeffs = vec![Rat::zero(); k + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j > k {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] += &(a * b);
                }
            }
        }
        TruncatedSeries { coeffs }
    }
}

//! Truncated power-series arithmetic with complex coefficients.
//!
//! Everything here is a plain dense array of coefficients c_0..c_L; products
//! are Cauchy products truncated at L, and exp/log use the standard
//! derivative recurrences. Two coefficient fields are provided: complex
//! doubles for the expansion paths and complex rationals for unit tests of
//! algebraic identities that must hold to machine zero.

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::rv::{IntegerRV, Rational};

/// Complex numbers with exact rational parts; the coefficient field of the
/// exact series mode.
pub type ComplexRational = Complex<BigRational>;

/// Coefficient field of a truncated series.
pub trait SeriesScalar:
    Clone
    + PartialEq
    + std::fmt::Debug
    + Zero
    + One
    + std::ops::Neg<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Div<Output = Self>
{
    fn from_usize(n: usize) -> Self;
    /// exp of a constant term; `None` when the field cannot represent it.
    fn exp_const(&self) -> Option<Self>;
    /// log of a constant term; `None` for zero or when not representable.
    fn log_const(&self) -> Option<Self>;
}

impl SeriesScalar for Complex64 {
    fn from_usize(n: usize) -> Self {
        Complex64::new(n as f64, 0.0)
    }

    fn exp_const(&self) -> Option<Self> {
        Some(self.exp())
    }

    fn log_const(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.ln())
        }
    }
}

impl SeriesScalar for ComplexRational {
    fn from_usize(n: usize) -> Self {
        Complex::new(Rational::from_integer(n.into()), Rational::zero())
    }

    // The exact field only supports the exp/log values needed by identity
    // tests: exp(0) = 1 and log(1) = 0.
    fn exp_const(&self) -> Option<Self> {
        if self.is_zero() {
            Some(Self::one())
        } else {
            None
        }
    }

    fn log_const(&self) -> Option<Self> {
        if self.is_one() {
            Some(Self::zero())
        } else {
            None
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SeriesError {
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("zero constant term has no logarithm")]
    ZeroConstantTerm,
    #[error("constant term not representable in this coefficient field")]
    UnsupportedConstant,
}

/// A power series truncated at degree L, stored as coefficients c_0..c_L.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<C> {
    coeffs: Vec<C>,
}

/// The double-precision series used by the expansion machinery.
pub type Series = TruncatedSeries<Complex64>;
/// The exact-coefficient series used by algebraic identity tests.
pub type ExactSeries = TruncatedSeries<ComplexRational>;

impl<C: SeriesScalar> TruncatedSeries<C> {
    pub fn from_coeffs(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a series has at least its constant term");
        TruncatedSeries { coeffs }
    }

    /// The zero series of the given order.
    pub fn zeros(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![C::zero(); order + 1],
        }
    }

    /// The constant series 1 of the given order.
    pub fn one(order: usize) -> Self {
        let mut s = Self::zeros(order);
        s.coeffs[0] = C::one();
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, q: usize) -> C {
        self.coeffs[q].clone()
    }

    pub fn set_coeff(&mut self, q: usize, v: C) {
        self.coeffs[q] = v;
    }

    /// Restriction to a lower order L' ≤ L.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order());
        TruncatedSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch(self.order(), other.order()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(TruncatedSeries { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch(self.order(), other.order()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Ok(TruncatedSeries { coeffs })
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch(self.order(), other.order()));
        }
        let n = self.coeffs.len();
        let mut out = vec![C::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// log(a) for a series with nonzero constant term, via a' = (log a)'·a.
    pub fn log(&self) -> Result<Self, SeriesError> {
        let a0 = self.coeffs[0].clone();
        if a0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let c0 = a0.log_const().ok_or(SeriesError::UnsupportedConstant)?;
        let n = self.coeffs.len();
        let mut out = vec![C::zero(); n];
        out[0] = c0;
        for k in 1..n {
            // c_k = (a_k - (1/k) sum_{j=1}^{k-1} j c_j a_{k-j}) / a_0
            let mut acc = C::zero();
            for j in 1..k {
                acc = acc + C::from_usize(j) * out[j].clone() * self.coeffs[k - j].clone();
            }
            let num = self.coeffs[k].clone() - acc / C::from_usize(k);
            out[k] = num / a0.clone();
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// exp(a), via b' = a'·b; the constant term is exponentiated first.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        let b0 = self.coeffs[0]
            .exp_const()
            .ok_or(SeriesError::UnsupportedConstant)?;
        let n = self.coeffs.len();
        let mut out = vec![C::zero(); n];
        out[0] = b0;
        for k in 1..n {
            // b_k = (1/k) sum_{j=1}^{k} j a_j b_{k-j}
            let mut acc = C::zero();
            for j in 1..=k {
                acc = acc + C::from_usize(j) * self.coeffs[j].clone() * out[k - j].clone();
            }
            out[k] = acc / C::from_usize(k);
        }
        Ok(TruncatedSeries { coeffs: out })
    }
}

/// Taylor data of φ (or its centered variant) around t0: coefficient q is
/// E((iX)^q e^{it0 X}) / q!, so the series represents h ↦ φ(t0 + h).
pub fn char_taylor(rv: &IntegerRV, t0: f64, order: usize, centered: bool) -> Series {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut factorial = 1.0f64;
    for q in 0..=order {
        if q > 0 {
            factorial *= q as f64;
        }
        coeffs.push(rv.char_fn_deriv_unchecked(t0, q as u32, centered) / factorial);
    }
    TruncatedSeries { coeffs }
}

/// Like [`char_taylor`] at a resonant angle, with the constant term snapped
/// to an exact zero when the characteristic function vanishes there.
pub fn char_taylor_at_point(
    rv: &IntegerRV,
    pt: &crate::resonance::ResonantPoint,
    order: usize,
    centered: bool,
) -> Series {
    let mut s = char_taylor(rv, pt.angle(), order, centered);
    if rv.resonant_zero(pt) {
        s.set_coeff(0, Complex64::zero());
    }
    s
}

/// Exact Taylor data of the centered characteristic function at t0 = 0:
/// coefficient q is E(X̄^q)·i^q/q!, an exact complex rational.
pub fn char_taylor_exact_centered(rv: &IntegerRV, order: usize) -> ExactSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut factorial = Rational::one();
    for q in 0..=order {
        if q > 0 {
            factorial *= Rational::from_integer(q.into());
        }
        let m = rv.central_moment_rational(q as u32) / factorial.clone();
        // i^q cycles through 1, i, -1, -i
        let c = match q % 4 {
            0 => Complex::new(m, Rational::zero()),
            1 => Complex::new(Rational::zero(), m),
            2 => Complex::new(-m, Rational::zero()),
            _ => Complex::new(Rational::zero(), -m),
        };
        coeffs.push(c);
    }
    TruncatedSeries { coeffs }
}

/// Σ_n log φ̄_n-Taylor at 0: coefficient q equals κ_q(S̄_N)·i^q/q! where κ_q
/// is the q-th cumulant of the centered sum.
pub fn cumulant_series(terms: &[IntegerRV], order: usize) -> Series {
    assert!(!terms.is_empty(), "cumulant series of an empty sum");
    let mut acc = Series::zeros(order);
    for rv in terms {
        let lg = char_taylor(rv, 0.0, order, true)
            .log()
            .expect("centered characteristic function is 1 at 0");
        acc = acc.add(&lg).unwrap();
    }
    acc
}

/// Exact-coefficient variant of [`cumulant_series`].
pub fn cumulant_series_exact(terms: &[IntegerRV], order: usize) -> ExactSeries {
    assert!(!terms.is_empty());
    let mut acc = ExactSeries::zeros(order);
    for rv in terms {
        let lg = char_taylor_exact_centered(rv, order)
            .log()
            .expect("constant term is exactly 1");
        acc = acc.add(&lg).unwrap();
    }
    acc
}

/// Default truncation order for an order-r expansion.
pub fn default_series_order(r: u32) -> usize {
    (2 * r + 6) as usize
}

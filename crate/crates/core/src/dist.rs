//! Exact distributions of partial sums: the brute-force oracle.
//!
//! [`Model`] produces independent integer-valued terms (a fixed sequence or a
//! triangular-array row) and [`sum_pmf`] convolves them into the exact
//! distribution of the partial sum. Everything downstream is tested against
//! these distributions.

use std::f64::consts::TAU;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::cyclo;
use crate::rv::{IntegerRV, NumericMode, Rational, Weights};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum DistError {
    #[error("removed index {index} outside 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("terms mix exact and double numeric modes")]
    MixedModes,
    #[error("model produced a term with bound {found} exceeding the model bound {bound}")]
    BoundExceeded { found: i64, bound: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Sequence,
    TriangularArray,
}

type TermFn = dyn Fn(u64, usize) -> IntegerRV + Send + Sync;
type RowLenFn = dyn Fn(u64) -> usize + Send + Sync;

/// A generator of independent terms: either a fixed sequence X_1, X_2, …
/// (row length N) or a triangular array row X_1^{(N)}, …, X_{L_N}^{(N)}.
///
/// `term(N, n)` is deterministic in the pair `(N, n)`; indices are 1-based.
#[derive(Clone)]
pub struct Model {
    kind: ModelKind,
    bound: i64,
    term_fn: Arc<TermFn>,
    row_len_fn: Arc<RowLenFn>,
}

impl std::fmt::Debug for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Model")
            .field("kind", &self.kind)
            .field("bound", &self.bound)
            .finish()
    }
}

impl Model {
    /// Sequence model: term n does not depend on N and rows have length N.
    pub fn sequence<F>(bound: i64, term: F) -> Self
    where
        F: Fn(usize) -> IntegerRV + Send + Sync + 'static,
    {
        Model {
            kind: ModelKind::Sequence,
            bound,
            term_fn: Arc::new(move |_, n| term(n)),
            row_len_fn: Arc::new(|n_param| n_param as usize),
        }
    }

    /// Triangular-array model with an explicit row-length rule.
    pub fn triangular<F, G>(bound: i64, row_len: G, term: F) -> Self
    where
        F: Fn(u64, usize) -> IntegerRV + Send + Sync + 'static,
        G: Fn(u64) -> usize + Send + Sync + 'static,
    {
        Model {
            kind: ModelKind::TriangularArray,
            bound,
            term_fn: Arc::new(term),
            row_len_fn: Arc::new(row_len),
        }
    }

    /// iid sequence of copies of `rv`.
    pub fn iid(rv: IntegerRV) -> Self {
        let bound = rv.bound().max(1);
        Model::sequence(bound, move |_| rv.clone())
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// The uniform bound K on |support|.
    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn row_length(&self, n_param: u64) -> usize {
        (self.row_len_fn)(n_param)
    }

    /// The n-th term of row N (1-based n).
    pub fn term(&self, n_param: u64, n: usize) -> IntegerRV {
        let rv = (self.term_fn)(n_param, n);
        debug_assert!(
            rv.bound() <= self.bound,
            "term bound {} exceeds model bound {}",
            rv.bound(),
            self.bound
        );
        rv
    }

    /// All terms of row N, in order.
    pub fn terms(&self, n_param: u64) -> Vec<IntegerRV> {
        (1..=self.row_length(n_param))
            .map(|n| self.term(n_param, n))
            .collect()
    }

    /// Terms of row N with the 1-based indices in `removed` skipped.
    pub fn terms_without(
        &self,
        n_param: u64,
        removed: &[usize],
    ) -> Result<Vec<IntegerRV>, DistError> {
        let len = self.row_length(n_param);
        for &idx in removed {
            if idx == 0 || idx > len {
                return Err(DistError::IndexOutOfRange { index: idx, len });
            }
        }
        Ok((1..=len)
            .filter(|n| !removed.contains(n))
            .map(|n| self.term(n_param, n))
            .collect())
    }

    /// E(S_N) from per-term means.
    pub fn sum_mean(&self, n_param: u64) -> f64 {
        (1..=self.row_length(n_param))
            .map(|n| self.term(n_param, n).mean())
            .sum()
    }

    /// V_N = Σ Var(X_n), exact additivity of variances.
    pub fn sum_variance(&self, n_param: u64) -> f64 {
        (1..=self.row_length(n_param))
            .map(|n| self.term(n_param, n).variance())
            .sum()
    }

    /// Φ_N(t) = Π φ_n(t).
    pub fn char_product(&self, n_param: u64, t: f64) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for n in 1..=self.row_length(n_param) {
            acc *= self.term(n_param, n).char_fn(t);
        }
        acc
    }

    /// Φ_N at a resonant point, with exact zeros preserved.
    pub fn char_product_at_point(
        &self,
        n_param: u64,
        pt: &crate::resonance::ResonantPoint,
    ) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for n in 1..=self.row_length(n_param) {
            let v = self.term(n_param, n).char_at_point(pt);
            if v.is_zero() {
                return Complex64::zero();
            }
            acc *= v;
        }
        acc
    }
}

/// Exact distribution of a partial sum over a contiguous integer range.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    offset: i64,
    probs: Weights,
}

impl Pmf {
    /// Point mass at `v` (the distribution of an empty sum when v = 0).
    pub fn point_mass(v: i64, mode: NumericMode) -> Self {
        match mode {
            NumericMode::Exact => Pmf {
                offset: v,
                probs: Weights::Exact(vec![Rational::one()]),
            },
            NumericMode::Double => Pmf {
                offset: v,
                probs: Weights::Double(vec![1.0]),
            },
        }
    }

    pub fn from_rv(rv: &IntegerRV) -> Self {
        let lo = rv.support()[0];
        let hi = *rv.support().last().unwrap();
        let width = (hi - lo) as usize + 1;
        let probs = match rv.weights() {
            Weights::Exact(w) => {
                let mut dense = vec![Rational::zero(); width];
                for (i, x) in rv.support().iter().enumerate() {
                    dense[(x - lo) as usize] = w[i].clone();
                }
                Weights::Exact(dense)
            }
            Weights::Double(w) => {
                let mut dense = vec![0.0; width];
                for (i, x) in rv.support().iter().enumerate() {
                    dense[(x - lo) as usize] = w[i];
                }
                Weights::Double(dense)
            }
        };
        Pmf { offset: lo, probs }.trimmed()
    }

    pub fn mode(&self) -> NumericMode {
        self.probs.mode()
    }

    /// Smallest attainable value.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Largest attainable value.
    pub fn max(&self) -> i64 {
        self.offset + self.probs.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// P(S = k), zero outside the attained range.
    pub fn prob(&self, k: i64) -> f64 {
        if k < self.offset || k > self.max() {
            return 0.0;
        }
        self.probs.get_f64((k - self.offset) as usize)
    }

    /// P(S = k) as an exact rational (exact mode only).
    pub fn prob_rational(&self, k: i64) -> Option<Rational> {
        match &self.probs {
            Weights::Exact(w) => {
                if k < self.offset || k > self.max() {
                    Some(Rational::zero())
                } else {
                    Some(w[(k - self.offset) as usize].clone())
                }
            }
            Weights::Double(_) => None,
        }
    }

    pub fn probs(&self) -> &Weights {
        &self.probs
    }

    fn trimmed(mut self) -> Self {
        let (first, last) = match &self.probs {
            Weights::Exact(w) => (
                w.iter().position(|p| !p.is_zero()).unwrap_or(0),
                w.iter().rposition(|p| !p.is_zero()).unwrap_or(0),
            ),
            Weights::Double(w) => (
                w.iter().position(|p| *p != 0.0).unwrap_or(0),
                w.iter().rposition(|p| *p != 0.0).unwrap_or(0),
            ),
        };
        self.offset += first as i64;
        self.probs = match self.probs {
            Weights::Exact(w) => Weights::Exact(w[first..=last].to_vec()),
            Weights::Double(w) => Weights::Double(w[first..=last].to_vec()),
        };
        self
    }

    /// Convolution with a single term.
    pub fn convolve_rv(&self, rv: &IntegerRV) -> Result<Self, DistError> {
        if rv.mode() != self.mode() {
            return Err(DistError::MixedModes);
        }
        let lo = rv.support()[0];
        let hi = *rv.support().last().unwrap();
        let out_offset = self.offset + lo;
        let out_len = self.probs.len() + (hi - lo) as usize;
        let probs = match (&self.probs, rv.weights()) {
            (Weights::Exact(p), Weights::Exact(w)) => {
                let mut out = vec![Rational::zero(); out_len];
                for (i, pi) in p.iter().enumerate() {
                    if pi.is_zero() {
                        continue;
                    }
                    for (j, x) in rv.support().iter().enumerate() {
                        if w[j].is_zero() {
                            continue;
                        }
                        out[i + (x - lo) as usize] += pi * &w[j];
                    }
                }
                Weights::Exact(out)
            }
            (Weights::Double(p), Weights::Double(w)) => {
                let mut out = vec![0.0f64; out_len];
                for (i, pi) in p.iter().enumerate() {
                    if *pi == 0.0 {
                        continue;
                    }
                    for (j, x) in rv.support().iter().enumerate() {
                        out[i + (x - lo) as usize] += pi * w[j];
                    }
                }
                Weights::Double(out)
            }
            _ => unreachable!("mode checked above"),
        };
        Ok(Pmf {
            offset: out_offset,
            probs,
        }
        .trimmed())
    }

    /// Mean and variance of the pmf, exact in exact mode.
    pub fn stats(&self) -> (f64, f64) {
        match &self.probs {
            Weights::Exact(w) => {
                let mut mean = Rational::zero();
                for (i, p) in w.iter().enumerate() {
                    mean += p * Rational::from_integer((self.offset + i as i64).into());
                }
                let mut var = Rational::zero();
                for (i, p) in w.iter().enumerate() {
                    let d = Rational::from_integer((self.offset + i as i64).into())
                        - mean.clone();
                    var += p * d.clone() * d;
                }
                (mean.to_f64().unwrap(), var.to_f64().unwrap())
            }
            Weights::Double(w) => {
                let mut mean = 0.0;
                for (i, p) in w.iter().enumerate() {
                    mean += p * (self.offset + i as i64) as f64;
                }
                let mut var = 0.0;
                for (i, p) in w.iter().enumerate() {
                    let d = (self.offset + i as i64) as f64 - mean;
                    var += p * d * d;
                }
                (mean, var)
            }
        }
    }

    /// Aggregates the pmf over residue classes mod `h`.
    pub fn mod_marginal(&self, h: u32) -> ResidueDist {
        assert!(h >= 2);
        match &self.probs {
            Weights::Exact(w) => {
                let mut masses = vec![Rational::zero(); h as usize];
                for (i, p) in w.iter().enumerate() {
                    let k = self.offset + i as i64;
                    masses[k.rem_euclid(h as i64) as usize] += p;
                }
                ResidueDist {
                    modulus: h,
                    masses: Weights::Exact(masses),
                }
            }
            Weights::Double(w) => {
                let mut masses = vec![0.0f64; h as usize];
                for (i, p) in w.iter().enumerate() {
                    let k = self.offset + i as i64;
                    masses[k.rem_euclid(h as i64) as usize] += p;
                }
                ResidueDist {
                    modulus: h,
                    masses: Weights::Double(masses),
                }
            }
        }
    }

    /// Writes the pmf as CSV with columns `k,prob` (17 significant digits).
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "k,prob")?;
        for i in 0..self.probs.len() {
            let k = self.offset + i as i64;
            writeln!(w, "{},{}", k, crate::experiments::fmt_f64(self.probs.get_f64(i)))?;
        }
        Ok(())
    }
}

/// Distribution on Z/hZ, produced by [`Pmf::mod_marginal`].
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueDist {
    pub modulus: u32,
    pub masses: Weights,
}

impl ResidueDist {
    pub fn mass_f64(&self, a: usize) -> f64 {
        self.masses.get_f64(a)
    }

    /// μ̂(b) = Σ_a masses(a) e^{2πiab/h}.
    pub fn fourier_coeff(&self, b: u32) -> Complex64 {
        let h = self.modulus;
        let mut acc = Complex64::zero();
        for a in 0..h as usize {
            let cls = (a as u64 * b as u64 % h as u64) as f64;
            acc += Complex64::from_polar(self.masses.get_f64(a), TAU * cls / h as f64);
        }
        acc
    }

    /// Exact decision of μ̂(b) = 0; `None` in double mode.
    pub fn fourier_coeff_is_zero(&self, b: u32) -> Option<bool> {
        match &self.masses {
            Weights::Exact(m) => Some(cyclo::resonant_value_is_zero(m, b % self.modulus, self.modulus)),
            Weights::Double(_) => None,
        }
    }

    /// Exact max-deviation from uniform; `None` in double mode.
    pub fn uniform_distance_rational(&self) -> Option<Rational> {
        match &self.masses {
            Weights::Exact(m) => {
                let inv = Rational::new(1.into(), (self.modulus as i64).into());
                let mut best = Rational::zero();
                for mass in m {
                    let d = if mass >= &inv {
                        mass - inv.clone()
                    } else {
                        inv.clone() - mass
                    };
                    if d > best {
                        best = d;
                    }
                }
                Some(best)
            }
            Weights::Double(_) => None,
        }
    }
}

/// max_a |d(a) − 1/h|, the coordinatewise distance to uniform.
pub fn uniform_distance(d: &ResidueDist) -> f64 {
    let inv = 1.0 / d.modulus as f64;
    (0..d.modulus as usize)
        .map(|a| (d.mass_f64(a) - inv).abs())
        .fold(0.0, f64::max)
}

/// Exact distribution of S_N (minus the terms listed in `removed`).
///
/// `removed` holds 1-based indices into the row; the empty slice gives the
/// full partial sum. N = 0 yields the point mass at 0.
pub fn sum_pmf(model: &Model, n_param: u64, removed: &[usize]) -> Result<Pmf, DistError> {
    let terms = model.terms_without(n_param, removed)?;
    let mode = terms
        .first()
        .map(|t| t.mode())
        .unwrap_or(NumericMode::Exact);
    let mut acc = Pmf::point_mass(0, mode);
    for rv in &terms {
        acc = acc.convolve_rv(rv)?;
    }
    Ok(acc)
}

/// Mean and variance of a pmf (exact in exact mode).
pub fn pmf_stats(p: &Pmf) -> (f64, f64) {
    p.stats()
}

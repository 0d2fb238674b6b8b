//! Bounded integer-valued random variables.
//!
//! [`IntegerRV`] is the atom of every computation in this crate: a finitely
//! supported distribution on the integers, carried either with exact rational
//! weights or with doubles. Moments, characteristic-function values and
//! derivatives, and residue statistics are all finite sums over the support.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::f64::consts::TAU;

use crate::cyclo;
use crate::resonance::ResonantPoint;

/// Maximum derivative order accepted by [`IntegerRV::char_fn_deriv`].
pub const MAX_DERIVATIVE_ORDER: u32 = 16;

/// Exact rational probability type used throughout the crate.
pub type Rational = BigRational;

/// Whether probabilities are carried exactly or as doubles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumericMode {
    Exact,
    Double,
}

/// Probability weights in one of the two numeric modes.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Exact(Vec<Rational>),
    Double(Vec<f64>),
}

impl Weights {
    pub fn len(&self) -> usize {
        match self {
            Weights::Exact(v) => v.len(),
            Weights::Double(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self) -> NumericMode {
        match self {
            Weights::Exact(_) => NumericMode::Exact,
            Weights::Double(_) => NumericMode::Double,
        }
    }

    pub fn get_f64(&self, i: usize) -> f64 {
        match self {
            Weights::Exact(v) => v[i].to_f64().unwrap_or(f64::NAN),
            Weights::Double(v) => v[i],
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RvError {
    #[error("support must contain at least one point")]
    EmptySupport,
    #[error("duplicate support value {0}")]
    DuplicateSupport(i64),
    #[error("negative weight at support value {0}")]
    NegativeWeight(i64),
    #[error("weights must sum to 1 (sum deviates by {0:e})")]
    WeightSum(f64),
    #[error("all weights are zero")]
    AllZero,
    #[error("derivative order {requested} exceeds the configured maximum {max}")]
    OrderExceeded { requested: u32, max: u32 },
}

/// Finitely supported integer-valued random variable.
///
/// Support values are kept sorted and distinct; weights are nonnegative and
/// sum to one (exactly in exact mode, within `1e-12` in double mode).
#[derive(Debug, Clone, PartialEq)]
pub struct IntegerRV {
    support: Vec<i64>,
    weights: Weights,
}

/// Residue statistics of a variable modulo `h`.
///
/// `most_likely` is the residue of maximal mass and `second_mass` the second
/// largest mass among the `h` residue classes (the multiset convention: for a
/// uniform residue distribution the second mass equals `1/h`). Ties are broken
/// towards the smaller residue.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueProfile {
    pub modulus: u32,
    pub masses: Vec<f64>,
    pub most_likely: u32,
    pub second_residue: u32,
    pub second_mass: f64,
}

impl IntegerRV {
    /// Builds an exact-mode variable from `(value, weight)` pairs.
    pub fn new_exact(pairs: Vec<(i64, Rational)>) -> Result<Self, RvError> {
        let mut pairs = pairs;
        pairs.sort_by_key(|p| p.0);
        if pairs.is_empty() {
            return Err(RvError::EmptySupport);
        }
        let mut sum = Rational::zero();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(RvError::DuplicateSupport(w[0].0));
            }
        }
        for (x, p) in &pairs {
            if p.is_negative() {
                return Err(RvError::NegativeWeight(*x));
            }
            sum += p;
        }
        if !sum.is_one() {
            let dev = (sum.to_f64().unwrap_or(f64::NAN) - 1.0).abs();
            return Err(RvError::WeightSum(dev));
        }
        if pairs.iter().all(|(_, p)| p.is_zero()) {
            return Err(RvError::AllZero);
        }
        let (support, weights) = pairs.into_iter().unzip();
        Ok(IntegerRV {
            support,
            weights: Weights::Exact(weights),
        })
    }

    /// Builds a double-mode variable from `(value, weight)` pairs.
    pub fn new_double(pairs: Vec<(i64, f64)>) -> Result<Self, RvError> {
        let mut pairs = pairs;
        pairs.sort_by_key(|p| p.0);
        if pairs.is_empty() {
            return Err(RvError::EmptySupport);
        }
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(RvError::DuplicateSupport(w[0].0));
            }
        }
        let mut sum = 0.0;
        for (x, p) in &pairs {
            if *p < 0.0 {
                return Err(RvError::NegativeWeight(*x));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(RvError::WeightSum((sum - 1.0).abs()));
        }
        if pairs.iter().all(|(_, p)| *p == 0.0) {
            return Err(RvError::AllZero);
        }
        let (support, weights) = pairs.into_iter().unzip();
        Ok(IntegerRV {
            support,
            weights: Weights::Double(weights),
        })
    }

    /// Deterministic variable sitting at `v`.
    pub fn point_mass(v: i64, mode: NumericMode) -> Self {
        match mode {
            NumericMode::Exact => Self::new_exact(vec![(v, Rational::one())]).unwrap(),
            NumericMode::Double => Self::new_double(vec![(v, 1.0)]).unwrap(),
        }
    }

    /// ±1 with probability 1/2 each.
    pub fn rademacher(mode: NumericMode) -> Self {
        match mode {
            NumericMode::Exact => {
                let half = Rational::new(1.into(), 2.into());
                Self::new_exact(vec![(-1, half.clone()), (1, half)]).unwrap()
            }
            NumericMode::Double => Self::new_double(vec![(-1, 0.5), (1, 0.5)]).unwrap(),
        }
    }

    /// {0,1} with probability 1/2 each.
    pub fn bernoulli_half(mode: NumericMode) -> Self {
        match mode {
            NumericMode::Exact => {
                let half = Rational::new(1.into(), 2.into());
                Self::new_exact(vec![(0, half.clone()), (1, half)]).unwrap()
            }
            NumericMode::Double => Self::new_double(vec![(0, 0.5), (1, 0.5)]).unwrap(),
        }
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn mode(&self) -> NumericMode {
        self.weights.mode()
    }

    /// K' = max |support value|.
    pub fn bound(&self) -> i64 {
        self.support.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn prob_f64(&self, i: usize) -> f64 {
        self.weights.get_f64(i)
    }

    pub fn mean(&self) -> f64 {
        match &self.weights {
            Weights::Exact(_) => self.mean_rational().to_f64().unwrap(),
            Weights::Double(w) => self
                .support
                .iter()
                .zip(w)
                .map(|(x, p)| *x as f64 * p)
                .sum(),
        }
    }

    /// Exact mean; in double mode the weights are lifted to rationals first.
    pub fn mean_rational(&self) -> Rational {
        let mut acc = Rational::zero();
        for (i, x) in self.support.iter().enumerate() {
            acc += self.weight_rational(i) * Rational::from_integer((*x).into());
        }
        acc
    }

    fn weight_rational(&self, i: usize) -> Rational {
        match &self.weights {
            Weights::Exact(w) => w[i].clone(),
            Weights::Double(w) => Rational::from_float(w[i]).unwrap_or_else(Rational::zero),
        }
    }

    pub fn variance(&self) -> f64 {
        self.central_moment(2)
    }

    /// E((X − E X)^q); exact arithmetic in exact mode.
    pub fn central_moment(&self, q: u32) -> f64 {
        match &self.weights {
            Weights::Exact(_) => self.central_moment_rational(q).to_f64().unwrap(),
            Weights::Double(w) => {
                let mu = self.mean();
                self.support
                    .iter()
                    .zip(w)
                    .map(|(x, p)| (*x as f64 - mu).powi(q as i32) * p)
                    .sum()
            }
        }
    }

    /// E((X − E X)^q) as an exact rational (weights lifted in double mode).
    pub fn central_moment_rational(&self, q: u32) -> Rational {
        let mu = self.mean_rational();
        let mut acc = Rational::zero();
        for (i, x) in self.support.iter().enumerate() {
            let d = Rational::from_integer((*x).into()) - mu.clone();
            let mut pow = Rational::one();
            for _ in 0..q {
                pow *= d.clone();
            }
            acc += self.weight_rational(i) * pow;
        }
        acc
    }

    /// φ(t) = E(e^{itX}) = Σ_x p(x) e^{itx}.
    pub fn char_fn(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, x) in self.support.iter().enumerate() {
            let p = self.prob_f64(i);
            acc += Complex64::from_polar(p, t * *x as f64);
        }
        acc
    }

    /// φ evaluated at a resonant angle 2πl/m.
    ///
    /// Angles are reduced modulo 2π before evaluation, and in exact mode an
    /// exactly vanishing value (decided in cyclotomic arithmetic) is returned
    /// as literal zero, so that resonances of exact models keep their zeros of
    /// full multiplicity under floating-point products.
    pub fn char_at_point(&self, pt: &ResonantPoint) -> Complex64 {
        let m = pt.denom() as i64;
        let l = pt.numer() as i64;
        if l == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if self.resonant_zero(pt) {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, x) in self.support.iter().enumerate() {
            let cls = (l * x).rem_euclid(m);
            acc += Complex64::from_polar(self.prob_f64(i), TAU * cls as f64 / m as f64);
        }
        acc
    }

    /// Decides φ(2πl/m) = 0 exactly. Only exact-mode variables get the
    /// cyclotomic test; in double mode a tiny-magnitude snap is used.
    pub fn resonant_zero(&self, pt: &ResonantPoint) -> bool {
        let m = pt.denom();
        let l = pt.numer();
        if l == 0 {
            return false;
        }
        match &self.weights {
            Weights::Exact(w) => {
                let mut masses = vec![Rational::zero(); m as usize];
                for (i, x) in self.support.iter().enumerate() {
                    let cls = (x.rem_euclid(m as i64)) as usize;
                    masses[cls] += w[i].clone();
                }
                cyclo::resonant_value_is_zero(&masses, l, m)
            }
            Weights::Double(_) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, x) in self.support.iter().enumerate() {
                    let cls = (l as i64 * x).rem_euclid(m as i64);
                    acc +=
                        Complex64::from_polar(self.prob_f64(i), TAU * cls as f64 / m as f64);
                }
                acc.norm() < 1e-13
            }
        }
    }

    /// E((iX)^ℓ e^{itX}), or the centered variant E((iX̄)^ℓ e^{itX̄}).
    pub fn char_fn_deriv(&self, t: f64, ell: u32, centered: bool) -> Result<Complex64, RvError> {
        if ell > MAX_DERIVATIVE_ORDER {
            return Err(RvError::OrderExceeded {
                requested: ell,
                max: MAX_DERIVATIVE_ORDER,
            });
        }
        Ok(self.char_fn_deriv_unchecked(t, ell, centered))
    }

    pub(crate) fn char_fn_deriv_unchecked(&self, t: f64, ell: u32, centered: bool) -> Complex64 {
        let shift = if centered { self.mean() } else { 0.0 };
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, x) in self.support.iter().enumerate() {
            let xc = *x as f64 - shift;
            let phase = Complex64::from_polar(self.prob_f64(i), t * xc);
            acc += phase * Complex64::new(0.0, xc).powu(ell);
        }
        acc
    }

    /// Residue statistics mod `h` (`h ≥ 2`), with ties broken towards the
    /// smaller residue.
    pub fn residue_profile(&self, h: u32) -> ResidueProfile {
        assert!(h >= 2, "residue profile needs a modulus of at least 2");
        match &self.weights {
            Weights::Exact(w) => {
                let mut masses = vec![Rational::zero(); h as usize];
                for (i, x) in self.support.iter().enumerate() {
                    masses[(x.rem_euclid(h as i64)) as usize] += w[i].clone();
                }
                let (ml, sr) = top_two(&masses, |a, b| a.cmp(b));
                ResidueProfile {
                    modulus: h,
                    masses: masses.iter().map(|m| m.to_f64().unwrap()).collect(),
                    most_likely: ml as u32,
                    second_residue: sr as u32,
                    second_mass: masses[sr].to_f64().unwrap(),
                }
            }
            Weights::Double(w) => {
                let mut masses = vec![0.0f64; h as usize];
                for (i, x) in self.support.iter().enumerate() {
                    masses[(x.rem_euclid(h as i64)) as usize] += w[i];
                }
                let (ml, sr) = top_two(&masses, |a, b| a.partial_cmp(b).unwrap());
                ResidueProfile {
                    modulus: h,
                    masses: masses.clone(),
                    most_likely: ml as u32,
                    second_residue: sr as u32,
                    second_mass: masses[sr],
                }
            }
        }
    }

    /// q_n(h): the second-largest residue mass mod `h`.
    pub fn second_residue_mass(&self, h: u32) -> f64 {
        self.residue_profile(h).second_mass
    }

    /// P(X ≢ m_n(h) mod h): one minus the top residue mass.
    pub fn off_mode_mass(&self, h: u32) -> f64 {
        let profile = self.residue_profile(h);
        1.0 - profile.masses[profile.most_likely as usize]
    }
}

/// Indices of the largest and second-largest entries under `cmp`, breaking
/// ties towards the smaller index.
fn top_two<T, F>(vals: &[T], cmp: F) -> (usize, usize)
where
    F: Fn(&T, &T) -> std::cmp::Ordering,
{
    use std::cmp::Ordering;
    debug_assert!(vals.len() >= 2);
    let mut best = 0usize;
    for i in 1..vals.len() {
        if cmp(&vals[i], &vals[best]) == Ordering::Greater {
            best = i;
        }
    }
    let mut second = usize::MAX;
    for i in 0..vals.len() {
        if i == best {
            continue;
        }
        if second == usize::MAX || cmp(&vals[i], &vals[second]) == Ordering::Greater {
            second = i;
        }
    }
    (best, second)
}

//! Resonant frequencies of K-bounded lattice sums.
//!
//! A frequency t = 2πl/m with gcd(l, m) = 1 and m ≤ 2K is the only place
//! where the characteristic function of a sum of K-bounded integer terms can
//! fail to decay. This module enumerates those points, computes the
//! per-denominator masses M_N(m), the threshold R(r, K), and the split of
//! indices into heavy terms and a well-behaved tail.

use std::f64::consts::TAU;

use num_integer::Integer;

use crate::dist::Model;

/// A reduced fraction of the circle: t = 2πl/m with gcd(l, m) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResonantPoint {
    numer: u32,
    denom: u32,
}

impl ResonantPoint {
    /// Builds 2πl/m; reduces nothing — `l/m` must already be reduced with
    /// 0 ≤ l < m.
    pub fn new(l: u32, m: u32) -> Option<Self> {
        if m == 0 || l >= m {
            return None;
        }
        if m > 1 && l.gcd(&m) != 1 {
            return None;
        }
        if m == 1 && l != 0 {
            return None;
        }
        Some(ResonantPoint { numer: l, denom: m })
    }

    pub fn zero() -> Self {
        ResonantPoint { numer: 0, denom: 1 }
    }

    pub fn numer(&self) -> u32 {
        self.numer
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.numer == 0
    }

    /// The angle 2πl/m in [0, 2π).
    pub fn angle(&self) -> f64 {
        TAU * self.numer as f64 / self.denom as f64
    }

    /// The fraction l/m as an exact pair for order comparisons.
    fn key(&self) -> (u64, u64) {
        (self.numer as u64, self.denom as u64)
    }

    /// The conjugate point 2π − t (t itself for t ∈ {0, π}).
    pub fn conjugate(&self) -> Self {
        if self.numer == 0 {
            *self
        } else {
            ResonantPoint {
                numer: self.denom - self.numer,
                denom: self.denom,
            }
        }
    }
}

impl std::fmt::Display for ResonantPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "2pi*{}/{}", self.numer, self.denom)
    }
}

/// All reduced fractions 2πl/m with m ≤ 2K, sorted by angle.
pub fn resonant_set(k_bound: i64, include_zero: bool) -> Vec<ResonantPoint> {
    assert!(k_bound >= 1, "the uniform bound K must be at least 1");
    let mut pts = Vec::new();
    if include_zero {
        pts.push(ResonantPoint::zero());
    }
    let max_m = (2 * k_bound) as u32;
    for m in 2..=max_m {
        for l in 1..m {
            if l.gcd(&m) == 1 {
                pts.push(ResonantPoint { numer: l, denom: m });
            }
        }
    }
    // exact fraction order: l1/m1 < l2/m2 iff l1*m2 < l2*m1
    pts.sort_by(|a, b| {
        let (l1, m1) = a.key();
        let (l2, m2) = b.key();
        (l1 * m2).cmp(&(l2 * m1))
    });
    pts
}

/// Minimal circular gap d_ℛ between distinct resonant points (zero included).
pub fn min_resonant_gap(k_bound: i64) -> f64 {
    let pts = resonant_set(k_bound, true);
    // points are fractions of the full circle; include the wrap-around gap
    let mut min_num = u64::MAX;
    let mut min_den = 1u64;
    let smaller = |n1: u64, d1: u64, n2: u64, d2: u64| n1 * d2 < n2 * d1;
    for w in pts.windows(2) {
        let (l1, m1) = w[0].key();
        let (l2, m2) = w[1].key();
        // gap fraction = l2/m2 - l1/m1 = (l2 m1 - l1 m2) / (m1 m2)
        let num = l2 * m1 - l1 * m2;
        let den = m1 * m2;
        if smaller(num, den, min_num, min_den) {
            min_num = num;
            min_den = den;
        }
    }
    let (last_l, last_m) = pts[pts.len() - 1].key();
    let wrap_num = last_m - last_l;
    if smaller(wrap_num, last_m, min_num, min_den) {
        min_num = wrap_num;
        min_den = last_m;
    }
    TAU * min_num as f64 / min_den as f64
}

/// c₀ = (1 − cos d_ℛ)/(4K), the exponent constant of the resonant-point
/// decay bound |Φ_N(2πl/m)| ≤ e^{−c₀ M_N(m)}.
pub fn decay_constant(k_bound: i64) -> f64 {
    (1.0 - min_resonant_gap(k_bound).cos()) / (4.0 * k_bound as f64)
}

/// R(r, K) = (r + 1)/(2c₀): the quantitative-Prokhorov threshold on
/// M_N / ln V_N that makes every nonzero resonant contribution negligible at
/// order r.
pub fn threshold_r(r: u32, k_bound: i64) -> f64 {
    assert!(r >= 1);
    (r as f64 + 1.0) / (2.0 * decay_constant(k_bound))
}

/// The heavy/tail split threshold ε̄ = 1/(8K).
pub fn epsilon_bar(k_bound: i64) -> f64 {
    1.0 / (8.0 * k_bound as f64)
}

/// M_N(m) = Σ_{n ≤ L_N} q_n(m).
pub fn big_m(model: &Model, n_param: u64, m: u32) -> f64 {
    assert!(m >= 2);
    let len = model.row_length(n_param);
    (1..=len)
        .map(|n| model.term(n_param, n).second_residue_mass(m))
        .sum()
}

/// Per-point analysis: the heavy index set, M_N(m), and whether the point's
/// contribution is dropped at order r.
#[derive(Debug, Clone)]
pub struct ResonanceAnalysis {
    pub point: ResonantPoint,
    pub big_m: f64,
    pub heavy_indices: Vec<usize>,
    pub n0: usize,
    pub dropped: bool,
}

/// Splits the indices 1..L_N at ε̄ = 1/(8K) and flags the point as dropped
/// when M_N(m) > R(r, K) · ln V_N (V_N summed from per-term variances).
pub fn analyze_point(
    model: &Model,
    n_param: u64,
    point: &ResonantPoint,
    r: u32,
) -> ResonanceAnalysis {
    assert!(!point.is_zero(), "only nonzero resonant points are analyzed");
    let m = point.denom();
    let eps = epsilon_bar(model.bound());
    let len = model.row_length(n_param);
    let mut heavy = Vec::new();
    let mut big_m_val = 0.0;
    let mut var = 0.0;
    for n in 1..=len {
        let term = model.term(n_param, n);
        let q = term.second_residue_mass(m);
        big_m_val += q;
        var += term.variance();
        if q > eps {
            heavy.push(n);
        }
    }
    let threshold = threshold_r(r, model.bound()) * var.max(f64::MIN_POSITIVE).ln();
    let n0 = heavy.len();
    ResonanceAnalysis {
        point: *point,
        big_m: big_m_val,
        heavy_indices: heavy,
        n0,
        dropped: big_m_val > threshold,
    }
}

//! Classical Edgeworth machinery: Hermite polynomials, the A_{k,N}
//! correction polynomials, and order-r density evaluation at lattice points.
//!
//! The A-polynomials are produced by exponentiating the cumulant series of
//! the standardized sum: writing the log-characteristic function of
//! S̄_N/σ_N as −t²/2 + Σ_{q≥3} g_q (it)^q/(q!·σ^{q−2}) with g_q = κ_q/σ²,
//! the coefficient of σ^{−k} in the exponential of the remainder sum is
//! A_{k,N}(t).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::rv::IntegerRV;
use crate::series::cumulant_series;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EdgeworthError {
    #[error("zero-variance input")]
    ZeroVariance,
    #[error("hermite degree {0} exceeds the supported maximum 64")]
    DegreeTooLarge(u32),
}

/// Probabilists' Hermite polynomial with exact integer coefficients
/// (constant term first).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitePoly {
    degree: u32,
    coeffs: Vec<BigInt>,
}

impl HermitePoly {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap();
        }
        acc
    }
}

/// H_q by the recurrence H_{q+1}(x) = x·H_q(x) − q·H_{q−1}(x).
pub fn hermite(q: u32) -> Result<HermitePoly, EdgeworthError> {
    if q > 64 {
        return Err(EdgeworthError::DegreeTooLarge(q));
    }
    let mut prev = vec![BigInt::from(1)]; // H_0
    if q == 0 {
        return Ok(HermitePoly {
            degree: 0,
            coeffs: prev,
        });
    }
    let mut cur = vec![BigInt::zero(), BigInt::from(1)]; // H_1 = x
    for deg in 1..q {
        let mut next = vec![BigInt::zero(); deg as usize + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c * BigInt::from(deg);
        }
        prev = cur;
        cur = next;
    }
    Ok(HermitePoly {
        degree: q,
        coeffs: cur,
    })
}

/// Values H_0(x)..H_{max_q}(x) by the same recurrence.
pub fn hermite_values(x: f64, max_q: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_q + 1);
    out.push(1.0);
    if max_q == 0 {
        return out;
    }
    out.push(x);
    for q in 1..max_q {
        let next = x * out[q] - q as f64 * out[q - 1];
        out.push(next);
    }
    out
}

/// The standard Gaussian density g(u) = e^{−u²/2}/√(2π).
pub fn gaussian_density(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Order-r Edgeworth data of a sum: the polynomials A_{1,N}..A_{r,N} (in the
/// frequency variable t) together with the mean and σ of the sum.
#[derive(Debug, Clone)]
pub struct EdgeworthData {
    order: u32,
    mean: f64,
    sigma: f64,
    /// polys[k-1][q] is the coefficient of t^q in A_{k,N}.
    polys: Vec<Vec<Complex64>>,
}

/// Builds the A-polynomials of the centered sum of `terms`.
pub fn edgeworth_data(terms: &[IntegerRV], r: u32) -> Result<EdgeworthData, EdgeworthError> {
    assert!(r >= 1);
    let variance: f64 = terms.iter().map(|t| t.variance()).sum();
    if variance <= 0.0 {
        return Err(EdgeworthError::ZeroVariance);
    }
    let sigma = variance.sqrt();
    let mean: f64 = terms.iter().map(|t| t.mean()).sum();

    // kappa_q for q = 3..r+2 from the cumulant series: coeff_q = kappa_q i^q/q!
    let max_q = r as usize + 2;
    let cs = cumulant_series(terms, max_q);
    let mut factorial = vec![1.0f64; max_q + 1];
    for q in 1..=max_q {
        factorial[q] = factorial[q - 1] * q as f64;
    }

    // exponent in the bivariate ring C[t][s]/(s^{r+1}), s standing for 1/sigma:
    // term q contributes g_q i^q t^q / q! at s-power q-2
    let r = r as usize;
    let mut exponent: Vec<Vec<Complex64>> = vec![Vec::new(); r + 1];
    for q in 3..=max_q {
        let s_pow = q - 2;
        if s_pow > r {
            continue;
        }
        // cumulant series coeff already equals kappa_q i^q / q!
        let coeff = cs.coeff(q) / (sigma * sigma) * sigma.powi(s_pow as i32)
            / sigma.powi(s_pow as i32); // g_q i^q / q!
        let mut poly = vec![Complex64::zero(); q + 1];
        poly[q] = coeff;
        exponent[s_pow] = poly;
    }

    let expanded = bivariate_exp(&exponent, r);
    Ok(EdgeworthData {
        order: r as u32,
        mean,
        sigma,
        polys: expanded[1..=r].to_vec(),
    })
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add_into(acc: &mut Vec<Complex64>, other: &[Complex64], scale: f64) {
    if acc.len() < other.len() {
        acc.resize(other.len(), Complex64::zero());
    }
    for (i, c) in other.iter().enumerate() {
        acc[i] += c * scale;
    }
}

/// exp of a bivariate element with zero constant s-term, truncated at s^r.
fn bivariate_exp(exponent: &[Vec<Complex64>], r: usize) -> Vec<Vec<Complex64>> {
    let mut result: Vec<Vec<Complex64>> = vec![Vec::new(); r + 1];
    result[0] = vec![Complex64::new(1.0, 0.0)];
    // power = exponent^j / j!
    let mut power: Vec<Vec<Complex64>> = exponent.to_vec();
    let mut j = 1usize;
    loop {
        let scale = 1.0; // factorial folded in below
        let inv_fact = (1..=j).map(|v| v as f64).product::<f64>().recip();
        let mut any = false;
        for s in 1..=r {
            if !power[s].is_empty() {
                any = true;
                let scaled: Vec<Complex64> =
                    power[s].iter().map(|c| c * inv_fact * scale).collect();
                poly_add_into(&mut result[s], &scaled, 1.0);
            }
        }
        if !any || j >= r {
            break;
        }
        // power <- power * exponent (in s and t simultaneously)
        let mut next: Vec<Vec<Complex64>> = vec![Vec::new(); r + 1];
        for s1 in 1..=r {
            if power[s1].is_empty() {
                continue;
            }
            for s2 in 1..=r {
                if exponent[s2].is_empty() || s1 + s2 > r {
                    continue;
                }
                let prod = poly_mul(&power[s1], &exponent[s2]);
                poly_add_into(&mut next[s1 + s2], &prod, 1.0);
            }
        }
        power = next;
        j += 1;
    }
    result
}

impl EdgeworthData {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Coefficients of A_{k,N} in t (k = 1..r).
    pub fn a_poly(&self, k: u32) -> &[Complex64] {
        &self.polys[k as usize - 1]
    }

    /// Largest t-degree across the stored polynomials.
    pub fn max_degree(&self) -> usize {
        self.polys
            .iter()
            .map(|p| p.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    /// Σ_q c_{w,q} (−i)^{s+q} H_{s+q}(x) summed over w = 0..w_max with the
    /// weight σ^{−w}; the w = 0 layer is (−i)^s H_s(x).
    ///
    /// This is the polynomial part of (2π)^{-1}∫ e^{−ixa} t^s Φ̄(t/σ) dt after
    /// the Gaussian factor is pulled out; `s` is the monomial shift.
    pub fn shifted_hermite_sum(&self, s: usize, x: f64, w_max: u32) -> Complex64 {
        let max_q = s + self.max_degree();
        let herm = hermite_values(x, max_q);
        let mut acc = mi_pow(s) * herm[s];
        let mut sig_pow = 1.0;
        for w in 1..=w_max.min(self.order) {
            sig_pow /= self.sigma;
            let poly = self.a_poly(w);
            let mut layer = Complex64::zero();
            for (q, c) in poly.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                layer += c * mi_pow(s + q) * herm[s + q];
            }
            acc += layer * sig_pow;
        }
        acc
    }

    /// Order-r density at the lattice point k:
    /// Σ_{b=1}^r P_{b,N}(k_N) g(k_N)/σ^b with P_1 ≡ 1.
    pub fn density(&self, k: i64) -> f64 {
        let x = (k as f64 - self.mean) / self.sigma;
        self.density_scaled(x)
    }

    /// Same density as a function of the standardized coordinate.
    pub fn density_scaled(&self, x: f64) -> f64 {
        let val = self.shifted_hermite_sum(0, x, self.order.saturating_sub(1))
            * gaussian_density(x)
            / self.sigma;
        debug_assert!(
            val.im.abs() <= 1e-12 * (1.0 + val.re.abs()),
            "imaginary residue {} too large",
            val.im
        );
        val.re
    }
}

/// (−i)^n without trigonometry.
pub(crate) fn mi_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Evaluates the classical order-r density of `ed` at the lattice point `k`.
pub fn classical_density(ed: &EdgeworthData, k: i64) -> f64 {
    ed.density(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{sum_pmf, Model};
    use crate::rv::NumericMode;

    #[test]
    fn hermite_examples() {
        let h0 = hermite(0).unwrap();
        assert_eq!(h0.coeffs(), &[BigInt::from(1)]);

        let h3 = hermite(3).unwrap();
        assert_eq!(
            h3.coeffs(),
            &[
                BigInt::from(0),
                BigInt::from(-3),
                BigInt::from(0),
                BigInt::from(1)
            ]
        );

        let h5 = hermite(5).unwrap();
        assert_eq!(h5.eval(0.0), 0.0, "odd polynomial at 0");

        assert!(matches!(hermite(65), Err(EdgeworthError::DegreeTooLarge(65))));

        // recurrence consistency and parity up to degree 10
        for q in 2..=10u32 {
            let hq = hermite(q).unwrap();
            let hq1 = hermite(q - 1).unwrap();
            let hq2 = hermite(q - 2).unwrap();
            for &x in &[-1.7, -0.3, 0.9, 2.4] {
                let rec = x * hq1.eval(x) - (q - 1) as f64 * hq2.eval(x);
                assert!((hq.eval(x) - rec).abs() < 1e-9 * (1.0 + rec.abs()));
                let parity = if q % 2 == 0 { 1.0 } else { -1.0 };
                assert!((hq.eval(-x) - parity * hq.eval(x)).abs() < 1e-9);
            }
            // leading coefficient 1
            assert_eq!(hq.coeffs().last().unwrap(), &BigInt::from(1));
        }
    }

    #[test]
    fn hermite_values_match_polynomials() {
        for &x in &[-2.3, 0.0, 0.7, 3.1] {
            let vals = hermite_values(x, 12);
            for q in 0..=12u32 {
                let hq = hermite(q).unwrap();
                let expect = hq.eval(x);
                assert!(
                    (vals[q as usize] - expect).abs() < 1e-8 * (1.0 + expect.abs()),
                    "q={q} x={x}"
                );
            }
        }
    }

    #[test]
    fn hermite_orthogonality_quadrature() {
        // integral H_p H_q g over a wide interval, Simpson quadrature
        let n = 20_000usize;
        let (a, b) = (-12.0f64, 12.0);
        let hstep = (b - a) / n as f64;
        for p in 0..=6u32 {
            for q in 0..=6u32 {
                let f = |x: f64| {
                    hermite_values(x, 6)[p as usize]
                        * hermite_values(x, 6)[q as usize]
                        * gaussian_density(x)
                };
                let mut acc = f(a) + f(b);
                for i in 1..n {
                    let x = a + i as f64 * hstep;
                    acc += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                let integral = acc * hstep / 3.0;
                let expect = if p == q {
                    (1..=p).map(|v| v as f64).product::<f64>()
                } else {
                    0.0
                };
                assert!(
                    (integral - expect).abs() < 1e-8 * (1.0 + expect),
                    "p={p} q={q}: {integral} vs {expect}"
                );
            }
        }
    }

    fn gamma_and_lambda4(terms: &[IntegerRV]) -> (f64, f64, f64) {
        let var: f64 = terms.iter().map(|t| t.variance()).sum();
        let kappa3: f64 = terms.iter().map(|t| t.central_moment(3)).sum();
        let kappa4: f64 = terms
            .iter()
            .map(|t| t.central_moment(4) - 3.0 * t.variance() * t.variance())
            .sum();
        (kappa3 / var, kappa4, var.sqrt())
    }

    #[test]
    fn a_polynomials_match_closed_forms() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for trial in 0..50 {
            let k_bound = rng.gen_range(1..=3i64);
            let n = rng.gen_range(1..=50usize);
            let mut terms = Vec::new();
            for _ in 0..n {
                let mut vals: Vec<i64> = (-k_bound..=k_bound).collect();
                let size = rng.gen_range(2..=vals.len());
                let mut pairs = Vec::new();
                for _ in 0..size {
                    let i = rng.gen_range(0..vals.len());
                    pairs.push((vals.swap_remove(i), rng.gen_range(0.05..1.0)));
                }
                let total: f64 = pairs.iter().map(|p| p.1).sum();
                terms.push(
                    IntegerRV::new_double(
                        pairs.into_iter().map(|(v, p)| (v, p / total)).collect(),
                    )
                    .unwrap(),
                );
            }
            let ed = edgeworth_data(&terms, 2).unwrap();
            let (gamma, lambda4, sigma) = gamma_and_lambda4(&terms);

            // A_1(t) = -(i/6) gamma t^3
            let a1 = ed.a_poly(1);
            assert!(a1.len() == 4 || gamma.abs() < 1e-12, "trial {trial}");
            let expect_t3 = Complex64::new(0.0, -gamma / 6.0);
            let got_t3 = if a1.len() > 3 { a1[3] } else { Complex64::zero() };
            assert!(
                (got_t3 - expect_t3).norm() < 1e-12 * (1.0 + expect_t3.norm()),
                "trial {trial}: A_1 t^3 {got_t3} vs {expect_t3}"
            );
            for (q, c) in a1.iter().enumerate() {
                if q != 3 {
                    assert!(c.norm() < 1e-13, "A_1 stray coefficient t^{q}");
                }
            }

            // A_2(t) = Lambda_4 sigma^{-2} t^4/4! - gamma^2 t^6/72
            let a2 = ed.a_poly(2);
            let get = |q: usize| {
                if q < a2.len() {
                    a2[q]
                } else {
                    Complex64::zero()
                }
            };
            let expect_t4 = Complex64::new(lambda4 / (sigma * sigma) / 24.0, 0.0);
            let expect_t6 = Complex64::new(-gamma * gamma / 72.0, 0.0);
            assert!(
                (get(4) - expect_t4).norm() < 1e-12 * (1.0 + expect_t4.norm()),
                "trial {trial}: t^4 {} vs {expect_t4}",
                get(4)
            );
            assert!(
                (get(6) - expect_t6).norm() < 1e-12 * (1.0 + expect_t6.norm()),
                "trial {trial}: t^6 {} vs {expect_t6}",
                get(6)
            );
            // odd cubic / degree bounds
            assert!(a1.len() <= 4 && a2.len() <= 7);
        }
    }

    #[test]
    fn a2_sixth_power_constant_is_right() {
        // Adjudicates the t^6 coefficient of A_2 against the characteristic
        // function itself: with the coefficient -gamma^2/72 the residual of
        // e^{-t^2/2}(1 + A_1/sigma + A_2/sigma^2) is third order in 1/sigma;
        // with -gamma^2/36 it would be second order.
        let p = IntegerRV::new_double(vec![(0, 0.7), (1, 0.3)]).unwrap();
        let t = 2.0f64;
        let mut resid = Vec::new();
        for &n in &[400usize, 1600] {
            let terms = vec![p.clone(); n];
            let ed = edgeworth_data(&terms, 2).unwrap();
            let sigma = ed.sigma();
            // exact standardized characteristic function
            let phi_one = |u: f64| p.char_fn_deriv(u, 0, true).unwrap();
            let exact = phi_one(t / sigma).powu(n as u32);
            let a1 = ed.a_poly(1);
            let a2 = ed.a_poly(2);
            let eval = |poly: &[Complex64]| {
                poly.iter()
                    .enumerate()
                    .fold(Complex64::zero(), |acc, (q, c)| acc + c * t.powi(q as i32))
            };
            let approx = (-t * t / 2.0).exp()
                * (Complex64::new(1.0, 0.0) + eval(a1) / sigma + eval(a2) / (sigma * sigma));
            resid.push((exact - approx).norm() * sigma.powi(3));
        }
        // third-order residual stays bounded under sigma^3 scaling
        assert!(
            resid[0] < 5.0 && resid[1] < 5.0,
            "sigma^3-scaled residuals {resid:?}"
        );
    }

    #[test]
    fn symmetric_terms_kill_a1() {
        let rad = IntegerRV::rademacher(NumericMode::Double);
        let ed = edgeworth_data(&vec![rad; 9], 2).unwrap();
        for c in ed.a_poly(1) {
            assert!(c.norm() < 1e-14);
        }
        // A_2 of one Rademacher: Lambda_4 = -2, gamma = 0 -> -t^4/12
        let ed = edgeworth_data(&[IntegerRV::rademacher(NumericMode::Double)], 2).unwrap();
        let a2 = ed.a_poly(2);
        assert!((a2[4] - Complex64::new(-1.0 / 12.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn density_examples() {
        // r = 1 is the plain Gaussian term
        let b = IntegerRV::bernoulli_half(NumericMode::Double);
        let ed = edgeworth_data(&vec![b; 4], 1).unwrap();
        assert_eq!(ed.sigma(), 1.0);
        let d = classical_density(&ed, 2);
        assert!((d - gaussian_density(0.0)).abs() < 1e-14);
        assert!((d - 0.39894).abs() < 1e-4);
        // oracle comparison: exact value is 0.375
        assert!((d - 0.375).abs() < 0.03);

        // symmetric model: r = 2 equals r = 1 at the central point
        let rad = IntegerRV::rademacher(NumericMode::Double);
        let terms = vec![rad; 16];
        let ed1 = edgeworth_data(&terms, 1).unwrap();
        let ed2 = edgeworth_data(&terms, 2).unwrap();
        assert!((classical_density(&ed1, 0) - classical_density(&ed2, 0)).abs() < 1e-14);
    }

    #[test]
    fn density_sums_to_one() {
        let rv = IntegerRV::new_double(vec![(0, 0.3), (1, 0.4), (2, 0.3)]).unwrap();
        for r in 1..=3u32 {
            let terms = vec![rv.clone(); 60];
            let ed = edgeworth_data(&terms, r).unwrap();
            let lo = (ed.mean() - 8.0 * ed.sigma()).floor() as i64;
            let hi = (ed.mean() + 8.0 * ed.sigma()).ceil() as i64;
            let total: f64 = (lo..=hi).map(|k| classical_density(&ed, k)).sum();
            assert!(
                (total - 1.0).abs() < 3.0 / ed.sigma().powi(r as i32),
                "r={r}: sum {total}"
            );
        }
    }

    #[test]
    fn scaled_error_decays_with_doubling() {
        // aperiodic iid case: sigma^r-scaled sup error decreases along doubling
        let rv = IntegerRV::new_double(vec![(0, 0.3), (1, 0.4), (2, 0.3)]).unwrap();
        for r in 1..=3u32 {
            let mut prev = f64::INFINITY;
            for &n in &[50u64, 100, 200, 400] {
                let model = Model::iid(rv.clone());
                let pmf = sum_pmf(&model, n, &[]).unwrap();
                let terms = model.terms(n);
                let ed = edgeworth_data(&terms, r).unwrap();
                let mut sup = 0.0f64;
                for k in pmf.offset()..=pmf.max() {
                    sup = sup.max((pmf.prob(k) - classical_density(&ed, k)).abs());
                }
                let scaled = sup * ed.sigma().powi(r as i32);
                assert!(
                    scaled < prev * 1.05,
                    "r={r} N={n}: scaled error {scaled} vs previous {prev}"
                );
                prev = scaled;
            }
        }
    }

    #[test]
    fn zero_variance_is_an_error() {
        let pt = IntegerRV::point_mass(3, NumericMode::Double);
        assert_eq!(
            edgeworth_data(&[pt], 1).unwrap_err(),
            EdgeworthError::ZeroVariance
        );
    }
}

//! Exact vanishing tests for sums of rational multiples of roots of unity.
//!
//! A value Σ_a c_a ω_m^{a} with rational c_a is zero precisely when the
//! polynomial Σ_a c_a x^a is divisible by the m-th cyclotomic polynomial.
//! This gives a decision procedure for "the characteristic function vanishes
//! exactly at 2πl/m" that never touches floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Coefficients of the m-th cyclotomic polynomial, constant term first.
pub fn cyclotomic(m: u32) -> Vec<BigInt> {
    assert!(m >= 1);
    // phi_m = (x^m - 1) / prod_{d | m, d < m} phi_d, computed by exact division
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m % d == 0 {
            let phi_d = cyclotomic(d);
            num = divide_exact(&num, &phi_d);
        }
    }
    num
}

/// Exact polynomial division `num / den` over the integers; panics on a
/// nonzero remainder (cannot happen for cyclotomic factors).
fn divide_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "cyclotomic polynomials are monic");
    let nd = rem.len() - 1;
    assert!(nd >= dd);
    let mut quot = vec![BigInt::zero(); nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd].clone();
        quot[k] = c.clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[k + j] -= &c * dj;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact division");
    quot
}

/// Decides Σ_a masses[a]·ω_m^{l·a} = 0 exactly, where ω_m = e^{2πi/m}.
///
/// `masses` lists the coefficient of ω^a for a = 0..m−1.
pub fn resonant_value_is_zero(masses: &[BigRational], l: u32, m: u32) -> bool {
    assert_eq!(masses.len(), m as usize);
    let mut poly = vec![BigRational::zero(); m as usize];
    for (a, mass) in masses.iter().enumerate() {
        let e = ((l as u64 * a as u64) % m as u64) as usize;
        poly[e] += mass;
    }
    // reduce mod phi_m over the rationals
    let phi: Vec<BigRational> = cyclotomic(m)
        .into_iter()
        .map(BigRational::from_integer)
        .collect();
    let dd = phi.len() - 1;
    let mut rem = poly;
    while rem.len() > dd {
        let k = rem.len() - 1;
        let c = rem[k].clone();
        if !c.is_zero() {
            for j in 0..=dd {
                let idx = k - dd + j;
                let sub = c.clone() * phi[j].clone();
                rem[idx] -= sub;
            }
        }
        rem.pop();
    }
    rem.iter().all(|c| c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic(1), vec![int(-1), int(1)]);
        assert_eq!(cyclotomic(2), vec![int(1), int(1)]);
        assert_eq!(cyclotomic(3), vec![int(1), int(1), int(1)]);
        assert_eq!(cyclotomic(4), vec![int(1), int(0), int(1)]);
        assert_eq!(cyclotomic(6), vec![int(1), int(-1), int(1)]);
        assert_eq!(
            cyclotomic(12),
            vec![int(1), int(0), int(-1), int(0), int(1)]
        );
    }

    #[test]
    fn uniform_masses_vanish() {
        for m in 2..=9u32 {
            let masses =
                vec![BigRational::new(1.into(), (m as i64).into()); m as usize];
            for l in 1..m {
                assert!(resonant_value_is_zero(&masses, l, m), "m={m} l={l}");
            }
        }
    }

    #[test]
    fn nonuniform_masses_do_not_vanish() {
        // (3/4, 1/4) at pi: 3/4 - 1/4 != 0
        let masses = vec![
            BigRational::new(3.into(), 4.into()),
            BigRational::new(1.into(), 4.into()),
        ];
        assert!(!resonant_value_is_zero(&masses, 1, 2));

        // but a genuine cancellation not coming from uniformity: masses on
        // residues {0,2} of m=4 equal -> value at l=1 is (1/2)(1 + i^2) = 0
        let mut masses = vec![BigRational::zero(); 4];
        masses[0] = BigRational::new(1.into(), 2.into());
        masses[2] = BigRational::new(1.into(), 2.into());
        assert!(resonant_value_is_zero(&masses, 1, 4));
        assert!(!resonant_value_is_zero(&masses, 2, 4));
    }

    #[test]
    fn point_mass_never_vanishes() {
        for m in 2..=8u32 {
            let mut masses = vec![BigRational::zero(); m as usize];
            masses[1] = BigRational::one();
            for l in 1..m {
                assert!(!resonant_value_is_zero(&masses, l, m));
            }
        }
    }
}

//! Exact rational ground truth for the floating-point paths.
//!
//! Everything that the closed-form translation machinery computes in doubles
//! is, up to a global factor of sqrt(pi), a rational number in disguise. This
//! module recomputes those quantities with `BigRational` so tests can assert
//! exact zeros and compare against values with no rounding at all. It is used
//! only by the test suites and the `verify --rational` path; the production
//! code never touches it.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::specfun::HalfInteger;
use crate::{domain_err, Result};

pub fn ratio_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// twice / 2 as an exact rational.
pub fn ratio_half(twice: i64) -> BigRational {
    BigRational::new(BigInt::from(twice), BigInt::from(2))
}

/// Exact dyadic rational equal to the given finite double.
pub fn ratio_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float required")
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

pub fn ratio_pow_int(r: &BigRational, e: i32) -> BigRational {
    r.pow(e)
}

pub fn factorial_rational(n: u32) -> BigRational {
    let mut acc = BigInt::one();
    for i in 2..=n as u64 {
        acc *= BigInt::from(i);
    }
    BigRational::from_integer(acc)
}

/// (c)_k = c (c+1) ... (c+k-1).
pub fn pochhammer_rational(c: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..k {
        acc *= c + ratio_int(i as i64);
    }
    acc
}

/// C(a, k) = a (a-1) ... (a-k+1) / k!.
pub fn binom_general_rational(a: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..k {
        acc *= a - ratio_int(i as i64);
    }
    acc / factorial_rational(k)
}

/// Exact counterpart of [`crate::specfun::hyp2f1_finite`]:
/// (1/q!) sum_{s=0..q} (-1)^s (-q)_s (1-p-q+s-j)_{q-s} (j)_s / s!.
pub fn hyp2f1_finite_rational(j: u32, q: u32, p: u32) -> BigRational {
    let mut sum = BigRational::zero();
    for s in 0..=q {
        let term = pochhammer_rational(&ratio_int(-(q as i64)), s)
            * pochhammer_rational(
                &ratio_int(1 - p as i64 - q as i64 + s as i64 - j as i64),
                q - s,
            )
            * pochhammer_rational(&ratio_int(j as i64), s)
            / factorial_rational(s);
        if s % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum / factorial_rational(q)
}

/// Coefficients of L_k^(alpha)(x) in ascending powers of x:
/// coeff_j = (-1)^j C(k+alpha, k-j) / j!.
pub fn laguerre_coeffs_rational(k: u32, alpha: HalfInteger) -> Vec<BigRational> {
    let a = ratio_half(alpha.twice_value);
    (0..=k)
        .map(|j| {
            let c = binom_general_rational(&(&a + ratio_int(k as i64)), k - j)
                / factorial_rational(j);
            if j % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect()
}

/// L_k^(l+1/2)(x) evaluated exactly at a double argument, then rounded once.
pub fn laguerre_rational_at(k: u32, l: i64, x: f64) -> f64 {
    let coeffs = laguerre_coeffs_rational(k, HalfInteger::plus_half(l));
    let xr = ratio_from_f64(x);
    let mut acc = BigRational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * &xr + c;
    }
    to_f64(&acc)
}

/// Gamma(m + 1/2) / sqrt(pi) = (m+1)_m 4^(-m), exactly.
pub fn gamma_half_over_sqrt_pi(m: u32) -> BigRational {
    pochhammer_rational(&ratio_int(m as i64 + 1), m) * ratio_int(4).pow(-(m as i32))
}

fn triangle_ok(l1: i64, l2: i64, l3: i64) -> bool {
    (l1 - l2).abs() <= l3 && l3 <= l1 + l2
}

/// Wigner 3j symbol for integer angular momenta, exactly, as
/// (sign, square): the symbol equals sign * sqrt(square).
///
/// Same Racah single sum as the floating-point path, but in rationals, so
/// structural zeros come out as exact zeros.
pub fn wigner3j_exact(l1: i64, l2: i64, l3: i64, m1: i64, m2: i64, m3: i64) -> (i8, BigRational) {
    if m1 + m2 + m3 != 0 || !triangle_ok(l1, l2, l3) {
        return (0, BigRational::zero());
    }
    if m1 == 0 && m2 == 0 && m3 == 0 && (l1 + l2 + l3) % 2 != 0 {
        return (0, BigRational::zero());
    }
    let fact = |n: i64| -> BigRational {
        assert!(n >= 0);
        factorial_rational(n as u32)
    };
    let delta = fact(l1 + l2 - l3) * fact(l1 - l2 + l3) * fact(-l1 + l2 + l3)
        / fact(l1 + l2 + l3 + 1);
    let norm = fact(l1 + m1) * fact(l1 - m1) * fact(l2 + m2) * fact(l2 - m2) * fact(l3 + m3)
        * fact(l3 - m3);
    let t_lo = 0.max(l2 - l3 - m1).max(l1 - l3 + m2);
    let t_hi = (l1 + l2 - l3).min(l1 - m1).min(l2 + m2);
    let mut s = BigRational::zero();
    for t in t_lo..=t_hi {
        let denom = fact(t)
            * fact(l1 + l2 - l3 - t)
            * fact(l1 - m1 - t)
            * fact(l2 + m2 - t)
            * fact(l3 - l2 + m1 + t)
            * fact(l3 - l1 - m2 + t);
        let term = denom.recip();
        if t % 2 == 0 {
            s += term;
        } else {
            s -= term;
        }
    }
    if s.is_zero() {
        return (0, BigRational::zero());
    }
    let mut sign = if s.is_negative() { -1i8 } else { 1 };
    if (l1 - l2 - m3).rem_euclid(2) != 0 {
        sign = -sign;
    }
    let square = delta * norm * (&s * &s);
    (sign, square)
}

/// Exact D_pq / sqrt(pi):
/// sum_{j=0..n-l-1} [(-1)^j / j!] C(n-1/2, n-l-1-j) (Gamma(mu+j+1/2)/sqrt(pi))
///                  (k-mu-j+1)_p hyp2f1_finite(j, q, p)
/// with mu = n' + (l - l' + k)/2. Domain error when l - l' + k is odd.
pub fn d_pq_over_sqrt_pi(
    n: u32,
    n_p: u32,
    l: u32,
    l_p: u32,
    k: u32,
    p: u32,
    q: u32,
) -> Result<BigRational> {
    let parity = l as i64 - l_p as i64 + k as i64;
    if parity.rem_euclid(2) != 0 {
        return domain_err(format!("d_pq: l - l' + k = {parity} must be even"));
    }
    let mu = n_p as i64 + (l as i64 - l_p as i64 + k as i64) / 2;
    assert!(mu >= 0, "mu is nonnegative whenever the triangle condition holds");
    let mut sum = BigRational::zero();
    let n_half = ratio_half(2 * n as i64 - 1);
    for j in 0..=(n - l - 1) {
        let term = binom_general_rational(&n_half, n - l - 1 - j)
            * gamma_half_over_sqrt_pi((mu + j as i64) as u32)
            * pochhammer_rational(&ratio_int(k as i64 - mu - j as i64 + 1), p)
            * hyp2f1_finite_rational(j, q, p)
            / factorial_rational(j);
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_primitives() {
        assert_eq!(to_f64(&ratio_half(3)), 1.5);
        assert_eq!(to_f64(&factorial_rational(5)), 120.0);
        assert_eq!(to_f64(&pochhammer_rational(&ratio_int(3), 2)), 12.0);
        assert_eq!(to_f64(&binom_general_rational(&ratio_int(-2), 2)), 3.0);
        assert_eq!(to_f64(&ratio_from_f64(0.25)), 0.25);
    }

    #[test]
    fn hyp2f1_finite_rational_pinned() {
        assert!(hyp2f1_finite_rational(0, 1, 0).is_zero());
        assert!(hyp2f1_finite_rational(1, 1, 0).is_zero());
        assert_eq!(to_f64(&hyp2f1_finite_rational(1, 0, 1)), 1.0);
        assert_eq!(to_f64(&hyp2f1_finite_rational(0, 0, 3)), 1.0);
        assert_eq!(to_f64(&hyp2f1_finite_rational(2, 2, 0)), 2.0);
    }

    #[test]
    fn laguerre_constant_term_is_binomial() {
        // L_2^(1/2)(0) = C(2 + 1/2, 2) = 15/8.
        let coeffs = laguerre_coeffs_rational(2, HalfInteger::plus_half(0));
        assert_eq!(to_f64(&coeffs[0]), 15.0 / 8.0);
    }

    #[test]
    fn gamma_half_ratios() {
        assert_eq!(to_f64(&gamma_half_over_sqrt_pi(0)), 1.0);
        assert_eq!(to_f64(&gamma_half_over_sqrt_pi(1)), 0.5);
        assert_eq!(to_f64(&gamma_half_over_sqrt_pi(2)), 0.75);
        assert_eq!(to_f64(&gamma_half_over_sqrt_pi(3)), 15.0 / 8.0);
    }

    #[test]
    fn wigner3j_exact_known_squares() {
        // (1 1 2; 0 0 0) = sqrt(2/15).
        let (sign, sq) = wigner3j_exact(1, 1, 2, 0, 0, 0);
        assert_eq!(sign, 1);
        assert_eq!(sq, BigRational::new(BigInt::from(2), BigInt::from(15)));
        // (0 0 0; 0 0 0) = 1.
        let (sign, sq) = wigner3j_exact(0, 0, 0, 0, 0, 0);
        assert_eq!(sign, 1);
        assert!(sq.is_one());
        // Odd sum with all-zero projections vanishes identically.
        let (sign, sq) = wigner3j_exact(1, 1, 1, 0, 0, 0);
        assert_eq!(sign, 0);
        assert!(sq.is_zero());
        // (1 1 0; 1 -1 0) = 1/sqrt(3).
        let (sign, sq) = wigner3j_exact(1, 1, 0, 1, -1, 0);
        assert_eq!(sign, 1);
        assert_eq!(sq, BigRational::new(BigInt::from(1), BigInt::from(3)));
    }
}

//! Scalar special functions underlying the SGL basis.
//!
//! Everything here is elementary but precision-critical: generalized Laguerre
//! polynomials, spherical harmonics, spherical Bessel functions, half-integer
//! gamma values, Pochhammer symbols, generalized binomial coefficients, and
//! two hypergeometric sums. Factorial-heavy quantities are carried in
//! sign/log-magnitude form ([`SignedLogReal`]) so that callers can delay
//! exponentiation until whole terms have been assembled.

use num_complex::Complex64;

use crate::{domain_err, Result};

/// Exact integer or half-odd-integer, stored as twice its value.
///
/// Orders and Laguerre superscripts in this crate are of the form `l + 1/2`;
/// carrying them exactly avoids spurious `0.4999...` parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HalfInteger {
    /// Twice the represented value, so `3/2` is stored as `3`.
    pub twice_value: i64,
}

impl HalfInteger {
    pub fn new(twice_value: i64) -> Self {
        Self { twice_value }
    }

    /// The integer `n`.
    pub fn integer(n: i64) -> Self {
        Self { twice_value: 2 * n }
    }

    /// The half-odd-integer `n + 1/2`.
    pub fn plus_half(n: i64) -> Self {
        Self { twice_value: 2 * n + 1 }
    }

    pub fn is_integer(self) -> bool {
        self.twice_value % 2 == 0
    }

    pub fn as_f64(self) -> f64 {
        self.twice_value as f64 / 2.0
    }
}

impl std::fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice_value / 2)
        } else {
            write!(f, "{}/2", self.twice_value)
        }
    }
}

/// A real number as `sign * exp(log_magnitude)`.
///
/// `sign == 0` if and only if the value is exactly zero, in which case
/// `log_magnitude` is negative infinity. Multiplication and division never
/// overflow; conversion back to `f64` is the only lossy step.
#[derive(Clone, Copy, Debug)]
pub struct SignedLogReal {
    pub sign: i8,
    pub log_magnitude: f64,
}

impl SignedLogReal {
    pub fn zero() -> Self {
        Self { sign: 0, log_magnitude: f64::NEG_INFINITY }
    }

    pub fn one() -> Self {
        Self { sign: 1, log_magnitude: 0.0 }
    }

    pub fn new(sign: i8, log_magnitude: f64) -> Self {
        debug_assert!(sign == -1 || sign == 0 || sign == 1);
        if sign == 0 {
            Self::zero()
        } else {
            Self { sign, log_magnitude }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::zero()
        } else {
            Self { sign: if x > 0.0 { 1 } else { -1 }, log_magnitude: x.abs().ln() }
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(self) -> f64 {
        self.sign as f64 * self.log_magnitude.exp()
    }

    /// Raise to an integer power. `x^0 = 1` for every `x`, including zero.
    pub fn powi(self, e: i32) -> Self {
        if e == 0 {
            return Self::one();
        }
        if self.sign == 0 {
            assert!(e > 0, "0 raised to a negative power");
            return Self::zero();
        }
        let sign = if self.sign < 0 && e % 2 != 0 { -1 } else { 1 };
        Self { sign, log_magnitude: self.log_magnitude * e as f64 }
    }
}

impl std::ops::Mul for SignedLogReal {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::zero();
        }
        Self { sign: self.sign * rhs.sign, log_magnitude: self.log_magnitude + rhs.log_magnitude }
    }
}

impl std::ops::Div for SignedLogReal {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.sign != 0, "division by log-domain zero");
        if self.sign == 0 {
            return Self::zero();
        }
        Self { sign: self.sign * rhs.sign, log_magnitude: self.log_magnitude - rhs.log_magnitude }
    }
}

impl std::ops::Neg for SignedLogReal {
    type Output = Self;
    fn neg(self) -> Self {
        Self { sign: -self.sign, log_magnitude: self.log_magnitude }
    }
}

/// Compensated accumulator. The `1e-14` log-ratio guarantees on
/// [`gamma_half`] rely on summing dozens of logarithms without drift.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum
    }
}

/// ln(n!) by compensated summation of ln(i).
pub(crate) fn ln_factorial(n: u32) -> f64 {
    let mut acc = KahanSum::default();
    for i in 2..=n as u64 {
        acc.add((i as f64).ln());
    }
    acc.value()
}

/// Gamma(n + 1/2) in sign/log form.
///
/// Gamma(1/2) = sqrt(pi) and Gamma(x+1) = x Gamma(x), so the log-magnitude is
/// ln(sqrt(pi)) + sum_{i=1..n} ln(i - 1/2). The sum is compensated, which
/// keeps ratios of neighboring values accurate to ~1e-15 even for large n.
pub fn gamma_half(n: u32) -> SignedLogReal {
    let mut acc = KahanSum::default();
    acc.add(0.5 * std::f64::consts::PI.ln());
    for i in 1..=n as u64 {
        acc.add((i as f64 - 0.5).ln());
    }
    SignedLogReal::new(1, acc.value())
}

/// Pochhammer symbol (c)_k = c (c+1) ... (c+k-1), with (c)_0 = 1.
pub fn pochhammer(c: f64, k: u32) -> f64 {
    let mut p = 1.0;
    for i in 0..k {
        p *= c + i as f64;
    }
    p
}

/// Generalized binomial coefficient C(a, k) = a (a-1) ... (a-k+1) / k!.
pub fn binom_general(a: f64, k: u32) -> f64 {
    let mut num = 1.0;
    let mut den = 1.0;
    for i in 0..k {
        num *= a - i as f64;
        den *= (i + 1) as f64;
    }
    num / den
}

/// Generalized Laguerre polynomial L_k^(alpha)(x) as the finite sum
/// sum_{j=0..k} (-1)^j C(k+alpha, k-j) x^j / j!.
///
/// Returns a domain error for alpha <= -1, where the weight x^alpha e^(-x)
/// is not integrable and the orthogonality theory breaks down.
pub fn laguerre(k: u32, alpha: HalfInteger, x: f64) -> Result<f64> {
    let a = alpha.as_f64();
    if a <= -1.0 {
        return domain_err(format!("laguerre: alpha = {alpha} must exceed -1"));
    }
    let mut sum = KahanSum::default();
    let mut x_pow_over_fact = 1.0;
    for j in 0..=k {
        let coeff = binom_general(k as f64 + a, k - j);
        let term = if j % 2 == 0 { coeff * x_pow_over_fact } else { -coeff * x_pow_over_fact };
        sum.add(term);
        x_pow_over_fact *= x / (j + 1) as f64;
    }
    Ok(sum.value())
}

/// Normalized associated Legendre values P~_l^m(x) for all 0 <= m <= l <= l_max,
/// Condon-Shortley phase included, packed as [(l,m)] with index l(l+1)/2 + m.
///
/// The normalization is the spherical-harmonic one: Y_lm = P~_l^m(cos theta) e^(i m phi)
/// for m >= 0. Stable three-term recurrences, no factorial overflow.
fn normalized_legendre(l_max: u32, x: f64, sin_theta: f64) -> Vec<f64> {
    let lm = l_max as usize;
    let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let mut p = vec![0.0; (lm + 1) * (lm + 2) / 2];
    p[0] = 0.5 / std::f64::consts::PI.sqrt();
    // Diagonal: P~_m^m = -sqrt((2m+1)/(2m)) sin(theta) P~_{m-1}^{m-1}.
    for m in 1..=lm {
        p[idx(m, m)] = -((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * sin_theta * p[idx(m - 1, m - 1)];
    }
    // First subdiagonal: P~_{m+1}^m = sqrt(2m+3) x P~_m^m.
    for m in 0..lm {
        p[idx(m + 1, m)] = ((2 * m + 3) as f64).sqrt() * x * p[idx(m, m)];
    }
    // Remaining: P~_l^m = a (x P~_{l-1}^m - b P~_{l-2}^m).
    for m in 0..=lm {
        for l in (m + 2)..=lm {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            p[idx(l, m)] = a * (x * p[idx(l - 1, m)] - b * p[idx(l - 2, m)]);
        }
    }
    p
}

/// Spherical harmonic Y_lm(theta, phi), orthonormal on the unit sphere,
/// Condon-Shortley phase convention.
///
/// Negative orders follow Y_{l,-|m|} = (-1)^|m| conj(Y_{l,|m|}) evaluated
/// directly, so conj(Y_lm) = (-1)^m Y_{l,-m} holds to machine precision.
pub fn sph_harm(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return domain_err(format!("sph_harm: |m| = {} exceeds l = {l}", m.unsigned_abs()));
    }
    let m_abs = m.unsigned_abs();
    let p = normalized_legendre(l, theta.cos(), theta.sin());
    let plm = p[(l * (l + 1) / 2 + m_abs) as usize];
    let phase = Complex64::new(0.0, m as f64 * phi).exp();
    if m >= 0 || m_abs % 2 == 0 {
        Ok(plm * phase)
    } else {
        Ok(-plm * phase)
    }
}

/// All Y_lm(theta, phi) for l <= l_max at once, packed at index l^2 + l + m.
///
/// Shares one Legendre recurrence pass across every order, which is what the
/// grid transforms want. Equivalent to calling [`sph_harm`] pointwise.
pub fn sph_harm_table(l_max: u32, theta: f64, phi: f64) -> Vec<Complex64> {
    let lm = l_max as usize;
    let p = normalized_legendre(l_max, theta.cos(), theta.sin());
    let mut out = vec![Complex64::new(0.0, 0.0); (lm + 1) * (lm + 1)];
    for m in 0..=lm {
        let phase = Complex64::new(0.0, m as f64 * phi).exp();
        for l in m..=lm {
            let plm = p[l * (l + 1) / 2 + m];
            let val = plm * phase;
            out[l * l + l + m] = val;
            if m > 0 {
                // Y_{l,-m} = (-1)^m conj(Y_{l,m}).
                let neg = val.conj();
                out[l * l + l - m] = if m % 2 == 0 { neg } else { -neg };
            }
        }
    }
    out
}

/// Series evaluation of j_n for small arguments:
/// j_n(x) = sum_k (-1)^k x^(n+2k) / (2^k k! (2n+2k+1)!!).
fn sph_bessel_series(n: u32, xi: f64) -> f64 {
    let mut lead = 1.0;
    for i in 0..n as u64 {
        lead *= xi / (2 * i + 3) as f64;
    }
    // lead = xi^n / (2n+1)!! up to the missing first factor 1/1!! handled by i=0.
    let mut term = 1.0;
    let mut sum = 1.0;
    let x2 = xi * xi;
    for k in 1..60u64 {
        term *= -x2 / ((2 * k) as f64 * (2 * n as u64 + 2 * k + 1) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Spherical Bessel function of the first kind, j_n(xi), for xi >= 0.
///
/// j_0 and j_1 use their closed trigonometric forms. For xi >= n the upward
/// recurrence j_{k+1} = ((2k+1)/xi) j_k - j_{k-1} is stable; below that the
/// recurrence is run downward from a padded start order and normalized
/// against j_0 or j_1 (Miller's algorithm), see
/// https://dlmf.nist.gov/10.51 for the recurrence.
pub fn sph_bessel(n: u32, xi: f64) -> f64 {
    assert!(xi >= 0.0, "sph_bessel: argument must be nonnegative, got {xi}");
    if xi == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let j0 = xi.sin() / xi;
    if n == 0 {
        return j0;
    }
    let j1 = (j0 - xi.cos()) / xi;
    if n == 1 {
        return j1;
    }
    if xi < 0.05 {
        return sph_bessel_series(n, xi);
    }
    if xi >= n as f64 {
        let (mut prev, mut cur) = (j0, j1);
        for k in 1..n {
            let next = (2 * k + 1) as f64 / xi * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }
    // Downward pass. The start order only needs to exceed n by enough decades
    // of decay; 26 + xi covers double precision for the orders used here.
    let start = n + 26 + xi as u32;
    let mut above = 0.0_f64;
    let mut here = 1e-160;
    let mut jn = 0.0;
    let mut f0 = 0.0;
    let mut f1 = 0.0;
    for k in (0..=start).rev() {
        let below = (2 * k + 3) as f64 / xi * here - above;
        above = here;
        here = below;
        if k == n {
            jn = here;
        }
        if k == 1 {
            f1 = here;
        }
        if k == 0 {
            f0 = here;
        }
    }
    if f0.abs() >= f1.abs() {
        jn * (j0 / f0)
    } else {
        jn * (j1 / f1)
    }
}

/// Kummer confluent hypergeometric function 1F1(a; b; z) by direct series.
///
/// Terminates exactly when a is a nonpositive integer; otherwise sums until
/// the next term falls below 1e-15 of the running sum. A nonpositive integer
/// b whose pole is reached before termination is a domain error.
pub fn hyp1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    let mut sum = KahanSum::default();
    let mut term = 1.0;
    sum.add(term);
    for k in 0..100_000u32 {
        let ak = a + k as f64;
        if ak == 0.0 {
            return Ok(sum.value());
        }
        let bk = b + k as f64;
        if bk == 0.0 {
            return domain_err(format!(
                "hyp1f1: pole at b = {b} reached before the series terminated"
            ));
        }
        term *= ak / bk * z / (k + 1) as f64;
        sum.add(term);
        if term.abs() < 1e-15 * sum.value().abs().max(f64::MIN_POSITIVE) {
            return Ok(sum.value());
        }
    }
    domain_err(format!("hyp1f1({a}, {b}, {z}): series did not converge"))
}

/// The terminating Gauss sum C(-j-p, q) 2F1(j, -q; 1-q-p-j; -1) in the single
/// cancellation-free form
/// (1/q!) sum_{s=0..q} (-1)^s (-q)_s (1-p-q+s-j)_{q-s} (j)_s / s!.
///
/// Equivalently the coefficient of g^q in (1+g)^(-j-p) (1-g)^(-j), which is
/// what the tests pin it against. Every factor is an integer ratio, so the
/// result is exact for the index ranges that arise from translation
/// coefficients. No singular lower-parameter Pochhammers to dodge.
pub fn hyp2f1_finite(j: u32, q: u32, p: u32) -> f64 {
    let jf = j as f64;
    let qf = q as f64;
    let pf = p as f64;
    let mut sum = 0.0;
    let mut s_fact = 1.0;
    for s in 0..=q {
        if s > 0 {
            s_fact *= s as f64;
        }
        let sf = s as f64;
        let t = pochhammer(-qf, s) * pochhammer(1.0 - pf - qf + sf - jf, q - s) * pochhammer(jf, s)
            / s_fact;
        sum += if s % 2 == 0 { t } else { -t };
    }
    let mut q_fact = 1.0;
    for i in 2..=q as u64 {
        q_fact *= i as f64;
    }
    sum / q_fact
}

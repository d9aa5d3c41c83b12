//! Wigner 3j symbols and rotation matrices for the rotation action on
//! expansion coefficients.
//!
//! The convention is fixed by the inner-product identity
//! `<f(R^-1 .), H_n'l'm'> = delta_nn' delta_ll' D^l_mm'(R)` for f = H_nlm,
//! which the quadrature oracle checks directly. Everything downstream
//! (coefficient rotation, coupled translation elements, pose matching)
//! inherits that convention through this module.

use num_complex::Complex64;

use crate::specfun::{ln_factorial, KahanSum};
use crate::{domain_err, Result};

/// Row-major 3x3 rotation matrix.
pub type Mat3 = [[f64; 3]; 3];

pub fn rot_z(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

pub fn rot_y(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn mat_apply(m: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Transpose, which for rotation matrices is the inverse.
pub fn mat_transpose(m: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[j][i];
        }
    }
    out
}

/// z-y-z Euler angles: rotate by alpha about z, then beta about y, then
/// gamma about z (all axes fixed), i.e. the matrix Rz(gamma) Ry(beta) Rz(alpha).
///
/// Canonical ranges are beta in [0, pi] and alpha, gamma in [0, 2pi);
/// [`EulerZYZ::new`] reduces any input to that form without changing the
/// rotation it denotes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerZYZ {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

fn wrap_two_pi(a: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    let mut w = a.rem_euclid(tau);
    // rem_euclid can return tau itself for tiny negative inputs.
    if w >= tau {
        w -= tau;
    }
    w
}

impl EulerZYZ {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        let pi = std::f64::consts::PI;
        let mut b = beta.rem_euclid(2.0 * pi);
        let (mut a, mut g) = (alpha, gamma);
        if b > pi {
            // Ry(b) = Rz(pi) Ry(2pi - b) Rz(-pi) keeps the rotation fixed.
            b = 2.0 * pi - b;
            a += pi;
            g += pi;
        }
        Self { alpha: wrap_two_pi(a), beta: b, gamma: wrap_two_pi(g) }
    }

    pub fn identity() -> Self {
        Self { alpha: 0.0, beta: 0.0, gamma: 0.0 }
    }

    pub fn to_matrix(&self) -> Mat3 {
        mat_mul(&rot_z(self.gamma), &mat_mul(&rot_y(self.beta), &rot_z(self.alpha)))
    }

    /// Euler angles of a rotation matrix, beta in [0, pi]. At the gimbal
    /// configurations beta = 0 or pi the split between alpha and gamma is
    /// not unique; gamma = 0 is chosen.
    pub fn from_matrix(m: &Mat3) -> Self {
        let beta = m[2][2].clamp(-1.0, 1.0).acos();
        let sin_beta = (1.0 - m[2][2] * m[2][2]).max(0.0).sqrt();
        if sin_beta < 1e-12 {
            if m[2][2] > 0.0 {
                // Pure z-rotation by alpha + gamma.
                return Self::new(m[1][0].atan2(m[0][0]), 0.0, 0.0);
            }
            // Ry(pi) composed with z-rotations; row 1 carries alpha - gamma.
            return Self::new(m[1][0].atan2(m[1][1]), std::f64::consts::PI, 0.0);
        }
        let alpha = m[2][1].atan2(-m[2][0]);
        let gamma = m[1][2].atan2(m[0][2]);
        Self::new(alpha, beta, gamma)
    }
}

fn triangle_ok(l1: i64, l2: i64, l3: i64) -> bool {
    (l1 - l2).abs() <= l3 && l3 <= l1 + l2
}

/// Wigner 3j symbol (l1 l2 l3; m1 m2 m3) for integer angular momenta.
///
/// Racah's single-sum form, with every factorial carried as a log so the
/// symbol stays finite well past the range where factorials overflow.
/// Structural zeros (m-sum, triangle, odd parity at zero projections) are
/// returned as exact 0.0 without touching the sum.
pub fn wigner3j(l1: u32, l2: u32, l3: u32, m1: i32, m2: i32, m3: i32) -> Result<f64> {
    if m1.unsigned_abs() > l1 || m2.unsigned_abs() > l2 || m3.unsigned_abs() > l3 {
        return domain_err(format!(
            "wigner3j: projection out of range for (l1 l2 l3; m1 m2 m3) = ({l1} {l2} {l3}; {m1} {m2} {m3})"
        ));
    }
    let (l1, l2, l3) = (l1 as i64, l2 as i64, l3 as i64);
    let (m1, m2, m3) = (m1 as i64, m2 as i64, m3 as i64);
    if m1 + m2 + m3 != 0 || !triangle_ok(l1, l2, l3) {
        return Ok(0.0);
    }
    if m1 == 0 && m2 == 0 && m3 == 0 && (l1 + l2 + l3) % 2 != 0 {
        return Ok(0.0);
    }
    let lnf = |n: i64| ln_factorial(n as u32);
    let half_log = 0.5
        * (lnf(l1 + l2 - l3) + lnf(l1 - l2 + l3) + lnf(-l1 + l2 + l3) - lnf(l1 + l2 + l3 + 1)
            + lnf(l1 + m1)
            + lnf(l1 - m1)
            + lnf(l2 + m2)
            + lnf(l2 - m2)
            + lnf(l3 + m3)
            + lnf(l3 - m3));
    let t_lo = 0.max(l2 - l3 - m1).max(l1 - l3 + m2);
    let t_hi = (l1 + l2 - l3).min(l1 - m1).min(l2 + m2);
    let mut sum = KahanSum::default();
    for t in t_lo..=t_hi {
        let log_denom = lnf(t)
            + lnf(l1 + l2 - l3 - t)
            + lnf(l1 - m1 - t)
            + lnf(l2 + m2 - t)
            + lnf(l3 - l2 + m1 + t)
            + lnf(l3 - l1 - m2 + t);
        let magnitude = (half_log - log_denom).exp();
        sum.add(if t % 2 == 0 { magnitude } else { -magnitude });
    }
    let phase = if (l1 - l2 - m3).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(phase * sum.value())
}

/// Dense (2l+1) x (2l+1) Wigner D matrix, indexed by signed orders.
#[derive(Clone, Debug)]
pub struct WignerD {
    pub l: u32,
    data: Vec<Complex64>,
}

impl WignerD {
    /// Entry D^l_{m m'}, the coefficient of Y_lm' in the expansion of the
    /// rotated Y_lm.
    pub fn get(&self, m: i32, m_prime: i32) -> Complex64 {
        let dim = (2 * self.l + 1) as i32;
        debug_assert!(m.abs() <= self.l as i32 && m_prime.abs() <= self.l as i32);
        self.data[((m + self.l as i32) * dim + (m_prime + self.l as i32)) as usize]
    }

    pub fn dim(&self) -> usize {
        (2 * self.l + 1) as usize
    }
}

/// Real small-d matrix entry d^l_{m m'}(beta).
fn small_d(l: i64, m: i64, m_prime: i64, cos_half: f64, sin_half: f64, fact: &[f64]) -> f64 {
    let prefactor = (fact[(l + m) as usize]
        * fact[(l - m) as usize]
        * fact[(l + m_prime) as usize]
        * fact[(l - m_prime) as usize])
        .sqrt();
    let s_lo = 0.max(m - m_prime);
    let s_hi = (l + m).min(l - m_prime);
    let mut sum = KahanSum::default();
    for s in s_lo..=s_hi {
        let num = cos_half.powi((2 * l + m - m_prime - 2 * s) as i32)
            * sin_half.powi((m_prime - m + 2 * s) as i32);
        let den = fact[(l + m - s) as usize]
            * fact[s as usize]
            * fact[(m_prime - m + s) as usize]
            * fact[(l - m_prime - s) as usize];
        let term = num / den;
        sum.add(if (m_prime - m + s) % 2 == 0 { term } else { -term });
    }
    prefactor * sum.value()
}

/// Wigner D matrix for the given rotation:
/// D^l_{m m'} = exp(-i m alpha) d^l_{m m'}(beta) exp(-i m' gamma).
pub fn wigner_d_matrix(l: u32, euler: &EulerZYZ) -> WignerD {
    let li = l as i64;
    let dim = (2 * l + 1) as usize;
    let mut fact = vec![1.0; (2 * l + 1) as usize + 1];
    for i in 1..fact.len() {
        fact[i] = fact[i - 1] * i as f64;
    }
    let cos_half = (euler.beta / 2.0).cos();
    let sin_half = (euler.beta / 2.0).sin();
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for m in -li..=li {
        let alpha_phase = Complex64::new(0.0, -(m as f64) * euler.alpha).exp();
        for m_prime in -li..=li {
            let gamma_phase = Complex64::new(0.0, -(m_prime as f64) * euler.gamma).exp();
            let d = small_d(li, m, m_prime, cos_half, sin_half, &fact);
            data[((m + li) * (dim as i64) + (m_prime + li)) as usize] =
                alpha_phase * d * gamma_phase;
        }
    }
    WignerD { l, data }
}

//! Independent numerical checks for the closed-form machinery.
//!
//! Everything here deliberately avoids the code path it verifies. Inner
//! products run on a Cartesian Gauss-Hermite grid instead of the
//! radial-angular product rule, translated and rotated basis functions are
//! evaluated by transforming the argument pointwise, and the radial
//! transforms are integrated panel by panel. The suites package those
//! comparisons as [`OracleReport`] records, one JSON line each, for the
//! command line verifier and the acceptance tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::rational;
use crate::sgl::{
    cartesian_from_spherical, eval_basis, hermite_rule, index_range, legendre_points,
    normalization, radial, spherical_from_cartesian, weighted_bessel_closed, SglIndex,
};
use crate::specfun::{
    binom_general, gamma_half, hyp2f1_finite, laguerre, ln_factorial, pochhammer, sph_bessel,
    sph_harm, HalfInteger, KahanSum,
};
use crate::translate::{a_coeff, build_table, mu_of, t_element, t_element_signed};
use crate::wigner::{mat_apply, mat_transpose, wigner3j, wigner_d_matrix, EulerZYZ};
use crate::{domain_err, input_err, Result};

use std::f64::consts::PI;

/// A scalar as it appears in a report: real comparisons serialize as a bare
/// number, complex ones as {"re": .., "im": ..}.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(untagged)]
pub enum ReportValue {
    Real(f64),
    Complex { re: f64, im: f64 },
}

/// One verified case: the closed-form value, the independently computed
/// reference, and the error split the verifier acts on.
#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub case_id: String,
    pub closed_form: ReportValue,
    pub oracle_value: ReportValue,
    pub abs_err: f64,
    pub rel_err: f64,
    pub passed: bool,
}

fn rel_of(abs: f64, oracle_mag: f64) -> f64 {
    if oracle_mag > 0.0 {
        abs / oracle_mag
    } else if abs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

impl OracleReport {
    pub fn from_reals(
        case_id: impl Into<String>,
        closed: f64,
        oracle: f64,
        tol_rel: f64,
        tol_abs: f64,
    ) -> Self {
        let abs_err = (closed - oracle).abs();
        let rel_err = rel_of(abs_err, oracle.abs());
        Self {
            case_id: case_id.into(),
            closed_form: ReportValue::Real(closed),
            oracle_value: ReportValue::Real(oracle),
            abs_err,
            rel_err,
            passed: abs_err <= tol_abs || rel_err <= tol_rel,
        }
    }

    pub fn from_complexes(
        case_id: impl Into<String>,
        closed: Complex64,
        oracle: Complex64,
        tol_rel: f64,
        tol_abs: f64,
    ) -> Self {
        let abs_err = (closed - oracle).norm();
        let rel_err = rel_of(abs_err, oracle.norm());
        Self {
            case_id: case_id.into(),
            closed_form: ReportValue::Complex { re: closed.re, im: closed.im },
            oracle_value: ReportValue::Complex { re: oracle.re, im: oracle.im },
            abs_err,
            rel_err,
            passed: abs_err <= tol_abs || rel_err <= tol_rel,
        }
    }

    /// Aggregated deviation against an expected zero.
    pub fn from_residual(case_id: impl Into<String>, residual: f64, bound: f64) -> Self {
        Self {
            case_id: case_id.into(),
            closed_form: ReportValue::Real(residual),
            oracle_value: ReportValue::Real(0.0),
            abs_err: residual,
            rel_err: residual,
            passed: residual <= bound,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

pub fn all_passed(reports: &[OracleReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

// ---------------------------------------------------------------------------
// Reference integrators

/// Weighted inner product <f, g> = int f(x) conj(g(x)) exp(-|x|^2) dx on a
/// tensor Gauss-Hermite grid, exact for polynomial integrands of per-axis
/// degree below 2*points_per_axis.
pub fn inner_product_h<F, G>(f: F, g: G, points_per_axis: u32) -> Complex64
where
    F: Fn([f64; 3]) -> Complex64,
    G: Fn([f64; 3]) -> Complex64,
{
    let rule = hermite_rule(points_per_axis);
    let mut re = KahanSum::default();
    let mut im = KahanSum::default();
    for (node, w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(*node) * g(*node).conj() * *w;
        re.add(v.re);
        im.add(v.im);
    }
    Complex64::new(re.value(), im.value())
}

fn eval_h_at(idx: SglIndex, p: [f64; 3]) -> Complex64 {
    let [r, theta, phi] = spherical_from_cartesian(p);
    eval_basis(idx, r, theta, phi)
}

/// Basis values for every index at every grid point, with the argument run
/// through `map` first (identity, shift, or inverse rotation).
fn value_table<M>(indices: &[SglIndex], points: &[[f64; 3]], map: M) -> Vec<Vec<Complex64>>
where
    M: Fn([f64; 3]) -> [f64; 3],
{
    indices
        .iter()
        .map(|&idx| points.iter().map(|&p| eval_h_at(idx, map(p))).collect())
        .collect()
}

fn weighted_dot(weights: &[f64], f: &[Complex64], g: &[Complex64]) -> Complex64 {
    let mut re = KahanSum::default();
    let mut im = KahanSum::default();
    for ((w, a), b) in weights.iter().zip(f).zip(g) {
        let v = a * b.conj() * *w;
        re.add(v.re);
        im.add(v.im);
    }
    Complex64::new(re.value(), im.value())
}

/// Quadrature value of `<T(nu e_z) H_{n l m}, H_{n' l' m'}>` with a signed
/// shift, evaluated by displacing the first argument pointwise.
pub fn t_element_numeric(
    n: u32,
    n_p: u32,
    l: u32,
    l_p: u32,
    m: i32,
    m_p: i32,
    nu_signed: f64,
) -> Result<Complex64> {
    let idx = SglIndex::new(n, l, m)?;
    let idx_p = SglIndex::new(n_p, l_p, m_p)?;
    let points = 2 * n.max(n_p);
    Ok(inner_product_h(
        |p| eval_h_at(idx, [p[0], p[1], p[2] - nu_signed]),
        |p| eval_h_at(idx_p, p),
        points,
    ))
}

/// Quadrature value of `<Lambda(R) H_idx, H_idx_p>` where Lambda(R) f(x) =
/// f(R^-1 x).
pub fn rotation_element_numeric(idx: SglIndex, idx_p: SglIndex, euler: &EulerZYZ) -> Complex64 {
    let r_inv = mat_transpose(&euler.to_matrix());
    let points = 2 * idx.n.max(idx_p.n);
    inner_product_h(
        |p| eval_h_at(idx, mat_apply(&r_inv, p)),
        |p| eval_h_at(idx_p, p),
        points,
    )
}

/// Composite Gauss-Legendre integral of f over [0, upper], four points per
/// panel. With a couple thousand panels the result is exact to roundoff for
/// the smooth decaying integrands used here.
fn integrate_panels<F>(mut f: F, upper: f64, panels: u32) -> f64
where
    F: FnMut(f64) -> f64,
{
    let (xs, ws) = legendre_points(4);
    let h = upper / panels as f64;
    let mut acc = KahanSum::default();
    for p in 0..panels {
        let left = p as f64 * h;
        for (x, w) in xs.iter().zip(&ws) {
            acc.add(0.5 * h * w * f(left + 0.5 * h * (x + 1.0)));
        }
    }
    acc.value()
}

const PANELS: u32 = 2048;

/// Direct numerical value of the weighted radial Bessel transform
/// sqrt(2/pi) int_0^inf N_nl R_nl(xi) j_l(beta xi) xi^2 exp(-gamma xi^2) dxi.
pub fn bessel_transform_numeric(n: u32, l: u32, gamma: f64, beta: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return domain_err(format!("bessel_transform_numeric: gamma = {gamma} not in (0, 1]"));
    }
    if beta <= 0.0 {
        return domain_err(format!("bessel_transform_numeric: beta = {beta} must be positive"));
    }
    let norm = normalization(n, l).to_f64();
    // Truncate where the Gaussian factor is below 1e-18.
    let upper = ((1e18f64).ln() / gamma).sqrt();
    let value = integrate_panels(
        |xi| norm * radial(n, l, xi) * sph_bessel(l, beta * xi) * xi * xi * (-gamma * xi * xi).exp(),
        upper,
        PANELS,
    );
    Ok((2.0 / PI).sqrt() * value)
}

/// Reconstructs the plain radial factor R_nl(xi) from the closed-form
/// weighted transform: e^(gamma xi^2) sqrt(2/pi)
/// int_0^inf f~(beta) j_l(beta xi) beta^2 dbeta, divided by N_nl.
pub fn inversion_numeric(n: u32, l: u32, gamma: f64, xi: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return domain_err(format!("inversion_numeric: gamma = {gamma} not in (0, 1]"));
    }
    // The transform decays like exp(-beta^2 / (4 gamma)).
    let upper = (4.0 * gamma * (1e18f64).ln()).sqrt();
    let mut failure = None;
    let value = integrate_panels(
        |beta| match weighted_bessel_closed(n, l, gamma, beta) {
            Ok(v) => v * sph_bessel(l, beta * xi) * beta * beta,
            Err(e) => {
                failure = Some(e);
                0.0
            }
        },
        upper,
        PANELS,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let norm = normalization(n, l).to_f64();
    Ok((gamma * xi * xi).exp() * (2.0 / PI).sqrt() * value / norm)
}

/// The inner radial sum D_pq of the translation element, kept separate so
/// its vanishing range can be probed directly:
/// sum_j (-1)^j/j! C(n-1/2, n-l-1-j) Gamma(mu+j+1/2) (k-mu-j+1)_p
///       hyp2f1_finite(j, q, p).
pub fn d_pq(n: u32, n_p: u32, l: u32, l_p: u32, k: u32, p: u32, q: u32) -> Result<f64> {
    d_pq_scaled(n, n_p, l, l_p, k, p, q).map(|(value, _)| value)
}

/// Like [`d_pq`] but also reports the largest term magnitude, the natural
/// scale for judging how completely the sum cancels.
pub fn d_pq_scaled(
    n: u32,
    n_p: u32,
    l: u32,
    l_p: u32,
    k: u32,
    p: u32,
    q: u32,
) -> Result<(f64, f64)> {
    if n == 0 || l > n - 1 || n_p == 0 || l_p > n_p - 1 {
        return domain_err(format!(
            "d_pq: invalid radial/angular orders (n, l, n', l') = ({n}, {l}, {n_p}, {l_p})"
        ));
    }
    let mu = mu_of(n_p, l, l_p, k)?;
    let mut sum = KahanSum::default();
    let mut scale = 0.0f64;
    for j in 0..=(n - l - 1) {
        let magnitude = gamma_half(mu + j).to_f64()
            * binom_general(n as f64 - 0.5, n - l - 1 - j)
            * (-ln_factorial(j)).exp();
        let term = magnitude
            * pochhammer(k as f64 - mu as f64 - j as f64 + 1.0, p)
            * hyp2f1_finite(j, q, p)
            * if j % 2 == 0 { 1.0 } else { -1.0 };
        scale = scale.max(term.abs());
        sum.add(term);
    }
    Ok((sum.value(), scale))
}

/// Pointwise residual of the truncated spherical Bessel addition theorem:
/// j_l(beta r) Y_lm at `point` minus the sum over l' <= l_max of coupled
/// terms evaluated at the shifted point. `point` is spherical (r, theta,
/// phi); the shift is nu along +z.
pub fn addition_theorem_residual(
    l: u32,
    m: i32,
    beta: f64,
    nu: f64,
    point: [f64; 3],
    l_max: u32,
) -> Result<f64> {
    if m.unsigned_abs() > l {
        return domain_err(format!("addition_theorem_residual: |m| = {} exceeds l = {l}", m.abs()));
    }
    if beta <= 0.0 || nu <= 0.0 {
        return domain_err("addition_theorem_residual: beta and nu must be positive".to_string());
    }
    let [r, theta, phi] = point;
    let lhs = sph_harm(l, m, theta, phi)? * sph_bessel(l, beta * r);

    let cart = cartesian_from_spherical(point);
    let shifted = [cart[0], cart[1], cart[2] - nu];
    let [r_s, theta_s, phi_s] = spherical_from_cartesian(shifted);

    let mut re = KahanSum::default();
    let mut im = KahanSum::default();
    for l_p in m.unsigned_abs()..=l_max {
        let mut coupling = KahanSum::default();
        for k in l.abs_diff(l_p)..=(l + l_p) {
            let a = a_coeff(l, l_p, m, k)?;
            if a != 0.0 {
                coupling.add(a * sph_bessel(k, beta * nu));
            }
        }
        let term = sph_harm(l_p, m, theta_s, phi_s)? * sph_bessel(l_p, beta * r_s) * coupling.value();
        re.add(term.re);
        im.add(term.im);
    }
    let rhs = Complex64::new(re.value(), im.value());
    Ok((lhs - rhs).norm())
}

// ---------------------------------------------------------------------------
// Suites

const SHIFT_SWEEP: [f64; 4] = [0.1, 0.5, 1.0, 2.0];

fn shell_pairs(max_n: u32) -> Vec<(u32, u32)> {
    let mut shells = Vec::new();
    for n in 1..=max_n {
        for l in 0..n {
            shells.push((n, l));
        }
    }
    shells
}

/// Closed-form axial elements against Gauss-Hermite quadrature, all index
/// pairs up to max_n at several shifts. `canary` deliberately corrupts the
/// first closed-form value so a healthy pipeline reports the failure.
pub fn suite_translation(max_n: u32, canary: bool) -> Vec<OracleReport> {
    let indices: Vec<SglIndex> = index_range(max_n).collect();
    let rule = hermite_rule(2 * max_n);
    let plain = value_table(&indices, &rule.nodes, |p| p);
    let mut reports = Vec::new();
    let mut first = true;
    for nu in SHIFT_SWEEP {
        let shifted = value_table(&indices, &rule.nodes, |p| [p[0], p[1], p[2] - nu]);
        for (a, idx) in indices.iter().enumerate() {
            for (b, idx_p) in indices.iter().enumerate() {
                if idx.m != idx_p.m {
                    continue;
                }
                let numeric = weighted_dot(&rule.weights, &shifted[a], &plain[b]);
                let mut closed = t_element(idx.n, idx_p.n, idx.l, idx_p.l, idx.m.unsigned_abs(), nu)
                    .expect("indices are valid");
                if canary && first {
                    closed = -closed;
                }
                first = false;
                reports.push(OracleReport::from_complexes(
                    format!(
                        "translation n={} l={} np={} lp={} m={} nu={nu}",
                        idx.n, idx.l, idx_p.n, idx_p.l, idx.m
                    ),
                    Complex64::new(closed, 0.0),
                    numeric,
                    1e-8,
                    1e-12,
                ));
            }
        }
    }
    reports
}

/// Low-order translation elements against their pinned analytic values.
pub fn suite_pinned() -> Vec<OracleReport> {
    let mut reports = Vec::new();
    for nu in [0.25, 1.0, 3.0] {
        reports.push(OracleReport::from_reals(
            format!("pinned t(1,1,0,0,0) nu={nu}"),
            t_element(1, 1, 0, 0, 0, nu).unwrap(),
            1.0,
            1e-12,
            1e-14,
        ));
        reports.push(OracleReport::from_reals(
            format!("pinned t(1,2,0,0,0) nu={nu}"),
            t_element(1, 2, 0, 0, 0, nu).unwrap(),
            0.0,
            1e-12,
            1e-14,
        ));
        reports.push(OracleReport::from_reals(
            format!("pinned t(2,1,0,0,0) nu={nu}"),
            t_element(2, 1, 0, 0, 0, nu).unwrap(),
            -(2.0f64 / 3.0).sqrt() * nu * nu,
            1e-12,
            1e-14,
        ));
    }
    reports
}

/// Azimuthal selection rules: quadrature elements with m != m' vanish, and
/// the diagonal elements are insensitive to the sign of m.
pub fn suite_selection(max_n: u32) -> Vec<OracleReport> {
    let indices: Vec<SglIndex> = index_range(max_n).collect();
    let rule = hermite_rule(2 * max_n);
    let plain = value_table(&indices, &rule.nodes, |p| p);
    let shells = shell_pairs(max_n);
    let mut reports = Vec::new();
    for nu in [0.8, 1.7] {
        let shifted = value_table(&indices, &rule.nodes, |p| [p[0], p[1], p[2] - nu]);
        let element = |n: u32, l: u32, m: i32, n_p: u32, l_p: u32, m_p: i32| {
            let a = SglIndex::new(n, l, m).unwrap().flat();
            let b = SglIndex::new(n_p, l_p, m_p).unwrap().flat();
            weighted_dot(&rule.weights, &shifted[a], &plain[b])
        };
        for &(n, l) in &shells {
            for &(n_p, l_p) in &shells {
                let mut off_max = 0.0f64;
                let mut sign_max = 0.0f64;
                for m in -(l as i32)..=(l as i32) {
                    for m_p in -(l_p as i32)..=(l_p as i32) {
                        if m != m_p {
                            off_max = off_max.max(element(n, l, m, n_p, l_p, m_p).norm());
                        }
                    }
                }
                for m in 1..=(l.min(l_p) as i32) {
                    let up = element(n, l, m, n_p, l_p, m);
                    let down = element(n, l, -m, n_p, l_p, -m);
                    sign_max = sign_max.max((up - down).norm());
                }
                reports.push(OracleReport::from_residual(
                    format!("selection offdiag ({n},{l})x({n_p},{l_p}) nu={nu}"),
                    off_max,
                    1e-12,
                ));
                if l.min(l_p) > 0 {
                    reports.push(OracleReport::from_residual(
                        format!("selection msign ({n},{l})x({n_p},{l_p}) nu={nu}"),
                        sign_max,
                        1e-10,
                    ));
                }
            }
        }
    }
    reports
}

/// Coupling weights with odd l - l' + k are identically zero, bitwise.
pub fn suite_parity() -> Vec<OracleReport> {
    let mut reports = Vec::new();
    for l in 0..=6u32 {
        for l_p in 0..=6u32 {
            let mut worst = 0.0f64;
            for k in l.abs_diff(l_p)..=(l + l_p) {
                if (l as i64 - l_p as i64 + k as i64).rem_euclid(2) == 0 {
                    continue;
                }
                for m in 0..=(l.min(l_p) as i32) {
                    worst = worst.max(a_coeff(l, l_p, m, k).unwrap().abs());
                }
            }
            reports.push(OracleReport::from_residual(
                format!("parity l={l} lp={l_p}"),
                worst,
                0.0,
            ));
        }
    }
    reports
}

/// The inner radial sums cancel identically below the coupling threshold:
/// D_pq = 0 whenever p + q < n - mu, checked in floating point against the
/// largest-term scale and, for small orders, exactly in rationals.
pub fn suite_dpq(max_n: u32) -> Vec<OracleReport> {
    let shells = shell_pairs(max_n);
    let mut reports = Vec::new();
    for &(n, l) in &shells {
        for &(n_p, l_p) in &shells {
            let mut worst = 0.0f64;
            for k in l.abs_diff(l_p)..=(l + l_p) {
                if (l as i64 - l_p as i64 + k as i64).rem_euclid(2) != 0 {
                    continue;
                }
                let mu = mu_of(n_p, l, l_p, k).unwrap();
                if n <= mu {
                    continue;
                }
                let deficit = n - mu;
                for p in 0..deficit {
                    for q in 0..(deficit - p) {
                        let (value, scale) = d_pq_scaled(n, n_p, l, l_p, k, p, q).unwrap();
                        if scale > 0.0 {
                            worst = worst.max(value.abs() / scale);
                        }
                    }
                }
            }
            reports.push(OracleReport::from_residual(
                format!("dpq vanish n={n} l={l} np={n_p} lp={l_p}"),
                worst,
                1e-9,
            ));
        }
    }

    // Exact confirmation at small orders.
    let mut exact_ok = true;
    for &(n, l) in &shells {
        if n > 4 {
            continue;
        }
        for &(n_p, l_p) in &shells {
            if n_p > 4 {
                continue;
            }
            for k in l.abs_diff(l_p)..=(l + l_p) {
                if (l as i64 - l_p as i64 + k as i64).rem_euclid(2) != 0 {
                    continue;
                }
                let mu = mu_of(n_p, l, l_p, k).unwrap();
                if n <= mu {
                    continue;
                }
                let deficit = n - mu;
                for p in 0..deficit {
                    for q in 0..(deficit - p) {
                        let exact = rational::d_pq_over_sqrt_pi(n, n_p, l, l_p, k, p, q).unwrap();
                        if !num::Zero::is_zero(&exact) {
                            exact_ok = false;
                        }
                    }
                }
            }
        }
    }
    reports.push(OracleReport::from_residual(
        "dpq vanish exact n<=4",
        if exact_ok { 0.0 } else { 1.0 },
        0.0,
    ));
    reports
}

/// Gram matrix of the basis under the Gauss-Hermite inner product.
pub fn suite_gram(max_n: u32) -> Vec<OracleReport> {
    let indices: Vec<SglIndex> = index_range(max_n).collect();
    let rule = hermite_rule(2 * max_n);
    let plain = value_table(&indices, &rule.nodes, |p| p);
    let mut diag = 0.0f64;
    let mut off = 0.0f64;
    for a in 0..indices.len() {
        for b in 0..indices.len() {
            let g = weighted_dot(&rule.weights, &plain[a], &plain[b]);
            if a == b {
                diag = diag.max((g - Complex64::new(1.0, 0.0)).norm());
            } else {
                off = off.max(g.norm());
            }
        }
    }
    vec![
        OracleReport::from_residual(format!("gram diagonal n<={max_n}"), diag, 1e-12),
        OracleReport::from_residual(format!("gram offdiagonal n<={max_n}"), off, 1e-12),
    ]
}

/// Rotated basis functions expand over their own (n, l) shell with Wigner-D
/// weights: quadrature of <Lambda(R) H_a, H_b> against the closed form.
pub fn suite_rotation(max_n: u32, rotations: u32, seed: u64) -> Vec<OracleReport> {
    let indices: Vec<SglIndex> = index_range(max_n).collect();
    let rule = hermite_rule(2 * max_n);
    let plain = value_table(&indices, &rule.nodes, |p| p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    for rot_i in 0..rotations {
        let euler = EulerZYZ::new(
            rng.gen_range(0.0..2.0 * PI),
            rng.gen_range(-1.0f64..1.0).acos(),
            rng.gen_range(0.0..2.0 * PI),
        );
        let r_inv = mat_transpose(&euler.to_matrix());
        let rotated = value_table(&indices, &rule.nodes, |p| mat_apply(&r_inv, p));
        let d_mats: Vec<_> = (0..max_n).map(|l| wigner_d_matrix(l, &euler)).collect();
        let mut worst = 0.0f64;
        for (a, idx) in indices.iter().enumerate() {
            for (b, idx_p) in indices.iter().enumerate() {
                let numeric = weighted_dot(&rule.weights, &rotated[a], &plain[b]);
                let closed = if idx.n == idx_p.n && idx.l == idx_p.l {
                    d_mats[idx.l as usize].get(idx.m, idx_p.m)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((numeric - closed).norm());
            }
        }
        reports.push(OracleReport::from_residual(
            format!("rotation case {rot_i} n<={max_n}"),
            worst,
            1e-10,
        ));
    }
    reports
}

/// Closed-form weighted Bessel transforms against panel integration, plus
/// the inverse transform recovering the radial factor.
pub fn suite_bessel(seed: u64) -> Vec<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    for i in 0..20 {
        let n = rng.gen_range(1..=5u32);
        let l = rng.gen_range(0..n);
        let gamma = if i % 4 == 0 { 1.0 } else { rng.gen_range(0.15..0.95) };
        let beta = rng.gen_range(0.2..3.0f64);
        let closed = weighted_bessel_closed(n, l, gamma, beta).unwrap();
        let numeric = bessel_transform_numeric(n, l, gamma, beta).unwrap();
        reports.push(OracleReport::from_reals(
            format!("bessel n={n} l={l} gamma={gamma:.3} beta={beta:.3}"),
            closed,
            numeric,
            1e-8,
            1e-12,
        ));
    }
    for xi in [0.5, 1.0, 2.0] {
        let recovered = inversion_numeric(2, 1, 0.5, xi).unwrap();
        reports.push(OracleReport::from_reals(
            format!("bessel inversion n=2 l=1 gamma=0.5 xi={xi}"),
            radial(2, 1, xi),
            recovered,
            1e-6,
            1e-9,
        ));
    }
    reports
}

/// Truncation error of the addition theorem must fall monotonically as the
/// expansion order grows, and be negligible by l_max = 16.
pub fn suite_addition(seed: u64) -> Vec<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    for cfg in 0..3u32 {
        let l = cfg;
        let m = rng.gen_range(-(l as i32)..=(l as i32));
        let beta = rng.gen_range(0.5..2.0f64);
        let nu = rng.gen_range(0.3..1.0f64);
        let point = [
            rng.gen_range(0.5..1.5f64),
            rng.gen_range(0.3..2.8f64),
            rng.gen_range(0.0..2.0 * PI),
        ];
        let mut prev = f64::INFINITY;
        let mut last = f64::INFINITY;
        for l_max in [4u32, 8, 12, 16] {
            let res = addition_theorem_residual(l, m, beta, nu, point, l_max).unwrap();
            let passed = if prev.is_infinite() { true } else { res <= prev + 1e-13 };
            reports.push(OracleReport {
                case_id: format!("addition cfg{cfg} l={l} m={m} lmax={l_max}"),
                closed_form: ReportValue::Real(res),
                oracle_value: ReportValue::Real(if prev.is_infinite() { res } else { prev }),
                abs_err: res,
                rel_err: rel_of(res, if prev.is_infinite() { res } else { prev }),
                passed,
            });
            prev = res;
            last = res;
        }
        reports.push(OracleReport::from_residual(
            format!("addition cfg{cfg} converged"),
            last,
            1e-10,
        ));
    }
    reports
}

/// Signed shifts: the -z closed form against quadrature at -nu, and the
/// direction identity t(-nu) = (-1)^(l+l') t(nu) across all pairs.
pub fn suite_signed(max_n: u32) -> Vec<OracleReport> {
    let nu = 0.9;
    let indices: Vec<SglIndex> = index_range(max_n).collect();
    let rule = hermite_rule(2 * max_n);
    let plain = value_table(&indices, &rule.nodes, |p| p);
    // A shift by -nu e_z moves the argument up by nu.
    let shifted = value_table(&indices, &rule.nodes, |p| [p[0], p[1], p[2] + nu]);
    let mut reports = Vec::new();
    for (a, idx) in indices.iter().enumerate() {
        for (b, idx_p) in indices.iter().enumerate() {
            if idx.m != idx_p.m {
                continue;
            }
            let numeric = weighted_dot(&rule.weights, &shifted[a], &plain[b]);
            let closed =
                t_element_signed(idx.n, idx_p.n, idx.l, idx_p.l, idx.m.unsigned_abs(), -nu)
                    .expect("indices are valid");
            reports.push(OracleReport::from_complexes(
                format!(
                    "signed n={} l={} np={} lp={} m={} nu=-{nu}",
                    idx.n, idx.l, idx_p.n, idx_p.l, idx.m
                ),
                Complex64::new(closed, 0.0),
                numeric,
                1e-10,
                1e-12,
            ));
        }
    }

    let mut ident = 0.0f64;
    for &(n, l) in &shell_pairs(max_n) {
        for &(n_p, l_p) in &shell_pairs(max_n) {
            for m_abs in 0..=l.min(l_p) {
                let plus = t_element_signed(n, n_p, l, l_p, m_abs, nu).unwrap();
                let minus = t_element_signed(n, n_p, l, l_p, m_abs, -nu).unwrap();
                let sign = if (l + l_p) % 2 == 0 { 1.0 } else { -1.0 };
                ident = ident.max((minus - sign * plus).abs() / plus.abs().max(1e-12));
            }
        }
    }
    reports.push(OracleReport::from_residual(
        format!("signed direction identity n<={max_n}"),
        ident,
        1e-12,
    ));
    reports
}

/// A vanishing shift degenerates the translation table to the identity.
pub fn suite_zero_limit() -> Vec<OracleReport> {
    let table = build_table(4, 1e-6).unwrap();
    let mut worst = 0.0f64;
    for (&(n, n_p, l, l_p, _), &value) in table.iter() {
        let expected = if n == n_p && l == l_p { 1.0 } else { 0.0 };
        worst = worst.max((value - expected).abs());
    }
    vec![OracleReport::from_residual("zero shift limit bandwidth=4", worst, 1e-5)]
}

/// Floating-point kernels against exact rational arithmetic.
pub fn suite_rational() -> Vec<OracleReport> {
    // The Laguerre sum alternates, so near its zeros the value can be far
    // smaller than the largest term; deviation is measured against the term
    // scale, the precision any double evaluation can attain.
    let mut lag = 0.0f64;
    for k in 0..=10u32 {
        for l in 0..=8i64 {
            let coeffs = rational::laguerre_coeffs_rational(k, HalfInteger::plus_half(l));
            for &x in &[0.3, 1.7, 4.2] {
                let approx = laguerre(k, HalfInteger::plus_half(l), x).unwrap();
                let exact = rational::laguerre_rational_at(k, l, x);
                let mut term_scale = 0.0f64;
                let mut xp = 1.0;
                for c in &coeffs {
                    term_scale = term_scale.max((rational::to_f64(c) * xp).abs());
                    xp *= x;
                }
                lag = lag.max((approx - exact).abs() / term_scale.max(1.0));
            }
        }
    }

    let mut w3j = 0.0f64;
    for l1 in 0..=4u32 {
        for l2 in 0..=4u32 {
            for l3 in l1.abs_diff(l2)..=(l1 + l2) {
                for m1 in -(l1 as i32)..=(l1 as i32) {
                    for m2 in -(l2 as i32)..=(l2 as i32) {
                        let m3 = -(m1 + m2);
                        if m3.unsigned_abs() > l3 {
                            continue;
                        }
                        let approx = wigner3j(l1, l2, l3, m1, m2, m3).unwrap();
                        let (sign, square) =
                            rational::wigner3j_exact(l1 as i64, l2 as i64, l3 as i64, m1 as i64, m2 as i64, m3 as i64);
                        let exact = sign as f64 * rational::to_f64(&square).sqrt();
                        w3j = w3j.max((approx - exact).abs());
                    }
                }
            }
        }
    }

    let mut d: f64 = 0.0;
    let shells = shell_pairs(3);
    for &(n, l) in &shells {
        for &(n_p, l_p) in &shells {
            for k in l.abs_diff(l_p)..=(l + l_p) {
                if (l as i64 - l_p as i64 + k as i64).rem_euclid(2) != 0 {
                    continue;
                }
                for p in 0..=2u32 {
                    for q in 0..=2u32 {
                        let approx = d_pq(n, n_p, l, l_p, k, p, q).unwrap();
                        let exact = PI.sqrt()
                            * rational::to_f64(
                                &rational::d_pq_over_sqrt_pi(n, n_p, l, l_p, k, p, q).unwrap(),
                            );
                        let scale = exact.abs().max(1.0);
                        d = d.max((approx - exact).abs() / scale);
                    }
                }
            }
        }
    }

    vec![
        OracleReport::from_residual("rational laguerre k<=10 l<=8", lag, 1e-13),
        OracleReport::from_residual("rational wigner3j l<=4", w3j, 1e-13),
        OracleReport::from_residual("rational dpq n<=3", d, 1e-11),
    ]
}

/// Suites run by the command line verifier when none is named.
pub fn default_suite_names() -> &'static [&'static str] {
    &[
        "translation",
        "pinned",
        "selection",
        "parity",
        "dpq",
        "gram",
        "rotation",
        "bessel",
        "addition",
        "signed",
        "zero-limit",
    ]
}

pub fn all_suite_names() -> Vec<&'static str> {
    let mut names = default_suite_names().to_vec();
    names.push("rational");
    names
}

/// Runs one named suite. Seeds are fixed so repeated runs are bitwise
/// reproducible.
pub fn run_suite(name: &str, max_n: u32, canary: bool) -> Result<Vec<OracleReport>> {
    match name {
        "translation" => Ok(suite_translation(max_n, canary)),
        "pinned" => Ok(suite_pinned()),
        "selection" => Ok(suite_selection(max_n)),
        "parity" => Ok(suite_parity()),
        "dpq" => Ok(suite_dpq(max_n)),
        "gram" => Ok(suite_gram(max_n)),
        "rotation" => Ok(suite_rotation(max_n, 5, 1205)),
        "bessel" => Ok(suite_bessel(1301)),
        "addition" => Ok(suite_addition(1409)),
        "signed" => Ok(suite_signed(max_n)),
        "zero-limit" => Ok(suite_zero_limit()),
        "rational" => Ok(suite_rational()),
        _ => input_err(format!(
            "unknown suite '{name}'; available: {}",
            all_suite_names().join(", ")
        )),
    }
}

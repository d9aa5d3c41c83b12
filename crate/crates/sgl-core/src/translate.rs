//! Closed-form translation of SGL expansions along and off the z axis.
//!
//! Translating a basis function mixes radial and angular orders but not the
//! azimuthal order: for a shift of nu along +z the matrix element
//! `<T(nu e_z) H_nlm, H_n'l'm'>` vanishes unless m = m', and the surviving
//! value t^(|m|)_{nn'll'}(nu) is a polynomial in nu given by a finite triple
//! sum. General rigid motions reduce to this axial case by conjugating with
//! the rotation that lifts the translation vector onto +z.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::sgl::{normalization, SglIndex};
use crate::specfun::{
    gamma_half, hyp2f1_finite, ln_factorial, pochhammer, KahanSum, SignedLogReal,
};
use crate::wigner::{
    mat_mul, rot_y, rot_z, wigner3j, wigner_d_matrix, EulerZYZ, Mat3, WignerD,
};
use crate::{domain_err, input_err, Result};

fn binom_slr(a: f64, k: u32) -> SignedLogReal {
    let mut acc = SignedLogReal::one();
    for i in 0..k {
        acc = acc * SignedLogReal::from_f64(a - i as f64);
    }
    acc / SignedLogReal::new(1, ln_factorial(k))
}

/// Coupling weight A_k^(l l' m) in the spherical Bessel addition theorem:
/// (-1)^((k-l+l')/2 + m) sqrt((2l+1)(2l'+1)) (2k+1)
/// (l l' k; 0 0 0) (l l' k; m -m 0).
///
/// Exactly zero when l - l' + k is odd; that test short-circuits before any
/// arithmetic, so the half-integer sign exponent is never formed for odd
/// parity. The value depends on m only through |m|.
pub fn a_coeff(l: u32, l_p: u32, m: i32, k: u32) -> Result<f64> {
    let m_abs = m.unsigned_abs();
    if m_abs > l.min(l_p) {
        return domain_err(format!("a_coeff: |m| = {m_abs} exceeds min(l, l') = {}", l.min(l_p)));
    }
    if k < l.abs_diff(l_p) || k > l + l_p {
        return domain_err(format!(
            "a_coeff: k = {k} outside the triangle range [{}, {}]",
            l.abs_diff(l_p),
            l + l_p
        ));
    }
    let parity = l as i64 - l_p as i64 + k as i64;
    if parity.rem_euclid(2) != 0 {
        return Ok(0.0);
    }
    let exponent = (k as i64 - l as i64 + l_p as i64) / 2 + m_abs as i64;
    let sign = if exponent.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let m_i = m_abs as i32;
    let value = sign
        * (((2 * l + 1) * (2 * l_p + 1)) as f64).sqrt()
        * (2 * k + 1) as f64
        * wigner3j(l, l_p, k, 0, 0, 0)?
        * wigner3j(l, l_p, k, m_i, -m_i, 0)?;
    Ok(value)
}

/// mu = n' + (l - l' + k)/2, the effective radial order after coupling.
/// Defined only for even l - l' + k.
pub fn mu_of(n_p: u32, l: u32, l_p: u32, k: u32) -> Result<u32> {
    let parity = l as i64 - l_p as i64 + k as i64;
    if parity.rem_euclid(2) != 0 {
        return domain_err(format!("mu_of: l - l' + k = {parity} must be even"));
    }
    let mu = n_p as i64 + parity / 2;
    if mu < 1 {
        return domain_err(format!("mu_of: mu = {mu} fell below 1; k is outside the triangle"));
    }
    Ok(mu as u32)
}

/// The polynomial factor C_j(nu) of the (k, j) translation term:
/// sum_{p=0}^{n-mu} hyp2f1_finite(j, n-mu-p, p) (k-mu-j+1)_p
///                  / (p! (k+3/2)_p) nu^(2p).
///
/// Zero when l - l' + k is odd or when mu exceeds n (empty sum).
pub fn c_poly(n: u32, n_p: u32, l: u32, l_p: u32, k: u32, j: u32, nu: f64) -> Result<f64> {
    let parity = l as i64 - l_p as i64 + k as i64;
    if parity.rem_euclid(2) != 0 {
        return Ok(0.0);
    }
    let mu = mu_of(n_p, l, l_p, k)?;
    if n < mu {
        return Ok(0.0);
    }
    let top = n - mu;
    let mut sum = KahanSum::default();
    let mut nu_sq_pow = 1.0;
    let mut p_fact = 1.0;
    for p in 0..=top {
        if p > 0 {
            nu_sq_pow *= nu * nu;
            p_fact *= p as f64;
        }
        let term = hyp2f1_finite(j, top - p, p)
            * pochhammer(k as f64 - mu as f64 - j as f64 + 1.0, p)
            / (p_fact * pochhammer(k as f64 + 1.5, p))
            * nu_sq_pow;
        sum.add(term);
    }
    Ok(sum.value())
}

fn check_pair(n: u32, l: u32, n_p: u32, l_p: u32, m_abs: u32) -> Result<()> {
    if n == 0 || l > n - 1 || n_p == 0 || l_p > n_p - 1 {
        return domain_err(format!(
            "translation element: invalid radial/angular orders (n, l, n', l') = ({n}, {l}, {n_p}, {l_p})"
        ));
    }
    if m_abs > l.min(l_p) {
        return domain_err(format!(
            "translation element: m_abs = {m_abs} exceeds min(l, l') = {}",
            l.min(l_p)
        ));
    }
    Ok(())
}

/// Shared closed-form evaluator. `flip_k_sign` selects the -z direction,
/// which replaces the (-1)^k factor by +1.
fn t_element_core(n: u32, n_p: u32, l: u32, l_p: u32, m_abs: u32, nu: f64, flip_k_sign: bool) -> f64 {
    // Global prefactor (-1)^(n-l-1) (sqrt(pi)/4) N_nl N_n'l' / (n'-l'-1)!.
    let mut prefactor = normalization(n, l)
        * normalization(n_p, l_p)
        * SignedLogReal::new(1, 0.5 * std::f64::consts::PI.ln() - (4.0f64).ln())
        / SignedLogReal::new(1, ln_factorial(n_p - l_p - 1));
    if (n - l - 1) % 2 != 0 {
        prefactor = -prefactor;
    }
    let nu_slr = SignedLogReal::from_f64(nu);
    let mut total = KahanSum::default();
    for k in l.abs_diff(l_p)..=(l + l_p) {
        // Only every second k survives; skip before touching coefficients.
        if (l as i64 - l_p as i64 + k as i64).rem_euclid(2) != 0 {
            continue;
        }
        let a_k = a_coeff(l, l_p, m_abs as i32, k).expect("validated indices");
        if a_k == 0.0 {
            continue;
        }
        let mu = mu_of(n_p, l, l_p, k).expect("parity checked");
        let mut k_part = prefactor
            * SignedLogReal::from_f64(a_k)
            * nu_slr.powi(k as i32)
            / gamma_half(k + 1);
        if !flip_k_sign && k % 2 != 0 {
            k_part = -k_part;
        }
        for j in 0..=(n - l - 1) {
            let c_j = c_poly(n, n_p, l, l_p, k, j, nu).expect("parity checked");
            if c_j == 0.0 {
                continue;
            }
            let mut term = k_part
                * binom_slr(n as f64 - 0.5, n - l - 1 - j)
                * gamma_half(mu + j)
                * SignedLogReal::new(1, -ln_factorial(j))
                * SignedLogReal::from_f64(c_j);
            if j % 2 != 0 {
                term = -term;
            }
            total.add(term.to_f64());
        }
    }
    total.value()
}

/// Axial translation matrix element t^(m_abs)_{n n' l l'}(nu) for a shift of
/// nu > 0 along +z, i.e. `<T(nu e_z) H_n l m, H_n' l' m>` with |m| = m_abs.
pub fn t_element(n: u32, n_p: u32, l: u32, l_p: u32, m_abs: u32, nu: f64) -> Result<f64> {
    check_pair(n, l, n_p, l_p, m_abs)?;
    if nu <= 0.0 {
        return domain_err(format!(
            "t_element: nu = {nu} must be positive; use t_element_signed for the -z direction"
        ));
    }
    Ok(t_element_core(n, n_p, l, l_p, m_abs, nu, false))
}

/// Signed axial translation: positive arguments shift along +z, negative
/// along -z. The -z form drops the (-1)^k factor from each k term, which
/// collapses to the identity t(-nu) = (-1)^(l+l') t(nu).
pub fn t_element_signed(
    n: u32,
    n_p: u32,
    l: u32,
    l_p: u32,
    m_abs: u32,
    nu_signed: f64,
) -> Result<f64> {
    check_pair(n, l, n_p, l_p, m_abs)?;
    if nu_signed == 0.0 {
        return domain_err("t_element_signed: nu must be nonzero".to_string());
    }
    if nu_signed > 0.0 {
        Ok(t_element_core(n, n_p, l, l_p, m_abs, nu_signed, false))
    } else {
        Ok(t_element_core(n, n_p, l, l_p, m_abs, -nu_signed, true))
    }
}

// ---------------------------------------------------------------------------
// Tables

/// All axial translation elements for indices up to a bandwidth, at one nu.
#[derive(Clone, Debug)]
pub struct TranslationTable {
    bandwidth: u32,
    nu: f64,
    entries: BTreeMap<(u32, u32, u32, u32, u32), f64>,
}

impl TranslationTable {
    pub fn bandwidth(&self) -> u32 {
        self.bandwidth
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, n: u32, n_p: u32, l: u32, l_p: u32, m_abs: u32) -> Option<f64> {
        self.entries.get(&(n, n_p, l, l_p, m_abs)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32, u32, u32, u32), &f64)> {
        self.entries.iter()
    }

    /// CSV rows `n,np,l,lp,m_abs,nu,value` sorted by key, floats at 17
    /// significant digits. Output is byte-stable across runs.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "n,np,l,lp,m_abs,nu,value")?;
        for (&(n, n_p, l, l_p, m_abs), &value) in &self.entries {
            writeln!(out, "{n},{n_p},{l},{l_p},{m_abs},{:.16e},{:.16e}", self.nu, value)?;
        }
        Ok(())
    }
}

/// Every valid (n, n', l, l', m_abs) with n, n' <= bandwidth at one shift.
/// Entries are independent, so they are computed in parallel.
pub fn build_table(bandwidth: u32, nu: f64) -> Result<TranslationTable> {
    if bandwidth == 0 {
        return domain_err("build_table: bandwidth must be at least 1".to_string());
    }
    if nu <= 0.0 {
        return domain_err(format!("build_table: nu = {nu} must be positive"));
    }
    let mut keys = Vec::new();
    for n in 1..=bandwidth {
        for l in 0..n {
            for n_p in 1..=bandwidth {
                for l_p in 0..n_p {
                    for m_abs in 0..=l.min(l_p) {
                        keys.push((n, n_p, l, l_p, m_abs));
                    }
                }
            }
        }
    }
    let entries: BTreeMap<_, _> = keys
        .into_par_iter()
        .map(|key| {
            let (n, n_p, l, l_p, m_abs) = key;
            let value =
                t_element(n, n_p, l, l_p, m_abs, nu).expect("keys are valid by construction");
            (key, value)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    Ok(TranslationTable { bandwidth, nu, entries })
}

// ---------------------------------------------------------------------------
// Poses and coupled elements

/// A rigid motion: rotate by `rotation`, then translate by the vector with
/// spherical coordinates (nu, theta_t, phi_t). `nu` is always >= 0.
#[derive(Clone, Copy, Debug)]
pub struct Pose {
    pub rotation: EulerZYZ,
    pub nu: f64,
    pub theta_t: f64,
    pub phi_t: f64,
}

impl Pose {
    pub fn new(rotation: EulerZYZ, translation: [f64; 3]) -> Self {
        let [nu, theta_t, phi_t] = crate::sgl::spherical_from_cartesian(translation);
        Self { rotation, nu, theta_t, phi_t }
    }

    pub fn identity() -> Self {
        Self::rotation_only(EulerZYZ::identity())
    }

    pub fn rotation_only(rotation: EulerZYZ) -> Self {
        Self { rotation, nu: 0.0, theta_t: 0.0, phi_t: 0.0 }
    }

    pub fn translation_cartesian(&self) -> [f64; 3] {
        crate::sgl::cartesian_from_spherical([self.nu, self.theta_t, self.phi_t])
    }

    /// The rotation that carries the translation vector onto +z.
    pub fn tilt_matrix(&self) -> Mat3 {
        mat_mul(&rot_y(-self.theta_t), &rot_z(-self.phi_t))
    }
}

pub(crate) fn table_for_pose<'a>(
    table: Option<&'a TranslationTable>,
    nu: f64,
    max_n: u32,
) -> Result<Option<&'a TranslationTable>> {
    match table {
        None => Ok(None),
        Some(t) => {
            if t.bandwidth() < max_n {
                return input_err(format!(
                    "translation table bandwidth {} cannot serve indices up to n = {max_n}",
                    t.bandwidth()
                ));
            }
            if (t.nu() - nu).abs() > 1e-9 * nu.abs().max(1.0) {
                return input_err(format!(
                    "translation table was built for nu = {} but the pose needs nu = {nu}",
                    t.nu()
                ));
            }
            Ok(Some(t))
        }
    }
}

pub(crate) fn coupled_element_tilted(
    idx: SglIndex,
    idx_p: SglIndex,
    pose: &Pose,
    tilt: &Mat3,
    table: Option<&TranslationTable>,
) -> Result<Complex64> {
    let rotated = mat_mul(tilt, &pose.rotation.to_matrix());
    let d_rot = wigner_d_matrix(idx.l, &EulerZYZ::from_matrix(&rotated));
    let d_tilt = wigner_d_matrix(idx_p.l, &EulerZYZ::from_matrix(tilt));
    coupled_sum(&d_rot, &d_tilt, idx, idx_p, &mut |m_abs| match table {
        Some(t) => t
            .get(idx.n, idx_p.n, idx.l, idx_p.l, m_abs)
            .ok_or_else(|| crate::Error::Input("translation table is missing an entry".into())),
        None => t_element(idx.n, idx_p.n, idx.l, idx_p.l, m_abs, pose.nu),
    })
}

/// Inner contraction shared by [`coupled_element`] and the pose-matching
/// overlap: sum over the common azimuthal order after both rotations.
pub(crate) fn coupled_sum(
    d_rot: &WignerD,
    d_tilt: &WignerD,
    idx: SglIndex,
    idx_p: SglIndex,
    t_of_m: &mut impl FnMut(u32) -> Result<f64>,
) -> Result<Complex64> {
    let mm = idx.l.min(idx_p.l) as i32;
    let mut acc = Complex64::new(0.0, 0.0);
    for m_dd in -mm..=mm {
        let t = t_of_m(m_dd.unsigned_abs())?;
        if t == 0.0 {
            continue;
        }
        acc += d_rot.get(idx.m, m_dd) * d_tilt.get(idx_p.m, m_dd).conj() * t;
    }
    Ok(acc)
}

/// Matrix element `<T(t) Lambda(R) H_idx, H_idx_p>` of a full rigid motion.
///
/// Reduces to the axial table through the factorization
/// T(t) Lambda(R) = Lambda(Rt)^-1 T(nu e_z) Lambda(Rt R) with Rt the tilt
/// rotation of the pose. A zero translation degenerates to the pure Wigner
/// matrix element. When `table` is provided it must match the pose's nu and
/// cover both n orders; otherwise elements are computed on the fly.
pub fn coupled_element(
    idx: SglIndex,
    idx_p: SglIndex,
    pose: &Pose,
    table: Option<&TranslationTable>,
) -> Result<Complex64> {
    assert!(pose.nu >= 0.0, "pose nu is a magnitude and cannot be negative");
    if pose.nu == 0.0 {
        if idx.n != idx_p.n || idx.l != idx_p.l {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let d = wigner_d_matrix(idx.l, &pose.rotation);
        return Ok(d.get(idx.m, idx_p.m));
    }
    let table = table_for_pose(table, pose.nu, idx.n.max(idx_p.n))?;
    coupled_element_tilted(idx, idx_p, pose, &pose.tilt_matrix(), table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn a_coeff_pinned_and_parity() {
        assert_relative_eq!(a_coeff(1, 1, 0, 2).unwrap(), -2.0, max_relative = 1e-13);
        // (l, l', k) = (0, 0, 0): both 3j symbols are 1.
        assert_relative_eq!(a_coeff(0, 0, 0, 0).unwrap(), 1.0, max_relative = 1e-14);
        // (l, l', k) = (1, 0, 1): even parity, 3j(1 0 1; 0 0 0)^2 = 1/3.
        assert_relative_eq!(a_coeff(1, 0, 0, 1).unwrap(), 3.0f64.sqrt(), max_relative = 1e-13);
        // Odd l - l' + k vanishes exactly.
        assert_eq!(a_coeff(1, 1, 0, 1).unwrap(), 0.0);
        assert_eq!(a_coeff(2, 1, 1, 2).unwrap(), 0.0);
        // Sign of m is immaterial.
        for k in 0..=4u32 {
            let plus = a_coeff(2, 2, 1, k).unwrap();
            let minus = a_coeff(2, 2, -1, k).unwrap();
            assert_eq!(plus, minus);
        }
        assert!(a_coeff(1, 1, 2, 2).is_err());
        assert!(a_coeff(1, 1, 0, 3).is_err());
        assert!(a_coeff(2, 0, 0, 1).is_err());
    }

    #[test]
    fn mu_of_pinned_and_domain() {
        assert_eq!(mu_of(1, 0, 0, 0).unwrap(), 1);
        assert_eq!(mu_of(2, 1, 1, 2).unwrap(), 3);
        assert_eq!(mu_of(1, 2, 0, 2).unwrap(), 3);
        assert!(mu_of(1, 1, 0, 2).is_err());
        assert!(mu_of(2, 0, 1, 2).is_err());
    }

    #[test]
    fn c_poly_pinned_values() {
        for &nu in &[0.3, 1.0, 2.2] {
            assert_relative_eq!(c_poly(1, 1, 0, 0, 0, 0, nu).unwrap(), 1.0, max_relative = 1e-14);
            assert_relative_eq!(
                c_poly(2, 1, 0, 0, 0, 1, nu).unwrap(),
                -2.0 / 3.0 * nu * nu,
                max_relative = 1e-13
            );
        }
        // Empty sum when mu exceeds n.
        assert_eq!(c_poly(1, 2, 0, 0, 0, 0, 1.0).unwrap(), 0.0);
        // Odd parity is zero by convention.
        assert_eq!(c_poly(3, 2, 1, 0, 2, 0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn t_element_pinned_values() {
        for &nu in &[0.25, 1.0, 3.0] {
            assert_relative_eq!(t_element(1, 1, 0, 0, 0, nu).unwrap(), 1.0, max_relative = 1e-12);
            assert_abs_diff_eq!(t_element(1, 2, 0, 0, 0, nu).unwrap(), 0.0, epsilon = 1e-14);
            assert_relative_eq!(
                t_element(2, 1, 0, 0, 0, nu).unwrap(),
                -(2.0f64 / 3.0).sqrt() * nu * nu,
                max_relative = 1e-12
            );
        }
        assert!(t_element(2, 1, 0, 0, 0, 0.0).is_err());
        assert!(t_element(2, 1, 0, 0, 0, -1.0).is_err());
        assert!(t_element(1, 1, 1, 0, 0, 1.0).is_err());
        assert!(t_element(2, 2, 1, 1, 2, 1.0).is_err());
    }

    #[test]
    fn signed_element_direction_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        assert!(t_element_signed(2, 1, 0, 0, 0, 0.0).is_err());
        for _ in 0..200 {
            let n = rng.gen_range(1..=4u32);
            let n_p = rng.gen_range(1..=4u32);
            let l = rng.gen_range(0..n);
            let l_p = rng.gen_range(0..n_p);
            let m_abs = rng.gen_range(0..=l.min(l_p));
            let nu = rng.gen_range(0.1..2.0f64);
            let plus = t_element_signed(n, n_p, l, l_p, m_abs, nu).unwrap();
            let minus = t_element_signed(n, n_p, l, l_p, m_abs, -nu).unwrap();
            let sign = if (l + l_p) % 2 == 0 { 1.0 } else { -1.0 };
            let scale = plus.abs().max(1e-14);
            assert!(
                (minus - sign * plus).abs() <= 1e-12 * scale,
                "direction identity violated at ({n},{n_p},{l},{l_p},{m_abs}) nu={nu}"
            );
            assert_eq!(plus, t_element(n, n_p, l, l_p, m_abs, nu).unwrap());
        }
    }

    #[test]
    fn table_contents_and_csv() {
        let unit = build_table(1, 0.75).unwrap();
        assert_eq!(unit.len(), 1);
        assert_relative_eq!(unit.get(1, 1, 0, 0, 0).unwrap(), 1.0, max_relative = 1e-12);

        let table = build_table(2, 1.0).unwrap();
        assert_eq!(table.len(), 10);
        assert_relative_eq!(
            table.get(2, 1, 0, 0, 0).unwrap(),
            -(2.0f64 / 3.0).sqrt(),
            max_relative = 1e-12
        );
        assert!(table.get(3, 1, 0, 0, 0).is_none());

        let mut csv_a = Vec::new();
        table.write_csv(&mut csv_a).unwrap();
        let mut csv_b = Vec::new();
        table.write_csv(&mut csv_b).unwrap();
        assert_eq!(csv_a, csv_b, "CSV output must be byte-stable");
        let text = String::from_utf8(csv_a).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "n,np,l,lp,m_abs,nu,value");
        let first = lines.next().unwrap();
        assert!(first.starts_with("1,1,0,0,0,"), "unexpected first row: {first}");
        assert_eq!(text.lines().count(), 11);

        assert!(build_table(0, 1.0).is_err());
        assert!(build_table(2, 0.0).is_err());
        assert!(build_table(2, -0.1).is_err());
    }

    #[test]
    fn coupled_element_degenerate_cases() {
        let idx = SglIndex::new(3, 1, -1).unwrap();
        let idx_other = SglIndex::new(2, 1, 0).unwrap();

        // Identity pose: exact Kronecker delta.
        let id = Pose::identity();
        let same = coupled_element(idx, idx, &id, None).unwrap();
        assert_abs_diff_eq!(same.re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(same.im, 0.0, epsilon = 1e-14);
        let cross = coupled_element(idx, idx_other, &id, None).unwrap();
        assert_abs_diff_eq!(cross.norm(), 0.0, epsilon = 1e-14);

        // Pure rotation: the Wigner matrix itself.
        let rot = EulerZYZ::new(0.4, 1.1, 2.0);
        let pose = Pose::rotation_only(rot);
        let d = wigner_d_matrix(1, &rot);
        for m in -1..=1i32 {
            for m_p in -1..=1i32 {
                let got = coupled_element(
                    SglIndex::new(3, 1, m).unwrap(),
                    SglIndex::new(3, 1, m_p).unwrap(),
                    &pose,
                    None,
                )
                .unwrap();
                assert!((got - d.get(m, m_p)).norm() <= 1e-14);
            }
        }
    }

    /// Any tilt that maps the translation onto +z gives the same element;
    /// prepending a z-rotation to the canonical tilt must change nothing.
    #[test]
    fn coupled_element_tilt_gauge_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let pose = Pose::new(EulerZYZ::new(0.7, 0.9, 4.1), [0.3, -0.4, 0.5]);
        for _ in 0..10 {
            let psi = rng.gen_range(0.0..2.0 * PI);
            let canonical = pose.tilt_matrix();
            let alternative = mat_mul(&rot_z(psi), &canonical);
            for (idx, idx_p) in [
                (SglIndex::new(2, 1, 1).unwrap(), SglIndex::new(3, 2, -1).unwrap()),
                (SglIndex::new(3, 0, 0).unwrap(), SglIndex::new(2, 1, 0).unwrap()),
                (SglIndex::new(4, 3, 2).unwrap(), SglIndex::new(4, 2, -2).unwrap()),
            ] {
                let a = coupled_element_tilted(idx, idx_p, &pose, &canonical, None).unwrap();
                let b = coupled_element_tilted(idx, idx_p, &pose, &alternative, None).unwrap();
                assert!((a - b).norm() <= 1e-12, "tilt gauge dependence: {a} vs {b}");
            }
        }
    }

    #[test]
    fn coupled_element_table_validation() {
        let idx = SglIndex::new(2, 1, 0).unwrap();
        let pose = Pose::new(EulerZYZ::identity(), [0.0, 0.0, 1.0]);
        let good = build_table(2, 1.0).unwrap();
        let wrong_nu = build_table(2, 0.5).unwrap();
        let too_small = build_table(1, 1.0).unwrap();

        let direct = coupled_element(idx, idx, &pose, None).unwrap();
        let via_table = coupled_element(idx, idx, &pose, Some(&good)).unwrap();
        assert!((direct - via_table).norm() <= 1e-14);
        assert!(coupled_element(idx, idx, &pose, Some(&wrong_nu)).is_err());
        assert!(coupled_element(idx, idx, &pose, Some(&too_small)).is_err());
    }

    /// The tilt carries t onto the +z axis, so a pose translated straight up
    /// must reproduce the plain axial element.
    #[test]
    fn coupled_element_axial_consistency() {
        let nu = 0.8;
        let pose = Pose::new(EulerZYZ::identity(), [0.0, 0.0, nu]);
        for (n, l, n_p, l_p) in [(1u32, 0u32, 2u32, 0u32), (2, 1, 3, 1), (3, 2, 2, 1)] {
            for m in -(l.min(l_p) as i32)..=(l.min(l_p) as i32) {
                let idx = SglIndex::new(n, l, m).unwrap();
                let idx_p = SglIndex::new(n_p, l_p, m).unwrap();
                let got = coupled_element(idx, idx_p, &pose, None).unwrap();
                let want = t_element(n, n_p, l, l_p, m.unsigned_abs(), nu).unwrap();
                assert!((got - Complex64::new(want, 0.0)).norm() <= 1e-12);
                // Distinct azimuthal orders decouple for axial shifts.
                for m_p in -(l_p as i32)..=(l_p as i32) {
                    if m_p != m {
                        let off = coupled_element(
                            idx,
                            SglIndex::new(n_p, l_p, m_p).unwrap(),
                            &pose,
                            None,
                        )
                        .unwrap();
                        assert!(off.norm() <= 1e-13);
                    }
                }
            }
        }
    }
}

//! The spherical Gauss-Laguerre basis, its index space, quadrature rules,
//! and the forward/inverse transforms between point samples and spectra.
//!
//! Basis functions are H_nlm(r, theta, phi) = N_nl R_nl(r) Y_lm(theta, phi)
//! with R_nl(r) = L_{n-l-1}^{(l+1/2)}(r^2) r^l and
//! N_nl = sqrt(2 (n-l-1)! / Gamma(n+1/2)). They are orthonormal under the
//! inner product with weight exp(-r^2) on R^3, and H_nlm is a polynomial of
//! total degree 2n - l - 2. A spectrum of bandwidth B holds every index with
//! n <= B.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::specfun::{
    gamma_half, laguerre, ln_factorial, sph_harm, sph_harm_table, HalfInteger, KahanSum,
    SignedLogReal,
};
use crate::wigner::{wigner_d_matrix, EulerZYZ};
use crate::{domain_err, input_err, Error, Result};

/// Valid basis index: n >= 1, 0 <= l <= n-1, |m| <= l.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SglIndex {
    pub n: u32,
    pub l: u32,
    pub m: i32,
}

impl SglIndex {
    pub fn new(n: u32, l: u32, m: i32) -> Result<Self> {
        if n == 0 || l > n - 1 || m.unsigned_abs() > l {
            return domain_err(format!("invalid basis index (n, l, m) = ({n}, {l}, {m})"));
        }
        Ok(Self { n, l, m })
    }

    /// Position in the canonical layout: indices sorted by (n, l, m) with m
    /// ascending, which packs n's block at offset (n-1)n(2n-1)/6 and (l, m)
    /// at l^2 + l + m within the block.
    pub fn flat(&self) -> usize {
        let n = self.n as usize;
        let l = self.l as usize;
        let block = (n - 1) * n * (2 * n - 1) / 6;
        block + l * l + (self.l as i32 + self.m) as usize
    }

    /// Total polynomial degree of H_nlm.
    pub fn degree(&self) -> u32 {
        2 * self.n - self.l - 2
    }
}

/// Number of basis functions with n <= bandwidth.
pub fn spectrum_len(bandwidth: u32) -> usize {
    let b = bandwidth as usize;
    b * (b + 1) * (2 * b + 1) / 6
}

/// All indices with n <= bandwidth in storage order.
pub fn index_range(bandwidth: u32) -> impl Iterator<Item = SglIndex> {
    (1..=bandwidth).flat_map(|n| {
        (0..n).flat_map(move |l| {
            (-(l as i32)..=l as i32).map(move |m| SglIndex { n, l, m })
        })
    })
}

/// N_nl = sqrt(2 (n-l-1)! / Gamma(n+1/2)), in sign/log form.
pub fn normalization(n: u32, l: u32) -> SignedLogReal {
    assert!(n >= 1 && l <= n - 1, "normalization: invalid (n, l) = ({n}, {l})");
    let log = 0.5
        * (std::f64::consts::LN_2 + ln_factorial(n - l - 1) - gamma_half(n).log_magnitude);
    SignedLogReal::new(1, log)
}

/// Unnormalized radial part R_nl(r) = L_{n-l-1}^{(l+1/2)}(r^2) r^l.
pub fn radial(n: u32, l: u32, r: f64) -> f64 {
    assert!(n >= 1 && l <= n - 1, "radial: invalid (n, l) = ({n}, {l})");
    assert!(r >= 0.0, "radial: r must be nonnegative");
    let lag = laguerre(n - l - 1, HalfInteger::plus_half(l as i64), r * r)
        .expect("alpha = l + 1/2 is always admissible");
    lag * r.powi(l as i32)
}

/// Full basis function H_nlm at a spherical point.
pub fn eval_basis(idx: SglIndex, r: f64, theta: f64, phi: f64) -> Complex64 {
    let y = sph_harm(idx.l, idx.m, theta, phi).expect("|m| <= l by index validity");
    normalization(idx.n, idx.l).to_f64() * radial(idx.n, idx.l, r) * y
}

pub fn spherical_from_cartesian(p: [f64; 3]) -> [f64; 3] {
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    if r == 0.0 {
        return [0.0, 0.0, 0.0];
    }
    let theta = (p[2] / r).clamp(-1.0, 1.0).acos();
    let phi = p[1].atan2(p[0]);
    [r, theta, if phi < 0.0 { phi + 2.0 * std::f64::consts::PI } else { phi }]
}

pub fn cartesian_from_spherical(p: [f64; 3]) -> [f64; 3] {
    let [r, theta, phi] = p;
    [r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos()]
}

// ---------------------------------------------------------------------------
// Spectra

/// Dense coefficient vector over all indices with n <= bandwidth, stored in
/// the canonical (n, l, m) order. Every slot is always present.
#[derive(Clone, Debug, PartialEq)]
pub struct SglSpectrum {
    bandwidth: u32,
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct CoeffRecord {
    n: u32,
    l: u32,
    m: i32,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SpectrumFile {
    bandwidth: u32,
    coefficients: Vec<CoeffRecord>,
}

impl SglSpectrum {
    pub fn zeros(bandwidth: u32) -> Self {
        assert!(bandwidth >= 1, "bandwidth must be at least 1");
        Self { bandwidth, coeffs: vec![Complex64::new(0.0, 0.0); spectrum_len(bandwidth)] }
    }

    pub fn bandwidth(&self) -> u32 {
        self.bandwidth
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, idx: SglIndex) -> Complex64 {
        self.coeffs[idx.flat()]
    }

    pub fn set(&mut self, idx: SglIndex, value: Complex64) {
        self.coeffs[idx.flat()] = value;
    }

    pub fn indices(&self) -> impl Iterator<Item = SglIndex> {
        index_range(self.bandwidth)
    }

    /// sum |c|^2, the squared H-norm by orthonormality.
    pub fn norm_squared(&self) -> f64 {
        let mut acc = KahanSum::default();
        for c in &self.coeffs {
            acc.add(c.norm_sqr());
        }
        acc.value()
    }

    /// Same coefficients re-embedded at a larger bandwidth (zero padding).
    pub fn padded(&self, bandwidth: u32) -> Result<Self> {
        if bandwidth < self.bandwidth {
            return input_err(format!(
                "cannot pad bandwidth {} down to {bandwidth}",
                self.bandwidth
            ));
        }
        let mut out = Self::zeros(bandwidth);
        for idx in self.indices() {
            out.set(idx, self.get(idx));
        }
        Ok(out)
    }

    /// Coefficients of x -> f(R^-1 x): c'_nlm' = sum_m c_nlm D^l_{m m'}(R).
    pub fn rotated(&self, rotation: &EulerZYZ) -> Self {
        let mut out = Self::zeros(self.bandwidth);
        let d_mats: Vec<_> =
            (0..self.bandwidth).map(|l| wigner_d_matrix(l, rotation)).collect();
        for n in 1..=self.bandwidth {
            for l in 0..n {
                let d = &d_mats[l as usize];
                for m_prime in -(l as i32)..=l as i32 {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for m in -(l as i32)..=l as i32 {
                        acc += self.get(SglIndex { n, l, m }) * d.get(m, m_prime);
                    }
                    out.set(SglIndex { n, l, m: m_prime }, acc);
                }
            }
        }
        out
    }

    /// Evaluate the expansion at one spherical point.
    pub fn eval_point(&self, r: f64, theta: f64, phi: f64) -> Complex64 {
        let y_table = sph_harm_table(self.bandwidth - 1, theta, phi);
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 1..=self.bandwidth {
            for l in 0..n {
                let nr = normalization(n, l).to_f64() * radial(n, l, r);
                for m in -(l as i32)..=l as i32 {
                    let y = y_table[(l * l) as usize + (l as i32 + m) as usize];
                    acc += self.get(SglIndex { n, l, m }) * nr * y;
                }
            }
        }
        acc
    }

    pub fn to_json_string(&self) -> String {
        let coefficients = self
            .indices()
            .map(|idx| {
                let c = self.get(idx);
                CoeffRecord { n: idx.n, l: idx.l, m: idx.m, re: c.re, im: c.im }
            })
            .collect();
        let file = SpectrumFile { bandwidth: self.bandwidth, coefficients };
        serde_json::to_string_pretty(&file).expect("spectrum serialization cannot fail")
    }

    /// Parse and validate: the coefficient list must contain exactly the
    /// canonical index set in canonical order, nothing missing, nothing extra.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: SpectrumFile =
            serde_json::from_str(s).map_err(|e| Error::Input(format!("spectrum JSON: {e}")))?;
        if file.bandwidth == 0 {
            return input_err("spectrum bandwidth must be at least 1");
        }
        let expected = spectrum_len(file.bandwidth);
        if file.coefficients.len() != expected {
            return input_err(format!(
                "spectrum with bandwidth {} must list {expected} coefficients, found {}",
                file.bandwidth,
                file.coefficients.len()
            ));
        }
        let mut out = Self::zeros(file.bandwidth);
        for (slot, rec) in index_range(file.bandwidth).zip(&file.coefficients) {
            if (rec.n, rec.l, rec.m) != (slot.n, slot.l, slot.m) {
                return input_err(format!(
                    "coefficient for ({}, {}, {}) found where ({}, {}, {}) was expected; \
                     entries must follow the canonical (n, l, m) order",
                    rec.n, rec.l, rec.m, slot.n, slot.l, slot.m
                ));
            }
            out.set(slot, Complex64::new(rec.re, rec.im));
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Quadrature

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    /// Nodes are radii r in coordinate 0; weight includes r^2 exp(-r^2) dr.
    Radial,
    /// Nodes are (theta, phi) in coordinates 0 and 1; weight includes
    /// sin(theta) dtheta dphi.
    Angular,
    /// Nodes are Cartesian (x, y, z); weight includes exp(-|x|^2) dV.
    Cartesian,
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// Largest polynomial degree integrated exactly: degree in s = r^2 for
    /// radial rules, combined Legendre degree for angular rules (with
    /// Fourier orders up to the same bound in phi), per-axis degree for
    /// Cartesian rules.
    pub exact_degree: u32,
}

/// Nodes and weights of the n-point Gauss rule for the measure encoded by a
/// symmetric tridiagonal Jacobi matrix, via its eigendecomposition.
fn golub_welsch(diag: &[f64], offdiag: &[f64], mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut j = nalgebra::DMatrix::<f64>::zeros(n, n);
    for (i, &d) in diag.iter().enumerate() {
        j[(i, i)] = d;
    }
    for (i, &b) in offdiag.iter().enumerate() {
        j[(i, i + 1)] = b;
        j[(i + 1, i)] = b;
    }
    let eig = nalgebra::SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|c| (eig.eigenvalues[c], mu0 * eig.eigenvectors[(0, c)] * eig.eigenvectors[(0, c)]))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Gauss rule with `bandwidth` points for integrals
/// int_0^inf h(r) r^2 exp(-r^2) dr, exact whenever h(r) is a polynomial in
/// r^2 of degree <= 2*bandwidth - 1.
///
/// Substituting s = r^2 turns the integral into a generalized Gauss-Laguerre
/// problem with alpha = 1/2 and an overall factor 1/2.
pub fn radial_rule(bandwidth: u32) -> QuadratureRule {
    assert!(bandwidth >= 1);
    let n = bandwidth as usize;
    let alpha = 0.5;
    let diag: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + alpha + 1.0).collect();
    let offdiag: Vec<f64> = (1..n).map(|i| (i as f64 * (i as f64 + alpha)).sqrt()).collect();
    let mu0 = gamma_half(1).to_f64(); // Gamma(3/2)
    let (s_nodes, s_weights) = golub_welsch(&diag, &offdiag, mu0);
    let nodes = s_nodes.iter().map(|&s| [s.sqrt(), 0.0, 0.0]).collect();
    let weights = s_weights.iter().map(|&w| 0.5 * w).collect();
    QuadratureRule { kind: RuleKind::Radial, nodes, weights, exact_degree: 2 * bandwidth - 1 }
}

/// Gauss-Legendre nodes and weights on [-1, 1], exact to degree 2*count - 1.
pub(crate) fn legendre_points(count: u32) -> (Vec<f64>, Vec<f64>) {
    assert!(count >= 1);
    let n = count as usize;
    let diag = vec![0.0; n];
    let offdiag: Vec<f64> =
        (1..n).map(|i| i as f64 / (4.0 * (i * i) as f64 - 1.0).sqrt()).collect();
    golub_welsch(&diag, &offdiag, 2.0)
}

/// Product rule on the unit sphere: Gauss-Legendre with `bandwidth` points
/// in cos(theta) crossed with 2*bandwidth equispaced points in phi.
///
/// Integrates Y_lm Y*_l'm' exactly for l + l' <= 2*bandwidth - 1, so it
/// resolves every pair of orders below the bandwidth.
pub fn angular_rule(bandwidth: u32) -> QuadratureRule {
    assert!(bandwidth >= 1);
    let n = bandwidth as usize;
    let (x_nodes, x_weights) = legendre_points(bandwidth);
    let n_phi = 2 * n;
    let phi_weight = std::f64::consts::PI / n as f64; // 2 pi / (2 n)
    let mut nodes = Vec::with_capacity(n * n_phi);
    let mut weights = Vec::with_capacity(n * n_phi);
    for (x, wx) in x_nodes.iter().zip(&x_weights) {
        let theta = x.clamp(-1.0, 1.0).acos();
        for b in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * b as f64 / n_phi as f64;
            nodes.push([theta, phi, 0.0]);
            weights.push(wx * phi_weight);
        }
    }
    QuadratureRule { kind: RuleKind::Angular, nodes, weights, exact_degree: 2 * bandwidth - 1 }
}

/// Tensor Gauss-Hermite rule on R^3 with weight exp(-|x|^2), exact when the
/// integrand is a polynomial of degree <= 2*points_per_axis - 1 in each axis.
pub fn hermite_rule(points_per_axis: u32) -> QuadratureRule {
    assert!(points_per_axis >= 1);
    let n = points_per_axis as usize;
    let diag = vec![0.0; n];
    let offdiag: Vec<f64> = (1..n).map(|i| (i as f64 / 2.0).sqrt()).collect();
    let mu0 = std::f64::consts::PI.sqrt();
    let (x_nodes, x_weights) = golub_welsch(&diag, &offdiag, mu0);
    let mut nodes = Vec::with_capacity(n * n * n);
    let mut weights = Vec::with_capacity(n * n * n);
    for (xi, wi) in x_nodes.iter().zip(&x_weights) {
        for (xj, wj) in x_nodes.iter().zip(&x_weights) {
            for (xk, wk) in x_nodes.iter().zip(&x_weights) {
                nodes.push([*xi, *xj, *xk]);
                weights.push(wi * wj * wk);
            }
        }
    }
    QuadratureRule {
        kind: RuleKind::Cartesian,
        nodes,
        weights,
        exact_degree: 2 * points_per_axis - 1,
    }
}

// ---------------------------------------------------------------------------
// Transforms

/// Spherical sample points for [`forward_transform_samples`], in the fixed
/// order radial-major, then theta, then phi: the sample for radial node i,
/// colatitude node a, azimuth node b lives at index (i*B + a)*2B + b.
pub fn sample_grid(bandwidth: u32) -> Vec<[f64; 3]> {
    let radial = radial_rule(bandwidth);
    let angular = angular_rule(bandwidth);
    let mut grid = Vec::with_capacity(radial.nodes.len() * angular.nodes.len());
    for rn in &radial.nodes {
        for an in &angular.nodes {
            grid.push([rn[0], an[0], an[1]]);
        }
    }
    grid
}

/// Project a function onto every basis element with n <= bandwidth.
///
/// Exact (to roundoff) whenever f is itself an expansion of bandwidth
/// <= bandwidth, by the quadrature exactness degrees above.
pub fn forward_transform<F>(f: F, bandwidth: u32) -> SglSpectrum
where
    F: Fn(f64, f64, f64) -> Complex64,
{
    let samples: Vec<Complex64> =
        sample_grid(bandwidth).iter().map(|p| f(p[0], p[1], p[2])).collect();
    forward_transform_samples(&samples, bandwidth).expect("generated grid always matches")
}

/// Same as [`forward_transform`], from samples laid out as [`sample_grid`].
pub fn forward_transform_samples(samples: &[Complex64], bandwidth: u32) -> Result<SglSpectrum> {
    assert!(bandwidth >= 1);
    let radial_nodes = radial_rule(bandwidth);
    let angular_nodes = angular_rule(bandwidth);
    let n_r = radial_nodes.nodes.len();
    let n_ang = angular_nodes.nodes.len();
    if samples.len() != n_r * n_ang {
        return input_err(format!(
            "expected {} samples on the bandwidth-{bandwidth} grid, found {}",
            n_r * n_ang,
            samples.len()
        ));
    }
    let l_max = bandwidth - 1;
    let n_lm = ((l_max + 1) * (l_max + 1)) as usize;

    // Angular reduction first: partial[i_r][l^2+l+m] = sum_ang w f conj(Y).
    let mut partial = vec![Complex64::new(0.0, 0.0); n_r * n_lm];
    for (a, (node, &w)) in angular_nodes.nodes.iter().zip(&angular_nodes.weights).enumerate() {
        let y = sph_harm_table(l_max, node[0], node[1]);
        for i_r in 0..n_r {
            let sample = samples[i_r * n_ang + a] * w;
            let row = &mut partial[i_r * n_lm..(i_r + 1) * n_lm];
            for (p, yv) in row.iter_mut().zip(&y) {
                *p += sample * yv.conj();
            }
        }
    }

    let mut out = SglSpectrum::zeros(bandwidth);
    for n in 1..=bandwidth {
        for l in 0..n {
            let n_nl = normalization(n, l).to_f64();
            for m in -(l as i32)..=l as i32 {
                let lm = (l * l) as usize + (l as i32 + m) as usize;
                let mut acc = Complex64::new(0.0, 0.0);
                for (i_r, (node, &w)) in
                    radial_nodes.nodes.iter().zip(&radial_nodes.weights).enumerate()
                {
                    acc += partial[i_r * n_lm + lm] * (w * n_nl * radial(n, l, node[0]));
                }
                out.set(SglIndex { n, l, m }, acc);
            }
        }
    }
    Ok(out)
}

/// Evaluate a spectrum at a list of spherical points.
pub fn synthesize(spectrum: &SglSpectrum, points: &[[f64; 3]]) -> Vec<Complex64> {
    points.iter().map(|p| spectrum.eval_point(p[0], p[1], p[2])).collect()
}

// ---------------------------------------------------------------------------
// Weighted spherical Bessel transform of the radial part

/// Closed form of the weighted transform
/// sqrt(2/pi) int_0^inf N_nl R_nl(xi) j_l(beta xi) xi^2 exp(-gamma xi^2) dxi
/// for 0 < gamma <= 1 and beta > 0.
///
/// Interior gamma produces a rescaled Laguerre polynomial in beta; at
/// gamma = 1 the polynomial collapses to the single power beta^(2n-l-2).
/// The two branches meet continuously as gamma -> 1.
pub fn weighted_bessel_closed(n: u32, l: u32, gamma: f64, beta: f64) -> Result<f64> {
    assert!(n >= 1 && l <= n - 1, "weighted_bessel_closed: invalid (n, l) = ({n}, {l})");
    if !(gamma > 0.0 && gamma <= 1.0) {
        return domain_err(format!("weighted_bessel_closed: gamma = {gamma} outside (0, 1]"));
    }
    if beta <= 0.0 {
        return domain_err(format!("weighted_bessel_closed: beta = {beta} must be positive"));
    }
    let n_nl = normalization(n, l).to_f64();
    let k = n - l - 1;
    if gamma == 1.0 {
        let mut k_fact = 1.0;
        for i in 2..=k as u64 {
            k_fact *= i as f64;
        }
        return Ok(n_nl / k_fact
            * beta.powi((2 * n - l - 2) as i32)
            * (-beta * beta / 4.0).exp()
            * 0.5f64.powf(2.0 * n as f64 - l as f64 - 0.5));
    }
    let arg = beta * beta / (4.0 * gamma * (1.0 - gamma));
    let lag = laguerre(k, HalfInteger::plus_half(l as i64), arg)
        .expect("alpha = l + 1/2 is always admissible");
    Ok(n_nl * (gamma - 1.0).powi(k as i32) / gamma.powf(n as f64 + 0.5)
        * beta.powi(l as i32)
        * lag
        * (-beta * beta / (4.0 * gamma)).exp()
        * 0.5f64.powf(l as f64 + 1.5))
}

//! Spherical Gauss-Laguerre (SGL) toolkit.
//!
//! The SGL basis functions `H_nlm(r, theta, phi) = N_nl R_nl(r) Y_lm(theta, phi)`
//! are orthonormal on R^3 under the Gaussian weight `exp(-r^2)` and are closed
//! under rotation and translation. This crate provides the basis itself
//! ([`sgl`]), Wigner rotation matrices ([`wigner`]), closed-form translation
//! coupling tables ([`translate`]), brute-force quadrature oracles that
//! cross-check every closed form ([`oracle`]), and grid search for the rigid
//! motion best aligning two expansions ([`matching`]).

pub mod matching;
pub mod oracle;
pub mod rational;
pub mod sgl;
pub mod specfun;
pub mod translate;
pub mod wigner;

/// Errors surfaced by fallible operations across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A mathematical precondition was violated (index out of range,
    /// parameter outside the domain of a formula).
    #[error("domain error: {0}")]
    Domain(String),
    /// Structurally invalid input (mismatched lengths, malformed file
    /// contents, inconsistent bandwidths).
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

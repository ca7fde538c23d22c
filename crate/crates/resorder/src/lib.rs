//! Densities of primes classified by the residue class of the multiplicative
//! order (or index) of a fixed rational base.
//!
//! For a rational `g` outside `{-1, 0, 1}` and a prime `p` not dividing the
//! numerator or denominator of `g`, the order `ord_g(p)` is the least `k >= 1`
//! with `g^k = 1 (mod p)`, and the index `r_g(p)` is `(p-1)/ord_g(p)`. This
//! crate computes, exactly where a closed form exists and numerically
//! otherwise, the natural density of primes for which the order or index lies
//! in a prescribed residue class mod 3 or mod 4, and verifies those densities
//! empirically by a census over the first N primes.
//!
//! The closed forms live in `Q + Q*A` where `A` is one of two Euler-product
//! constants attached to the nonprincipal characters mod 4 and mod 3:
//!
//!   A_psi1 = prod_{p = 3 mod 4} (1 - 2p/((p^2+1)(p-1))) = 0.643650679662525...
//!   A_xi1  = prod_{p = 2 mod 3} (1 - 2p/((p^2+1)(p-1))) = 0.173977122429634...
//!
//! Module map:
//! - [`arith`]: exact rationals, factorization, Moebius/phi, Legendre symbol,
//!   segmented prime sieve
//! - [`gdecomp`]: decomposition `g = +/- g0^h` and the attached quadratic
//!   discriminant parameters
//! - [`kummer`]: degrees of the fields `Q(zeta_n, g^(1/k))` and the quadratic
//!   intersections with `Q(zeta_8)` that drive all membership tests
//! - [`dirichlet`]: character groups mod d and the convolution `h_chi = mu * chi`
//! - [`eulerprod`]: the constants `A_chi`, the constrained Euler sums
//!   `C_chi(h,r,s)` in closed form, and the specialized finite products
//! - [`densities`]: every closed-form density (order mod 3/4, index, generic,
//!   local)
//! - [`series`]: independent truncated-series evaluation of the same densities
//!   from their definitional sums, used to validate the closed forms
//! - [`census`]: streaming prime census with order/index tallies and
//!   checkpointing
//! - [`tables`]: the reference rows reproduced by the `table` subcommand
//! - [`report`], [`cli`]: output formatting and the command-line surface

// divisibility tests read better as `n % d == 0` throughout
#![allow(clippy::manual_is_multiple_of)]

pub mod arith;
pub mod census;
pub mod cli;
pub mod densities;
pub mod dirichlet;
pub mod eulerprod;
pub mod gdecomp;
pub mod kummer;
pub mod report;
pub mod series;
pub mod tables;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The base g is 0, 1 or -1 (no order distribution exists) or malformed.
    #[error("invalid base g: {0}")]
    InvalidBase(String),
    /// A prime-congruence class outside the supported shapes.
    #[error("unsupported class: {0}")]
    UnsupportedClass(String),
    /// Input exceeds a documented resource bound.
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    /// No exact closed form on this path; use the series evaluation.
    #[error("numeric only: {0}")]
    NumericOnly(String),
    /// Checkpoint file missing, corrupt, or inconsistent with the request.
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    /// Malformed textual input (rational, class spec, exact value).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

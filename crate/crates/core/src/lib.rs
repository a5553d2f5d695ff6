//! Expected real zeros of random Dirichlet polynomials.
//!
//! For i.i.d. standard normal `X_n` the random polynomial
//!
//! ```text
//! S(t) = sum_{n <= T} X_n (log n)^k n^(-sigma) cos(t log n)      (or sin)
//! ```
//!
//! has an expected number of zeros on any interval given exactly by the
//! Kac-Rice (Edelman-Kostlan) integral of a covariance-derived density.
//! This crate evaluates that integral ([`kac_rice`]), compares it with the
//! two-term asymptotic `(1/pi) sqrt((2k+1)/(2k+3)) T log T + ...`
//! ([`asymptotics`]), counts zeros of simulated realizations
//! ([`monte_carlo`]) and checks the intermediate estimates of the asymptotic
//! analysis ([`diagnostics`]).
//!
//! All randomness is counter-based: trial `i` of master seed `s` is a pure
//! function of `(s, i)`, and every parallel reduction has a fixed order, so
//! results are identical for any number of threads.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod diagnostics;
pub mod error;
pub mod eval;
pub mod kac_rice;
pub mod model;
pub mod monte_carlo;
pub mod quadrature;
pub mod summation;

pub use error::{Error, Result};
pub use model::{
    make_spec, sample_coefficients, CoefficientSample, Interval, Part, PolynomialSpec,
};

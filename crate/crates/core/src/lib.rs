//! Exact finite-N laws of the first two spectral moments t1 = tr M and
//! t2 = tr M^2 of Gaussian beta-ensembles, for any dimension N and any
//! Dyson index beta > 0.
//!
//! The crate has three layers:
//!
//! * deterministic trace algebra ([`trace_algebra`], [`domain`]): power sums,
//!   Newton's identities, the Hankel/Gram discriminant with its shift and
//!   scaling laws, and the inequalities carving out the image of the trace
//!   map;
//! * closed-form distributions ([`distributions`]): the joint density of
//!   (t1, t2), both marginals, the factorized exact sampler, and mixed
//!   moments E[t1^{2k} t2^n];
//! * independent oracles ([`sampling`], [`verify`], [`quadrature`]): dense
//!   and tridiagonal matrix samplers, a Metropolis walk on the eigenvalue
//!   density, adaptive Gauss-Kronrod quadrature, and a campaign runner that
//!   cross-checks every closed form against all of them.
//!
//! Densities are handled in natural-log form throughout; see
//! [`distributions::LogDensity`].

pub mod distributions;
pub mod domain;
pub mod error;
pub mod model;
pub mod quadrature;
pub mod sampling;
pub mod special;
pub mod trace_algebra;
pub mod verify;

pub use error::{Error, Result};
pub use model::{EnsembleParams, MatrixSample, RngStream, Spectrum, TraceVector};

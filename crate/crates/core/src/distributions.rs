//! Closed-form laws of the first two traces: the joint density of (t1, t2),
//! its normalization, both marginals, the factorized exact sampler, mixed
//! moments, and the unnormalized joint density of all N traces.
//!
//! Everything is exposed in natural-log form: the normalization contains
//! Gamma(p + 1) with p ~ beta N^2 / 4, which overflows linear scale almost
//! immediately.

use crate::error::{Error, Result};
use crate::model::{EnsembleParams, RngStream, TraceVector};
use crate::sampling::sample_gamma;
use crate::special::ln_gamma;
use crate::trace_algebra::{discriminant, DomainClass};
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

/// Classification tolerance used when a density evaluation needs the domain
/// indicator; matches the discriminant default used across tests.
const INDICATOR_TOL: f64 = 1e-10;

/// A natural-log density value: finite on the open support, -inf off it,
/// never NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDensity(f64);

impl LogDensity {
    pub fn new(value: f64) -> Self {
        assert!(!value.is_nan(), "log-density must not be NaN");
        Self(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// exp of the stored value; 0 off-support.
    pub fn density(self) -> f64 {
        self.0.exp()
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

/// ln of the joint-law normalization:
/// ln Gamma(p+1) + (p+1) ln(2/beta) + (1/2) ln(2 pi N / beta).
pub fn log_normalization(params: &EnsembleParams) -> Result<f64> {
    let p = params.require_valid_exponent()?;
    let beta = params.beta();
    Ok(ln_gamma(p + 1.0) + (p + 1.0) * (2.0 / beta).ln() + 0.5 * (2.0 * PI * params.n() / beta).ln())
}

/// Joint log-density of (t1, t2):
/// -ln N + p ln(t2 - t1^2/N) - (beta/2) t2 on t2 > t1^2/N, -inf outside.
///
/// On the boundary t2 = t1^2/N the value is -inf except p = 0, which keeps
/// the finite factor (0 ln 0 = 0). For -1 < p < 0 the boundary is an
/// integrable singularity; it carries no mass, so it also reports -inf and
/// quadrature handles it by the u-substitution (see the quadrature module).
pub fn log_q_t1_t2(params: &EnsembleParams, t1: f64, t2: f64) -> Result<LogDensity> {
    let p = params.require_valid_exponent()?;
    let log_norm = log_normalization(params)?;
    let u = t2 - t1 * t1 / params.n();
    if u < 0.0 || (u == 0.0 && p != 0.0) {
        return Ok(LogDensity::new(f64::NEG_INFINITY));
    }
    let power = if p == 0.0 { 0.0 } else { p * u.ln() };
    Ok(LogDensity::new(
        -log_norm + power - 0.5 * params.beta() * t2,
    ))
}

/// Marginal of t1: Normal(0, N/beta) in log form.
pub fn log_q_t1(params: &EnsembleParams, t1: f64) -> LogDensity {
    let beta = params.beta();
    let n = params.n();
    LogDensity::new(0.5 * (beta / (2.0 * PI * n)).ln() - 0.5 * beta * t1 * t1 / n)
}

/// Marginal of t2 for t2 > 0:
/// (p+3/2) ln(beta/2) - ln Gamma(p+3/2) + (p+1/2) ln t2 - (beta/2) t2,
/// i.e. beta t2 ~ Gamma(shape p+3/2, scale 2). When 2p+3 is a positive
/// integer that is a chi-squared law with 2p+3 degrees of freedom.
pub fn log_q_t2(params: &EnsembleParams, t2: f64) -> Result<LogDensity> {
    let p = params.exponent_p();
    let shape = p + 1.5;
    if shape <= 0.0 {
        return Err(Error::InvalidExponent(p));
    }
    if t2 <= 0.0 {
        return Err(Error::NonPositiveT2(t2));
    }
    let beta = params.beta();
    Ok(LogDensity::new(
        shape * (0.5 * beta).ln() - ln_gamma(shape) + (p + 0.5) * t2.ln() - 0.5 * beta * t2,
    ))
}

/// Exact draw from the joint law through its factorization: v ~ N(0, N/beta)
/// and u ~ Gamma(p+1, scale 2/beta) are independent, and
/// (t1, t2) = (v, u + v^2/N).
pub fn sample_t1_t2_exact(params: &EnsembleParams, rng: &mut RngStream) -> Result<(f64, f64)> {
    let p = params.require_valid_exponent()?;
    let beta = params.beta();
    let g: f64 = StandardNormal.sample(rng);
    let v = g * (params.n() / beta).sqrt();
    let u = sample_gamma(p + 1.0, rng) * (2.0 / beta);
    Ok((v, u + v * v / params.n()))
}

/// Mixed moment E[t1^{2k} t2^n]:
/// N^k pi^{-1/2} (2/beta)^{k+n} Gamma(k+1/2) Gamma(k+n+p+3/2) / Gamma(k+p+3/2).
/// Odd powers of t1 vanish by symmetry, which is why only even exponents 2k
/// appear. For integer k, n both gamma ratios telescope into finite products,
/// so the evaluation is exact up to f64 rounding of the product itself:
/// Gamma(k+1/2)/sqrt(pi) = prod_{j=1..k} (j - 1/2) and
/// Gamma(z+n)/Gamma(z) = prod_{j=0..n-1} (z + j) with z = k + p + 3/2.
pub fn mixed_moment(params: &EnsembleParams, k: u32, n: u32) -> Result<f64> {
    let p = params.exponent_p();
    let kf = k as f64;
    if p + kf + 1.5 <= 0.0 {
        return Err(Error::InvalidExponent(p));
    }
    let mut value = params.n().powi(k as i32) * (2.0 / params.beta()).powi((k + n) as i32);
    for j in 1..=k {
        value *= j as f64 - 0.5;
    }
    for j in 0..n {
        value *= kf + p + 1.5 + j as f64;
    }
    Ok(value)
}

/// E[t2] = N^2/2 + (2 - beta) N / (2 beta).
pub fn mean_t2(params: &EnsembleParams) -> f64 {
    let n = params.n();
    let beta = params.beta();
    0.5 * n * n + 0.5 * (2.0 - beta) * n / beta
}

/// Unnormalized joint log-density of the full trace vector:
/// (beta - 1) ln G(t) - (beta/2) t2 on the domain, -inf outside.
///
/// At beta = 1 the discriminant factor drops out entirely, so boundary
/// vectors keep the finite value; for any other beta the boundary (G = 0)
/// carries no mass and reports -inf.
pub fn log_trace_jpdf_unnormalized(params: &EnsembleParams, t: &TraceVector) -> Result<LogDensity> {
    let d = discriminant(t, INDICATOR_TOL)?;
    let beta = params.beta();
    let base = -0.5 * beta * t.t(2);
    let value = match d.class {
        DomainClass::Exterior => f64::NEG_INFINITY,
        DomainClass::Boundary => {
            if beta == 1.0 {
                base
            } else {
                f64::NEG_INFINITY
            }
        }
        DomainClass::Interior => {
            if beta == 1.0 {
                base
            } else {
                (beta - 1.0) * d.log_abs_g + base
            }
        }
    };
    Ok(LogDensity::new(value))
}

//! Shared fixtures for the criterion benches.

use trace_moments::trace_algebra::traces_from_spectrum;
use trace_moments::{EnsembleParams, Spectrum, TraceVector};

pub fn params(n: usize, beta: f64) -> EnsembleParams {
    EnsembleParams::new(n, beta).expect("benchmark parameters are valid")
}

/// Well-separated spectrum with unit-order gaps; its traces classify
/// interior at any reasonable tolerance.
pub fn ladder_traces(n: usize) -> TraceVector {
    let values: Vec<f64> = (0..n).map(|i| i as f64 - 0.5 * (n as f64 - 1.0)).collect();
    traces_from_spectrum(&Spectrum::new(values).expect("finite ladder"), n)
}

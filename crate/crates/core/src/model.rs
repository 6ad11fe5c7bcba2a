//! Shared domain types: ensemble parameters, spectra, trace vectors, matrix
//! samples, and the seedable RNG stream every sampler draws from.

use crate::error::{Error, Result};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Gaussian beta-ensemble parameters: dimension N and Dyson index beta.
///
/// beta may be any strictly positive real; 1, 2, 4 are the classical
/// orthogonal/unitary/symplectic cases but nothing here requires them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleParams {
    n_dim: usize,
    beta: f64,
}

impl EnsembleParams {
    pub fn new(n_dim: usize, beta: f64) -> Result<Self> {
        if n_dim == 0 {
            return Err(Error::NonPositiveN);
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::NonPositiveBeta(beta));
        }
        Ok(Self { n_dim, beta })
    }

    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    /// N as a float, for formulas.
    pub fn n(&self) -> f64 {
        self.n_dim as f64
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Exponent of the centered second trace u = t2 - t1^2/N in the joint
    /// density of (t1, t2):
    ///
    /// p = (beta N^2 + (2 - beta) N - 6) / 4.
    ///
    /// p can drop to -1 for small N (every N = 1 gives p = -1 exactly);
    /// operations involving Gamma(p + 1) must reject p <= -1.
    pub fn exponent_p(&self) -> f64 {
        let n = self.n();
        (self.beta * n * n + (2.0 - self.beta) * n - 6.0) / 4.0
    }

    /// The exponent, validated: errors when p <= -1, where Gamma(p + 1)
    /// diverges and the joint density stops being normalizable.
    pub fn require_valid_exponent(&self) -> Result<f64> {
        let p = self.exponent_p();
        if p <= -1.0 {
            return Err(Error::InvalidExponent(p));
        }
        Ok(p)
    }
}

/// Eigenvalues in non-decreasing order. Construction sorts, so building a
/// Spectrum from any permutation yields the same canonical value.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NonPositiveN);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum);
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite by validation"));
        Ok(Self { values })
    }

    pub fn n_dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Power-sum traces t_1 .. t_K of a spectrum of dimension `n_dim`.
///
/// t_0 = N is never stored; [`TraceVector::t`] supplies it. K may exceed
/// n_dim (extended vectors) or fall short of it (partial views like a bare
/// (t1, t2) pair).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceVector {
    n_dim: usize,
    values: Vec<f64>,
}

impl TraceVector {
    pub fn new(n_dim: usize, values: Vec<f64>) -> Result<Self> {
        if n_dim == 0 {
            return Err(Error::NonPositiveN);
        }
        if values.is_empty() {
            return Err(Error::InsufficientTraces { need: 1, have: 0 });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum);
        }
        Ok(Self { n_dim, values })
    }

    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    /// Number of stored traces K (indices 1..=K).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// t_r with the implicit t_0 = N. Panics if r > K.
    pub fn t(&self, r: usize) -> f64 {
        if r == 0 {
            self.n_dim as f64
        } else {
            self.values[r - 1]
        }
    }

    /// Stored traces t_1..t_K as a slice.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A sampled ensemble matrix, stored as the sampler produced it.
///
/// Dense payloads are exactly self-adjoint: only the upper triangle is
/// drawn, the rest is mirrored. Tridiagonal sub-diagonals are strictly
/// positive (chi variates).
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSample {
    /// Real symmetric (beta = 1), row-major N x N.
    DenseSymmetric { n_dim: usize, entries: Vec<f64> },
    /// Complex Hermitian (beta = 2), row-major N x N.
    DenseHermitian {
        n_dim: usize,
        entries: Vec<num_complex::Complex64>,
    },
    /// Symmetric tridiagonal (any beta > 0): main diagonal and sub-diagonal.
    Tridiagonal { diag: Vec<f64>, sub: Vec<f64> },
}

impl MatrixSample {
    pub fn n_dim(&self) -> usize {
        match self {
            MatrixSample::DenseSymmetric { n_dim, .. } => *n_dim,
            MatrixSample::DenseHermitian { n_dim, .. } => *n_dim,
            MatrixSample::Tridiagonal { diag, .. } => diag.len(),
        }
    }
}

/// Deterministic random source: ChaCha12 keyed by `seed`, positioned on
/// `stream_id`. Equal (seed, stream_id) reproduce bit-identical sequences;
/// distinct stream ids on one seed are statistically independent, which is
/// what lets batch generation fan out across workers reproducibly.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}

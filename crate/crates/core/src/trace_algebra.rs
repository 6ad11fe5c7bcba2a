//! Deterministic trace algebra: power sums, Newton's identities, the trace
//! recurrence, Hankel/Gram forms, the discriminant with interior/boundary/
//! exterior classification, and the shift/scaling transport laws.

use crate::error::{Error, Result};
use crate::model::{MatrixSample, Spectrum, TraceVector};
use num_complex::Complex64;

/// Neumaier-compensated sum: trace accumulations span many magnitudes and
/// plain summation loses the low bits the oracles check.
pub(crate) fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Binomial coefficient C(k, l) as a float (exact while it fits in 53 bits).
pub(crate) fn binomial(k: usize, l: usize) -> f64 {
    if l > k {
        return 0.0;
    }
    let l = l.min(k - l);
    let mut acc = 1.0;
    for i in 1..=l {
        acc = acc * ((k - l + i) as f64) / (i as f64);
    }
    acc
}

/// Power sums t_r = sum_k lambda_k^r for r = 1..=r_max.
pub fn traces_from_spectrum(s: &Spectrum, r_max: usize) -> TraceVector {
    assert!(r_max >= 1, "need at least t_1");
    let mut pows: Vec<f64> = vec![1.0; s.n_dim()];
    let mut values = Vec::with_capacity(r_max);
    for _ in 0..r_max {
        for (p, &lam) in pows.iter_mut().zip(s.values()) {
            *p *= lam;
        }
        values.push(compensated_sum(pows.iter().copied()));
    }
    TraceVector::new(s.n_dim(), values).expect("finite spectrum gives finite traces")
}

/// tr(M^r) for r = 1..=r_max by iterated multiplication; no eigensolver is
/// involved anywhere in the crate.
pub fn traces_from_matrix(m: &MatrixSample, r_max: usize) -> TraceVector {
    assert!(r_max >= 1, "need at least t_1");
    let n = m.n_dim();
    let mut values = Vec::with_capacity(r_max);
    match m {
        MatrixSample::DenseSymmetric { entries, .. } => {
            let mut b = entries.clone();
            values.push(trace_real(&b, n));
            for _ in 1..r_max {
                b = mul_real(&b, entries, n);
                values.push(trace_real(&b, n));
            }
        }
        MatrixSample::DenseHermitian { entries, .. } => {
            let mut b = entries.clone();
            values.push(trace_complex(&b, n));
            for _ in 1..r_max {
                b = mul_complex(&b, entries, n);
                values.push(trace_complex(&b, n));
            }
        }
        MatrixSample::Tridiagonal { diag, sub } => {
            // B <- B T stays O(N^2) per power: T has three bands.
            let mut b = vec![0.0; n * n];
            for i in 0..n {
                b[i * n + i] = diag[i];
                if i + 1 < n {
                    b[i * n + i + 1] = sub[i];
                    b[(i + 1) * n + i] = sub[i];
                }
            }
            values.push(compensated_sum(diag.iter().copied()));
            for _ in 1..r_max {
                b = mul_tridiagonal(&b, diag, sub, n);
                values.push(trace_real(&b, n));
            }
        }
    }
    TraceVector::new(n, values).expect("matrix traces are finite")
}

fn trace_real(a: &[f64], n: usize) -> f64 {
    compensated_sum((0..n).map(|i| a[i * n + i]))
}

fn trace_complex(a: &[Complex64], n: usize) -> f64 {
    // Traces of Hermitian powers are real; the imaginary parts cancel.
    compensated_sum((0..n).map(|i| a[i * n + i].re))
}

fn mul_real(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

fn mul_complex(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

fn mul_tridiagonal(b: &[f64], diag: &[f64], sub: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut v = b[i * n + j] * diag[j];
            if j > 0 {
                v += b[i * n + j - 1] * sub[j - 1];
            }
            if j + 1 < n {
                v += b[i * n + j + 1] * sub[j];
            }
            out[i * n + j] = v;
        }
    }
    out
}

/// Coefficients c_0 = 1, c_1, .., c_N of the characteristic polynomial
/// Phi(x) = prod_k (x - lambda_k) = sum_k c_k x^{N-k}.
#[derive(Debug, Clone, PartialEq)]
pub struct SecularCoefficients {
    n_dim: usize,
    coeffs: Vec<f64>,
}

impl SecularCoefficients {
    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    /// c_0..c_N; c_0 is exactly 1.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn c(&self, k: usize) -> f64 {
        self.coeffs[k]
    }

    /// Phi(x) by Horner; vanishes (to rounding) at every eigenvalue of the
    /// generating spectrum.
    pub fn char_poly_at(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in &self.coeffs {
            acc = acc * x + c;
        }
        acc
    }
}

/// Newton's identities, k c_k = -sum_{i=1..k} c_{k-i} t_i, as an O(N^2)
/// recurrence. The equivalent determinant form is kept as a test oracle.
pub fn newton_coefficients(t: &TraceVector) -> Result<SecularCoefficients> {
    let n = t.n_dim();
    if t.len() < n {
        return Err(Error::InsufficientTraces {
            need: n,
            have: t.len(),
        });
    }
    let mut coeffs = vec![0.0; n + 1];
    coeffs[0] = 1.0;
    for k in 1..=n {
        let acc = compensated_sum((1..=k).map(|i| coeffs[k - i] * t.t(i)));
        coeffs[k] = -acc / k as f64;
    }
    Ok(SecularCoefficients { n_dim: n, coeffs })
}

/// Appends t_{m} = -sum_{k=1..N} c_k t_{m-k} (valid for every m > N) until
/// the vector reaches length len + r_extra. Needs at least N leading traces.
pub fn extend_traces(t: &TraceVector, r_extra: usize) -> Result<TraceVector> {
    let n = t.n_dim();
    let coeffs = newton_coefficients(t)?;
    let mut values = t.values().to_vec();
    for _ in 0..r_extra {
        let m = values.len() + 1;
        let acc = compensated_sum((1..=n).map(|k| coeffs.c(k) * values[m - k - 1]));
        values.push(-acc);
    }
    TraceVector::new(n, values)
}

/// The N x N Gram form of the Vandermonde matrix: entry (i, j) = t_{i+j}
/// with t_0 = N, so det H = det(V V^T) = G^2.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelMatrix {
    n_dim: usize,
    entries: Vec<f64>,
}

impl HankelMatrix {
    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n_dim + j]
    }

    /// Row-major storage.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Builds the Hankel form; requires traces up to index 2N-2 (extend first if
/// the vector is shorter).
pub fn hankel_matrix(t: &TraceVector) -> Result<HankelMatrix> {
    let n = t.n_dim();
    let need = 2 * n - 2;
    if t.len() < need {
        return Err(Error::InsufficientTraces {
            need,
            have: t.len(),
        });
    }
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = t.t(i + j);
        }
    }
    Ok(HankelMatrix { n_dim: n, entries })
}

/// Where a trace vector sits relative to the image of real N-point spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainClass {
    Interior,
    Boundary,
    Exterior,
}

/// Discriminant evaluation: classification plus log|G|, where
/// G^2 = det(V V^T) = prod_{i<j} (lambda_j - lambda_i)^2.
///
/// `log_abs_g` is finite iff the classification is `Interior`; boundary
/// vectors have G = 0 exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminantValue {
    pub class: DomainClass,
    pub log_abs_g: f64,
}

impl DiscriminantValue {
    /// The domain indicator: true on the closed domain (interior or
    /// boundary), false outside.
    pub fn chi(&self) -> bool {
        matches!(self.class, DomainClass::Interior | DomainClass::Boundary)
    }
}

/// Classifies a trace vector and evaluates log|G| from traces alone.
///
/// The vector is centered (t1 -> 0) and rescaled (t2 -> 1) first; both maps
/// leave the classification unchanged and move log|G| by the exact shift and
/// scaling laws, and the standardized Hankel matrix stays well conditioned
/// no matter where the original spectrum sits. A pivoted-diagonal LDLT then
/// reads off positive definiteness: interior iff every pivot clears
/// tol * scale (scale = largest standardized Hankel entry), boundary when
/// the remainder after the positive pivots is numerically zero, exterior
/// otherwise. The equivalence "Hankel PSD iff the traces are power sums of
/// N reals" is the classical moment-problem characterization of the domain.
pub fn discriminant(t: &TraceVector, tol: f64) -> Result<DiscriminantValue> {
    assert!(tol > 0.0 && tol < 1.0, "tol must sit in (0, 1)");
    let n = t.n_dim();
    if n == 1 {
        // Single eigenvalue: empty product, G = 1.
        return Ok(DiscriminantValue {
            class: DomainClass::Interior,
            log_abs_g: 0.0,
        });
    }
    if t.len() < n {
        return Err(Error::InsufficientTraces {
            need: n,
            have: t.len(),
        });
    }
    let nf = n as f64;
    let t1 = t.t(1);
    let t2 = t.t(2);
    let u = t2 - t1 * t1 / nf;
    let input_scale = t2.abs().max(t1 * t1 / nf).max(1.0);
    if u <= tol * input_scale {
        // At most a point mass (boundary) or below the t2 >= t1^2/N parabola
        // (exterior, by Cauchy-Schwarz).
        let class = if u < -tol * input_scale {
            DomainClass::Exterior
        } else {
            DomainClass::Boundary
        };
        return Ok(DiscriminantValue {
            class,
            log_abs_g: f64::NEG_INFINITY,
        });
    }

    let need = 2 * n - 2;
    let extended;
    let full = if t.len() >= need {
        t
    } else {
        extended = extend_traces(t, need - t.len())?;
        &extended
    };
    let c = u.sqrt();
    let centered = shift_traces(full, -t1 / nf);
    let standardized = scale_traces(&centered, 1.0 / c);
    let h = hankel_matrix(&standardized)?;

    let mut a = h.entries().to_vec();
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut log_det = 0.0;
    for k in 0..n {
        // Symmetric permutation bringing the largest remaining diagonal to
        // the pivot slot.
        let mut piv = k;
        for i in k + 1..n {
            if a[i * n + i] > a[piv * n + piv] {
                piv = i;
            }
        }
        let d = a[piv * n + piv];
        if d <= tol * scale {
            // No usable positive pivot left. A PSD remainder is numerically
            // zero everywhere; anything bigger means an indefinite direction.
            let mut rem = 0.0f64;
            for i in k..n {
                for j in k..n {
                    rem = rem.max(a[i * n + j].abs());
                }
            }
            let class = if rem <= tol.sqrt() * scale {
                DomainClass::Boundary
            } else {
                DomainClass::Exterior
            };
            return Ok(DiscriminantValue {
                class,
                log_abs_g: f64::NEG_INFINITY,
            });
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            for i in 0..n {
                a.swap(i * n + k, i * n + piv);
            }
        }
        log_det += d.ln();
        for i in k + 1..n {
            let f = a[i * n + k] / d;
            for j in k + 1..n {
                a[i * n + j] -= f * a[k * n + j];
            }
        }
    }
    // Undo the standardization: G scales by c^{N(N-1)/2}, the shift is free.
    let log_abs_g = 0.5 * log_det + 0.5 * nf * (nf - 1.0) * c.ln();
    Ok(DiscriminantValue {
        class: DomainClass::Interior,
        log_abs_g,
    })
}

/// Traces after shifting every eigenvalue by delta:
/// t~_k = sum_{l=0..k} C(k, l) delta^l t_{k-l}, with t_0 = N.
pub fn shift_traces(t: &TraceVector, delta: f64) -> TraceVector {
    let mut values = Vec::with_capacity(t.len());
    for k in 1..=t.len() {
        let mut d_pow = 1.0;
        let terms = (0..=k).map(|l| {
            let term = binomial(k, l) * d_pow * t.t(k - l);
            d_pow *= delta;
            term
        });
        values.push(compensated_sum(terms));
    }
    TraceVector::new(t.n_dim(), values).expect("shifted traces stay finite")
}

/// Traces after scaling every eigenvalue by c: t'_k = c^k t_k. c = 0 is
/// legal and collapses everything to zero.
pub fn scale_traces(t: &TraceVector, c: f64) -> TraceVector {
    let mut pow = 1.0;
    let values = t
        .values()
        .iter()
        .map(|&v| {
            pow *= c;
            pow * v
        })
        .collect();
    TraceVector::new(t.n_dim(), values).expect("scaled traces stay finite")
}

/// Centers and rescales so that t_1 = 0 and t_2 = 1: returns
/// (delta, c, t_std) with delta = t1/N, c = sqrt(t2 - t1^2/N) and
/// t_std = scale(shift(t, -delta), 1/c). The discriminant transports as
/// log|G|(t) = (N(N-1)/2) ln c + log|G|(t_std).
pub fn standardize_traces(t: &TraceVector) -> Result<(f64, f64, TraceVector)> {
    if t.len() < 2 {
        return Err(Error::InsufficientTraces {
            need: 2,
            have: t.len(),
        });
    }
    let nf = t.n_dim() as f64;
    let delta = t.t(1) / nf;
    let u = t.t(2) - t.t(1) * t.t(1) / nf;
    if u <= 0.0 {
        return Err(Error::DegenerateScale(u));
    }
    let c = u.sqrt();
    let std = scale_traces(&shift_traces(t, -delta), 1.0 / c);
    Ok((delta, c, std))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn spec(vals: &[f64]) -> Spectrum {
        Spectrum::new(vals.to_vec()).unwrap()
    }

    #[test]
    fn power_sums_from_spectrum() {
        let t = traces_from_spectrum(&spec(&[1.0, 2.0]), 3);
        assert_eq!(t.values(), &[3.0, 5.0, 9.0]);

        let z = traces_from_spectrum(&spec(&[0.0, 0.0, 0.0]), 5);
        assert!(z.values().iter().all(|&v| v == 0.0));

        let s = traces_from_spectrum(&spec(&[-1.0, 1.0]), 4);
        assert_eq!(s.values(), &[0.0, 2.0, 0.0, 2.0]);
    }

    #[test]
    fn traces_from_dense_matrix() {
        let m = MatrixSample::DenseSymmetric {
            n_dim: 2,
            entries: vec![1.0, 0.0, 0.0, 2.0],
        };
        let t = traces_from_matrix(&m, 3);
        assert_eq!(t.values(), &[3.0, 5.0, 9.0]);

        let zero = MatrixSample::DenseSymmetric {
            n_dim: 2,
            entries: vec![0.0; 4],
        };
        assert_eq!(traces_from_matrix(&zero, 3).values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn traces_from_hermitian_matrix() {
        // [[0, i], [-i, 0]] has spectrum {-1, 1}.
        let i = Complex64::new(0.0, 1.0);
        let m = MatrixSample::DenseHermitian {
            n_dim: 2,
            entries: vec![Complex64::new(0.0, 0.0), i, -i, Complex64::new(0.0, 0.0)],
        };
        let t = traces_from_matrix(&m, 4);
        let want = traces_from_spectrum(&spec(&[-1.0, 1.0]), 4);
        for r in 1..=4 {
            assert_abs_diff_eq!(t.t(r), want.t(r), epsilon = 1e-14);
        }
    }

    #[test]
    fn traces_from_tridiagonal_matrix() {
        // diag (0,0), off-diagonal b: t2 = 2 b^2.
        let b = 0.75;
        let m = MatrixSample::Tridiagonal {
            diag: vec![0.0, 0.0],
            sub: vec![b],
        };
        let t = traces_from_matrix(&m, 2);
        assert_abs_diff_eq!(t.t(1), 0.0);
        assert_abs_diff_eq!(t.t(2), 2.0 * b * b, epsilon = 1e-15);

        // Tridiagonal and its dense expansion agree through r = 6.
        let diag = vec![0.3, -0.8, 1.1, 0.2];
        let sub = vec![0.9, 0.4, 1.3];
        let tri = MatrixSample::Tridiagonal {
            diag: diag.clone(),
            sub: sub.clone(),
        };
        let mut entries = vec![0.0; 16];
        for i in 0..4 {
            entries[i * 4 + i] = diag[i];
            if i + 1 < 4 {
                entries[i * 4 + i + 1] = sub[i];
                entries[(i + 1) * 4 + i] = sub[i];
            }
        }
        let dense = MatrixSample::DenseSymmetric { n_dim: 4, entries };
        let a = traces_from_matrix(&tri, 6);
        let b = traces_from_matrix(&dense, 6);
        for r in 1..=6 {
            assert_relative_eq!(a.t(r), b.t(r), max_relative = 1e-13, epsilon = 1e-13);
        }
    }

    #[test]
    fn newton_identities() {
        let t = traces_from_spectrum(&spec(&[1.0, 2.0]), 2);
        let c = newton_coefficients(&t).unwrap();
        assert_eq!(c.coeffs(), &[1.0, -3.0, 2.0]);

        let t = traces_from_spectrum(&spec(&[-1.0, 0.0, 1.0]), 3);
        let c = newton_coefficients(&t).unwrap();
        assert_abs_diff_eq!(c.c(0), 1.0);
        assert_abs_diff_eq!(c.c(1), 0.0);
        assert_abs_diff_eq!(c.c(2), -1.0);
        assert_abs_diff_eq!(c.c(3), 0.0);

        // c_1 = -t_1 always.
        let t = TraceVector::new(3, vec![4.2, 1.0, 0.5]).unwrap();
        assert_abs_diff_eq!(newton_coefficients(&t).unwrap().c(1), -4.2);

        let short = TraceVector::new(3, vec![1.0]).unwrap();
        assert_eq!(
            newton_coefficients(&short),
            Err(Error::InsufficientTraces { need: 3, have: 1 })
        );
    }

    #[test]
    fn char_poly_annihilates_spectrum() {
        let eigs = [-2.5, -0.3, 0.4, 1.9];
        let t = traces_from_spectrum(&spec(&eigs), 4);
        let c = newton_coefficients(&t).unwrap();
        for &lam in &eigs {
            assert_abs_diff_eq!(c.char_poly_at(lam), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn trace_recurrence_extends() {
        let t = traces_from_spectrum(&spec(&[1.0, 2.0]), 2);
        let e = extend_traces(&t, 1).unwrap();
        assert_relative_eq!(e.t(3), 9.0, max_relative = 1e-14);

        let t = traces_from_spectrum(&spec(&[-1.0, 1.0]), 2);
        let e = extend_traces(&t, 2).unwrap();
        assert_abs_diff_eq!(e.t(3), 0.0, epsilon = 1e-14);
        assert_relative_eq!(e.t(4), 2.0, max_relative = 1e-14);

        let t = traces_from_spectrum(&spec(&[1.0, 2.0, 3.0]), 3);
        let e = extend_traces(&t, 1).unwrap();
        assert_relative_eq!(e.t(4), 98.0, max_relative = 1e-13);
    }

    #[test]
    fn hankel_entries_and_determinants() {
        let t = traces_from_spectrum(&spec(&[1.0, 2.0]), 2);
        let h = hankel_matrix(&t).unwrap();
        assert_eq!(
            [h.entry(0, 0), h.entry(0, 1), h.entry(1, 0), h.entry(1, 1)],
            [2.0, 3.0, 3.0, 5.0]
        );
        // det = 1 = (2 - 1)^2.
        let det = h.entry(0, 0) * h.entry(1, 1) - h.entry(0, 1) * h.entry(1, 0);
        assert_relative_eq!(det, 1.0, max_relative = 1e-14);

        let short = TraceVector::new(4, vec![1.0, 2.0]).unwrap();
        assert_eq!(
            hankel_matrix(&short),
            Err(Error::InsufficientTraces { need: 6, have: 2 })
        );
    }

    #[test]
    fn discriminant_interior_matches_vandermonde() {
        let cases: [&[f64]; 4] = [
            &[1.0, 2.0],
            &[-1.0, 0.0, 1.0],
            &[-2.2, -0.7, 0.4, 1.9],
            &[-3.0, -1.2, -0.1, 0.8, 2.4],
        ];
        for eigs in cases {
            let s = spec(eigs);
            let t = traces_from_spectrum(&s, eigs.len().max(2));
            let d = discriminant(&t, 1e-10).unwrap();
            assert_eq!(d.class, DomainClass::Interior);
            let mut log_g = 0.0;
            for i in 0..eigs.len() {
                for j in i + 1..eigs.len() {
                    log_g += (eigs[j] - eigs[i]).abs().ln();
                }
            }
            assert_abs_diff_eq!(d.log_abs_g, log_g, epsilon = 1e-10);
        }
    }

    #[test]
    fn discriminant_classifies_off_domain() {
        // t2 < t1^2/N cannot come from a real spectrum.
        let t = TraceVector::new(2, vec![0.0, -1.0]).unwrap();
        let d = discriminant(&t, 1e-10).unwrap();
        assert_eq!(d.class, DomainClass::Exterior);
        assert!(d.log_abs_g.is_infinite());
        assert!(!d.chi());

        // Repeated eigenvalue: discriminant vanishes.
        let t = traces_from_spectrum(&spec(&[0.5, 0.5, 2.0]), 4);
        let d = discriminant(&t, 1e-10).unwrap();
        assert_eq!(d.class, DomainClass::Boundary);
        assert!(d.log_abs_g.is_infinite());
        assert!(d.chi());

        // Fully degenerate: u = 0 exactly.
        let t = traces_from_spectrum(&spec(&[1.5, 1.5]), 2);
        assert_eq!(
            discriminant(&t, 1e-10).unwrap().class,
            DomainClass::Boundary
        );

        // Interior Hankel but indefinite tail: t4 below the Cauchy-Schwarz
        // floor t2^2/N.
        let t = TraceVector::new(3, vec![0.0, 2.0, 0.0, 1.2]).unwrap();
        let d = discriminant(&t, 1e-10).unwrap();
        assert_eq!(d.class, DomainClass::Exterior);
    }

    #[test]
    fn discriminant_single_eigenvalue() {
        let t = traces_from_spectrum(&spec(&[3.7]), 1);
        let d = discriminant(&t, 1e-10).unwrap();
        assert_eq!(d.class, DomainClass::Interior);
        assert_eq!(d.log_abs_g, 0.0);
    }

    #[test]
    fn shift_law() {
        let t = traces_from_spectrum(&spec(&[1.0, 2.0]), 2);
        assert_eq!(shift_traces(&t, 0.0).values(), t.values());
        let shifted = shift_traces(&t, 1.0);
        assert_eq!(shifted.values(), &[5.0, 13.0]);
        // k = 1 term: t~_1 = t_1 + N delta.
        let t = TraceVector::new(5, vec![2.0, 7.0]).unwrap();
        assert_abs_diff_eq!(shift_traces(&t, 0.3).t(1), 2.0 + 5.0 * 0.3);
    }

    #[test]
    fn scale_law() {
        let t = traces_from_spectrum(&spec(&[1.0, 2.0]), 2);
        assert_eq!(scale_traces(&t, 1.0).values(), t.values());
        assert_eq!(scale_traces(&t, 2.0).values(), &[6.0, 20.0]);
        assert_eq!(scale_traces(&t, 0.0).values(), &[0.0, 0.0]);
    }

    #[test]
    fn standardization() {
        let t = traces_from_spectrum(&spec(&[-1.0, 1.0]), 4);
        let (delta, c, std) = standardize_traces(&t).unwrap();
        assert_abs_diff_eq!(delta, 0.0);
        assert_relative_eq!(c, 2.0f64.sqrt(), max_relative = 1e-15);
        let want = traces_from_spectrum(
            &spec(&[-1.0 / 2.0f64.sqrt(), 1.0 / 2.0f64.sqrt()]),
            4,
        );
        for r in 1..=4 {
            assert_abs_diff_eq!(std.t(r), want.t(r), epsilon = 1e-14);
        }

        let t = traces_from_spectrum(&spec(&[0.0, 1.0, 2.0]), 4);
        let (delta, c, std) = standardize_traces(&t).unwrap();
        assert_relative_eq!(delta, 1.0, max_relative = 1e-15);
        assert_relative_eq!(c, 2.0f64.sqrt(), max_relative = 1e-15);
        assert_abs_diff_eq!(std.t(1), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(std.t(2), 1.0, epsilon = 1e-14);

        let degenerate = traces_from_spectrum(&spec(&[0.8, 0.8, 0.8]), 2);
        assert!(matches!(
            standardize_traces(&degenerate),
            Err(Error::DegenerateScale(_))
        ));
    }

    #[test]
    fn standardization_transports_discriminant() {
        // log|G|(t) = (N(N-1)/2) ln c + log|G|(t_std).
        let eigs = [-1.7, 0.2, 0.9, 2.6];
        let t = traces_from_spectrum(&spec(&eigs), 6);
        let (_, c, std) = standardize_traces(&t).unwrap();
        let g_full = discriminant(&t, 1e-10).unwrap().log_abs_g;
        let g_std = discriminant(&std, 1e-10).unwrap().log_abs_g;
        let n = eigs.len() as f64;
        assert_abs_diff_eq!(g_full, 0.5 * n * (n - 1.0) * c.ln() + g_std, epsilon = 1e-10);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(6, 0), 1.0);
        assert_eq!(binomial(6, 6), 1.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert_eq!(binomial(10, 5), 252.0);
    }
}

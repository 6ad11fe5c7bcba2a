//! Geometry of the trace domain: Cauchy-Schwarz inequalities, the t2-cut
//! sandwich bounds, the minimum of t2 at fixed t1, and extremal patterns
//! (spectra supported on few points) with their Lagrange stationarity system.

use crate::error::{Error, Result};
use crate::model::{Spectrum, TraceVector};
use crate::trace_algebra::compensated_sum;

/// Rounding slack for inequality checks, relative to the magnitude of the
/// compared sides: spectrum-derived traces carry accumulation error, and an
/// exact-equality case must not read as a violation.
const INEQ_SLACK: f64 = 1e-12;

/// One checked inequality. `equality` marks (near-)degenerate spectra where
/// the bound is attained.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub equality: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    checks: Vec<BoundsCheck>,
    all_satisfied: bool,
}

impl BoundsReport {
    fn new(checks: Vec<BoundsCheck>) -> Self {
        let all_satisfied = checks.iter().all(|c| c.satisfied);
        Self {
            checks,
            all_satisfied,
        }
    }

    pub fn checks(&self) -> &[BoundsCheck] {
        &self.checks
    }

    pub fn all_satisfied(&self) -> bool {
        self.all_satisfied
    }

    pub fn violations(&self) -> impl Iterator<Item = &BoundsCheck> {
        self.checks.iter().filter(|c| !c.satisfied)
    }
}

fn check(name: String, lhs: f64, rhs: f64) -> BoundsCheck {
    let scale = lhs.abs().max(rhs.abs()).max(1.0);
    BoundsCheck {
        name,
        lhs,
        rhs,
        satisfied: lhs <= rhs + INEQ_SLACK * scale,
        equality: (lhs - rhs).abs() <= INEQ_SLACK * scale,
    }
}

/// Cauchy-Schwarz constraints on traces: t_r^2 <= N t_{2r} for 2r <= K, and
/// the general t_{p+q}^2 <= t_{2p} t_{2q} for 1 <= p < q, 2(p+q) <= K.
/// All hold with equality exactly on fully degenerate (point-mass) spectra.
pub fn cauchy_schwarz_check(t: &TraceVector) -> BoundsReport {
    let n = t.n_dim() as f64;
    let k_max = t.len();
    let mut checks = Vec::new();
    for r in 1..=k_max / 2 {
        let lhs = t.t(r) * t.t(r);
        checks.push(check(
            format!("t{r}^2 <= N*t{}", 2 * r),
            lhs,
            n * t.t(2 * r),
        ));
    }
    for p in 1..=k_max / 2 {
        for q in p + 1..=k_max / 2 {
            if 2 * (p + q) > k_max {
                break;
            }
            let lhs = t.t(p + q) * t.t(p + q);
            checks.push(check(
                format!("t{}^2 <= t{}*t{}", p + q, 2 * p, 2 * q),
                lhs,
                t.t(2 * p) * t.t(2 * q),
            ));
        }
    }
    BoundsReport::new(checks)
}

/// Smallest t2 compatible with a given t1: t1^2 / N, attained only by the
/// point mass at t1/N.
pub fn min_t2_given_t1(t1: f64, n_dim: usize) -> f64 {
    assert!(n_dim >= 1);
    t1 * t1 / n_dim as f64
}

/// Range of t_idx over all real N-spectra with second trace t2:
/// odd idx = 2m+1 gives (-t2^{m+1/2}, +t2^{m+1/2}); even idx = 2m gives
/// (N^{1-m} t2^m, t2^m).
pub fn t2_cut_bounds(t2: f64, n_dim: usize, idx: usize) -> Result<(f64, f64)> {
    if t2 <= 0.0 {
        return Err(Error::NonPositiveT2(t2));
    }
    if n_dim == 0 {
        return Err(Error::NonPositiveN);
    }
    if idx < 3 {
        return Err(Error::InvalidConfig(format!(
            "t2-cut bounds are defined for trace indices >= 3 (got {idx})"
        )));
    }
    if idx % 2 == 1 {
        let m = (idx - 1) / 2;
        let hi = t2.powf(m as f64 + 0.5);
        Ok((-hi, hi))
    } else {
        let m = idx / 2;
        let hi = t2.powi(m as i32);
        let lo = (n_dim as f64).powi(1 - m as i32) * hi;
        Ok((lo, hi))
    }
}

/// Applies [`t2_cut_bounds`] to every stored index >= 3 of a trace vector,
/// two checks (lower, upper) per index. Empty when t2 <= 0 (no real spectrum
/// other than the zero point mass gets there).
pub fn t2_cut_check(t: &TraceVector) -> BoundsReport {
    let mut checks = Vec::new();
    if t.len() >= 2 && t.t(2) > 0.0 {
        for idx in 3..=t.len() {
            let (lo, hi) = t2_cut_bounds(t.t(2), t.n_dim(), idx)
                .expect("t2 > 0 and idx >= 3 were just checked");
            checks.push(check(format!("t{idx} lower cut"), lo, t.t(idx)));
            checks.push(check(format!("t{idx} upper cut"), t.t(idx), hi));
        }
    }
    BoundsReport::new(checks)
}

/// A spectrum supported on k distinct points: root r_i carries multiplicity
/// p_i. Construction sorts by root and merges exact duplicates, so roots are
/// strictly increasing afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalPattern {
    roots: Vec<f64>,
    multiplicities: Vec<usize>,
}

impl ExtremalPattern {
    pub fn new(roots: Vec<f64>, multiplicities: Vec<usize>) -> Result<Self> {
        if roots.is_empty() || roots.len() != multiplicities.len() {
            return Err(Error::InvalidConfig(
                "pattern needs matching non-empty root and multiplicity lists".into(),
            ));
        }
        if roots.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidSpectrum);
        }
        if multiplicities.iter().any(|&p| p == 0) {
            return Err(Error::InvalidConfig(
                "pattern multiplicities must be at least 1".into(),
            ));
        }
        let mut pairs: Vec<(f64, usize)> = roots.into_iter().zip(multiplicities).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite by validation"));
        let mut merged: Vec<(f64, usize)> = Vec::with_capacity(pairs.len());
        for (r, p) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == r => last.1 += p,
                _ => merged.push((r, p)),
            }
        }
        let (roots, multiplicities) = merged.into_iter().unzip();
        Ok(Self {
            roots,
            multiplicities,
        })
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// N = sum of multiplicities.
    pub fn n_dim(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Expands to the explicit eigenvalue multiset.
    pub fn spectrum(&self) -> Spectrum {
        let mut values = Vec::with_capacity(self.n_dim());
        for (&r, &p) in self.roots.iter().zip(&self.multiplicities) {
            values.extend(std::iter::repeat(r).take(p));
        }
        Spectrum::new(values).expect("patterns hold finite roots")
    }
}

/// t_l = sum_i p_i r_i^l for l = 1..=l_max.
pub fn traces_from_pattern(pat: &ExtremalPattern, l_max: usize) -> TraceVector {
    assert!(l_max >= 1);
    let mut pows: Vec<f64> = vec![1.0; pat.roots.len()];
    let mut values = Vec::with_capacity(l_max);
    for _ in 0..l_max {
        for (pw, &r) in pows.iter_mut().zip(&pat.roots) {
            *pw *= r;
        }
        values.push(compensated_sum(
            pows.iter()
                .zip(&pat.multiplicities)
                .map(|(&pw, &p)| p as f64 * pw),
        ));
    }
    TraceVector::new(pat.n_dim(), values).expect("pattern traces stay finite")
}

/// Stationarity defect of the Lagrange system for the extremum of t_{k+1}
/// under fixed t_1..t_k: max over roots r_j of
/// |(k+1) r_j^k - (mu_1 + mu_2 r_j + ... + mu_k r_j^{k-1})|, with
/// k = multipliers.len(). Zero exactly on stationary patterns.
pub fn lagrange_residual(pat: &ExtremalPattern, multipliers: &[f64]) -> f64 {
    let k = multipliers.len();
    assert!(k >= 1, "need at least one multiplier");
    let mut worst = 0.0f64;
    for &r in &pat.roots {
        let mut poly = 0.0;
        for &mu in multipliers.iter().rev() {
            poly = poly * r + mu;
        }
        let lhs = (k as f64 + 1.0) * r.powi(k as i32);
        worst = worst.max((lhs - poly).abs());
    }
    worst
}

/// Solves the k x k Vandermonde system (k+1) r_j^k = mu_1 + mu_2 r_j + ... +
/// mu_k r_j^{k-1} by Newton interpolation through the k distinct roots.
/// The pattern must carry exactly k distinct roots.
pub fn solve_multipliers(pat: &ExtremalPattern, k: usize) -> Result<Vec<f64>> {
    if k == 0 || pat.roots.len() != k {
        return Err(Error::SingularSystem);
    }
    let xs = &pat.roots;
    // Divided differences of y_j = (k+1) x_j^k.
    let mut dd: Vec<f64> = xs
        .iter()
        .map(|&x| (k as f64 + 1.0) * x.powi(k as i32))
        .collect();
    for level in 1..k {
        for j in (level..k).rev() {
            let denom = xs[j] - xs[j - level];
            dd[j] = (dd[j] - dd[j - 1]) / denom;
        }
    }
    // Expand the Newton form into monomial coefficients mu_1..mu_k
    // (mu_i multiplies r^{i-1}).
    let mut mono = vec![0.0; k];
    let mut basis = vec![0.0; k];
    basis[0] = 1.0;
    let mut basis_len = 1;
    for (j, &a) in dd.iter().enumerate() {
        for i in 0..basis_len {
            mono[i] += a * basis[i];
        }
        if j + 1 < k {
            // basis <- basis * (x - x_j)
            for i in (0..basis_len).rev() {
                basis[i + 1] += basis[i];
                basis[i] *= -xs[j];
            }
            basis_len += 1;
        }
    }
    Ok(mono)
}

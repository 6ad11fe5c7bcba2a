//! Property tests for the exact invariance laws the trace layer promises:
//! permutation/shift/scale behavior of traces and the discriminant, the
//! moment-problem classification, and the Lagrange stationarity solve.
//!
//! Near-degenerate spectra push the Hankel condition number past what f64
//! traces can represent, so families that feed the log-discriminant checks
//! keep eigenvalue gaps bounded away from zero (jittered ladders). The
//! invariance laws themselves are exact; the families pin the rounding noise
//! below the stated tolerances.

use proptest::collection::vec;
use proptest::prelude::*;

use trace_moments::distributions::sample_t1_t2_exact;
use trace_moments::domain::{
    cauchy_schwarz_check, lagrange_residual, solve_multipliers, t2_cut_check, ExtremalPattern,
};
use trace_moments::trace_algebra::{
    discriminant, extend_traces, newton_coefficients, scale_traces, shift_traces,
    standardize_traces, traces_from_spectrum, DomainClass,
};
use trace_moments::{EnsembleParams, RngStream, Spectrum, TraceVector};

const CLASS_TOL: f64 = 1e-10;

/// Spectrum built from gap increments in [gap_lo, gap_hi], centered, then
/// shifted by a uniform jitter: eigenvalues stay well separated while the
/// location and span vary.
fn ladder(
    n_lo: usize,
    n_hi: usize,
    gap_lo: f64,
    gap_hi: f64,
) -> impl Strategy<Value = Spectrum> {
    (n_lo..=n_hi)
        .prop_flat_map(move |n| (vec(gap_lo..gap_hi, n - 1), -0.5..0.5f64))
        .prop_map(|(gaps, jitter)| {
            let mut values = vec![0.0];
            for g in gaps {
                values.push(values.last().unwrap() + g);
            }
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            for v in values.iter_mut() {
                *v = *v - mean + jitter;
            }
            Spectrum::new(values).unwrap()
        })
}

fn loose_spectrum(n_lo: usize, n_hi: usize) -> impl Strategy<Value = Spectrum> {
    (n_lo..=n_hi)
        .prop_flat_map(|n| vec(-3.0..3.0f64, n))
        .prop_map(|v| Spectrum::new(v).unwrap())
}

fn log_gram_from_spectrum(s: &Spectrum) -> f64 {
    let v = s.values();
    let mut acc = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            acc += (v[j] - v[i]).abs().ln();
        }
    }
    acc
}

proptest! {
    /// Traces are symmetric functions: any ordering of the eigenvalues gives
    /// the same power sums as a naive direct evaluation.
    #[test]
    fn traces_are_order_free(values in vec(-5.0..5.0f64, 1..8)) {
        let s = Spectrum::new(values.clone()).unwrap();
        let t = traces_from_spectrum(&s, 4);
        for r in 1..=4usize {
            let direct: f64 = values.iter().map(|l| l.powi(r as i32)).sum();
            prop_assert!((t.t(r) - direct).abs() <= 1e-12 * direct.abs().max(1.0));
        }
    }

    /// Shifting every eigenvalue by delta leaves G unchanged; the trace-level
    /// shift map must agree with the spectrum-level one.
    #[test]
    fn discriminant_is_shift_invariant(
        s in ladder(2, 4, 0.8, 1.5),
        delta in -5.0..5.0f64,
    ) {
        let n = s.values().len();
        let t = traces_from_spectrum(&s, n);
        let shifted = shift_traces(&t, delta);

        let moved: Vec<f64> = s.values().iter().map(|l| l + delta).collect();
        let t_direct = traces_from_spectrum(&Spectrum::new(moved).unwrap(), n);
        for r in 1..=n {
            let scale = t_direct.t(r).abs().max(1.0);
            prop_assert!((shifted.t(r) - t_direct.t(r)).abs() <= 1e-10 * scale);
        }

        let base = discriminant(&t, CLASS_TOL).unwrap();
        let after = discriminant(&shifted, CLASS_TOL).unwrap();
        prop_assert_eq!(base.class, DomainClass::Interior);
        prop_assert_eq!(after.class, DomainClass::Interior);
        prop_assert!((base.log_abs_g - after.log_abs_g).abs() <= 1e-8);
    }

    /// Scaling eigenvalues by c multiplies G by c^{N(N-1)/2}.
    #[test]
    fn discriminant_scaling_law(
        s in ladder(2, 7, 0.3, 0.7),
        c in 0.1..10.0f64,
    ) {
        let n = s.values().len();
        let t = traces_from_spectrum(&s, n);
        let scaled = scale_traces(&t, c);
        let base = discriminant(&t, CLASS_TOL).unwrap();
        let after = discriminant(&scaled, CLASS_TOL).unwrap();
        prop_assert_eq!(after.class, DomainClass::Interior);
        let expected = base.log_abs_g + (n * (n - 1)) as f64 / 2.0 * c.ln();
        prop_assert!((after.log_abs_g - expected).abs() <= 1e-8);
    }

    /// log|G| computed from traces alone equals the direct pair-product over
    /// the eigenvalues.
    #[test]
    fn log_gram_matches_pair_products(s in ladder(2, 7, 0.3, 0.7)) {
        let n = s.values().len();
        let t = traces_from_spectrum(&s, n);
        let d = discriminant(&t, CLASS_TOL).unwrap();
        prop_assert_eq!(d.class, DomainClass::Interior);
        prop_assert!((d.log_abs_g - log_gram_from_spectrum(&s)).abs() <= 1e-8);
    }

    /// Newton's identities reproduce the characteristic polynomial obtained
    /// by expanding prod (x - lambda_i) directly.
    #[test]
    fn newton_matches_expanded_polynomial(s in loose_spectrum(1, 6)) {
        let n = s.values().len();
        let t = traces_from_spectrum(&s, n);
        let coeffs = newton_coefficients(&t).unwrap();

        let mut brute = vec![0.0f64; n + 1];
        brute[0] = 1.0;
        let mut deg = 0;
        for &l in s.values() {
            deg += 1;
            for k in (1..=deg).rev() {
                brute[k] = brute[k] - l * brute[k - 1];
            }
        }
        let scale = brute.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        for k in 0..=n {
            prop_assert!(
                (coeffs.c(k) - brute[k]).abs() <= 1e-10 * scale,
                "k={} newton={} brute={}", k, coeffs.c(k), brute[k]
            );
        }

        // Every eigenvalue annihilates the polynomial, up to the backward
        // error allowed by its own coefficient magnitudes.
        for &l in s.values() {
            let bound: f64 = (0..=n).map(|k| coeffs.c(k).abs() * l.abs().powi((n - k) as i32)).sum();
            prop_assert!(coeffs.char_poly_at(l).abs() <= 1e-9 * bound.max(1.0));
        }
    }

    /// The N-term recurrence extends traces exactly as direct power sums do.
    #[test]
    fn extended_traces_match_power_sums(s in loose_spectrum(2, 10)) {
        let n = s.values().len();
        let t = traces_from_spectrum(&s, n);
        let extended = extend_traces(&t, n).unwrap();
        let direct = traces_from_spectrum(&s, 2 * n);
        for r in 1..=2 * n {
            let scale = direct.t(r).abs().max(1.0);
            prop_assert!(
                (extended.t(r) - direct.t(r)).abs() <= 1e-9 * scale,
                "r={} ext={} direct={}", r, extended.t(r), direct.t(r)
            );
        }
    }

    /// Real spectra satisfy every Cauchy-Schwarz and t2-cut inequality.
    #[test]
    fn real_spectra_satisfy_bounds(s in loose_spectrum(1, 10)) {
        let t = traces_from_spectrum(&s, 8);
        prop_assert!(cauchy_schwarz_check(&t).all_satisfied());
        prop_assert!(t2_cut_check(&t).all_satisfied());
    }

    /// Spectrum-derived trace vectors never classify exterior, and separated
    /// spectra classify interior.
    #[test]
    fn spectra_stay_inside_domain(s in loose_spectrum(2, 8)) {
        let n = s.values().len();
        let t = traces_from_spectrum(&s, n);
        let d = discriminant(&t, CLASS_TOL).unwrap();
        prop_assert!(d.chi(), "class = {:?}", d.class);
    }

    /// Forcing an exact eigenvalue collision lands on the boundary.
    #[test]
    fn collisions_classify_boundary(s in ladder(2, 6, 0.5, 1.0), which in 0usize..5) {
        let mut values = s.values().to_vec();
        let i = which % (values.len() - 1);
        values[i + 1] = values[i];
        let n = values.len();
        let t = traces_from_spectrum(&Spectrum::new(values).unwrap(), n);
        let d = discriminant(&t, CLASS_TOL).unwrap();
        prop_assert_eq!(d.class, DomainClass::Boundary);
        prop_assert!(d.log_abs_g == f64::NEG_INFINITY);
    }

    /// Standardization centers t1 and normalizes the parabolic gap to 1.
    #[test]
    fn standardization_normalizes(s in ladder(2, 6, 0.4, 1.2)) {
        let n = s.values().len();
        let t = traces_from_spectrum(&s, 2 * n);
        let (delta, c, std) = standardize_traces(&t).unwrap();
        prop_assert!((delta - t.t(1) / n as f64).abs() <= 1e-12 * t.t(1).abs().max(1.0));
        prop_assert!(c > 0.0);
        prop_assert!(std.t(1).abs() <= 1e-9);
        prop_assert!((std.t(2) - 1.0).abs() <= 1e-9);
    }

    /// Exact factorized draws land strictly inside the parabola and the
    /// exponent-family parameters round-trip.
    #[test]
    fn exact_draws_respect_domain(seed in any::<u64>(), n in 2usize..6, beta in 0.5..4.0f64) {
        let params = EnsembleParams::new(n, beta).unwrap();
        let mut rng = RngStream::new(seed, 0);
        for _ in 0..16 {
            let (t1, t2) = sample_t1_t2_exact(&params, &mut rng).unwrap();
            prop_assert!(t2 > t1 * t1 / params.n());
        }
    }

    /// The Vandermonde solve leaves a residual at rounding level for every
    /// distinct-root pattern with k <= 5.
    #[test]
    fn multiplier_solve_is_stationary(
        k in 1usize..=5,
        raw in vec(-2.0..2.0f64, 5),
        mults in vec(1usize..4, 5),
    ) {
        let mut roots: Vec<f64> = raw.into_iter().take(k).collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assume!(roots.windows(2).all(|w| w[1] - w[0] >= 1e-2));
        let pat = ExtremalPattern::new(roots.clone(), mults[..k].to_vec()).unwrap();
        let mu = solve_multipliers(&pat, k).unwrap();
        let scale = roots.iter().fold(1.0f64, |m, r| m.max(r.abs().powi(k as i32)));
        prop_assert!(lagrange_residual(&pat, &mu) <= 1e-9 * scale);
    }

    /// Exterior detection: pushing t2 below t1^2/N flips the classification
    /// to exterior with log|G| = -inf.
    #[test]
    fn schwarz_violations_classify_exterior(
        s in loose_spectrum(2, 6),
        margin in 0.01..5.0f64,
    ) {
        let n = s.values().len();
        let t = traces_from_spectrum(&s, n);
        let mut values = t.values().to_vec();
        values[1] = t.t(1) * t.t(1) / n as f64 - margin;
        let bad = TraceVector::new(n, values).unwrap();
        let d = discriminant(&bad, CLASS_TOL).unwrap();
        prop_assert_eq!(d.class, DomainClass::Exterior);
        prop_assert!(!d.chi());
    }
}

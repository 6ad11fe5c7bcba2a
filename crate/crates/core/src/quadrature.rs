//! Adaptive Gauss-Kronrod quadrature, 1D and over the parabolic trace
//! domain. Serves as the analytic oracle: normalizations and moments
//! computed here never touch the closed forms they are checked against.

use crate::error::{Error, Result};
use crate::model::EnsembleParams;
use crate::special::{regularized_lower_gamma, std_normal_cdf};

/// 15-point Kronrod abscissae on [0, 1] (symmetric about the midpoint).
/// Odd indices are the embedded 7-point Gauss nodes. No endpoint is a node,
/// so integrable endpoint singularities are never evaluated.
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];

const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// Hard cap on adaptive refinement; past this the integrand is treated as
/// non-convergent (divergent or pathologically rough).
const MAX_SEGMENTS: usize = 2_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Upper estimate of the absolute error, from Kronrod-Gauss differences.
    pub err_est: f64,
    pub n_evals: u64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// One G7-K15 rule application on [a, b]: (value, error estimate, evals).
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    for (j, (&x, &wk)) in XGK.iter().zip(&WGK).enumerate().take(7) {
        let dx = h * x;
        let pair = f(c - dx) + f(c + dx);
        resk += wk * pair;
        if j % 2 == 1 {
            resg += WG[(j - 1) / 2] * pair;
        }
    }
    (resk * h, ((resk - resg) * h).abs())
}

/// Integrates f over [a, b] to relative tolerance `rel_tol` by bisecting the
/// segment with the largest error estimate.
pub fn integrate_1d(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::InvalidConfig(format!(
            "integration interval must be finite with a <= b (got [{a}, {b}])"
        )));
    }
    if !(rel_tol.is_finite() && rel_tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "relative tolerance must be positive (got {rel_tol})"
        )));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            err_est: 0.0,
            n_evals: 0,
        });
    }

    let mut n_evals = 0u64;
    let mut eval = |x: f64| {
        n_evals += 1;
        f(x)
    };
    let (value, err) = gk15(&mut eval, a, b);
    let mut segments = vec![Segment { a, b, value, err }];

    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let err_sum: f64 = segments.iter().map(|s| s.err).sum();
        // A non-finite rule output means the integrand blew up at a node;
        // refinement of a divergent integral would otherwise "converge".
        if !total.is_finite() || !err_sum.is_finite() {
            return Err(Error::NoConvergence {
                what: "adaptive Gauss-Kronrod refinement",
                tol: rel_tol,
                best: f64::INFINITY,
            });
        }
        // Absolute floor keeps identically-zero integrands from stalling.
        let target = (rel_tol * total.abs()).max(f64::MIN_POSITIVE);
        if err_sum <= target {
            return Ok(QuadResult {
                value: total,
                err_est: err_sum,
                n_evals,
            });
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::NoConvergence {
                what: "adaptive Gauss-Kronrod refinement",
                tol: target,
                best: err_sum,
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.partial_cmp(&y.1.err).expect("errors are finite"))
            .map(|(i, _)| i)
            .expect("segment list is never empty");
        let Segment { a, b, .. } = segments.swap_remove(worst);
        let mid = 0.5 * (a + b);
        for (lo, hi) in [(a, mid), (mid, b)] {
            let (value, err) = gk15(&mut eval, lo, hi);
            segments.push(Segment {
                a: lo,
                b: hi,
                value,
                err,
            });
        }
    }
}

/// Rectangle in (t1, u) coordinates, u = t2 - t1^2/N, enclosing all but a
/// negligible tail of the joint mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub t1_min: f64,
    pub t1_max: f64,
    pub u_max: f64,
}

/// Inverts a continuous increasing function by bisection.
fn invert_increasing(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, target: f64) -> f64 {
    debug_assert!(g(lo) <= target && g(hi) >= target);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

impl Region {
    /// Region whose complement carries at most `tail_mass` probability in
    /// each univariate tail (two Gaussian tails for t1, one gamma tail for
    /// u). Tail inversion via bisection on the exact marginal CDFs.
    pub fn covering(params: &EnsembleParams, tail_mass: f64) -> Result<Self> {
        let p = params.require_valid_exponent()?;
        if !(tail_mass > 0.0 && tail_mass < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "tail mass must lie in (0, 0.5) (got {tail_mass})"
            )));
        }
        let sd = (params.n() / params.beta()).sqrt();
        let z = invert_increasing(std_normal_cdf, 0.0, 50.0, 1.0 - tail_mass);
        let shape = p + 1.0;
        let mut hi = shape + 10.0 * shape.sqrt() + 10.0;
        while regularized_lower_gamma(shape, hi) < 1.0 - tail_mass {
            hi *= 2.0;
        }
        let x = invert_increasing(
            |x| regularized_lower_gamma(shape, x),
            0.0,
            hi,
            1.0 - tail_mass,
        );
        Ok(Region {
            t1_min: -z * sd,
            t1_max: z * sd,
            u_max: 2.0 / params.beta() * x,
        })
    }
}

/// Iterated integral of f(t1, t2) over {(t1, t2) : t1 in [t1_min, t1_max],
/// 0 < t2 - t1^2/N < u_max}. The inner integral runs in u = t2 - t1^2/N;
/// when the exponent p is negative the substitution u = s^{1/(p+1)} absorbs
/// the u^p edge singularity exactly, so integrands proportional to the joint
/// density stay bounded at every node.
pub fn quadrature_2d(
    params: &EnsembleParams,
    f: impl Fn(f64, f64) -> f64,
    region: &Region,
    rel_tol: f64,
) -> Result<QuadResult> {
    let p = params.require_valid_exponent()?;
    if !(region.u_max > 0.0 && region.t1_min < region.t1_max) {
        return Err(Error::InvalidConfig(
            "integration region must have positive extent".into(),
        ));
    }
    let n = params.n();
    let inner_tol = 0.1 * rel_tol;

    let n_evals = std::cell::Cell::new(0u64);
    let failure = std::cell::RefCell::new(None::<Error>);
    let worst_inner_ratio = std::cell::Cell::new(0.0f64);

    let inner = |t1: f64| -> f64 {
        if failure.borrow().is_some() {
            return 0.0;
        }
        let base = t1 * t1 / n;
        let result = if p < 0.0 {
            // d u = s^{1/(p+1) - 1} / (p+1) ds on s in (0, u_max^{p+1}).
            let q = 1.0 / (p + 1.0);
            integrate_1d(
                |s| f(t1, base + s.powf(q)) * q * s.powf(q - 1.0),
                0.0,
                region.u_max.powf(p + 1.0),
                inner_tol,
            )
        } else {
            integrate_1d(|u| f(t1, base + u), 0.0, region.u_max, inner_tol)
        };
        match result {
            Ok(r) => {
                n_evals.set(n_evals.get() + r.n_evals);
                if r.value != 0.0 {
                    let ratio = r.err_est / r.value.abs();
                    worst_inner_ratio.set(worst_inner_ratio.get().max(ratio));
                }
                r.value
            }
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        }
    };

    let outer = integrate_1d(inner, region.t1_min, region.t1_max, rel_tol)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(QuadResult {
        value: outer.value,
        err_est: outer.err_est + worst_inner_ratio.get() * outer.value.abs(),
        n_evals: n_evals.get() + outer.n_evals,
    })
}

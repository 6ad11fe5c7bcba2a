//! Statistical verification: Kolmogorov-Smirnov machinery, closed-form
//! marginal CDFs, and a deterministic cross-check campaign that confronts
//! every sampler with the exact distributions and with each other.
//!
//! Campaign runs are reproducible bit for bit: parallelism is organized as
//! fixed-size chunks with chunk-indexed RNG streams collected in order, so
//! the report list is a pure function of (params, n_samples, seed, samplers).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{EnsembleParams, RngStream};
use crate::sampling::{sample_dense, sample_spectrum_mcmc, sample_tridiagonal, McmcConfig};
use crate::special::{normal_cdf, regularized_lower_gamma};
use crate::distributions::{mixed_moment, sample_t1_t2_exact};
use crate::trace_algebra::traces_from_matrix;

/// One-sample Kolmogorov-Smirnov statistic sup_x |F_n(x) - F(x)| against a
/// reference CDF. Sorts a private copy of the sample.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("samples must not contain NaN"));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i as f64 + 1.0) / n - f);
    }
    Ok(d)
}

/// Two-sample KS statistic sup_x |F_a(x) - F_b(x)|, ties handled by
/// advancing both empirical CDFs through equal values together.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let sort = |s: &[f64]| {
        let mut v = s.to_vec();
        v.sort_by(|x, y| x.partial_cmp(y).expect("samples must not contain NaN"));
        v
    };
    let (xa, xb) = (sort(a), sort(b));
    let (n, m) = (xa.len(), xb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        let x = xa[i].min(xb[j]);
        while i < n && xa[i] == x {
            i += 1;
        }
        while j < m && xb[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    Ok(d)
}

/// Rejection threshold at the 1% level for the one-sample statistic.
pub fn ks_one_sample_threshold(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Rejection threshold at the 1% level for the two-sample statistic.
pub fn ks_two_sample_threshold(n: usize, m: usize) -> f64 {
    1.63 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// CDF of the first trace: centered Gaussian with variance N/beta.
pub fn cdf_t1(params: &EnsembleParams, t1: f64) -> f64 {
    normal_cdf(t1, 0.0, (params.n() / params.beta()).sqrt())
}

/// CDF of the second trace: regularized lower gamma P(p + 3/2, beta t2 / 2).
pub fn cdf_t2(params: &EnsembleParams, t2: f64) -> Result<f64> {
    let p = params.require_valid_exponent()?;
    if t2 <= 0.0 {
        return Ok(0.0);
    }
    Ok(regularized_lower_gamma(p + 1.5, 0.5 * params.beta() * t2))
}

/// Equal-width histogram over [lo, hi); samples outside count toward the
/// total but land in no bin, so bin densities stay comparable to a pdf.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) || bins == 0 {
            return Err(Error::InvalidConfig(format!(
                "histogram needs finite lo < hi and at least one bin (got [{lo}, {hi}], {bins})"
            )));
        }
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| lo + i as f64 * width).collect();
        Ok(Self {
            edges,
            counts: vec![0; bins],
            total: 0,
        })
    }

    pub fn from_samples(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut h = Self::new(lo, hi, bins)?;
        for &x in samples {
            h.observe(x);
        }
        Ok(h)
    }

    pub fn observe(&mut self, x: f64) {
        self.total += 1;
        let lo = self.edges[0];
        let hi = *self.edges.last().expect("edges are non-empty");
        if x >= lo && x < hi {
            let width = (hi - lo) / self.counts.len() as f64;
            let bin = (((x - lo) / width) as usize).min(self.counts.len() - 1);
            self.counts[bin] += 1;
        }
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Empirical density of bin i, normalized by the full observation count.
    pub fn density(&self, i: usize) -> f64 {
        let width = (self.edges[i + 1] - self.edges[i]).abs();
        self.counts[i] as f64 / (self.total as f64 * width)
    }

    /// Bin midpoints paired with empirical densities.
    pub fn density_points(&self) -> Vec<(f64, f64)> {
        (0..self.counts.len())
            .map(|i| (0.5 * (self.edges[i] + self.edges[i + 1]), self.density(i)))
            .collect()
    }
}

/// Outcome of a single named check. `details` carries only replay inputs
/// (seed, dimensions, sampler identity), never wall-clock data, so reruns
/// with equal inputs serialize to identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub n_samples: usize,
    pub passed: bool,
    pub details: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Dense,
    Tridiagonal,
    Mcmc,
    Exact,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 4] = [
        SamplerKind::Dense,
        SamplerKind::Tridiagonal,
        SamplerKind::Mcmc,
        SamplerKind::Exact,
    ];

    fn stream_base(self) -> u64 {
        match self {
            SamplerKind::Dense => 0x0100,
            SamplerKind::Tridiagonal => 0x0200,
            SamplerKind::Mcmc => 0x0300,
            SamplerKind::Exact => 0x0400,
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SamplerKind::Dense => "dense",
            SamplerKind::Tridiagonal => "tridiagonal",
            SamplerKind::Mcmc => "mcmc",
            SamplerKind::Exact => "exact",
        };
        f.write_str(s)
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(SamplerKind::Dense),
            "tridiagonal" => Ok(SamplerKind::Tridiagonal),
            "mcmc" => Ok(SamplerKind::Mcmc),
            "exact" => Ok(SamplerKind::Exact),
            other => Err(Error::InvalidConfig(format!(
                "unknown sampler '{other}' (expected dense, tridiagonal, mcmc, or exact)"
            ))),
        }
    }
}

/// Chunk length for parallel direct samplers. Chunk i always runs on RNG
/// stream `base + i` regardless of the thread count.
const CHUNK: usize = 1024;

/// Number of MCMC chains; fixed so output never depends on parallelism.
const MCMC_CHAINS: usize = 8;

struct SamplerDraw {
    pairs: Vec<(f64, f64)>,
    /// Per-chain acceptance rates; present only for the MCMC sampler.
    acceptance: Option<Vec<f64>>,
}

fn first_two_traces(params: &EnsembleParams, kind: SamplerKind, rng: &mut RngStream) -> (f64, f64) {
    let m = match kind {
        SamplerKind::Dense => sample_dense(params, rng).expect("beta checked before drawing"),
        SamplerKind::Tridiagonal => sample_tridiagonal(params, rng),
        _ => unreachable!("chunked path serves matrix samplers only"),
    };
    let t = traces_from_matrix(&m, 2);
    (t.t(1), t.t(2))
}

fn draw_pairs(
    params: &EnsembleParams,
    kind: SamplerKind,
    n: usize,
    seed: u64,
) -> Result<SamplerDraw> {
    let base = kind.stream_base();
    match kind {
        SamplerKind::Dense | SamplerKind::Tridiagonal => {
            if kind == SamplerKind::Dense {
                // Fail fast on unsupported beta instead of inside a worker.
                let mut probe = RngStream::new(seed, base);
                sample_dense(params, &mut probe)?;
            }
            let n_chunks = n.div_ceil(CHUNK);
            let chunks: Vec<Vec<(f64, f64)>> = (0..n_chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = RngStream::new(seed, base + c as u64);
                    let len = CHUNK.min(n - c * CHUNK);
                    (0..len)
                        .map(|_| first_two_traces(params, kind, &mut rng))
                        .collect()
                })
                .collect();
            Ok(SamplerDraw {
                pairs: chunks.concat(),
                acceptance: None,
            })
        }
        SamplerKind::Exact => {
            let n_chunks = n.div_ceil(CHUNK);
            let chunks: Vec<Vec<(f64, f64)>> = (0..n_chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = RngStream::new(seed, base + c as u64);
                    let len = CHUNK.min(n - c * CHUNK);
                    (0..len)
                        .map(|_| {
                            sample_t1_t2_exact(params, &mut rng)
                                .expect("exponent checked before drawing")
                        })
                        .collect()
                })
                .collect();
            Ok(SamplerDraw {
                pairs: chunks.concat(),
                acceptance: None,
            })
        }
        SamplerKind::Mcmc => {
            let per_chain = n.div_ceil(MCMC_CHAINS);
            let cfg = McmcConfig::for_samples(params, per_chain);
            let chains: Vec<(Vec<(f64, f64)>, f64)> = (0..MCMC_CHAINS)
                .into_par_iter()
                .map(|c| {
                    let mut rng = RngStream::new(seed, base + c as u64);
                    let mut chain = sample_spectrum_mcmc(params, &cfg, &mut rng)
                        .expect("config built by for_samples is valid");
                    let pairs: Vec<(f64, f64)> = chain
                        .by_ref()
                        .map(|s| {
                            let t = crate::trace_algebra::traces_from_spectrum(&s, 2);
                            (t.t(1), t.t(2))
                        })
                        .collect();
                    (pairs, chain.acceptance_rate())
                })
                .collect();
            let mut pairs = Vec::with_capacity(per_chain * MCMC_CHAINS);
            let mut acceptance = Vec::with_capacity(MCMC_CHAINS);
            for (p, a) in chains {
                pairs.extend(p);
                acceptance.push(a);
            }
            pairs.truncate(n);
            Ok(SamplerDraw {
                pairs,
                acceptance: Some(acceptance),
            })
        }
    }
}

fn base_details(params: &EnsembleParams, seed: u64, kind: SamplerKind) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("seed".into(), seed.to_string()),
        ("n_dim".into(), params.n_dim().to_string()),
        ("beta".into(), params.beta().to_string()),
        ("sampler".into(), kind.to_string()),
        ("stream_base".into(), format!("{:#06x}", kind.stream_base())),
    ])
}

fn sample_mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64, usize) {
    let n = xs.clone().count();
    let mean = xs.clone().sum::<f64>() / n as f64;
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, var.sqrt(), n)
}

/// Cross-checks every requested sampler against the closed forms and the
/// other samplers. Emitted per sampler: KS on t1, KS on t2, moment z-scores
/// for E[t1^{2k} t2^n] with (k, n) in {0,1,2}^2 minus (0,0), a domain check
/// (t2 >= t1^2/N), and for MCMC the acceptance-rate band. Then one pair of
/// two-sample KS checks (t1, t2) for every sampler pair.
pub fn run_campaign(
    params: &EnsembleParams,
    n_samples: usize,
    seed: u64,
    samplers: &[SamplerKind],
) -> Result<Vec<VerificationReport>> {
    params.require_valid_exponent()?;
    if n_samples < 1_000 {
        return Err(Error::InvalidConfig(format!(
            "campaign needs at least 1000 samples per sampler for the KS thresholds to \
             hold (got {n_samples})"
        )));
    }
    if samplers.is_empty() {
        return Err(Error::InvalidConfig("no samplers requested".into()));
    }

    let mut draws: Vec<(SamplerKind, SamplerDraw)> = Vec::with_capacity(samplers.len());
    for &kind in samplers {
        draws.push((kind, draw_pairs(params, kind, n_samples, seed)?));
    }

    let mut reports = Vec::new();
    for (kind, draw) in &draws {
        let t1s: Vec<f64> = draw.pairs.iter().map(|&(a, _)| a).collect();
        let t2s: Vec<f64> = draw.pairs.iter().map(|&(_, b)| b).collect();
        let n = t1s.len();
        let details = base_details(params, seed, *kind);

        let d1 = ks_statistic(&t1s, |x| cdf_t1(params, x))?;
        let thr = ks_one_sample_threshold(n);
        reports.push(VerificationReport {
            name: format!("ks_t1[{kind}]"),
            statistic: d1,
            threshold: thr,
            n_samples: n,
            passed: d1 <= thr,
            details: details.clone(),
        });

        let d2 = ks_statistic(&t2s, |x| {
            cdf_t2(params, x).expect("exponent checked at entry")
        })?;
        reports.push(VerificationReport {
            name: format!("ks_t2[{kind}]"),
            statistic: d2,
            threshold: thr,
            n_samples: n,
            passed: d2 <= thr,
            details: details.clone(),
        });

        for k in 0u32..=2 {
            for m in 0u32..=2 {
                if k == 0 && m == 0 {
                    continue;
                }
                let exact = mixed_moment(params, k, m)?;
                let (mean, sd, cnt) = sample_mean_std(
                    draw.pairs
                        .iter()
                        .map(move |&(a, b)| a.powi(2 * k as i32) * b.powi(m as i32)),
                );
                let z = ((mean - exact) / (sd / (cnt as f64).sqrt())).abs();
                reports.push(VerificationReport {
                    name: format!("moment_z_k{k}_n{m}[{kind}]"),
                    statistic: z,
                    threshold: 4.0,
                    n_samples: cnt,
                    passed: z <= 4.0,
                    details: details.clone(),
                });
            }
        }

        // Largest relative excursion below the parabola t2 = t1^2/N.
        let worst = draw
            .pairs
            .iter()
            .map(|&(a, b)| (a * a / params.n() - b) / b.abs().max(1.0))
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0);
        reports.push(VerificationReport {
            name: format!("domain[{kind}]"),
            statistic: worst,
            threshold: 1e-10,
            n_samples: n,
            passed: worst <= 1e-10,
            details: details.clone(),
        });

        if let Some(rates) = &draw.acceptance {
            let lo = rates.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mean = rates.iter().sum::<f64>() / rates.len() as f64;
            let mut d = details.clone();
            d.insert("acceptance_min".into(), lo.to_string());
            d.insert("acceptance_max".into(), hi.to_string());
            d.insert("chains".into(), MCMC_CHAINS.to_string());
            reports.push(VerificationReport {
                name: format!("mcmc_acceptance[{kind}]"),
                statistic: mean,
                threshold: 0.7,
                n_samples: n,
                passed: lo >= 0.1 && hi <= 0.7,
                details: d,
            });
        }
    }

    for i in 0..draws.len() {
        for j in i + 1..draws.len() {
            let (ka, da) = &draws[i];
            let (kb, db) = &draws[j];
            let mut details = base_details(params, seed, *ka);
            details.insert("sampler".into(), format!("{ka}|{kb}"));
            details.insert(
                "stream_base".into(),
                format!("{:#06x}|{:#06x}", ka.stream_base(), kb.stream_base()),
            );
            let thr = ks_two_sample_threshold(da.pairs.len(), db.pairs.len());
            for (tag, pick) in [("t1", 0usize), ("t2", 1usize)] {
                let xa: Vec<f64> = da
                    .pairs
                    .iter()
                    .map(|&(a, b)| if pick == 0 { a } else { b })
                    .collect();
                let xb: Vec<f64> = db
                    .pairs
                    .iter()
                    .map(|&(a, b)| if pick == 0 { a } else { b })
                    .collect();
                let d = ks_two_sample(&xa, &xb)?;
                reports.push(VerificationReport {
                    name: format!("two_sample_{tag}[{ka}|{kb}]"),
                    statistic: d,
                    threshold: thr,
                    n_samples: xa.len() + xb.len(),
                    passed: d <= thr,
                    details: details.clone(),
                });
            }
        }
    }

    Ok(reports)
}

/// Newline-delimited JSON, one report object per line.
pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("report fields always serialize"));
        out.push('\n');
    }
    out
}

/// Flat CSV: one row per report, '.' decimal separator, '\n' line endings,
/// floats printed with the shortest representation that round-trips.
pub fn reports_to_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from("name,statistic,threshold,passed,seed,n,beta,n_samples\n");
    for r in reports {
        let get = |k: &str| r.details.get(k).cloned().unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.name,
            r.statistic,
            r.threshold,
            r.passed,
            get("seed"),
            get("n_dim"),
            get("beta"),
            r.n_samples
        ));
    }
    out
}

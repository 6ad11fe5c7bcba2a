use trace_moments::distributions::{log_q_t1_t2, mixed_moment, sample_t1_t2_exact};
use trace_moments::sampling::sample_tridiagonal;
use trace_moments::trace_algebra::traces_from_matrix;
use trace_moments::verify::{run_campaign, SamplerKind};
use trace_moments::{EnsembleParams, RngStream, Result};

fn main() -> Result<()> {
    let params = EnsembleParams::new(4, 1.0)?;
    let mut rng = RngStream::new(42, 0);

    // Monte Carlo and closed form, side by side.
    let m = sample_tridiagonal(&params, &mut rng);
    let t = traces_from_matrix(&m, 2);
    let lq = log_q_t1_t2(&params, t.t(1), t.t(2))?;
    let (t1, _t2) = sample_t1_t2_exact(&params, &mut rng)?;
    println!("MC ({}, {}) log q = {}", t.t(1), t.t(2), lq.value());
    println!("exact draw t1 = {t1}");

    // E[t2] = N^2/2 + (2 - beta) N / (2 beta), exactly.
    assert_eq!(mixed_moment(&params, 0, 1)?, 10.0);

    // The cross-checking harness the CLI drives.
    let reports = run_campaign(&params, 10_000, 42, &SamplerKind::ALL)?;
    assert!(reports.iter().all(|r| r.passed));
    println!("{} verification reports, all passed", reports.len());
    Ok(())
}

//! Command-line front end: samplers, density/moment evaluation, verification
//! campaigns, bounds checks, and trace standardization.
//!
//! Exit codes: 0 success, 1 runtime failure or failed checks/violations,
//! 2 configuration or parse errors. Output is a pure function of the flags
//! (and the seed), so repeated invocations produce byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use trace_moments::distributions::{
    log_q_t1, log_q_t1_t2, log_q_t2, mixed_moment, sample_t1_t2_exact,
};
use trace_moments::domain::{cauchy_schwarz_check, t2_cut_check, BoundsCheck};
use trace_moments::sampling::{sample_dense, sample_spectrum_mcmc, sample_tridiagonal, McmcConfig};
use trace_moments::trace_algebra::{
    standardize_traces, traces_from_matrix, traces_from_spectrum,
};
use trace_moments::verify::{run_campaign, Histogram, reports_to_csv, reports_to_json, SamplerKind};
use trace_moments::{EnsembleParams, Error, RngStream, TraceVector};

#[derive(Parser)]
#[command(
    name = "trace-moments",
    version,
    about = "Spectral trace statistics of Gaussian beta-ensembles: samplers, exact \
             distributions of (t1, t2), verification campaigns, and domain bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// RNG seed; falls back to $TRACE_MOMENTS_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output format for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for parallel campaigns (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SamplerArg {
    Dense,
    Tridiagonal,
    Mcmc,
    Exact,
}

impl From<SamplerArg> for SamplerKind {
    fn from(s: SamplerArg) -> SamplerKind {
        match s {
            SamplerArg::Dense => SamplerKind::Dense,
            SamplerArg::Tridiagonal => SamplerKind::Tridiagonal,
            SamplerArg::Mcmc => SamplerKind::Mcmc,
            SamplerArg::Exact => SamplerKind::Exact,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Draw matrices or spectra and print trace rows t1..t{r_max}.
    Sample {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = SamplerArg::Tridiagonal)]
        sampler: SamplerArg,
        /// Highest trace order per row (the exact sampler provides t1, t2 only).
        #[arg(long, default_value_t = 2)]
        r_max: usize,
        /// Histogram bins for --plot-script.
        #[arg(long, default_value_t = 60)]
        bins: usize,
        /// Emit a gnuplot script overlaying sampled marginals with the exact
        /// densities instead of data rows.
        #[arg(long, default_value_t = false)]
        plot_script: bool,
    },
    /// Evaluate log Q(t1, t2) at points and/or a grid.
    Density {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Probe point "t1,t2"; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        point: Vec<String>,
        /// Grid over t1 as "lo:hi:steps" (requires --grid-t2).
        #[arg(long, allow_hyphen_values = true)]
        grid_t1: Option<String>,
        /// Grid over t2 as "lo:hi:steps" (requires --grid-t1).
        #[arg(long, allow_hyphen_values = true)]
        grid_t2: Option<String>,
    },
    /// Print the exact mixed moment E[t1^{2k} t2^n].
    Moments {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[arg(long, default_value_t = 0)]
        nn: u32,
    },
    /// Run the sampler-vs-closed-form verification campaign.
    Verify {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Subset of samplers to check; repeatable (default: all four).
        #[arg(long, value_enum)]
        sampler: Vec<SamplerArg>,
    },
    /// Check Cauchy-Schwarz and t2-cut inequalities on a trace vector.
    Bounds {
        /// Matrix dimension N (default: the number of traces given).
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated traces "t1,t2,...".
        #[arg(long, allow_hyphen_values = true)]
        traces: Option<String>,
        /// File containing whitespace/comma-separated traces.
        #[arg(long)]
        traces_file: Option<PathBuf>,
    },
    /// Center and rescale a trace vector to t1 = 0, t2 = 1.
    Standardize {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        traces: Option<String>,
        #[arg(long)]
        traces_file: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// 2 for configuration/parse problems, 1 for runtime failures.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::NonPositiveN
        | Error::NonPositiveBeta(_)
        | Error::UnsupportedBeta(_)
        | Error::InvalidExponent(_)
        | Error::NonPositiveT2(_)
        | Error::InsufficientTraces { .. }
        | Error::InvalidSpectrum
        | Error::InvalidConfig(_) => 2,
        Error::DegenerateScale(_)
        | Error::SingularSystem
        | Error::EmptySample
        | Error::NoConvergence { .. } => 1,
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    }
    let seed = resolve_seed(cli.seed)?;
    let out = cli.output.as_deref();
    match cli.command {
        Command::Sample {
            n,
            beta,
            samples,
            sampler,
            r_max,
            bins,
            plot_script,
        } => cmd_sample(
            n, beta, samples, sampler, r_max, bins, plot_script, seed, cli.format, out,
        ),
        Command::Density {
            n,
            beta,
            point,
            grid_t1,
            grid_t2,
        } => cmd_density(n, beta, &point, grid_t1, grid_t2, cli.format, out),
        Command::Moments { n, beta, k, nn } => cmd_moments(n, beta, k, nn, cli.format, out),
        Command::Verify {
            n,
            beta,
            samples,
            sampler,
        } => cmd_verify(n, beta, samples, &sampler, seed, cli.format, out),
        Command::Bounds {
            n,
            traces,
            traces_file,
        } => cmd_bounds(n, traces, traces_file, cli.format, out),
        Command::Standardize {
            n,
            traces,
            traces_file,
        } => cmd_standardize(n, traces, traces_file, cli.format, out),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Error> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("TRACE_MOMENTS_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::InvalidConfig(format!("TRACE_MOMENTS_SEED must be a u64 (got '{v}')"))
        }),
        Err(_) => Ok(0),
    }
}

fn write_out(path: Option<&Path>, content: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    n: usize,
    beta: f64,
    samples: usize,
    sampler: SamplerArg,
    r_max: usize,
    bins: usize,
    plot_script: bool,
    seed: u64,
    format: Format,
    out: Option<&Path>,
) -> Result<ExitCode, Error> {
    let params = EnsembleParams::new(n, beta)?;
    if r_max == 0 {
        return Err(Error::InvalidConfig("r_max must be at least 1".into()));
    }
    if sampler == SamplerArg::Exact && r_max > 2 {
        return Err(Error::InvalidConfig(
            "the exact sampler provides only (t1, t2); r_max must be <= 2".into(),
        ));
    }
    let rows = draw_rows(&params, sampler, samples, r_max, seed)?;

    if plot_script {
        let script = gnuplot_overlay(&params, &rows, bins)?;
        write_out(out, &script)?;
        return Ok(ExitCode::SUCCESS);
    }

    let mut content = String::new();
    match format {
        Format::Csv => {
            let header: Vec<String> = (1..=r_max).map(|r| format!("t{r}")).collect();
            content.push_str(&header.join(","));
            content.push('\n');
            for row in &rows {
                let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                content.push_str(&cells.join(","));
                content.push('\n');
            }
        }
        Format::Json => {
            for row in &rows {
                let mut obj = serde_json::Map::new();
                for (i, v) in row.iter().enumerate() {
                    obj.insert(format!("t{}", i + 1), float_json(*v));
                }
                content.push_str(&serde_json::Value::Object(obj).to_string());
                content.push('\n');
            }
        }
    }
    write_out(out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn draw_rows(
    params: &EnsembleParams,
    sampler: SamplerArg,
    samples: usize,
    r_max: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>, Error> {
    let mut rng = RngStream::new(seed, 0);
    let mut rows = Vec::with_capacity(samples);
    match sampler {
        SamplerArg::Dense => {
            // Probe once so an unsupported beta fails before any output.
            sample_dense(params, &mut RngStream::new(seed, 0))?;
            for _ in 0..samples {
                let m = sample_dense(params, &mut rng)?;
                rows.push(traces_from_matrix(&m, r_max).values().to_vec());
            }
        }
        SamplerArg::Tridiagonal => {
            for _ in 0..samples {
                let m = sample_tridiagonal(params, &mut rng);
                rows.push(traces_from_matrix(&m, r_max).values().to_vec());
            }
        }
        SamplerArg::Mcmc => {
            let cfg = McmcConfig::for_samples(params, samples);
            let chain = sample_spectrum_mcmc(params, &cfg, &mut rng)?;
            for s in chain.take(samples) {
                rows.push(traces_from_spectrum(&s, r_max).values().to_vec());
            }
        }
        SamplerArg::Exact => {
            params.require_valid_exponent()?;
            for _ in 0..samples {
                let (t1, t2) = sample_t1_t2_exact(params, &mut rng)?;
                rows.push(if r_max == 1 { vec![t1] } else { vec![t1, t2] });
            }
        }
    }
    Ok(rows)
}

fn float_json(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::json!(format!("{v}"))
    }
}

/// Gnuplot script: sampled t1/t2 histograms as inline data blocks overlaid
/// with the exact marginal densities.
fn gnuplot_overlay(
    params: &EnsembleParams,
    rows: &[Vec<f64>],
    bins: usize,
) -> Result<String, Error> {
    params.require_valid_exponent()?;
    if rows.is_empty() || rows[0].len() < 2 {
        return Err(Error::InvalidConfig(
            "plot script needs sampled rows with at least t1 and t2".into(),
        ));
    }
    let t1s: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let t2s: Vec<f64> = rows.iter().map(|r| r[1]).collect();

    let mut script = String::from(
        "# Sampled trace marginals vs exact closed-form densities.\n\
         # Render with: gnuplot <this file>\n\
         set terminal pngcairo size 1200,500\n\
         set output 'trace_marginals.png'\n\
         set style fill solid 0.35\n\
         set multiplot layout 1,2\n",
    );

    for (tag, samples, pdf) in [
        ("t1", &t1s, &(|x: f64| log_q_t1(params, x).density()) as &dyn Fn(f64) -> f64),
        ("t2", &t2s, &(|x: f64| {
            log_q_t2(params, x).map(|d| d.density()).unwrap_or(0.0)
        }) as &dyn Fn(f64) -> f64),
    ] {
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = 0.05 * (hi - lo).max(1e-9);
        let hist = Histogram::from_samples(samples, lo - pad, hi + pad, bins)?;

        let _ = writeln!(script, "${tag}_hist << EOD");
        for (mid, dens) in hist.density_points() {
            let _ = writeln!(script, "{mid} {dens}");
        }
        script.push_str("EOD\n");

        let _ = writeln!(script, "${tag}_pdf << EOD");
        let curve_points = 200;
        for i in 0..=curve_points {
            let x = (lo - pad) + (hi - lo + 2.0 * pad) * i as f64 / curve_points as f64;
            let _ = writeln!(script, "{x} {}", pdf(x));
        }
        script.push_str("EOD\n");

        let _ = writeln!(script, "set title '{tag}: sampled vs exact'");
        let _ = writeln!(
            script,
            "plot ${tag}_hist using 1:2 with boxes title 'sampled', \
             ${tag}_pdf using 1:2 with lines lw 2 title 'exact'"
        );
    }
    script.push_str("unset multiplot\n");
    Ok(script)
}

fn parse_point(s: &str) -> Result<(f64, f64), Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::InvalidConfig(format!(
            "point must be 't1,t2' (got '{s}')"
        )));
    }
    let t1 = parts[0]
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("cannot parse t1 from '{s}'")))?;
    let t2 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("cannot parse t2 from '{s}'")))?;
    Ok((t1, t2))
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::InvalidConfig(format!("grid must be 'lo:hi:steps' (got '{s}')"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if steps == 0 || !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(bad());
    }
    if steps == 1 {
        return Ok(vec![0.5 * (lo + hi)]);
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}

fn cmd_density(
    n: usize,
    beta: f64,
    points: &[String],
    grid_t1: Option<String>,
    grid_t2: Option<String>,
    format: Format,
    out: Option<&Path>,
) -> Result<ExitCode, Error> {
    let params = EnsembleParams::new(n, beta)?;
    params.require_valid_exponent()?;

    let mut probes: Vec<(f64, f64)> = Vec::new();
    for p in points {
        probes.push(parse_point(p)?);
    }
    match (grid_t1, grid_t2) {
        (Some(g1), Some(g2)) => {
            let xs = parse_grid(&g1)?;
            let ys = parse_grid(&g2)?;
            for &x in &xs {
                for &y in &ys {
                    probes.push((x, y));
                }
            }
        }
        (None, None) => {}
        _ => {
            return Err(Error::InvalidConfig(
                "grids need both --grid-t1 and --grid-t2".into(),
            ))
        }
    }
    if probes.is_empty() {
        return Err(Error::InvalidConfig(
            "nothing to evaluate: pass --point and/or --grid-t1/--grid-t2".into(),
        ));
    }

    let mut content = String::new();
    if format == Format::Csv {
        content.push_str("t1,t2,log_q\n");
    }
    for (t1, t2) in probes {
        let lq = log_q_t1_t2(&params, t1, t2)?.value();
        match format {
            // {} renders -inf exactly as "-inf".
            Format::Csv => {
                let _ = writeln!(content, "{t1},{t2},{lq}");
            }
            Format::Json => {
                let obj = serde_json::json!({
                    "t1": t1,
                    "t2": t2,
                    "log_q": float_json(lq),
                });
                let _ = writeln!(content, "{obj}");
            }
        }
    }
    write_out(out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_moments(
    n: usize,
    beta: f64,
    k: u32,
    nn: u32,
    format: Format,
    out: Option<&Path>,
) -> Result<ExitCode, Error> {
    let params = EnsembleParams::new(n, beta)?;
    let value = mixed_moment(&params, k, nn)?;
    let content = match format {
        Format::Csv => format!("k,n,value\n{k},{nn},{value}\n"),
        Format::Json => format!(
            "{}\n",
            serde_json::json!({"k": k, "n": nn, "value": value})
        ),
    };
    write_out(out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    n: usize,
    beta: f64,
    samples: usize,
    samplers: &[SamplerArg],
    seed: u64,
    format: Format,
    out: Option<&Path>,
) -> Result<ExitCode, Error> {
    let params = EnsembleParams::new(n, beta)?;
    let kinds: Vec<SamplerKind> = if samplers.is_empty() {
        SamplerKind::ALL.to_vec()
    } else {
        samplers.iter().map(|&s| s.into()).collect()
    };
    let reports = run_campaign(&params, samples, seed, &kinds)?;
    let content = match format {
        Format::Csv => reports_to_csv(&reports),
        Format::Json => reports_to_json(&reports),
    };
    write_out(out, &content)?;
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", reports.len());
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn load_traces(
    n: Option<usize>,
    traces: Option<String>,
    traces_file: Option<PathBuf>,
) -> Result<TraceVector, Error> {
    let raw = match (traces, traces_file) {
        (Some(t), None) => t,
        (None, Some(p)) => std::fs::read_to_string(&p)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", p.display())))?,
        _ => {
            return Err(Error::InvalidConfig(
                "pass exactly one of --traces or --traces-file".into(),
            ))
        }
    };
    let mut values = Vec::new();
    for token in raw.split(|c: char| c == ',' || c.is_whitespace()) {
        if token.is_empty() {
            continue;
        }
        values.push(token.parse::<f64>().map_err(|_| {
            Error::InvalidConfig(format!("cannot parse trace value '{token}'"))
        })?);
    }
    if values.is_empty() {
        return Err(Error::InvalidConfig("no trace values supplied".into()));
    }
    TraceVector::new(n.unwrap_or(values.len()), values)
}

fn render_checks(checks: &[&BoundsCheck], format: Format) -> String {
    let mut content = String::new();
    match format {
        Format::Csv => {
            content.push_str("name,lhs,rhs,satisfied,equality\n");
            for c in checks {
                let _ = writeln!(
                    content,
                    "{},{},{},{},{}",
                    c.name, c.lhs, c.rhs, c.satisfied, c.equality
                );
            }
        }
        Format::Json => {
            for c in checks {
                let obj = serde_json::json!({
                    "name": c.name,
                    "lhs": float_json(c.lhs),
                    "rhs": float_json(c.rhs),
                    "satisfied": c.satisfied,
                    "equality": c.equality,
                });
                let _ = writeln!(content, "{obj}");
            }
        }
    }
    content
}

fn cmd_bounds(
    n: Option<usize>,
    traces: Option<String>,
    traces_file: Option<PathBuf>,
    format: Format,
    out: Option<&Path>,
) -> Result<ExitCode, Error> {
    let t = load_traces(n, traces, traces_file)?;
    let schwarz = cauchy_schwarz_check(&t);
    let cuts = t2_cut_check(&t);
    let all: Vec<&BoundsCheck> = schwarz.checks().iter().chain(cuts.checks()).collect();
    write_out(out, &render_checks(&all, format))?;
    if schwarz.all_satisfied() && cuts.all_satisfied() {
        Ok(ExitCode::SUCCESS)
    } else {
        let violated = all.iter().filter(|c| !c.satisfied).count();
        eprintln!("{violated} of {} inequalities violated", all.len());
        Ok(ExitCode::from(1))
    }
}

fn cmd_standardize(
    n: Option<usize>,
    traces: Option<String>,
    traces_file: Option<PathBuf>,
    format: Format,
    out: Option<&Path>,
) -> Result<ExitCode, Error> {
    let t = load_traces(n, traces, traces_file)?;
    let (delta, c, std) = standardize_traces(&t)?;
    let content = match format {
        Format::Csv => {
            let header: Vec<String> = (1..=std.len()).map(|r| format!("t{r}")).collect();
            let cells: Vec<String> = std.values().iter().map(|v| format!("{v}")).collect();
            format!(
                "delta,c,{}\n{delta},{c},{}\n",
                header.join(","),
                cells.join(",")
            )
        }
        Format::Json => format!(
            "{}\n",
            serde_json::json!({"delta": delta, "c": c, "std_traces": std.values()})
        ),
    };
    write_out(out, &content)?;
    Ok(ExitCode::SUCCESS)
}

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use agla_core::guarantees::{alpha_grid, gate_allowing_zero_alpha, GridAxis};
use agla_core::magproj::project_magnitude;
use agla_core::metrics::{descent_audit_from, oracle_nearest_c2};
use agla_core::signal::{ingest_wav, init_coeffs, make_target, write_wav, InitMode};
use agla_core::trace_io::{export_trace, read_coefs_csv, read_dense_csv, read_magnitudes_csv, read_trace_csv, read_trace_json, write_coefs_csv, TraceFormat};
use agla_core::vector::dist;
use agla_core::{gate, run, Algorithm, CoefVec, Complex64, LinearTransform, MagnitudeSpec, SolverParams};
use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::{
    CompareArgs, DescentOracleArgs, FormatArg, GateArgs, InitArg, OracleCommand, ParamgridArgs,
    ProjectionOracleArgs, RunArgs, SolveArgs,
};
use crate::GateRejected;

struct Setup {
    transform: LinearTransform,
    target: MagnitudeSpec,
    init: CoefVec,
}

fn build_transform(run: &RunArgs) -> Result<LinearTransform> {
    let t = &run.transform;
    match &t.dense {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            read_dense_csv(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
        }
        None => LinearTransform::gabor(t.len, t.hop, t.channels, t.window_kind())
            .context("building the Gabor transform"),
    }
}

fn setup(run: &RunArgs) -> Result<Setup> {
    let transform = build_transform(run)?;
    let len = transform.signal_len();
    let target = if let Some(path) = &run.input.magnitudes {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        read_magnitudes_csv(BufReader::new(file))?
    } else {
        let x = match (&run.input.wav, &run.input.generator) {
            (Some(path), _) => ingest_wav(path, len).with_context(|| format!("reading {}", path.display()))?,
            (None, Some(spec)) => {
                if spec.len.is_some_and(|l| l != len) {
                    bail!("generator length {} differs from the transform length {len}", spec.len.unwrap_or_default());
                }
                spec.generate(len)
            }
            (None, None) => bail!("one of --wav, --generator or --magnitudes is required"),
        };
        make_target(&transform, &x)?
    };
    if target.len() != transform.coef_len() {
        bail!(
            "{} magnitudes given but the transform has {} coefficients",
            target.len(),
            transform.coef_len()
        );
    }
    let mode = match (&run.init.init_coefs, run.init.init) {
        (Some(path), _) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            InitMode::Provided(read_coefs_csv(BufReader::new(file))?)
        }
        (None, InitArg::ZeroPhase) => InitMode::ZeroPhase,
        (None, InitArg::RandomPhase) => InitMode::RandomPhase { seed: run.init.seed },
    };
    let init = init_coeffs(&mode, &target)?;
    Ok(Setup {
        transform,
        target,
        init,
    })
}

fn guaranteed(algorithm: &Algorithm) -> bool {
    match *algorithm {
        Algorithm::Gla => true,
        Algorithm::Fgla { alpha } => gate_allowing_zero_alpha(alpha, 0.0, 1.0).passed(),
        Algorithm::Agla { alpha, beta, gamma } => gate_allowing_zero_alpha(alpha, beta, gamma).passed(),
        Algorithm::Raar { .. } | Algorithm::Dm { .. } => false,
    }
}

fn params(run: &RunArgs, algorithm: Algorithm) -> SolverParams {
    let p = SolverParams::new(algorithm, run.iters);
    match run.stop_delta_t {
        Some(tol) => p.with_stop_delta_t(tol),
        None => p,
    }
}

fn trace_format(format: Option<FormatArg>, path: &Path) -> TraceFormat {
    match format {
        Some(FormatArg::Csv) => TraceFormat::Csv,
        Some(FormatArg::Json) => TraceFormat::Json,
        None => TraceFormat::from_path(path),
    }
}

#[derive(Serialize)]
struct RunSummary {
    algorithm: Algorithm,
    guaranteed: bool,
    k1: Option<f64>,
    k2: Option<f64>,
    iterations: usize,
    final_d2: f64,
    final_residual: f64,
    final_ssnr: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<String>,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn summarize(
    setup: &Setup,
    algorithm: Algorithm,
    out: &agla_core::solvers::RunOutput,
    trace: Option<&Path>,
) -> Result<RunSummary> {
    let last = out.trace.records.last().context("empty trace")?;
    let final_ssnr = agla_core::metrics::ssnr(&setup.transform, &out.signal, &setup.target)?;
    Ok(RunSummary {
        algorithm,
        guaranteed: guaranteed(&algorithm),
        k1: out.trace.k1,
        k2: out.trace.k2,
        iterations: last.n,
        final_d2: last.d2,
        final_residual: last.residual,
        final_ssnr,
        trace: trace.map(|p| p.display().to_string()),
    })
}

pub fn solve(args: &SolveArgs) -> Result<()> {
    let algorithm = args.run.params.algorithm(args.algorithm);
    if args.run.require_guarantee && !guaranteed(&algorithm) {
        return Err(GateRejected(format!("{algorithm:?} carries no convergence guarantee")).into());
    }
    let setup = setup(&args.run)?;
    let out = run(&setup.transform, &setup.target, &params(&args.run, algorithm), &setup.init)?;
    if let Some(path) = &args.trace {
        export_trace(&out.trace, path, trace_format(args.format, path))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.coefs_out {
        write_coefs_csv(&out.coefficients, BufWriter::new(File::create(path)?))?;
    }
    if let Some(path) = &args.wav_out {
        write_wav(path, &out.signal, args.sample_rate)?;
    }
    print_json(&summarize(&setup, algorithm, &out, args.trace.as_deref())?)
}

pub fn compare(args: &CompareArgs) -> Result<()> {
    let algorithms: Vec<Algorithm> = args
        .algorithms
        .iter()
        .map(|&a| args.run.params.algorithm(a))
        .collect();
    if args.run.require_guarantee {
        if let Some(bad) = algorithms.iter().find(|a| !guaranteed(a)) {
            return Err(GateRejected(format!("{bad:?} carries no convergence guarantee")).into());
        }
    }
    let setup = setup(&args.run)?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let (format, ext) = match args.format {
        FormatArg::Csv => (TraceFormat::Csv, "csv"),
        FormatArg::Json => (TraceFormat::Json, "json"),
    };

    // Each thread owns its trace file; summaries are printed once all finish.
    let results: Vec<Result<RunSummary>> = std::thread::scope(|scope| {
        let handles: Vec<_> = algorithms
            .iter()
            .enumerate()
            .map(|(k, &algorithm)| {
                let setup = &setup;
                let name = if algorithms[..k].iter().any(|a| a.name() == algorithm.name()) {
                    format!("{}-{k}", algorithm.name())
                } else {
                    algorithm.name().to_string()
                };
                let path = args.out_dir.join(format!("{name}.{ext}"));
                let params = params(&args.run, algorithm);
                scope.spawn(move || -> Result<RunSummary> {
                    let out = run(&setup.transform, &setup.target, &params, &setup.init)?;
                    export_trace(&out.trace, &path, format)
                        .with_context(|| format!("writing {}", path.display()))?;
                    summarize(setup, algorithm, &out, Some(&path))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(anyhow::anyhow!("solver thread panicked"))))
            .collect()
    });
    let summaries = results.into_iter().collect::<Result<Vec<_>>>()?;
    print_json(&summaries)
}

pub fn gate_cmd(args: &GateArgs) -> Result<()> {
    let verdict = gate(args.alpha, args.beta, args.gamma);
    print_json(&verdict)?;
    if args.require_guarantee && !verdict.passed() {
        return Err(GateRejected(format!(
            "({}, {}, {}) fails the gate",
            args.alpha, args.beta, args.gamma
        ))
        .into());
    }
    Ok(())
}

pub fn paramgrid(args: &ParamgridArgs) -> Result<()> {
    let grid = alpha_grid(
        GridAxis::with_step(args.beta_min, args.beta_max, args.step)?,
        GridAxis::with_step(args.gamma_min, args.gamma_max, args.step)?,
    )?;
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
            grid.write_csv(&mut w)?;
            w.flush()?;
        }
        None => grid.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

pub fn oracle(cmd: &OracleCommand) -> Result<()> {
    match cmd {
        OracleCommand::Projection(args) => projection_oracle(args),
        OracleCommand::Descent(args) => descent_oracle(args),
    }
}

#[derive(Serialize)]
struct ProjectionReport {
    samples: usize,
    grid_points: usize,
    /// Largest `‖c − P(c)‖ − ‖c − oracle(c)‖`; should not exceed zero by more than rounding.
    max_excess_over_oracle: f64,
    /// Largest `|‖|c| − s‖ − ‖c − P(c)‖| / (‖c‖ + ‖s‖)`.
    max_identity_gap: f64,
    passed: bool,
}

fn projection_oracle(args: &ProjectionOracleArgs) -> Result<()> {
    if args.grid_points == 0 {
        bail!("--grid-points must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut excess = f64::NEG_INFINITY;
    let mut identity = 0.0f64;
    for _ in 0..args.samples {
        let scale = 10f64.powf(rng.random_range(-3.0..3.0));
        let c = CoefVec::new(vec![Complex64::from_polar(
            rng.random_range(0.0..3.0) * scale,
            rng.random_range(0.0..std::f64::consts::TAU),
        )]);
        let s = MagnitudeSpec::new(vec![rng.random_range(0.0..3.0) * scale])?;
        let p = project_magnitude(&c, &s)?;
        let o = oracle_nearest_c2(&c, &s, args.grid_points)?;
        excess = excess.max(dist(&c, &p) - dist(&c, &o));
        let d = agla_core::magproj::distance_c2(&c, &s)?;
        identity = identity.max((d - dist(&c, &p)).abs() / (c.norm() + s.norm()));
    }
    print_json(&ProjectionReport {
        samples: args.samples,
        grid_points: args.grid_points,
        max_excess_over_oracle: excess,
        max_identity_gap: identity,
        passed: excess <= 1e-6 && identity <= 1e-12,
    })
}

fn descent_oracle(args: &DescentOracleArgs) -> Result<()> {
    let file = File::open(&args.trace).with_context(|| format!("opening {}", args.trace.display()))?;
    let (records, stored, in_range) = match TraceFormat::from_path(&args.trace) {
        TraceFormat::Json => {
            let trace = read_trace_json(BufReader::new(file))?;
            (trace.records, trace.k1.zip(trace.k2), Some(trace.init_in_range))
        }
        TraceFormat::Csv => (read_trace_csv(BufReader::new(file))?, None, None),
    };
    let (k1, k2) = match (args.k1.zip(args.k2), stored) {
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => bail!("the trace carries no descent constants; pass --k1 and --k2"),
    };
    let first = args.from.unwrap_or(if in_range == Some(true) { 1 } else { 2 });
    print_json(&descent_audit_from(&records, k1, k2, first))
}

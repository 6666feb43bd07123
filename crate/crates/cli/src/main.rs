//! Command-line front end: run solves, oracle integrations and
//! solver-vs-oracle comparisons, emitting CSV waveforms and JSON reports.
//!
//! Exit codes: 0 success, 1 configuration error, 2 non-convergence (or a
//! failed comparison), 3 numerical error (resonance, divergence).

mod sysdef;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use limitcycle::operators::OperatorError;
use limitcycle::oracle::{
    compare_waveforms, extract_limit_cycle, integrate_vdp, OdeRunConfig, OracleError,
};
use limitcycle::signal::{PeriodicGrid, PeriodicSignal};
use limitcycle::solver::{scalar_mixed_solve, OuterConfig, SolveReport, SolverError};
use limitcycle::splitting::SplittingError;
use limitcycle::systems::{
    describing_function_baseline, double_well, initial_guess_ramp, period_guess, van_der_pol,
    VdpParams,
};

const EXIT_OK: i32 = 0;
const EXIT_CONFIG: i32 = 1;
const EXIT_NONCONVERGED: i32 = 2;
const EXIT_NUMERICAL: i32 = 3;

/// RMS threshold under which `compare` exits 0.
const COMPARE_RMS_GATE: f64 = 0.05;

#[derive(Parser)]
#[command(
    name = "limitcycle",
    about = "Periodic solutions of mixed-feedback systems via monotone operator splitting",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a periodic solution of a mixed-feedback system.
    Solve(SolveArgs),
    /// Integrate the Van der Pol ODE and extract its limit cycle.
    Oracle(OracleArgs),
    /// Run solve + oracle + describing-function baseline and compare.
    Compare(CompareArgs),
    /// Solve the scalar double-well problem, writing the iterate trail.
    Scalar(ScalarArgs),
}

#[derive(Args, Clone)]
struct SolveArgs {
    /// Built-in system name (`vdp`) or path to a system-definition TOML.
    #[arg(long, default_value = "vdp")]
    system: String,
    /// Van der Pol damping parameter (built-in system only).
    #[arg(long = "K", default_value_t = 1.5)]
    k: f64,
    /// Samples per period.
    #[arg(long, default_value_t = 5000)]
    n: usize,
    /// Resolvent parameter; defaults to 0.05 (0.01 for K >= 5).
    #[arg(long)]
    lambda: Option<f64>,
    /// Outer relative-change tolerance.
    #[arg(long, default_value_t = 0.01)]
    eps1: f64,
    /// Inner relative-change tolerance.
    #[arg(long, default_value_t = 0.01)]
    eps2: f64,
    /// Grid period in seconds, or `auto` for the built-in period guess.
    #[arg(long, default_value = "auto")]
    period: String,
    /// Initial iterate: `ramp:<slope>`, `zero`, or `file:<path>`.
    #[arg(long, default_value = "ramp:1")]
    init: String,
    /// Re-estimate the grid period from iterate zero crossings.
    #[arg(long)]
    adapt_period: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Seed for the load-time monotonicity probe set.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    max_outer: usize,
    #[arg(long, default_value_t = 10_000)]
    max_inner: usize,
}

#[derive(Args, Clone)]
struct OracleArgs {
    #[arg(long = "K", default_value_t = 1.5)]
    k: f64,
    /// RK4 step size.
    #[arg(long, default_value_t = 1e-4)]
    step: f64,
    /// Integration horizon; defaults to 30 estimated periods.
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    x0: f64,
    #[arg(long, default_value_t = 0.0)]
    v0: f64,
    /// Leading fraction of the trajectory discarded as transient.
    #[arg(long, default_value_t = 0.5)]
    discard: f64,
    /// Sample count of the extracted waveform.
    #[arg(long, default_value_t = 5000)]
    n: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Clone)]
struct CompareArgs {
    #[arg(long = "K", default_value_t = 1.5)]
    k: f64,
    #[arg(long, default_value_t = 5000)]
    n: usize,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    eps1: f64,
    #[arg(long, default_value_t = 0.01)]
    eps2: f64,
    /// Solver grid period, or `auto` to anchor it to the oracle period.
    #[arg(long, default_value = "auto")]
    period: String,
    #[arg(long, default_value = "ramp:1")]
    init: String,
    /// RK4 step size of the oracle run.
    #[arg(long, default_value_t = 1e-4)]
    step: f64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    max_outer: usize,
    #[arg(long, default_value_t = 10_000)]
    max_inner: usize,
}

#[derive(Args, Clone)]
struct ScalarArgs {
    /// Initial guess.
    #[arg(long)]
    init: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn io(context: &str, e: std::io::Error) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: format!("{context}: {e}"),
        }
    }
}

fn main() {
    let code = match std::panic::catch_unwind(run) {
        Ok(code) => code,
        Err(_) => {
            eprintln!("limitcycle: internal error");
            EXIT_NUMERICAL
        }
    };
    std::process::exit(code);
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Oracle(args) => cmd_oracle(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::Scalar(args) => cmd_scalar(&args),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("limitcycle: {}", failure.message);
            failure.code
        }
    }
}

fn default_lambda(k: f64) -> f64 {
    if k >= 5.0 {
        0.01
    } else {
        0.05
    }
}

enum InitSpec {
    Ramp(f64),
    Zero,
    File(PathBuf),
}

fn parse_init(text: &str) -> Result<InitSpec, Failure> {
    if text == "zero" {
        return Ok(InitSpec::Zero);
    }
    if let Some(slope) = text.strip_prefix("ramp:") {
        let slope: f64 = slope
            .parse()
            .map_err(|_| Failure::config(format!("init: bad ramp slope `{slope}`")))?;
        return Ok(InitSpec::Ramp(slope));
    }
    if let Some(path) = text.strip_prefix("file:") {
        return Ok(InitSpec::File(PathBuf::from(path)));
    }
    Err(Failure::config(format!(
        "init: expected ramp:<slope> | zero | file:<path>, got `{text}`"
    )))
}

fn materialize_init(spec: &InitSpec, grid: PeriodicGrid) -> Result<PeriodicSignal, Failure> {
    match spec {
        InitSpec::Ramp(slope) => Ok(initial_guess_ramp(grid, *slope)),
        InitSpec::Zero => Ok(PeriodicSignal::zeros(grid)),
        InitSpec::File(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::io(&format!("init file {}", path.display()), e))?;
            PeriodicSignal::from_csv(grid, &text)
                .map_err(|e| Failure::config(format!("init file {}: {e}", path.display())))
        }
    }
}

/// Walks a solver error down to the exit code it maps to.
fn solver_exit_code(e: &SolverError) -> i32 {
    match e {
        SolverError::NonConvergence { .. } | SolverError::ScalarNonConvergence { .. } => {
            EXIT_NONCONVERGED
        }
        SolverError::Inner { source, .. } => match source {
            SplittingError::Resolvent {
                source: OperatorError::Resonance { .. },
                ..
            } => EXIT_NUMERICAL,
            SplittingError::NonConvergence { .. } => EXIT_NONCONVERGED,
            _ => EXIT_NUMERICAL,
        },
        SolverError::Operator(OperatorError::Resonance { .. }) => EXIT_NUMERICAL,
        SolverError::Operator(_) | SolverError::Signal(_) | SolverError::BadConfig(_) => {
            EXIT_CONFIG
        }
        SolverError::DomainEscape { .. } | SolverError::AllProbesFailed { .. } => EXIT_NUMERICAL,
    }
}

fn sig12(v: f64) -> String {
    format!("{v:.11e}")
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::config(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::io(&format!("writing {}", path.display()), e))
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    period: f64,
    num_samples: usize,
}

#[derive(Serialize, Deserialize, Clone)]
struct SolveConfigEcho {
    command: String,
    system: String,
    #[serde(rename = "K")]
    k: f64,
    n: usize,
    lambda: f64,
    eps1: f64,
    eps2: f64,
    period: f64,
    period_mode: String,
    init: String,
    adapt_period: bool,
    out_dir: String,
    seed: u64,
    max_outer: usize,
    max_inner: usize,
}

#[derive(Serialize, Deserialize)]
struct SolveReportJson {
    config: SolveConfigEcho,
    converged: bool,
    outer_iters: usize,
    per_outer_inner_iters: Vec<usize>,
    relative_change_history: Vec<f64>,
    residual_norm: f64,
    amplitude: f64,
    period_estimate: f64,
    grid: GridJson,
    wall_clock_seconds: f64,
}

fn write_solve_artifacts(
    out_dir: &Path,
    echo: &SolveConfigEcho,
    report: &SolveReport,
    wall_clock_seconds: f64,
) -> Result<(), Failure> {
    fs::create_dir_all(out_dir)
        .map_err(|e| Failure::io(&format!("creating {}", out_dir.display()), e))?;
    let waveform_path = out_dir.join("waveform.csv");
    let mut buf = Vec::new();
    report
        .solution
        .write_csv(&mut buf)
        .map_err(|e| Failure::io("writing waveform.csv", e))?;
    fs::write(&waveform_path, buf).map_err(|e| Failure::io("writing waveform.csv", e))?;

    let json = SolveReportJson {
        config: echo.clone(),
        converged: report.converged,
        outer_iters: report.outer_iters,
        per_outer_inner_iters: report.per_outer_inner_iters.clone(),
        relative_change_history: report.relative_change_history.clone(),
        residual_norm: report.residual_norm,
        amplitude: report.amplitude,
        period_estimate: report.period_estimate,
        grid: GridJson {
            period: report.solution.grid().period(),
            num_samples: report.solution.grid().len(),
        },
        wall_clock_seconds,
    };
    write_json(&out_dir.join("report.json"), &json)
}

fn cmd_solve(args: &SolveArgs) -> Result<i32, Failure> {
    let started = Instant::now();
    let lambda = args.lambda.unwrap_or_else(|| default_lambda(args.k));
    let (period, period_mode) = resolve_solve_period(&args.period, &args.system, args.k)?;
    let grid = PeriodicGrid::new(period, args.n)
        .map_err(|e| Failure::config(format!("grid: {e}")))?;

    let system = if args.system == "vdp" {
        van_der_pol(VdpParams { k: args.k, grid })
            .map_err(|e| Failure::config(format!("system: {e}")))?
    } else {
        let path = Path::new(&args.system);
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::io(&format!("system file {}", path.display()), e))?;
        let def = sysdef::SystemDefinition::parse(&text).map_err(Failure::config)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        def.materialize(grid, base, args.seed).map_err(Failure::config)?
    };

    let init = parse_init(&args.init)?;
    let y0 = materialize_init(&init, grid)?;

    let mut cfg = OuterConfig::new(lambda);
    cfg.tol_eps1 = args.eps1;
    cfg.dr.tol_eps2 = args.eps2;
    cfg.max_outer_iters = args.max_outer;
    cfg.dr.max_inner_iters = args.max_inner;
    cfg.period_adaptation = args.adapt_period;
    cfg.validate()
        .map_err(|e| Failure::config(e.to_string()))?;

    let echo = SolveConfigEcho {
        command: "solve".into(),
        system: args.system.clone(),
        k: args.k,
        n: args.n,
        lambda,
        eps1: args.eps1,
        eps2: args.eps2,
        period,
        period_mode,
        init: args.init.clone(),
        adapt_period: args.adapt_period,
        out_dir: args.out_dir.display().to_string(),
        seed: args.seed,
        max_outer: args.max_outer,
        max_inner: args.max_inner,
    };

    match system.solve(&y0, &cfg) {
        Ok(report) => {
            write_solve_artifacts(&args.out_dir, &echo, &report, started.elapsed().as_secs_f64())?;
            println!(
                "converged in {} outer iterations: amplitude {:.4}, period estimate {:.4}, residual {:.3e}",
                report.outer_iters, report.amplitude, report.period_estimate, report.residual_norm
            );
            Ok(EXIT_OK)
        }
        Err(SolverError::NonConvergence { report }) => {
            write_solve_artifacts(&args.out_dir, &echo, &report, started.elapsed().as_secs_f64())?;
            Err(Failure {
                code: EXIT_NONCONVERGED,
                message: format!(
                    "did not converge within {} outer iterations (last change {:.3e}); artifacts written",
                    report.outer_iters,
                    report
                        .relative_change_history
                        .last()
                        .copied()
                        .unwrap_or(f64::INFINITY)
                ),
            })
        }
        Err(e) => Err(Failure {
            code: solver_exit_code(&e),
            message: e.to_string(),
        }),
    }
}

fn resolve_solve_period(
    period: &str,
    system: &str,
    k: f64,
) -> Result<(f64, String), Failure> {
    if period == "auto" {
        if system == "vdp" {
            Ok((period_guess(k), "auto".into()))
        } else {
            Err(Failure::config(
                "period: `auto` is only available for the built-in vdp system; pass --period <seconds>",
            ))
        }
    } else {
        let value: f64 = period
            .parse()
            .map_err(|_| Failure::config(format!("period: expected a number or `auto`, got `{period}`")))?;
        if !(value.is_finite() && value > 0.0) {
            return Err(Failure::config(format!("period: must be positive, got {value}")));
        }
        Ok((value, "fixed".into()))
    }
}

#[derive(Serialize, Deserialize, Clone)]
struct OracleConfigEcho {
    command: String,
    #[serde(rename = "K")]
    k: f64,
    step: f64,
    t_end: f64,
    x0: f64,
    v0: f64,
    discard: f64,
    n: usize,
    out_dir: String,
}

#[derive(Serialize, Deserialize)]
struct FeaturesJson {
    config: OracleConfigEcho,
    amplitude: f64,
    period: f64,
    wall_clock_seconds: f64,
}

fn oracle_exit_code(e: &OracleError) -> i32 {
    match e {
        OracleError::Divergence { .. } => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

fn cmd_oracle(args: &OracleArgs) -> Result<i32, Failure> {
    let started = Instant::now();
    let t_end = args
        .t_end
        .unwrap_or_else(|| 30.0 * period_guess(args.k).max(2.0 * std::f64::consts::PI));
    let run_cfg = OdeRunConfig::new(args.step, t_end, (args.x0, args.v0));
    let run = integrate_vdp(args.k, &run_cfg).map_err(|e| Failure {
        code: oracle_exit_code(&e),
        message: e.to_string(),
    })?;
    let features = extract_limit_cycle(&run, args.discard, args.n).map_err(|e| Failure {
        code: oracle_exit_code(&e),
        message: e.to_string(),
    })?;

    fs::create_dir_all(&args.out_dir)
        .map_err(|e| Failure::io(&format!("creating {}", args.out_dir.display()), e))?;
    let mut buf = Vec::new();
    features
        .waveform
        .write_csv(&mut buf)
        .map_err(|e| Failure::io("writing waveform.csv", e))?;
    fs::write(args.out_dir.join("waveform.csv"), buf)
        .map_err(|e| Failure::io("writing waveform.csv", e))?;

    let json = FeaturesJson {
        config: OracleConfigEcho {
            command: "oracle".into(),
            k: args.k,
            step: args.step,
            t_end,
            x0: args.x0,
            v0: args.v0,
            discard: args.discard,
            n: args.n,
            out_dir: args.out_dir.display().to_string(),
        },
        amplitude: features.amplitude,
        period: features.period,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    write_json(&args.out_dir.join("features.json"), &json)?;
    println!(
        "limit cycle: amplitude {:.4}, period {:.4}",
        features.amplitude, features.period
    );
    Ok(EXIT_OK)
}

#[derive(Serialize, Deserialize)]
struct MethodSummary {
    amplitude: f64,
    period: f64,
}

#[derive(Serialize, Deserialize)]
struct SolverSummary {
    amplitude: f64,
    period: f64,
    converged: bool,
    outer_iters: usize,
    residual_norm: f64,
}

#[derive(Serialize, Deserialize)]
struct ComparisonJson {
    config: SolveConfigEcho,
    solver: SolverSummary,
    oracle: MethodSummary,
    describing_function: MethodSummary,
    solver_vs_oracle_rms: f64,
    phase_shift: f64,
    solver_period_error: f64,
    df_period_error: f64,
    wall_clock_seconds: f64,
}

fn cmd_compare(args: &CompareArgs) -> Result<i32, Failure> {
    let started = Instant::now();
    let lambda = args.lambda.unwrap_or_else(|| default_lambda(args.k));

    // Oracle first: `auto` anchors the solver grid to the measured period.
    let t_end = 30.0 * period_guess(args.k).max(2.0 * std::f64::consts::PI);
    let run = integrate_vdp(args.k, &OdeRunConfig::new(args.step, t_end, (2.0, 0.0))).map_err(
        |e| Failure {
            code: oracle_exit_code(&e),
            message: e.to_string(),
        },
    )?;
    let oracle = extract_limit_cycle(&run, 0.5, args.n).map_err(|e| Failure {
        code: oracle_exit_code(&e),
        message: e.to_string(),
    })?;

    let (period, period_mode) = if args.period == "auto" {
        (oracle.period, "auto(oracle)".to_string())
    } else {
        let value: f64 = args.period.parse().map_err(|_| {
            Failure::config(format!(
                "period: expected a number or `auto`, got `{}`",
                args.period
            ))
        })?;
        (value, "fixed".to_string())
    };
    let grid = PeriodicGrid::new(period, args.n)
        .map_err(|e| Failure::config(format!("grid: {e}")))?;
    let system = van_der_pol(VdpParams { k: args.k, grid })
        .map_err(|e| Failure::config(format!("system: {e}")))?;
    let init = parse_init(&args.init)?;
    let y0 = materialize_init(&init, grid)?;

    let mut cfg = OuterConfig::new(lambda);
    cfg.tol_eps1 = args.eps1;
    cfg.dr.tol_eps2 = args.eps2;
    cfg.max_outer_iters = args.max_outer;
    cfg.dr.max_inner_iters = args.max_inner;
    cfg.validate()
        .map_err(|e| Failure::config(e.to_string()))?;

    let echo = SolveConfigEcho {
        command: "compare".into(),
        system: "vdp".into(),
        k: args.k,
        n: args.n,
        lambda,
        eps1: args.eps1,
        eps2: args.eps2,
        period,
        period_mode,
        init: args.init.clone(),
        adapt_period: false,
        out_dir: args.out_dir.display().to_string(),
        seed: args.seed,
        max_outer: args.max_outer,
        max_inner: args.max_inner,
    };

    let report = match system.solve(&y0, &cfg) {
        Ok(report) => report,
        Err(SolverError::NonConvergence { report }) => *report,
        Err(e) => {
            return Err(Failure {
                code: solver_exit_code(&e),
                message: e.to_string(),
            })
        }
    };

    let (rms, phase_shift) =
        compare_waveforms(&oracle.waveform, &report.solution).map_err(|e| Failure {
            code: EXIT_CONFIG,
            message: e.to_string(),
        })?;
    let (df_amplitude, df_frequency) = describing_function_baseline(args.k);
    let df_period = 2.0 * std::f64::consts::PI / df_frequency;

    fs::create_dir_all(&args.out_dir)
        .map_err(|e| Failure::io(&format!("creating {}", args.out_dir.display()), e))?;
    for (name, wave) in [
        ("solver_waveform.csv", &report.solution),
        ("oracle_waveform.csv", &oracle.waveform),
    ] {
        let mut buf = Vec::new();
        wave.write_csv(&mut buf)
            .map_err(|e| Failure::io(&format!("writing {name}"), e))?;
        fs::write(args.out_dir.join(name), buf)
            .map_err(|e| Failure::io(&format!("writing {name}"), e))?;
    }

    let json = ComparisonJson {
        config: echo,
        solver: SolverSummary {
            amplitude: report.amplitude,
            period: report.period_estimate,
            converged: report.converged,
            outer_iters: report.outer_iters,
            residual_norm: report.residual_norm,
        },
        oracle: MethodSummary {
            amplitude: oracle.amplitude,
            period: oracle.period,
        },
        describing_function: MethodSummary {
            amplitude: df_amplitude,
            period: df_period,
        },
        solver_vs_oracle_rms: rms,
        phase_shift,
        solver_period_error: (report.period_estimate - oracle.period).abs() / oracle.period,
        df_period_error: (df_period - oracle.period).abs() / oracle.period,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    write_json(&args.out_dir.join("comparison.json"), &json)?;

    println!(
        "solver ({:.4}, {:.4}) vs oracle ({:.4}, {:.4}) vs DF ({:.4}, {:.4}); rms {:.4}",
        json.solver.amplitude,
        json.solver.period,
        json.oracle.amplitude,
        json.oracle.period,
        json.describing_function.amplitude,
        json.describing_function.period,
        rms
    );

    if !report.converged {
        return Err(Failure {
            code: EXIT_NONCONVERGED,
            message: "solver did not converge; comparison written".into(),
        });
    }
    if rms >= COMPARE_RMS_GATE {
        return Err(Failure {
            code: EXIT_NONCONVERGED,
            message: format!("solver-vs-oracle rms {rms:.4} exceeds {COMPARE_RMS_GATE}"),
        });
    }
    Ok(EXIT_OK)
}

fn cmd_scalar(args: &ScalarArgs) -> Result<i32, Failure> {
    let dw = double_well();
    let result = scalar_mixed_solve(|x| dw.a(x), |x| dw.b(x), args.init, args.tol, args.max_iters);
    match result {
        Ok(solve) => {
            fs::create_dir_all(&args.out_dir)
                .map_err(|e| Failure::io(&format!("creating {}", args.out_dir.display()), e))?;
            let mut text = String::from("iteration,x\n");
            for (i, x) in solve.trajectory.iter().enumerate() {
                text.push_str(&format!("{i},{}\n", sig12(*x)));
            }
            fs::write(args.out_dir.join("trajectory.csv"), text)
                .map_err(|e| Failure::io("writing trajectory.csv", e))?;
            println!("x* = {:.6} after {} iterations", solve.x_star, solve.iters);
            Ok(EXIT_OK)
        }
        Err(e) => Err(Failure {
            code: solver_exit_code(&e),
            message: e.to_string(),
        }),
    }
}

//! `avme`: certify, solve and enumerate absolute value matrix equations.
//!
//! Exit codes:
//! - check: 0 some sound certificate, 2 none, 3 only INAPPLICABLE, 1 errors
//! - solve: 0 converged, 4 not converged, 5 singular hypothesis matrix, 1 errors
//! - compare: 0, or 2 when a proven implication is violated
//! - examples: 0 iff every golden check passes, else 2

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use avme_core::certify::{check_instance, Certificate, CheckOptions, Verdict};
use avme_core::harness::{compare_conditions, gen_instance, run_paper_examples_with, Distribution, GenSpec};
use avme_core::instances::mtx::format_mtx;
use avme_core::instances::{
    gavme_columns, lift_sylvester, read_bundle, reduce_ngavme, write_bundle, GaveInstance, Instance,
    InstanceFormat, InstanceKind,
};
use avme_core::solve::{
    gavme_solution_count, oracle_gave, oracle_gavme, solve_gave, solve_gavme, solve_ngavme,
    OracleReport, SolveOptions, SolveResult, ORACLE_FALLBACK_MAX_ORDER,
};
use avme_core::{Error, Matrix};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "avme", version, about = "Unique-solvability certificates and solvers for absolute value matrix equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every applicable sufficient condition.
    Check {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        caps: CheckArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Solve an instance with a right-hand side.
    Solve {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Enumerate every solution by sign patterns.
    Oracle {
        #[command(flatten)]
        input: InputArgs,
        /// Cap on the number of enumerated sign patterns per column.
        #[arg(long, default_value_t = 1 << 20, value_parser = clap::value_parser!(u64).range(1..))]
        cap_enum: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Generate a random instance bundle with a planted solution.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        /// Bundle format written to --output.
        #[arg(long)]
        format: Option<InstanceFormat>,
        /// Output file (JSON) or directory (MatrixMarket); stdout if absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Tabulate verdicts over a seeded random ensemble.
    Compare {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        caps: CheckArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the embedded golden regression suite.
    Examples {
        /// Replace the tolerance of comparisons against printed values.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Instance file (JSON) or MatrixMarket directory.
    input: PathBuf,
    /// Input format; detected from the path when absent.
    #[arg(long)]
    format: Option<InstanceFormat>,
}

#[derive(Args)]
struct OutputArgs {
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 1 << 20, value_parser = clap::value_parser!(u64).range(1..))]
    cap_enum: u64,
    #[arg(long, default_value_t = 4096, value_parser = clap::value_parser!(u64).range(1..))]
    cap_kron: u64,
    /// Margin a strict inequality must clear.
    #[arg(long, default_value_t = 0.0)]
    decision_tol: f64,
    /// Seed of the randomized invertibility probe.
    #[arg(long = "probe-seed", default_value_t = 0x5eed)]
    probe_seed: u64,
}

impl CheckArgs {
    fn options(&self) -> CheckOptions {
        CheckOptions {
            decision_tol: self.decision_tol,
            enum_cap: self.cap_enum,
            kron_cap: self.cap_kron as usize,
            probe_seed: self.probe_seed,
            ..CheckOptions::default()
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, default_value_t = 1e-10)]
    tol_residual: f64,
    #[arg(long, default_value_t = 1e-12)]
    tol_step: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value = "GAVE")]
    class: InstanceKind,
    /// Target rho(|A^-1 B|) (rho(|C A^-1 B|) for NGAVME).
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value = "uniform")]
    dist: Distribution,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GenArgs {
    fn spec(&self) -> GenSpec {
        GenSpec {
            n: self.n,
            m: self.m,
            class: self.class,
            target_rho: self.rho,
            distribution: self.dist,
            seed: self.seed,
        }
    }
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

type CmdResult = Result<u8, Failure>;

fn load(input: &InputArgs) -> Result<avme_core::instances::Bundle, Failure> {
    read_bundle(&input.input, input.format)
        .map_err(|e| Failure { code: 1, message: format!("{}: {e}", input.input.display()) })
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &out.output {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Error::from(e).into())
}

fn certificate_line(c: &Certificate) -> String {
    let mut line = format!("{:<24} {}", c.verdict.to_string(), c.condition_id);
    for (name, value) in &c.witnesses {
        if value.fract() == 0.0 && value.abs() < 1e15 {
            line.push_str(&format!(" {name}={value}"));
        } else {
            line.push_str(&format!(" {name}={value:.6}"));
        }
    }
    if let Some(m) = c.margin {
        line.push_str(&format!(" margin={m:.6}"));
    }
    if !c.notes.is_empty() {
        line.push_str(&format!(" ({})", c.notes));
    }
    if c.verdict == Verdict::UnsoundConditionHolds {
        line.push_str(&format!(
            "\n  warning: {} holds but does not imply uniqueness; it is not a certificate",
            c.condition_id
        ));
    }
    line
}

fn cmd_check(input: &InputArgs, caps: &CheckArgs, out: &OutputArgs) -> CmdResult {
    let bundle = load(input)?;
    let certs = check_instance(&bundle.instance, &caps.options());
    let code = if certs.iter().any(|c| c.condition_id.is_sound() && c.is_certified()) {
        0
    } else if certs.iter().all(|c| c.verdict == Verdict::Inapplicable) {
        3
    } else {
        2
    };
    let text = if out.json {
        to_json(&certs)?
    } else {
        let mut s = format!("{} instance of order {}\n", bundle.instance.kind().as_str(), bundle.instance.order());
        for c in &certs {
            s.push_str(&certificate_line(c));
            s.push('\n');
        }
        s.push_str(match code {
            0 => "unique solvability certified",
            3 => "no condition applicable",
            _ => "no sound condition certified",
        });
        s
    };
    emit(out, &text)?;
    Ok(code)
}

fn solve_failure(e: Error) -> Failure {
    let code = match e.root() {
        Error::SingularMatrix { .. } => 5,
        Error::NonConvergence { .. } => 4,
        _ => 1,
    };
    Failure { code, message: e.to_string() }
}

/// Uniqueness warnings from the oracle for uncertified small instances.
fn uniqueness_warnings(columns: &[GaveInstance]) -> Vec<String> {
    let mut warnings = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        if col.order() > ORACLE_FALLBACK_MAX_ORDER {
            break;
        }
        if let Ok(r) = oracle_gave(col, 1 << ORACLE_FALLBACK_MAX_ORDER) {
            if !r.solution_count.is_unique() {
                warnings.push(format!("column {}: oracle finds {}; solution is not unique", j + 1, r.census()));
            }
        }
    }
    warnings
}

fn cmd_solve(input: &InputArgs, args: &SolveArgs, out: &OutputArgs) -> CmdResult {
    let format = input.format.unwrap_or_else(|| InstanceFormat::detect(&input.input));
    let bundle = load(input)?;
    let opts = SolveOptions {
        max_iterations: args.max_iter,
        step_tolerance: args.tol_step,
        residual_tolerance: args.tol_residual,
        initial_point: None,
    };
    let (result, columns): (SolveResult, Vec<GaveInstance>) = match &bundle.instance {
        Instance::Gave(g) => (solve_gave(g, &opts).map_err(solve_failure)?, vec![g.clone()]),
        Instance::Gavme(g) => (solve_gavme(g, &opts).map_err(solve_failure)?, gavme_columns(g)?),
        Instance::Ngavme(g) => {
            let r = solve_ngavme(g, &opts).map_err(solve_failure)?;
            (r, gavme_columns(&reduce_ngavme(g)?.0)?)
        }
        Instance::Sylvester(_) => {
            return Err(Error::Unsupported("solving the Sylvester-like equation; use `oracle` for small orders".into()).into())
        }
    };
    let warnings = if result.certificate_used.is_none() { uniqueness_warnings(&columns) } else { Vec::new() };

    let diagnostics = format!(
        "converged={} iterations={} residual={:e} certificate={}",
        result.converged,
        result.iterations,
        result.final_residual,
        result.certificate_used.map_or("none".to_string(), |c| c.to_string())
    );
    if out.json {
        let value = serde_json::json!({
            "solution": result.solution,
            "iterations": result.iterations,
            "final_residual": result.final_residual,
            "converged": result.converged,
            "certificate_used": result.certificate_used,
            "warnings": warnings,
        });
        emit(out, &to_json(&value)?)?;
    } else {
        match (&out.output, format) {
            (Some(path), InstanceFormat::MatrixMarket) => {
                fs::create_dir_all(path)?;
                fs::write(path.join("X.mtx"), format_mtx(&result.solution))?;
            }
            (Some(path), InstanceFormat::Json) => fs::write(path, to_json(&result.solution)?)?,
            (None, _) => emit(out, &format!("{}", result.solution))?,
        }
        eprintln!("{diagnostics}");
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    Ok(if result.converged { 0 } else { 4 })
}

fn map_back(report: &mut OracleReport, c_inv: &Matrix) {
    for x in &mut report.solutions {
        *x = c_inv.mul_vec(x);
    }
}

fn cmd_oracle(input: &InputArgs, cap: u64, out: &OutputArgs) -> CmdResult {
    let bundle = load(input)?;
    let reports = match &bundle.instance {
        Instance::Gave(g) => vec![oracle_gave(g, cap)?],
        Instance::Gavme(g) => oracle_gavme(g, cap)?,
        Instance::Ngavme(g) => {
            let (reduced, back) = reduce_ngavme(g)?;
            let mut reports = oracle_gavme(&reduced, cap)?;
            reports.iter_mut().for_each(|r| map_back(r, back.c_inverse()));
            reports
        }
        Instance::Sylvester(s) => vec![oracle_gave(&lift_sylvester(s, CheckOptions::default().kron_cap)?, cap)?],
    };
    let text = if out.json {
        let value = serde_json::json!({
            "columns": reports,
            "solution_count": gavme_solution_count(&reports),
        });
        to_json(&value)?
    } else if reports.len() == 1 {
        reports[0].census()
    } else {
        let mut s = String::new();
        for (j, r) in reports.iter().enumerate() {
            s.push_str(&format!("column {}: {}\n", j + 1, r.census()));
        }
        s.push_str(&format!("total: {}", gavme_solution_count(&reports)));
        s
    };
    emit(out, &text)?;
    Ok(0)
}

fn cmd_gen(gen: &GenArgs, format: Option<InstanceFormat>, output: Option<&Path>) -> CmdResult {
    let bundle = gen_instance(&gen.spec())?;
    match output {
        Some(path) => write_bundle(path, &bundle, format.unwrap_or(InstanceFormat::Json))?,
        None => {
            if format == Some(InstanceFormat::MatrixMarket) {
                return Err(Error::InvalidOptions("MatrixMarket output needs --output DIR".into()).into());
            }
            println!("{}", bundle.to_json_string());
        }
    }
    Ok(0)
}

fn cmd_compare(gen: &GenArgs, trials: usize, caps: &CheckArgs, out: &OutputArgs) -> CmdResult {
    let table = compare_conditions(&gen.spec(), trials, &caps.options())?;
    emit(out, &if out.json { table.to_json()? } else { table.to_text() })?;
    Ok(if table.total_violations() == 0 { 0 } else { 2 })
}

fn cmd_examples(tol: Option<f64>, out: &OutputArgs) -> CmdResult {
    let report = run_paper_examples_with(tol);
    emit(out, &if out.json { report.to_json()? } else { report.to_text() })?;
    Ok(if report.all_passed() { 0 } else { 2 })
}

fn run(cli: Cli) -> CmdResult {
    match &cli.command {
        Command::Check { input, caps, out } => cmd_check(input, caps, out),
        Command::Solve { input, solve, out } => cmd_solve(input, solve, out),
        Command::Oracle { input, cap_enum, out } => cmd_oracle(input, *cap_enum, out),
        Command::Gen { gen, format, output } => cmd_gen(gen, *format, output.as_deref()),
        Command::Compare { gen, trials, caps, out } => cmd_compare(gen, *trials, caps, out),
        Command::Examples { tol, out } => cmd_examples(*tol, out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}


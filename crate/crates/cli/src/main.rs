use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use curvspec::shooting::integrate_ivp;
use curvspec::spectrum::{
    solve_nodal, spectrum_interval, trace_branch_with, NodalClass, Settings, Sign,
};
use curvspec::timemap::compute_b;
use curvspec::validate::{b_closed_form, run, ValidateOptions};
use curvspec::Error;
use curvspec_cli::artifact::{Format, Table};

const NO_SOLUTION: &str = "no solution: lambda outside spectral interval";

#[derive(Parser)]
#[command(name = "curvspec", version, about = "Nodal eigenvalue problems for the 1-D curvature operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print B, 8B² and π².
    Constants {
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Print the interval of λ admitting n-hump solutions.
    Interval {
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Solve for the profile at a given λ.
    Solve {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Trace the solution branch over a grid of amplitudes.
    Branch {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        xi_min: f64,
        #[arg(long)]
        xi_max: f64,
        #[arg(long, default_value_t = 45)]
        xi_count: usize,
        #[command(flatten)]
        output: Output,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Run the numerical validation suite and print a JSON report.
    Validate {
        /// Run the quick subset only.
        #[arg(long)]
        fast: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Offset added to B (negative control for the suite).
        #[arg(long, hide = true, default_value_t = 0.0, allow_negative_numbers = true)]
        perturb_b: f64,
    },
}

#[derive(Args)]
struct Problem {
    #[arg(long, allow_negative_numbers = true)]
    kappa: f64,
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    nu: Sign,
}

#[derive(Args)]
struct Output {
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to the extension of `--out`, then CSV.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct Tolerances {
    #[arg(long, default_value_t = 1e-12)]
    quad_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    root_tol: f64,
    #[arg(long, default_value_t = 1e-11)]
    step_tol: f64,
}

impl Tolerances {
    fn settings(&self) -> Result<Settings, Error> {
        for (name, v) in [
            ("quad-tol", self.quad_tol),
            ("root-tol", self.root_tol),
            ("step-tol", self.step_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("--{name} must be positive")));
            }
        }
        Ok(Settings {
            quad_tol: self.quad_tol,
            root_tol: self.root_tol,
            step_tol: self.step_tol,
            ..Settings::default()
        })
    }
}

enum Failure {
    Numerical(String),
    NoSolution,
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoSolution { .. } => Failure::NoSolution,
            other => Failure::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numerical(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("CURVSPEC_THREADS").ok().and_then(|s| s.parse().ok()) {
        curvspec::par::configure_threads(threads);
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::NoSolution) => {
            eprintln!("{NO_SOLUTION}");
            ExitCode::from(2)
        }
        Err(Failure::Validation) => ExitCode::from(3),
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Constants { format } => constants(format),
        Command::Interval { kappa, n, format } => interval(kappa, n, format),
        Command::Solve {
            problem,
            lambda,
            output,
            tol,
        } => solve(&problem, lambda, &output, &tol),
        Command::Branch {
            problem,
            xi_min,
            xi_max,
            xi_count,
            output,
            tol,
        } => branch(&problem, (xi_min, xi_max, xi_count), &output, &tol),
        Command::Validate {
            fast,
            out,
            perturb_b,
        } => validate(fast, out.as_deref(), perturb_b),
    }
}

fn constants(format: Format) -> Result<(), Failure> {
    let b = compute_b()?;
    let b_err = (b - b_closed_form()).abs();
    let rows = [
        ("B", b, b_err),
        ("8B^2", 8.0 * b * b, 16.0 * b * b_err),
        ("pi^2", PI * PI, 0.0),
    ];
    match format {
        Format::Csv => {
            for (name, value, err) in rows {
                println!("{name:<5} = {value:.16e}  (error estimate {err:.1e})");
            }
        }
        Format::Json => {
            let obj: Map<String, Value> = rows
                .iter()
                .map(|&(name, value, err)| (name.to_string(), json!({"value": value, "error": err})))
                .collect();
            println!("{}", serde_json::to_string_pretty(&obj).unwrap());
        }
    }
    Ok(())
}

fn interval(kappa: f64, n: u32, format: Format) -> Result<(), Failure> {
    let iv = spectrum_interval(kappa, n)?;
    match format {
        Format::Csv => println!("({:.16e}, {:.16e})", iv.lower, iv.upper),
        Format::Json => println!(
            "{}",
            json!({"kappa": kappa, "n": n, "lower": iv.lower, "upper": if iv.upper.is_finite() { json!(iv.upper) } else { json!("inf") }})
        ),
    }
    Ok(())
}

fn meta(problem: &Problem, settings: &Settings) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("kappa".into(), json!(problem.kappa));
    m.insert("n".into(), json!(problem.n));
    m.insert("nu".into(), json!(problem.nu.to_string()));
    m.insert("quad_tol".into(), json!(settings.quad_tol));
    m.insert("root_tol".into(), json!(settings.root_tol));
    m.insert("step_tol".into(), json!(settings.step_tol));
    m
}

fn solve(problem: &Problem, lambda: f64, output: &Output, tol: &Tolerances) -> Result<(), Failure> {
    let settings = tol.settings()?;
    let class = NodalClass::new(problem.n, problem.nu)?;
    let sol = solve_nodal(problem.kappa, lambda, class, &settings)?;
    let traj = integrate_ivp(problem.kappa, lambda, sol.boundary_slope, 1.0, settings.step_tol)?;

    let mut m = meta(problem, &settings);
    m.insert("lambda".into(), json!(lambda));
    m.insert("xi".into(), json!(sol.sup_norm));
    m.insert("b".into(), json!(sol.boundary_slope));
    m.insert("residual_J".into(), json!(sol.residual));
    m.insert("residual_shoot".into(), json!(traj.end().u.abs()));
    let mut table = Table::new(m, &["x", "u"]);
    table.rows = sol.grid.iter().map(|p| vec![p.x, p.u]).collect();
    emit(&table, output)
}

fn branch(
    problem: &Problem,
    (xi_min, xi_max, count): (f64, f64, usize),
    output: &Output,
    tol: &Tolerances,
) -> Result<(), Failure> {
    if count < 2 || !(xi_min > 0.0 && xi_max > xi_min) {
        return Err(Failure::Numerical(
            "need 0 < xi-min < xi-max and xi-count >= 2".into(),
        ));
    }
    let settings = tol.settings()?;
    let class = NodalClass::new(problem.n, problem.nu)?;
    let grid: Vec<f64> = (0..count)
        .map(|k| xi_min + (xi_max - xi_min) * k as f64 / (count - 1) as f64)
        .collect();
    let br = trace_branch_with(problem.kappa, class, &grid, &settings)?;
    for s in &br.skipped {
        eprintln!("skipped xi = {}: {}", s.xi, s.reason);
    }
    if 2 * br.skipped.len() > count {
        return Err(Failure::Numerical(format!(
            "{} of {count} branch points failed",
            br.skipped.len()
        )));
    }

    let mut m = meta(problem, &settings);
    m.insert("skipped".into(), json!(br.skipped.len()));
    let mut table = Table::new(
        m,
        &["xi", "lambda", "b", "sup_norm", "residual_J", "residual_shoot"],
    );
    let nu = problem.nu.value();
    table.rows = br
        .points
        .iter()
        .map(|p| vec![p.xi, p.lambda, nu * p.b, p.sup_norm, p.residual_j, p.residual_shoot])
        .collect();
    emit(&table, output)
}

fn emit(table: &Table, output: &Output) -> Result<(), Failure> {
    let format = output
        .format
        .or_else(|| output.out.as_deref().and_then(Format::from_path))
        .unwrap_or_default();
    let text = table.render(format);
    match &output.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn validate(fast: bool, out: Option<&Path>, b_offset: f64) -> Result<(), Failure> {
    let report = run(&ValidateOptions {
        fast,
        b_offset,
        ..ValidateOptions::default()
    });
    for c in &report.checks {
        eprintln!(
            "{} {:>2} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.detail
        );
    }
    let text = serde_json::to_string_pretty(&report).unwrap();
    match out {
        Some(path) => fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

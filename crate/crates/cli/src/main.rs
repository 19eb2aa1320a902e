//! `lpgauss`: Gaussian surface measures, L_p-Gaussian Minkowski solvers and
//! the inequality checks from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 solver non-convergence.

mod generate;
mod plot;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lpgauss_core::discrete::{solve_constrained, VariationalProblem};
use lpgauss_core::gauss::{gauss_constants, gauss_volume, lp_gauss_surface_polygon, DEFAULT_RESOLUTION};
use lpgauss_core::io::{self as lpio, kv, MAX_RESOLUTION};
use lpgauss_core::smooth::{cos_density, default_c0, solve_homotopy, HomotopyOptions, MIN_RESOLUTION};
use lpgauss_core::verify::{format_table, rerun_witness, run_suite, CheckResult};
use lpgauss_core::Error;

#[derive(Parser)]
#[command(name = "lpgauss", version, about = "L_p-Gaussian Minkowski problem toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print r_half, a_half and the mass bound.
    Constants {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// L_p-Gaussian surface measure and Gaussian volume of a body file.
    Measure {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        /// Write the edge measure file here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve the discrete problem for a measure file.
    SolveDiscrete {
        #[arg(long)]
        input: PathBuf,
        /// Overrides the exponent stored in the measure file.
        #[arg(long)]
        p: Option<f64>,
        /// Stationarity tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve the smooth equation for a density file or a built-in family.
    SolveSmooth {
        #[arg(long, conflicts_with = "family")]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        family: Option<Family>,
        #[arg(long, default_value_t = 0.2)]
        amplitude: f64,
        #[arg(long, default_value_t = 2)]
        frequency: u32,
        /// Overrides the exponent stored in the density file.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
        /// Radius of the starting constant solution.
        #[arg(long)]
        start_radius: Option<f64>,
        /// Newton residual target.
        #[arg(long)]
        tol: Option<f64>,
        /// Solve even when the total mass reaches the admissible bound.
        #[arg(long)]
        allow_large_mass: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the randomized check suite, or rerun one witness.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instances per check.
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Re-judge every check against this tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Witness JSON (from a previous `--output`) to recompute.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Write the full results, witnesses included, as JSON.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Render a body or field file as SVG.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a built-in test measure or density.
    Generate {
        #[arg(value_enum)]
        name: generate::Case,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of atoms (pairs for random-even).
        #[arg(long, default_value_t = 8)]
        m: usize,
        /// Mass per atom.
        #[arg(long, default_value_t = 0.3)]
        mass: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
        #[arg(long, default_value_t = 0.2)]
        amplitude: f64,
        #[arg(long, default_value_t = 2)]
        frequency: u32,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Cos,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence(_)
            | Error::LineSearchStalled(_)
            | Error::SingularJacobian { .. }
            | Error::CertificateLost(_)
            | Error::RootFinding(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

/// Writes to `path`, or stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| invalid(format!("cannot write {}: {e}", p.display()))),
        None => {
            out(text);
            if !text.ends_with('\n') {
                out("\n");
            }
            Ok(())
        }
    }
}

/// Stdout write that treats a closed pipe as the end of output.
fn out(text: &str) {
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: cannot write to stdout: {e}");
        }
    }
}

fn check_resolution(n: usize) -> Result<(), Failure> {
    if !(MIN_RESOLUTION..=MAX_RESOLUTION).contains(&n) {
        return Err(invalid(format!(
            "resolution {n} outside [{MIN_RESOLUTION}, {MAX_RESOLUTION}]"
        )));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<(), Failure> {
    if !p.is_finite() {
        return Err(invalid(format!("exponent {p} is not finite")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Constants { n, p } => {
            check_p(p)?;
            out(&gauss_constants(n, p)?.report());
            Ok(0)
        }
        Command::Measure {
            input,
            p,
            resolution,
            output,
        } => {
            check_p(p)?;
            check_resolution(resolution)?;
            let body = lpio::parse_body(&read(&input)?)?;
            let em = lp_gauss_surface_polygon(&body, p)?;
            let mut lines = vec![
                kv("p", p),
                kv("gauss_volume", gauss_volume(&body, resolution)),
                kv("total", em.total()),
            ];
            for (i, e) in em.edges.iter().enumerate() {
                lines.push(format!(
                    "edge[{i}] normal=({},{}) mass={}",
                    lpgauss_core::fmt::sig9(e.normal.x),
                    lpgauss_core::fmt::sig9(e.normal.y),
                    lpgauss_core::fmt::sig9(e.mass)
                ));
            }
            out(&(lines.join("\n") + "\n"));
            if let Some(path) = output {
                emit(Some(&path), &lpio::edge_measure_to_json(&em))?;
            }
            Ok(0)
        }
        Command::SolveDiscrete { input, p, tol, output } => {
            let (mu, file_p) = lpio::parse_measure(&read(&input)?)?;
            let p = p.or(file_p).unwrap_or(1.0);
            check_p(p)?;
            let mut prob = VariationalProblem::new(mu, p)?;
            if let Some(t) = tol {
                if !(t > 0.0) {
                    return Err(invalid(format!("tolerance {t} must be positive")));
                }
                prob.stationarity_tol = t;
            }
            let report = solve_constrained(&prob)?;
            emit(output.as_deref(), &lpio::report_to_json(&report))?;
            Ok(0)
        }
        Command::SolveSmooth {
            input,
            family,
            amplitude,
            frequency,
            p,
            resolution,
            start_radius,
            tol,
            allow_large_mass,
            output,
        } => {
            let (f, p) = match (input, family) {
                (Some(path), None) => {
                    let grid = lpio::parse_density(&read(&path)?)?;
                    (grid.values, p.or(grid.p).unwrap_or(1.0))
                }
                (None, Some(Family::Cos)) => {
                    let p = p.unwrap_or(1.0);
                    check_p(p)?;
                    check_resolution(resolution)?;
                    (cos_density(resolution, default_c0(p)?, amplitude, frequency), p)
                }
                _ => return Err(invalid("give exactly one of --input or --family")),
            };
            check_p(p)?;
            check_resolution(f.len())?;
            let mut opts = HomotopyOptions::with_resolution(f.len());
            opts.start_radius = start_radius;
            opts.enforce_mass_bound = !allow_large_mass;
            if let Some(t) = tol {
                opts.newton_tol = t;
            }
            let report = solve_homotopy(&f, p, &opts)?;
            emit(output.as_deref(), &lpio::report_to_json(&report))?;
            Ok(0)
        }
        Command::Verify {
            seed,
            n,
            tol,
            input,
            output,
        } => {
            let mut results: Vec<CheckResult> = match input {
                Some(path) => {
                    let text = read(&path)?;
                    let value: serde_json::Value =
                        serde_json::from_str(&text).map_err(|e| invalid(format!("witness: {e}")))?;
                    // a single result, a list of results or a bare witness
                    let witnesses: Vec<serde_json::Value> = match value {
                        serde_json::Value::Array(items) => items,
                        other => vec![other],
                    };
                    witnesses
                        .iter()
                        .map(|w| {
                            let mut r = rerun_witness(w.get("witness").unwrap_or(w))?;
                            if let Some(name) = w.get("name").and_then(|n| n.as_str()) {
                                r.name = name.to_string();
                            }
                            Ok::<_, Error>(r)
                        })
                        .collect::<Result<_, _>>()?
                }
                None => run_suite(seed, n)?,
            };
            if let Some(t) = tol {
                results = results.iter().map(|r| r.with_tolerance(t)).collect();
            }
            out(&format_table(&results));
            if let Some(path) = output {
                let text = serde_json::to_string_pretty(&results).expect("results serialize");
                emit(Some(&path), &text)?;
            }
            Ok(if results.iter().all(|r| r.passed) { 0 } else { 1 })
        }
        Command::Plot { input, output } => {
            let svg = plot::render(&read(&input)?)?;
            emit(output.as_deref(), &svg)?;
            Ok(0)
        }
        Command::Generate {
            name,
            seed,
            m,
            mass,
            p,
            resolution,
            amplitude,
            frequency,
            output,
        } => {
            check_p(p)?;
            let params = generate::Params {
                seed,
                m,
                mass,
                p,
                resolution,
                amplitude,
                frequency,
            };
            if matches!(name, generate::Case::CosDensity) {
                check_resolution(resolution)?;
            }
            let text = generate::generate(name, &params)?;
            emit(output.as_deref(), &text)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

//! Command-line front end: evaluate measures and bounds on state files, run
//! family sweeps, run the decomposition search, verify the two-level-ansatz
//! closed forms, and locate the concurrence crossover dimension.
//!
//! Exit codes: 0 success, 2 I/O or schema problems, 3 domain/validation
//! problems, 4 roof-search non-convergence (the best value is still
//! printed).

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::convex_roof::{roof_upper_bound, RoofConfig};
use crate::error::{Error, Result};
use crate::measures::{
    concurrence_crossover_dimension, isotropic_alpha, isotropic_concurrence, lower_bound_alpha,
    werner_alpha, werner_concurrence, werner_eof, Alpha,
};
use crate::states::{isotropic, load_state, schmidt, werner, State};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NO_CONVERGENCE: i32 = 4;

#[derive(Parser)]
#[command(
    name = "aconc",
    version,
    about = "Alpha-concurrence entanglement measures, bounds and family sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Isotropic,
    Werner,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// Exact family alpha-concurrence (one column per alpha).
    Alpha,
    /// Family concurrence.
    Concurrence,
    /// Entanglement of formation (Werner only).
    Eof,
    /// PPT/realignment lower bound (one column per alpha).
    #[value(name = "lower_bound", alias = "lower-bound")]
    LowerBound,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a state file: exact value for pure states, bounds for mixed.
    Measure {
        /// JSON state file.
        state: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Also run the decomposition search on mixed states.
        #[arg(long)]
        roof: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Tabulate family measures over a parameter grid as CSV.
    Sweep {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0.0)]
        start: f64,
        #[arg(long, default_value_t = 1.0)]
        end: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Comma-separated alpha values.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.5])]
        alphas: Vec<f64>,
        /// Comma-separated quantities to tabulate.
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![Quantity::Alpha, Quantity::Concurrence])]
        include: Vec<Quantity>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Upper bound from the decomposition search, next to the lower bound.
    Roof {
        state: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Members per decomposition (defaults to min(rank^2, rank + 4)).
        #[arg(long)]
        ensemble_size: Option<usize>,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare the brute-force ansatz minimum against the closed form.
    Eta {
        /// Local dimension (isotropic family; requires --fidelity).
        #[arg(long)]
        d: Option<usize>,
        /// Isotropic fidelity F.
        #[arg(long)]
        fidelity: Option<f64>,
        /// Werner weight W (mutually exclusive with --d/--fidelity).
        #[arg(long)]
        werner: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Locate where the 1/2-concurrence overtakes the concurrence on
    /// isotropic states.
    Crossover {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// Parses the process arguments and runs; returns the exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    dispatch(cli.command)
}

fn dispatch(command: Command) -> i32 {
    match execute(command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Parse(_) | Error::Schema(_) => EXIT_IO,
        _ => EXIT_DOMAIN,
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Ten fractional digits for human-readable reports.
fn ftext(x: f64) -> String {
    format!("{x:.10}")
}

/// Seventeen significant digits for CSV, enough to round-trip a double.
fn fcsv(x: f64) -> String {
    format!("{x:.16e}")
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Measure {
            state,
            alpha,
            roof,
            seed,
            restarts,
            out,
            format,
        } => {
            let alpha = Alpha::new(alpha)?;
            let loaded = load_state(&state)?;
            let mut text = String::new();
            let mut exit = EXIT_OK;
            match &loaded {
                State::Pure(psi) => {
                    let lambda = schmidt(psi, None)?;
                    let value = crate::measures::alpha_concurrence_schmidt(&lambda, alpha);
                    match format {
                        Format::Text => {
                            let _ = writeln!(text, "kind: pure");
                            let _ = writeln!(text, "dims: {}x{}", psi.dim_a(), psi.dim_b());
                            let _ = writeln!(text, "alpha: {}", alpha.value());
                            let _ = writeln!(
                                text,
                                "schmidt: {}",
                                lambda
                                    .lambdas()
                                    .iter()
                                    .map(|&l| ftext(l))
                                    .collect::<Vec<_>>()
                                    .join(" ")
                            );
                            let _ = writeln!(text, "alpha_concurrence: {}", ftext(value));
                        }
                        Format::Csv => {
                            let _ = writeln!(text, "alpha,alpha_concurrence,schmidt_rank");
                            let _ = writeln!(
                                text,
                                "{},{},{}",
                                fcsv(alpha.value()),
                                fcsv(value),
                                lambda.rank()
                            );
                        }
                    }
                }
                State::Mixed(rho) => {
                    let report = lower_bound_alpha(rho, alpha)?;
                    let roof_result = if roof {
                        let config = RoofConfig {
                            restarts,
                            seed,
                            ..Default::default()
                        };
                        Some(roof_upper_bound(rho, alpha, &config)?)
                    } else {
                        None
                    };
                    if let Some(r) = &roof_result {
                        if !r.converged {
                            exit = EXIT_NO_CONVERGENCE;
                        }
                    }
                    match format {
                        Format::Text => {
                            let _ = writeln!(text, "kind: mixed");
                            let _ = writeln!(text, "dims: {}x{}", rho.dim_a(), rho.dim_b());
                            let _ = writeln!(text, "alpha: {}", alpha.value());
                            let _ = writeln!(text, "ppt_norm: {}", ftext(report.ppt_norm));
                            let _ = writeln!(text, "realign_norm: {}", ftext(report.realign_norm));
                            let _ = writeln!(text, "branch: {}", report.branch);
                            let _ = writeln!(text, "lower_bound: {}", ftext(report.lower_bound));
                            if let Some(r) = &roof_result {
                                let _ =
                                    writeln!(text, "roof_upper_bound: {}", ftext(r.value));
                                let _ = writeln!(text, "roof_converged: {}", r.converged);
                            }
                        }
                        Format::Csv => {
                            let mut header =
                                "alpha,ppt_norm,realign_norm,branch,lower_bound".to_string();
                            let mut row = format!(
                                "{},{},{},{},{}",
                                fcsv(alpha.value()),
                                fcsv(report.ppt_norm),
                                fcsv(report.realign_norm),
                                report.branch,
                                fcsv(report.lower_bound)
                            );
                            if let Some(r) = &roof_result {
                                header.push_str(",roof_upper_bound");
                                row.push(',');
                                row.push_str(&fcsv(r.value));
                            }
                            let _ = writeln!(text, "{header}");
                            let _ = writeln!(text, "{row}");
                        }
                    }
                }
            }
            emit(&out, &text)?;
            Ok(exit)
        }
        Command::Sweep {
            family,
            d,
            start,
            end,
            steps,
            alphas,
            include,
            out,
        } => {
            let text = run_sweep(family, d, start, end, steps, &alphas, &include)?;
            emit(&out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Roof {
            state,
            alpha,
            seed,
            restarts,
            ensemble_size,
            max_iters,
            out,
            format,
        } => {
            let alpha = Alpha::new(alpha)?;
            let rho = load_state(&state)?.to_density();
            let config = RoofConfig {
                ensemble_size,
                restarts,
                max_iters,
                seed,
                ..Default::default()
            };
            let roof = roof_upper_bound(&rho, alpha, &config)?;
            let lower = lower_bound_alpha(&rho, alpha)?.lower_bound;
            let gap = roof.value - lower;
            let mut text = String::new();
            match format {
                Format::Text => {
                    let _ = writeln!(text, "alpha: {}", alpha.value());
                    let _ = writeln!(text, "roof_upper_bound: {}", ftext(roof.value));
                    let _ = writeln!(text, "lower_bound: {}", ftext(lower));
                    let _ = writeln!(text, "gap: {}", ftext(gap));
                    let _ = writeln!(text, "converged: {}", roof.converged);
                    let _ = writeln!(text, "members: {}", roof.best.len());
                }
                Format::Csv => {
                    let _ = writeln!(text, "alpha,roof_upper_bound,lower_bound,gap,converged");
                    let _ = writeln!(
                        text,
                        "{},{},{},{},{}",
                        fcsv(alpha.value()),
                        fcsv(roof.value),
                        fcsv(lower),
                        fcsv(gap),
                        roof.converged
                    );
                }
            }
            emit(&out, &text)?;
            Ok(if roof.converged {
                EXIT_OK
            } else {
                EXIT_NO_CONVERGENCE
            })
        }
        Command::Eta {
            d,
            fidelity,
            werner,
            alpha,
            out,
            format,
        } => {
            let alpha = Alpha::new(alpha)?;
            let (family, dim, param, report, closed) = match (d, fidelity, werner) {
                (Some(d), Some(f), None) => (
                    "isotropic",
                    d,
                    f,
                    crate::eta::eta_isotropic_bruteforce(d, f, alpha)?,
                    crate::eta::eta_isotropic_closed(d, f, alpha)?,
                ),
                (None, None, Some(w)) => (
                    "werner",
                    2,
                    w,
                    crate::eta::eta_werner_bruteforce(w, alpha)?,
                    crate::eta::eta_werner_closed(w, alpha)?,
                ),
                _ => {
                    return Err(Error::domain(
                        "pass either --d with --fidelity, or --werner",
                    ))
                }
            };
            let mut text = String::new();
            match format {
                Format::Text => {
                    let _ = writeln!(text, "family: {family}");
                    let _ = writeln!(text, "d: {dim}");
                    let _ = writeln!(text, "param: {param}");
                    let _ = writeln!(text, "alpha: {}", alpha.value());
                    let _ = writeln!(text, "bruteforce: {}", ftext(report.value));
                    let _ = writeln!(text, "closed_form: {}", ftext(closed));
                    let _ = writeln!(text, "difference: {}", ftext(report.value - closed));
                    if let Some(best) = &report.grid_min {
                        let _ = writeln!(
                            text,
                            "grid_min: {} at n={} m={}",
                            ftext(best.value),
                            best.n,
                            best.m
                        );
                    }
                }
                Format::Csv => {
                    let _ = writeln!(
                        text,
                        "family,d,param,alpha,bruteforce,closed_form,difference"
                    );
                    let _ = writeln!(
                        text,
                        "{family},{dim},{},{},{},{},{}",
                        fcsv(param),
                        fcsv(alpha.value()),
                        fcsv(report.value),
                        fcsv(closed),
                        fcsv(report.value - closed)
                    );
                }
            }
            emit(&out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Crossover { out, format } => {
            let d = concurrence_crossover_dimension();
            let text = match format {
                Format::Text => format!("crossover_dimension: {}\n", ftext(d)),
                Format::Csv => format!("crossover_dimension\n{}\n", fcsv(d)),
            };
            emit(&out, &text)?;
            Ok(EXIT_OK)
        }
    }
}

/// Builds the sweep CSV: `param` first, then one column per requested
/// quantity (per alpha where the quantity depends on it), rows on the
/// uniform grid. Output is byte-deterministic for a fixed invocation.
fn run_sweep(
    family: Family,
    d: usize,
    start: f64,
    end: f64,
    steps: usize,
    alphas: &[f64],
    include: &[Quantity],
) -> Result<String> {
    if steps < 2 {
        return Err(Error::domain("a sweep needs at least 2 steps"));
    }
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&end) || end < start {
        return Err(Error::domain(
            "the sweep range must satisfy 0 <= start <= end <= 1",
        ));
    }
    if include.is_empty() {
        return Err(Error::domain("nothing to tabulate: empty include set"));
    }
    if include.contains(&Quantity::Eof) && family != Family::Werner {
        return Err(Error::domain(
            "entanglement of formation is only tabulated for the Werner family",
        ));
    }
    let alphas: Vec<Alpha> = alphas
        .iter()
        .map(|&a| Alpha::new(a))
        .collect::<Result<_>>()?;
    if alphas.is_empty() {
        return Err(Error::domain("at least one alpha is required"));
    }
    let param_name = match family {
        Family::Isotropic => "F",
        Family::Werner => "W",
    };
    let mut header = vec![param_name.to_string()];
    for q in include {
        match q {
            Quantity::Alpha => {
                for a in &alphas {
                    header.push(format!("alpha_{}", a.value()));
                }
            }
            Quantity::LowerBound => {
                for a in &alphas {
                    header.push(format!("lower_bound_{}", a.value()));
                }
            }
            Quantity::Concurrence => header.push("concurrence".to_string()),
            Quantity::Eof => header.push("eof".to_string()),
        }
    }
    let mut text = header.join(",");
    text.push('\n');
    for k in 0..steps {
        let param = start + (end - start) * k as f64 / (steps - 1) as f64;
        let mut row = vec![fcsv(param)];
        // The lower bound needs the actual state; build it once per row.
        let state = if include.contains(&Quantity::LowerBound) {
            Some(match family {
                Family::Isotropic => isotropic(d, param)?,
                Family::Werner => werner(d, param)?,
            })
        } else {
            None
        };
        for q in include {
            match q {
                Quantity::Alpha => {
                    for a in &alphas {
                        let v = match family {
                            Family::Isotropic => isotropic_alpha(d, param, *a)?,
                            Family::Werner => werner_alpha(param, *a)?,
                        };
                        row.push(fcsv(v));
                    }
                }
                Quantity::LowerBound => {
                    let rho = state.as_ref().expect("state built above");
                    for a in &alphas {
                        row.push(fcsv(lower_bound_alpha(rho, *a)?.lower_bound));
                    }
                }
                Quantity::Concurrence => {
                    let v = match family {
                        Family::Isotropic => isotropic_concurrence(d, param)?,
                        Family::Werner => werner_concurrence(param)?,
                    };
                    row.push(fcsv(v));
                }
                Quantity::Eof => row.push(fcsv(werner_eof(param)?)),
            }
        }
        text.push_str(&row.join(","));
        text.push('\n');
    }
    Ok(text)
}

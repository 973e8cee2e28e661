use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use treefactor::fixtures;
use treefactor::formats;
use treefactor::surface::MAX_DEPTH;
use treefactor::{
    build_quotient_tree, horizontal_lift, lifting_identity_residuals, property_t_check,
    surface_integral_first_order, surface_integral_second_order, winding_field, winding_moments,
    young_integral, Error, SampledFunction, TestIntegrand, Verdict,
};

#[derive(Parser)]
#[command(name = "treefactor", version, about = "Tree factorization diagnostics for Hölder maps")]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    #[arg(long)]
    input: PathBuf,
    /// Report path; stdout if omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Young integral of x1 against x2 along a curve CSV.
    Young {
        #[command(flatten)]
        io: Io,
    },
    /// Winding field and moments of a closed planar curve CSV.
    Winding {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 0.01)]
        cell: f64,
        /// Also write the `row,col,defined,value` grid here.
        #[arg(long)]
        grid: Option<PathBuf>,
    },
    /// Dyadic surface integral of a square field CSV.
    Surface {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
        order: u8,
        #[arg(long = "f", default_value = "gauss")]
        integrand: String,
        #[arg(long, default_value_t = 1e-9)]
        rtol: f64,
        /// Subsample the field to this depth first.
        #[arg(long)]
        level: Option<usize>,
    },
    /// Quotient tree of a graph JSON.
    Tree {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
    },
    /// Lifting identity residuals of a curve CSV (planar curves are lifted first).
    Heis {
        #[command(flatten)]
        io: Io,
    },
    /// Property (T) certificate of a planar graph JSON.
    CheckT {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 0.01)]
        cell: f64,
        #[arg(long, default_value_t = 1e-9)]
        rtol: f64,
        /// JSON list of closed vertex-id paths; defaults to a fundamental cycle basis.
        #[arg(long)]
        cycles: Option<PathBuf>,
    },
    /// Writes a fixture file.
    Gen {
        name: Fixture,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0.6)]
        alpha: f64,
        /// Depth N of generated square fields.
        #[arg(long, default_value_t = 10)]
        level: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Segments per loop, leaves of a star, or vertices of a cycle.
        #[arg(long)]
        samples: Option<usize>,
        /// Run both figure-eight lobes counter-clockwise.
        #[arg(long)]
        co_oriented: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    Circle,
    FigureEight,
    Weierstrass,
    Star,
    Cycle,
    LiftedCircle,
}

enum Outcome {
    Success,
    Negative,
}

fn invalid(msg: String) -> Error {
    Error::InvalidInput(msg)
}

fn check_cell(cell: f64) -> Result<(), Error> {
    if cell > 0.0 && cell.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("--cell must be positive, got {cell}")))
    }
}

fn check_rtol(rtol: f64) -> Result<(), Error> {
    if rtol >= 0.0 && rtol.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("--rtol must be non-negative, got {rtol}")))
    }
}

fn check_level(level: usize) -> Result<(), Error> {
    if level <= MAX_DEPTH {
        Ok(())
    } else {
        Err(invalid(format!("--level must be at most {MAX_DEPTH}, got {level}")))
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Error> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(path: Option<&Path>, report: &Value) -> Result<(), Error> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn run(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Young { io } => {
            let curve = formats::read_curve_csv(open(&io.input)?)?;
            if curve.dim() < 2 {
                return Err(invalid("young needs columns x1 and x2".into()));
            }
            let f = SampledFunction::new(curve.times().to_vec(), curve.component(0))?;
            let g = SampledFunction::new(curve.times().to_vec(), curve.component(1))?;
            emit(io.output.as_deref(), &serde_json::to_value(young_integral(&f, &g)?)?)?;
        }
        Command::Winding { io, cell, grid } => {
            check_cell(cell)?;
            let curve = formats::read_curve_csv(open(&io.input)?)?;
            let field = winding_field(&curve, cell)?;
            let mut report = serde_json::to_value(winding_moments(&field))?;
            report["origin"] = json!(field.origin);
            report["cell"] = json!(field.cell);
            report["ncols"] = json!(field.ncols);
            report["nrows"] = json!(field.nrows);
            if let Some(path) = grid {
                let mut out = sink(Some(&path))?;
                formats::write_winding_csv(&mut out, &field)?;
                out.flush()?;
            }
            emit(io.output.as_deref(), &report)?;
        }
        Command::Surface { io, order, integrand, rtol, level } => {
            check_rtol(rtol)?;
            let f: TestIntegrand = integrand.parse()?;
            let mut field = formats::read_square_field_csv(open(&io.input)?)?;
            if let Some(level) = level {
                check_level(level)?;
                field = field.subsample(level)?;
            }
            let report = if order == 1 {
                surface_integral_first_order(&field, &f, rtol)
            } else {
                surface_integral_second_order(&field, &f, rtol)
            };
            emit(io.output.as_deref(), &serde_json::to_value(report)?)?;
        }
        Command::Tree { io, epsilon } => {
            if !(epsilon >= 0.0 && epsilon.is_finite()) {
                return Err(invalid(format!("--epsilon must be non-negative, got {epsilon}")));
            }
            let map = formats::read_graph_json(open(&io.input)?)?;
            match build_quotient_tree(&map, epsilon) {
                Ok(tree) => emit(io.output.as_deref(), &serde_json::to_value(tree.to_document())?)?,
                Err(Error::NotATree { cycle }) => {
                    emit(io.output.as_deref(), &json!({ "verdict": "not_a_tree", "cycle_classes": cycle }))?;
                    return Ok(Outcome::Negative);
                }
                Err(e) => return Err(e),
            }
        }
        Command::Heis { io } => {
            let mut curve = formats::read_curve_csv(open(&io.input)?)?;
            if curve.dim() == 2 {
                curve = horizontal_lift(&curve, 0.0)?;
            }
            let residuals = lifting_identity_residuals(&curve)?;
            let mut report = serde_json::to_value(residuals)?;
            report["z_gain"] = json!(curve.point(curve.len() - 1)[2] - curve.point(0)[2]);
            emit(io.output.as_deref(), &report)?;
        }
        Command::CheckT { io, cell, rtol, cycles } => {
            check_cell(cell)?;
            check_rtol(rtol)?;
            let map = formats::read_graph_json(open(&io.input)?)?;
            let list: Option<Vec<Vec<u64>>> = match cycles {
                Some(path) => Some(serde_json::from_reader(open(&path)?)?),
                None => None,
            };
            let cert = property_t_check(&map, list.as_deref(), cell, rtol)?;
            emit(io.output.as_deref(), &serde_json::to_value(&cert)?)?;
            if cert.verdict == Verdict::Violated {
                return Ok(Outcome::Negative);
            }
        }
        Command::Gen { name, output, alpha, level, seed, samples, co_oriented } => {
            let mut out = sink(output.as_deref())?;
            match name {
                Fixture::Circle => {
                    let c = fixtures::circle([0.0, 0.0], 1.0, samples.unwrap_or(1024))?;
                    formats::write_curve_csv(&mut out, &c)?;
                }
                Fixture::FigureEight => {
                    let c = fixtures::figure_eight(samples.unwrap_or(1024), co_oriented)?;
                    formats::write_curve_csv(&mut out, &c)?;
                }
                Fixture::Weierstrass => {
                    if !(alpha > 0.0 && alpha <= 1.0) {
                        return Err(invalid(format!("--alpha must lie in (0, 1], got {alpha}")));
                    }
                    check_level(level)?;
                    let field = fixtures::weierstrass_field(alpha, level, seed)?;
                    formats::write_square_field_csv(&mut out, &field)?;
                }
                Fixture::Star => {
                    formats::write_graph_json(&mut out, &fixtures::star_graph(samples.unwrap_or(5))?)?;
                }
                Fixture::Cycle => {
                    let n = samples.unwrap_or(256);
                    if n < 3 {
                        return Err(invalid(format!("--samples must be at least 3 for a cycle, got {n}")));
                    }
                    let c = fixtures::circle([0.0, 0.0], 1.0, n)?;
                    let pts: Vec<[f64; 2]> = (0..n).map(|i| c.xy(i)).collect();
                    let map = fixtures::cycle_graph(&pts)?;
                    formats::write_graph_json(&mut out, &map)?;
                }
                Fixture::LiftedCircle => {
                    let c = fixtures::lifted_circle([0.0, 0.0], samples.unwrap_or(8192))?;
                    formats::write_curve_csv(&mut out, &c)?;
                }
            }
            out.flush()?;
        }
    }
    Ok(Outcome::Success)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

//! Command-line interface.
//!
//! Exit codes: 0 success, 1 verification or certification failure, 2 usage
//! error, 3 I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;

use crate::algebra::{objective_vector, AveragedTable, AveragingMap, ProductTable};
use crate::certify::{certify_solution, fraction, verify, Certificate};
use crate::density::binomial;
use crate::enumerate::{enumerate_flags, enumerate_types};
use crate::formats::{self, Format};
use crate::graph::TypeGraph;
use crate::sdp::{build_problem, export_solver_format, import_solution, Sizes};
use crate::Rational;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "flagcert", version, about = "Exact flag-algebra certificates for Ramsey multiplicity bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// List all flags of a given size for every type of order s.
    Enumerate {
        #[arg(long)]
        s: usize,
        /// Flag size.
        #[arg(long)]
        l: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Output directory; counts are printed when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write flag lists, product, averaging and objective tables.
    Coeffs {
        #[command(flatten)]
        sizes: SizeArgs,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export the semidefinite program in sparse SDPA format.
    BuildSdp {
        #[command(flatten)]
        sizes: SizeArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Round a solver solution to an exact certificate.
    Certify {
        #[command(flatten)]
        sizes: SizeArgs,
        /// Solution file to read.
        #[arg(long, conflicts_with = "solver_cmd", required_unless_present = "solver_cmd")]
        solution: Option<PathBuf>,
        /// Solver command; `{input}` and `{output}` are replaced by file paths.
        #[arg(long)]
        solver_cmd: Option<String>,
        #[arg(long, default_value_t = 1000)]
        denominator: u64,
        /// Certificate file, or directory for `--format legacy`.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check a certificate with exact arithmetic.
    Verify {
        /// Native certificate file.
        #[arg(required_unless_present = "data_dir")]
        certificate: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Directory with flag lists and matrices in the legacy layout.
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        l1: Option<usize>,
        /// Claimed bound for legacy data, as n/d; defaults to 0.
        #[arg(long, value_parser = formats::parse_rational)]
        bound: Option<Rational>,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SizeArgs {
    /// Clique and independent set size.
    #[arg(long)]
    pub t: usize,
    /// Type order.
    #[arg(long)]
    pub s: usize,
    /// Small flag size.
    #[arg(long)]
    pub l1: usize,
}

enum Failure {
    Usage(String),
    Io(String),
    Rejected(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Rejected(_) => EXIT_FAILURE,
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Rejected(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(io_err(path))
}

fn create_dir(path: &Path) -> Result<(), Failure> {
    fs::create_dir_all(path).map_err(io_err(path))
}

fn show(x: &Rational) -> String {
    format!("{} = {}", fraction(x), x.to_f64().unwrap_or(f64::NAN))
}

/// Parses `std::env::args` and runs the command.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Cmd::Enumerate { s, l, format, out } => enumerate(s, l, format, out.as_deref()),
        Cmd::Coeffs { sizes, format, out } => coeffs(sizes, format, &out),
        Cmd::BuildSdp { sizes, out } => {
            let problem = build_problem(sizes.t, sizes.s, sizes.l1).map_err(usage)?;
            write(&out, &export_solver_format(&problem))?;
            println!(
                "{} constraints, blocks {:?}",
                problem.constraints.len(),
                problem.block_dims
            );
            Ok(())
        }
        Cmd::Certify {
            sizes,
            solution,
            solver_cmd,
            denominator,
            out,
            format,
        } => certify(sizes, solution, solver_cmd, denominator, &out, format),
        Cmd::Verify {
            certificate,
            format,
            data_dir,
            t,
            s,
            l1,
            bound,
        } => {
            let cert = match (format, certificate, data_dir) {
                (Format::Native, Some(path), None) => Certificate::parse(&read(&path)?)
                    .map_err(|e| Failure::Rejected(format!("{}: {e}", path.display())))?,
                (Format::Legacy, None, Some(dir)) => {
                    let (Some(t), Some(s), Some(l1)) = (t, s, l1) else {
                        return Err(usage("--format legacy needs --t, --s and --l1"));
                    };
                    formats::load_legacy_certificate(&dir, t, s, l1, bound.unwrap_or_default()).map_err(|e| match e {
                        formats::LegacyDataError::Io { .. } => Failure::Io(e.to_string()),
                        _ => Failure::Rejected(e.to_string()),
                    })?
                }
                _ => return Err(usage("give a certificate file, or --format legacy with --data-dir")),
            };
            let value = verify(&cert).map_err(|e| Failure::Rejected(format!("rejected: {e}")))?;
            println!("verified: claimed bound {}", show(&cert.bound));
            println!("recomputed bound {}", show(&value));
            Ok(())
        }
    }
}

fn types_of_order(s: usize) -> Result<Vec<TypeGraph>, Failure> {
    enumerate_types(s).map_err(usage)
}

fn enumerate(s: usize, l: usize, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    if let Some(dir) = out {
        create_dir(dir)?;
    }
    for (i, ty) in types_of_order(s)?.iter().enumerate() {
        let basis = enumerate_flags(ty, l).map_err(usage)?;
        println!("type {i} ({} edges): {} flags", ty.graph().edge_count(), basis.len());
        if let Some(dir) = out {
            let (name, text) = match format {
                Format::Legacy => (formats::legacy_flag_file(s, l, i), formats::write_flag_list_legacy(&basis)),
                Format::Native => (formats::native_flag_file(s, l, i), formats::write_flag_list_native(&basis)),
            };
            write(&dir.join(name), &text)?;
        }
    }
    Ok(())
}

fn coeffs(sizes: SizeArgs, format: Format, out: &Path) -> Result<(), Failure> {
    let sizes = Sizes::new(sizes.t, sizes.s, sizes.l1).map_err(usage)?;
    let (s, l1, l2) = (sizes.s, sizes.l1, sizes.l2());
    create_dir(out)?;
    let zero = Arc::new(enumerate_flags(&TypeGraph::empty_type(), l2).map_err(usage)?);
    let objective = objective_vector(sizes.t, &zero).map_err(usage)?.into_coeffs();
    let (name, text) = match format {
        Format::Legacy => (
            formats::legacy_objective_file(sizes.t, l2),
            formats::write_objective_legacy(&objective, binomial(l2 as u64, sizes.t as u64))
                .map_err(usage)?,
        ),
        Format::Native => (
            formats::native_objective_file(sizes.t, l2),
            formats::write_objective_native(&objective),
        ),
    };
    write(&out.join(name), &text)?;
    for (i, ty) in types_of_order(s)?.iter().enumerate() {
        let small = Arc::new(enumerate_flags(ty, l1).map_err(usage)?);
        let large = Arc::new(enumerate_flags(ty, l2).map_err(usage)?);
        let table = ProductTable::from_bases(small.clone(), large.clone());
        let avg = AveragingMap::from_bases(large, zero.clone()).map_err(usage)?;
        let averaged = AveragedTable::new(&table, &avg).map_err(usage)?;
        let files = match format {
            Format::Legacy => [
                (formats::legacy_flag_file(s, l1, i), formats::write_flag_list_legacy(&small)),
                (formats::legacy_product_file(s, l1, i), formats::write_products_legacy(&table)),
                (formats::legacy_q_file(s, l2, i), formats::write_q_legacy(&avg)),
                (formats::legacy_averaged_file(s, l1, i), formats::write_averaged_legacy(&averaged)),
            ],
            Format::Native => [
                (formats::native_flag_file(s, l1, i), formats::write_flag_list_native(&small)),
                (formats::native_product_file(s, l1, i), formats::write_products_native(&table)),
                (formats::native_q_file(s, l2, i), formats::write_q_native(&avg)),
                (formats::native_averaged_file(s, l1, i), formats::write_averaged_native(&averaged)),
            ],
        };
        for (name, text) in files {
            write(&out.join(name), &text)?;
        }
        println!(
            "type {i}: {} flags, denominators {} {} {}",
            small.len(),
            table.denominator(),
            avg.denominator(),
            averaged.denominator()
        );
    }
    println!("{} 0-flags, objective denominator {}", zero.len(), binomial(l2 as u64, sizes.t as u64));
    Ok(())
}

fn shell_quote(path: &Path) -> String {
    format!("'{}'", path.display().to_string().replace('\'', r"'\''"))
}

fn certify(
    sizes: SizeArgs,
    solution: Option<PathBuf>,
    solver_cmd: Option<String>,
    denominator: u64,
    out: &Path,
    format: Format,
) -> Result<(), Failure> {
    if denominator == 0 {
        return Err(usage("--denominator must be positive"));
    }
    let problem = build_problem(sizes.t, sizes.s, sizes.l1).map_err(usage)?;
    let solution_path = match (solution, solver_cmd) {
        (Some(path), _) => path,
        (None, Some(template)) => {
            let input = out.with_extension("dat-s");
            let output = out.with_extension("sol");
            write(&input, &export_solver_format(&problem))?;
            let command = template
                .replace("{input}", &shell_quote(&input))
                .replace("{output}", &shell_quote(&output));
            log::info!("running {command}");
            let status = Command::new("sh")
                .arg("-c")
                .arg(&command)
                .status()
                .map_err(|e| Failure::Io(format!("could not run solver: {e}")))?;
            if !status.success() {
                return Err(Failure::Rejected(format!("solver command failed with {status}")));
            }
            output
        }
        (None, None) => return Err(usage("give --solution or --solver-cmd")),
    };
    let text = read(&solution_path)?;
    let sol = import_solution(&problem, &text)
        .map_err(|e| Failure::Rejected(format!("{}: {e}", solution_path.display())))?;
    let outcome =
        certify_solution(&problem, &sol, denominator).map_err(|e| Failure::Rejected(e.to_string()))?;
    match format {
        Format::Native => write(out, &outcome.certificate.to_text())?,
        Format::Legacy => {
            create_dir(out)?;
            formats::write_legacy_certificate(out, &outcome.certificate).map_err(|e| Failure::Io(e.to_string()))?;
        }
    }
    for (i, eps) in outcome.regularisation.iter().enumerate() {
        if *eps != Rational::default() {
            println!("matrix {i} shifted by {}", fraction(eps));
        }
    }
    println!("solver bound {}", sol.c_float);
    println!("certified bound {}", show(&outcome.certificate.bound));
    Ok(())
}

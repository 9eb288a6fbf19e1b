//! The `forestnull` command line.
//!
//! Exit status is 0 on success, 1 when an input fails to parse or validate
//! (or a `--check` fails), and 2 on usage errors.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec, PrimeField, Rationals};
use crate::generate::{gen_random, SampleNonzero, Shape};
use crate::io::{self, AnyMatrix, Format};
use crate::kernel::{self, Basis};
use crate::matrix::AcyclicMatrix;
use crate::oracle::{self, Oracle};
use crate::{rank, scalation};

#[derive(Debug, Parser)]
#[command(
    name = "forestnull",
    version,
    about = "Null and row space bases of forest-patterned matrices"
)]
pub struct Cli {
    /// Field to read matrices in, overriding file headers: `rational` or `gf:<p>`.
    #[arg(long, global = true)]
    field: Option<FieldSpec>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a file holds a valid zero-diagonal forest-patterned matrix.
    Validate { file: PathBuf },
    /// Print the null support, core, S-set, matching number and dimensions.
    Support {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Sparsest basis of the null space.
    NullBasis(BasisArgs),
    /// Structured basis of the row space.
    RankBasis(BasisArgs),
    /// Carry a null or row space vector of one matrix to another with the same pattern.
    Transfer {
        #[arg(long, value_enum)]
        space: Space,
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        /// JSON vector file `{"n": .., "entries": {"1": "5", ..}}`.
        #[arg(long)]
        vector: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a seeded random matrix.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `tree` or `forest:<k>`.
        #[arg(long, default_value = "tree")]
        shape: Shape,
        #[arg(long, default_value = "mm")]
        format: Format,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Time `null-basis` on random trees and print CSV.
    Bench {
        /// Comma-separated sizes, plain or as powers `2^k`.
        #[arg(long, value_delimiter = ',', default_value = "2^15,2^16,2^17,2^18")]
        sizes: Vec<Size>,
        #[arg(long, default_value_t = 5)]
        repeat: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Brute-force dense computations.
    Oracle {
        #[command(subcommand)]
        query: OracleQuery,
    },
}

#[derive(Debug, clap::Args)]
struct BasisArgs {
    file: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
    /// Verify every vector against the matrix, and the span against dense
    /// elimination when n is within the oracle bound.
    #[arg(long)]
    check: bool,
}

#[derive(Debug, Subcommand)]
enum OracleQuery {
    NullBasis {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    Rank {
        file: PathBuf,
    },
    MinSupport {
        file: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Space {
    Null,
    Rank,
}

#[derive(Clone, Copy, Debug)]
struct Size(usize);

impl std::str::FromStr for Size {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let n = match s.split_once('^') {
            Some((base, exp)) => {
                let base: usize = base.parse().map_err(|_| format!("bad size {s:?}"))?;
                let exp: u32 = exp.parse().map_err(|_| format!("bad size {s:?}"))?;
                base.checked_pow(exp)
                    .ok_or_else(|| format!("size {s:?} overflows"))?
            }
            None => s.parse().map_err(|_| format!("bad size {s:?}"))?,
        };
        if n == 0 {
            return Err("sizes must be positive".into());
        }
        Ok(Size(n))
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParameter(_) => 2,
                _ => 1,
            }
        }
    }
}

macro_rules! with_matrix {
    ($any:expr, $m:ident => $body:expr) => {
        match $any {
            AnyMatrix::Rational($m) => $body,
            AnyMatrix::Prime($m) => $body,
        }
    };
}

fn execute(cli: Cli) -> Result<()> {
    let field = cli.field;
    let read = |path: &Path| io::read_matrix(path, field);
    match cli.command {
        Command::Validate { file } => {
            let m = read(&file)?;
            let summary = with_matrix!(&m, m => format!(
                "valid: n = {}, nonzeros = {}, components = {}, field = {}\n",
                m.n(),
                m.nnz(),
                m.pattern().component_count(),
                m.field().spec()
            ));
            emit(None, &summary)
        }
        Command::Support { file, json } => {
            let m = read(&file)?;
            let text = with_matrix!(&m, m => support_report(m, json));
            emit(None, &text)
        }
        Command::NullBasis(args) => {
            let m = read(&args.file)?;
            let text = with_matrix!(&m, m => null_basis_cmd(m, &args)?);
            emit(args.output.as_deref(), &text)
        }
        Command::RankBasis(args) => {
            let m = read(&args.file)?;
            let text = with_matrix!(&m, m => rank_basis_cmd(m, &args)?);
            emit(args.output.as_deref(), &text)
        }
        Command::Transfer {
            space,
            from,
            to,
            vector,
            output,
        } => {
            let text = match (read(&from)?, read(&to)?) {
                (AnyMatrix::Rational(a), AnyMatrix::Rational(b)) => {
                    transfer_cmd(&a, &b, space, &vector)?
                }
                (AnyMatrix::Prime(a), AnyMatrix::Prime(b)) => transfer_cmd(&a, &b, space, &vector)?,
                (a, b) => {
                    return Err(Error::FieldMismatch {
                        left: a.spec().to_string(),
                        right: b.spec().to_string(),
                    })
                }
            };
            emit(output.as_deref(), &text)
        }
        Command::Gen {
            n,
            seed,
            shape,
            format,
            out,
        } => {
            let text = match field.unwrap_or(FieldSpec::Rational) {
                FieldSpec::Rational => {
                    io::format_matrix(&gen_random(Rationals, n, seed, shape)?, format)
                }
                FieldSpec::Prime(p) => {
                    io::format_matrix(&gen_random(PrimeField::new(p)?, n, seed, shape)?, format)
                }
            };
            emit(out.as_deref(), &text)
        }
        Command::Bench {
            sizes,
            repeat,
            seed,
        } => {
            if repeat == 0 {
                return Err(Error::InvalidParameter("--repeat must be positive".into()));
            }
            let sizes: Vec<usize> = sizes.into_iter().map(|s| s.0).collect();
            let text = match field.unwrap_or(FieldSpec::Prime(1_000_003)) {
                FieldSpec::Rational => bench(Rationals, &sizes, repeat, seed)?,
                FieldSpec::Prime(p) => bench(PrimeField::new(p)?, &sizes, repeat, seed)?,
            };
            emit(None, &text)
        }
        Command::Oracle { query } => {
            let oracle = Oracle::from_env();
            match query {
                OracleQuery::NullBasis {
                    file,
                    output,
                    format,
                } => {
                    let m = read(&file)?;
                    let text = with_matrix!(&m, m => {
                        io::format_basis(m.field(), &oracle.dense_null_space(m)?, format)
                    });
                    emit(output.as_deref(), &text)
                }
                OracleQuery::Rank { file } => {
                    let m = read(&file)?;
                    let r = with_matrix!(&m, m => oracle.rank(m)?);
                    emit(None, &format!("{r}\n"))
                }
                OracleQuery::MinSupport { file } => {
                    let m = read(&file)?;
                    let t = with_matrix!(&m, m => oracle.min_support_total(m)?);
                    emit(None, &format!("{t}\n"))
                }
            }
        }
    }
}

/// Writes to `path`, or to stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SupportReport {
    n: usize,
    nu: usize,
    null_dimension: usize,
    rank: usize,
    supp: Vec<usize>,
    core: Vec<usize>,
    s_set: Vec<usize>,
}

fn support_report<F: Field>(m: &AcyclicMatrix<F>, json: bool) -> String {
    let matching = kernel::maximum_matching(m.pattern());
    let supp = kernel::support_with(m.pattern(), &matching);
    let one_based = |vs: &[usize]| vs.iter().map(|v| v + 1).collect::<Vec<_>>();
    let report = SupportReport {
        n: m.n(),
        nu: matching.nu,
        null_dimension: m.n() - 2 * matching.nu,
        rank: 2 * matching.nu,
        supp: one_based(&supp.supp),
        core: one_based(&supp.core),
        s_set: one_based(&supp.s_set),
    };
    if json {
        return serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    }
    let list = |vs: &[usize]| {
        vs.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!(
        "n {}\nnu {}\nnull_dimension {}\nrank {}\nsupp {}\ncore {}\ns_set {}\n",
        report.n,
        report.nu,
        report.null_dimension,
        report.rank,
        list(&report.supp),
        list(&report.core),
        list(&report.s_set)
    )
}

fn null_basis_cmd<F: Field>(m: &AcyclicMatrix<F>, args: &BasisArgs) -> Result<String> {
    let basis = scalation::null_basis(m);
    if args.check {
        for (i, x) in basis.vectors().iter().enumerate() {
            if !m.annihilates(x)? {
                return Err(Error::CheckFailed(format!(
                    "vector {} is not in the null space",
                    i + 1
                )));
            }
        }
        let expected = m.n() - 2 * kernel::maximum_matching(m.pattern()).nu;
        check_span(m, &basis, expected, |o| o.dense_null_space(m), "null")?;
    }
    Ok(io::format_basis(m.field(), &basis, args.format))
}

fn rank_basis_cmd<F: Field>(m: &AcyclicMatrix<F>, args: &BasisArgs) -> Result<String> {
    let basis = rank::rank_basis(m);
    if args.check {
        for (i, x) in basis.vectors().iter().enumerate() {
            if !rank::row_space_contains(m, x)? {
                return Err(Error::CheckFailed(format!(
                    "vector {} is not in the row space",
                    i + 1
                )));
            }
        }
        let expected = 2 * kernel::maximum_matching(m.pattern()).nu;
        check_span(m, &basis, expected, |o| o.dense_row_space(m), "row")?;
    }
    Ok(io::format_basis(m.field(), &basis, args.format))
}

/// Dimension and, within the oracle bound, independence and span equality.
fn check_span<F: Field>(
    m: &AcyclicMatrix<F>,
    basis: &Basis<F::Elem>,
    expected: usize,
    dense: impl FnOnce(&Oracle) -> Result<Basis<F::Elem>>,
    space: &str,
) -> Result<()> {
    if basis.dimension() != expected {
        return Err(Error::CheckFailed(format!(
            "{space} basis has {} vectors, expected {expected}",
            basis.dimension()
        )));
    }
    let oracle = Oracle::from_env();
    if m.n() > oracle.bound() {
        eprintln!(
            "check: {} vectors verified; span comparison skipped (n = {} > oracle bound {})",
            basis.dimension(),
            m.n(),
            oracle.bound()
        );
        return Ok(());
    }
    let f = m.field();
    if oracle::rank_of(f, basis.vectors()) != basis.dimension() {
        return Err(Error::CheckFailed(format!(
            "{space} basis vectors are dependent"
        )));
    }
    if !oracle::same_span(f, basis, &dense(&oracle)?)? {
        return Err(Error::CheckFailed(format!(
            "span differs from the dense {space} space"
        )));
    }
    eprintln!(
        "check: {} vectors verified; span equals the dense {space} space",
        basis.dimension()
    );
    Ok(())
}

fn transfer_cmd<F: Field>(
    a: &AcyclicMatrix<F>,
    b: &AcyclicMatrix<F>,
    space: Space,
    vector: &Path,
) -> Result<String> {
    let x = io::read_vector(a.field(), vector)?;
    let y = match space {
        Space::Null => scalation::transfer_null(a, b, &x)?,
        Space::Rank => rank::transfer_rank(a, b, &x)?,
    };
    Ok(io::format_vector(b.field(), &y))
}

fn median(times: &mut [f64]) -> f64 {
    times.sort_by(f64::total_cmp);
    let k = times.len();
    if k % 2 == 1 {
        times[k / 2]
    } else {
        (times[k / 2 - 1] + times[k / 2]) / 2.0
    }
}

/// CSV of median `null_basis` wall time per size; instance generation is
/// not timed.
fn bench<F: SampleNonzero>(field: F, sizes: &[usize], repeat: usize, seed: u64) -> Result<String> {
    let mut out = String::from("n,repeat,median_seconds,min_seconds,ratio\n");
    let mut previous: Option<f64> = None;
    for &n in sizes {
        let mut times = Vec::with_capacity(repeat);
        for r in 0..repeat {
            let m = gen_random(field.clone(), n, seed.wrapping_add(r as u64), Shape::Tree)?;
            let start = Instant::now();
            let basis = scalation::null_basis(&m);
            times.push(start.elapsed().as_secs_f64());
            std::hint::black_box(basis);
        }
        let min = times.iter().copied().fold(f64::INFINITY, f64::min);
        let med = median(&mut times);
        let ratio = previous
            .map(|p| format!("{:.3}", med / p))
            .unwrap_or_default();
        out.push_str(&format!("{n},{repeat},{med:.6},{min:.6},{ratio}\n"));
        previous = Some(med);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_parse() {
        assert_eq!("2^15".parse::<Size>().unwrap().0, 32768);
        assert_eq!("100".parse::<Size>().unwrap().0, 100);
        assert!("0".parse::<Size>().is_err());
        assert!("2^x".parse::<Size>().is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["forestnull", "frobnicate"]), 2);
        assert_eq!(run(["forestnull", "gen"]), 2);
        assert_eq!(run(["forestnull", "gen", "--n", "0"]), 2);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}

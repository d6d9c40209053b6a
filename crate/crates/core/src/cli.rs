//! The `indef` command line. [`run`] is the whole program minus process
//! plumbing, so it can be driven from tests.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::dilation::{
    egervary_dilate, halmos_dilate, isometric_sznagy_dilate, sznagy_dilate, verify_dilation, verify_finite_dilation,
    DilationError, DilationKind, VerifyParams,
};
use crate::document::{parse_ring_spec, Document, ParseError};
use crate::explorer::{
    ando_search, exhaustive_verify, write_census_csv, ExploreParams, ExplorerError, DEFAULT_ANDO_BUDGET,
};
use crate::operator::{Operator, OperatorError};
use crate::ring::Ring;
use crate::space::Space;

/// Environment variable that overrides the `gen` seed.
pub const SEED_VAR: &str = "INDEF_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Exact dilations of self-adjoint operators over characteristic-2 *-rings.
#[derive(Parser, Debug)]
#[command(name = "indef", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    Halmos,
    Egervary,
    Sznagy,
    Isometric,
}

impl From<KindArg> for DilationKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Halmos => DilationKind::Halmos,
            KindArg::Egervary => DilationKind::Egervary,
            KindArg::Sznagy => DilationKind::SzNagy,
            KindArg::Isometric => DilationKind::Isometric,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random self-adjoint operator as a document.
    Gen {
        /// Ring line body, e.g. "gf2k k=2 modulus=7 star=frobenius:1".
        #[arg(long, default_value = "gf2k k=1 modulus=2 star=identity")]
        ring: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Take ring and space from this document instead.
        #[arg(short, long)]
        input: Option<PathBuf>,
        /// Overridden by INDEF_SEED.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "T")]
        name: String,
        /// Resample until the operator is nonzero.
        #[arg(long)]
        nonzero: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Construct a dilation. Finite kinds write the dilation matrix; the
    /// sequence-space kinds write their compressed powers.
    Dilate {
        #[arg(short, long)]
        input: PathBuf,
        /// Operator name; defaults to the first one in the document.
        #[arg(long)]
        op: Option<String>,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Egervary order.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Highest compressed power written for the sequence-space kinds.
        #[arg(long, default_value_t = 8)]
        power: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a dilation and check every identity it should satisfy.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        op: Option<String>,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Highest power checked. For the finite kinds powers above the
        /// order are reported but not required.
        #[arg(long)]
        power: Option<u64>,
        /// Half-width of the basis-sequence window for the sequence-space kinds.
        #[arg(long, default_value_t = 8)]
        window: i64,
    },
    /// Verify every self-adjoint operator on small spaces; writes a CSV census.
    Explore {
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long, default_value_t = 6)]
        max_power: u64,
        #[arg(long, default_value_t = 8)]
        window: i64,
        /// Ring for the identity-Gram spaces of dimension 1..=max-dim.
        #[arg(long, default_value = "gf2k k=1 modulus=2 star=identity")]
        ring: String,
        /// Explore only the space of this document.
        #[arg(short, long, conflicts_with = "ring")]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search for commuting unitary dilations of two commuting operators.
    Ando {
        /// Document holding the two operators (the first two are used).
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ANDO_BUDGET)]
        budget: u64,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Dilation(#[from] DilationError),
    #[error(transparent)]
    Explorer(#[from] ExplorerError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code: 0 when every check passes, 1 when a check fails, 2 on
/// bad input.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let seed_override = std::env::var(SEED_VAR).ok();
    match dispatch(cli.command, seed_override.as_deref(), out) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn read_document(path: &Path) -> Result<Document, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Document::parse(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn pick_operator(doc: &Document, name: Option<&str>) -> Result<Operator, CliError> {
    match name {
        Some(n) => doc
            .operator(n)
            .cloned()
            .ok_or_else(|| CliError::Input(format!("no operator named {n:?}"))),
        None => doc
            .first_operator()
            .cloned()
            .ok_or_else(|| CliError::Input("document has no operators".into())),
    }
}

fn parse_ring(body: &str) -> Result<Ring, CliError> {
    parse_ring_spec(body).map_err(|e| CliError::Input(format!("--ring: {e}")))
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn dispatch(command: Command, seed_override: Option<&str>, out: &mut dyn Write) -> Result<bool, CliError> {
    match command {
        Command::Gen {
            ring,
            dim,
            input,
            seed,
            name,
            nonzero,
            output,
        } => {
            let seed = match seed_override {
                Some(s) => s
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| CliError::Input(format!("{SEED_VAR}={s:?} is not an unsigned integer")))?,
                None => seed,
            };
            let (space, explicit) = match input {
                Some(path) => {
                    let doc = read_document(&path)?;
                    let space = match (&doc.space, doc.first_operator()) {
                        (Some(s), _) => s.clone(),
                        (None, Some(op)) => op.space().clone(),
                        (None, None) => Space::standard(doc.ring, dim).map_err(OperatorError::from)?,
                    };
                    (space, doc.space.is_some())
                }
                None => (
                    Space::standard(parse_ring(&ring)?, dim).map_err(OperatorError::from)?,
                    false,
                ),
            };
            let t = Operator::random_self_adjoint(&space, seed, nonzero);
            let doc = Document::new(space.ring(), explicit.then(|| space.clone())).with_operator(name, t);
            emit(&doc.to_string(), output.as_deref(), out)?;
            Ok(true)
        }
        Command::Dilate {
            input,
            op,
            kind,
            n,
            power,
            output,
        } => {
            let doc = read_document(&input)?;
            let t = pick_operator(&doc, op.as_deref())?;
            let result = match DilationKind::from(kind) {
                DilationKind::Halmos => finite_document(&halmos_dilate(&t)?),
                DilationKind::Egervary => finite_document(&egervary_dilate(&t, n)?),
                DilationKind::SzNagy => {
                    let u = sznagy_dilate(&t)?;
                    powers_document(&t, power, |k| u.compress_power(k))
                }
                DilationKind::Isometric => {
                    let u = isometric_sznagy_dilate(&t)?;
                    powers_document(&t, power, |k| u.compress_power(k))
                }
            };
            emit(&result.to_string(), output.as_deref(), out)?;
            Ok(true)
        }
        Command::Verify {
            input,
            op,
            kind,
            n,
            power,
            window,
        } => {
            let doc = read_document(&input)?;
            let t = pick_operator(&doc, op.as_deref())?;
            let kind = DilationKind::from(kind);
            let report = match kind {
                DilationKind::Halmos => verify_finite_dilation(&t, kind, 1, power.unwrap_or(1))?,
                DilationKind::Egervary => verify_finite_dilation(&t, kind, n, power.unwrap_or(n as u64 + 1))?,
                _ => {
                    let params = VerifyParams {
                        order: n,
                        max_power: power.unwrap_or(VerifyParams::default().max_power),
                        window,
                    };
                    verify_dilation(&t, kind, params)?
                }
            };
            writeln!(out, "{report}")?;
            for line in report.machine_lines() {
                writeln!(out, "{line}")?;
            }
            Ok(report.holds())
        }
        Command::Explore {
            max_dim,
            max_n,
            max_power,
            window,
            ring,
            input,
            output,
        } => {
            let spaces = match input {
                Some(path) => {
                    let doc = read_document(&path)?;
                    let space = doc
                        .space
                        .clone()
                        .or_else(|| doc.first_operator().map(|o| o.space().clone()))
                        .ok_or_else(|| CliError::Input("document declares no space".into()))?;
                    vec![space]
                }
                None => {
                    let ring = parse_ring(&ring)?;
                    (1..=max_dim)
                        .map(|d| Space::standard(ring, d))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(OperatorError::from)?
                }
            };
            let params = ExploreParams {
                max_n,
                max_power,
                window,
            };
            let mut rows = Vec::new();
            for space in &spaces {
                rows.extend(exhaustive_verify(space, params)?);
            }
            let mut csv = Vec::new();
            write_census_csv(&rows, &mut csv).map_err(|e| CliError::Output(io::Error::other(e)))?;
            emit(
                &String::from_utf8(csv).expect("csv output is utf-8"),
                output.as_deref(),
                out,
            )?;
            Ok(rows.iter().all(|r| r.all_pass()))
        }
        Command::Ando { pair, budget } => {
            let doc = read_document(&pair)?;
            let [(_, t1), (_, t2), ..] = doc.operators.as_slice() else {
                return Err(CliError::Input("ando needs a document with two operators".into()));
            };
            let result = ando_search(t1, t2, budget)?;
            let reverified = result.reverify();
            writeln!(out, "{}", result.describe())?;
            writeln!(out, "reverified={reverified}")?;
            writeln!(
                out,
                "status={}",
                if result.found && reverified { "pass" } else { "fail" }
            )?;
            Ok(result.found && reverified)
        }
    }
}

/// Document over `space`; the Gram block is written only when it is not
/// the identity.
fn document_on(space: &Space) -> Document {
    let explicit = !space.gram().is_identity();
    Document::new(space.ring(), explicit.then(|| space.clone()))
}

fn finite_document(u: &Operator) -> Document {
    document_on(u.space()).with_operator("U", u.clone())
}

/// `P U^k|_V` for `k = 1..=power`, named `P1`, `P2`, ...
fn powers_document(t: &Operator, power: u64, compress: impl Fn(u64) -> Operator) -> Document {
    let mut doc = document_on(t.space());
    for k in 1..=power {
        doc.operators.push((format!("P{k}"), compress(k)));
    }
    doc
}

//! The `cmvmop` command line: config ingestion, one subcommand per module,
//! JSON/CSV export and exit codes.
//!
//! Exit codes: 0 ok, 2 config error, 3 factorization failure, 4 tolerance
//! failure, 5 inadmissible perturbation.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::report::to_json;
use commands::{Check, Checks, Context, Failure};
use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_FACTORIZATION: i32 = 3;
pub const EXIT_TOLERANCE: i32 = 4;
pub const EXIT_PERTURBATION: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "cmvmop", version, about = "Mixed multiple orthogonal Laurent polynomials on the unit circle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct Common {
    /// JSON run configuration; without it the Lebesgue measure is used.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Truncation size.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Extra rows factorized beyond `n`; at least 2(p+q).
    #[arg(long, global = true)]
    pub margin: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// NAME=VAL, repeatable.
    #[arg(long = "tol-override", global = true)]
    pub tol_override: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Moments c_k for |k| <= bound.
    Moments,
    /// Left and right Gauss-Borel factors.
    Factorize,
    /// The four polynomial families.
    Families,
    /// Kernel values in three forms.
    Kernels,
    /// Cauchy transforms of the families.
    Secondkind,
    /// Christoffel or Geronimus perturbation checked against refactorization.
    Transform {
        #[command(subcommand)]
        kind: TransformKind,
    },
    /// Run the invariant suite.
    Verify {
        /// Also run the ladder, Szego, kernel and transform checks.
        #[arg(long)]
        all: bool,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum TransformKind {
    Christoffel,
    Geronimus,
}

pub fn exit_code(e: &Failure) -> i32 {
    match e {
        Failure::Config(_) => EXIT_CONFIG,
        Failure::Numeric(e) => match e {
            Error::SingularMinor(_) | Error::MarginTooSmall { .. } | Error::SingularBlock => EXIT_FACTORIZATION,
            Error::OnCircleRoot
            | Error::RootOfW
            | Error::SingularEvaluationMatrix(_)
            | Error::AtomNotAtRoot(_)
            | Error::InvalidPerturbation(_)
            | Error::SingularFWindow(_) => EXIT_PERTURBATION,
            _ => EXIT_CONFIG,
        },
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    n: usize,
    margin: usize,
    seed: u64,
    q: usize,
    p: usize,
    data: T,
    checks: &'a [Check],
    pass: bool,
}

struct Rendered {
    json: String,
    csv_header: Vec<&'static str>,
    csv_rows: Vec<Vec<String>>,
    checks: Vec<Check>,
}

fn envelope<T: Serialize>(ctx: &Context, command: &str, data: T, checks: Checks, table: Option<(Vec<&'static str>, Vec<Vec<String>>)>) -> Rendered {
    let list = checks.list;
    let env = Envelope {
        command,
        version: env!("CARGO_PKG_VERSION"),
        n: ctx.n,
        margin: ctx.margin,
        seed: ctx.seed,
        q: ctx.mu.q(),
        p: ctx.mu.p(),
        data,
        checks: &list,
        pass: list.iter().all(|c| c.pass),
    };
    let json = to_json(&env).expect("report data serializes");
    let (csv_header, csv_rows) = table.unwrap_or_else(|| {
        let rows = list
            .iter()
            .map(|c| vec![c.name.clone(), commands::fmt(c.residual), commands::fmt(c.tolerance), c.pass.to_string()])
            .collect();
        (vec!["name", "residual", "tolerance", "pass"], rows)
    });
    Rendered { json, csv_header, csv_rows, checks: list }
}

fn dispatch(ctx: &Context, cmd: &Command) -> Result<Rendered, Failure> {
    Ok(match cmd {
        Command::Moments => {
            let t = commands::moments(ctx)?;
            let rows = t
                .streams
                .iter()
                .flat_map(|s| {
                    s.moments.iter().map(move |&(k, re, im)| {
                        vec![s.row.to_string(), s.col.to_string(), k.to_string(), commands::fmt(re), commands::fmt(im)]
                    })
                })
                .collect();
            envelope(ctx, "moments", &t, Checks::default(), Some((vec!["row", "col", "k", "re", "im"], rows)))
        }
        Command::Factorize => {
            let (d, ch) = commands::factorize(ctx)?;
            let mut rows = Vec::new();
            for f in [&d.left, &d.right] {
                let side = format!("{:?}", f.side).to_lowercase();
                for (name, m) in [("lower", &f.lower), ("upper", &f.upper)] {
                    for i in 0..m.nrows() {
                        for j in 0..m.ncols() {
                            let v = m[(i, j)];
                            if v != num_complex::Complex64::default() {
                                rows.push(vec![side.clone(), name.into(), i.to_string(), j.to_string(), commands::fmt(v.re), commands::fmt(v.im)]);
                            }
                        }
                    }
                }
            }
            envelope(ctx, "factorize", &d, ch, Some((vec!["side", "factor", "i", "j", "re", "im"], rows)))
        }
        Command::Families => {
            let (fams, ch) = commands::family_set(ctx)?;
            let rows = commands::family_rows(&fams);
            let export: Vec<_> = fams.iter().map(commands::FamilyExport::new).collect();
            envelope(ctx, "families", &export, ch, Some((vec!["kind", "index", "component", "k", "re", "im"], rows)))
        }
        Command::Kernels => {
            let (k, ch) = commands::kernels(ctx)?;
            let rows = commands::kernel_rows(&k);
            let header = vec!["x_re", "x_im", "y_re", "y_im", "a", "b", "K_re", "K_im"];
            envelope(ctx, "kernels", &k, ch, Some((header, rows)))
        }
        Command::Secondkind => {
            let e = commands::secondkind(ctx)?;
            let rows = commands::secondkind_rows(&e);
            let header = vec!["z_re", "z_im", "which", "i", "j", "re", "im"];
            envelope(ctx, "secondkind", &e, Checks::default(), Some((header, rows)))
        }
        Command::Transform { kind: TransformKind::Christoffel } => {
            let (o, ch) = commands::christoffel(ctx)?;
            envelope(ctx, "transform christoffel", &o, ch, None)
        }
        Command::Transform { kind: TransformKind::Geronimus } => {
            let (o, ch) = commands::geronimus(ctx)?;
            envelope(ctx, "transform geronimus", &o, ch, None)
        }
        Command::Verify { all } => {
            let (notes, ch) = commands::verify(ctx, *all)?;
            envelope(ctx, "verify", &notes, ch, None)
        }
    })
}

fn render_csv(r: &Rendered) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Config(config::ConfigError(format!("csv: {e}")));
    w.write_record(&r.csv_header).map_err(io)?;
    for row in &r.csv_rows {
        w.write_record(row).map_err(io)?;
    }
    w.into_inner().map_err(|e| Failure::Config(config::ConfigError(format!("csv: {e}"))))
}

/// Human-readable check table for stderr.
fn summary(checks: &[Check], elapsed: f64, err: &mut dyn Write) {
    for c in checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(err, "{tag} {:<44} {:>10.3e} (tol {:.1e})", c.name, c.residual, c.tolerance);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let _ = writeln!(err, "{} checks, {failed} failed, {elapsed:.2}s", checks.len());
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let start = Instant::now();
    let cfg = match &cli.common.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    };
    let c = &cli.common;
    let ctx = Context::new(cfg, c.n, c.margin, c.seed, &c.tol_override)?;
    let rendered = dispatch(&ctx, &cli.command)?;
    let bytes = match c.format {
        Format::Json => {
            let mut b = rendered.json.clone().into_bytes();
            b.push(b'\n');
            b
        }
        Format::Csv => render_csv(&rendered)?,
    };
    match &c.out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| Failure::Config(config::ConfigError(format!("{}: {e}", path.display()))))?,
        None => {
            let _ = out.write_all(&bytes);
        }
    }
    summary(&rendered.checks, start.elapsed().as_secs_f64(), err);
    Ok(if rendered.checks.iter().all(|c| c.pass) { EXIT_OK } else { EXIT_TOLERANCE })
}

/// Parse arguments, run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

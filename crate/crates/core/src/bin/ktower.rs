use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ktower::count::{
    closed_table, count_all_closed, count_all_hypergeometric, count_towers_closed, recurrence_table,
};
use ktower::enumerate::{count_by_enumeration_parallel, enumerate_towers};
use ktower::tower::render_ascii;
use ktower::verify::{self, IdentityPoint};
use ktower::{Error, ExactInteger, Tower, TowerClassParams, VerificationReport};

/// Largest `k * n` enumerated without `--force`.
const ENUMERATION_CAP: usize = 24;

#[derive(Parser)]
#[command(
    name = "ktower",
    version,
    about = "Count, enumerate and verify fixed k-omino towers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Number of towers with n blocks (optionally with base size b)
    Count {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, value_enum, default_value_t = Method::Closed)]
        method: Method,
        /// Enumerate beyond the k*n cap
        #[arg(long)]
        force: bool,
    },
    /// Print every tower of a class
    Enumerate {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
        #[arg(long)]
        force: bool,
    },
    /// Draw a tower read as JSON from stdin
    Render,
    /// Closed-form count triangle d_b(n)
    Table {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        max_n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run a verification suite
    Verify {
        #[command(subcommand)]
        suite: Suite,
        #[command(flatten)]
        out: ReportOpts,
    },
}

#[derive(Args)]
struct Shape {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    b: Option<usize>,
}

#[derive(Args)]
struct ReportOpts {
    /// Emit the report as JSON
    #[arg(long, global = true)]
    json: bool,
    /// Include wall time in the report
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Closed,
    Recurrence,
    Hypergeometric,
    Enumerate,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Ascii,
}

#[derive(Subcommand)]
enum Suite {
    /// Reduce/expand round trips and fiber sizes
    Bijection {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
    /// The extended hypergeometric identity
    Identity {
        #[arg(long, required_unless_present = "grid")]
        k: Option<u32>,
        #[arg(long, required_unless_present = "grid")]
        alpha: Option<f64>,
        #[arg(long, required_unless_present = "grid")]
        beta: Option<f64>,
        /// Evaluate in floating point
        #[arg(long)]
        float: bool,
        /// JSON file with a list of {"k", "alpha", "beta", "float"} points
        #[arg(long, conflicts_with_all = ["k", "alpha", "beta"])]
        grid: Option<PathBuf>,
    },
    /// Bivariate generating function
    Gf {
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
    /// Recurrence, Vandermonde split and base-one identity
    Recurrence {
        #[arg(long, default_value_t = 4)]
        max_k: usize,
        #[arg(long, default_value_t = 30)]
        max_n: usize,
    },
    /// Enumeration counts against the closed form
    Enumeration {
        #[arg(long, default_value_t = 3)]
        max_k: usize,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
    /// Hypergeometric totals against the closed form
    Hypergeometric {
        #[arg(long, default_value_t = 6)]
        max_k: usize,
        #[arg(long, default_value_t = 30)]
        max_n: usize,
    },
    /// Domino class sizes
    Domino {
        #[arg(long, default_value_t = 8)]
        max_n: usize,
    },
    /// Composition sums
    Composition {
        #[arg(long, default_value_t = 10)]
        max_k: usize,
    },
    /// Every suite
    All {
        #[arg(long, default_value_t = 3)]
        max_k: usize,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Count {
            shape,
            method,
            force,
        } => {
            let n = count(&shape, method, force)?;
            writeln!(out, "{n}")?;
        }
        Command::Enumerate {
            shape,
            format,
            force,
        } => {
            check_cap(shape.k, shape.n, force)?;
            let bases = bases(&shape)?;
            let mut first = true;
            for b in bases {
                for t in enumerate_towers(TowerClassParams::new(shape.k, shape.n, b)?) {
                    match format {
                        Format::Jsonl => writeln!(out, "{t}")?,
                        Format::Ascii => {
                            if !first {
                                writeln!(out)?;
                            }
                            writeln!(out, "{}", render_ascii(&t))?;
                        }
                    }
                    first = false;
                }
            }
        }
        Command::Render => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text)?;
            let t = Tower::from_json(&text)?;
            writeln!(out, "{}", render_ascii(&t))?;
        }
        Command::Table { k, max_n, json } => {
            let table = closed_table(k, max_n)?;
            if json {
                writeln!(out, "{}", table.to_json())?;
            } else {
                for n in 1..=max_n {
                    let row: Vec<String> = table.row(n).iter().map(ToString::to_string).collect();
                    writeln!(out, "{n}: {}", row.join(" "))?;
                }
            }
        }
        Command::Verify { suite, out: opts } => {
            let start = Instant::now();
            let mut report = run_suite(suite)?;
            if opts.timing {
                report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
            }
            if opts.json {
                writeln!(out, "{}", report.to_json())?;
            } else {
                writeln!(out, "{}", report.render_text())?;
            }
            out.flush()?;
            if !report.pass {
                return Err(Failure::Verification);
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn bases(shape: &Shape) -> Result<Vec<usize>, Failure> {
    match shape.b {
        Some(b) => {
            TowerClassParams::new(shape.k, shape.n, b)?;
            Ok(vec![b])
        }
        None => {
            TowerClassParams::new(shape.k, shape.n, 1)?;
            Ok((1..=shape.n).collect())
        }
    }
}

fn check_cap(k: usize, n: usize, force: bool) -> Result<(), Failure> {
    if !force && k.saturating_mul(n) > ENUMERATION_CAP {
        return Err(Failure::Usage(format!(
            "k*n = {} exceeds the enumeration cap of {ENUMERATION_CAP}; pass --force to run anyway",
            k.saturating_mul(n)
        )));
    }
    Ok(())
}

fn count(shape: &Shape, method: Method, force: bool) -> Result<ExactInteger, Failure> {
    let (k, n) = (shape.k, shape.n);
    let bases = bases(shape)?;
    Ok(match method {
        Method::Closed => match shape.b {
            Some(b) => count_towers_closed(TowerClassParams::new(k, n, b)?),
            None => count_all_closed(k, n)?,
        },
        Method::Hypergeometric => match shape.b {
            Some(_) => {
                return Err(Failure::Usage(
                    "the hypergeometric method counts all base sizes; omit --b".into(),
                ))
            }
            None => count_all_hypergeometric(k, n)?,
        },
        Method::Recurrence => {
            let table = recurrence_table(k, n)?;
            bases
                .iter()
                .map(|&b| table.get(n, b).cloned().unwrap_or_default())
                .sum()
        }
        Method::Enumerate => {
            check_cap(k, n, force)?;
            let mut total = ExactInteger::default();
            for b in bases {
                total += count_by_enumeration_parallel(TowerClassParams::new(k, n, b)?);
            }
            total
        }
    })
}

fn run_suite(suite: Suite) -> Result<VerificationReport, Failure> {
    Ok(match suite {
        Suite::Bijection { k, max_n } => verify::bijection_suite(k, max_n)?,
        Suite::Identity {
            k,
            alpha,
            beta,
            float,
            grid,
        } => {
            let points = match grid {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                    serde_json::from_str::<Vec<IdentityPoint>>(&text)
                        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
                }
                None => vec![IdentityPoint {
                    k: k.expect("required by clap"),
                    alpha: alpha.expect("required by clap"),
                    beta: beta.expect("required by clap"),
                    float,
                }],
            };
            verify::identity_points_suite(&points)?
        }
        Suite::Gf { order } => verify::gf_suite(order)?,
        Suite::Recurrence { max_k, max_n } => verify::recurrence_suite(max_k, max_n)?,
        Suite::Enumeration { max_k, max_n } => verify::enumeration_suite(max_k, max_n)?,
        Suite::Hypergeometric { max_k, max_n } => verify::hypergeometric_suite(max_k, max_n)?,
        Suite::Domino { max_n } => verify::domino_suite(max_n)?,
        Suite::Composition { max_k } => verify::composition_suite(max_k)?,
        Suite::All { max_k, max_n } => verify::all_suites(max_k, max_n)?,
    })
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use uniquemax::certify::{certify_max, CertifyParams};
use uniquemax::error::Error;
use uniquemax::falsify::{conjecture_probe, FalsifyOptions, Verdict};
use uniquemax::grid::build_grid;
use uniquemax::point::CoefVector;
use uniquemax::subspace::Subspace;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 2;
const EXIT_NON_UNIQUE: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;
const EXIT_NUMERIC: u8 = 5;

#[derive(Parser)]
#[command(
    name = "uniquemax",
    version,
    about = "Subspaces of C0(R^n) whose nonzero elements peak at exactly one point: \
             construction, certification, and counterexample search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the result here (atomically) instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form maximum certificate for an element of the witness subspace.
    Witness {
        #[arg(long)]
        dim: usize,
        /// Comma-separated coefficients, e.g. 3,4
        #[arg(long)]
        coefs: String,
    },
    /// Grid certificate for the maximum of one subspace element.
    Certify {
        #[arg(long)]
        subspace: PathBuf,
        #[arg(long)]
        coefs: String,
        #[arg(long, default_value_t = 33, value_parser = resolution_parser)]
        resolution: usize,
        /// Euclidean radius grouping near-maximum points into one cluster.
        #[arg(long)]
        cluster_radius: Option<f64>,
    },
    /// Sign bounds, norm equivalence, and tail radius of a subspace.
    Bounds {
        #[arg(long)]
        subspace: PathBuf,
        #[arg(long, default_value_t = 33, value_parser = resolution_parser)]
        resolution: usize,
        #[arg(long, default_value_t = 100)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Extract an alternating subspace of one dimension less.
    Alternate {
        #[arg(long)]
        subspace: PathBuf,
        #[arg(long, default_value_t = 33, value_parser = resolution_parser)]
        resolution: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Hunt for an element with two tied, separated maximum clusters.
    Falsify {
        #[arg(long)]
        subspace: PathBuf,
        #[arg(long, default_value_t = 33, value_parser = resolution_parser)]
        resolution: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the falsifier on random (n+1)-dimensional candidates.
    Conjecture {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 33, value_parser = resolution_parser)]
        resolution: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dump the two-chart evaluation grid as CSV.
    GridDump {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 33, value_parser = resolution_parser)]
        resolution: usize,
    },
}

fn resolution_parser(s: &str) -> Result<usize, String> {
    let r: usize = s.parse().map_err(|_| format!("invalid resolution '{s}'"))?;
    if r < 3 {
        return Err(format!("resolution must be at least 3, got {r}"));
    }
    Ok(r)
}

fn parse_coefs(text: &str) -> Result<CoefVector, Error> {
    let coefs = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("invalid coefficient '{t}'")))
        })
        .collect::<Result<Vec<f64>, Error>>()?;
    CoefVector::new(coefs)
}

fn load_subspace(path: &Path) -> Result<Subspace, Error> {
    let text = std::fs::read_to_string(path)?;
    Subspace::from_json(&text)
}

/// Writes through a temp file in the target directory, then renames, so a
/// crash never leaves a half-written result.
fn emit(output: Option<&Path>, content: &str) -> Result<(), Error> {
    match output {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
            out.write_all(b"\n")?;
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
            let mut tmp = match dir {
                Some(d) => tempfile::NamedTempFile::new_in(d)?,
                None => tempfile::NamedTempFile::new_in(".")?,
            };
            tmp.write_all(content.as_bytes())?;
            tmp.write_all(b"\n")?;
            tmp.persist(path).map_err(|e| Error::Io(e.error))?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, (u8, Error)> {
    let output = cli.output.as_deref();
    let usage = |e: Error| (EXIT_USAGE, e);
    let numeric = |e: Error| (EXIT_NUMERIC, e);
    match cli.command {
        Command::Witness { dim, coefs } => {
            let a = parse_coefs(&coefs).map_err(usage)?;
            if a.dim() != dim {
                return Err(usage(Error::DimensionMismatch {
                    expected: dim,
                    found: a.dim(),
                }));
            }
            let result = uniquemax::witness::analytic_max(&a).map_err(numeric)?;
            let json = serde_json::to_string_pretty(&result).map_err(Error::Json).map_err(numeric)?;
            emit(output, &json).map_err(numeric)?;
            Ok(EXIT_OK)
        }
        Command::Certify {
            subspace,
            coefs,
            resolution,
            cluster_radius,
        } => {
            let s = load_subspace(&subspace).map_err(usage)?;
            let a = parse_coefs(&coefs).map_err(usage)?;
            let grid = build_grid(s.ambient_dim, resolution).map_err(numeric)?;
            let mut params = CertifyParams::for_grid(&grid);
            if let Some(r) = cluster_radius {
                params = params.with_cluster_radius(r);
            }
            let cert = certify_max(&s, &a, &grid, &params).map_err(numeric)?;
            let json = serde_json::to_string_pretty(&cert).map_err(Error::Json).map_err(numeric)?;
            emit(output, &json).map_err(numeric)?;
            Ok(if cert.unique() {
                EXIT_OK
            } else {
                EXIT_NON_UNIQUE
            })
        }
        Command::Bounds {
            subspace,
            resolution,
            probes,
            seed,
        } => {
            let s = load_subspace(&subspace).map_err(usage)?;
            let grid = build_grid(s.ambient_dim, resolution).map_err(numeric)?;
            let bounds = uniquemax::sign_bounds(&s, &grid, probes, seed).map_err(numeric)?;
            let eq = uniquemax::estimate_norm_equivalence(&s, &grid, probes * 10, seed)
                .map_err(numeric)?;
            let tail = uniquemax::tail_radius(&s, &bounds, &eq).map_err(numeric)?;
            let combined = serde_json::json!({
                "sign_bounds": bounds,
                "norm_equivalence": eq,
                "tail_radius": tail,
            });
            let json = serde_json::to_string_pretty(&combined).map_err(Error::Json).map_err(numeric)?;
            emit(output, &json).map_err(numeric)?;
            Ok(EXIT_OK)
        }
        Command::Alternate {
            subspace,
            resolution,
            seed,
        } => {
            let s = load_subspace(&subspace).map_err(usage)?;
            let grid = build_grid(s.ambient_dim, resolution).map_err(numeric)?;
            let result = uniquemax::extract_alternating(&s, &grid, seed).map_err(numeric)?;
            let json = serde_json::to_string_pretty(&result).map_err(Error::Json).map_err(numeric)?;
            emit(output, &json).map_err(numeric)?;
            Ok(EXIT_OK)
        }
        Command::Falsify {
            subspace,
            resolution,
            tol,
            budget,
            seed,
        } => {
            let s = load_subspace(&subspace).map_err(usage)?;
            let grid = build_grid(s.ambient_dim, resolution).map_err(numeric)?;
            let report = uniquemax::falsify(&s, &grid, tol, budget, seed).map_err(numeric)?;
            let json = serde_json::to_string_pretty(&report).map_err(Error::Json).map_err(numeric)?;
            emit(output, &json).map_err(numeric)?;
            Ok(match report.verdict {
                Verdict::ViolationFound => EXIT_OK,
                Verdict::Inconclusive => EXIT_INCONCLUSIVE,
            })
        }
        Command::Conjecture {
            dim,
            family,
            trials,
            resolution,
            tol,
            budget,
            seed,
        } => {
            let opts = FalsifyOptions {
                resolution,
                tol_gap: tol,
                budget,
            };
            let reports = conjecture_probe(dim, &family, trials, seed, &opts).map_err(numeric)?;
            let lines = reports
                .iter()
                .map(serde_json::to_string)
                .collect::<Result<Vec<_>, _>>()
                .map_err(Error::Json)
                .map_err(numeric)?
                .join("\n");
            emit(output, &lines).map_err(numeric)?;
            Ok(EXIT_OK)
        }
        Command::GridDump { dim, resolution } => {
            let grid = build_grid(dim, resolution).map_err(numeric)?;
            let mut csv = Vec::new();
            grid.write_csv(&mut csv).map_err(numeric)?;
            let text = String::from_utf8(csv)
                .map_err(|e| Error::InvalidSpec(e.to_string()))
                .map_err(numeric)?;
            emit(output, text.trim_end()).map_err(numeric)?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("UNIQUEMAX_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err((code, e)) => {
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}

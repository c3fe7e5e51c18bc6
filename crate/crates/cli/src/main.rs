use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use symshadow::experiments::{self, compile_bench::bench_matrix, ExperimentConfig};
use symshadow::fgu::{self, GateSequence};
use symshadow::noise::ReadoutChannel;
use symshadow::oracle;
use symshadow::rng::configure_workers;
use symshadow::shadows::{channel_eigenvalues_exact, Ensemble};
use symshadow::Error;

#[derive(Parser)]
#[command(name = "symshadow", version, about = "Symmetry-adjusted classical shadows: experiments and exact oracles")]
struct Cli {
    /// Worker threads (default: SYMSHADOW_WORKERS, else all cores). Output does not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write its CSV and JSON sidecar.
    Run {
        config: PathBuf,
        /// CSV destination (default: `output` from the config, else the config path with a .csv extension).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile an orthogonal 2n × 2n matrix into rotation gates, one `kind,targets,angle` line each.
    Compile {
        /// Text file holding the matrix, one row per line, with whitespace or comma separators.
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        matrix: Option<PathBuf>,
        /// Compile a Haar-random orthogonal matrix on this many modes.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Use the column-by-column Givens scheme instead of the block scheme.
        #[arg(long)]
        naive: bool,
    },
    /// Exact twirled-channel eigenvalues by enumerating the whole measurement group.
    EnumerateOracle {
        /// Number of modes or qubits (1 to 3).
        n: usize,
        /// `matchgate` or `symcl`.
        ensemble: Ensemble,
        /// Readout noise as kind:p, e.g. bitflip:0.2.
        #[arg(long)]
        noise: Option<ReadoutChannel>,
    },
    /// Run the exhaustive two-mode checks.
    Selftest,
}

fn run(cli: Cli) -> symshadow::Result<bool> {
    let workers = match cli.workers {
        Some(w) => Some(w),
        None => match std::env::var("SYMSHADOW_WORKERS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| Error::invalid(format!("SYMSHADOW_WORKERS='{v}' is not a count")))?),
            Err(_) => None,
        },
    };
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::invalid("worker count must be positive"));
        }
        configure_workers(w)?;
    }
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let csv_path = out.or_else(|| cfg.output.clone()).unwrap_or_else(|| config.with_extension("csv"));
            let output = experiments::run_experiment(&cfg)?;
            let (csv, meta) = experiments::write_outputs(&cfg, &output, &csv_path)?;
            writeln!(stdout, "wrote {} ({} rows) and {}", csv.display(), output.rows.len(), meta.display())?;
            Ok(true)
        }
        Command::Compile { matrix, random, seed, naive } => {
            let q = match (matrix, random) {
                (Some(path), _) => fgu::parse_matrix(&std::fs::read_to_string(path)?)?,
                (None, Some(n)) if n >= 1 => bench_matrix(seed, n, 0),
                _ => return Err(Error::invalid("--random needs at least one mode")),
            };
            let seq = if naive { fgu::naive_compile(&q)? } else { fgu::compile(&q)? };
            let verify = if seq.n <= 6 { Some(fgu::verify_action(&seq, &q)?) } else { None };
            print_sequence(&mut stdout, &seq, verify)?;
            Ok(true)
        }
        Command::EnumerateOracle { n, ensemble, noise } => {
            let spec = channel_eigenvalues_exact(n, ensemble, noise.as_ref())?;
            writeln!(stdout, "irrep,eigenvalue,spread,size")?;
            for e in &spec.irreps {
                if ensemble == Ensemble::Matchgate && e.label % 2 == 1 {
                    continue;
                }
                if e.label == 0 {
                    continue;
                }
                writeln!(stdout, "{},{:.15},{:.3e},{}", e.label, e.value, e.spread, e.size)?;
            }
            writeln!(stdout, "# group order {}, leakage {:.3e}", spec.group_order, spec.leakage)?;
            Ok(true)
        }
        Command::Selftest => {
            let checks = oracle::selftest();
            let mut ok = true;
            for c in &checks {
                ok &= c.passed;
                writeln!(stdout, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
            }
            writeln!(stdout, "{}/{} checks passed", checks.iter().filter(|c| c.passed).count(), checks.len())?;
            Ok(ok)
        }
    }
}

fn print_sequence(out: &mut impl Write, seq: &GateSequence, verify: Option<f64>) -> symshadow::Result<()> {
    writeln!(out, "kind,targets,angle")?;
    for g in &seq.gates {
        writeln!(out, "{g}")?;
    }
    let m = seq.metrics();
    writeln!(
        out,
        "# modes {} depth {} two_qubit {} single_qubit {}",
        seq.n, m.rotation_depth, m.two_qubit_count, m.single_qubit_count
    )?;
    if let Some(err) = verify {
        writeln!(out, "# dense action error {err:.3e}")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

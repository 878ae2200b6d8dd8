use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pencillab::numrange::SweepConfig;
use pencillab::{Pencil, ToleranceConfig};
use pencillab_cli::analyze::analyze;
use pencillab_cli::campaign::{load_artifact, replay, run_campaign, write_artifacts, CampaignConfig, Generator};
use pencillab_cli::shift::{shift_table, to_csv};
use pencillab_cli::{to_json, CliError, EXIT_VIOLATION};

#[derive(Parser)]
#[command(name = "pencillab", version, about = "Analyse linear matrix pencils A + lambda B")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct TolArgs {
    /// Relative singular-value threshold for rank decisions
    #[arg(long, default_value_t = 1e-10)]
    tol_rank: f64,
    /// Normalised determinant ratio treated as zero
    #[arg(long, default_value_t = 1e-9)]
    tol_det: f64,
    /// Relative radius for merging eigenvalue clusters
    #[arg(long, default_value_t = 1e-8)]
    tol_cluster: f64,
    /// Seed for every randomised step
    #[arg(long, env = "PENCILLAB_SEED", default_value_t = 0)]
    seed: u64,
}

impl TolArgs {
    fn config(self) -> ToleranceConfig {
        ToleranceConfig {
            rank_rel_tol: self.tol_rank,
            det_zero_tol: self.tol_det,
            eig_cluster_tol: self.tol_cluster,
            seed: self.seed,
            ..ToleranceConfig::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorArg {
    Structures,
    Commuting,
    Singular,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Full report for a pencil stored as JSON ({"a": matrix, "b": matrix})
    Analyze {
        file: PathBuf,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Seeded property campaign; prints a JSON summary
    Campaign {
        #[arg(long, value_enum, default_value = "all")]
        generator: GeneratorArg,
        /// Instances per suite
        #[arg(long, default_value_t = 500)]
        count: u64,
        /// Directory for failure artifacts
        #[arg(long, default_value = "campaign-artifacts")]
        out: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Truncated unilateral shift experiment for n = 1..=nmax
    ShiftExperiment {
        #[arg(long, default_value_t = 20)]
        nmax: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Write the table here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Re-run the check recorded in a campaign artifact
    Replay { artifact: PathBuf },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Analyze { file, out, tol } => {
            let text = read(&file)?;
            let p = Pencil::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
            let report = analyze(&p, &tol.config(), &SweepConfig::default())?;
            emit(&to_json(&report), out.as_deref())?;
            Ok(0)
        }
        Command::Campaign {
            generator,
            count,
            out,
            tol,
        } => {
            let generator = match generator {
                GeneratorArg::Structures => Generator::Structures,
                GeneratorArg::Commuting => Generator::Commuting,
                GeneratorArg::Singular => Generator::Singular,
                GeneratorArg::All => Generator::All,
            };
            let config = CampaignConfig {
                generator,
                count,
                seed: tol.seed,
                tol: tol.config(),
                sweep: SweepConfig::default(),
            };
            let outcome = run_campaign(&config)?;
            write_artifacts(&out, &outcome.artifacts)?;
            print!("{}", to_json(&outcome.summary));
            Ok(if outcome.summary.failed > 0 { EXIT_VIOLATION } else { 0 })
        }
        Command::ShiftExperiment { nmax, format, out, tol } => {
            let rows = shift_table(nmax, &tol.config())?;
            let text = match format {
                Format::Csv => to_csv(&rows),
                Format::Json => to_json(&rows),
            };
            emit(&text, out.as_deref())?;
            Ok(0)
        }
        Command::Replay { artifact } => {
            let a = load_artifact(&read(&artifact)?)?;
            let r = replay(&a);
            print!("{}", to_json(&r));
            Ok(if matches!(r.replayed, pencillab_cli::campaign::Verdict::Fail { .. }) {
                EXIT_VIOLATION
            } else {
                0
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use symlift::group::PrConfig;
use symlift::sampler::{ChainConfig, ChainKind};
use symlift_cli::{
    cmd_bench, cmd_exact, cmd_generate, cmd_sample, cmd_tveval, parse_f64_list, FamilySpec,
};

/// Symmetry-aware exact and MCMC inference on discrete factor graphs.
#[derive(Parser)]
#[command(name = "symlift", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a benchmark model in the text format.
    Generate {
        #[command(subcommand)]
        family: FamilyCommand,
    },
    /// Exact lifted inference: orbit census, log Z, P(evidence), MPE.
    Exact {
        #[arg(long)]
        model: PathBuf,
        /// JSON run report output path.
        #[arg(long)]
        report: PathBuf,
        /// Orbit census output path (JSON lines).
        #[arg(long)]
        census: PathBuf,
        /// Worker threads for frontier canonization (1 = deterministic
        /// sequential mode).
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Omit wall-clock timings so reruns are byte-identical.
        #[arg(long)]
        no_timings: bool,
    },
    /// Run an MCMC chain and estimate the model's evidence probability.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// RNG seed; required so runs are reproducible.
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        #[arg(long, default_value_t = 1)]
        thinning: usize,
        /// Burnside proposal steps per orbit-jump transition.
        #[arg(long, default_value_t = 7)]
        burnside_steps: usize,
        /// Gibbs site updates per orbital move of the lifted chain.
        #[arg(long, default_value_t = 1)]
        gibbs_per_orbital: usize,
        /// Retained-sample CSV output path.
        #[arg(long)]
        samples: PathBuf,
        /// JSON run report output path.
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        no_timings: bool,
    },
    /// Exact total-variation curves of every chain against the posterior.
    Tveval {
        #[arg(long)]
        model: PathBuf,
        /// Number of kernel steps to evaluate.
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 7)]
        burnside_steps: u32,
        /// Start state as a bit string (default: all false).
        #[arg(long)]
        start: Option<String>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Time exact lifted inference across a family size range.
    Bench {
        #[command(subcommand)]
        family: BenchCommand,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    OrbitJump,
    Lifted,
    Gibbs,
}

#[derive(Args, Clone)]
struct PigeonholeArgs {
    #[arg(long)]
    pigeons: usize,
    #[arg(long, default_value_t = 2)]
    holes: usize,
    /// Log-space weight of the hole-sharing soft clauses.
    #[arg(long, default_value_t = 2.0)]
    soft_weight: f64,
    /// Drop the hard one-hole-per-pigeon clauses.
    #[arg(long)]
    quantum: bool,
}

#[derive(Args, Clone)]
struct PairwiseArgs {
    #[arg(long)]
    n: usize,
    /// Count table of every pairwise potential as `t0,t1,t2` (log-space).
    #[arg(long, default_value = "0,0,0", value_parser = parse_f64_list::<3>)]
    pair_table: [f64; 3],
    /// Count table of the unary evidence factor as `t0,t1` (log-space).
    #[arg(long, default_value = "0,0", value_parser = parse_f64_list::<2>)]
    ev_table: [f64; 2],
}

#[derive(Subcommand, Clone)]
enum FamilyCommand {
    Pigeonhole {
        #[command(flatten)]
        args: PigeonholeArgs,
        #[arg(long)]
        out: PathBuf,
    },
    Pairwise {
        #[command(flatten)]
        args: PairwiseArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Clone)]
enum BenchCommand {
    /// Pigeonhole scaling in the number of pigeons.
    Pigeonhole {
        #[arg(long, default_value_t = 2)]
        holes: usize,
        #[arg(long, default_value_t = 2.0)]
        soft_weight: f64,
        #[arg(long)]
        quantum: bool,
        #[arg(long)]
        min: usize,
        #[arg(long)]
        max: usize,
        #[arg(long, default_value_t = 1)]
        step: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pairwise-model scaling in the number of variables.
    Pairwise {
        #[arg(long, default_value = "0,0,0", value_parser = parse_f64_list::<3>)]
        pair_table: [f64; 3],
        #[arg(long, default_value = "0,0", value_parser = parse_f64_list::<2>)]
        ev_table: [f64; 2],
        #[arg(long)]
        min: usize,
        #[arg(long)]
        max: usize,
        #[arg(long, default_value_t = 1)]
        step: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn pigeonhole_spec(args: &PigeonholeArgs) -> FamilySpec {
    FamilySpec::Pigeonhole {
        pigeons: args.pigeons,
        holes: args.holes,
        soft_weight: args.soft_weight,
        quantum: args.quantum,
    }
}

fn pairwise_spec(args: &PairwiseArgs) -> FamilySpec {
    FamilySpec::Pairwise {
        n: args.n,
        pair_table: args.pair_table,
        ev_table: args.ev_table,
    }
}

fn run(cli: Cli) -> Result<(), symlift_cli::CliError> {
    match cli.command {
        Command::Generate { family } => match family {
            FamilyCommand::Pigeonhole { args, out } => cmd_generate(&pigeonhole_spec(&args), &out),
            FamilyCommand::Pairwise { args, out } => cmd_generate(&pairwise_spec(&args), &out),
        },
        Command::Exact {
            model,
            report,
            census,
            threads,
            no_timings,
        } => cmd_exact(&model, &report, &census, threads, !no_timings),
        Command::Sample {
            model,
            kind,
            seed,
            iterations,
            burn_in,
            thinning,
            burnside_steps,
            gibbs_per_orbital,
            samples,
            report,
            no_timings,
        } => {
            let kind = match kind {
                KindArg::OrbitJump => ChainKind::OrbitJump { burnside_steps },
                KindArg::Lifted => ChainKind::Lifted {
                    gibbs_updates_per_orbital_move: gibbs_per_orbital,
                },
                KindArg::Gibbs => ChainKind::Gibbs,
            };
            let cfg = ChainConfig {
                burn_in,
                thinning,
                stab_pr: PrConfig {
                    burn_in: 30,
                    ..PrConfig::default()
                },
                aut_pr: PrConfig::default(),
                ..ChainConfig::new(kind, seed, iterations)
            };
            cmd_sample(&model, &cfg, &samples, &report, !no_timings)
        }
        Command::Tveval {
            model,
            steps,
            burnside_steps,
            start,
            out,
        } => cmd_tveval(&model, steps, burnside_steps, start.as_deref(), &out),
        Command::Bench { family } => match family {
            BenchCommand::Pigeonhole {
                holes,
                soft_weight,
                quantum,
                min,
                max,
                step,
                out,
            } => {
                let spec = FamilySpec::Pigeonhole {
                    pigeons: min,
                    holes,
                    soft_weight,
                    quantum,
                };
                cmd_bench(&spec, (min..=max).step_by(step.max(1)), &out)
            }
            BenchCommand::Pairwise {
                pair_table,
                ev_table,
                min,
                max,
                step,
                out,
            } => {
                let spec = FamilySpec::Pairwise {
                    n: min,
                    pair_table,
                    ev_table,
                };
                cmd_bench(&spec, (min..=max).step_by(step.max(1)), &out)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

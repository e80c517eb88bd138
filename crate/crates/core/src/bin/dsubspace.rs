use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dsubspace::bench::{self, Campaign};
use dsubspace::record::{read_summary_csv, write_summary_csv, SummaryRow};
use dsubspace::sketch::write_sv_csv;
use dsubspace::{problems, solver, DecreaseRule, PollFamily, RngStream, SketchKind, SolverConfig, SolverKind, StreamId};

#[derive(Parser)]
#[command(name = "dsubspace", version, about = "Direct search in random subspaces")]
struct Cli {
    /// Print the problem registry and exit.
    #[arg(long)]
    list_problems: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on one problem and print its history CSV.
    Solve(SolveArgs),
    /// Run a campaign described by a config file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: `bench-out`).
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
    },
    /// Recompute performance profiles from a summary CSV.
    Profile {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest singular values of s = 1 hashing matrices.
    HashingSv {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated `n:r` pairs; defaults to the standard sweep.
        #[arg(long)]
        pairs: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    problem: String,
    #[arg(long, default_value = "ds")]
    solver: SolverKind,
    #[arg(long, default_value = "identity")]
    sketch: SketchKind,
    #[arg(long, default_value = "coord")]
    poll: PollFamily,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Evaluation budget; defaults to 200(n+1).
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    alpha0: f64,
    #[arg(long, default_value_t = 1000.0)]
    alpha_max: f64,
    #[arg(long, default_value_t = 2.0)]
    gamma_inc: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma_dec: f64,
    #[arg(long, default_value = "practical")]
    rule: DecreaseRule,
    #[arg(long, default_value_t = 2e-5)]
    c: f64,
    /// Evaluate the whole polling set every iteration.
    #[arg(long)]
    exhaustive: bool,
    /// Write the history CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> dsubspace::Result<()> {
    if cli.list_problems {
        print!("{}", problems::list());
        return Ok(());
    }
    let Some(command) = cli.command else {
        eprintln!("nothing to do; see --help");
        return Ok(());
    };
    match command {
        Command::Solve(args) => solve(args),
        Command::Bench { config, out } => {
            let campaign = Campaign::parse(&fs::read_to_string(&config)?)?;
            let result = bench::run_campaign(&campaign)?;
            result.write(&campaign, &out)?;
            eprintln!("{} runs written to {}", result.runs.len(), out.display());
            Ok(())
        }
        Command::Profile { from, out } => {
            let (taus, rows) = read_summary_csv(fs::File::open(&from)?)?;
            let profiles = bench::profiles_from_summary(&taus, &rows)?;
            write_to(out, |w| bench::write_profile_csv(&profiles, w))
        }
        Command::HashingSv { trials, seed, pairs, out } => {
            let pairs = match pairs {
                Some(text) => parse_pairs(&text)?,
                None => bench::default_hashing_pairs(),
            };
            let stats = bench::hashing_sv(&pairs, trials, seed)?;
            write_to(out, |w| write_sv_csv(&stats, w))
        }
    }
}

fn solve(args: SolveArgs) -> dsubspace::Result<()> {
    let problem = problems::build(&args.problem, args.seed)?;
    let cfg = SolverConfig {
        solver: args.solver,
        alpha0: args.alpha0,
        alpha_max: args.alpha_max,
        gamma_inc: args.gamma_inc,
        gamma_dec: args.gamma_dec,
        c: args.c,
        rule: args.rule,
        max_evals: Some(args.budget.unwrap_or(200 * (problem.dim() as u64 + 1))),
        poll: args.poll,
        sketch: args.sketch,
        opportunistic: !args.exhaustive,
        ..SolverConfig::default()
    };
    let mut rng = RngStream::new(args.seed, StreamId::new(args.problem.as_str(), cfg.label(), 0));
    let record = solver::run(&problem, &cfg, &mut rng)?;
    write_to(args.out, |w| record.write_history_csv(w))?;

    let row = SummaryRow::from_record(&args.problem, &cfg.label(), args.seed, &record);
    let mut summary = Vec::new();
    write_summary_csv(&[row], &[], &mut summary)?;
    io::stderr().write_all(&summary)?;
    Ok(())
}

fn parse_pairs(text: &str) -> dsubspace::Result<Vec<(usize, usize)>> {
    text.split(',')
        .map(|p| {
            let (n, r) = p
                .trim()
                .split_once(':')
                .ok_or_else(|| dsubspace::Error::Parse(format!("expected `n:r`, got `{p}`")))?;
            let num = |s: &str| s.trim().parse::<usize>().map_err(|_| dsubspace::Error::Parse(format!("bad number `{s}`")));
            Ok((num(n)?, num(r)?))
        })
        .collect()
}

fn write_to(
    path: Option<PathBuf>,
    f: impl FnOnce(&mut dyn Write) -> dsubspace::Result<()>,
) -> dsubspace::Result<()> {
    match path {
        Some(p) => {
            let mut file = io::BufWriter::new(fs::File::create(p)?);
            f(&mut file)?;
            file.flush()?;
            Ok(())
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use regret_qd::io::{self, layout};
use regret_qd::orchestrator::{run_search, Mode};
use regret_qd::{Error, SearchConfig};

/// Regret-guided level search on the MiniPitch football simulator.
#[derive(Parser, Debug)]
#[command(name = "regret-qd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a search and write a result directory.
    Run(RunArgs),
    /// Print final metrics and regenerate heatmaps from a result directory.
    Report(ReportArgs),
    /// Export the cross-play and self-play traces of one archive cell.
    Replay(ReplayArgs),
    /// Check a configuration file without running anything.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Result directory written by `run`.
    #[arg(long)]
    out: PathBuf,
    /// Only regenerate this policy's heatmap.
    #[arg(long)]
    policy: Option<String>,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    /// Result directory written by `run`; the replay goes to its `replays/`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    policy: String,
    /// Cell as `X,Y` bin indices.
    #[arg(long, value_parser = parse_cell)]
    cell: (usize, usize),
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    config: PathBuf,
}

fn parse_cell(s: &str) -> Result<(usize, usize), String> {
    let (x, y) = s.split_once(',').ok_or("expected X,Y")?;
    let x = x.trim().parse().map_err(|_| format!("bad x bin `{x}`"))?;
    let y = y.trim().parse().map_err(|_| format!("bad y bin `{y}`"))?;
    Ok((x, y))
}

enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ConfigKey { .. }
            | Error::InvalidConfig(_)
            | Error::InvalidInput(_)
            | Error::UnknownPolicy(_)
            | Error::InvalidKey { .. } => Failure::Validation(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<SearchConfig, Failure> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())))?;
            io::parse_config_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", p.display())))
        }
        None => Ok(SearchConfig::default()),
    }
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(m) = &args.mode {
        config.mode = m.parse::<Mode>()?;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(i) = args.iterations {
        config.iterations = i;
    }
    config.validate()?;
    eprintln!(
        "running {} for {} iterations (seed {}) into {}",
        config.mode,
        config.iterations,
        config.seed,
        args.out.display()
    );
    let result = run_search(&config)?;
    io::write_result_dir(&result, &args.out)?;
    if let Some(m) = result.metrics.last() {
        println!(
            "iteration {} mean_archive_regret {:.4} coverage {:.3} scoring_rate {:.3} evaluations {}",
            m.iteration, m.mean_archive_regret, m.coverage, m.scoring_rate, result.evaluations
        );
    }
    match result.failure {
        Some(f) => Err(Failure::Runtime(format!(
            "search stopped after {} iterations: {f}",
            result.iterations_completed
        ))),
        None => Ok(()),
    }
}

fn report(args: ReportArgs) -> Result<(), Failure> {
    let file: regret_qd::ArchiveFile = io::load_archive(&args.out.join(layout::ARCHIVE))?;
    let metrics_text = std::fs::read_to_string(args.out.join(layout::METRICS)).map_err(Error::from)?;
    let metrics = io::parse_metrics_csv(&metrics_text)?;
    if let Some(m) = metrics.last() {
        println!("{}", io::METRICS_HEADER);
        println!(
            "{},{},{},{},{},{}",
            m.iteration, m.evaluations, m.mean_archive_regret, m.scoring_rate, m.coverage, m.qd_score
        );
    }
    let dir = args.out.join(layout::HEATMAPS);
    std::fs::create_dir_all(&dir).map_err(Error::from)?;
    let ids: Vec<String> = match &args.policy {
        Some(id) => vec![id.clone()],
        None => file.roster.iter().map(|p| p.id.clone()).collect(),
    };
    println!("policy_id,mean_regret,coverage,scoring_rate");
    for id in ids {
        let p = file.policy_index(&id)?;
        io::export_heatmap(&file, &id, &dir)?;
        println!(
            "{id},{},{},{}",
            file.archive.mean_regret(Some(p)),
            file.archive.coverage(Some(p)),
            file.archive.scoring_rate(Some(p))
        );
    }
    if args.policy.is_none() {
        // the last checkpoint can predate the final iteration
        println!(
            "all,{},{},{}",
            file.archive.mean_regret(None),
            file.archive.coverage(None),
            file.archive.scoring_rate(None)
        );
    }
    Ok(())
}

fn replay(args: ReplayArgs) -> Result<(), Failure> {
    let config = load_config(Some(&args.out.join(layout::CONFIG)))?;
    let file: regret_qd::ArchiveFile = io::load_archive(&args.out.join(layout::ARCHIVE))?;
    let p = file.policy_index(&args.policy)?;
    let (x_bin, y_bin) = args.cell;
    let key = regret_qd::archive::CellKey {
        policy_index: p,
        x_bin,
        y_bin,
    };
    if !file.archive.spec().contains(key) {
        return Err(Failure::Validation(format!("cell ({x_bin}, {y_bin}) is outside the grid")));
    }
    let elite = file
        .archive
        .get(key)
        .ok_or_else(|| Failure::Validation(format!("cell ({x_bin}, {y_bin}) of `{}` is empty", args.policy)))?;
    let replay = io::export_replay(
        &elite.level,
        &file.roster,
        &args.policy,
        &file.target,
        elite.eval_seed,
        config.repeats,
        &config.match_config,
    )?;
    let dir = args.out.join("replays");
    std::fs::create_dir_all(&dir).map_err(Error::from)?;
    let path = dir.join(format!("{}_{x_bin}_{y_bin}.json", args.policy));
    io::save_replay(&replay, &path)?;
    println!("{}", path.display());
    Ok(())
}

fn validate(args: ValidateArgs) -> Result<(), Failure> {
    let config = load_config(Some(&args.config))?;
    print!("{}", io::config_to_string(&config));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Report(a) => report(a),
        Command::Replay(a) => replay(a),
        Command::Validate(a) => validate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand};
use sqt_core::agent::Variant;
use sqt_core::envs::make_mdp;
use sqt_core::harness::{compare, parse_config, parse_seeds, run_experiment, summary_path};
use sqt_core::tabular::{bias_experiment_with, write_bias_csv, TabularAlgo, EPSILON};

#[derive(Parser)]
#[command(
    name = "sqt",
    version,
    about = "Ensemble actor-critic training, result comparison and tabular bias experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one agent per seed and write evaluation CSVs.
    Train(Box<TrainArgs>),
    /// Percent improvement of A over B per environment.
    Compare { a: PathBuf, b: PathBuf },
    /// Tabular over/under-estimation experiment against the exact optimum.
    Bias(BiasArgs),
}

#[derive(clap::Args)]
struct TrainArgs {
    /// key = value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    env: Option<String>,
    #[arg(long, value_parser = parse_variant)]
    algo: Option<Variant>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    n_networks: Option<usize>,
    /// min, mean or wminmax
    #[arg(long)]
    operator: Option<String>,
    /// Weight on the min for wminmax.
    #[arg(long)]
    lambda: Option<f64>,
    /// Inclusive range such as 0..4, or a comma list.
    #[arg(long, value_parser = parse_seed_arg)]
    seeds: Option<String>,
    #[arg(long)]
    steps: Option<u64>,
    /// Hidden layer widths, e.g. 64,64
    #[arg(long)]
    hidden: Option<String>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Actor and critic learning rate.
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    warmup_steps: Option<u64>,
    #[arg(long)]
    target_interval: Option<u64>,
    #[arg(long)]
    eval_interval: Option<u64>,
    #[arg(long)]
    eval_episodes: Option<usize>,
    /// Evaluation CSV; a per-seed summary is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BiasArgs {
    #[arg(long, default_value = "max-bias")]
    mdp: String,
    /// Comma list of q, double_q, maxmin:N, beta:B, q_kappa:K, minimax.
    #[arg(long, value_parser = parse_tabular_algo, value_delimiter = ',', required = true)]
    algo: Vec<TabularAlgo>,
    /// Number of seeds, run as 0..N-1.
    #[arg(long, default_value_t = 100)]
    seeds: u64,
    #[arg(long, default_value_t = 300)]
    episodes: usize,
    #[arg(long, default_value_t = EPSILON)]
    epsilon: f64,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::parse(s).map_err(|e| e.to_string())
}

fn parse_tabular_algo(s: &str) -> Result<TabularAlgo, String> {
    TabularAlgo::parse(s).map_err(|e| e.to_string())
}

fn parse_seed_arg(s: &str) -> Result<String, String> {
    parse_seeds(s)
        .map(|_| s.to_string())
        .map_err(|e| e.to_string())
}

fn train(args: TrainArgs) -> Result<()> {
    let text = match &args.config {
        Some(p) => {
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
        }
        None => String::new(),
    };
    let mut owned: Vec<(&str, String)> = Vec::new();
    let mut set = |k: &'static str, v: Option<String>| {
        if let Some(v) = v {
            owned.push((k, v));
        }
    };
    set("env", args.env);
    set("algo", args.algo.map(|a| a.name().to_string()));
    set("alpha", args.alpha.map(|v| v.to_string()));
    set("n_networks", args.n_networks.map(|v| v.to_string()));
    set("operator", args.operator);
    set("lambda", args.lambda.map(|v| v.to_string()));
    set("seeds", args.seeds);
    set("steps", args.steps.map(|v| v.to_string()));
    set("hidden", args.hidden);
    set("batch_size", args.batch_size.map(|v| v.to_string()));
    set("lr", args.lr.map(|v| v.to_string()));
    set("warmup_steps", args.warmup_steps.map(|v| v.to_string()));
    set(
        "target_interval",
        args.target_interval.map(|v| v.to_string()),
    );
    set("eval_interval", args.eval_interval.map(|v| v.to_string()));
    set("eval_episodes", args.eval_episodes.map(|v| v.to_string()));
    set("out", args.out.map(|p| p.display().to_string()));
    let overrides: Vec<(&str, &str)> = owned.iter().map(|(k, v)| (*k, v.as_str())).collect();
    let cfg = parse_config(&text, &overrides)?;
    let Some(out) = cfg.out.clone() else {
        bail!("no output path: pass --out or set 'out' in the config file");
    };

    let records = run_experiment(&cfg)?;
    for r in &records {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}"));
        print!(
            "seed {}: final {} max {} episodes {} ({:.1}s)",
            r.seed,
            fmt(r.final_return()),
            fmt(r.max_snapshot()),
            r.episode_returns.len(),
            r.wall_clock.as_secs_f64()
        );
        match &r.error {
            Some(e) => println!(" stopped: {e}"),
            None => println!(),
        }
    }
    println!(
        "wrote {} and {}",
        out.display(),
        summary_path(&out).display()
    );
    if records.iter().any(|r| r.error.is_some()) {
        bail!("some seeds stopped early");
    }
    Ok(())
}

fn bias(args: BiasArgs) -> Result<()> {
    let mdp = make_mdp(&args.mdp)?;
    let mut reports = Vec::new();
    for algo in &args.algo {
        reports.push(bias_experiment_with(
            &mdp,
            *algo,
            args.episodes,
            args.seeds,
            args.epsilon,
        )?);
    }
    let rows: Vec<_> = reports.iter().flat_map(|r| r.rows()).collect();
    match &args.out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write_bias_csv(&mut w, &rows)?;
            w.flush()?;
            for r in &reports {
                println!("{}", r.summary());
            }
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write_bias_csv(&mut w, &rows)?;
            w.flush()?;
            for r in &reports {
                eprintln!("{}", r.summary());
            }
        }
    }
    Ok(())
}

/// Like `Cli::parse`, but every flag error also shows the usage line.
fn parse_cli() -> Cli {
    match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => {
            let rendered = e.render().to_string();
            eprint!("{rendered}");
            if !rendered.contains("Usage:") {
                let mut cmd = Cli::command();
                cmd.build();
                let args: Vec<String> = std::env::args().collect();
                let sub = args
                    .get(1)
                    .and_then(|name| cmd.find_subcommand_mut(name).cloned());
                let usage = match sub {
                    Some(mut sub) => sub.render_usage(),
                    None => cmd.render_usage(),
                };
                eprintln!("\n{usage}");
            }
            std::process::exit(2);
        }
    }
}

fn main() -> ExitCode {
    let cli = parse_cli();
    let result = match cli.command {
        Command::Train(args) => train(*args),
        Command::Compare { a, b } => compare(&a, &b).map(|t| println!("{t}")).map_err(Into::into),
        Command::Bias(args) => bias(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

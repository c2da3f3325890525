use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stackelberg_dsg::benchmark::BenchmarkParams;
use stackelberg_dsg::cli::{cmd_bench, cmd_instances, cmd_simulate, cmd_sweep, RunOptions};
use stackelberg_dsg::families::FamilyParams;

#[derive(Parser)]
#[command(name = "dsg", version, about = "Decentralized Stackelberg bandit games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a canonical instance and print its benchmarks.
    Instances {
        family: String,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        y: Option<f64>,
        #[arg(long)]
        leaders: Option<usize>,
        #[arg(long)]
        followers: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Instance document to write.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute every benchmark of an instance document.
    Bench {
        instance: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[arg(long)]
        grid_oracle: bool,
    },
    /// Run all trials of an experiment config.
    Simulate(RunArgs),
    /// Run an experiment config over its horizon grid and fit exponents.
    Sweep(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
}

impl RunArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            seed: self.seed,
            jobs: self.jobs,
            out: self.out.clone(),
            delta: self.delta,
            gamma: self.gamma,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Instances {
            family,
            delta,
            x,
            y,
            leaders,
            followers,
            gamma,
            out,
        } => {
            let params = FamilyParams {
                delta: *delta,
                x: *x,
                y: *y,
                leaders: *leaders,
                followers: *followers,
                ..FamilyParams::default()
            };
            cmd_instances(family, &params, &BenchmarkParams::gamma(*gamma), out.as_deref())
        }
        Command::Bench {
            instance,
            gamma,
            c,
            d,
            grid_oracle,
        } => cmd_bench(instance, &BenchmarkParams::generalized(*gamma, *c, *d), *grid_oracle),
        Command::Simulate(args) => cmd_simulate(&args.config, &args.options()),
        Command::Sweep(args) => cmd_sweep(&args.config, &args.options()),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
